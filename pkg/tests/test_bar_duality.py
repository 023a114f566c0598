import pytest
from hypothesis import given, settings, strategies as st

from operad_lab import bar_duality as B
from operad_lab import disc_operads as D
from operad_lab import fulton_macpherson as FM
from operad_lab import geometry as g
from operad_lab import sampling as SM
from operad_lab import spheres as S
from operad_lab import trees as TR
from operad_lab.bar_duality import BarPoint, BFPoint
from operad_lab.disc_operads import DiscConfig
from operad_lab.errors import PreconditionError
from operad_lab.geometry import INF, Basepoint

from conftest import Q, config

seeds = st.integers(0, 10**6)
HALF = {1: Q(1, 2), 2: Q(1, 2)}


def _pair(a, b, labels=(1, 2)):
    return FM.fm_from_configuration({labels[0]: (Q(a),), labels[1]: (Q(b),)})


def _corolla_bar(r, z):
    T = TR.corolla(z.labels)
    return B.make_bar_point(T, {T.root: r}, z)


def _tree_point(seed, labels, dim=1):
    rng = SM.rng_for(seed, 0, "bar")
    T = SM.sample_tree(rng, labels)
    return rng, T, SM.sample_tree_point(rng, T, dim)


# -- tree-indexed subspace -------------------------------------------------

def test_grafted_composite_is_in_tree_subspace(two_discs):
    b = config(["a", "b"], ["-1/2", "1/2"], ["1/2", "1/2"])
    T = TR.graft(TR.corolla({1, 2}), TR.corolla({"a", "b"}), 2)
    c = D.compose(two_discs, b, 2)
    assert B.dv_tree_membership(c, T)
    moved = DiscConfig({**c.x, "a": (Q(3, 8),), "b": (Q(5, 8),)}, c.t)
    assert not B.dv_tree_membership(moved, T)
    assert B.dv_violations(moved, T)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(2, 5))
def test_factors_round_trip(seed, n):
    _, T, z = _tree_point(seed, range(n))
    assert B.dv_tree_membership(z, T)
    f = B.tree_factors(z, T)
    assert all(D.in_D(c) for c in f.values())
    assert B.tree_compose(T, f) == z


def test_make_bar_point_rejects_points_off_the_tree(two_discs):
    T = TR.corolla({1, 2})
    with pytest.raises(PreconditionError):
        B.make_bar_point(T, {T.root: 1}, config([1, 2], ["-1/4", "1/4"], ["1/2", "1/2"]))


# -- canonical forms and coassociativity ----------------------------------

def test_bar_normalize_rules(two_discs):
    T = TR.corolla({1, 2})
    assert B.bar_normalize(T, {T.root: 0}, two_discs) == Basepoint({1, 2})
    assert B.bar_normalize(T, {T.root: INF}, two_discs) == Basepoint({1, 2})
    _, T, z = _tree_point(3, range(4))
    r = {e: Q(1) for e in T.internal_edges}
    for e in T.internal_edges:
        if e != T.root:
            r[e] = Q(0)
    p = B.bar_normalize(T, r, z)
    assert p.tree.is_corolla() and p.z == z


def _smash(*parts):
    return ("*",) if any(g.is_basepoint(p) for p in parts) else parts


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_bar_decompose_coassociative(seed):
    rng, T0, _ = _tree_point(seed, [1, 2])
    outer = SM.sample_tree(rng, [1, 2, 3])
    mid = SM.sample_tree(rng, ["j", "a"])
    inner = SM.sample_tree(rng, ["b", "c"])
    T = TR.graft(TR.graft(outer, mid, 2), inner, "j")
    z = SM.sample_tree_point(rng, T, 1)
    r = {e: SM.rand_rational(rng, lo=0, hi=3) for e in T.internal_edges}
    p = B.make_bar_point(T, r, z)
    J_mid = frozenset({"a", "b", "c"})
    J_in = frozenset({"b", "c"})
    # outer first, then the middle factor
    p1, p2 = B.bar_decompose(p, J_mid, 2)
    p2a, p2b = B.bar_decompose(p2, J_in, "j")
    # inner first, then the outer split of the remainder
    q1, q2 = B.bar_decompose(p, J_in, "j")
    q1a, q1b = B.bar_decompose(q1, {"a", "j"}, 2)
    assert _smash(p1, p2a, p2b) == _smash(q1a, q1b, q2)


# -- the pairing -----------------------------------------------------------

def test_alpha_corolla_examples():
    z = config([1, 2], ["-1/2", "1/2"], ["1/2", "1/2"])
    y = FM.fm_normalize(_pair(-1, 1), HALF)
    out = B.alpha_eval(y, _corolla_bar(Q(1, 2), z))
    assert out == config([1, 2], ["0", "0"], ["1/2", "1/2"])
    assert D.in_open_star(out)
    raw = B.alpha_raw(y, _corolla_bar(Q(1, 4), z))
    assert raw.x == {1: (Q(-1, 4),), 2: (Q(1, 4),)}
    assert B.alpha_eval(y, _corolla_bar(Q(1, 4), z)) == Basepoint({1, 2})
    assert B.alpha_eval(y, _corolla_bar(Q(0), z)) == Basepoint({1, 2})
    assert B.alpha_eval(y, _corolla_bar(INF, z)) == Basepoint({1, 2})


def test_alpha_requires_normalized_fm_point():
    z = config([1, 2], ["-1/2", "1/2"], ["1/2", "1/2"])
    with pytest.raises(PreconditionError):
        B.alpha_eval(_pair(0, 5), _corolla_bar(Q(1, 2), z))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_root_weight_zero_gives_basepoint(seed):
    rng, T, z = _tree_point(seed, range(4))
    y, r = SM.aligned_fm_point(rng, T, z)
    r = {e: (v if not g.is_inf(v) else Q(1)) for e, v in r.items()}
    r[T.root] = Q(0)
    assert g.is_basepoint(B.alpha_eval(y, BarPoint(T, r, z)))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_edge_barycentre_closed_form(seed):
    rng, T, z = _tree_point(seed, range(5))
    y, _ = SM.aligned_fm_point(rng, T, z)
    r = {e: SM.rand_rational(rng, lo=0, hi=4) for e in T.internal_edges}
    p = BarPoint(T, r, z)
    for e in T.edges:
        assert B.alpha_edge_barycentre(y, p, e) == B.alpha_edge_closed_form(y, p, e)
    assert B.alpha_edge_barycentre(y, p, T.root) == (Q(0),)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_diagram_on_grafted_trees(seed):
    rng = SM.rng_for(seed, 0, "diag")
    T1 = SM.sample_tree(rng, [1, 2, 3])
    T2 = SM.sample_tree(rng, ["a", "b"])
    T = TR.graft(T1, T2, 2)
    z = SM.sample_tree_point(rng, T, 1)
    f1 = B.tree_factors(D.decompose(z, T2.labels, 2)[0], T1)
    f2 = B.tree_factors(D.decompose(z, T2.labels, 2)[1], T2)
    y1 = FM.fm_from_tree(T1, {e: c.x for e, c in f1.items()})
    y2 = FM.fm_from_tree(T2, {e: c.x for e, c in f2.items()})
    r = SM.aligned_weights(rng, T, z, tight=0.7)
    rep = B.alpha_diagram_check(y1, y2, BarPoint(T, r, z), 2)
    assert rep.ok, rep.notes


def test_diagram_on_undecomposable_tree():
    # corolla on {1, a, b}: pairing with a composite FM point is the basepoint
    z = config([1, "a", "b"], ["-1/2", "1/4", "3/4"], ["1/2", "1/4", "1/4"])
    rep = B.alpha_diagram_check(_pair(-1, 1), _pair(-1, 1, ("a", "b")),
                                _corolla_bar(Q(1, 2), z), 2)
    assert rep.ok and g.is_basepoint(rep.clockwise)


# -- corollas ---------------------------------------------------------------

def test_bf_normalize_clustered_point_on_corolla():
    y = FM.fm_compose(_pair(-1, 1), _pair(-1, 1, ("a", "b")), 2)
    T = TR.corolla({1, "a", "b"})
    assert B.bf_normalize(T, {T.root: Q(1)}, y) == Basepoint({1, "a", "b"})
    U = TR.graft(TR.corolla({1, 2}), TR.corolla({"a", "b"}), 2)
    q = B.bf_normalize(U, {e: Q(1) for e in U.internal_edges}, y)
    assert isinstance(q, BFPoint)


def test_phi_example_and_inverse():
    T = TR.corolla({1, 2})
    y = FM.fm_normalize(_pair(-1, 1), HALF)
    u = B.phi(HALF, BFPoint(T, {T.root: Q(2)}, y))
    assert u == config([1, 2], ["-2", "2"], ["1/2", "1/2"])
    t, q = B.phi_inverse(u)
    assert t == HALF and q.r == {T.root: Q(2)}
    assert q.y.table[frozenset({1, 2})] == {1: (Q(-1),), 2: (Q(1),)}
    assert B.phi(HALF, BFPoint(T, {T.root: INF}, y)) == Basepoint({1, 2})


def test_psi_examples():
    z = config([1, 2], ["-1/2", "1/2"], ["1/2", "1/2"])
    out = B.psi(z.to_float(), DiscConfig({1: (-0.4,), 2: (0.4,)}, {1: 0.5, 2: 0.5}))
    assert out.x[1][0] == pytest.approx(-0.1) and out.x[2][0] == pytest.approx(0.1)
    assert B.psi(z, config([1, 2], ["-2", "2"], ["1/2", "1/2"])) == Basepoint({1, 2})


def test_rho_reproduces_alpha_example():
    z = config([1, 2], ["-1/2", "1/2"], ["1/2", "1/2"])
    y = FM.fm_normalize(_pair(-1, 1), HALF)
    q = BFPoint(TR.corolla({1, 2}), {frozenset({1, 2}): Q(1, 2)}, y)
    assert B.rho(q, z) == B.alpha_eval(y, _corolla_bar(Q(1, 2), z))


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_rho_factors_through_phi(seed):
    rng = SM.rng_for(seed, 0, "rho")
    spec = SM.SampleSpec(seed=seed, max_labels=4)
    z = SM.sample_config(spec, "D", rng=rng)
    T = TR.corolla(z.labels)
    y, r = SM.aligned_fm_point(rng, T, z, tight=0.6)
    rr = r[T.root]
    if rng.random() < 0.3:
        rr = SM.rand_rational(rng, lo=0, hi=3)
    q = BFPoint(T, {T.root: rr}, y)
    expected = B.psi(z, B.phi(z.t, q))
    assert B.rho(q, z) == expected


# -- the suspension square -------------------------------------------------

def _vw(xs, ys):
    return DiscConfig({1: (Q(xs[0]), Q(ys[0])), 2: (Q(xs[1]), Q(ys[1]))}, dict(HALF))


def test_pro_diagram_examples():
    y = _pair(-1, 1)
    rep = B.pro_diagram_check(_vw(("-1/2", "1/2"), ("0", "0")), y, Q(1, 2), (1, 1))
    assert rep.ok and not g.is_basepoint(rep.clockwise)
    rep = B.pro_diagram_check(_vw(("-1/2", "1/2"), ("-1/2", "1/2")), y, Q(1, 2), (1, 1))
    assert rep.ok and g.is_basepoint(rep.clockwise) and g.is_basepoint(rep.anticlockwise)


def test_pad_fm_keeps_strata():
    y = FM.fm_compose(_pair(-1, 1), _pair(-1, 1, ("a", "b")), 2)
    p = B.pad_fm(y, 2)
    assert p.dim == 3 and FM.stratum_tree(p) == FM.stratum_tree(y)
    assert S.labels_of(p) == y.labels
