import pytest
from hypothesis import given, settings, strategies as st

from operad_lab import fulton_macpherson as FM
from operad_lab import geometry as g
from operad_lab import sampling as SM
from operad_lab import trees as TR
from operad_lab.errors import DomainError, ResourceError, ValidationError

from conftest import Q


def _v(*cs):
    return tuple(Q(c) for c in cs)


def fv_table():
    """Points 1, 2, 4 collide; inside, 1 and 4 collide; {1,4} is resolved."""
    root = {1: _v(0), 2: _v(0), 4: _v(0), 3: _v(1)}
    mid = {1: _v(0), 4: _v(0), 2: _v(1)}
    low = {1: _v(0), 4: _v(1)}
    edges = [frozenset({1, 4}), frozenset({1, 2, 4}), frozenset({1, 2, 3, 4})]
    full = dict(zip(edges, (low, mid, root)))
    table = {}
    for J in FM.subsets({1, 2, 3, 4}):
        e = next(f for f in edges if J <= f)
        table[J] = {j: full[e][j] for j in J}
    return table


def pair(a, b, labels=(1, 2)):
    return FM.fm_from_configuration({labels[0]: _v(a), labels[1]: _v(b)})


def test_example_point_validates():
    p = FM.fm_validate(fv_table(), {1, 2, 3, 4}, 1)
    T = FM.stratum_tree(p)
    assert T == TR.validate([{1}, {2}, {3}, {4}, {1, 4}, {1, 2, 4}, {1, 2, 3, 4}], {1, 2, 3, 4})


def test_example_point_from_tree():
    T = TR.validate([{1}, {2}, {3}, {4}, {1, 4}, {1, 2, 4}, {1, 2, 3, 4}], {1, 2, 3, 4})
    vp = {frozenset({1, 2, 3, 4}): {1: _v(0), 3: _v(1)},
          frozenset({1, 2, 4}): {1: _v(0), 2: _v(1)},
          frozenset({1, 4}): {1: _v(0), 4: _v(1)}}
    p = FM.fm_from_tree(T, vp)
    assert FM.fm_equal(p, FM.fm_validate(fv_table(), {1, 2, 3, 4}, 1))


def test_constant_tuple_rejected():
    tab = fv_table()
    tab[frozenset({1, 4})] = {1: _v(0), 4: _v(0)}
    with pytest.raises(ValidationError) as err:
        FM.fm_validate(tab, {1, 2, 3, 4}, 1)
    assert err.value.witness == [1, 4]


def test_incoherent_table_rejected():
    tab = fv_table()
    tab[frozenset({2, 3})] = {2: _v(1), 3: _v(0)}
    with pytest.raises(ValidationError) as err:
        FM.fm_validate(tab, {1, 2, 3, 4}, 1)
    assert "coherence" in str(err.value)


def test_missing_subset_rejected():
    tab = fv_table()
    del tab[frozenset({2, 3})]
    with pytest.raises(ValidationError):
        FM.fm_validate(tab, {1, 2, 3, 4}, 1)


def test_label_limit():
    with pytest.raises(ResourceError):
        FM.fm_validate({}, range(FM.MAX_FM_LABELS + 1), 1)


def test_normalize_example():
    p = FM.fm_normalize(pair(0, 2), {1: Q(1, 2), 2: Q(1, 2)})
    assert p.table[frozenset({1, 2})] == {1: _v(-1), 2: _v(1)}
    assert FM.is_normalized(p, {1: Q(1, 2), 2: Q(1, 2)})


def test_compose_example():
    y, z = pair(-1, 1), pair(-1, 1, ("a", "b"))
    c = FM.fm_compose(y, z, 2)
    assert c[{"a", "b"}] == {"a": _v(-1), "b": _v(1)}
    assert c[{1, "a", "b"}] == {1: _v(-1), "a": _v(1), "b": _v(1)}
    assert c[{1, "a"}] == {1: _v(-1), "a": _v(1)}
    assert c[{1, "b"}] == {1: _v(-1), "b": _v(1)}
    assert FM.stratum_tree(c) == TR.graft(TR.corolla({1, 2}), TR.corolla({"a", "b"}), 2)
    half = {1: Q(1, 2), 2: Q(1, 2)}
    assert FM.fm_norm_check(y, z, 2, half, {"a": Q(1, 2), "b": Q(1, 2)}) == []


def test_compose_errors():
    y = pair(-1, 1)
    with pytest.raises(DomainError):
        FM.fm_compose(y, pair(0, 1, (1, 5)), 2)
    with pytest.raises(DomainError):
        FM.fm_compose(y, pair(0, 1, ("a", "b")), 7)


def test_sinha_examples():
    s = FM.sinha_coords(pair(-1, 1))
    assert s.directions[(1, 2)] == _v(-1)
    p = FM.fm_from_configuration({1: _v(-1), 2: _v(0), 3: _v(1)})
    assert FM.sinha_coords(p).ratios[(1, 2, 3)] == Q(1, 2)


def test_fm_equal_is_up_to_translation_and_scale():
    assert FM.fm_equal(pair(0, 2), pair(5, 9))
    assert not FM.fm_equal(pair(0, 2), pair(2, 0))


def _random_point(seed, labels, dim):
    rng = SM.rng_for(seed, 0, "fm")
    T = SM.sample_tree(rng, labels)
    return FM.fm_from_tree(T, SM.sample_vertex_points(rng, T, dim)), T


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 2))
def test_stratum_of_tree_point(seed, dim):
    p, T = _random_point(seed, [1, 2, 3, 4], dim)
    assert FM.stratum_tree(p) == T


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_compose_grafts_strata_and_is_associative(seed):
    p, T = _random_point(seed, [1, 2, 3], 1)
    q, U = _random_point(seed + 1, ["a", "b"], 1)
    r, V = _random_point(seed + 2, ["c", "d"], 1)
    pq = FM.fm_compose(p, q, 2)
    assert FM.stratum_tree(pq) == TR.graft(T, U, 2)
    left = FM.fm_compose(pq, r, "a")
    right = FM.fm_compose(p, FM.fm_compose(q, r, "a"), 2)
    assert FM.fm_equal(left, right)
    par_l = FM.fm_compose(pq, r, 3)
    par_r = FM.fm_compose(FM.fm_compose(p, r, 3), q, 2)
    assert FM.fm_equal(par_l, par_r)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_normalized_compose_passes_weight_checks(seed):
    rng = SM.rng_for(seed, 1, "fmw")
    p, _ = _random_point(seed, [1, 2, 3], 1)
    q, _ = _random_point(seed + 1, ["a", "b", "c"], 1)
    t = SM.rand_simplex(rng, [1, 2, 3])
    u = SM.rand_simplex(rng, ["a", "b", "c"])
    i = rng.choice([1, 2, 3])
    assert FM.fm_norm_check(FM.fm_normalize(p, t), FM.fm_normalize(q, u), i, t, u) == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_normalize_is_idempotent(seed):
    rng = SM.rng_for(seed, 2, "fmn")
    p, _ = _random_point(seed, [1, 2, 3, 4], 2)
    t = SM.rand_simplex(rng, [1, 2, 3, 4])
    n = FM.fm_normalize(p, t)
    assert FM.fm_normalize(n, t) == n
    assert FM.fm_equal(n, p)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_sinha_coordinates_are_injective_on_open_stratum(seed):
    rng = SM.rng_for(seed, 3, "sinha")
    pts = {k: (Q(rng.randint(-20, 20)), Q(rng.randint(-20, 20))) for k in range(4)}
    if len(set(pts.values())) < 4:
        return
    p = FM.fm_from_configuration(pts)
    moved = {k: tuple(3 * c + 1 for c in v) for k, v in pts.items()}
    assert FM.sinha_coords(FM.fm_from_configuration(moved)) == FM.sinha_coords(p)
    k = rng.randrange(4)
    other = dict(pts)
    other[k] = (pts[k][0] + 1, pts[k][1])
    if len(set(other.values())) == 4:
        q = FM.fm_from_configuration(other)
        assert FM.fm_equal(p, q) == (FM.sinha_coords(p) == FM.sinha_coords(q))
