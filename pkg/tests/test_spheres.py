import math

import pytest
from hypothesis import given, settings, strategies as st

from operad_lab import disc_operads as D
from operad_lab import geometry as g
from operad_lab import sampling as SM
from operad_lab import spheres as S
from operad_lab.disc_operads import DiscConfig
from operad_lab.errors import BackendError
from operad_lab.geometry import INF, Basepoint, Norm

from conftest import Q, config

seeds = st.integers(0, 10**6)


def _star(seed, labels=None, dim=1, norm=Norm.LINF):
    spec = SM.SampleSpec(seed=seed, dim=dim, norm=norm, max_labels=4)
    return SM.sample_config(spec, "S", rng=SM.rng_for(seed, 0, "S"), labels=labels)


def test_projection_examples(two_discs):
    inside = config([1, 2], ["0", "0"], ["1/2", "1/2"])
    assert S.project_barS(inside) is inside
    assert S.project_barS(two_discs) == Basepoint({1, 2})


def test_compose_with_basepoint_absorbs(two_discs):
    b = config(["a", "b"], ["-1/2", "1/2"], ["1/2", "1/2"])
    assert S.sphere_compose(Basepoint({1, 2}), b, 2) == Basepoint({1, "a", "b"})
    assert S.sphere_compose(two_discs, Basepoint({"a", "b"}), 1) == Basepoint({2, "a", "b"})
    assert S.sphere_compose(two_discs, b, 2) == D.compose(two_discs, b, 2)


def test_retraction_example():
    a = DiscConfig({1: (0.1,), 2: (-0.1,)}, {1: 0.5, 2: 0.5})
    assert S.retraction_scale(a) == pytest.approx(0.2)
    out = S.barS_retraction(a)
    assert out.x[1][0] == pytest.approx(-math.log(0.8) * 0.1)
    assert out.x[1][0] == pytest.approx(0.02231, abs=1e-5)
    assert out.x[2][0] == pytest.approx(-0.02231, abs=1e-5)


def test_retraction_scale_blows_up_near_b_one():
    # a tiny disc almost at its own edge: b = 1 - 1e-6 inside the open star
    eps, b = 1e-7, 1 - 1e-6
    x1 = b * eps
    a = DiscConfig({1: (x1,), 2: (-eps * x1 / (1 - eps),)}, {1: eps, 2: 1 - eps})
    assert D.in_open_star(a, eps=0)
    assert S.retraction_scale(a) == pytest.approx(b, rel=1e-12)
    out = S.barS_retraction(a, eps=0)
    factor = out.x[1][0] / a.x[1][0]
    assert factor == pytest.approx(-math.log(1e-6), rel=1e-6)
    assert factor > 13.8
    factors = []
    for k in (2, 4, 6):
        b = 1 - 10.0 ** -k
        x1 = b * eps
        c = DiscConfig({1: (x1,), 2: (-eps * x1 / (1 - eps),)}, {1: eps, 2: 1 - eps})
        factors.append(S.barS_retraction(c, eps=0).x[1][0] / x1)
    assert factors == sorted(factors)


def test_retraction_outside_star_and_exact_backend(two_discs):
    assert S.barS_retraction(two_discs.to_float()) == Basepoint({1, 2})
    assert S.barS_retraction(Basepoint({1, 2})) == Basepoint({1, 2})
    with pytest.raises(BackendError):
        S.barS_retraction(config([1, 2], ["0", "0"], ["1/2", "1/2"]))


def test_coend_pairing_example(two_discs):
    assert S.coend_pairing((Q(0),), two_discs) == {1: (Q(-1),), 2: (Q(1),)}
    assert S.coend_pairing(INF, two_discs) == {1: INF, 2: INF}
    assert S.coend_pairing((Q(0),), Basepoint({1, 2})) == {1: INF, 2: INF}


def test_split_example():
    a = DiscConfig({1: (-0.1, 0.0), 2: (0.1, 0.0)}, {1: 0.5, 2: 0.5})
    av, aw = S.sigma_split(a, (1, 1))
    assert D.in_open_star(av) and D.in_open_star(aw)
    assert S.sigma_merge(av, aw) == a
    assert S.sigma_merge(Basepoint({1, 2}), aw) == Basepoint({1, 2})


def test_composition_can_leave_the_open_star():
    found = None
    for seed in range(500):
        a = _star(seed)
        b = D.relabel(_star(seed + 10**6), {k: f"b{k}" for k in range(10)})
        c = S.sphere_compose(a, b, a.ordered_labels()[0])
        if not D.in_open_star(c):
            found = c
            break
    assert found is not None
    assert S.project_barS(found) == Basepoint(found.labels)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_decomposition_preserves_open_star(seed):
    c = _star(seed)
    ks = c.ordered_labels()
    if len(ks) < 3:
        return
    outer, inner = S.barS_decompose(c, ks[:2], "h")
    assert D.in_open_star(outer) and D.in_open_star(inner)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_block_barycentre_inequalities(seed):
    assert S.star_block_violations(_star(seed)) == []


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_pairing_square(seed):
    rng = SM.rng_for(seed, 1, "pair")
    spec = SM.SampleSpec(seed=seed, max_labels=3)
    a = SM.sample_config(spec, "R", rng=rng)
    b = D.relabel(SM.sample_config(spec, "R", rng=rng), {k: f"b{k}" for k in range(10)})
    if rng.random() < 0.2:
        b = Basepoint(b.labels)
    v = (SM.rand_rational(rng),)
    direct, second = S.coend_square(v, a, b, a.ordered_labels()[-1])
    assert direct == second


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_x_part_outside_star_forces_merge_outside(seed):
    rng = SM.rng_for(seed, 2, "merge")
    spec = SM.SampleSpec(seed=seed, max_labels=3)
    av = SM.sample_config(spec, "R", rng=rng)
    if D.in_open_star(av):
        return
    y = {k: (SM.rand_rational(rng, lo=-1, hi=1),) for k in av.t}
    aw = DiscConfig(y, dict(av.t))
    assert not D.in_open_star(S.sigma_merge(av, aw))
