import pytest
from hypothesis import given, settings, strategies as st

from operad_lab import disc_operads as D
from operad_lab import geometry as g
from operad_lab import sampling as SM
from operad_lab.errors import SamplingError
from operad_lab.geometry import Backend, Norm

CLASS_FLAG = {"P": "in_P", "E": "in_E", "D": "in_D", "R": "in_R", "RD": "in_RD",
              "S": "in_open_star", "U": "in_U"}


def test_same_spec_same_stream():
    spec = SM.SampleSpec(seed=11, dim=2)
    a = [SM.sample_config(spec, "D", rng=spec.rng(k, "D")) for k in range(5)]
    b = [SM.sample_config(spec, "D", rng=spec.rng(k, "D")) for k in range(5)]
    assert a == b
    other = SM.SampleSpec(seed=12, dim=2)
    assert a != [SM.sample_config(other, "D", rng=other.rng(k, "D")) for k in range(5)]


def test_R_samples_are_exactly_normalized():
    spec = SM.SampleSpec(seed=3, dim=2)
    for k in range(20):
        c = SM.sample_config(spec, "R", rng=spec.rng(k, "R"))
        assert sum(c.t.values()) == 1
        assert g.weighted_barycentre(c.x, c.t, c.labels) == (0, 0)


def test_D_three_labels_in_dimension_one():
    spec = SM.SampleSpec(seed=5, dim=1, min_labels=3, max_labels=3)
    c = SM.sample_config(spec, "D")
    assert len(c.labels) == 3 and D.in_D(c)


def test_l2_needs_float_backend():
    spec = SM.SampleSpec(norm=Norm.L2)
    with pytest.raises(SamplingError):
        SM.sample_config(spec, "D")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(sorted(CLASS_FLAG)), st.integers(1, 3),
       st.sampled_from([Norm.LINF, Norm.L1]))
def test_samples_pass_classification(seed, cls, dim, norm):
    spec = SM.SampleSpec(seed=seed, dim=dim, norm=norm)
    c = SM.sample_config(spec, cls, rng=SM.rng_for(seed, 0, cls))
    assert getattr(D.classify(c, norm), CLASS_FLAG[cls])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["D", "RD", "S", "U", "R"]), st.integers(1, 3))
def test_float_l2_samples_pass_classification(seed, cls, dim):
    spec = SM.SampleSpec(seed=seed, dim=dim, norm=Norm.L2, backend=Backend.FLOAT)
    c = SM.sample_config(spec, cls, rng=SM.rng_for(seed, 0, cls))
    assert not c.exact
    assert getattr(D.classify(c, Norm.L2), CLASS_FLAG[cls])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_simplex_weights_sum_to_one(seed):
    rng = SM.rng_for(seed, 0, "simplex")
    t = SM.rand_simplex(rng, ["a", "b", "c"])
    assert sum(t.values()) == 1 and all(v > 0 for v in t.values())
