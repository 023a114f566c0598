import pytest

from operad_lab import suites as SU
from operad_lab.errors import UsageError
from operad_lab.geometry import Backend, Norm
from operad_lab.sampling import SampleSpec


@pytest.mark.parametrize("name", SU.list_suites())
def test_every_suite_is_clean_on_a_small_run(name):
    rep = SU.run_suite(name, SampleSpec(seed=5, count=12))
    assert rep.ok, rep.failures[:3]
    assert rep.exit_code == 0 and rep.samples == 12


@pytest.mark.parametrize("name", sorted(SU.MUTANTS))
def test_every_mutant_is_caught_by_its_suites(name):
    m = SU.MUTANTS[name]
    for suite in m.suites:
        rep = SU.run_suite(suite, SampleSpec(seed=2, count=40), mutant_name=name)
        assert not rep.ok, f"{name} escaped {suite}"
        assert any(prop != "exception" for _, prop in rep.failures)


def test_mutant_patch_is_undone():
    from operad_lab import disc_operads as D
    before = D.compose
    with SU.mutant("compose-drop-t"):
        assert D.compose is not before
    assert D.compose is before


def test_reports_independent_of_worker_count(monkeypatch):
    spec = SampleSpec(seed=4, count=30)
    monkeypatch.setenv("OPERAD_LAB_THREADS", "1")
    a = SU.run_suite("inverse", spec, mutant_name="decompose-no-tJ").to_json(with_time=False)
    monkeypatch.setenv("OPERAD_LAB_THREADS", "3")
    b = SU.run_suite("inverse", spec, mutant_name="decompose-no-tJ").to_json(with_time=False)
    assert a == b and a["failures"]


def test_runner_errors(monkeypatch):
    with pytest.raises(UsageError):
        SU.run_suite("no-such-suite")
    with pytest.raises(UsageError):
        SU.run_suite("inverse", mutant_name="no-such-mutant")
    with pytest.raises(UsageError):
        SU.run_suite("alpha-edge", SampleSpec(backend=Backend.FLOAT))
    with pytest.raises(UsageError):
        SU.run_suite("inverse", SampleSpec(norm=Norm.L2))
    monkeypatch.setenv("OPERAD_LAB_THREADS", "many")
    with pytest.raises(UsageError):
        SU.run_suite("inverse", SampleSpec(count=1))


def test_flow_suite_runs_in_l2():
    rep = SU.run_suite("flow", SampleSpec(seed=8, count=15, norm=Norm.L2, max_dim=3))
    assert rep.ok, rep.failures[:3]


def test_failure_report_shape():
    rep = SU.run_suite("closure", SampleSpec(seed=1, count=10), mutant_name="compose-drop-t")
    assert rep.to_json(with_time=False)["failures"]
    assert rep.exit_code == 1
    w, prop = rep.failures[0]
    assert isinstance(prop, str) and "sample" in w
