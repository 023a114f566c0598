from fractions import Fraction

import pytest

from operad_lab.disc_operads import DiscConfig


Q = Fraction


def config(labels, xs, ts) -> DiscConfig:
    """Exact 1-dimensional (or 0-dimensional when ``xs`` is None) configuration."""
    labels = list(labels)
    if xs is None:
        xs = [()] * len(labels)
    else:
        xs = [tuple(Q(c) for c in v) if isinstance(v, (tuple, list)) else (Q(v),) for v in xs]
    return DiscConfig.from_lists(labels, xs, [Q(t) for t in ts])


@pytest.fixture
def two_discs():
    return config([1, 2], ["-1/2", "1/2"], ["1/2", "1/2"])


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
