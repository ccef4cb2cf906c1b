from fractions import Fraction

import pytest
from hypothesis import settings

from lexmaxmin.model import BargainingInstance, Lottery
from lexmaxmin.serialization import load_shipped

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

F = Fraction


@pytest.fixture
def example1():
    return load_shipped("example1")


@pytest.fixture
def appendix_a():
    return load_shipped("appendixA")


def make_instance(columns, normalized=True, disagreement=0):
    """Instance from a list of utility columns (one tuple per alternative)."""
    n = len(columns[0])
    rows = tuple(tuple(F(c[i]) for c in columns) for i in range(n))
    names = tuple(f"a{k}" for k in range(len(columns)))
    return BargainingInstance(names, rows, Lottery.point_mass(len(columns), disagreement), normalized=normalized)


@pytest.fixture
def triangle():
    return make_instance([(0, 0), (1, 0), (0, 1)])


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            lines += [v for k, v in getattr(rep, "user_properties", []) if k == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
