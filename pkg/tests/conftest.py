"""Shared hypothesis strategies."""
from __future__ import annotations

from gmpy2 import mpq
from hypothesis import strategies as st

from orientvc.circle import CircleElement, Component, RealCombo, element
from orientvc.formula import TheoryId
from orientvc.models import canonical_model

FULL = frozenset(Component)


def rationals(max_num: int = 60, max_den: int = 24):
    return st.builds(lambda p, q: mpq(p, q),
                     st.integers(-max_num, max_num), st.integers(1, max_den))


def combos(max_num: int = 60, max_den: int = 24):
    r = rationals(max_num, max_den)
    return st.builds(RealCombo, r, r, r)


def elements(support=FULL, max_num: int = 60, max_den: int = 24) -> st.SearchStrategy[CircleElement]:
    r = rationals(max_num, max_den)
    zero = st.just(mpq(0))
    return st.builds(element,
                     r if Component.Q in support else zero,
                     r if Component.R2 in support else zero,
                     r if Component.R3 in support else zero)


theories = st.sampled_from(list(TheoryId))
pair_theories = st.sampled_from([t for t in TheoryId if t.value.startswith("PAIR")])


def model_elements(theory: TheoryId):
    return elements(canonical_model(theory).support)


# one line per acceptance criterion, repeated after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
