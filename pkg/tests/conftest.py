"""Shared fixtures and term shorthands for the test suite."""

import pytest

from strata import CBN, CBV, Oracle, parse

# classic combinators, spelled in the CLI term grammar
ID = r"\i.i"
DELTA = r"\w.w w"
OMEGA_LOOP = rf"({DELTA}) ({DELTA})"


def p(text: str):
    return parse(text)


@pytest.fixture(scope="session")
def cbv_oracle():
    return Oracle(CBV, 2000)


@pytest.fixture(scope="session")
def cbn_oracle():
    return Oracle(CBN, 2000)
