from __future__ import annotations

import os
from fractions import Fraction

import pytest

from heunquant.spectrum import enumerate_spectrum

WORKERS = max(1, min(8, os.cpu_count() or 1))

C_FIXED = {"a": 1, "b": Fraction(1, 10)}
B_FIXED = {"A": 1}
T_FIXED = {"m": 1}


@pytest.fixture(scope="session")
def c_grid():
    return enumerate_spectrum("c", C_FIXED, range(0, 21), workers=WORKERS)


@pytest.fixture(scope="session")
def b_grid():
    return enumerate_spectrum("B", B_FIXED, range(0, 23), workers=WORKERS)


@pytest.fixture(scope="session")
def tension_grids():
    return {K: enumerate_spectrum("tension", T_FIXED, range(2 * K + 1, 26), K=K, workers=WORKERS)
            for K in (0, 10)}


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
