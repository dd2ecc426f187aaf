"""Independent numeric oracles shared by the test modules.

The z-constants here come from trigonometry (z1 = 2cos(pi/8) + 2sin(pi/8),
z2 = 2cos(pi/8) - 2sin(pi/8)) rather than from the nested square roots used by
the package, so the two evaluations are computed independently.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest

ORACLE_DPS = 40


def oracle_z():
    with mpmath.workdps(ORACLE_DPS):
        c, s = mpmath.cos(mpmath.pi / 8), mpmath.sin(mpmath.pi / 8)
        z1 = 2 * c + 2 * s
        z2 = 2 * c - 2 * s
        return z1, z2, z1 * z2


def oracle_decode(q) -> mpmath.mpf:
    z1, z2, z12 = oracle_z()
    a, b, c, d = (int(v) for v in q)
    with mpmath.workdps(ORACLE_DPS):
        return a + b * z1 + c * z2 + d * z12


def oracle_b_matrix() -> np.ndarray:
    """The B matrix as float64 values of its symbolic entries."""
    from aidct.transform import B_SYMBOLIC

    z1, z2, z12 = oracle_z()
    out = np.zeros((8, 8))
    for r, row in enumerate(B_SYMBOLIC):
        for c, q in enumerate(row):
            with mpmath.workdps(ORACLE_DPS):
                out[r, c] = float(q.a + q.b * z1 + q.c * z2 + q.d * z12)
    return out


def naive_dct(x) -> np.ndarray:
    n = len(x)
    out = np.zeros(n)
    for k in range(n):
        ck = math.sqrt(1 / n) if k == 0 else math.sqrt(2 / n)
        out[k] = ck * sum(x[m] * math.cos((2 * m + 1) * k * math.pi / (2 * n)) for m in range(n))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def oracle_ba_scaled(precision: int = 30) -> np.ndarray:
    """``B @ A`` rounded to ``precision`` decimal digits, as integers times 10**precision."""
    from aidct.transform import B_SYMBOLIC, A

    z1, z2, z12 = oracle_z()
    with mpmath.workdps(ORACLE_DPS + precision):
        scale = mpmath.mpf(10) ** precision
        b = [[q.a + q.b * z1 + q.c * z2 + q.d * z12 for q in row] for row in B_SYMBOLIC]
        ba = [[sum(b[r][k] * int(A[k, c]) for k in range(8)) for c in range(8)] for r in range(8)]
        return np.array([[int(mpmath.nint(v * scale)) for v in row] for row in ba], dtype=object)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
