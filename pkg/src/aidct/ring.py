"""Exact arithmetic over the integer module spanned by {1, z1, z2, z1*z2}.

With ``z1 = sqrt(2+sqrt2) + sqrt(2-sqrt2)`` and ``z2 = sqrt(2+sqrt2) - sqrt(2-sqrt2)``
the module is closed under multiplication:

    z1**2 = 4 + z1z2      z2**2 = 4 - z1z2      (z1z2)**2 = 8
    z1*z2 = z1z2          z1*z1z2 = 2z1 + 2z2   z2*z1z2 = 2z1 - 2z2

so every product of encoded numbers stays a 4-tuple of integers.  Components are
kept inside the signed 64-bit range; leaving it raises :class:`OverflowError`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import mpmath
import numpy as np
from mpmath.libmp import dps_to_prec

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

DEFAULT_PRECISION = 30

BASIS_NAMES = ("1", "z1", "z2", "z1z2")


def default_precision() -> int:
    """Decode precision in decimal digits, overridable with ``AIDCT_PRECISION``."""
    raw = os.environ.get("AIDCT_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"AIDCT_PRECISION must be an integer, got {raw!r}") from None
    if value < 15:
        raise ValueError(f"AIDCT_PRECISION must be >= 15, got {value}")
    return value


def _checked(value: int) -> int:
    if not INT64_MIN <= value <= INT64_MAX:
        raise OverflowError(f"AI component {value} outside signed 64-bit range")
    return value


@dataclass(frozen=True, slots=True)
class AIQuad:
    """``a + b*z1 + c*z2 + d*z1z2`` with integer components."""

    a: int = 0
    b: int = 0
    c: int = 0
    d: int = 0

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d"):
            value = getattr(self, name)
            if isinstance(value, np.integer):
                value = int(value)
                object.__setattr__(self, name, value)
            elif not isinstance(value, int) or isinstance(value, bool):
                raise TypeError(f"AIQuad component {name} must be int, got {type(value).__name__}")
            _checked(value)

    @classmethod
    def from_seq(cls, seq) -> AIQuad:
        a, b, c, d = (int(v) for v in seq)
        return cls(a, b, c, d)

    def __iter__(self) -> Iterator[int]:
        yield self.a
        yield self.b
        yield self.c
        yield self.d

    def astuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __add__(self, other: AIQuad) -> AIQuad:
        if not isinstance(other, AIQuad):
            return NotImplemented
        return quad_add(self, other)

    def __sub__(self, other: AIQuad) -> AIQuad:
        if not isinstance(other, AIQuad):
            return NotImplemented
        return quad_add(self, -other)

    def __neg__(self) -> AIQuad:
        return AIQuad(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other: AIQuad | int) -> AIQuad:
        if isinstance(other, AIQuad):
            return quad_mul(self, other)
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            k = int(other)
            return AIQuad(*(_checked(k * v) for v in self))
        return NotImplemented

    def __rmul__(self, other: int) -> AIQuad:
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return self * other
        return NotImplemented

    def __str__(self) -> str:
        return f"{self.a}{self.b:+}z1{self.c:+}z2{self.d:+}z1z2"


ZERO = AIQuad(0, 0, 0, 0)
ONE = AIQuad(1, 0, 0, 0)
Z1 = AIQuad(0, 1, 0, 0)
Z2 = AIQuad(0, 0, 1, 0)
Z1Z2 = AIQuad(0, 0, 0, 1)
BASIS = (ONE, Z1, Z2, Z1Z2)

# Reduction of basis_i * basis_j back into the module.
BASIS_PRODUCTS: tuple[tuple[AIQuad, ...], ...] = (
    (ONE, Z1, Z2, Z1Z2),
    (Z1, AIQuad(4, 0, 0, 1), Z1Z2, AIQuad(0, 2, 2, 0)),
    (Z2, Z1Z2, AIQuad(4, 0, 0, -1), AIQuad(0, 2, -2, 0)),
    (Z1Z2, AIQuad(0, 2, 2, 0), AIQuad(0, 2, -2, 0), AIQuad(8, 0, 0, 0)),
)

# Same table as an int64 array indexed [i, j, component].
PRODUCT_TENSOR = np.array([[q.astuple() for q in row] for row in BASIS_PRODUCTS], dtype=np.int64)
PRODUCT_TENSOR.setflags(write=False)

# Arai constants scaled by 4, as (a, b, c, d).
TABLE_I_SCALE = 4
TABLE_I: dict[str, AIQuad] = {
    "cos(4pi/16)": AIQuad(0, 0, 0, 1),
    "cos(2pi/16)-cos(6pi/16)": AIQuad(0, 0, 2, 0),
    "cos(6pi/16)": AIQuad(0, 1, -1, 0),
    "cos(2pi/16)+cos(6pi/16)": AIQuad(0, 2, 0, 0),
}


def basis_product_table() -> tuple[tuple[AIQuad, ...], ...]:
    return BASIS_PRODUCTS


def quad_add(p: AIQuad, q: AIQuad) -> AIQuad:
    return AIQuad(
        _checked(p.a + q.a),
        _checked(p.b + q.b),
        _checked(p.c + q.c),
        _checked(p.d + q.d),
    )


def quad_mul(p: AIQuad, q: AIQuad) -> AIQuad:
    """Product of two quads by bilinear expansion over the basis product table."""
    acc = [0, 0, 0, 0]
    for i, pi in enumerate(p):
        if pi == 0:
            continue
        for j, qj in enumerate(q):
            if qj == 0:
                continue
            w = pi * qj
            for k, t in enumerate(BASIS_PRODUCTS[i][j]):
                if t:
                    acc[k] += w * t
    return AIQuad(*(_checked(v) for v in acc))


def quad_mul_array(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Componentwise quad product of int arrays with a trailing axis of length 4.

    Uses the closed-form expansion of the basis table. No overflow check: callers
    bound their operands first (see :func:`aidct.transform.component_bound`).
    """
    a, b, c, d = (p[..., k] for k in range(4))
    e, f, g, h = (q[..., k] for k in range(4))
    cross_bd = b * h + d * f
    cross_cd = c * h + d * g
    return np.stack(
        [
            a * e + 4 * b * f + 4 * c * g + 8 * d * h,
            a * f + b * e + 2 * cross_bd + 2 * cross_cd,
            a * g + c * e + 2 * cross_bd - 2 * cross_cd,
            a * h + d * e + b * f - c * g + b * g + c * f,
        ],
        axis=-1,
    )


@lru_cache(maxsize=16)
def z_constants(precision: int = DEFAULT_PRECISION) -> tuple[mpmath.mpf, mpmath.mpf, mpmath.mpf]:
    """(z1, z2, z1*z2) with ``precision`` decimal digits plus guard digits."""
    with mpmath.workdps(precision + 10):
        root2 = mpmath.sqrt(2)
        hi = mpmath.sqrt(2 + root2)
        lo = mpmath.sqrt(2 - root2)
        z1 = hi + lo
        z2 = hi - lo
        return z1, z2, z1 * z2


@lru_cache(maxsize=16)
def scaled_z_integers(precision: int) -> tuple[int, int, int, int]:
    """``round(v * 10**precision)`` for v in (1, z1, z2, z1z2)."""
    with mpmath.workdps(precision + 10):
        scale = mpmath.mpf(10) ** precision
        return (10**precision,) + tuple(int(mpmath.nint(z * scale)) for z in z_constants(precision))


def decode_exact(p: AIQuad, precision: int | None = None) -> mpmath.mpf:
    """Real value of ``p``, with the z-constants carried at ``precision`` digits."""
    if precision is None:
        precision = default_precision()
    if precision < 15:
        raise ValueError(f"precision must be >= 15 digits, got {precision}")
    z1, z2, z12 = z_constants(precision)
    # wide enough that the integer combination of the rounded constants is exact,
    # so decode is additive without any rounding
    with mpmath.workprec(dps_to_prec(precision + 10) + 80):
        value = p.a + p.b * z1 + p.c * z2 + p.d * z12
    return value


def decode_array(quads: np.ndarray, precision: int | None = None) -> np.ndarray:
    """Decode an integer array ``(..., 4)`` into float64.

    The sum is formed exactly in integers scaled by ``10**precision`` and rounded
    to double only once, so the result is the correctly rounded double of a value
    within ``(|b|+|c|+|d|) * 10**-precision`` of the true decode.
    """
    if precision is None:
        precision = default_precision()
    if precision < 15:
        raise ValueError(f"precision must be >= 15 digits, got {precision}")
    quads = np.asarray(quads)
    weights = np.array(scaled_z_integers(precision), dtype=object)
    scaled = (quads.astype(object) * weights).sum(axis=-1)
    denom = 10**precision
    flat = [int(v) / denom for v in np.ravel(scaled)]
    return np.array(flat, dtype=np.float64).reshape(quads.shape[:-1])
