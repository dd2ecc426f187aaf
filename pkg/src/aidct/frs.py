"""Final reconstruction step using expansion factors.

A factor ``alpha`` is chosen so that ``alpha*z1``, ``alpha*z2`` and ``alpha*z1z2``
sit close to integers ``m1, m2, m3``.  Reconstruction then needs one fixed-point
constant multiply for the rational component and three integer multiplies:

    alpha * (a + b*z1 + c*z2 + d*z1z2)  ~  fix(alpha*a) + b*m1 + c*m2 + d*m3

``alpha`` is held as an exact rational (parsed from its decimal string), so the
scaled integer output is bit-deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .ring import INT64_MAX, AIQuad, z_constants

DEFAULT_FRAC_BITS = 12


@dataclass(frozen=True)
class ExpansionFactor:
    alpha: Fraction
    m1: int
    m2: int
    m3: int
    frac_bits: int = DEFAULT_FRAC_BITS
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        alpha = self.alpha if isinstance(self.alpha, Fraction) else Fraction(str(self.alpha))
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        if min(self.m1, self.m2, self.m3) <= 0:
            raise ValueError("m1, m2, m3 must be positive integers")
        if not 0 <= self.frac_bits <= 32:
            raise ValueError(f"frac_bits must be in 0..32, got {self.frac_bits}")
        object.__setattr__(self, "alpha", alpha)
        if not self.label:
            object.__setattr__(self, "label", f"{self.m1},{self.m2},{self.m3}")

    @property
    def multipliers(self) -> tuple[int, int, int]:
        return (self.m1, self.m2, self.m3)

    def with_frac_bits(self, frac_bits: int) -> ExpansionFactor:
        return ExpansionFactor(self.alpha, self.m1, self.m2, self.m3, frac_bits, self.label)


SET_12_5_13 = ExpansionFactor(Fraction("4.5958"), 12, 5, 13)
SET_437_181_473 = ExpansionFactor(Fraction("167.2309"), 437, 181, 473)
PUBLISHED_SETS = {f.label: f for f in (SET_12_5_13, SET_437_181_473)}


def parse_set(text: str, frac_bits: int = DEFAULT_FRAC_BITS) -> ExpansionFactor:
    """Look up a published set by its integers, e.g. ``"437,181,473"``."""
    key = ",".join(part.strip() for part in text.split(","))
    try:
        return PUBLISHED_SETS[key].with_frac_bits(frac_bits)
    except KeyError:
        known = " | ".join(PUBLISHED_SETS)
        raise ValueError(f"unknown expansion set {text!r}; expected one of {known}") from None


def residuals(f: ExpansionFactor, precision: int = 30) -> tuple[mpmath.mpf, mpmath.mpf, mpmath.mpf]:
    """(alpha*z1 - m1, alpha*z2 - m2, alpha*z1z2 - m3)."""
    z1, z2, z12 = z_constants(precision)
    with mpmath.workdps(precision + 10):
        alpha = mpmath.mpf(f.alpha.numerator) / f.alpha.denominator
        return (alpha * z1 - f.m1, alpha * z2 - f.m2, alpha * z12 - f.m3)


def _fix_alpha(a, f: ExpansionFactor):
    # round(alpha * a * 2**frac_bits), half-up, on exact integers
    num, den = f.alpha.numerator, f.alpha.denominator
    return (2 * num * (a << f.frac_bits) + den) // (2 * den)


def frs_reconstruct_scaled(q: AIQuad, f: ExpansionFactor) -> int:
    """``alpha * decode(q)`` in fixed point with ``f.frac_bits`` fractional bits."""
    value = _fix_alpha(q.a, f) + ((q.b * f.m1 + q.c * f.m2 + q.d * f.m3) << f.frac_bits)
    if abs(value) > INT64_MAX:
        raise OverflowError(f"FRS output {value} exceeds 64-bit range")
    return value


def frs_reconstruct(q: AIQuad, f: ExpansionFactor) -> float:
    """De-scaled reconstruction, ``scaled / (2**frac_bits * alpha)`` as a double."""
    return float(Fraction(frs_reconstruct_scaled(q, f), 1 << f.frac_bits) / f.alpha)


def error_bound(q: AIQuad, f: ExpansionFactor, precision: int = 30) -> mpmath.mpf:
    """Worst-case ``|frs_reconstruct(q) - decode(q)|`` from the residuals."""
    e1, e2, e3 = residuals(f, precision)
    with mpmath.workdps(precision + 10):
        alpha = mpmath.mpf(f.alpha.numerator) / f.alpha.denominator
        rounding = mpmath.mpf(2) ** (-f.frac_bits - 1)
        return (abs(q.b) * abs(e1) + abs(q.c) * abs(e2) + abs(q.d) * abs(e3) + rounding) / alpha


def frs_scaled_array(quads: np.ndarray, f: ExpansionFactor) -> np.ndarray:
    """Vectorised :func:`frs_reconstruct_scaled` over ``(..., 4)`` int arrays."""
    quads = np.asarray(quads, dtype=np.int64)
    peak = int(np.abs(quads).max()) if quads.size else 0
    num, den = f.alpha.numerator, f.alpha.denominator
    # largest intermediate: the rounding numerator, or the summed integer terms
    worst = max(2 * num * (peak << f.frac_bits) + den, (peak * (sum(f.multipliers) + num)) << f.frac_bits)
    work = quads if worst <= INT64_MAX else quads.astype(object)
    a, b, c, d = (work[..., k] for k in range(4))
    fixed = (2 * num * (a * (1 << f.frac_bits)) + den) // (2 * den)
    scaled = fixed + (b * f.m1 + c * f.m2 + d * f.m3) * (1 << f.frac_bits)
    if work.dtype == object:
        if any(abs(int(v)) > INT64_MAX for v in np.ravel(scaled)):
            raise OverflowError("FRS output exceeds 64-bit range")
        scaled = scaled.astype(np.int64)
    return scaled


def frs_reconstruct_array(quads: np.ndarray, f: ExpansionFactor) -> np.ndarray:
    """De-scaled reconstruction of many quads, in double precision."""
    scaled = frs_scaled_array(quads, f)
    return scaled / float(1 << f.frac_bits) / float(f.alpha)


def csd_digits(value: int) -> list[int]:
    """Canonical signed-digit form of ``value``, least significant digit first."""
    digits = []
    n = value
    while n:
        if n & 1:
            digit = 2 - (n & 3)
            n -= digit
        else:
            digit = 0
        digits.append(digit)
        n >>= 1
    return digits


def shift_add_cost(value: int) -> int:
    """Adders needed for a constant multiply realised as CSD shift-and-add."""
    nonzero = sum(1 for d in csd_digits(value) if d)
    return max(nonzero - 1, 0)


def adder_report(f: ExpansionFactor) -> dict[str, int]:
    return {f"x{m}": shift_add_cost(m) for m in f.multipliers}
