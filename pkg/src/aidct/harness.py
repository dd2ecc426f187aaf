"""Reference oracles, calibration against the canonical DCT, and success rates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np

from .frs import SET_12_5_13, SET_437_181_473, ExpansionFactor, frs_reconstruct_array
from .ring import decode_array, default_precision, z_constants
from .transform import B_SYMBOLIC, A, AdderCounter, dct2d_ai_decomposed, dct2d_ai_direct, dct2d_core, forward_a

TABLE_II_TOLERANCES = (10.0, 5.0, 1.0, 0.1, 0.05, 0.01, 0.005)

# Published success rates, keyed by (set label, word length).
TABLE_II = {
    ("12,5,13", 4): (99.0367, 98.1356, 90.4067, 51.7311, 42.5511, 31.4689, 24.5189),
    ("12,5,13", 8): (99.0356, 98.0089, 90.4433, 51.9189, 42.7911, 31.4267, 24.3556),
    ("437,181,473", 4): (99.9867, 99.9744, 99.8856, 98.9044, 97.9, 89.8322, 80.8699),
    ("437,181,473", 8): (99.99, 99.9744, 99.8856, 98.9044, 97.9, 89.8322, 80.8689),
}

EXCLUSION_FLOOR = 1e-9


def dct_matrix(n: int = 8) -> np.ndarray:
    """Orthonormal DCT-II matrix, rows indexed by frequency."""
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    c = np.cos((2 * m + 1) * k * math.pi / (2 * n))
    c[0] *= math.sqrt(1 / n)
    c[1:] *= math.sqrt(2 / n)
    return c


def reference_dct2d(x) -> np.ndarray:
    """Orthonormal 2-D DCT-II straight from the definition (O(N^4))."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    out = np.zeros(x.shape, dtype=np.float64)
    for u in range(n):
        cu = math.sqrt(1 / n) if u == 0 else math.sqrt(2 / n)
        for v in range(n):
            cv = math.sqrt(1 / n) if v == 0 else math.sqrt(2 / n)
            total = np.zeros(x.shape[:-2])
            for i in range(n):
                for j in range(n):
                    total = total + x[..., i, j] * math.cos((2 * i + 1) * u * math.pi / (2 * n)) * math.cos(
                        (2 * j + 1) * v * math.pi / (2 * n)
                    )
            out[..., u, v] = cu * cv * total
    return out


def numeric_ba(precision: int | None = None) -> mpmath.matrix:
    """``B @ A`` as a real matrix, B's z-entries evaluated at ``precision`` digits."""
    precision = precision or default_precision()
    z1, z2, z12 = z_constants(precision)
    with mpmath.workdps(precision + 10):
        b = mpmath.matrix(8, 8)
        for r, row in enumerate(B_SYMBOLIC):
            for c, q in enumerate(row):
                b[r, c] = q.a + q.b * z1 + q.c * z2 + q.d * z12
        a = mpmath.matrix(A.tolist())
        return b * a


def oracle_dct2d(x, precision: int | None = None) -> np.ndarray:
    """``(BA) x (BA)^T`` from the real transform matrix, as float64.

    ``BA`` is rounded to ``precision`` decimal digits and the products are taken
    exactly in scaled integers, so only the final conversion rounds.
    """
    precision = precision or default_precision()
    ba = numeric_ba(precision)
    with mpmath.workdps(precision + 10):
        scale = mpmath.mpf(10) ** precision
        scaled = np.array([[int(mpmath.nint(ba[r, c] * scale)) for c in range(8)] for r in range(8)], dtype=object)
    x = np.asarray(x).astype(object)
    prod = np.matmul(np.matmul(scaled, x), scaled.T)
    denom = 10 ** (2 * precision)
    flat = [int(v) / denom for v in np.ravel(prod)]
    return np.array(flat, dtype=np.float64).reshape(prod.shape)


class CalibrationError(RuntimeError):
    """No consistent (permutation, scale) relates the transform to the DCT-II.

    ``resolved`` maps each output position that did match to
    ``(reference position, scale)``; ``unresolved`` lists the rest.
    """

    def __init__(self, message: str, resolved: dict, unresolved: list) -> None:
        super().__init__(message)
        self.resolved = resolved
        self.unresolved = unresolved


@dataclass(frozen=True)
class CalibrationMap:
    perm: tuple[int, ...]
    scale: np.ndarray

    def predict(self, reference: np.ndarray) -> np.ndarray:
        p = np.asarray(self.perm)
        return self.scale * reference[..., p[:, None], p[None, :]]


def _match(responses: np.ndarray, basis: np.ndarray, tol: float) -> dict[int, tuple[int, float]]:
    # responses[r] and orthonormal basis[k] are vectors over the impulse inputs
    found = {}
    for r, resp in enumerate(responses):
        norm = np.linalg.norm(resp)
        if norm == 0:
            continue
        proj = basis @ resp
        k = int(np.argmax(np.abs(proj)))
        if np.linalg.norm(resp - proj[k] * basis[k]) <= tol * norm:
            found[r] = (k, float(proj[k]))
    return found


def _impulses(n_dims: int) -> np.ndarray:
    if n_dims == 1:
        return np.eye(8, dtype=np.int64)
    return np.eye(64, dtype=np.int64).reshape(64, 8, 8)


def _decoded_2d(x) -> np.ndarray:
    return decode_array(dct2d_ai_direct(x))


def _decoded_1d(x) -> np.ndarray:
    from .transform import encode_b

    return decode_array(np.array([q.astuple() for q in encode_b(forward_a(x))]))


def calibrate_1d(decoded: Callable | None = None, tol: float = 1e-9) -> tuple[tuple[int, ...], np.ndarray]:
    """Permutation and scales with ``decoded(x)[k] = s[k] * DCT(x)[perm[k]]``."""
    decoded = decoded or _decoded_1d
    impulses = _impulses(1)
    responses = np.array([decoded(e) for e in impulses]).T  # (output, impulse)
    basis = dct_matrix()  # basis[k][n] = DCT of impulse n at frequency k
    found = _match(responses, basis, tol)
    unresolved = [r for r in range(8) if r not in found]
    perm = [found[r][0] for r in range(8) if r in found]
    if unresolved or len(set(perm)) != 8:
        raise CalibrationError(
            f"1-D transform is not a scaled permuted DCT-II; outputs {unresolved} mix frequencies",
            resolved=found,
            unresolved=unresolved,
        )
    return tuple(perm), np.array([found[r][1] for r in range(8)])


def calibrate(decoded: Callable | None = None, tol: float = 1e-9) -> CalibrationMap:
    """Relate the decoded 2-D output to the orthonormal DCT-II via 64 impulse blocks.

    ``decoded`` maps integer blocks ``(N, 8, 8)`` to real ``(N, 8, 8)``; the
    default decodes :func:`dct2d_ai_direct`.
    """
    decoded = decoded or _decoded_2d
    impulses = _impulses(2)
    responses = np.asarray(decoded(impulses)).reshape(64, 64).T  # (output pos, impulse)
    basis = reference_dct2d(impulses).reshape(64, 64).T  # (frequency pos, impulse)
    found = _match(responses, basis, tol)
    resolved = {divmod(r, 8): (divmod(k, 8), s) for r, (k, s) in found.items()}
    unresolved = [divmod(r, 8) for r in range(64) if r not in found]
    if unresolved:
        raise CalibrationError(
            f"{len(unresolved)} of 64 outputs are not a scaled DCT-II coefficient",
            resolved=resolved,
            unresolved=unresolved,
        )
    perm = [-1] * 8
    for (u, v), ((k, l), _) in resolved.items():
        for src, dst in ((u, k), (v, l)):
            if perm[src] not in (-1, dst):
                raise CalibrationError(
                    f"output index {src} maps to frequencies {perm[src]} and {dst}",
                    resolved=resolved,
                    unresolved=[],
                )
            perm[src] = dst
    if sorted(perm) != list(range(8)):
        raise CalibrationError(f"index map {perm} is not a bijection", resolved=resolved, unresolved=[])
    scale = np.zeros((8, 8))
    for (u, v), (_, s) in resolved.items():
        scale[u, v] = s
    return CalibrationMap(tuple(perm), scale)


@dataclass(frozen=True)
class SuccessConfig:
    word_length: int = 8
    tolerances: tuple[float, ...] = TABLE_II_TOLERANCES
    factor: ExpansionFactor = SET_437_181_473
    trials: int = 15625
    seed: int = 1
    precision: int | None = None
    chunk: int = 2048

    def __post_init__(self) -> None:
        if not 2 <= self.word_length <= 16:
            raise ValueError(f"word length must be in [2, 16], got {self.word_length}")
        if not self.tolerances or any(t <= 0 for t in self.tolerances):
            raise ValueError("tolerances must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class SuccessReport:
    set: str
    word_length: int
    frac_bits: int
    trials: int
    seed: int
    rates: dict[float, float]
    excluded: int
    total: int
    scored: int = field(init=False)

    def __post_init__(self) -> None:
        self.scored = self.total - self.excluded

    def to_dict(self) -> dict:
        return {
            "set": self.set,
            "word_length": self.word_length,
            "frac_bits": self.frac_bits,
            "trials": self.trials,
            "seed": self.seed,
            "total_coefficients": self.total,
            "excluded_coefficients": self.excluded,
            "success_percent": {f"{t:g}": r for t, r in self.rates.items()},
        }


def random_blocks(word_length: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform signed ``word_length``-bit samples, shape (count, 8, 8)."""
    half = 1 << (word_length - 1)
    return rng.integers(-half, half, size=(count, 8, 8), dtype=np.int64)


def _exact_outputs(cfg: SuccessConfig):
    # yields (quads, exact) chunk by chunk from one seeded stream
    rng = np.random.default_rng(cfg.seed)
    precision = cfg.precision or default_precision()
    remaining = cfg.trials
    while remaining:
        n = min(cfg.chunk, remaining)
        quads = dct2d_ai_decomposed(random_blocks(cfg.word_length, n, rng))
        yield quads, decode_array(quads, precision)
        remaining -= n


def _count_successes(quads, exact, factor, tolerances) -> tuple[np.ndarray, int, int]:
    approx = frs_reconstruct_array(quads, factor)
    keep = np.abs(exact) >= EXCLUSION_FLOOR
    rel = np.abs(approx[keep] - exact[keep])
    mag = np.abs(exact[keep])
    hits = np.array([np.count_nonzero(rel <= (t / 100.0) * mag) for t in tolerances])
    return hits, int(keep.size - np.count_nonzero(keep)), int(keep.size)


def _report(cfg: SuccessConfig, factor: ExpansionFactor, hits, excluded, total) -> SuccessReport:
    scored = total - excluded
    rates = {t: (100.0 * h / scored if scored else 100.0) for t, h in zip(cfg.tolerances, hits)}
    return SuccessReport(factor.label, cfg.word_length, factor.frac_bits, cfg.trials, cfg.seed, rates, excluded, total)


def success_rate(cfg: SuccessConfig) -> SuccessReport:
    """Percentage of coefficients whose FRS output is within ±e% of the exact value."""
    return success_rates(cfg, [cfg.factor])[0]


def success_rates(cfg: SuccessConfig, factors: Sequence[ExpansionFactor]) -> list[SuccessReport]:
    """Score several expansion sets on the same blocks (``cfg.factor`` is ignored)."""
    hits = [np.zeros(len(cfg.tolerances), dtype=np.int64) for _ in factors]
    excluded = total = 0
    for quads, exact in _exact_outputs(cfg):
        for k, factor in enumerate(factors):
            h, ex, tot = _count_successes(quads, exact, factor, cfg.tolerances)
            hits[k] += h
        excluded += ex
        total += tot
    return [_report(cfg, f, h, excluded, total) for f, h in zip(factors, hits)]


def table_ii(
    word_lengths: Sequence[int] = (4, 8),
    factors: Sequence[ExpansionFactor] = (SET_12_5_13, SET_437_181_473),
    trials: int = 15625,
    seed: int = 1,
    tolerances: Sequence[float] = TABLE_II_TOLERANCES,
) -> list[SuccessReport]:
    reports = []
    for L in word_lengths:
        cfg = SuccessConfig(word_length=L, tolerances=tuple(tolerances), trials=trials, seed=seed)
        reports.extend(success_rates(cfg, factors))
    return reports


def audit() -> dict:
    """Static and measured operation counts of the datapath."""
    from .frs import PUBLISHED_SETS, adder_report
    from .pipeline import COMBINE_ADDS_PER_ROW, MUX_INPUTS, RowParallelPipeline

    counter = AdderCounter()
    forward_a(np.zeros(8, dtype=np.int64), counter)
    forward_adds = counter.count
    counter.reset()
    dct2d_core(np.zeros((8, 8), dtype=np.int64), counter)
    core_adds = counter.count

    pipe = RowParallelPipeline()
    pipe.feed_block(np.arange(64, dtype=np.int64).reshape(8, 8))
    pipe.drain()
    report = pipe.storage_report()
    return {
        "forward_a_additions": forward_adds,
        "dct2d_core_additions": core_adds,
        "crosswire_additions": pipe.crosswire_adders.count,
        "combine_additions_per_row": COMBINE_ADDS_PER_ROW,
        "fast_words": report.fast_words,
        "slow_words": report.slow_words,
        "mux_count": report.mux_count,
        "mux_inputs": MUX_INPUTS,
        "frs_shift_add_adders": {label: adder_report(f) for label, f in PUBLISHED_SETS.items()},
    }
