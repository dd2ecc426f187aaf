"""Integer Arai-style 8-point transform and the exact 2-D AI DCT.

``A`` is the addition-only part of the transform and ``B`` maps its outputs
onto the AI basis.  The 2-D output ``B @ A @ x @ A.T @ B.T`` is computed in two
ways that must agree bit for bit:

* direct: encode the columns of ``Y = A @ x @ A.T`` through ``B`` and multiply
  by ``B.T`` on the right using quad arithmetic;
* decomposed: split ``B = B0 + B1*z1 + B2*z2 + B3*z1z2``, form the 16 sparse
  products ``Bi @ Y @ Bj.T`` by pure selection and weight each by the basis
  product ``basis_i * basis_j``.

Bound analysis
--------------
Rows of ``A`` have absolute sums of at most 8, so ``|Y| <= 64 * max|x|``.  Each
``Bi`` selects at most one entry per row, so every ``Bi @ Y @ Bj.T`` entry is
bounded by ``|Y|`` as well, and an output component ``k`` is at most
``64 * max|x| * sum_ij |T[i, j, k]|`` over the (i, j) pairs that are live at that
position (``T`` the basis product table).  :func:`component_bound` evaluates
this; the worst component gain is 1088 (64 * 17, the rational part), so
16-bit inputs give components below 2**26 and even the ``437``-set
reconstruction at 12 fractional bits stays under 2**48.  Intermediates of the direct path are
bounded by ``INTERMEDIATE_GAIN * max|x|``; inputs beyond that raise
:class:`OverflowError` up front instead of wrapping silently.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .ring import (
    INT64_MAX,
    ONE,
    PRODUCT_TENSOR,
    Z1,
    Z1Z2,
    Z2,
    ZERO,
    AIQuad,
    quad_mul_array,
)

A = np.array(
    [
        [1, 1, 1, 1, 1, 1, 1, 1],
        [1, -1, -1, 1, 1, -1, -1, 1],
        [1, 1, -1, -1, -1, -1, 1, 1],
        [1, 0, 0, -1, -1, 0, 0, 1],
        [1, 1, 1, 1, -1, -1, -1, -1],
        [0, -1, -1, 0, 0, 1, 1, 0],
        [-1, -1, 1, 1, -1, -1, 1, 1],
        [1, 0, 0, 0, 0, 0, 0, -1],
    ],
    dtype=np.int64,
)

_ = ZERO
B_SYMBOLIC: tuple[tuple[AIQuad, ...], ...] = (
    (ONE, _, _, _, _, _, _, _),
    (_, ONE, _, _, _, _, _, _),
    (_, _, ONE, Z1Z2, _, _, _, _),
    (_, _, ONE, -Z1Z2, _, _, _, _),
    (_, _, _, _, -Z2, -Z1Z2, -Z1, ONE),
    (_, _, _, _, Z2, -Z1Z2, Z1, ONE),
    (_, _, _, _, -Z1, Z1Z2, Z2, ONE),
    (_, _, _, _, Z1, Z1Z2, -Z2, ONE),
)
del _

B0 = np.array(
    [
        [1, 0, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 0, 1],
    ],
    dtype=np.int64,
)
B1 = np.array(
    [
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, -1, 0],
        [0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, -1, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0],
    ],
    dtype=np.int64,
)
B2 = np.array(
    [
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, -1, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, -1, 0],
    ],
    dtype=np.int64,
)
B3 = np.array(
    [
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, -1, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, -1, 0, 0],
        [0, 0, 0, 0, 0, -1, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, 0],
    ],
    dtype=np.int64,
)
B_PARTS = np.stack([B0, B1, B2, B3])

# B as an (8, 8, 4) component array, taken from the symbolic rows.
B_QUAD = np.array([[q.astuple() for q in row] for row in B_SYMBOLIC], dtype=np.int64)

for _m in (A, B0, B1, B2, B3, B_PARTS, B_QUAD):
    _m.setflags(write=False)
del _m


def _selection_tables(parts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # column index and sign of the single nonzero per row (sign 0 = empty row)
    sel = np.zeros(parts.shape[:2], dtype=np.intp)
    sgn = np.zeros(parts.shape[:2], dtype=np.int64)
    for i, part in enumerate(parts):
        for r, row in enumerate(part):
            nz = np.flatnonzero(row)
            if len(nz) > 1:
                raise ValueError(f"B{i} row {r} has more than one nonzero entry")
            if len(nz) == 1:
                sel[i, r] = nz[0]
                sgn[i, r] = row[nz[0]]
    return sel, sgn


B_SELECT, B_SIGN = _selection_tables(B_PARTS)
B_SELECT.setflags(write=False)
B_SIGN.setflags(write=False)


def b_block(i: int, q: int) -> np.ndarray:
    """4x4 diagonal block ``B_{i,q}`` (q=0 top-left, q=1 bottom-right)."""
    s = slice(4 * q, 4 * q + 4)
    return B_PARTS[i][s, s]


class AdderCounter:
    """Counts two-input additions and subtractions; negation is free."""

    def __init__(self) -> None:
        self.count = 0

    def add(self, x, y):
        self.count += 1
        return x + y

    def sub(self, x, y):
        self.count += 1
        return x - y

    def reset(self) -> None:
        self.count = 0


def _max_abs(x) -> int:
    arr = np.asarray(x)
    if arr.size == 0:
        return 0
    return max(abs(int(arr.max())), abs(int(arr.min())))


def component_bound(max_abs_input: int) -> int:
    """Largest possible |component| of the 2-D AI output for |x| <= max_abs_input."""
    live = (B_SIGN != 0).astype(np.int64)
    worst = 0
    for k in range(4):
        gain = np.abs(PRODUCT_TENSOR[:, :, k])
        # per (u, v): sum over live (i, j) of |T[i, j, k]|
        per_pos = np.einsum("iu,jv,ij->uv", live, live, gain)
        worst = max(worst, int(per_pos.max()))
    return 64 * worst * max_abs_input


# partial sums in the direct path: 8 columns x (1+4+4+8) table weight x |Y|
INTERMEDIATE_GAIN = 64 * 8 * 17


def check_input_range(x) -> int:
    """Raise OverflowError if ``x`` could overflow any int64 stage; return max|x|."""
    m = _max_abs(x)
    if m * INTERMEDIATE_GAIN > INT64_MAX:
        raise OverflowError(f"input magnitude {m} can overflow 64-bit AI components")
    return m


def forward_a(x: Sequence[int] | np.ndarray, counter: AdderCounter | None = None) -> np.ndarray:
    """``A @ x`` along the leading axis in 20 additions.

    ``x`` has 8 entries on axis 0; trailing axes are carried along so one call
    can transform many vectors.  The flow graph is eight sum/difference
    butterflies, seven additions for the even half and five for the odd half.
    """
    if counter is None:
        counter = AdderCounter()
    x = np.asarray(x, dtype=np.int64)
    if x.shape[:1] != (8,):
        raise ValueError(f"forward_a expects 8 entries on axis 0, got shape {x.shape}")
    if _max_abs(x) * 8 > INT64_MAX:
        raise OverflowError("forward_a input can overflow int64")
    add, sub = counter.add, counter.sub

    s07, d07 = add(x[0], x[7]), sub(x[0], x[7])
    s16, d16 = add(x[1], x[6]), sub(x[1], x[6])
    s25, d25 = add(x[2], x[5]), sub(x[2], x[5])
    s34, d34 = add(x[3], x[4]), sub(x[3], x[4])

    outer = add(s07, s34)
    inner = add(s16, s25)
    y0 = add(outer, inner)
    y1 = sub(outer, inner)
    y3 = sub(s07, s34)
    y2 = add(y3, sub(s16, s25))

    head = add(d07, d16)
    tail = add(d25, d34)
    y4 = add(head, tail)
    y5 = -add(d16, d25)
    y6 = sub(tail, head)
    y7 = d07

    return np.stack([y0, y1, y2, y3, y4, y5, y6, y7])


def _encode_b_array(y: np.ndarray) -> np.ndarray:
    # y: (8, ...) -> (8, ..., 4)
    return np.moveaxis(np.tensordot(B_PARTS, y, axes=([2], [0])), 0, -1)


def encode_b(y: Sequence[int] | np.ndarray) -> list[AIQuad]:
    """Apply B to an 8-vector, folding the z-coefficients into quads."""
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (8,):
        raise ValueError(f"encode_b expects an 8-vector, got shape {y.shape}")
    check_input_range(y)
    return [AIQuad.from_seq(row) for row in _encode_b_array(y)]


def dct1d_ai(x: Sequence[int] | np.ndarray, counter: AdderCounter | None = None) -> list[AIQuad]:
    """Exact 1-D AI transform ``B @ A @ x``."""
    return encode_b(forward_a(x, counter))


def _as_blocks(x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim < 2 or x.shape[-2:] != (8, 8):
        raise ValueError(f"expected (..., 8, 8) blocks, got shape {x.shape}")
    if not np.issubdtype(x.dtype, np.integer):
        raise TypeError(f"blocks must be integer valued, got dtype {x.dtype}")
    return x.astype(np.int64)


def dct2d_core(x, counter: AdderCounter | None = None) -> np.ndarray:
    """``A @ x @ A.T`` for one block or a stack ``(..., 8, 8)``.

    Eight forward_a calls over the columns then eight over the rows; each call
    handles every block of a stack at once.
    """
    x = _as_blocks(x)
    check_input_range(x)
    cols = np.empty_like(x)
    for c in range(8):
        cols[..., :, c] = np.moveaxis(forward_a(np.moveaxis(x[..., :, c], -1, 0), counter), 0, -1)
    out = np.empty_like(x)
    for r in range(8):
        out[..., r, :] = np.moveaxis(forward_a(np.moveaxis(cols[..., r, :], -1, 0), counter), 0, -1)
    return out


def dct2d_ai_direct(x) -> np.ndarray:
    """Exact 2-D AI DCT as an int64 array ``(..., 8, 8, 4)``."""
    y = dct2d_core(x)
    # left[..., r, c, :] = quad (B @ Y)[r, c]
    left = np.moveaxis(_encode_b_array(np.moveaxis(y, -2, 0)), 0, -3)
    out = np.zeros(y.shape + (4,), dtype=np.int64)
    for c in range(8):
        out += quad_mul_array(left[..., :, c, None, :], B_QUAD[None, :, c, :])
    return out


def sparse_product(i: int, j: int, y: np.ndarray) -> np.ndarray:
    """``Bi @ Y @ Bj.T`` by selecting and sign-flipping entries of Y (no additions)."""
    y = np.asarray(y)
    rows, cols = B_SELECT[i], B_SELECT[j]
    signs = B_SIGN[i][:, None] * B_SIGN[j][None, :]
    return y[..., rows[:, None], cols[None, :]] * signs


def dct2d_ai_decomposed(x) -> np.ndarray:
    """Exact 2-D AI DCT via the 16 weighted sparse products."""
    y = dct2d_core(x)
    out = np.zeros(y.shape + (4,), dtype=np.int64)
    for i in range(4):
        for j in range(4):
            out += sparse_product(i, j, y)[..., None] * PRODUCT_TENSOR[i, j]
    return out


def half_column_product(i: int, j: int, y: np.ndarray) -> np.ndarray:
    """``Bi @ Y @ Bj.T`` assembled from the four 4x4 block products.

    Output rows 0-3 use only rows 0-3 of Y and rows 4-7 only rows 4-7.
    """
    if i not in range(4) or j not in range(4):
        raise ValueError(f"i and j must be in 0..3, got {i}, {j}")
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (8, 8):
        raise ValueError(f"expected an 8x8 block, got shape {y.shape}")
    bi0, bi1 = b_block(i, 0), b_block(i, 1)
    bj0, bj1 = b_block(j, 0), b_block(j, 1)
    y0, y1 = y[:4, :4], y[:4, 4:]
    y2, y3 = y[4:, :4], y[4:, 4:]
    return np.block(
        [
            [bi0 @ y0 @ bj0.T, bi0 @ y1 @ bj1.T],
            [bi1 @ y2 @ bj0.T, bi1 @ y3 @ bj1.T],
        ]
    )


def to_quads(block: np.ndarray) -> list[list[AIQuad]]:
    """Convert an ``(8, 8, 4)`` component array into nested AIQuad rows."""
    block = np.asarray(block)
    return [[AIQuad.from_seq(q) for q in row] for row in block]
