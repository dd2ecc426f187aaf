"""Cycle-level model of the single-channel row-parallel 2-D architecture.

One call to :meth:`RowParallelPipeline.tick` is one rising edge of ``F_clk``.
Every register computes its next value from the current register contents and
all registers update together, so the model behaves like synchronous logic.

Stages, in data order::

    input column --A--> S1 --> transpose memory (2 x 64 words, ping-pong)
        --row--A--> S2 --> shift section P (3 rows, 24 words)
        --(k mod 4 == 0)--> parallel-load bank Q (4 rows, 32 words)
        --32 muxes + fixed cross-wiring--> 16 terms Bi(.)Bj^T
        --basis weighting--> 8 AI quads --> [optional FRS] --> output row

With ``prestage=False`` the first three stages are bypassed and each input
vector is taken as a row of ``Y = A x A^T``.  In the default mode input vectors
are the *columns* of the raw block, because the column transform runs first.

The shift section together with the incoming row forms block P; on the tick
that brings the 4th row of a half-block (phase ``k % 4 == 0``) P is copied into
Q, which then feeds one output row per tick for the next four ticks.  Rows 0-3
of a block therefore only ever see rows 0-3 of ``Y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .frs import ExpansionFactor, frs_scaled_array
from .ring import PRODUCT_TENSOR
from .transform import B_SELECT, B_SIGN, AdderCounter, check_input_range, forward_a

FAST_WORDS = 24
SLOW_WORDS = 32
MUX_COUNT = 32
MUX_INPUTS = 8


class FramingError(ValueError):
    """Input stream does not respect block framing."""


class StorageReport(NamedTuple):
    fast_words: int
    slow_words: int
    mux_count: int


@dataclass(frozen=True)
class PipelineConfig:
    prestage: bool = True
    frs: ExpansionFactor | None = None
    block_gap: int = 0

    def __post_init__(self) -> None:
        if self.block_gap < 0:
            raise ValueError("block_gap must be >= 0")


@dataclass
class OutputRow:
    cycle: int
    block: int
    row: int
    values: np.ndarray


@dataclass
class TraceRecord:
    cycle: int
    phase: int
    load: bool
    occupied: int
    emitted_block: int
    emitted_row: int


def _mux_selects() -> np.ndarray:
    # select[i, u]: input index of mux bank i when emitting row u, -1 = disabled.
    # Inputs 0-3 are the Q rows of the current half, 4-7 their negations.
    select = np.full((4, 8), -1, dtype=np.int64)
    for i in range(4):
        for u in range(8):
            sign = B_SIGN[i, u]
            if sign == 0:
                continue
            local = int(B_SELECT[i, u]) - 4 * (u // 4)
            if not 0 <= local < 4:
                raise AssertionError("B parts are not block diagonal")
            select[i, u] = local if sign > 0 else local + 4
    return select


MUX_SELECT = _mux_selects()
MUX_SELECT.setflags(write=False)


def _combine_adds_per_row() -> int:
    # two-input adds to fold the live weighted terms of one row into quads
    total = 0
    for u in range(8):
        for v in range(8):
            for k in range(4):
                n = sum(
                    1 for i in range(4) for j in range(4) if B_SIGN[i, u] and B_SIGN[j, v] and PRODUCT_TENSOR[i, j, k]
                )
                total += max(n - 1, 0)
    return total // 8


COMBINE_ADDS_PER_ROW = _combine_adds_per_row()


def cross_wire(q_bank: np.ndarray, u: int, counter: AdderCounter | None = None) -> np.ndarray:
    """Terms ``(Bi Y Bj^T)[u, :]`` for all i, j from the loaded bank, shape (4, 4, 8).

    Pure selection and negation; ``counter`` is accepted so audits can confirm
    nothing is added here.
    """
    inputs = np.concatenate([q_bank, -q_bank])  # the 8 mux inputs per column
    muxed = np.zeros((4, 8), dtype=np.int64)
    for i in range(4):
        sel = MUX_SELECT[i, u]
        if sel >= 0:
            muxed[i] = inputs[sel]
    # fixed wiring: column v of term (i, j) is mux (i, sel_j(v)) with sign_j(v)
    return muxed[:, B_SELECT] * B_SIGN[None, :, :]


class RowParallelPipeline:
    def __init__(self, config: PipelineConfig | None = None, record_trace: bool = False) -> None:
        self.config = config or PipelineConfig()
        self.record_trace = record_trace
        self.crosswire_adders = AdderCounter()
        self.combine_adders = AdderCounter()
        self.reset()

    def reset(self) -> None:
        """Empty every register and restart the phase counter."""
        self.cycle = 0
        self.phase = 0
        self.trace: list[TraceRecord] = []
        self._in_count = 0
        self._in_block = 0
        self._gap_left = 0
        self._s1 = None
        self._banks = np.zeros((2, 8, 8), dtype=np.int64)
        self._wbank = 0
        self._wfill = 0
        self._read = None  # (bank, next row, block)
        self._s2 = None
        self._shift: list[np.ndarray] = []
        self._q = np.zeros((4, 8), dtype=np.int64)
        self._q_live = False
        self._q_step = 0
        self._q_half = 0
        self._q_block = -1
        self._y_count = 0
        self._y_block = 0
        self.crosswire_adders.reset()
        self.combine_adders.reset()

    @property
    def latency(self) -> int:
        """Ticks from a block's first input to its first output row."""
        return 14 if self.config.prestage else 4

    def storage_report(self) -> StorageReport:
        return StorageReport(FAST_WORDS, SLOW_WORDS, MUX_COUNT)

    @property
    def occupied_words(self) -> int:
        return 8 * len(self._shift) + (SLOW_WORDS if self._q_live else 0)

    @property
    def busy(self) -> bool:
        return bool(
            self._s1 is not None
            or self._wfill
            or self._read is not None
            or self._s2 is not None
            or self._shift
            or self._q_live
        )

    def _check_framing(self, vec) -> np.ndarray | None:
        if vec is None:
            if self._in_count:
                raise FramingError(f"idle tick after {self._in_count} of 8 vectors of a block")
            if self._gap_left:
                self._gap_left -= 1
            return None
        if self._gap_left:
            raise FramingError(f"vector fed during required idle gap ({self._gap_left} ticks left)")
        vec = np.asarray(vec)
        if vec.shape != (8,) or not np.issubdtype(vec.dtype, np.integer):
            raise ValueError(f"input must be 8 integers, got shape {vec.shape} dtype {vec.dtype}")
        check_input_range(vec)
        return vec.astype(np.int64)

    def tick(self, vec: Iterable[int] | np.ndarray | None = None) -> OutputRow | None:
        """Advance one clock; ``vec=None`` is an idle cycle."""
        vec = self._check_framing(vec)
        block_in = self._in_block
        col_in = self._in_count
        if vec is not None:
            self._in_count += 1
            if self._in_count == 8:
                self._in_count = 0
                self._in_block += 1
                self._gap_left = self.config.block_gap

        # Q bank -> output row (reads the current Q before any load this edge)
        emitted = None
        if self._q_live:
            u = 4 * self._q_half + self._q_step
            terms = cross_wire(self._q, u, self.crosswire_adders)
            quads = np.einsum("ijv,ijk->vk", terms, PRODUCT_TENSOR)
            self.combine_adders.count += COMBINE_ADDS_PER_ROW
            values = quads if self.config.frs is None else frs_scaled_array(quads, self.config.frs)
            emitted = OutputRow(self.cycle, self._q_block, u, values)
            self._q_step += 1
            if self._q_step == 4:
                self._q_live = False

        # row entering the buffer this edge
        if self.config.prestage:
            y_in = None if self._s2 is None else self._s2[2]
        else:
            y_in = vec

        load = False
        if y_in is not None:
            self.phase += 1
            row_index = self._y_count
            if self.phase % 4 == 0:
                self._q = np.stack(self._shift + [y_in])
                self._q_live = True
                self._q_step = 0
                self._q_half = row_index // 4
                self._q_block = self._y_block
                self._shift = []
                load = True
            else:
                self._shift.append(y_in)
            self._y_count += 1
            if self._y_count == 8:
                self._y_count = 0
                self._y_block += 1

        if self.config.prestage:
            # S2 <- row transform of the next transpose-memory row
            s2_next = None
            if self._read is not None:
                bank, r, blk = self._read
                s2_next = (blk, r, forward_a(self._banks[bank, r, :]))
                self._read = None if r == 7 else (bank, r + 1, blk)
            self._s2 = s2_next

            # transpose memory write of the S1 column
            if self._s1 is not None:
                blk, c, col = self._s1
                self._banks[self._wbank, :, c] = col
                self._wfill += 1
                if self._wfill == 8:
                    if self._read is not None:
                        raise AssertionError("transpose memory read/write collision")
                    self._read = (self._wbank, 0, blk)
                    self._wbank ^= 1
                    self._wfill = 0

            # S1 <- column transform of the input
            self._s1 = None if vec is None else (block_in, col_in, forward_a(vec))

        if self.record_trace:
            self.trace.append(
                TraceRecord(
                    cycle=self.cycle,
                    phase=self.phase,
                    load=load,
                    occupied=self.occupied_words,
                    emitted_block=-1 if emitted is None else emitted.block,
                    emitted_row=-1 if emitted is None else emitted.row,
                )
            )
        self.cycle += 1
        return emitted

    def drain(self) -> list[OutputRow]:
        """Idle until every in-flight row has been emitted."""
        if self._in_count:
            raise FramingError("cannot drain in the middle of a block")
        out = []
        while self.busy:
            row = self.tick(None)
            if row is not None:
                out.append(row)
        return out

    def feed_block(self, block: np.ndarray) -> list[OutputRow]:
        """Feed one 8x8 block back-to-back (columns, or rows of Y without prestage)."""
        block = np.asarray(block)
        if block.shape != (8, 8):
            raise ValueError(f"expected an 8x8 block, got shape {block.shape}")
        vectors = block.T if self.config.prestage else block
        out = []
        for vec in vectors:
            row = self.tick(vec)
            if row is not None:
                out.append(row)
        for _ in range(self.config.block_gap):
            row = self.tick(None)
            if row is not None:
                out.append(row)
        return out


@dataclass
class StreamResult:
    outputs: np.ndarray
    rows: list[OutputRow] = field(repr=False)
    cycles: int = 0


def stream_blocks(blocks, config: PipelineConfig | None = None, record_trace: bool = False):
    """Stream a stack of blocks through a fresh pipeline and reassemble the output.

    Returns ``(result, pipeline)``; ``result.outputs`` has shape ``(N, 8, 8, 4)``
    (or ``(N, 8, 8)`` with FRS attached).
    """
    blocks = np.asarray(blocks)
    if blocks.ndim == 2:
        blocks = blocks[None]
    pipe = RowParallelPipeline(config, record_trace=record_trace)
    rows: list[OutputRow] = []
    for block in blocks:
        rows.extend(pipe.feed_block(block))
    rows.extend(pipe.drain())
    shape = (len(blocks), 8, 8) + (() if pipe.config.frs is not None else (4,))
    outputs = np.zeros(shape, dtype=np.int64)
    seen = np.zeros((len(blocks), 8), dtype=bool)
    for row in rows:
        if seen[row.block, row.row]:
            raise AssertionError(f"row {row.row} of block {row.block} emitted twice")
        seen[row.block, row.row] = True
        outputs[row.block, row.row] = row.values
    if not seen.all():
        raise AssertionError("pipeline dropped output rows")
    return StreamResult(outputs, rows, pipe.cycle), pipe
