"""Block input (CSV, binary PGM) and report/trace output."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class InputFormatError(ValueError):
    pass


def read_block_csv(path: str | Path) -> np.ndarray:
    """One 8x8 block of integers, 8 rows of 8 comma-separated values."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row if c.strip()]
            if not cells:
                continue
            try:
                rows.append([int(c) for c in cells])
            except ValueError:
                raise InputFormatError(f"{path}:{lineno}: non-integer value in {row!r}") from None
    if len(rows) != 8 or any(len(r) != 8 for r in rows):
        shape = f"{len(rows)} rows of lengths {sorted({len(r) for r in rows})}"
        raise InputFormatError(f"{path}: expected 8 rows of 8 integers, got {shape}")
    return np.array(rows, dtype=np.int64)[None]


def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise InputFormatError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos + 1  # single whitespace byte ends the header


def read_pgm(path: str | Path) -> np.ndarray:
    """Binary 8-bit PGM (P5) tiled into row-major 8x8 blocks, shape (N, 8, 8)."""
    data = Path(path).read_bytes()
    (magic, w, h, maxval), offset = _pgm_tokens(data, 4)
    if magic != b"P5":
        raise InputFormatError(f"{path}: not a binary PGM (magic {magic!r})")
    try:
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError:
        raise InputFormatError(f"{path}: malformed PGM header") from None
    if not 0 < maxval < 256:
        raise InputFormatError(f"{path}: only 8-bit PGM is supported (maxval {maxval})")
    if width % 8 or height % 8 or not width or not height:
        raise InputFormatError(f"{path}: dimensions {width}x{height} are not multiples of 8")
    if len(data) - offset < width * height:
        raise InputFormatError(f"{path}: pixel data shorter than {width}x{height}")
    pixels = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=offset)
    img = pixels.reshape(height, width).astype(np.int64)
    blocks = img.reshape(height // 8, 8, width // 8, 8).swapaxes(1, 2)
    return blocks.reshape(-1, 8, 8)


def read_blocks(path: str | Path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise InputFormatError(f"{path}: no such file")
    if path.suffix.lower() in (".pgm", ".pnm"):
        return read_pgm(path)
    return read_block_csv(path)


def write_pgm(path: str | Path, image: np.ndarray) -> None:
    image = np.asarray(image, dtype=np.uint8)
    h, w = image.shape
    Path(path).write_bytes(f"P5\n{w} {h}\n255\n".encode() + image.tobytes())


def write_json(path: str | Path | None, payload) -> str:
    text = json.dumps(payload, indent=2, sort_keys=False)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text


def write_success_table(path: str | Path, reports: Sequence) -> None:
    """CSV laid out like the published table: one row per (set, L), one column per tolerance."""
    tolerances = list(reports[0].rates)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["set", "L"] + [f"{t:g}%" for t in tolerances])
        for rep in reports:
            writer.writerow([rep.set, rep.word_length] + [f"{rep.rates[t]:.4f}" for t in tolerances])


def write_trace(path: str | Path, records: Iterable) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cycle", "phase", "load", "occupied_words", "emitted_block", "emitted_row"])
        for r in records:
            writer.writerow([r.cycle, r.phase, int(r.load), r.occupied, r.emitted_block, r.emitted_row])
