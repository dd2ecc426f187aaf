"""Command line entry point: ``aidct <subcommand>``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness, io
from .frs import DEFAULT_FRAC_BITS, PUBLISHED_SETS, frs_reconstruct_array, frs_scaled_array, parse_set
from .pipeline import PipelineConfig, stream_blocks
from .ring import decode_array
from .transform import dct2d_ai_decomposed, dct2d_ai_direct

SET_CHOICES = " | ".join(PUBLISHED_SETS)


def _factor(args):
    return parse_set(args.set, args.frac_bits)


def _add_frs_flags(p, default_set="437,181,473"):
    p.add_argument("--set", default=default_set, help=f"expansion integer set ({SET_CHOICES})")
    p.add_argument("--frac-bits", type=int, default=DEFAULT_FRAC_BITS, help="fractional bits of fix(alpha*a)")


def cmd_transform(args) -> int:
    blocks = io.read_blocks(args.input)
    quads = dct2d_ai_direct(blocks) if args.path == "direct" else dct2d_ai_decomposed(blocks)
    if args.mode == "exact":
        payload = {"mode": "exact", "components": ["1", "z1", "z2", "z1z2"], "blocks": quads.tolist()}
    elif args.mode == "decoded":
        payload = {
            "mode": "decoded",
            "precision": args.precision,
            "blocks": decode_array(quads, args.precision).tolist(),
        }
    else:
        f = _factor(args)
        payload = {
            "mode": "frs",
            "set": f.label,
            "frac_bits": f.frac_bits,
            "scaled": frs_scaled_array(quads, f).tolist(),
            "blocks": frs_reconstruct_array(quads, f).tolist(),
        }
    print(io.write_json(args.output, payload))
    return 0


def cmd_success_rate(args) -> int:
    sets = args.set or ["12,5,13", "437,181,473"]
    factors = [parse_set(s, args.frac_bits) for s in sets]
    tolerances = tuple(args.tolerances) if args.tolerances else harness.TABLE_II_TOLERANCES
    reports = []
    for L in args.L:
        cfg = harness.SuccessConfig(
            word_length=L, tolerances=tolerances, trials=args.trials, seed=args.seed, precision=args.precision
        )
        reports.extend(harness.success_rates(cfg, factors))
    dicts = [r.to_dict() for r in reports]
    payload = dicts[0] if len(dicts) == 1 else dicts
    print(io.write_json(args.json, payload))
    if args.csv:
        io.write_success_table(args.csv, reports)
    return 0


def cmd_simulate(args) -> int:
    rng = np.random.default_rng(args.seed)
    blocks = harness.random_blocks(args.L, args.blocks, rng)
    factor = None if args.no_frs else _factor(args)
    config = PipelineConfig(prestage=True, frs=factor, block_gap=args.gap)
    result, pipe = stream_blocks(blocks, config, record_trace=args.trace is not None)
    batch = dct2d_ai_decomposed(blocks)
    if factor is not None:
        batch = frs_scaled_array(batch, factor)
    emit_cycles = [r.cycle for r in result.rows]
    first = emit_cycles[0]
    payload = {
        "blocks": args.blocks,
        "cycles": result.cycles,
        "latency": pipe.latency,
        "first_output_cycle": first,
        "rows_emitted": len(result.rows),
        "cycles_per_block": (emit_cycles[-1] - first + 1) / args.blocks,
        "matches_batch": bool(np.array_equal(result.outputs, batch)),
        "storage": pipe.storage_report()._asdict(),
        "crosswire_additions": pipe.crosswire_adders.count,
        "frs": None if factor is None else factor.label,
    }
    if args.trace:
        io.write_trace(args.trace, pipe.trace)
    print(io.write_json(None, payload))
    return 0 if payload["matches_batch"] else 1


def cmd_calibrate(args) -> int:
    try:
        cal = harness.calibrate()
    except harness.CalibrationError as exc:
        resolved = {f"{u},{v}": {"frequency": list(kl), "scale": s} for (u, v), (kl, s) in exc.resolved.items()}
        print(io.write_json(None, {"consistent": False, "error": str(exc), "resolved": resolved}))
        print(f"calibrate: {exc}", file=sys.stderr)
        return 1
    print(io.write_json(None, {"consistent": True, "perm": list(cal.perm), "scale": cal.scale.tolist()}))
    return 0


def cmd_audit(args) -> int:
    print(io.write_json(None, harness.audit()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aidct", description="Exact algebraic-integer 8x8 DCT tools")
    parser.add_argument("--precision", type=int, default=None, help="decode precision in digits (default 30)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="2-D AI DCT of a CSV block or PGM image")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=("exact", "decoded", "frs"), default="exact")
    p.add_argument("--path", choices=("direct", "decomposed"), default="direct")
    p.add_argument("--output", help="also write the JSON here")
    _add_frs_flags(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("success-rate", help="FRS success rates over random blocks")
    p.add_argument("--L", type=int, nargs="+", default=[8], help="input word length(s) in bits")
    p.add_argument("--set", action="append", help=f"expansion set, repeatable ({SET_CHOICES})")
    p.add_argument("--frac-bits", type=int, default=DEFAULT_FRAC_BITS)
    p.add_argument("--trials", type=int, default=15625)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--tolerances", type=float, nargs="+", help="percent tolerances")
    p.add_argument("--json", help="write the JSON report here")
    p.add_argument("--csv", help="write a set/L x tolerance table here")
    p.set_defaults(func=cmd_success_rate)

    p = sub.add_parser("simulate", help="stream random blocks through the pipeline model")
    p.add_argument("--blocks", type=int, default=16)
    p.add_argument("--L", type=int, default=8)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--gap", type=int, default=0, help="idle cycles between blocks")
    p.add_argument("--no-frs", action="store_true", help="emit AI quads instead of FRS output")
    p.add_argument("--trace", help="per-cycle CSV trace")
    _add_frs_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="relate the transform output to the orthonormal DCT-II")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("audit", help="adder, register and mux counts")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision is not None and args.precision < 15:
        parser.error("--precision must be >= 15")
    for name in ("blocks", "trials"):
        if getattr(args, name, 1) < 1:
            parser.error(f"--{name} must be >= 1")
    try:
        return args.func(args)
    except (ValueError, OverflowError) as exc:
        print(f"aidct {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
