"""Command-line front door: analysis, enumeration, construction, simulation.

Outputs are machine-readable (JSON/CSV) unless --pretty asks for tables.
Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import catastrophic as cat
from .codec import CRC_POLYS, CrcConfig, PolarCodeSpec
from .construction import (
    RcFamily,
    greedy_rc_family,
    info_set,
    reciprocal_rc_family,
    reliability_order,
)
from .errors import PolarPunctError
from .patterns import (
    ChannelModel,
    PuncturingPattern,
    dcm_frozen_set,
    is_reciprocal,
    ucm_zero_set,
    z_spectrum,
)
from .sim import default_thread_count, rows_to_csv, sweep, write_gnuplot_data


class UsageError(ValueError):
    """Bad flag values; reported with exit code 2."""


def _parse_pattern(text: str, n: int) -> PuncturingPattern:
    """Accept a mask bitstring of length N or a comma-separated zeros list."""
    size = 1 << n
    if set(text) <= {"0", "1"} and len(text) == size:
        return PuncturingPattern.from_string(text)
    try:
        zeros = [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise UsageError(f"pattern {text!r} is neither a length-{size} bitstring nor a zeros list")
    try:
        return PuncturingPattern.from_zeros(n, zeros)
    except ValueError as exc:
        raise UsageError(str(exc))


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}")


def _parse_snr_grid(text: str) -> list[float]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"expected SNR as <db> or <start:stop:step>, got {text!r}")
    if len(parts) != 3:
        raise UsageError(f"expected SNR as <db> or <start:stop:step>, got {text!r}")
    if step <= 0 or stop < start:
        raise UsageError("SNR grid needs step > 0 and stop >= start")
    count = int((stop - start) / step + 1e-9) + 1
    return [start + i * step for i in range(count)]


def _emit(payload: dict, args) -> None:
    text = json.dumps(payload, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)


def cmd_analyze(args) -> int:
    pattern = _parse_pattern(args.pattern, args.n)
    model = ChannelModel(args.model)
    forced = (
        ucm_zero_set(pattern) if model is ChannelModel.UCM else dcm_frozen_set(pattern)
    )
    payload = {
        "n": args.n,
        "pattern": pattern.to_string(),
        "zeros": list(pattern.zero_set),
        "transmitted": pattern.weight,
        "model": model.value,
        "forced_frozen": list(forced),
        "reciprocal": is_reciprocal(pattern, model),
    }
    if args.verbose:
        payload["z_values"] = [int(z) for z in z_spectrum(pattern.mask)]
    if args.info_set:
        info = _parse_int_list(args.info_set)
        if any(i < 0 or i >= pattern.size for i in info):
            raise UsageError(f"info set entries must lie in [0, {pattern.size})")
        payload["info_set"] = sorted(info)
        payload["catastrophic"] = cat.is_catastrophic(
            pattern, info, require_all=args.all_dead
        )
    if args.pretty:
        print(f"pattern      {payload['pattern']}  (n={args.n}, Np={payload['transmitted']})")
        print(f"zeros B      {payload['zeros']}")
        print(f"model        {payload['model']}")
        print(f"forced frozen {payload['forced_frozen']}")
        print(f"reciprocal   {payload['reciprocal']}")
        if "z_values" in payload:
            print(f"z values     {''.join(str(z) for z in payload['z_values'])}")
        if "catastrophic" in payload:
            print(f"catastrophic {payload['catastrophic']} for A={payload['info_set']}")
        return 0
    _emit(payload, args)
    return 0


def cmd_catastrophic(args) -> int:
    size = 1 << args.n
    if not 0 <= args.channel < size:
        raise UsageError(f"channel {args.channel} out of range for n={args.n}")
    payload = {
        "channel": args.channel,
        "n": args.n,
        "min_zeros": cat.min_catastrophic_zeros(args.channel),
    }
    if args.weights:
        dist = cat.weight_distribution(args.channel, args.n)
        payload["coeffs"] = dist.to_pairs()
        payload["count"] = dist.total()
    if args.enumerate:
        cap = args.n if args.force else cat.DEFAULT_ENUMERATION_CAP
        patterns = cat.enumerate_catastrophic(args.channel, args.n, cap=cap)
        payload["patterns"] = patterns.pattern_strings()
    if args.pretty:
        print(f"channel {args.channel} of N={size}: min zeros {payload['min_zeros']}")
        if "coeffs" in payload:
            terms = " + ".join(f"{c}z^{s}" for s, c in payload["coeffs"])
            print(f"weight distribution: {terms}  ({payload['count']} patterns)")
        if "patterns" in payload:
            for text in payload["patterns"]:
                print(text)
        return 0
    _emit(payload, args)
    return 0


def cmd_construct(args) -> int:
    size = 1 << args.n
    lengths = _parse_int_list(args.np)
    if not lengths:
        raise UsageError("--np needs at least one transmit length")
    if any(v < 1 or v > size for v in lengths):
        raise UsageError(f"transmit lengths must lie in [1, {size}]")
    if args.k < 1 or args.k > size:
        raise UsageError(f"--k must lie in [1, {size}]")
    order = reliability_order(args.n, design_snr_db=args.design_snr)
    info = info_set(order, args.k)
    model = ChannelModel(args.model)
    if args.method == "greedy":
        family = greedy_rc_family(
            info, args.n, sorted(lengths), seed=args.seed, model=model
        )
    else:
        zero_counts = [size - v for v in lengths]
        family = reciprocal_rc_family(
            info, args.n, zero_counts, model=model, seed=args.seed
        )
    family.save(args.output)
    for row in family.report():
        print(
            f"pattern {row['pattern_id']}: np={row['np']} zeros={row['zeros']} "
            f"non-catastrophic={row['non_catastrophic']} reciprocal={row['reciprocal']}"
        )
    print(f"family written to {args.output}")
    return 0


def cmd_simulate(args) -> int:
    family = RcFamily.load(args.family)
    grid = _parse_snr_grid(args.snr)
    if args.crc_bits and args.crc_bits not in CRC_POLYS:
        raise UsageError(
            f"--crc-bits must be one of {sorted(CRC_POLYS)} (or 0 for none)"
        )
    crc = CrcConfig.of_width(args.crc_bits) if args.crc_bits else None
    for pid, pattern in enumerate(family.patterns):
        spec = PolarCodeSpec(
            family.n, family.info_set, model=family.model, pattern=pattern,
            crc=crc, strict=False,
        )
        if spec.dead_info_channels:
            print(
                f"warning: pattern {pid} is catastrophic for info channels "
                f"{list(spec.dead_info_channels)}; expect FER 1.0",
                file=sys.stderr,
            )
    rows = sweep(
        family,
        grid,
        stop=(args.max_trials, args.target_errors),
        seed=args.seed,
        list_size=args.list,
        crc=crc,
        threads=args.threads,
        exact=args.exact_llr,
    )
    text = rows_to_csv(rows)
    if args.output:
        Path(args.output).write_text(text)
    if args.pretty:
        print(f"{'np':>5} {'k':>4} {'model':>5} {'pat':>3} {'ebn0':>6} {'trials':>8} {'errs':>6} {'fer':>10} {'ber':>10}")
        for row in rows:
            print(
                f"{row['np']:>5} {row['k']:>4} {row['model']:>5} {row['pattern_id']:>3} "
                f"{row['ebn0_db']:>6.2f} {row['trials']:>8} {row['frame_errors']:>6} "
                f"{row['fer']:>10.3e} {row['ber']:>10.3e}"
            )
    elif not args.output:
        sys.stdout.write(text)
    if args.gnuplot:
        write_gnuplot_data(rows, args.gnuplot)
    if args.plot:
        from .plotting import save_fer_plot

        save_fer_plot(rows, args.plot, title=f"{family.method} family, N={1 << family.n}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarpunct",
        description="Analyze, construct, and simulate punctured rate-compatible polar codes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="pattern analysis: frozen sets, reciprocity, Z values")
    p.add_argument("--n", type=int, required=True, help="stage count, N = 2^n")
    p.add_argument("--pattern", required=True, help="mask bitstring or comma-separated zeros")
    p.add_argument("--model", choices=["ucm", "dcm"], default="ucm")
    p.add_argument("--info-set", help="comma-separated info channels for a catastrophy verdict")
    p.add_argument("--all-dead", action="store_true",
                   help="catastrophic only when every info channel dies")
    p.add_argument("--verbose", action="store_true", help="include per-channel Z values")
    p.add_argument("--pretty", action="store_true")
    p.add_argument("--output", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("catastrophic", help="catastrophic pattern sets and weight polynomials")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--channel", type=int, required=True)
    p.add_argument("--weights", action="store_true", help="emit the zero-weight polynomial")
    p.add_argument("--enumerate", action="store_true", help="list every catastrophic pattern")
    p.add_argument("--force", action="store_true",
                   help=f"enumerate beyond the n<={cat.DEFAULT_ENUMERATION_CAP} cap")
    p.add_argument("--pretty", action="store_true")
    p.add_argument("--output")
    p.set_defaults(func=cmd_catastrophic)

    p = sub.add_parser("construct", help="build a rate-compatible pattern family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True, help="information set size (incl. CRC bits)")
    p.add_argument("--method", choices=["greedy", "reciprocal"], required=True)
    p.add_argument("--model", choices=["ucm", "dcm"], default="ucm")
    p.add_argument("--np", required=True, help="comma-separated transmit lengths, one per rate")
    p.add_argument("--design-snr", type=float, default=0.0, help="Es/N0 in dB for DE/GA")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="family.json")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("simulate", help="Monte Carlo FER sweep over a family file")
    p.add_argument("--family", required=True)
    p.add_argument("--snr", required=True, help="Eb/N0 grid as <db> or <start:stop:step>")
    p.add_argument("--max-trials", type=int, default=100_000)
    p.add_argument("--target-errors", type=int, default=100)
    p.add_argument("--list", type=int, default=1, help="list size for decoding")
    p.add_argument("--crc-bits", type=int, default=0, help="CRC width (0 disables)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=default_thread_count(),
                   help="worker threads (default: POLARPUNCT_THREADS or CPU count)")
    p.add_argument("--exact-llr", action="store_true",
                   help="use the exact tanh update instead of min-sum")
    p.add_argument("--output", help="CSV path (default: stdout)")
    p.add_argument("--gnuplot", help="also write a gnuplot-ready data file here")
    p.add_argument("--plot", help="also render a FER figure (PNG) here")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PolarPunctError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
