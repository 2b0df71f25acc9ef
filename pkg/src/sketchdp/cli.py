"""Command-line interface.

Subcommands: gen, coherence, hmt, rr, pfp, sweep, attack. Data goes to
stdout or --output; all diagnostics go to stderr. Exit codes: 0 success,
1 usage error, 2 data error. Every command is a pure function of its flags:
re-running with identical flags reproduces identical bytes (timings are
zeroed in CSV output unless --timings is given).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .attack import attack, identity_mechanism, make_constant_mechanism, make_rr_mechanism
from .coherence import RANK_TOLERANCE, coherence_report
from .experiment import ALGORITHMS, records_to_csv, run_experiment, sweep
from .generators import KINDS, NETFLIX_DENSITY, GeneratorSpec, generate
from .matio import MatrixFormatError, format_matrix, load_matrix
from .privacy import PrivacyBudget
from .rng import uniform_stream, STREAM_ATTACK
from .sketch import SketchParams, hmt_low_rank, pfp, rr_low_rank_baseline


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _str_list(text: str) -> list[str]:
    return [tok.strip() for tok in text.split(",") if tok.strip()]


def _alpha_value(text: str) -> float | None:
    if text == "auto":
        return None
    return float(text)


def _mode_value(text: str) -> str:
    return {"c": "c_coherent", "mu0": "mu0_coherent"}[text]


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _add_io_flags(p: Parser, needs_input: bool = True) -> None:
    if needs_input:
        p.add_argument("--input", required=True, help="matrix file (dense or sparse)")
    p.add_argument("--output", default=None, help="output path (default: stdout)")


def _add_sketch_flags(p: Parser) -> None:
    p.add_argument("--rank", type=int, required=True, help="target rank r")
    p.add_argument(
        "--oversample",
        type=int,
        default=None,
        help="oversampling p (default: rank + 1); sketch width is k = r + p",
    )
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="base seed; trial i uses seed + i")
    p.add_argument(
        "--format",
        choices=("csv", "dense"),
        default="csv",
        help="csv: one record per trial; dense: the approximation itself (trials=1)",
    )
    p.add_argument(
        "--timings",
        action="store_true",
        help="record real wall times in the CSV (breaks byte-identical re-runs)",
    )


def _add_budget_flags(p: Parser) -> None:
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)


def build_parser() -> Parser:
    parser = Parser(prog="sketchdp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic matrix")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--decay", type=float, default=1.0, help="power-law spectrum decay")
    p.add_argument("--density", type=float, default=NETFLIX_DENSITY)
    p.add_argument("--value-min", type=int, default=1)
    p.add_argument("--value-max", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("dense", "sparse"), default="dense")
    _add_io_flags(p, needs_input=False)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("coherence", help="measure both coherence values")
    _add_io_flags(p)
    p.add_argument("--rank-tolerance", type=float, default=RANK_TOLERANCE)
    p.set_defaults(func=_cmd_coherence)

    p = sub.add_parser("hmt", help="non-private sketch-and-project baseline")
    _add_io_flags(p)
    _add_sketch_flags(p)
    p.set_defaults(func=_cmd_hmt)

    p = sub.add_parser("rr", help="randomized-response baseline")
    _add_io_flags(p)
    _add_sketch_flags(p)
    _add_budget_flags(p)
    p.set_defaults(func=_cmd_rr)

    p = sub.add_parser("pfp", help="private find-and-project")
    _add_io_flags(p)
    _add_sketch_flags(p)
    _add_budget_flags(p)
    p.add_argument(
        "--alpha",
        type=_alpha_value,
        default=None,
        help="pruning threshold in (0, 1], or 'auto' (c mode only; logs a warning)",
    )
    p.add_argument("--mode", choices=("c", "mu0"), default="mu0")
    p.set_defaults(func=_cmd_pfp)

    p = sub.add_parser("sweep", help="grid sweep emitting one CSV row per trial")
    p.add_argument("--kinds", type=_str_list, default=["low_mu0"])
    p.add_argument("--m-grid", type=_int_list, required=True)
    p.add_argument("--n-grid", type=_int_list, required=True)
    p.add_argument("--k-grid", type=_int_list, required=True)
    p.add_argument("--epsilon-grid", type=_float_list, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--algorithms", type=_str_list, default=["pfp"])
    p.add_argument("--mode", choices=("c", "mu0"), default="mu0")
    p.add_argument("--alpha", type=_alpha_value, default=None)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timings", action="store_true")
    _add_io_flags(p, needs_input=False)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("attack", help="reconstruction attack on a mechanism")
    p.add_argument("--mechanism", choices=("identity", "rr", "constant"), required=True)
    p.add_argument("--nbits", type=int, required=True, help="database size (k * n)")
    p.add_argument("--rows", type=int, required=True, help="matrix rows m (>= rank)")
    p.add_argument("--rank", type=int, required=True, help="rows carrying bits (k)")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    _add_io_flags(p, needs_input=False)
    p.set_defaults(func=_cmd_attack)

    return parser


def _cmd_gen(args) -> int:
    spec = GeneratorSpec(
        kind=args.kind,
        m=args.rows,
        n=args.cols,
        rank=args.rank,
        spectrum_decay=args.decay,
        density=args.density,
        value_range=(args.value_min, args.value_max),
        seed=args.seed,
    )
    _emit(format_matrix(generate(spec), args.format), args.output)
    return 0


def _cmd_coherence(args) -> int:
    report = coherence_report(load_matrix(args.input), args.rank_tolerance)
    payload = {
        "c_coherence": report.c_coherence,
        "mu0_coherence": report.mu0_coherence,
        "rank_used": report.rank_used,
        "max_row_norm": report.max_row_norm,
        "frobenius_norm": report.frobenius_norm,
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.output)
    return 0


def _require_single_trial(args) -> None:
    if args.trials != 1:
        raise UsageError("--format dense requires --trials 1")


def _run_records_command(args, algorithm: str, budget, mode="mu0_coherent", alpha=None) -> int:
    a = load_matrix(args.input)
    if args.format == "dense":
        _require_single_trial(args)
        if algorithm == "hmt":
            result = hmt_low_rank(a, SketchParams(args.rank, args.oversample, args.seed))
        elif algorithm == "rr":
            oversample = args.oversample if args.oversample is not None else args.rank + 1
            result = rr_low_rank_baseline(a, args.rank + oversample, budget, args.seed)
        else:
            result = pfp(a, SketchParams(args.rank, args.oversample, args.seed), budget, mode, alpha)
        print(f"error_frobenius={result.achieved_error:.6g}", file=sys.stderr)
        _emit(format_matrix(result.b, "dense"), args.output)
        return 0
    records = run_experiment(
        algorithm,
        a,
        rank=args.rank,
        oversample=args.oversample,
        budget=budget,
        trials=args.trials,
        base_seed=args.seed,
        mode=mode,
        alpha=alpha,
    )
    _emit(records_to_csv(records, include_timings=args.timings), args.output)
    return 0


def _cmd_hmt(args) -> int:
    return _run_records_command(args, "hmt", None)


def _cmd_rr(args) -> int:
    return _run_records_command(args, "rr", PrivacyBudget(args.epsilon, args.delta))


def _cmd_pfp(args) -> int:
    return _run_records_command(
        args,
        "pfp",
        PrivacyBudget(args.epsilon, args.delta),
        mode=_mode_value(args.mode),
        alpha=args.alpha,
    )


def _cmd_sweep(args) -> int:
    chunks = []
    cells = sweep(
        m_values=args.m_grid,
        n_values=args.n_grid,
        k_values=args.k_grid,
        epsilon_values=args.epsilon_grid,
        kinds=args.kinds,
        rank=args.rank,
        delta=args.delta,
        trials=args.trials,
        base_seed=args.seed,
        algorithms=args.algorithms,
        mode=_mode_value(args.mode),
        alpha=args.alpha,
    )
    if args.output is None:
        for i, cell_records in enumerate(cells):
            text = records_to_csv(cell_records, include_timings=args.timings)
            sys.stdout.write(text if i == 0 else text.split("\n", 1)[1])
            sys.stdout.flush()
        return 0
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        for i, cell_records in enumerate(cells):
            text = records_to_csv(cell_records, include_timings=args.timings)
            fh.write(text if i == 0 else text.split("\n", 1)[1])
            fh.flush()
    return 0


def _cmd_attack(args) -> int:
    if args.nbits < 1 or args.nbits % args.rank != 0:
        raise UsageError("--nbits must be a positive multiple of --rank")
    if args.mechanism == "rr":
        if args.epsilon is None or args.delta is None:
            raise UsageError("mechanism 'rr' requires --epsilon and --delta")
        mechanism = make_rr_mechanism(PrivacyBudget(args.epsilon, args.delta))
    elif args.mechanism == "constant":
        mechanism = make_constant_mechanism(0.5)
    else:
        mechanism = identity_mechanism
    bits = (uniform_stream(args.seed, STREAM_ATTACK, args.nbits) < 0.5).astype(np.int64)
    lines = [
        "mechanism,nbits,m,k,trial_seed,recovered_fraction,hamming_distance,noise_sigma_effective"
    ]
    for i in range(args.trials):
        report = attack(bits, args.rows, args.rank, mechanism, args.seed + i)
        lines.append(
            f"{report.mechanism_label},{args.nbits},{args.rows},{args.rank},"
            f"{args.seed + i},{format(report.recovered_fraction, '.17g')},"
            f"{report.hamming_distance},{format(report.noise_sigma_effective, '.17g')}"
        )
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def main(argv=None) -> int:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    logger = logging.getLogger("sketchdp")
    logger.addHandler(handler)
    if logger.level == logging.NOTSET:
        logger.setLevel(logging.WARNING)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (MatrixFormatError, OSError) as exc:
        print(exc, file=sys.stderr)
        return 2
    except ValueError as exc:
        print(exc, file=sys.stderr)
        return 1
    finally:
        logger.removeHandler(handler)


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
