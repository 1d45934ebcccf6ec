"""Command-line front end: deterministic, file-based outputs for every operation.

Exit codes: 0 on success, 1 on usage or I/O errors, 2 when a property
verification (``verify-tk``) reports a violation.  Every run echoes its
effective configuration, including the resolved seed, to standard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .experiments import divergence_table, negspace_experiment, toy_figure
from .optimizers import EqualStart, PerturbedStart
from .problems import random_problem
from .rates import predicted_escape_iters, rate_limit, rate_sequence
from .schedules import (
    AttouchSchedule,
    ConstantSchedule,
    NesterovSchedule,
    PolyakSchedule,
    ScheduleError,
    ToySchedule,
    limit_params,
    schedule_to_json_dict,
    verify_tk_properties,
)
from .spectral import ConditionError, block_eigenvalues, classify_saddle_map

__all__ = ["main", "console_entry", "build_parser"]


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the CLI contract wants 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_point(text: str) -> np.ndarray:
    try:
        return np.array([float(part) for part in text.split(",")])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from exc


def _parse_schedule_spec(text: str, alpha=None, delta=None, gamma_hat=0.0):
    name, _, arg = text.partition(":")
    if name == "nesterov":
        return NesterovSchedule()
    if name == "attouch":
        return AttouchSchedule(eta=float(arg) if arg else 2.0)
    if name == "constant":
        parts = [float(p) for p in arg.split(",")] if arg else []
        if len(parts) == 1:
            parts.append(0.0)
        if len(parts) != 2:
            raise ValueError("constant schedule needs 'constant:BETA,GAMMA'")
        return ConstantSchedule(beta=parts[0], gamma=parts[1])
    if name == "polyak":
        parts = [float(p) for p in arg.split(",")]
        if len(parts) != 2:
            raise ValueError("polyak schedule needs 'polyak:M,L'")
        return PolyakSchedule(m=parts[0], L=parts[1])
    if name == "toy":
        if alpha is None or delta is None:
            raise ValueError("the toy schedule needs --alpha and a curvature (--delta or --lambda)")
        return ToySchedule(alpha=alpha, delta=delta, gamma_hat=gamma_hat)
    raise ValueError(f"unknown schedule {text!r}")


def _echo_config(command: str, config: dict) -> None:
    print(f"saddlescape {command} config: {json.dumps(config, sort_keys=True)}", file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _resolve_format(args, default: str) -> str:
    if getattr(args, "json", False):
        return "json"
    return args.format or default


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_toy(args) -> int:
    fmt = _resolve_format(args, "csv")
    x0 = args.x0
    if x0.size != 2:
        raise ValueError("--x0 must have exactly two components")
    _echo_config(
        "toy",
        {
            "delta": args.delta,
            "alpha": args.alpha,
            "beta": args.beta,
            "x0": list(map(float, x0)),
            "iters": args.iters,
            "thin": args.thin,
            "threshold": args.threshold,
            "format": fmt,
        },
    )
    figure = toy_figure(args.delta, args.alpha, args.beta, x0, args.iters, args.thin, args.threshold)
    if fmt == "json":
        _emit(_json_text(figure.to_json_dict()), args.out)
    else:
        buffer = io.StringIO()
        figure.to_csv(buffer)
        _emit(buffer.getvalue(), args.out)
    return 0


def _cmd_spectrum(args) -> int:
    fmt = _resolve_format(args, "json")
    if args.lam is not None:
        if args.alpha is None or args.beta is None:
            raise ValueError("single-eigenvalue mode needs --lambda, --alpha and --beta")
        _echo_config(
            "spectrum",
            {"lambda": args.lam, "alpha": args.alpha, "beta": args.beta, "format": fmt},
        )
        pair = block_eigenvalues(args.lam, args.alpha, args.beta)
        label = "stable" if args.lam > 0 else ("unit" if args.lam == 0 else "unstable")
        payload = {
            "blocks": [
                {
                    "lambda": pair.lam,
                    "mu_hi": {"re": pair.mu_hi.real, "im": pair.mu_hi.imag},
                    "mu_lo": {"re": pair.mu_lo.real, "im": pair.mu_lo.imag},
                    "class": label,
                }
            ]
        }
    else:
        if args.n is None or args.p is None or args.delta is None:
            raise ValueError("problem mode needs --n, --p and --delta (or use --lambda)")
        if args.beta is None:
            raise ValueError("--beta is required")
        problem = random_problem(args.n, args.p, args.delta, args.seed)
        alpha = args.alpha if args.alpha is not None else 1.0 / problem.lipschitz
        _echo_config(
            "spectrum",
            {
                "n": args.n,
                "p": args.p,
                "delta": args.delta,
                "seed": args.seed,
                "alpha": alpha,
                "beta": args.beta,
                "format": fmt,
            },
        )
        payload = classify_saddle_map(problem, alpha, args.beta).to_json_dict()
    if fmt == "json":
        _emit(_json_text(payload), args.out)
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["lambda", "mu_hi_re", "mu_hi_im", "mu_lo_re", "mu_lo_im", "class"])
        for block in payload["blocks"]:
            writer.writerow(
                [
                    f"{block['lambda']:.12g}",
                    f"{block['mu_hi']['re']:.12g}",
                    f"{block['mu_hi']['im']:.12g}",
                    f"{block['mu_lo']['re']:.12g}",
                    f"{block['mu_lo']['im']:.12g}",
                    block["class"],
                ]
            )
        _emit(buffer.getvalue(), args.out)
    return 0


def _cmd_rates(args) -> int:
    fmt = _resolve_format(args, "json")
    if args.lam >= 0:
        raise ValueError("--lambda must be negative")
    schedule = _parse_schedule_spec(args.schedule, args.alpha, abs(args.lam), args.gamma)
    _echo_config(
        "rates",
        {
            "lambda": args.lam,
            "alpha": args.alpha,
            "schedule": schedule_to_json_dict(schedule),
            "iters": args.iters,
            "projection": args.projection,
            "threshold": args.threshold,
            "format": fmt,
        },
    )
    sequence = rate_sequence(args.lam, args.alpha, schedule, args.iters)
    beta_limit, gamma_limit = limit_params(schedule)
    limit = rate_limit(args.lam, args.alpha, beta_limit, gamma_limit)
    if fmt == "json":
        payload = {
            "lambda": args.lam,
            "alpha": args.alpha,
            "schedule": schedule_to_json_dict(schedule),
            "b_final": sequence.final,
            "b_limit": limit.value,
            "predicted_escape_iters": predicted_escape_iters(
                limit.value, args.projection, args.threshold
            ),
        }
        _emit(_json_text(payload), args.out)
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["iter", "b"])
        for k, value in enumerate(sequence.values):
            writer.writerow([str(k), f"{value:.12g}"])
        _emit(buffer.getvalue(), args.out)
    return 0


def _cmd_simulate(args) -> int:
    fmt = _resolve_format(args, "csv")
    policy = EqualStart() if args.eps_perturb == 0 else PerturbedStart(args.eps_perturb, args.seed)
    _echo_config(
        "simulate",
        {
            "n": args.n,
            "p": args.p,
            "delta": args.delta,
            "seed": args.seed,
            "iters": args.iters,
            "eps_perturb": args.eps_perturb,
            "format": fmt,
        },
    )
    series = negspace_experiment(args.n, args.p, args.delta, args.seed, args.iters, policy)
    if fmt == "json":
        _emit(_json_text(series.to_json_dict()), args.out)
    else:
        buffer = io.StringIO()
        series.to_csv(buffer)
        _emit(buffer.getvalue(), args.out)
    return 0


def _cmd_table(args) -> int:
    fmt = _resolve_format(args, "csv")
    _echo_config(
        "table",
        {
            "n": args.n,
            "delta": args.delta,
            "trials": args.trials,
            "seed": args.seed,
            "iters": args.iters,
            "threshold": args.threshold,
            "format": fmt,
        },
    )
    result = divergence_table(
        ns=args.n,
        deltas=args.delta,
        trials=args.trials,
        seed=args.seed,
        iteration_cap=args.iters,
        threshold=args.threshold,
    )
    if fmt == "json":
        _emit(_json_text(result.to_json_dict()), args.out)
    else:
        buffer = io.StringIO()
        result.to_csv(buffer)
        _emit(buffer.getvalue(), args.out)
    return 0


def _cmd_verify_tk(args) -> int:
    _echo_config("verify-tk", {"K": args.K})
    report = verify_tk_properties(args.K)
    _emit(_json_text(report.to_json_dict()), args.out)
    return 0 if report.passed else 2


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="saddlescape", description=__doc__)
    parser.add_argument("--version", action="version", version=f"saddlescape {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_flags(p, default_format):
        p.add_argument("--out", help="output file path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help=f"output format (default: {default_format})")
        p.add_argument("--json", action="store_true", help="shorthand for --format json")

    toy = sub.add_parser("toy", help="trace both methods on the 2-D toy saddle")
    toy.add_argument("--delta", type=float, default=0.02, help="negative curvature magnitude")
    toy.add_argument("--alpha", type=float, default=0.75, help="step size")
    toy.add_argument("--beta", type=float, default=0.985, help="heavy-ball momentum")
    toy.add_argument("--x0", type=_parse_point, default=np.array([0.25, 0.01]),
                     help="starting point as 'X1,X2'")
    toy.add_argument("--iters", type=int, default=500, help="number of update steps")
    toy.add_argument("--thin", type=int, default=1, help="keep every m-th iterate")
    toy.add_argument("--threshold", type=float, default=1.0, help="escape threshold on |x2|")
    add_output_flags(toy, "csv")
    toy.set_defaults(func=_cmd_toy)

    spectrum = sub.add_parser("spectrum", help="eigenvalues of the linearized iteration map")
    spectrum.add_argument("--lambda", dest="lam", type=float, default=None,
                          help="single Hessian eigenvalue to analyze")
    spectrum.add_argument("--alpha", type=float, default=None, help="step size")
    spectrum.add_argument("--beta", type=float, default=None, help="momentum")
    spectrum.add_argument("--n", type=int, default=None, help="problem dimension (problem mode)")
    spectrum.add_argument("--p", type=int, default=None, help="negative eigenvalue count")
    spectrum.add_argument("--delta", type=float, default=None, help="negative eigenvalue scale")
    spectrum.add_argument("--seed", type=int, default=0, help="problem seed")
    add_output_flags(spectrum, "json")
    spectrum.set_defaults(func=_cmd_spectrum)

    rates = sub.add_parser("rates", help="divergence-rate recurrence and its limit")
    rates.add_argument("--lambda", dest="lam", type=float, required=True,
                       help="negative Hessian eigenvalue")
    rates.add_argument("--alpha", type=float, required=True, help="step size")
    rates.add_argument("--gamma", type=float, default=0.0,
                       help="slack term for the toy schedule")
    rates.add_argument("--schedule", default="nesterov",
                       help="nesterov | attouch:ETA | constant:B,G | polyak:M,L | toy")
    rates.add_argument("--iters", type=int, default=10000, help="recurrence length")
    rates.add_argument("--projection", type=float, default=1e-2,
                       help="starting projection norm for the prediction")
    rates.add_argument("--threshold", type=float, default=1.0,
                       help="escape threshold for the prediction")
    add_output_flags(rates, "json")
    rates.set_defaults(func=_cmd_rates)

    simulate = sub.add_parser("simulate", help="negative-eigenspace growth of all methods")
    simulate.add_argument("--n", type=int, default=100, help="problem dimension")
    simulate.add_argument("--p", type=int, default=1, help="negative eigenvalue count")
    simulate.add_argument("--delta", type=float, default=1e-2, help="negative eigenvalue scale")
    simulate.add_argument("--seed", type=int, default=0, help="master seed")
    simulate.add_argument("--iters", type=int, default=2000, help="number of update steps")
    simulate.add_argument("--eps-perturb", type=float, default=0.0,
                          help="perturbation scale for the momentum predecessor (0 = none)")
    add_output_flags(simulate, "csv")
    simulate.set_defaults(func=_cmd_simulate)

    table = sub.add_parser("table", help="divergence table over seeded random trials")
    table.add_argument("--n", type=int, nargs="+", default=[100], help="problem dimensions")
    table.add_argument("--delta", type=float, nargs="+", default=[1e-2, 1e-3],
                       help="negative eigenvalue scales")
    table.add_argument("--trials", type=int, default=100, help="trials per cell")
    table.add_argument("--seed", type=int, default=0, help="master seed")
    table.add_argument("--iters", type=int, default=10**6, help="per-trial iteration cap")
    table.add_argument("--threshold", type=float, default=None,
                       help="escape threshold (default: the dimension n)")
    add_output_flags(table, "csv")
    table.set_defaults(func=_cmd_table)

    verify = sub.add_parser("verify-tk", help="check the t-sequence identities and bounds")
    verify.add_argument("--K", type=int, default=100000, help="sequence length to check")
    verify.add_argument("--out", help="output file path (default: stdout)")
    verify.set_defaults(func=_cmd_verify_tk)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help/usage errors itself
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, ScheduleError, ConditionError) as exc:
        print(f"saddlescape: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"saddlescape: error: {exc}", file=sys.stderr)
        return 1


def console_entry() -> None:
    raise SystemExit(main())
