"""Command-line entry point.

Exit codes: 0 success, 2 invalid arguments or configuration, 3 a failed
``verify`` check.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .errors import ValidationError
from .harness import ExperimentConfig, Grid, emit, run_experiment
from .sampling import EnsembleSpec

_COMMANDS = {
    "spectra": "spectra",
    "density": "density-curve",
    "kernel": "kernel-grid",
    "fc": "fc",
    "real-prob": "real-prob",
    "lyapunov": "lyapunov",
    "mutual-info": "mutual-info",
    "verify": "verify",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _charges(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ValidationError(f"charges must be comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rmtprod", description="Spectra of products of Gaussian random matrices.")
    p.add_argument("command", choices=sorted(_COMMANDS))
    p.add_argument("--beta", type=int, choices=(1, 2, 4), default=2)
    p.add_argument("--dim", type=int, default=2, help="matrix dimension N")
    p.add_argument("--factors", type=int, default=None, help="number of factors n (zero charges)")
    p.add_argument("--charges", type=str, default=None, help="comma-separated charges ν_1,…,ν_n")
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--grid", type=str, default=None, help="min:max:points[:log]")
    p.add_argument("--out", type=str, default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.charges is not None:
        charges = _charges(args.charges)
        if args.factors is not None and args.factors != len(charges):
            raise ValidationError("--factors disagrees with the number of --charges")
    else:
        charges = (0,) * (args.factors if args.factors is not None else 1)
    return ExperimentConfig(
        experiment=_COMMANDS[args.command],
        ensemble=EnsembleSpec(args.beta, args.dim, charges),
        samples=args.samples,
        seed=args.seed,
        parallel_width=args.threads,
        grid=Grid.parse(args.grid) if args.grid else None,
        output=args.out,
        format=args.format,
    )


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        config = config_from_args(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        bundle = run_experiment(config)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if config.output:
        emit(bundle, config.format, config.output)
    else:
        from .harness import _csv_text, _json_text

        sys.stdout.write(_csv_text(bundle) if config.format == "csv" else _json_text(bundle))
    if config.experiment == "verify":
        for row in bundle.rows:
            print(f"{row[3]} [{row[2]}] {row[0]}: {row[1]} ({row[4]})", file=sys.stderr)
        return 0 if bundle.ok else 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
