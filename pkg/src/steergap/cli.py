"""Command-line front end.

Subcommands: gap (one annealed point), curve (a table over the Werner
parameter), check-lhs (ensemble admissibility residual), witness (margin of
one fixed direction). States are given as a JSON file path or the shorthand
werner:p; ensembles as "uniform" or "discrete:<path>"; quadrature rules as
"product:L", "product:LxM", or "lebedev:<path>".

Exit codes: 0 success, 1 validation failure, 2 I/O failure, 3 infeasible
configuration.

Run records are JSON with a deterministic "record" section (identical flags
and seed give byte-identical canonical bytes) and a volatile "meta" section
(timestamp, wall time).
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import sys

import numpy as np

from . import __version__
from .annealing import AnnealConfig, GapResult, check_direction, gap, gap_pvm_analytic
from .capacity import (
    DiscreteEnsemble,
    LhsEnsemble,
    UniformEnsemble,
    load_discrete,
    minimal_requirement_residual,
)
from .errors import FormatError, InfeasibleConfigError, ValidationError
from .pauli import Direction, normalize_direction
from .quadrature import Quadrature, rule_from_id
from .states import TwoQubitState, load_state, werner

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INFEASIBLE = 3

_RESIDUAL_TOL = 1e-6


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is reserved for I/O here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _parse_state(spec: str) -> TwoQubitState:
    if spec.startswith("werner:"):
        try:
            p = float(spec.split(":", 1)[1])
        except ValueError:
            raise ValidationError("bad werner shorthand %r, expected werner:<p>" % spec) from None
        return werner(p)
    return load_state(spec)


def _parse_lhs(spec: str, quad: Quadrature) -> LhsEnsemble:
    if spec == "uniform":
        return UniformEnsemble(quad)
    if spec.startswith("discrete:"):
        path = spec.split(":", 1)[1]
        if not path:
            raise ValidationError("discrete ensemble needs a path: discrete:<path>")
        return load_discrete(path)
    raise ValidationError(
        "ensemble must be 'uniform' or 'discrete:<path>', got %r" % spec
    )


def _load_direction(path: str) -> Direction:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = stripped.split()
            if len(fields) != 4:
                raise FormatError(
                    "%s:%d: expected 4 real coordinates per row, got %d"
                    % (path, lineno, len(fields))
                )
            try:
                rows.append([float(f) for f in fields])
            except ValueError as exc:
                raise FormatError(
                    "%s:%d: non-numeric field in %r" % (path, lineno, stripped)
                ) from exc
    if len(rows) < 2:
        raise FormatError("%s: a direction file needs at least 2 rows" % path)
    return normalize_direction(np.array(rows))


def _add_run_flags(sub: argparse.ArgumentParser, with_state: bool = True):
    if with_state:
        sub.add_argument("--state", required=True, help="state file or werner:<p>")
    sub.add_argument("--mode", choices=("pvm2", "povm4"), default="pvm2")
    sub.add_argument("--lhs", default="uniform", help="uniform or discrete:<path>")
    sub.add_argument(
        "--quadrature", default="product:32x64",
        help="product:L, product:LxM, or lebedev:<path>",
    )
    sub.add_argument("--replicas", type=int, default=AnnealConfig.replicas)
    sub.add_argument("--seed", type=int, default=AnnealConfig.seed)
    sub.add_argument("--workers", type=int, default=1, help="replica worker processes")
    sub.add_argument("--out", default=None, help="output file path")


def _config_from_args(args) -> AnnealConfig:
    return AnnealConfig(replicas=args.replicas, seed=args.seed, workers=args.workers)


def _canonical_record(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _run_record(command: str, args, result: GapResult) -> dict:
    """Record with a deterministic payload and a volatile meta section."""
    body = result.to_dict()
    wall_time = body.pop("wall_time")
    payload = {
        "command": command,
        "state": args.state,
        "lhs": args.lhs,
        "quadrature": args.quadrature,
        "version": "steergap-%s" % __version__,
        "result": body,
    }
    return {
        "record": payload,
        "meta": {
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "wall_time": wall_time,
        },
    }


def cmd_gap(args) -> int:
    rho = _parse_state(args.state)
    quad = rule_from_id(args.quadrature)
    u = _parse_lhs(args.lhs, quad)
    result = gap(rho, u, args.mode, _config_from_args(args))
    if args.out:
        record = _run_record("gap", args, result)
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(record, fh, sort_keys=True, indent=2)
            fh.write("\n")
    print("%.17g" % result.gap)
    return EXIT_OK


def cmd_curve(args) -> int:
    if not 0.0 <= args.p_from <= args.p_to <= 1.0:
        raise ValidationError(
            "need 0 <= p-from <= p-to <= 1, got %r..%r" % (args.p_from, args.p_to)
        )
    if args.p_steps < 1:
        raise ValidationError("p-steps must be >= 1, got %r" % args.p_steps)
    quad = rule_from_id(args.quadrature)
    config = _config_from_args(args)
    if args.p_steps == 1:
        grid = [args.p_from]
    else:
        grid = list(np.linspace(args.p_from, args.p_to, args.p_steps))
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["p", "gap_pvm_analytic", "gap_numeric", "replica_std"])
    for p in grid:
        rho = werner(p)
        u = _parse_lhs(args.lhs, quad)
        result = gap(rho, u, args.mode, config)
        writer.writerow(
            [
                "%.17g" % p,
                "%.17g" % gap_pvm_analytic(p),
                "%.17g" % result.gap,
                "%.17g" % float(np.std(result.replica_energies)),
            ]
        )
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check_lhs(args) -> int:
    rho = _parse_state(args.state)
    quad = rule_from_id(args.quadrature)
    u = _parse_lhs(args.lhs, quad)
    residual = minimal_requirement_residual(u, rho)
    ok = residual <= _RESIDUAL_TOL
    print("barycenter residual = %.17g" % residual)
    print("minimal requirement %s (tolerance %g)" % ("passed" if ok else "FAILED", _RESIDUAL_TOL))
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_witness(args) -> int:
    rho = _parse_state(args.state)
    quad = rule_from_id(args.quadrature)
    u = _parse_lhs(args.lhs, quad)
    z = _load_direction(args.direction)
    if z.n_outcomes == 2:
        mode = "pvm2"
    elif z.n_outcomes == 4:
        mode = "povm4"
    else:
        raise ValidationError(
            "witness margins support 2- or 4-component directions, got %d rows"
            % z.n_outcomes
        )
    config = AnnealConfig(replicas=8, seed=args.seed) if mode == "povm4" else None
    margin = check_direction(rho, u, z, mode, config)
    print("margin = %.17g" % margin)
    if margin < 0.0:
        print("steering witness found")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="steergap", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version="steergap %s" % __version__)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("gap", help="anneal the gap for one state")
    _add_run_flags(sub)
    sub.set_defaults(func=cmd_gap)

    sub = subs.add_parser("curve", help="gap table over the Werner parameter")
    sub.add_argument("--p-from", type=float, required=True)
    sub.add_argument("--p-to", type=float, required=True)
    sub.add_argument("--p-steps", type=int, required=True)
    _add_run_flags(sub, with_state=False)
    sub.set_defaults(func=cmd_curve)

    sub = subs.add_parser("check-lhs", help="ensemble admissibility residual")
    sub.add_argument("--state", required=True, help="state file or werner:<p>")
    sub.add_argument("--lhs", default="uniform", help="uniform or discrete:<path>")
    sub.add_argument(
        "--quadrature", default="product:32x64",
        help="rule backing the uniform ensemble",
    )
    sub.set_defaults(func=cmd_check_lhs)

    sub = subs.add_parser("witness", help="margin of one fixed direction")
    sub.add_argument("--state", required=True, help="state file or werner:<p>")
    sub.add_argument("--direction", required=True, help="file with n rows of 4 reals")
    sub.add_argument("--lhs", default="uniform", help="uniform or discrete:<path>")
    sub.add_argument(
        "--quadrature", default="product:32x64",
        help="rule backing the uniform ensemble",
    )
    sub.add_argument("--seed", type=int, default=AnnealConfig.seed)
    sub.set_defaults(func=cmd_witness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return EXIT_IO
    except InfeasibleConfigError as exc:
        print("infeasible configuration: %s" % exc, file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
