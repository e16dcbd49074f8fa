"""Command-line entry point.

    natpower run --experiment fig1 --alpha 0,0.2,0.5,0.9 --seed 0 --max-iter 100 --out fig1.csv
    natpower eig --matrix A.csv
    natpower mor --system sys.csv --r 2
    natpower ltv --alpha 0.5 --horizon 500 --out ltv.csv

Exit status: 0 success, 1 failed check or numerical error, 2 usage or I/O error.
"""

import argparse
import sys

import numpy as np

from . import __version__
from .errors import NatPowerError, ParseError, ShapeError
from .experiments import EXPERIMENTS, ExperimentSpec, mor_check_rows, run_experiment
from .io import format_matrix, load_matrix, load_system
from .ltv import LtvScenario, ltv_simulate
from .mor import dual_subspaces, reduced_models
from .npm import NpmConfig
from .oracle import general_eig

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


def _alpha_list(text):
    try:
        return tuple(float(a) for a in text.split(",") if a.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _seed(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="natpower", description="Natural power method experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a named experiment and write its CSV")
    run.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    run.add_argument("--alpha", type=_alpha_list, default=(0.0, 0.2, 0.5, 0.9))
    run.add_argument("--seed", type=_seed, default=0)
    run.add_argument("--max-iter", type=int, default=None, help="steps per series (horizon)")
    run.add_argument("--out", required=True)

    eig = sub.add_parser("eig", help="print the sorted spectrum of a matrix file")
    eig.add_argument("--matrix", required=True)

    mor = sub.add_parser("mor", help="reduce an LTI system file and check the identities")
    mor.add_argument("--system", required=True)
    mor.add_argument("--r", type=int, required=True)
    mor.add_argument("--seed", type=_seed, default=0)

    ltv = sub.add_parser("ltv", help="simulate the rotating-plant closed loop")
    ltv.add_argument("--alpha", type=float, required=True)
    ltv.add_argument("--horizon", type=int, default=500)
    ltv.add_argument("--seed", type=_seed, default=0)
    ltv.add_argument("--out", required=True)
    return p


def _cmd_run(args):
    spec = ExperimentSpec(args.experiment, args.alpha, args.max_iter, args.seed, args.out)
    status, rows = run_experiment(spec)
    print(f"{spec.name}: wrote {len(rows)} rows to {spec.out_path}")
    return status


def _cmd_eig(args):
    spec = general_eig(load_matrix(args.matrix))
    print("index,real,imag,modulus")
    for i, lam in enumerate(spec.eigenvalues, start=1):
        print(f"{i},{float(lam.real)!r},{float(lam.imag)!r},{float(abs(lam))!r}")
    if spec.ties:
        print("# ties at " + ", ".join(f"{i + 1}/{i + 2}" for i in spec.ties))
    return EXIT_OK


def _cmd_mor(args):
    system = load_system(args.system)
    if not 1 <= args.r < system.n:
        raise ValueError(f"--r must be in [1, {system.n - 1}]")
    rows = mor_check_rows(system, args.r, args.seed)
    u_side, v_side = reduced_models(system, dual_subspaces(system.A, args.r, NpmConfig(), args.seed))
    for red in (u_side, v_side):
        for label, M in (("Ar", red.Ar), ("Br", red.Br), ("Cr", red.Cr)):
            print(f"# {red.basis}-side {label}")
            sys.stdout.write(format_matrix(M))
    print("check,value,tolerance,status")
    for check, value, tol, status in rows:
        print(f"{check},{float(value)!r},{float(tol)!r},{status}")
    return EXIT_CHECK if any(r[3] == "fail" for r in rows) else EXIT_OK


def _cmd_ltv(args):
    log = ltv_simulate(LtvScenario(alpha=args.alpha, horizon=args.horizon, seed=args.seed))
    log.to_csv(args.out)
    nx = log.column("norm_x")
    print(f"ltv alpha={args.alpha}: final |x| = {nx[-1]:.3e}, wrote {len(nx)} rows to {args.out}")
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "eig": _cmd_eig, "mor": _cmd_mor, "ltv": _cmd_ltv}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ParseError, ShapeError) as exc:
        print(f"natpower: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"natpower: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NatPowerError, np.linalg.LinAlgError) as exc:
        print(f"natpower: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
