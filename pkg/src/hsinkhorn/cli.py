"""Command-line entry point: ``hsinkhorn {divergence,sweep,bench}``.

Exit codes: 2 input validation, 3 no convergence, 4 numerical failure
(nonpositive denominator, divergent rank), 5 I/O.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from pathlib import Path

from threadpoolctl import threadpool_limits

from . import experiment
from .core import Grid1D, ProbabilityVector, TensorGrid, read_vector_csv
from .errors import HSinkhornError, LengthMismatch, ValidationError
from .kernels import Cost1D, RegularizedKernel, SmoothnessParams, default_smoothness
from .kron import build_factors
from .sinkhorn import SinkhornConfig, cost_matrix, dense_sinkhorn, hierarchical_sinkhorn

EXIT_IO = 5
DENSE_REFERENCE_MAX_N = 4096


def _int_list(text):
    return tuple(int(t) for t in text.split(","))


def _n_list(text):
    """``1024..65536`` (doubling) or ``1024,2048,...``."""
    if ".." in text:
        lo, hi = (int(t) for t in text.split(".."))
        out = []
        while lo <= hi:
            out.append(lo)
            lo *= 2
        return out
    return list(_int_list(text))


def _add_numeric(p):
    p.add_argument("--lambda", dest="lam", type=float, default=50.0)
    p.add_argument("--eps-tol", type=float, default=0.01, help="H-matrix Frobenius tolerance")
    p.add_argument("--eps-s", type=float, default=0.01, help="Sinkhorn stopping tolerance")
    p.add_argument("--n-min", type=int, default=32)
    p.add_argument("--threads", type=int, default=None, help="BLAS thread hint")


def build_parser():
    parser = argparse.ArgumentParser(prog="hsinkhorn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("divergence", help="Sinkhorn divergence between two vectors")
    d.add_argument("f", type=Path)
    d.add_argument("g", type=Path)
    d.add_argument("--nk", type=_int_list, default=None, help="axis sizes n1,n2,... (axis 1 fastest)")
    d.add_argument("--x-min", type=float, default=0.0)
    d.add_argument("--x-max", type=float, default=1.0)
    d.add_argument("--p", type=float, default=2.0)
    d.add_argument("--eta0", type=float, default=None, help="admissibility bound (default 2/alpha)")
    d.add_argument("--max-iter", type=int, default=10_000)
    d.add_argument("--mode", choices=("hier", "dense"), default="hier")
    d.add_argument("--c0", type=float, default=None)
    d.add_argument("--alpha", type=float, default=None)
    d.add_argument("--beta", type=float, default=0.0)
    d.add_argument("--s", type=float, default=0.0)
    d.add_argument("--trace", type=Path, default=None, help="write iteration,residual CSV")
    d.add_argument("--dump-partition", type=Path, default=None, help="write H-matrix leaf CSV")
    _add_numeric(d)

    s = sub.add_parser("sweep", help="loss curves of the three-pulse shift experiment")
    s.add_argument("--sigma", type=float, default=0.05)
    s.add_argument("--n", type=int, default=4096)
    s.add_argument("--num-shifts", type=int, default=61)
    s.add_argument("--losses", default=",".join(experiment.LOSSES))
    s.add_argument("--out", type=Path, default=Path("sweep.csv"))
    _add_numeric(s)

    b = sub.add_parser("bench", help="time hierarchical divergence against n")
    b.add_argument("--n", type=_n_list, default=_n_list("1024..65536"))
    b.add_argument("--sigma", type=float, default=0.05)
    b.add_argument("--repetitions", type=int, default=3)
    b.add_argument("--out", type=Path, default=Path("bench.csv"))
    _add_numeric(b)
    return parser


def _smoothness(args):
    if args.c0 is None and args.alpha is None:
        return default_smoothness(RegularizedKernel(Cost1D(args.p), args.lam))
    if args.c0 is None or args.alpha is None:
        raise ValidationError("--c0 and --alpha must be given together")
    return SmoothnessParams(args.c0, args.alpha, args.beta, args.s)


def _load(path):
    try:
        return read_vector_csv(path)
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc.strerror or exc}") from exc


class _IOFailure(Exception):
    pass


def cmd_divergence(args, out=None):
    out = out or sys.stdout
    fv, fh = _load(args.f)
    gv, gh = _load(args.g)
    if fv.size != gv.size:
        raise LengthMismatch(f"f has {fv.size} values, g has {gv.size}")
    nk = args.nk or fh.get("nk") or gh.get("nk") or (fv.size,)
    grid = TensorGrid(tuple(Grid1D(args.x_min, args.x_max, n) for n in nk))
    grid.check(fv)
    f, g = ProbabilityVector(fv), ProbabilityVector(gv)
    cfg = SinkhornConfig(lam=args.lam, eps_s=args.eps_s, max_iter=args.max_iter, p=args.p)
    if args.mode == "dense":
        state, value = dense_sinkhorn(f, g, cost_matrix(grid, p=args.p), cfg)
    else:
        factors = build_factors(grid, lam=args.lam, p=args.p, eps_tol=args.eps_tol,
                                eta0=args.eta0, n_min=args.n_min, smoothness=_smoothness(args))
        if args.dump_partition:
            _write(factors.Q[0].dump_partition, args.dump_partition)
        state, value = hierarchical_sinkhorn(f, g, grid, cfg, factors=factors)
    if args.trace:
        _write(state.write_trace, args.trace)
    print(f"divergence {value!r}", file=out)
    print(f"iterations {state.iterations}", file=out)
    return 0


def _write(fn, path):
    try:
        fn(path)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror or exc}") from exc


def cmd_sweep(args, out=None):
    out = out or sys.stdout
    losses = tuple(x for x in args.losses.split(",") if x)
    if "d_S" in losses and args.n > DENSE_REFERENCE_MAX_N:
        print(f"skipping dense d_S reference for n > {DENSE_REFERENCE_MAX_N}", file=sys.stderr)
        losses = tuple(x for x in losses if x != "d_S")
    result = experiment.run_sweep(args.sigma, args.n, args.lam, args.num_shifts, losses,
                                  eps_tol=args.eps_tol, eps_s=args.eps_s, n_min=args.n_min)
    _write(result.write_csv, args.out)
    print(args.out, file=out)
    return 0


def cmd_bench(args, out=None):
    out = out or sys.stdout
    if not args.out.parent.is_dir():
        raise _IOFailure(f"output directory {args.out.parent} does not exist")
    rows = experiment.bench_scaling(args.n, args.lam, args.sigma, args.repetitions,
                                    eps_tol=args.eps_tol, eps_s=args.eps_s, n_min=args.n_min)
    _write(lambda p: experiment.write_bench_csv(p, rows), args.out)
    print(args.out, file=out)
    return 0


COMMANDS = {"divergence": cmd_divergence, "sweep": cmd_sweep, "bench": cmd_bench}


def main(argv=None):
    args = build_parser().parse_args(argv)
    limits = threadpool_limits(args.threads) if args.threads else contextlib.nullcontext()
    try:
        with limits:
            return COMMANDS[args.command](args)
    except HSinkhornError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except _IOFailure as exc:
        print(f"error: IOError: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
