"""Command-line front end.

Every subcommand wraps one library capability and writes deterministic,
plot-ready output: CSV with '#'-prefixed header lines carrying the full
run configuration, or JSON with a {meta, data} envelope.  Stochastic
subcommands are deterministic given --seed.  Exit codes: 0 success,
2 validation error, 3 numerical failure.

Column documentation lives in cli_schema.json next to this module and in
each subcommand's --help.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import numpy as np

from . import __version__, annealed, borel, eigenpairs, maps, tensors
from . import fuss_catalan as fc
from .errors import (
    BranchTrackingFailed,
    CapExceeded,
    CutContact,
    DomainError,
    NearSingular,
    NoMatchingPairs,
    OutsideWedge,
    ParityError,
    QuadratureFailure,
    RootFindFailure,
    SignMismatch,
    TensorSpectraError,
)

VALIDATION_ERRORS = (DomainError, ParityError, CapExceeded)
NUMERICAL_ERRORS = (
    QuadratureFailure,
    BranchTrackingFailed,
    RootFindFailure,
    NearSingular,
    NoMatchingPairs,
    SignMismatch,
    CutContact,
    OutsideWedge,
)


def _schema():
    with resources.files("tensorspectra").joinpath("cli_schema.json").open() as fh:
        return json.load(fh)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _meta(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",) and v is not None}
    cfg = {k: (v if not isinstance(v, float) else float(_fmt(v))) for k, v in cfg.items()}
    return {"version": __version__, "config": cfg}


def _emit_csv(args, columns, rows):
    lines = [f"# tensorspectra {__version__}", f"# config: {json.dumps(_meta(args)['config'], sort_keys=True)}"]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) if v is not None else "" for v in row))
    _write(args, "\n".join(lines) + "\n")


def _emit_json(args, data):
    payload = {"meta": _meta(args), "data": data}
    _write(args, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _resolve_output(path):
    """Relative output paths land in $TENSORSPECTRA_OUTDIR when it is set."""
    if path is None:
        return None
    outdir = os.environ.get("TENSORSPECTRA_OUTDIR")
    if outdir and not os.path.isabs(path):
        return os.path.join(outdir, path)
    return path


def _write(args, text):
    path = _resolve_output(getattr(args, "output", None))
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _pmap(args, fn, items):
    threads = getattr(args, "threads", 1)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _parse_sweep(spec):
    """start:stop:step -> inclusive grid (also accepts a single value)."""
    parts = spec.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise DomainError(f"sweep must be start:stop:step, got {spec!r}")
    start, stop, step = (float(v) for v in parts)
    if step <= 0:
        raise DomainError("sweep step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


# ------------------------------------------------------------- subcommands

def cmd_density(args):
    edge = fc.support_edge(args.p)
    ys = np.linspace(-edge, edge, args.grid)
    rows = [(float(y), fc.wigner_density(args.p, float(y), method=args.method)) for y in ys]
    _emit_csv(args, ["y", "rho"], rows)


def cmd_moments(args):
    rows = []
    for n in range(args.nmax + 1):
        moment = fc.density_moment(args.p, n)
        exact = fc.fuss_catalan_number(args.p, n)
        rows.append((n, moment, exact, abs(moment - exact)))
    _emit_csv(args, ["n", "moment", "fuss_catalan", "abs_err"], rows)


def cmd_resolvent(args):
    rows = []
    for token in args.w:
        w = complex(token)
        omega = fc.expected_resolvent(args.p, w)
        rows.append((w.real, w.imag, omega.real, omega.imag))
    _emit_csv(args, ["re_w", "im_w", "re_omega", "im_omega"], rows)


def cmd_maps(args):
    classes = maps.enumerate_rooted_maps(args.p, args.n)
    _emit_json(args, [maps.map_to_json(m) for m in classes])


def cmd_invariants(args):
    exact = maps.wick_expectation(args.p, args.N, args.n)
    if args.samples > 0:
        est = maps.mc_expected_invariant(args.p, args.N, args.n, args.samples, args.seed)
        mc_mean, mc_stderr = est.mean, est.std_error
    else:
        mc_mean = mc_stderr = None
    rows = [
        (
            args.p,
            args.N,
            args.n,
            str(exact),
            float(exact),
            mc_mean,
            mc_stderr,
            args.samples,
            args.seed,
        )
    ]
    _emit_csv(
        args,
        ["p", "N", "n", "wick_exact", "wick_float", "mc_mean", "mc_stderr", "samples", "seed"],
        rows,
    )


def cmd_sample(args):
    T = tensors.sample_goe(args.p, args.N, args.seed)
    path = _resolve_output(args.output)
    if path is None:
        raise DomainError("sample writes a binary tensor file: --output is required")
    tensors.save_tensor(T, path)
    meta = {"meta": _meta(args), "components": len(T.data), "path": path}
    sys.stdout.write(json.dumps(meta, sort_keys=True) + "\n")


def cmd_eigen(args):
    if args.input is not None:
        T = tensors.load_tensor(args.input)
    else:
        T = tensors.sample_goe(args.p, args.N, args.seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pairs = eigenpairs.find_real_eigenpairs(
            T, n_starts=args.starts, tol=args.tol, seed=args.seed
        )
    data = [
        {
            "lambda": pair.lam,
            "x": [float(v) for v in pair.x],
            "residual": pair.residual,
            "degenerate": pair.degenerate,
        }
        for pair in pairs
    ]
    _emit_json(args, data)


def _spike_row(p, b):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        y_c = annealed.singular_locus(p, b)
        s_c = min(y_c ** (-2 / (p - 1)) * p ** (p / (p - 1)) / (p - 1), 1.0)
        theta_c = math.asin(math.sqrt(s_c))
        rho_c_sq = y_c ** (2 / (p - 1)) * p ** (-1 / (p - 1))
        # above threshold the extra saddle is real at and below the locus;
        # below threshold the locus is the cut endpoint itself, so stay above
        if b >= annealed.spike_threshold(p).b_t:
            probe = y_c * (1 - 1e-3)
        else:
            probe = y_c * (1 + 1e-3)
        report = annealed.spike_saddles(p, probe, b)
    f0 = report.saddles[0].f_value.real
    f1 = report.saddles[1].f_value.real if len(report.saddles) > 1 else None
    return (p, b, y_c, theta_c, rho_c_sq, report.dominant_index, f0, f1)


def cmd_spike(args):
    bs = _parse_sweep(args.b_sweep) if args.b_sweep else [args.b]
    if bs is None or (len(bs) == 1 and bs[0] is None):
        raise DomainError("provide --b or --b-sweep")
    rows = _pmap(args, lambda b: _spike_row(args.p, b), bs)
    _emit_csv(
        args,
        ["p", "b", "y_c", "theta_c", "rho_c_sq", "dominant_saddle", "f0", "f1"],
        rows,
    )


def cmd_annealed(args):
    w = complex(args.w)
    saddle = annealed.annealed_resolvent(args.p, w, mode="saddle")
    rows = [(args.p, w.real, 0, "saddle", saddle.real, saddle.imag, 0.0)]

    def one(N):
        omega = annealed.annealed_resolvent(args.p, w, N, mode="quadrature")
        return (args.p, w.real, N, "quadrature", omega.real, omega.imag, abs(omega - saddle))

    if args.N:
        rows.extend(_pmap(args, one, [int(v) for v in args.N.split(",")]))
    _emit_csv(
        args,
        ["p", "w", "N", "mode", "re_omega", "im_omega", "abs_err_vs_saddle"],
        rows,
    )


def cmd_borel(args):
    gs = _parse_sweep(args.g_sweep) if args.g_sweep else [args.g]

    def one(g_abs):
        disc = borel.discontinuity(args.p, g_abs, args.q)
        inst = borel.instanton_discontinuity(args.p, g_abs)
        ratio = abs(disc) / abs(inst)
        return (args.p, args.q, g_abs, disc.real, disc.imag, inst.real, inst.imag, ratio)

    rows = _pmap(args, one, gs)
    columns = ["p", "q", "g_abs", "re_disc", "im_disc", "instanton_re", "instanton_im", "ratio"]
    if args.format == "json":
        _emit_json(args, [dict(zip(columns, row)) for row in rows])
    else:
        _emit_csv(args, columns, rows)


# ------------------------------------------------------------------ parser

def _column_help(name):
    entry = _schema()[name]
    if "columns" in entry:
        return "columns: " + "; ".join(f"{k}: {v}" for k, v in entry["columns"].items())
    return entry.get("data", "")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tensorspectra",
        description="Spectral laws, invariants and saddle analysis of random symmetric tensors.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, fn, **defaults):
        sp = sub.add_parser(name, epilog=_column_help(name))
        sp.set_defaults(func=fn)
        sp.add_argument("--output", help="output file; relative paths resolve in $TENSORSPECTRA_OUTDIR")
        sp.add_argument("--format", choices=("csv", "json"), default=defaults.get("format", "csv"))
        sp.add_argument("--threads", type=int, default=1, help="worker cap for sweeps")
        return sp

    sp = add("density", cmd_density)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--grid", type=int, default=400)
    sp.add_argument("--method", choices=("auto", "hypergeometric", "root_tracking"), default="auto")

    sp = add("moments", cmd_moments)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--nmax", type=int, default=6)

    sp = add("resolvent", cmd_resolvent)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--w", action="append", required=True, help="complex point, e.g. 4 or 2.8+0.5j (repeatable)")

    sp = add("maps", cmd_maps, format="json")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = add("invariants", cmd_invariants)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("sample", cmd_sample)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("eigen", cmd_eigen, format="json")
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--N", type=int, default=4)
    sp.add_argument("--input", help="packed tensor file; omit to sample a fresh draw")
    sp.add_argument("--starts", type=int, default=100)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("spike", cmd_spike)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--b", type=float)
    sp.add_argument("--b-sweep", dest="b_sweep", help="start:stop:step")

    sp = add("annealed", cmd_annealed)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--w", required=True)
    sp.add_argument("--N", help="comma-separated dimensions for quadrature mode")

    sp = add("borel", cmd_borel)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, default=0)
    sp.add_argument("--g", type=float)
    sp.add_argument("--g-sweep", dest="g_sweep", help="start:stop:step")
    sp.add_argument("--disc", action="store_true", help="kept for symmetry; jumps are always reported")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except VALIDATION_ERRORS as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except TensorSpectraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
