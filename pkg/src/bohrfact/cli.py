"""Command-line front end.

Every command writes one JSON document (or CSV with ``#`` metadata lines)
that carries the configuration and seed used to produce it. Exit codes:
0 success, 1 I/O or parse error, 2 mathematical precondition violated,
3 convergence or search budget exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from bohrfact import __version__, approx, fixtures, lattice, roots1d, specfact2d, trigpoly
from bohrfact.analytic import psi_fft
from bohrfact.errors import BohrFactError, DepthExhausted, NonConvergent, PreconditionError, TailMassExceeded

EXIT_OK, EXIT_IO, EXIT_PRECONDITION, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


class BudgetExhausted(Exception):
    def __init__(self, message: str, payload: dict):
        self.payload = payload
        super().__init__(message)


# serialization helpers ----------------------------------------------------------
def _cx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _poly_obj(t) -> dict:
    return trigpoly.to_json_obj(t)


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_poly(path: str, dim: int):
    if path is None:
        raise InputError("--input is required")
    obj = _read_json(path)
    if isinstance(obj, dict) and "poly" in obj.get("result", {}):
        # output of the fixture command
        obj = obj["result"]["poly"]
    try:
        t = trigpoly.from_json_obj(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed polynomial in {path}: {exc}") from exc
    if t.dim != dim:
        raise InputError(f"expected a {dim}D polynomial, got {t.dim}D")
    return t


def _load_strip(args) -> lattice.Strip:
    if args.strip:
        try:
            return lattice.Strip.from_json_obj(_read_json(args.strip))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed strip in {args.strip}: {exc}") from exc
    if args.alpha is None or args.beta is None:
        raise InputError("give --strip FILE or both --alpha and --beta")
    return lattice.Strip(_parse_slope(args.alpha), args.beta)


def _parse_slope(text: str) -> lattice.Slope:
    """``p/q`` or an integer is exact; anything else is read as a double."""
    try:
        if "/" in text or text.lstrip("-").isdigit():
            return lattice.Slope(Fraction(text))
        return lattice.Slope(float(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse slope {text!r}") from exc


def _meta(args) -> dict:
    return {
        "command": args.command,
        "version": __version__,
        "seed": args.seed,
        "oversample": args.oversample,
        "guard_band": args.guard_band,
        "grid": args.grid,
        "eps": args.eps,
        "zero_tol": args.zero_tol,
        "method": args.method,
    }


def _emit(args, payload: dict, table: list | None = None, columns: list | None = None) -> None:
    if args.format == "csv" and table is not None:
        buf = io.StringIO()
        for key, value in sorted(_meta(args).items()):
            buf.write(f"# {key}={value}\n")
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in table:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        text = buf.getvalue()
    else:
        doc = {"meta": _meta(args), "result": payload}
        text = json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"
    if args.output:
        try:
            with open(args.output, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.output}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return _cx(obj)
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    raise TypeError(f"not serializable: {type(obj).__name__}")


def _float(x: float):
    # JSON has no infinity
    return None if x is None or not np.isfinite(x) else float(x)


# commands -------------------------------------------------------------------------
def cmd_factor1d(args) -> None:
    t = _load_poly(args.input, 1)
    payload = {"input": _poly_obj(t)}
    methods = ["roots", "fft"] if args.method == "both" else [args.method]
    plus = {}
    for m in methods:
        if m == "roots":
            ex = roots1d.spectral_factor_exact(t, guard_band=args.guard_band)
            f = ex.factorization
            payload["roots"] = {
                "gamma": _cx(f.gamma),
                "lambdas": [_cx(z) for z in f.lambdas],
                "mus": [_cx(z) for z in f.mus],
                "backward_error": f.backward_error,
                "psi_plus": _poly_obj(ex.plus),
                "psi_minus": _poly_obj(ex.minus),
                "residual": ex.residual,
            }
            plus[m] = ex.plus
        else:
            sf = psi_fft(t, grid_M=args.grid)
            payload["fft"] = {
                "psi_plus": _poly_obj(sf.plus),
                "psi_minus": _poly_obj(sf.minus),
                "residual": sf.residual,
                "tail_mass": sf.tail_mass,
                "grid_M": sf.grid_M,
            }
            plus[m] = sf.plus
    if len(plus) == 2:
        payload["max_discrepancy"] = plus["roots"].max_coeff_diff(plus["fft"])
    first = plus[methods[0]]
    try:
        N = max(t.n_plus, 1)
        payload["cor2"] = {
            "N": N,
            "bound": roots1d.cor2_bound(t, N),
            "measured_sup_plus": trigpoly.sup_norm(first, args.oversample).value,
        }
    except BohrFactError as exc:
        payload["cor2"] = {"skipped": str(exc)}
    table = [{"factor": "plus", "j": j, "re": c.real, "im": c.imag} for j, c in sorted(first.terms.items())]
    _emit(args, payload, table, ["factor", "j", "re", "im"])


def cmd_factor2d(args) -> None:
    t = _load_poly(args.input, 2)
    n_max = args.n_max
    M = args.grid or specfact2d.default_grid(t, n_max)
    sf = specfact2d.s_factor(t, M, method="fft" if args.method == "fft" else "roots")
    b = specfact2d.bound_2d(t, sf)
    rows = []
    reached = None
    for N in range(0, min(n_max, M // 2 - 1) + 1):
        est = specfact2d.error_2d(t, specfact2d.s_truncate(sf, N), args.oversample)
        rows.append({"N": N, "error": est.value, "error_upper": est.upper, "bound": b.sbound1(N)})
        if args.eps is not None and est.value <= args.eps:
            reached = N
            break
    payload = {
        "input": _poly_obj(t),
        "slice_grid": M,
        "max_slice_residual": sf.max_residual,
        "bound": {
            "rho": b.rho, "sigma1": b.sigma1, "tau": b.tau, "zeta_est": b.zeta_est,
            "n1": b.n1, "n2": b.n2, "min_t": b.min_t,
        },
        "table": rows,
    }
    if args.eps is not None:
        payload["eps"] = {
            "first_N": reached,
            "N_eps_formula": specfact2d.n_epsilon(t, args.eps, b),
        }
        if reached is None:
            raise BudgetExhausted(f"error did not reach {args.eps:g} for N <= {rows[-1]['N']}", payload)
    _emit(args, payload, rows, ["N", "error", "error_upper", "bound"])


def cmd_bohr(args) -> None:
    strip = _load_strip(args)
    js = range(args.j_min, args.j_max + 1)
    pts = lattice.f2_enumerate(strip, js)
    f1 = lattice.f1_enumerate(strip, js)
    payload = {"strip": strip.to_json_obj(), "j_range": [args.j_min, args.j_max],
               "F2": [list(p) for p in pts], "F1": f1}
    table = [{"j": j, "k": k, "in_F1": k == lattice.theta(strip.alpha, j)} for j, k in pts]
    _emit(args, payload, table, ["j", "k", "in_F1"])


def cmd_reduce(args) -> None:
    g = lattice.rational_reduce(args.c, args.d)
    payload = {"c": args.c, "d": args.d, "alpha": [-args.c, args.d], "g": g.rows(),
               "g_inverse": g.inverse().rows()}
    if args.beta is not None:
        strip = lattice.Strip(lattice.Slope.from_cd(args.c, args.d), args.beta)
        payload["strip"] = strip.to_json_obj()
        payload["transformed_strip"] = lattice.strip_transform(g, strip).to_json_obj()
    _emit(args, payload)


def _approx_obj(res: approx.ApproxResult) -> dict:
    obj = res.to_json_obj()
    obj["p"] = _poly_obj(res.p)
    return obj


def cmd_approx(args) -> None:
    t = _load_poly(args.input, 2)
    strip = _load_strip(args)
    eps = args.eps if args.eps is not None else 1e-6
    if args.irrational:
        if args.beta_tilde is None:
            raise InputError("--irrational needs --beta-tilde")
        out = approx.approx_irrational(t, float(strip.alpha), strip.beta, args.beta_tilde, eps,
                                       max_depth=args.max_depth)
        trials = [dict(tr.__dict__, J=_float(tr.J)) for tr in out.trials]
        if isinstance(out, approx.Insufficient):
            raise BudgetExhausted(f"insufficient: no convergent up to depth {args.max_depth} accepted",
                                  {"status": "insufficient", "trials": trials})
        payload = {"status": "accepted", "trials": trials, "approximation": _approx_obj(out.result)}
        cert = out.result.certificate
    else:
        if not strip.alpha.is_rational:
            raise InputError("a real slope needs --irrational")
        fr = strip.alpha.value
        pipe = approx.RationalPipeline(t, -fr.numerator, fr.denominator, strip.beta,
                                       N_max=args.n_max, M=args.grid)
        if args.N is not None:
            res, ok = pipe.result(args.N), True
            errors = [{"N": res.N, "error": res.measured_error, "error_g": res.error_g}]
        else:
            errors = []
            ok, res = False, None
            for N in approx.DEFAULT_N_SCHEDULE:
                if N > pipe.N_max:
                    break
                res = pipe.result(N)
                errors.append({"N": N, "error": res.measured_error, "error_g": res.error_g})
                if res.measured_error <= eps:
                    ok = True
                    break
        rep = approx.degree_report(res, pipe.g.d, 0.5, eps)
        payload = {"status": "ok" if ok else "eps not reached", "errors": errors,
                   "approximation": _approx_obj(res), "degree_report": rep.__dict__}
        if not ok:
            raise BudgetExhausted(f"error did not reach {eps:g}", payload)
        cert = res.certificate
    table = [{"j": e.j, "k": e.k, "distance": e.distance, "margin": e.margin} for e in cert]
    _emit(args, payload, table, ["j", "k", "distance", "margin"])


def cmd_fixture(args) -> None:
    rng = np.random.default_rng(args.seed)
    if args.dim == 1:
        t = fixtures.random_positive_1d(rng, args.n1)
    else:
        t = fixtures.random_positive_2d(rng, args.n1, args.n2)
    _emit(args, {"poly": _poly_obj(t)})


# parser -----------------------------------------------------------------------
def _positive(kind):
    def conv(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"{text} must be positive")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="polynomial JSON file ('-' for stdin)")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--oversample", type=_positive(float), default=4.0)
    common.add_argument("--guard-band", type=_positive(float), default=roots1d.GUARD_BAND)
    common.add_argument("--grid", type=_positive(int), default=None, help="grid / slice count")
    common.add_argument("--eps", type=_positive(float), default=None)
    common.add_argument("--max-depth", type=int, default=4)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--zero-tol", type=_positive(float), default=trigpoly.ZERO_TOL)
    common.add_argument("--method", choices=["roots", "fft", "both"], default="roots")

    parser = argparse.ArgumentParser(prog="bohrfact", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factor1d", parents=[common], help="factor a positive 1D polynomial")
    p.set_defaults(func=cmd_factor1d)

    p = sub.add_parser("factor2d", parents=[common], help="2D truncated factors and error table")
    p.add_argument("--n-max", type=int, default=24)
    p.set_defaults(func=cmd_factor2d)

    def strip_args(p):
        p.add_argument("--strip", help="strip JSON file")
        p.add_argument("--alpha", help="slope: p/q (exact) or a decimal")
        p.add_argument("--beta", type=_positive(float))

    p = sub.add_parser("bohr", parents=[common], help="enumerate a strip and its Bohr set")
    strip_args(p)
    p.add_argument("--j-min", type=int, default=-10)
    p.add_argument("--j-max", type=int, default=10)
    p.set_defaults(func=cmd_bohr)

    p = sub.add_parser("reduce", parents=[common], help="unimodular reduction of slope -c/d")
    p.add_argument("c", type=int)
    p.add_argument("d", type=int)
    p.add_argument("--beta", type=_positive(float))
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("approx", parents=[common], help="strip-supported square approximation")
    strip_args(p)
    p.add_argument("--N", type=int, default=None, help="fixed truncation (rational case)")
    p.add_argument("--n-max", type=int, default=64)
    p.add_argument("--irrational", action="store_true")
    p.add_argument("--beta-tilde", type=_positive(float))
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("fixture", parents=[common], help="seeded random positive polynomial")
    p.add_argument("--dim", type=int, choices=[1, 2], default=2)
    p.add_argument("--n1", type=int, default=4)
    p.add_argument("--n2", type=int, default=4)
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    old_tol = trigpoly.ZERO_TOL
    trigpoly.ZERO_TOL = args.zero_tol
    try:
        args.func(args)
        return EXIT_OK
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BudgetExhausted as exc:
        _emit(args, exc.payload)
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (NonConvergent, DepthExhausted, TailMassExceeded) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    finally:
        trigpoly.ZERO_TOL = old_tol


if __name__ == "__main__":
    sys.exit(main())
