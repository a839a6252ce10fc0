"""Command line front end.

    blaschke-crit solve --input req.json [--output rep.json] [--tol T] [--seed N]
    blaschke-crit equilibrium --zeta zeta.json [--anchor-index K --anchor-value X]
    blaschke-crit moments {nesterov,inverse,lower,upper,factorize} --input data.json
    blaschke-crit verify --input report.json

Documents are JSON; complex numbers are written as [re, im]. Exit codes:
0 ok, 1 numerical failure (diagnostics are still printed), 2 bad input.
"""
import argparse
import json
import math
import os
import sys

import numpy as np

from . import blaschke as bl
from . import moments as mo
from .equilibrium import (
    SolveOptions,
    energy,
    energy_gradient,
    extend_equilibrium,
    global_minimum_certificate,
    residues_r,
    solve_inner_equilibrium,
    weight_polynomial_P,
    weights_s,
)
from .errors import BlaschkeError, InputError, NumericalError
from .lame import StieltjesPair, lame_relative_residual, van_vleck
from .realpoly import aberth_roots, poly_from_roots
from .transforms import CriticalPointSet, critical_points_from_halfplane, lift_critical_points

EXIT_OK, EXIT_NUMERICAL, EXIT_INPUT = 0, 1, 2

DEFAULTS = {"tol": 1e-8, "seed": 0, "max_iter": 200}
_ENV = {"tol": ("BLASCHKE_TOL", float), "seed": ("BLASCHKE_SEED", int),
        "max_iter": ("BLASCHKE_MAX_ITER", int)}

N_BOUNDARY = 256


class BadInput(InputError):
    """Malformed document or request."""


def resolve_config(flags, request=None, environ=None):
    """flags > request > BLASCHKE_* environment > defaults."""
    environ = os.environ if environ is None else environ
    request = request or {}
    out = dict(DEFAULTS)
    for key, (var, conv) in _ENV.items():
        if var in environ:
            try:
                out[key] = conv(environ[var])
            except ValueError:
                raise BadInput(f"{var}={environ[var]!r} is not a valid {conv.__name__}")
    tolerances = request.get("tolerances") or {}
    if not isinstance(tolerances, dict):
        raise BadInput("'tolerances' must be an object")
    for key in ("tol", "max_iter"):
        if key in tolerances:
            out[key] = tolerances[key]
    if "seed" in request:
        out["seed"] = request["seed"]
    for key in out:
        if flags.get(key) is not None:
            out[key] = flags[key]
    if not (isinstance(out["tol"], (int, float)) and out["tol"] > 0):
        raise BadInput("tol must be a positive number")
    for key in ("seed", "max_iter"):
        if not isinstance(out[key], int) or isinstance(out[key], bool):
            raise BadInput(f"{key} must be an integer")
    return out


# ---- JSON helpers ----------------------------------------------------------

def _clean(v):
    """Plain Python value for json; -0.0 is written as 0.0."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_clean(x) for x in v.tolist()]
    if isinstance(v, (complex, np.complexfloating)):
        return [_clean(float(v.real)), _clean(float(v.imag))]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return None
        return v + 0.0
    return v


def dumps(doc):
    return json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"


def parse_complex(v, what="value"):
    if isinstance(v, bool):
        raise BadInput(f"{what}: expected a number or [re, im], got {v!r}")
    if isinstance(v, (int, float)):
        return complex(float(v), 0.0)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
    ):
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return parse_complex([v["re"], v["im"]], what)
    raise BadInput(f"{what}: expected a number or [re, im], got {v!r}")


def parse_complex_list(v, what):
    if not isinstance(v, list) or not v:
        raise BadInput(f"{what}: expected a nonempty list")
    out = [parse_complex(x, f"{what}[{k}]") for k, x in enumerate(v)]
    if not all(math.isfinite(z.real) and math.isfinite(z.imag) for z in out):
        raise BadInput(f"{what}: non-finite entry")
    return out


def parse_real_list(v, what):
    if not isinstance(v, list) or not v or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
    ):
        raise BadInput(f"{what}: expected a nonempty list of reals")
    arr = np.array(v, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise BadInput(f"{what}: non-finite entry")
    return arr


def parse_real(v, what):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise BadInput(f"{what}: expected a finite real, got {v!r}")
    return float(v)


def load_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise BadInput(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise BadInput(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})")


def parse_normalization(v):
    if v is None or v == "plus":
        return bl.AnchorPlus()
    if isinstance(v, dict) and set(v) == {"minus"}:
        return bl.AnchorMinus(parse_real(v["minus"], "normalization.minus"))
    raise BadInput(f"normalization must be \"plus\" or {{\"minus\": x}}, got {v!r}")


# ---- solve -----------------------------------------------------------------

def _boundary_samples(B, n_samples=N_BOUNDARY):
    tau = 2 * np.pi * np.arange(n_samples) / n_samples
    values = B(np.exp(1j * tau))
    return tau, np.unwrap(np.angle(values)), float(np.max(np.abs(np.abs(values) - 1.0)))


def solve_report(request, cfg):
    """Run the pipeline for a parsed request; returns (report, exit_code)."""
    if not isinstance(request, dict):
        raise BadInput("request must be a JSON object")
    unknown = set(request) - {"critical_points", "normalization", "tolerances", "seed"}
    if unknown:
        raise BadInput(f"unknown request fields: {sorted(unknown)}")
    xs = parse_complex_list(request.get("critical_points"), "critical_points")
    norm = parse_normalization(request.get("normalization"))
    cps = lift_critical_points(xs)
    sol = bl.solve_pipeline(cps, norm, SolveOptions(max_iter=cfg["max_iter"]))
    B = sol.blaschke
    recovered = bl.critical_points_of_blaschke(B)
    roundtrip = bl.hausdorff_distance(cps.xi, recovered)

    P = sol.P
    S = poly_from_roots(sol.inner.t)
    report = {"status": "ok", "degree": B.degree,
              "critical_points": cps.xi, "recovered_critical_points": recovered,
              "blaschke_zeros": B.zeros, "constant": B.constant,
              "numerator": B.numerator, "denominator": B.denominator}
    if isinstance(norm, bl.AnchorMinus):
        Q = poly_from_roots(sol.outer.x)
        report["normalization"] = {"minus": norm.anchor_x}
        report["halfplane"] = {"x": sol.outer.x, "r": sol.r,
                               "anchor_index": sol.outer.anchor_index}
        R = van_vleck(Q, S).R
        ode = max(lame_relative_residual(P, R, Q), lame_relative_residual(P, R, S))
        charges = {"t": sol.inner.t, "x": sol.outer.x}
    else:
        report["normalization"] = "plus"
        report["halfplane"] = {"t": sol.inner.t, "s": sol.form.residues,
                               "a": sol.form.affine_a, "b": sol.form.affine_b}
        # Q from the anchor below t_1 completes the Stieltjes pair for R
        x0 = sol.inner.t[0] - 1.0 if len(sol.inner.t) else -1.0
        outer = extend_equilibrium(sol.inner, cps, 1, x0)
        Q = poly_from_roots(outer.x)
        R = van_vleck(Q, S).R
        ode = max(lame_relative_residual(P, R, Q), lame_relative_residual(P, R, S))
        charges = {"t": sol.inner.t}
    charges["zeta"] = cps.zeta
    tau, arg, modulus_err = _boundary_samples(B)
    report["van_vleck_R"] = R.coeffs
    report["weight_polynomial_P"] = P.coeffs
    report["diagnostics"] = {
        "grad_residual": sol.inner.grad_residual,
        "ode_residual": ode,
        "roundtrip_error": roundtrip,
        "boundary_modulus_error": modulus_err,
        "iterations": sol.inner.iterations,
        "energy_certificate_gap": _certificate_gap(sol.inner.t, cps, cfg["seed"]),
    }
    report["boundary_samples"] = {"tau": tau, "arg_B": arg, "charges": charges}
    report["config"] = {"tol": cfg["tol"], "seed": cfg["seed"], "max_iter": cfg["max_iter"]}
    failed = [k for k, lim in (("roundtrip_error", cfg["tol"]), ("ode_residual", 1e-9),
                               ("boundary_modulus_error", 1e-10))
              if not report["diagnostics"][k] <= lim]
    gap = report["diagnostics"]["energy_certificate_gap"]
    if gap < -1e-12 * (1.0 + abs(energy(sol.inner.t, cps))):
        failed.append("energy_certificate_gap")
    if failed:
        report["status"] = "failed"
        report["failed_checks"] = failed
        return report, EXIT_NUMERICAL
    return report, EXIT_OK


def _certificate_gap(t, cps, seed):
    """min over perturbations of W(perturbed) - W(t); negative means not a minimum."""
    if len(t) == 0:
        return 0.0
    gap = float(global_minimum_certificate(t, cps, n_samples=100, seed=seed))
    return gap if np.isfinite(gap) else 0.0


# ---- equilibrium -----------------------------------------------------------

def equilibrium_report(doc, anchor_index, anchor_value, cfg):
    if isinstance(doc, dict):
        if "zeta" not in doc:
            raise BadInput("expected a list of half-plane points or {\"zeta\": [...]}")
        doc = doc["zeta"]
    zetas = parse_complex_list(doc, "zeta")
    cps = critical_points_from_halfplane(zetas)
    inner = solve_inner_equilibrium(cps, SolveOptions(max_iter=cfg["max_iter"]))
    P = weight_polynomial_P(cps)
    t = inner.t
    out = {"t": t, "s": weights_s(inner, P, 1.0), "a": 1.0, "b": 0.0,
           "energy": energy(t, cps) if len(t) else 0.0,
           "grad_residual": float(np.max(np.abs(energy_gradient(t, cps)), initial=0.0)),
           "iterations": inner.iterations, "status": "ok"}
    if (anchor_index is None) != (anchor_value is None):
        raise BadInput("--anchor-index and --anchor-value go together")
    if anchor_index is not None:
        outer = extend_equilibrium(inner, cps, anchor_index, anchor_value)
        out["x"] = outer.x
        out["r"] = residues_r(outer, P, 1.0)
        out["anchor_index"] = anchor_index
    return out, EXIT_OK


# ---- moments ---------------------------------------------------------------

def _moment_vector(doc):
    if not isinstance(doc, dict) or "c" not in doc:
        raise BadInput("expected {\"c\": [...]}")
    c = parse_real_list(doc["c"], "c")
    if len(c) % 2 != 1:
        raise BadInput("c must have odd length 2n - 1")
    return mo.MomentVector(c)


def _anchor(doc):
    if "anchor" not in doc:
        raise BadInput("missing 'anchor'")
    return parse_real(doc["anchor"], "anchor")


def moments_report(sub, doc):
    if sub == "nesterov":
        return {"p": mo.nesterov(_moment_vector(doc)).coeffs}
    if sub == "inverse":
        if not isinstance(doc, dict):
            raise BadInput("expected an object")
        if "zeta" in doc:
            cps = critical_points_from_halfplane(parse_complex_list(doc["zeta"], "zeta"))
        elif "critical_points" in doc:
            cps = lift_critical_points(parse_complex_list(doc["critical_points"], "critical_points"))
        else:
            raise BadInput("expected 'zeta' or 'critical_points'")
        leading = parse_real(doc.get("leading", 1.0), "leading")
        if leading <= 0:
            raise BadInput("leading must be positive")
        return {"c": mo.inverse_nesterov(cps, leading).c}
    if sub == "lower":
        rep = mo.canonical_lower(_moment_vector(doc))
        return {"t": rep.roots, "sigma": rep.weights, "lambda": rep.mass_at_infinity}
    if sub == "upper":
        c = _moment_vector(doc)
        rep = mo.canonical_upper(c, _anchor(doc))
        return {"x": rep.roots, "rho": rep.weights}
    if sub == "factorize":
        c = _moment_vector(doc)
        rep = mo.canonical_upper(c, _anchor(doc))
        return {"x": rep.roots, "rho": rep.weights,
                "deviation": mo.vandermonde_factorization_check(c, rep)}
    raise BadInput(f"unknown moments subcommand {sub!r}")


# ---- verify ----------------------------------------------------------------

def _blaschke_from_doc(doc):
    if "blaschke_zeros" in doc:
        zeros = parse_complex_list(doc["blaschke_zeros"], "blaschke_zeros")
        const = parse_complex(doc.get("constant", 1.0), "constant")
        return bl.BlaschkeProduct(np.array(zeros), const)
    if "numerator" in doc:
        num = np.array(parse_complex_list(doc["numerator"], "numerator"))
        if abs(num[-1]) == 0:
            raise BadInput("numerator has a zero leading coefficient")
        return bl.BlaschkeProduct(aberth_roots(num), num[-1])
    raise BadInput("expected 'blaschke_zeros' or 'numerator'")


def verify_report(doc, cfg):
    if not isinstance(doc, dict):
        raise BadInput("expected a JSON object")
    if "critical_points" not in doc:
        raise BadInput("missing 'critical_points'")
    claimed = np.array(parse_complex_list(doc["critical_points"], "critical_points"))
    B = _blaschke_from_doc(doc)
    if abs(abs(B.constant) - 1.0) > 1e-12:
        raise BadInput("constant is not unimodular")
    diag = {}
    if len(claimed) != B.degree - 1:
        diag["roundtrip_error"] = None
        failed = ["critical_point_count"]
    else:
        recovered = bl.critical_points_of_blaschke(B)
        diag["roundtrip_error"] = bl.hausdorff_distance(claimed, recovered)
        failed = [] if diag["roundtrip_error"] <= cfg["tol"] else ["roundtrip_error"]
    _, _, diag["boundary_modulus_error"] = _boundary_samples(B)
    if diag["boundary_modulus_error"] > 1e-10:
        failed.append("boundary_modulus_error")
    if "halfplane" in doc and len(claimed) == B.degree - 1:
        diag.update(_identity_residuals(doc["halfplane"], lift_critical_points(claimed)))
        failed += [k for k in ("ode_residual", "grad_residual") if k in diag and not diag[k] <= 1e-9]
    status = "ok" if not failed else "failed"
    out = {"status": status, "diagnostics": diag}
    if failed:
        out["failed_checks"] = failed
    return out, EXIT_OK if not failed else EXIT_NUMERICAL


def _identity_residuals(hp, cps: CriticalPointSet):
    if not isinstance(hp, dict):
        raise BadInput("'halfplane' must be an object")
    P = weight_polynomial_P(cps)
    out = {}
    if "t" in hp:
        t = parse_real_list(hp["t"], "halfplane.t") if hp["t"] else np.zeros(0)
        if len(t):
            out["grad_residual"] = float(np.max(np.abs(energy_gradient(t, cps))))
    if "x" in hp:
        x = parse_real_list(hp["x"], "halfplane.x")
        inner = solve_inner_equilibrium(cps)
        pair = StieltjesPair.from_charges(x, inner)
        R = van_vleck(pair.Q, pair.S).R
        out["ode_residual"] = max(lame_relative_residual(P, R, pair.Q),
                                  lame_relative_residual(P, R, pair.S))
    return out


# ---- entry point -----------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="blaschke-crit",
                                     description="Blaschke products with prescribed critical points.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="construct B from its critical points")
    p.add_argument("--input", required=True, help="request JSON ('-' for stdin)")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--tol", type=float, help="round-trip tolerance")
    p.add_argument("--seed", type=int, help="seed for randomized checks")
    p.add_argument("--max-iter", type=int, dest="max_iter", help="Newton iteration cap")

    p = sub.add_parser("equilibrium", help="charge equilibrium for half-plane points")
    p.add_argument("--zeta", required=True, help="JSON list of points in the upper half-plane")
    p.add_argument("--anchor-index", type=int, help="1-based index k0 of the anchored charge")
    p.add_argument("--anchor-value", type=float, help="position of the anchored charge")
    p.add_argument("--max-iter", type=int, dest="max_iter")
    p.add_argument("--output")

    p = sub.add_parser("moments", help="moment-cone operations")
    p.add_argument("operation", choices=["nesterov", "inverse", "lower", "upper", "factorize"])
    p.add_argument("--input", required=True)
    p.add_argument("--output")

    p = sub.add_parser("verify", help="re-check a report or a Blaschke product")
    p.add_argument("--input", required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--output")
    return parser


def _emit(doc, path):
    text = dumps(doc)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(args):
    flags = {k: getattr(args, k, None) for k in ("tol", "seed", "max_iter")}
    if args.command == "solve":
        request = load_json(args.input)
        cfg = resolve_config(flags, request if isinstance(request, dict) else None)
        return solve_report(request, cfg)
    cfg = resolve_config(flags)
    if args.command == "equilibrium":
        return equilibrium_report(load_json(args.zeta), args.anchor_index, args.anchor_value, cfg)
    if args.command == "moments":
        out = moments_report(args.operation, load_json(args.input))
        out["status"] = "ok"
        return out, EXIT_OK
    return verify_report(load_json(args.input), cfg)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        doc, code = run(args)
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        doc = {"status": "failed", "error": type(exc).__name__, "message": str(exc)}
        _emit(doc, getattr(args, "output", None))
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BlaschkeError as exc:  # pragma: no cover - every error is one of the two kinds
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(doc, getattr(args, "output", None))
    return code


if __name__ == "__main__":
    sys.exit(main())
