"""``heisqc`` command line: moduli, map sampling, verification suites and lifts.

The JSON report goes to stdout, diagnostics to stderr, samples to CSV files.
Exit codes: 0 ok, 1 failed checks, 2 bad input, 3 numeric failure,
4 bad moduli, 5 no lift exists, 6 lift not unique.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import curves, modulus, qcmaps
from .domains import ChartImage, Cylinder, Density, PlaneImage, PlaneRectangle, SphericalAnnulus
from .errors import (BadModuli, HeisQCError, NoSolution, NonUnique, UnknownFamily,
                     UnknownName)
from .holomorphic import builtin_biholomorphism
from .lift_builder import LiftProblem, solve_lift, verify_commutation

log = logging.getLogger("heisqc")

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_NUMERIC, EXIT_MODULI, EXIT_NOSOL, EXIT_NONUNIQUE = range(7)


class SchemaError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, rows, delimiter=",", header=",".join(header), comments="", fmt="%.12g")
    log.info("wrote %s (%d rows)", path, len(rows))
    return str(path)


def _random_interior(rng, n, source):
    """Random points well inside a cylinder or spherical annulus."""
    if isinstance(source, Cylinder):
        r = np.sqrt(source.b * rng.uniform(0.02, 0.98, n))
        t = source.a * rng.uniform(0.02, 0.98, n)
    elif isinstance(source, SphericalAnnulus):
        lo, hi = 2 * np.log(source.r_lo), 2 * np.log(source.r_hi)
        s = lo + (hi - lo) * rng.uniform(0.02, 0.98, n)
        x = np.pi * rng.uniform(0.02, 0.98, n)
        w = np.exp(s + 1j * x)
        r, t = np.sqrt(w.imag), w.real
    elif isinstance(source, ChartImage):
        zeta = source.a * rng.uniform(0.02, 0.98, n) + 1j * source.b * rng.uniform(0.02, 0.98, n)
        w = source.phi.eval(zeta)
        r, t = np.sqrt(w.imag), w.real
    else:
        raise SchemaError(f"cannot sample {type(source).__name__}")
    return r * np.exp(1j * rng.uniform(0, 2 * np.pi, n)), t


# -- modulus ---------------------------------------------------------------

def _family_foliation(family, p):
    if family == "cylinder_horizontal":
        return curves.foliation_gamma0(p["a"], p["b"])
    if family == "rectangle_horizontal":
        return curves.foliation_plane_horizontal(p["a"], p["b"])
    if family == "cylinder_vertical":
        return curves.foliation_vertical(p["a"], p["b"])
    return curves.foliation_from_biholomorphism(builtin_biholomorphism("exp"), 2 * np.log(p["a"]), np.pi)


def cmd_modulus(args):
    params = {"a": args.a} if args.family == "annulus_radial" else {"a": args.a, "b": args.b}
    if any(v is None for v in params.values()):
        raise SchemaError(f"{args.family} needs --a" + ("" if len(params) == 1 else " and --b"))
    closed, rho = modulus.closed_form_modulus(args.family, params)
    plane = rho.kind == "plane"
    grid = (args.grid,) * (2 if plane else 3)
    energy = modulus.density_energy(rho, grid)
    rep = modulus.admissibility_min(rho, _family_foliation(args.family, params), args.n_lambda,
                                    args.n_s, args.tol_adm, energy_grid=False)
    rel = abs(energy - closed) / closed
    return {
        "family": args.family,
        "params": params,
        "closed_form": closed,
        "energy": energy,
        "energy_rel_discrepancy": rel,
        "min_curve_integral": rep.min_curve_integral,
        "admissibility_discrepancy": abs(rep.min_curve_integral - 1.0),
        "argmin": list(rep.argmin),
        "admissible": rep.admissible,
        "tolerances": {"energy_rel": args.tol_energy, "adm": args.tol_adm},
        "pass": bool(rel <= args.tol_energy and rep.admissible),
    }


# -- map -------------------------------------------------------------------

def _build_map(args):
    """Map, its source density and the reference value of the mean distortion."""
    if args.map == "cylinder":
        f = qcmaps.cylinder_extremal_map(args.a, args.b, args.ap, args.bp, args.alpha)
        rho = Density(lambda z, t: 2 * np.abs(z) / args.a, Cylinder(args.a, args.b))
        ref = 16 * np.pi * args.bp ** 3 / (3 * args.ap ** 3)
        return f, rho, ref
    if args.map == "annuli":
        f = qcmaps.spherical_annuli_map(args.a, args.k)
        _, rho = modulus.closed_form_modulus("annulus_radial", (args.a,))
        ref = np.pi ** 2 / (args.k * np.log(args.a)) ** 3
        return f, rho, ref
    if args.map == "identity":
        f = qcmaps.identity_map(Cylinder(args.a, args.b))
        rho = Density(lambda z, t: 2 * np.abs(z) / args.a, Cylinder(args.a, args.b))
        return f, rho, 16 * np.pi * args.b ** 3 / (3 * args.a ** 3)
    raise SchemaError(f"unknown map {args.map!r}")


def _sample_grid(source, n):
    """Regular grid over the source including the side walls."""
    th = np.linspace(0, 2 * np.pi, n, endpoint=False)
    if isinstance(source, Cylinder):
        r = np.sqrt(source.b) * np.linspace(0, 1, n)
        t = source.a * (np.arange(n) + 0.5) / n
        R, T, TH = np.meshgrid(r, t, th, indexing="ij")
        return (R * np.exp(1j * TH)).ravel(), T.ravel()
    lo, hi = 2 * np.log(source.r_lo), 2 * np.log(source.r_hi)
    s = np.linspace(lo, hi, n)
    x = np.pi * (np.arange(n) + 0.5) / n
    S, X, TH = np.meshgrid(s, x, th, indexing="ij")
    w = np.exp(S + 1j * X)
    return (np.sqrt(w.imag) * np.exp(1j * TH)).ravel(), w.real.ravel()


def cmd_map(args):
    if args.map == "lift":
        if not args.config:
            raise SchemaError("map lift needs --config")
        result = _run_lift_pipeline(args)
        return result
    _require(args, ("a",) + {"cylinder": ("b", "ap", "bp"), "annuli": ("k",),
                              "identity": ("b",)}[args.map])
    f, rho, ref = _build_map(args)
    z, t = _sample_grid(f.source, args.n)
    rows = qcmaps.sample_map(f, z, t)
    out = {"map": args.map, "n_samples": int(len(rows)), "K_max": float(np.max(rows[:, 6])),
           "K_min": float(np.min(rows[:, 6]))}
    md = qcmaps.mean_distortion(f, rho, (args.grid,) * 3)
    out["mean_distortion"] = md
    out["mean_distortion_reference"] = ref
    if args.map == "cylinder":
        out["K_closed_form"] = (args.a * args.bp / (args.ap * args.b)) ** 2
    if args.map == "annuli":
        norm_res = np.abs(np.hypot(np.abs(rows[:, 3] + 1j * rows[:, 4]) ** 2, rows[:, 5]) ** 0.5
                          - np.hypot(np.abs(z) ** 2, t) ** (0.5 * args.k))
        out["norm_power_residual"] = float(np.max(norm_res))
    if args.csv:
        out["csv"] = _write_csv(args.csv, ["re_z", "im_z", "t", "re_f1", "im_f1", "f2", "K"], rows)
    return out


def _require(args, names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise SchemaError("missing flag(s): " + ", ".join("--" + n for n in missing))


# -- verify ----------------------------------------------------------------

def _plane_pair(args, f):
    """Plane density and plane map whose lifts are the density and ``f``."""
    if args.map == "cylinder":
        a, b, ap, bp = args.a, args.b, args.ap, args.bp
        # varphi(y) = b' y / ((1 - ab'/(a'b)) y + ab'/a')
        prof = lambda y: bp * y / ((1 - a * bp / (ap * b)) * y + a * bp / ap)  # noqa: E731
        dprof = lambda y: bp * (a * bp / ap) / ((1 - a * bp / (ap * b)) * y + a * bp / ap) ** 2  # noqa: E731
        g = qcmaps.plane_minimizer_gphi(a, b, ap, bp, prof, dprof)
        rho = Density(lambda w: np.full(np.shape(w), 1.0 / a), PlaneRectangle(a, b), kind="plane")
        return rho, g
    if args.map == "annuli":
        a, k = args.a, args.k
        la = np.log(a)

        def g(w):
            # e^{s + ix} -> e^{ks + i arccot(cot(x) / k)}
            s, x = np.log(np.abs(w)), np.angle(w)
            return np.exp(k * s + 1j * np.arctan2(k * np.sin(x), np.cos(x)))

        rho = Density(lambda w: 1.0 / (2 * la * np.abs(w)),
                      PlaneImage(builtin_biholomorphism("exp"), 2 * la, np.pi), kind="plane")
        return rho, qcmaps.PlaneMap(g, name="annuli_plane")
    rho = Density(lambda w: np.full(np.shape(w), 1.0 / args.a), PlaneRectangle(args.a, args.b),
                  kind="plane")
    return rho, qcmaps.PlaneMap(lambda w: w, lambda w: np.ones_like(w), lambda w: np.zeros_like(w),
                                "identity")


def cmd_verify(args):
    need = {"cylinder": ("a", "b", "ap", "bp"), "annuli": ("a", "k"), "identity": ("a", "b")}
    if args.map not in need:
        raise SchemaError(f"unknown map {args.map!r}")
    _require(args, need[args.map])
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    known = {"contact", "pushforward", "meandist", "commutation"}
    bad = [c for c in checks if c not in known]
    if bad:
        raise SchemaError(f"unknown check(s) {bad}; known: {sorted(known)}")
    f, rho, ref = _build_map(args)
    rng = np.random.default_rng(args.seed)
    z, t = _random_interior(rng, args.n, f.source)
    results = {}
    tol_contact = args.tol_contact if args.tol_contact is not None else (
        1e-9 if args.map == "identity" else 1e-5)
    for check in checks:
        if check == "contact":
            r = float(np.max(qcmaps.contact_residual_arr(f, z, t)))
            results[check] = {"residual": r, "tol": tol_contact, "pass": r <= tol_contact}
        elif check == "pushforward":
            # energy of f_* rho, transported to the source, against the reference
            e = modulus.pushforward_energy(rho, f, (args.grid,) * 3)
            rel = abs(e - ref) / ref
            entry = {"energy": e, "reference": ref, "rel_residual": rel, "tol": args.tol_integral,
                     "pass": rel <= args.tol_integral}
            if args.map in ("cylinder", "identity"):
                # pointwise: f_* rho at f(p) is 2|f1(p)|/a'
                ap = args.ap if args.map == "cylinder" else args.a
                f1, _, val = modulus.push_forward_arr(rho, f, z, t)
                pw = float(np.max(np.abs(val - 2 * np.abs(f1) / ap)))
                entry.update(pointwise_residual=pw, pass_pointwise=pw <= 1e-6)
                entry["pass"] = entry["pass"] and pw <= 1e-6
            results[check] = entry
        elif check == "meandist":
            md = qcmaps.mean_distortion(f, rho, (args.grid,) * 3)
            rel = abs(md - ref) / ref
            results[check] = {"mean_distortion": md, "reference": ref, "rel_residual": rel,
                              "tol": args.tol_integral, "pass": rel <= args.tol_integral}
        elif check == "commutation":
            prho, g = _plane_pair(args, f)
            r = modulus.commutation_residual(prho, g, f, z, t)
            f1, f2 = f(z, t)
            shadow = float(np.max(np.abs(f2 + 1j * np.abs(f1) ** 2 - g(t + 1j * np.abs(z) ** 2))))
            results[check] = {"density_residual": r, "shadow_residual": shadow,
                              "tol": args.tol_commutation,
                              "pass": r <= args.tol_commutation and shadow <= args.tol_commutation}
    ok = all(v["pass"] for v in results.values())
    for name, v in results.items():
        if not v["pass"]:
            print(f"check {name} failed: {json.dumps(_jsonable(v))}", file=sys.stderr)
    return {"map": args.map, "checks": results, "pass": ok}


# -- lift ------------------------------------------------------------------

def _run_lift_pipeline(args):
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
        prob = LiftProblem.from_dict(cfg)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad lift config {args.config}: {exc}") from exc
    result = solve_lift(prob, alpha=args.alpha, grid=(args.grid_h, args.grid_h))
    f, profile, hpot = result.map, result.profile, result.potential
    rng = np.random.default_rng(args.seed)
    z, t = _random_interior(rng, args.n, f.source)
    comm = verify_commutation(f, prob, profile, z, t)
    contact = float(np.max(qcmaps.contact_residual_arr(f, z, t)))
    out = {
        "problem": {"a": prob.a, "b": prob.b, "a_p": prob.a_p, "b_p": prob.b_p,
                    "phi": prob.phi.name, "psi": prob.psi.name},
        "anchor": profile.anchor,
        "boundary_mismatch": profile.boundary_mismatch,
        "slope_margin": profile.slope_margin,
        "mixed_residual": hpot.mixed_residual,
        "commutation_residual": comm,
        "contact_residual": contact,
        "tolerances": {"tol_bvp": prob.ode.tol_bvp, "tol_slope": prob.ode.tol_slope,
                       "tol_contact": 1e-5, "tol_commutation": 1e-6},
        "pass": bool(contact <= 1e-5 and comm <= 1e-6),
    }
    if args.out_dir:
        d = Path(args.out_dir)
        out["csv"] = {
            "profile": _write_csv(d / "profile.csv", ["x", "varphi", "slope"], profile.rows()),
            "potential": _write_csv(d / "potential.csv", ["s", "x", "h"], hpot.rows()),
            "map": _write_csv(d / "map.csv", ["re_z", "im_z", "t", "re_f1", "im_f1", "f2", "K"],
                              qcmaps.sample_map(f, z, t)),
        }
    return out


def cmd_lift(args):
    return _run_lift_pipeline(args)


# -- driver ----------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="heisqc", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("modulus", help="closed-form modulus vs. integrated energy")
    m.add_argument("--family", required=True, choices=modulus.FAMILY_IDS)
    m.add_argument("--a", type=float)
    m.add_argument("--b", type=float)
    m.add_argument("--grid", type=int, default=64)
    m.add_argument("--n-lambda", type=int, default=16)
    m.add_argument("--n-s", type=int, default=256)
    m.add_argument("--tol-adm", type=float, default=modulus.TOL_ADM)
    m.add_argument("--tol-energy", type=float, default=1e-3)
    m.set_defaults(func=cmd_modulus)

    def map_flags(q):
        q.add_argument("--a", type=float)
        q.add_argument("--b", type=float)
        q.add_argument("--ap", type=float)
        q.add_argument("--bp", type=float)
        q.add_argument("--k", type=float)
        q.add_argument("--alpha", type=float, default=0.0)
        q.add_argument("--grid", type=int, default=64, help="quadrature nodes per axis")
        q.add_argument("--seed", type=int, default=0)

    mp = sub.add_parser("map", help="sample a map, report K and mean distortion")
    mp.add_argument("map", choices=("cylinder", "annuli", "identity", "lift"))
    map_flags(mp)
    mp.add_argument("--n", type=int, default=16, help="samples per axis")
    mp.add_argument("--csv", help="write samples to this CSV file")
    mp.add_argument("--config", help="lift problem JSON (map lift)")
    mp.add_argument("--out-dir", help="directory for lift CSV files (map lift)")
    mp.add_argument("--grid-h", type=int, default=128)
    mp.set_defaults(func=cmd_map)

    v = sub.add_parser("verify", help="run a check suite on a map")
    v.add_argument("--map", required=True, choices=("cylinder", "annuli", "identity"))
    v.add_argument("--checks", default="contact")
    map_flags(v)
    v.add_argument("--n", type=int, default=1000, help="random interior samples")
    v.add_argument("--tol-contact", type=float)
    v.add_argument("--tol-integral", type=float, default=1e-3)
    v.add_argument("--tol-commutation", type=float, default=1e-6)
    v.set_defaults(func=cmd_verify)

    li = sub.add_parser("lift", help="solve a lift problem from a JSON config")
    li.add_argument("config")
    li.add_argument("--alpha", type=float, default=0.0)
    li.add_argument("--out-dir", help="directory for profile/potential/map CSV files")
    li.add_argument("--n", type=int, default=200, help="random samples for the checks")
    li.add_argument("--grid-h", type=int, default=128)
    li.add_argument("--seed", type=int, default=0)
    li.set_defaults(func=cmd_lift)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        report = args.func(args)
        if report.get("pass") is False and args.command == "verify":
            code = EXIT_FAIL
    except (SchemaError, UnknownFamily, UnknownName) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except BadModuli as exc:
        print(f"bad moduli: {exc}", file=sys.stderr)
        return EXIT_MODULI
    except NoSolution as exc:
        mismatch = getattr(exc, "mismatch", None)
        print(f"no solution: {exc} (boundary mismatch {mismatch})", file=sys.stderr)
        return EXIT_NOSOL
    except NonUnique as exc:
        print(f"not unique: {exc}", file=sys.stderr)
        return EXIT_NONUNIQUE
    except (HeisQCError, FloatingPointError, ArithmeticError) as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    report = {"command": args.command, **report, "wall_time": time.perf_counter() - t0}
    print(json.dumps(_jsonable(report), sort_keys=True, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
