"""Command line front end.

Subcommands: construct (build the body and emit certificate + data
files), verify (recompute a certificate's checks from its parameters),
intersection-test, planar, plot.  Exit codes: 0 success, 2 invalid
input, 3 construction or check failure, 4 certificate verification
failure.  All files are written atomically (temp file + rename) so a
crash never leaves a half-written certificate.
"""

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from typing import Optional

import numpy as np

from .config import RunConfig
from . import counterexample as cx
from .planar import (PlanarBody, bisected_chords, planar_centroid,
                     polygon_body, radial_body, recenter)
from .revolution_bodies import (body_to_dict, intersection_body_test,
                                make_base_body)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONSTRUCT = 3
EXIT_VERIFY = 4

ENV_OUTDIR = "CENTROID_SECTIONS_OUTDIR"


def _outdir(args) -> str:
    out = getattr(args, "outdir", None) or os.environ.get(ENV_OUTDIR) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _write_atomic(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    for name in ("n", "a", "eps", "cap_margin", "quad_order", "max_degree",
                 "alpha_grid", "seed", "bump_max_degree",
                 "section_quad_order", "curvature_grid"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# construct

def _profiles_rows(ctx, lam0: float, eps0: float, grid: int):
    u = np.linspace(-1.0, 1.0, grid)
    rho_b = np.asarray(ctx.base.rho(u), dtype=float)
    phi = ctx._phi_direct(u, lam0)
    rho_k = (rho_b ** ctx.n + eps0 * phi) ** (1.0 / ctx.n)
    seed = np.asarray(ctx.seed_value(u, lam0), dtype=float)
    ghat = ctx.blend_ft_value(u, lam0, 0)
    return [(float(u[i]), float(rho_b[i]), float(phi[i]), float(rho_k[i]),
             float(seed[i]), float(ghat[i])) for i in range(grid)]


def _sections_rows(sweep):
    u = sweep["u_grid"]
    return [(float(u[i]), float(sweep["centroid_quadrature"][i]),
             float(sweep["centroid_analytic"][i]),
             float(sweep["rel_err"][i])) for i in range(len(u))]


def cmd_construct(args) -> int:
    out = _outdir(args)
    try:
        cfg = _config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        res = cx.run_construction(cfg)
    except cx.ConstructionError as exc:
        _write_atomic(os.path.join(out, "diagnostic.json"),
                      _json_text({"stage": "construction",
                                  "error": str(exc)}))
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCT
    cert = res["certificate"]
    ctx = res["context"]
    _write_atomic(os.path.join(out, "certificate.json"), _json_text(cert))
    _write_atomic(
        os.path.join(out, "profiles.csv"),
        _csv_text(["u", "rho_base", "perturbation", "rho_perturbed",
                   "blend", "blend_transform"],
                  _profiles_rows(ctx, cert["lambda0"], cert["eps0"],
                                 cfg.plot_grid)))
    _write_atomic(
        os.path.join(out, "sections.csv"),
        _csv_text(["u_xi", "centroid_quadrature", "centroid_analytic",
                   "rel_err"], _sections_rows(res["sweep"])))
    _write_atomic(os.path.join(out, "body.json"),
                  _json_text(body_to_dict(res["body"])))
    status = "valid" if cert["valid"] else "INVALID"
    print(f"certificate {status}: lambda0={cert['lambda0']:.9e} "
          f"eps0={cert['eps0']:.3e} "
          f"identity={cert['identity_max_relerr']:.3e} "
          f"margin={cert['min_section_margin']:.3e}")
    for name in cert["failures"]:
        print(f"  failed: {name}")
    return EXIT_OK if cert["valid"] else EXIT_CONSTRUCT


# ---------------------------------------------------------------------------
# verify

def _check(lines, name, ok, detail):
    lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return ok


def cmd_verify(args) -> int:
    try:
        with open(args.certificate) as fh:
            cert = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read certificate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cert.get("schema") != cx.CERTIFICATE_SCHEMA:
        print(f"error: unsupported certificate schema "
              f"{cert.get('schema')!r}", file=sys.stderr)
        return EXIT_USAGE
    cfg = RunConfig()
    stored = cert.get("config", {})
    for k, v in stored.items():
        if k == "tolerances":
            cfg.tolerances.update(v)
        elif hasattr(cfg, k):
            setattr(cfg, k, v)
    if args.alpha_grid is not None:
        cfg.alpha_grid = args.alpha_grid
    cfg.validate()
    p = cert["params"]
    params = cx.ConstructionParams(n=p["n"], a=p["a"], cap_u0=p["cap_u0"],
                                   cap_margin=p["cap_margin"], eps=p["eps"],
                                   lam=p["lambda"])
    ctx = cx.get_context(cfg, params)
    tol = cfg.tolerances
    lam0, eps0 = cert["lambda0"], cert["eps0"]
    lines = []
    ok = True

    c = ctx.centroid(lam0, eps0)
    ok &= _check(lines, "centroid_at_recorded_root",
                 c is not None and abs(c) <= tol["root_abs"],
                 f"|c| = {abs(c):.3e}" if c is not None else "positivity lost")

    root = ctx.find_root(eps0)
    ok &= _check(lines, "root_reproduces",
                 abs(root["lambda0"] - lam0) <= 1e-8,
                 f"recomputed lambda0 = {root['lambda0']:.9e}")

    km = ctx.kappa_min(lam0, eps0)
    ok &= _check(lines, "perturbed_convex", km > 0.0,
                 f"kappa_min = {km:.6f}")
    ok &= _check(lines, "kappa_matches_certificate",
                 abs(km - cert["kappa_min_perturbed"])
                 <= 1e-6 * max(1.0, abs(km)),
                 f"certificate kappa_min = {cert['kappa_min_perturbed']:.6f}")

    grid = np.linspace(-1.0, 1.0, 2 * (cfg.alpha_grid - 1) + 1)
    sweep = ctx.identity_sweep(lam0, eps0, grid)
    ok &= _check(lines, "identity_on_doubled_grid",
                 sweep["max_rel_err"] <= tol["identity_rel"],
                 f"max rel err = {sweep['max_rel_err']:.3e}")
    ok &= _check(lines, "margin_positive",
                 sweep["min_margin"] > 0.0
                 and cert["min_section_margin"] > 0.0,
                 f"recomputed margin = {sweep['min_margin']:.3e}, "
                 f"recorded = {cert['min_section_margin']:.3e}")
    ok &= _check(lines, "pole_sections_zero",
                 sweep["pole_abs"] <= tol["pole_section_abs"],
                 f"max |centroid| at poles = {sweep['pole_abs']:.3e}")

    eq = ctx.equator_ratio(lam0)
    ok &= _check(lines, "equator_within_tolerance",
                 eq <= tol["equator_rel"], f"ratio = {eq:.3e}")

    for line in lines:
        print(line)
    print("verification " + ("PASSED" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_VERIFY


# ---------------------------------------------------------------------------
# intersection test

def cmd_intersection_test(args) -> int:
    try:
        cfg = _config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    a = cfg.a if cfg.a is not None else cx.auto_select_a(cfg.n, cfg)
    body = make_base_body(cfg.n, a)
    res = intersection_body_test(body, grid=cfg.equator_grid,
                                 max_degree=cfg.max_degree,
                                 order=cfg.quad_order,
                                 rel_tol=cfg.tolerances["intersection_rel"])
    verdict = ("IS an intersection body" if res["is_intersection"]
               else "NOT an intersection body")
    print(f"base body n={cfg.n} a={a}: {verdict}; "
          f"transform min {res['min_value']:.6e} at u={res['argmin_u']:.4f}")
    out = getattr(args, "outdir", None) or os.environ.get(ENV_OUTDIR)
    if out:
        os.makedirs(out, exist_ok=True)
        payload = {"n": cfg.n, "a": a, **{k: res[k] for k in
                   ("min_value", "argmin_u", "is_intersection")}}
        _write_atomic(os.path.join(out, "intersection.json"),
                      _json_text(payload))
    return EXIT_OK


# ---------------------------------------------------------------------------
# planar

_DEMOS = {}


def _demo_triangle() -> PlanarBody:
    return polygon_body([(0.0, 0.0), (2.0, 0.0), (0.6, 1.5)])


def _demo_ellipse() -> PlanarBody:
    def rho(th):
        return 2.0 / np.sqrt(np.cos(th) ** 2 + 4 * np.sin(th) ** 2)
    return radial_body(rho)


def _demo_blob() -> PlanarBody:
    def rho(th):
        return 1.0 + 0.3 * np.cos(th) + 0.1 * np.sin(2 * th)
    return radial_body(rho)


_DEMOS.update(triangle=_demo_triangle, ellipse=_demo_ellipse,
              blob=_demo_blob)


def _planar_from_csv(path: str) -> PlanarBody:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError("empty CSV")
    header = [c.strip().lower() for c in rows[0]]
    data = np.array([[float(x) for x in r] for r in rows[1:]])
    if header[:2] == ["x", "y"]:
        return polygon_body(data[:, :2])
    if header[:2] == ["theta", "rho"]:
        th, r = data[:, 0], data[:, 1]
        order = np.argsort(th)
        th, r = th[order], r[order]
        # drop samples that already sit on the wrap point so the knot
        # sequence stays strictly increasing after closing the period
        keep = th < th[0] + 2 * np.pi - 1e-12
        th, r = th[keep], r[keep]
        from scipy.interpolate import CubicSpline
        spl = CubicSpline(np.append(th, th[0] + 2 * np.pi),
                          np.append(r, r[0]), bc_type="periodic")

        def rho(t):
            return spl(np.mod(t, 2 * np.pi))

        return radial_body(rho)
    raise ValueError("CSV must have header x,y or theta,rho")


def cmd_planar(args) -> int:
    try:
        if args.demo:
            body = _DEMOS[args.demo]()
        elif args.input:
            body = _planar_from_csv(args.input)
        else:
            print("error: provide --input CSV or --demo name",
                  file=sys.stderr)
            return EXIT_USAGE
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    res = bisected_chords(body, resolution=args.resolution,
                          theta_tol=args.theta_tol)
    if res["symmetric_all"]:
        payload = {"count": "symmetric_all", "directions": []}
        print("every chord through the centroid is bisected "
              "(centrally symmetric)")
    else:
        payload = {"count": res["count"],
                   "directions": [float(t) for t in res["directions"]]}
        dirs = ", ".join(f"{t:.6f}" for t in res["directions"])
        print(f"{res['count']} bisected chords through the centroid "
              f"at angles [{dirs}]")
    out = getattr(args, "outdir", None) or os.environ.get(ENV_OUTDIR)
    if out:
        os.makedirs(out, exist_ok=True)
        _write_atomic(os.path.join(out, "planar.json"), _json_text(payload))
    return EXIT_OK


# ---------------------------------------------------------------------------
# plot data

def cmd_plot(args) -> int:
    try:
        with open(args.certificate) as fh:
            cert = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read certificate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cfg = RunConfig()
    for k, v in cert.get("config", {}).items():
        if k == "tolerances":
            cfg.tolerances.update(v)
        elif hasattr(cfg, k):
            setattr(cfg, k, v)
    cfg.validate()
    p = cert["params"]
    params = cx.ConstructionParams(n=p["n"], a=p["a"], cap_u0=p["cap_u0"],
                                   cap_margin=p["cap_margin"], eps=p["eps"],
                                   lam=p["lambda"])
    ctx = cx.get_context(cfg, params)
    out = _outdir(args)
    lam0, eps0 = cert["lambda0"], cert["eps0"]
    u = np.linspace(-1.0, 1.0, cfg.plot_grid)
    rho_b = np.asarray(ctx.base.rho(u), dtype=float)
    rho_k = (rho_b ** ctx.n + eps0 * ctx._phi_direct(u, lam0)) ** (1.0 / ctx.n)
    _write_atomic(os.path.join(out, "plot_profile.csv"),
                  _csv_text(["u", "value"],
                            [(float(u[i]), float(rho_k[i]))
                             for i in range(len(u))]))
    sweep = ctx.identity_sweep(lam0, eps0)
    _write_atomic(os.path.join(out, "plot_sections.csv"),
                  _csv_text(["u_xi", "centroid"],
                            [(float(sweep["u_grid"][i]),
                              float(sweep["centroid_quadrature"][i]))
                             for i in range(len(sweep["u_grid"]))]))
    print(f"wrote plot_profile.csv ({cfg.plot_grid} rows) and "
          f"plot_sections.csv ({cfg.alpha_grid} rows)")
    return EXIT_OK


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="centroid-sections",
        description="Convex body whose centroid is the centroid of exactly "
                    "one hyperplane section: construction and checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--n", type=int, default=None,
                       help="ambient dimension (>= 5)")
        p.add_argument("--a", type=float, default=None,
                       help="flattening parameter in (0,1); default auto")
        p.add_argument("--outdir", default=None,
                       help=f"output directory (or ${ENV_OUTDIR})")

    pc = sub.add_parser("construct", help="build the body and certificate")
    add_common(pc)
    pc.add_argument("--eps", type=float, default=None,
                    help="starting perturbation size")
    pc.add_argument("--cap-margin", dest="cap_margin", type=float,
                    default=None, help="relative cap inset in (0,1)")
    pc.add_argument("--quad-order", dest="quad_order", type=int, default=None)
    pc.add_argument("--max-degree", dest="max_degree", type=int, default=None)
    pc.add_argument("--alpha-grid", dest="alpha_grid", type=int, default=None,
                    help="number of section directions")
    pc.add_argument("--seed", type=int, default=None)
    pc.set_defaults(func=cmd_construct)

    pv = sub.add_parser("verify", help="recheck a certificate")
    pv.add_argument("certificate", help="path to certificate.json")
    pv.add_argument("--alpha-grid", dest="alpha_grid", type=int, default=None)
    pv.set_defaults(func=cmd_verify)

    pi = sub.add_parser("intersection-test",
                        help="transform-sign test for the base body")
    add_common(pi)
    pi.set_defaults(func=cmd_intersection_test)

    pp = sub.add_parser("planar", help="bisected chords of a planar body")
    pp.add_argument("--input", default=None,
                    help="CSV with header x,y (polygon) or theta,rho")
    pp.add_argument("--demo", choices=sorted(_DEMOS), default=None)
    pp.add_argument("--resolution", type=int, default=4096)
    pp.add_argument("--theta-tol", dest="theta_tol", type=float,
                    default=1e-10)
    pp.add_argument("--outdir", default=None)
    pp.set_defaults(func=cmd_planar)

    pl = sub.add_parser("plot", help="emit plot data from a certificate")
    pl.add_argument("certificate", help="path to certificate.json")
    pl.add_argument("--outdir", default=None)
    pl.set_defaults(func=cmd_plot)
    return ap


def main(argv: Optional[list] = None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except cx.ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCT


if __name__ == "__main__":
    sys.exit(main())
