"""Command line front end: ``nps <subcommand> [options]``.

Options may also come from a JSON config file (``--config``); explicit
flags win.  Reports are written as deterministic JSON (and CSV where a
table is natural).  Wall time goes to stderr so that equal configurations
produce identical report bytes.

Exit codes: 0 success, 1 failed checks, 2 usage error, 3-17 the
``exit_code`` of the raised library error (see ``nps.errors``).
"""
from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .asymptotics import perturbation, ratio_table, sharp_ratio_constants
from .checks import all_ok, run_checks
from .counterexample import kernel_report, krein_example, norm_growth
from .dirichlet import DirichletProblem, solve_dirichlet
from .errors import NPSError, ParameterError
from .geometry import Curve2D, SurfaceRev, ess_range, shape_constants, willmore_inequality_check
from .nystrom import assemble, dump_matrices_csv, factorization_residual, grid_summary, plemelj_residual
from .report import build_report, csv_text, dumps, entry
from .symmetrizable import (SymmetrizablePair, factorize, functional_calculus,
                            resolvent_growth_check)
from .zeta_eta import (SphereSpectrum, eta_function, heat_trace_residue, zeta_determinant_sphere,
                       zeta_S2)

SUBCOMMANDS = ("spectrum", "dirichlet", "resolvent", "calculus", "zeta", "geometry", "ratio",
               "counterexample", "check")

DEFAULTS = {
    "curve": "ellipse", "r": 1.0, "a": 1.0, "b": 0.5, "k": 5, "eps": 0.2, "coeffs": None,
    "rescale": True, "n": 256, "plemelj_tol": 1e-9, "kernel_tol": None, "group_tol": 1e-8,
    "seed": 0, "out": None, "csv": None, "format": "json", "count": 20,
    "dump_matrices": None, "data": "x^2-y^2", "exact": None, "points": None, "point": None,
    "side": "interior", "poly": "1,-2,0.5,3", "surface": "sphere", "c": 2.0, "source": "sphere",
    "lam": None, "alphas": 5,
}


@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ParameterError(f"unknown subcommand {self.subcommand!r}")
        merged = dict(DEFAULTS)
        merged.update(self.options)
        self.options = merged
        o = merged
        if int(o["n"]) != o["n"] or int(o["n"]) % 2 or int(o["n"]) < 32:
            raise ParameterError("--n must be an even integer >= 32")
        o["n"] = int(o["n"])
        for key in ("plemelj_tol", "group_tol", "kernel_tol"):
            if o[key] is not None and not o[key] > 0:
                raise ParameterError(f"--{key.replace('_', '-')} must be positive")
        if o["format"] not in ("json", "csv", "both"):
            raise ParameterError("--format must be json, csv or both")

    def __getitem__(self, key):
        return self.options[key]

    def echo(self):
        return {"subcommand": self.subcommand, **{k: self.options[k] for k in sorted(self.options)}}


# ---------------------------------------------------------------------------
# safe expression evaluation for boundary data


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "log": np.log,
          "sqrt": np.sqrt, "sinh": np.sinh, "cosh": np.cosh, "atan2": np.arctan2, "abs": np.abs}
_CONSTS = {"pi": math.pi, "e": math.e}


def expression(text):
    """Compile an arithmetic expression in ``x`` and ``y`` (``^`` means power)."""
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def ev(node, x, y):
        if isinstance(node, ast.Expression):
            return ev(node.body, x, y)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name):
            if node.id == "x":
                return x
            if node.id == "y":
                return y
            if node.id in _CONSTS:
                return _CONSTS[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left, x, y), ev(node.right, x, y))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand, x, y)
            return -v if isinstance(node.op, ast.USub) else v
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and not node.keywords):
            return _FUNCS[node.func.id](*(ev(a, x, y) for a in node.args))
        raise ParameterError(f"unsupported expression element: {ast.dump(node)[:60]}")

    ev(tree, 0.3, 0.1)  # validate eagerly

    def func(x, y):
        return np.asarray(ev(tree, np.asarray(x, float), np.asarray(y, float)), dtype=float) \
            * np.ones(np.shape(x))
    return func


def _floats(text):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def make_curve(o):
    fam = o["curve"]
    if fam == "circle":
        return Curve2D.circle(o["r"])
    if fam == "ellipse":
        return Curve2D.ellipse(o["a"], o["b"])
    if fam == "kite":
        return Curve2D.kite()
    if fam == "star":
        return Curve2D.star(int(o["k"]), o["eps"])
    if fam == "fourier":
        return Curve2D.fourier(_floats(o["coeffs"]) or [1.0])
    raise ParameterError(f"unknown curve family {fam!r}")


def make_surface(o):
    fam = o["surface"]
    if fam == "sphere":
        return SurfaceRev.sphere(o["r"])
    if fam == "spheroid":
        return SurfaceRev.spheroid(o["a"], o["c"])
    if fam == "fourier":
        return SurfaceRev.fourier(_floats(o["coeffs"]) or [], o["r"])
    raise ParameterError(f"unknown surface family {fam!r}")


# ---------------------------------------------------------------------------
# subcommands; each returns (ok, results, table or None)


def _assemble(cfg):
    return assemble(make_curve(cfg.options), cfg["n"], rescale=cfg["rescale"],
                    plemelj_tol=cfg["plemelj_tol"])


def _factorize(cfg, ops):
    pair = SymmetrizablePair.from_operators(ops, cfg["plemelj_tol"])
    return factorize(pair, cfg["kernel_tol"], cfg["group_tol"])


def cmd_spectrum(cfg):
    ops = _assemble(cfg)
    spec = _factorize(cfg, ops)
    count = min(int(cfg["count"]), spec.rank)
    lam = spec.lam[:count]
    s_eigs = np.sort(np.linalg.eigvalsh(ops.S_hat))[::-1][:count]
    if cfg["dump_matrices"]:
        dump_matrices_csv(ops, cfg["dump_matrices"])
    res = {"grid": grid_summary(ops), "rank": spec.rank, "eigenvalues": lam,
           "single_layer_eigenvalues": s_eigs, "norms": ops.norms(),
           "plemelj_residual": plemelj_residual(ops),
           "factorization_residual": factorization_residual(ops),
           "biorthogonality_residual": spec.biorthogonality_residual(),
           "A_asymmetry": ops.A_asymmetry}
    table = (["index", "lambda", "sigma_S"], [[i, lam[i], s_eigs[i]] for i in range(count)])
    return True, res, table


def _points(cfg):
    pts = []
    if cfg["points"]:
        pts.extend(np.atleast_2d(np.loadtxt(cfg["points"], delimiter=",", ndmin=2))[:, :2].tolist())
    if cfg["point"]:
        for p in cfg["point"]:
            pts.append(_floats(p)[:2])
    if not pts:
        raise ParameterError("give evaluation points with --points FILE or --point x,y")
    return np.array(pts, dtype=float)


def cmd_dirichlet(cfg):
    curve = make_curve(cfg.options)
    ops = assemble(curve, cfg["n"], rescale=cfg["rescale"], plemelj_tol=cfg["plemelj_tol"])
    pts = _points(cfg)
    sol = solve_dirichlet(DirichletProblem(curve, expression(cfg["data"]), cfg["side"], pts), ops)
    res = {"points": pts, "values": sol.values, "path_agreement": sol.path_agreement}
    rows = [[p[0], p[1], v] for p, v in zip(pts, sol.values)]
    head = ["x", "y", "u"]
    ok = True
    if cfg["exact"]:
        ex = expression(cfg["exact"])(pts[:, 0], pts[:, 1])
        res["exact"] = ex
        res["max_error"] = float(np.max(np.abs(ex - sol.values)))
        head.append("exact")
        rows = [r + [e] for r, e in zip(rows, ex)]
    return ok, res, (head, rows)


def cmd_resolvent(cfg):
    ops = _assemble(cfg)
    spec = _factorize(cfg, ops)
    alphas = []
    for v in spec.nonzero:
        if all(abs(v - w) > cfg["group_tol"] for w in alphas):
            alphas.append(float(v))
        if len(alphas) == int(cfg["alphas"]):
            break
    rows, ok, summary = [], True, []
    for a in alphas:
        rep = resolvent_growth_check(spec, a)
        ok = ok and rep.ok
        summary.append({"alpha": a, "delta": rep.delta, "ok": rep.ok, "skipped": rep.skipped})
        for r in rep.rows:
            rows.append([a, r.z.real, r.z.imag, r.norm, r.lower, r.upper, int(r.ok)])
    res = {"alphas": summary, "norm_A_times_norm_S":
           float(np.linalg.norm(spec.pair.A, 2) * np.linalg.norm(spec.pair.S, 2))}
    return ok, res, (["alpha", "z_re", "z_im", "norm", "lower", "upper", "ok"], rows)


def cmd_calculus(cfg):
    ops = _assemble(cfg)
    spec = _factorize(cfg, ops)
    coeffs = _floats(cfg["poly"])
    r = functional_calculus(spec, coeffs)
    ok = r.upper_ok and r.lower_ok and r.horner_residual <= 1e-10
    res = {"coefficients": coeffs, "norm": r.norm, "upper_bound": r.upper_bound,
           "lower_bound": r.lower_bound, "c1_norm": r.c1_norm,
           "horner_residual": r.horner_residual}
    return ok, res, None


def cmd_zeta(cfg):
    det = zeta_determinant_sphere()
    fit = heat_trace_residue()
    res = {"zeta_S2_at_0": zeta_S2(0.0), "zeta_S2_at_0_reference": entry(1 / 12, "reference"),
           "zeta_S2_at_1": zeta_S2(1.0), "zeta_S2_at_3": zeta_S2(3.0),
           "eta_sphere_at_0": eta_function(SphereSpectrum(0), 0.0),
           "pole_at": 2.0, "residue_known": entry(0.5, "reference"),
           "heat_trace_fit": fit.to_dict(),
           "residue_as_a_minus2": fit.residue, "residue_as_two_a_minus2": fit.residue_stated,
           "determinant": det.to_dict(), "glaisher": det.glaisher}
    ok = abs(det.det - det.closed_form) <= 1e-8
    return ok, res, None


def cmd_geometry(cfg):
    surf = make_surface(cfg.options)
    sc = shape_constants(surf)
    will = willmore_inequality_check(surf)
    res = {"surface": surf.to_dict(), "constants": sc.to_dict(),
           "sharp_ratio": sharp_ratio_constants(surf).to_dict(),
           "willmore": will.to_dict(), "symbol_range": [list(iv) for iv in ess_range(surf)]}
    return will.ok, res, None


def cmd_ratio(cfg):
    src = cfg["source"]
    count = int(cfg["count"])
    if src == "sphere":
        table = ratio_table(SphereSpectrum(int(math.isqrt(count)) + 2), count)
    elif src == "planar":
        table = ratio_table(_assemble(cfg), count)
    elif src == "synthetic":
        N = max(200, count)
        s = 1.0 / np.arange(1, N + 1)
        B = perturbation(N, np.array([0.8, -0.5, 0.3]), seed=cfg["seed"])
        table = ratio_table(SymmetrizablePair(np.diag(s), np.eye(N) + B), count)
    else:
        raise ParameterError("--source must be sphere, planar or synthetic")
    res = {"kind": table.kind, "verdict": table.verdict, "details": table.details,
           "warnings": table.warnings, "ratio_sigma": table.column("ratio_sigma"),
           "ratio_mu": table.column("ratio_mu")}
    return table.verdict, res, table.csv_rows()


def cmd_counterexample(cfg):
    lam = _floats(cfg["lam"]) or [1.0, 1.0]
    rep = kernel_report(krein_example(lam))
    norms, ratios = norm_growth()
    res = {"report": rep.to_dict(), "norm_growth": {"N": [4, 16, 64], "norms": norms,
                                                    "ratios": ratios}}
    return rep.ok, res, None


def cmd_check(cfg):
    results = run_checks(make_curve(cfg.options), cfg["n"], cfg["plemelj_tol"], cfg["kernel_tol"],
                         cfg["group_tol"], cfg["seed"])
    rows = [[r.name, r.value, r.tol, int(r.ok)] for r in results]
    return all_ok(results), {"checks": [r.to_dict() for r in results]}, \
        (["name", "value", "tol", "ok"], rows)


COMMANDS = {name: globals()[f"cmd_{name}"] for name in SUBCOMMANDS}


def run(cfg):
    """Execute a configuration; returns ``(exit_code, report_dict, csv_text_or_None)``."""
    ok, results, table = COMMANDS[cfg.subcommand](cfg)
    report = build_report(cfg.subcommand, __version__, cfg.echo(), results, ok)
    text = dumps(report) + "\n"
    csv_out = csv_text(*table) if table is not None else None
    fmt = cfg["format"]
    if fmt in ("json", "both"):
        if cfg["out"]:
            with open(cfg["out"], "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    if fmt in ("csv", "both") and csv_out is not None:
        path = cfg["csv"] or (os.path.splitext(cfg["out"])[0] + ".csv" if cfg["out"] else None)
        if path:
            with open(path, "w") as fh:
                fh.write(csv_out)
        else:
            sys.stdout.write(csv_out)
    return (0 if ok else 1), report, csv_out


# ---------------------------------------------------------------------------
# argument parsing


def _parser():
    S = argparse.SUPPRESS
    p = argparse.ArgumentParser(prog="nps", description=__doc__.splitlines()[0],
                                argument_default=S)
    p.add_argument("--version", action="version", version=f"nps {__version__}")
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    common.add_argument("--config", help="JSON file with options (flags override)")
    common.add_argument("--out", help="JSON output path (default stdout)")
    common.add_argument("--csv", help="CSV output path")
    common.add_argument("--format", choices=("json", "csv", "both"))
    common.add_argument("--seed", type=int)
    common.add_argument("--n", type=int, help="grid size (even, >= 32)")
    common.add_argument("--plemelj-tol", dest="plemelj_tol", type=float)
    common.add_argument("--kernel-tol", dest="kernel_tol", type=float)
    common.add_argument("--group-tol", dest="group_tol", type=float)
    common.add_argument("--curve", choices=("circle", "ellipse", "kite", "star", "fourier"))
    common.add_argument("--surface", choices=("sphere", "spheroid", "fourier"))
    common.add_argument("--r", type=float)
    common.add_argument("--a", type=float)
    common.add_argument("--b", type=float)
    common.add_argument("--c", type=float)
    common.add_argument("--k", type=int)
    common.add_argument("--eps", type=float)
    common.add_argument("--coeffs", help="comma separated Fourier coefficients")
    common.add_argument("--no-rescale", dest="rescale", action="store_false")
    common.add_argument("--count", type=int)
    sub = p.add_subparsers(dest="subcommand", required=True)
    sp = sub.add_parser("spectrum", parents=[common], argument_default=S)
    sp.add_argument("--dump-matrices", dest="dump_matrices", metavar="DIR")
    dp = sub.add_parser("dirichlet", parents=[common], argument_default=S)
    dp.add_argument("--data", help='boundary data expression, e.g. "x^2-y^2"')
    dp.add_argument("--exact", help="exact solution expression for error reporting")
    dp.add_argument("--points", help="CSV file with x,y per line")
    dp.add_argument("--point", action="append", help="x,y (repeatable)")
    dp.add_argument("--side", choices=("interior", "exterior"))
    rv = sub.add_parser("resolvent", parents=[common], argument_default=S)
    rv.add_argument("--alphas", type=int, help="number of distinct eigenvalues to probe")
    cp = sub.add_parser("calculus", parents=[common], argument_default=S)
    cp.add_argument("--poly", help="polynomial coefficients, increasing degree")
    sub.add_parser("zeta", parents=[common], argument_default=S)
    sub.add_parser("geometry", parents=[common], argument_default=S)
    rp = sub.add_parser("ratio", parents=[common], argument_default=S)
    rp.add_argument("--source", choices=("sphere", "planar", "synthetic"))
    xp = sub.add_parser("counterexample", parents=[common], argument_default=S)
    xp.add_argument("--lambda", dest="lam", help="comma separated positive weights")
    sub.add_parser("check", parents=[common], argument_default=S)
    return p


def config_from_args(argv):
    ns = vars(_parser().parse_args(argv))
    sub = ns.pop("subcommand")
    opts = {}
    path = ns.pop("config", None)
    if path:
        with open(path) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ParameterError("config file must hold a JSON object")
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        opts.update(loaded)
    opts.update(ns)
    return RunConfig(sub, opts)


def _limit_threads():
    value = os.environ.get("NPS_THREADS")
    if not value:
        return None
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=max(1, int(value)))


def main(argv=None):
    start = time.perf_counter()
    try:
        cfg = config_from_args(argv)
        _limit_threads()
        code, _, _ = run(cfg)
    except NPSError as exc:
        print(f"nps: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"nps: error: {exc}", file=sys.stderr)
        return 3
    print(f"nps: wall time {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
