"""Invariant suite run by the ``check`` subcommand."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .counterexample import kernel_report, krein_example
from .geometry import SurfaceRev, shape_constants
from .kernels import jump_check
from .nystrom import assemble, dtn_matrix, factorization_residual, plemelj_residual
from .symmetrizable import (SymmetrizablePair, bari_construct, factorize, finite_rank_truncate,
                            functional_calculus, power_semigroup_residual, recursion_check,
                            resolvent, resolvent_growth_check, slanted_projections)
from .zeta_eta import eta_function, zeta_determinant_sphere, zeta_S2


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tol: float
    ok: bool

    def to_dict(self):
        return {"name": self.name, "value": self.value, "tol": self.tol, "ok": self.ok}


def _chk(name, value, tol):
    value = float(value)
    return CheckResult(name, value, tol, bool(value <= tol))


def _distinct_eigenvalues(spec, count):
    out = []
    for v in spec.nonzero:
        if all(abs(v - w) > 1e-6 for w in out):
            out.append(float(v))
        if len(out) == count:
            break
    return out


def operator_checks(curve, n=256, plemelj_tol=1e-9, kernel_tol=None, group_tol=1e-8, seed=0):
    ops = assemble(curve, n, plemelj_tol=plemelj_tol)
    nS, nK, nA = (float(np.linalg.norm(M, 2)) for M in (ops.S_hat, ops.K_hat, ops.A_hat))
    res = [_chk("plemelj_relative", plemelj_residual(ops) / (nS * nK), plemelj_tol),
           _chk("factorization_relative", factorization_residual(ops) / (nS * nA), plemelj_tol)]
    pair = SymmetrizablePair.from_operators(ops, plemelj_tol)
    spec = factorize(pair, kernel_tol, group_tol)
    res.append(_chk("biorthogonality", spec.biorthogonality_residual(), 1e-9))
    ek, eg = spec.eigen_residuals()
    res.append(_chk("eigen_residual_relative", max(ek, eg) / max(nK, 1e-300), 1e-9))
    projs = slanted_projections(spec)[:5]
    idem = max(np.linalg.norm(p.Q @ p.Q - p.Q, 2) / np.linalg.norm(p.Q, 2) ** 2 for p in projs)
    res.append(_chk("projection_idempotence", idem, 1e-9))
    cross = max(np.linalg.norm(a.Q @ b.Q, 2) / (np.linalg.norm(a.Q, 2) * np.linalg.norm(b.Q, 2))
                for a in projs for b in projs if a is not b)
    res.append(_chk("projection_orthogonality", cross, 1e-9))
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(n)
    r1 = resolvent(spec, f, lam=0.2 + 0.1j, probe=rng.standard_normal(n))
    r2 = resolvent(spec, f, z=2.0)
    res.append(_chk("resolvent_series_vs_solve", max(r1.residual, r2.residual), 1e-10))
    res.append(_chk("borel_bound_excess", max(r1.borel_sum - r1.borel_bound, 0.0), 1e-9))
    rec = max(recursion_check(pair.Kstar, p, 0.7) for p in (1, 2, 3))
    res.append(_chk("fredholm_recursion", rec, 1e-10))
    coeffs = rng.standard_normal(4)
    calc = functional_calculus(spec, coeffs)
    res.append(_chk("calculus_vs_horner", calc.horner_residual, 1e-10))
    res.append(_chk("calculus_upper_bound_excess", max(calc.norm - calc.upper_bound, 0.0), 1e-12))
    res.append(_chk("calculus_lower_bound_deficit", max(calc.lower_bound - calc.norm, 0.0), 1e-9))
    worst = 0.0
    for alpha in _distinct_eigenvalues(spec, 5):
        rep = resolvent_growth_check(spec, alpha)
        worst = max(worst, 0.0 if rep.ok else 1.0)
    res.append(_chk("resolvent_growth_violations", worst, 0.0))
    stride = max(1, n // 64)
    excess = max(max(bc.lhs - bc.rhs, 0.0) for _, bc in
                 (finite_rank_truncate(pair, N) for N in range(0, n + 1, stride)))
    res.append(_chk("finite_rank_bound_excess", excess, 1e-12 * max(1.0, nA * nS)))
    jr = jump_check(ops, lambda t: np.exp(np.sin(t)))
    res.append(_chk("jump_relations", jr.max_residual, 1e-8))
    res.append(_chk("dtn_two_forms_relative", dtn_matrix(ops).relative_residual, 1e-9))
    ev = np.linalg.eigvals(ops.Kstar_hat)
    res.append(_chk("eta_pairing", abs(eta_function(ev, 0.0) - 1.0), 1e-8))
    return res


def engine_checks():
    F = np.eye(8) + 0.1 * np.triu(np.ones((8, 8)), 1)
    pair = bari_construct(F, 0.5 ** np.arange(8))
    spec = factorize(pair)
    v = np.random.default_rng(1).standard_normal(8)
    res = [_chk("complex_power_semigroup", power_semigroup_residual(spec, 1.5 + 1j, 2.2 - 0.3j, v),
                1e-10)]
    worst = 0.0
    for lam in ([1.0, 1.0], [1.0, 1.0, 1.0], list(np.linspace(1.0, 0.1, 16))):
        rep = kernel_report(krein_example(lam))
        worst = max(worst, max(e.residual for e in rep.entries.values()))
        if not rep.ok:
            worst = max(worst, 1.0)
    res.append(_chk("counterexample_kernels", worst, 1e-13))
    return res


def sphere_checks():
    res = [_chk("zeta_S2_at_0", abs(zeta_S2(0.0) - 1 / 12), 1e-12),
           _chk("zeta_S2_at_1", abs(zeta_S2(1.0)), 1e-12)]
    det = zeta_determinant_sphere()
    res.append(_chk("zeta_determinant_closed_form", abs(det.det - det.closed_form), 1e-8))
    sc = shape_constants(SurfaceRev.sphere())
    res.append(_chk("sphere_constants", max(abs(sc.c_S - 0.5), abs(sc.c_K - 0.5)), 1e-10))
    return res


def run_checks(curve, n=256, plemelj_tol=1e-9, kernel_tol=None, group_tol=1e-8, seed=0):
    """All invariant checks; returns a list of ``CheckResult``."""
    return (operator_checks(curve, n, plemelj_tol, kernel_tol, group_tol, seed)
            + engine_checks() + sphere_checks())


def all_ok(results):
    return all(r.ok for r in results) and not any(math.isnan(r.value) for r in results)
