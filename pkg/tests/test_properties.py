import json
import math

import mpmath
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from nps.counterexample import kernel_report, krein_example
from nps.report import dumps
from nps.symmetrizable import (SymmetrizablePair, factorize, fredholm_det, functional_calculus,
                               recursion_check, slanted_projections)
from nps.zeta_eta import riemann_zeta

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_pair(seed, n):
    rng = np.random.default_rng(seed)
    Q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    S = (Q * rng.uniform(0.1, 1.0, n)) @ Q.T
    A = rng.standard_normal((n, n))
    return SymmetrizablePair(S, A + A.T)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=12))
def test_factorization_invariants(seed, n):
    spec = factorize(random_pair(seed, n))
    scale = np.linalg.norm(spec.pair.Kstar, 2)
    assert spec.biorthogonality_residual() <= 1e-9
    ek, eg = spec.eigen_residuals()
    assert max(ek, eg) <= 1e-9 * max(scale, 1.0)
    assert np.all(np.diff(np.abs(spec.lam)) <= 1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=10))
def test_projections_idempotent(seed, n):
    spec = factorize(random_pair(seed, n))
    for p in slanted_projections(spec):
        nq = np.linalg.norm(p.Q, 2)
        assert np.linalg.norm(p.Q @ p.Q - p.Q, 2) <= 1e-9 * nq**2


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=8))
def test_calculus_matches_polynomial(seed, n):
    spec = factorize(random_pair(seed, n))
    coeffs = np.random.default_rng(seed).standard_normal(4)
    r = functional_calculus(spec, coeffs)
    assert r.horner_residual <= 1e-9
    assert r.lower_ok


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(min_value=-0.5, max_value=0.5), st.integers(min_value=1, max_value=4))
def test_fredholm_recursion(seed, z, p):
    pair = random_pair(seed, 6)
    assert recursion_check(pair.Kstar, p, z) <= 1e-9
    lam = np.linalg.eigvals(pair.Kstar)
    direct = np.linalg.det(np.eye(6) - z * pair.Kstar)
    if p == 1:
        assert abs(fredholm_det(lam, 1, z) - direct) <= 1e-9 * max(1.0, abs(direct))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(min_value=1e-3, max_value=1e3), min_size=1, max_size=20))
def test_counterexample_kernels(weights):
    rep = kernel_report(krein_example(weights))
    assert rep.normalization_error <= 1e-15
    for e in rep.entries.values():
        assert e.residual <= 1e-13


@settings(max_examples=200)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_json_float_roundtrip(x):
    assert json.loads(dumps([x]))[0] == x


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-9.5, max_value=12.0).filter(lambda s: abs(s - 1) > 1e-3 and (s == 0 or abs(s) > 1e-12)))
def test_riemann_zeta_oracle(s):
    ref = float(mpmath.zeta(s))
    assert math.isclose(riemann_zeta(s), ref, rel_tol=1e-11, abs_tol=1e-14)
