import math

import numpy as np
import pytest
from scipy.special import lpmv, obl_cv, pro_cv

from conftest import PUBLISHED_GAMMA2, PUBLISHED_LAMBDA
from spheroidal_pde.errors import TruncationUnstable
from spheroidal_pde.oracle import (
    OracleSpec,
    contains,
    jacobi_eigenvalues,
    legendre_matrix,
    oracle_eigenvalues,
    x_coupling,
)
from spheroidal_pde.verify import rng_for

# lowest mu = 0 mode at gamma^2 = 1; the tabulated prolate value is 0.319000055 = lambda + gamma^2
MU0_G1 = -0.6809999448531078


def test_legendre_limit():
    res = oracle_eigenvalues(OracleSpec(1.0, 0.0, N=60, n_modes=4))
    np.testing.assert_allclose(res.lambdas, [2.0, 6.0, 12.0, 20.0], atol=1e-12)


def test_published_eigenvalue():
    res = oracle_eigenvalues(OracleSpec(1.0, PUBLISHED_GAMMA2))
    assert contains(res.lambdas, PUBLISHED_LAMBDA, 1e-6)
    assert res.lambdas[0] == pytest.approx(PUBLISHED_LAMBDA, abs=1e-6)


def test_tabulated_prolate_value():
    assert MU0_G1 + 1.0 == pytest.approx(0.319000055, abs=5e-10)
    for N in (40, 60, 80):
        lam = oracle_eigenvalues(OracleSpec(0.0, 1.0, N=N)).lambdas[0]
        assert lam == pytest.approx(MU0_G1, abs=1e-10)


@pytest.mark.parametrize("mu,gamma2", [(0, 1.0), (1, PUBLISHED_GAMMA2), (2, 4.0), (0, 16.0), (3, -9.0)])
def test_matches_scipy_prolate_characteristic_values(mu, gamma2):
    # scipy uses the same operator with +c^2 x^2, so its value is lambda + gamma^2;
    # negative gamma^2 is the oblate case with c^2 = -gamma^2
    res = oracle_eigenvalues(OracleSpec(float(mu), gamma2, n_modes=3))
    if gamma2 >= 0:
        ref = [pro_cv(mu, mu + k, math.sqrt(gamma2)) - gamma2 for k in range(3)]
    else:
        ref = [obl_cv(mu, mu + k, math.sqrt(-gamma2)) - gamma2 for k in range(3)]
    np.testing.assert_allclose(res.lambdas, ref, rtol=1e-10, atol=1e-10)


def test_truncation_is_converged():
    rng = rng_for(21)
    for _ in range(30):
        mu, g2, beta = rng.uniform(0, 3), rng.uniform(-20, 20), rng.uniform(-10, 10)
        a = jacobi_eigenvalues(legendre_matrix(mu, g2, beta, 60))[:5]
        b = jacobi_eigenvalues(legendre_matrix(mu, g2, beta, 120))[:5]
        np.testing.assert_allclose(a, b, atol=1e-10, rtol=0)


def test_jacobi_against_numpy():
    rng = rng_for(22)
    for _ in range(10):
        A = legendre_matrix(rng.uniform(0, 3), rng.uniform(-20, 20), rng.uniform(-10, 10), 40)
        np.testing.assert_allclose(jacobi_eigenvalues(A), np.linalg.eigvalsh(A), atol=1e-10 * np.abs(A).max())
    B = rng.standard_normal((12, 12))
    B = B + B.T
    np.testing.assert_allclose(jacobi_eigenvalues(B), np.linalg.eigvalsh(B), atol=1e-12)


def test_jacobi_rejects_bad_input():
    with pytest.raises(ValueError):
        jacobi_eigenvalues(np.ones((2, 3)))
    with pytest.raises(ValueError):
        jacobi_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_matrix_symmetric_and_output_ascending():
    A = legendre_matrix(1.5, 3.0, 2.0, 30)
    np.testing.assert_array_equal(A, A.T)
    lam = oracle_eigenvalues(OracleSpec(1.5, 3.0, 2.0)).lambdas
    assert np.all(np.diff(lam) > 0)


def _normalized_plm(m, n, x):
    norm = math.sqrt((2 * n + 1) / 2 * math.factorial(n - m) / math.factorial(n + m))
    return norm * lpmv(m, n, x)


@pytest.mark.parametrize("mu", [0, 1, 2, 3])
def test_x_coupling_by_quadrature(mu):
    x, w = np.polynomial.legendre.leggauss(60)
    for n in range(mu, mu + 8):
        ip = np.sum(w * x * _normalized_plm(mu, n, x) * _normalized_plm(mu, n + 1, x))
        assert abs(ip) == pytest.approx(x_coupling(mu, n), abs=1e-13)
        self_ip = np.sum(w * _normalized_plm(mu, n, x) ** 2)
        assert self_ip == pytest.approx(1.0, abs=1e-12)


def test_truncation_unstable():
    with pytest.raises(TruncationUnstable) as info:
        oracle_eigenvalues(OracleSpec(1.0, 400.0, N=15))
    assert info.value.result.truncation_drift > 1.0
    with pytest.raises(TruncationUnstable):
        oracle_eigenvalues(OracleSpec(0.0, 0.0, beta=200.0, N=20))


@pytest.mark.parametrize("kw", [{"mu": -1.0}, {"n_modes": 0}, {"N": 12}])
def test_spec_validation(kw):
    args = {"mu": 1.0, "gamma2": 1.0} | kw
    with pytest.raises(ValueError):
        OracleSpec(**args)


def test_contains():
    assert contains([1.0, 2.0], 2.0 + 1e-7, 1e-6)
    assert not contains([1.0, 2.0], 3.0, 1e-6)
