"""Reference CSWE eigenvalues from a truncated associated-Legendre expansion.

In the orthonormal basis ``Pbar^mu_n``, ``n = mu + k``, the operator
``-(d/dx)(1-x^2)(d/dx) + mu^2/(1-x^2) - gamma^2 (1-x^2) - beta x`` is the
symmetric matrix

    M = diag(n(n+1)) - gamma^2 (I - X^2) - beta X

where ``X`` is tridiagonal with
``X[n, n+1] = sqrt(((n+1)^2 - mu^2) / ((2n+1)(2n+3)))``.  Its eigenvalues
approximate the ``lambda`` of the Coulomb spheroidal equation.  This is a
different algorithm family from the series/characteristics pipeline and is
used to cross-check it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import TruncationUnstable

__all__ = [
    "OracleSpec",
    "OracleResult",
    "x_coupling",
    "legendre_matrix",
    "jacobi_eigenvalues",
    "oracle_eigenvalues",
    "contains",
]

DRIFT_STEP = 10


@dataclass(frozen=True)
class OracleSpec:
    mu: float
    gamma2: float
    beta: float = 0.0
    N: int = 80
    n_modes: int = 5

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("mu must be >= 0")
        if self.n_modes < 1:
            raise ValueError("n_modes must be positive")
        if self.N < self.n_modes + DRIFT_STEP:
            raise ValueError(f"need N >= n_modes + {DRIFT_STEP}")


@dataclass(frozen=True)
class OracleResult:
    lambdas: np.ndarray
    truncation_drift: float


def x_coupling(mu: float, n: np.ndarray) -> np.ndarray:
    """Off-diagonal entries of ``x`` between degrees ``n`` and ``n + 1``."""
    n = np.asarray(n, dtype=float)
    return np.sqrt(((n + 1.0) ** 2 - mu * mu) / ((2.0 * n + 1.0) * (2.0 * n + 3.0)))


def legendre_matrix(mu: float, gamma2: float, beta: float, N: int) -> np.ndarray:
    """The ``N x N`` Galerkin matrix; ``X^2`` is formed at size ``N + 1`` then cut."""
    n = mu + np.arange(N + 1)
    c = x_coupling(mu, n[:-1])
    X = np.diag(c, 1) + np.diag(c, -1)
    X2 = (X @ X)[:N, :N]
    X = X[:N, :N]
    D = np.diag(n[:N] * (n[:N] + 1.0))
    return D - gamma2 * (np.eye(N) - X2) - beta * X


@numba.njit(cache=True)
def _jacobi(a, tol, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        total = 0.0
        for i in range(n):
            for j in range(n):
                total += a[i, j] * a[i, j]
                if i != j:
                    off += a[i, j] * a[i, j]
        if off <= tol * tol * total:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(1.0 + theta * theta))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
    return -1


def jacobi_eigenvalues(A: np.ndarray, tol: float = 1e-15, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending."""
    A = np.array(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("need a square matrix")
    if not np.allclose(A, A.T, rtol=0, atol=1e-14 * max(1.0, np.abs(A).max())):
        raise ValueError("matrix is not symmetric")
    sweeps = _jacobi(A, tol, max_sweeps)
    if sweeps < 0:
        raise ArithmeticError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return np.sort(np.diag(A).copy())


def oracle_eigenvalues(spec: OracleSpec) -> OracleResult:
    """Smallest ``n_modes`` eigenvalues and their drift under ``N -> N - 10``.

    Raises
    ------
    TruncationUnstable
        If any requested mode moved by more than ``1e-8 (1 + |lambda|)``.
    """
    lam = jacobi_eigenvalues(legendre_matrix(spec.mu, spec.gamma2, spec.beta, spec.N))
    lam = lam[: spec.n_modes]
    coarse = jacobi_eigenvalues(
        legendre_matrix(spec.mu, spec.gamma2, spec.beta, spec.N - DRIFT_STEP)
    )[: spec.n_modes]
    diff = np.abs(lam - coarse)
    res = OracleResult(lambdas=lam, truncation_drift=float(diff.max()))
    if np.any(diff > 1e-8 * (1.0 + np.abs(lam))):
        raise TruncationUnstable(
            f"truncation drift {res.truncation_drift:.3g} at N={spec.N}", result=res
        )
    return res


def contains(lambdas: np.ndarray, value: float, tol: float) -> bool:
    return bool(np.any(np.abs(np.asarray(lambdas) - value) <= tol))
