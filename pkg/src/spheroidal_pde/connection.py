"""Connection coefficient Theta(Lambda, u) from the Floquet series at z = 0.

The Floquet solution at ``z = 0`` of the transformed system
``y' = (A0/z + A1/(z-1) + C) y`` is ``z^alpha * sum_k d_k z^k``.  Its
coefficients satisfy ``e1 . d_k -> Theta`` with error ``O(k^(delta-mu-2))``,
and the zeros of ``Theta`` in ``Lambda`` are the eigenvalues of the
Hamiltonian system.

Two independent routes produce ``d_k``:

* :func:`theta_limit` -- the increment recurrence for ``b_k = d_k - d_{k-1}``
  with compensated accumulation of ``d_k``;
* :func:`theta_frobenius` -- the three-term matrix recursion obtained by
  matching powers of ``z`` directly in the transformed system.

Both stop with the same rule (see :func:`tail_estimate`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DegenerateData, NoConvergence, SingularStep
from .params import ModeOrder, ParamVec

__all__ = [
    "DEFAULT_TOL",
    "DEFAULT_K_MAX",
    "SeriesState",
    "ThetaResult",
    "series_init",
    "series_step",
    "theta_limit",
    "theta_frobenius",
    "theta_sequence",
    "tail_estimate",
    "convergence_order",
]

DEFAULT_TOL = 1e-13
DEFAULT_K_MAX = 200_000

# the stopping test runs every _CHECK_EVERY terms once k >= _K_FIRST_CHECK
_CHECK_EVERY = 10
_K_FIRST_CHECK = 20


@dataclass(frozen=True)
class SeriesState:
    """State of the increment recurrence after ``k`` steps.

    ``d`` is the running sum and ``d_comp`` its compensation term, so the
    represented coefficient vector is ``d + d_comp``.
    """

    k: int
    b: tuple[float, float]
    d: tuple[float, float]
    d_comp: tuple[float, float] = (0.0, 0.0)

    @property
    def d_value(self) -> tuple[float, float]:
        return (self.d[0] + self.d_comp[0], self.d[1] + self.d_comp[1])

    @property
    def theta(self) -> float:
        return self.d[0] + self.d_comp[0]


@dataclass(frozen=True)
class ThetaResult:
    theta: float
    k_used: int
    tail_estimate: float
    converged: bool


def series_init(mode: ModeOrder, u: ParamVec, lam: float) -> SeriesState:
    d0 = ((u.u3 + lam) / (2.0 * mode.alpha), 1.0)
    return SeriesState(k=0, b=d0, d=d0)


def _two_sum(s, x, c):
    # Neumaier compensated addition: returns new (sum, compensation)
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c


def series_step(
    mode: ModeOrder, u: ParamVec, s: SeriesState, lam: float = 0.0, include_lambda: bool = True
) -> SeriesState:
    """Advance the increment recurrence from ``k`` to ``k + 1``.

    With ``include_lambda=False`` the Lambda-free form of the recurrence is
    used; it coincides with the general one only at ``Lambda = 0``.
    """
    k = s.k + 1
    mu = mode.mu
    u1, u2, u3 = u
    sig = u3 + lam if include_lambda else u3
    lam_term = lam if include_lambda else 0.0
    q = u1 + u2 * u2
    den = k * (k + mu + 1.0)
    b1, b2 = s.b
    d1, d2 = s.d_value
    nb1 = (
        2.0 * (k * u2 - sig) * b1
        + (2.0 * k * q - 2.0 * u2 * sig) * b2
        - sig * lam_term * d1
        - (mu + 1.0) * sig * d2
    ) / den
    nb2 = (-2.0 * b1 - 2.0 * u2 * b2 - lam_term * d1 - (mu + 1.0) * d2) / k
    s1, c1 = _two_sum(s.d[0], nb1, s.d_comp[0])
    s2, c2 = _two_sum(s.d[1], nb2, s.d_comp[1])
    return SeriesState(k=k, b=(nb1, nb2), d=(s1, s2), d_comp=(c1, c2))


# -- compiled kernels --------------------------------------------------------


@numba.njit(cache=True)
def _tail(thetas, k, mu):
    m = (k + 9) // 10
    return abs(thetas[k] - thetas[k - m]) * k / (m * (mu + 1.0))


@numba.njit(cache=True)
def _should_stop(thetas, k, mu, tol, state):
    # state[0]: consecutive passes, state[1]: last tail estimate
    if k < _K_FIRST_CHECK or k % _CHECK_EVERY != 0:
        return False
    tail = _tail(thetas, k, mu)
    state[1] = tail
    if tail <= tol:
        state[0] += 1.0
    else:
        state[0] = 0.0
    return state[0] >= 2.0


@numba.njit(cache=True)
def _series_kernel(mu, u1, u2, u3, lam, tol, k_max, include_lambda, thetas, state):
    sig = u3 + lam if include_lambda else u3
    lt = lam if include_lambda else 0.0
    q = u1 + u2 * u2
    p1 = mu + 1.0
    d1 = (u3 + lam) / p1
    d2 = 1.0
    c1 = 0.0
    c2 = 0.0
    b1 = d1
    b2 = d2
    thetas[0] = d1
    for k in range(1, k_max + 1):
        den = k * (k + p1)
        e1 = d1 + c1
        e2 = d2 + c2
        nb1 = (2.0 * (k * u2 - sig) * b1 + (2.0 * k * q - 2.0 * u2 * sig) * b2
               - sig * lt * e1 - p1 * sig * e2) / den
        nb2 = (-2.0 * b1 - 2.0 * u2 * b2 - lt * e1 - p1 * e2) / k
        b1 = nb1
        b2 = nb2
        t = d1 + b1
        if abs(d1) >= abs(b1):
            c1 += (d1 - t) + b1
        else:
            c1 += (b1 - t) + d1
        d1 = t
        t = d2 + b2
        if abs(d2) >= abs(b2):
            c2 += (d2 - t) + b2
        else:
            c2 += (b2 - t) + d2
        d2 = t
        th = d1 + c1
        thetas[k] = th
        if not np.isfinite(th):
            return k, False
        if _should_stop(thetas, k, mu, tol, state):
            return k, True
    return k_max, False


@numba.njit(cache=True)
def _frobenius_kernel(mu, u1, u2, u3, lam, tol, k_max, thetas, state):
    a = 0.5 * (mu + 1.0)
    s = u3 + lam
    q = u1 + u2 * u2
    # A0 + A1 - C without the (k - 1 + alpha) I shift
    m11 = -a - 1.0 - 2.0 * u2
    m12 = s - 2.0 * q
    m21 = lam + 2.0
    m22 = a + 2.0 * a - 1.0 + 2.0 * u2
    x1 = s / (2.0 * a)
    x2 = 1.0
    y1 = 0.0
    y2 = 0.0
    thetas[0] = x1
    for k in range(1, k_max + 1):
        shift = k - 1.0 + a
        r1 = (m11 - shift) * x1 + m12 * x2 + 2.0 * u2 * y1 + 2.0 * q * y2
        r2 = m21 * x1 + (m22 - shift) * x2 - 2.0 * y1 - 2.0 * u2 * y2
        # (A0 - (k + alpha) I) is upper triangular: diag(-(k + 2 alpha), -k)
        p11 = -(k + 2.0 * a)
        p22 = -1.0 * k
        if abs(p11) < 1e-300 or abs(p22) < 1e-300:
            return -k, False
        n2 = r2 / p22
        n1 = (r1 - s * n2) / p11
        y1 = x1
        y2 = x2
        x1 = n1
        x2 = n2
        thetas[k] = x1
        if not np.isfinite(x1):
            return k, False
        if _should_stop(thetas, k, mu, tol, state):
            return k, True
    return k_max, False


# -- public API --------------------------------------------------------------


def tail_estimate(thetas: np.ndarray, k: int, mu: float) -> float:
    """Conservative tail bound for a sequence converging like ``k^-(mu+2)``.

    ``|theta_k - theta_{k-m}| * k / (m (mu+1))`` with ``m = ceil(k/10)``.
    """
    return float(_tail(np.asarray(thetas, dtype=np.float64), int(k), float(mu)))


def _richardson(thetas, k, mu):
    k1 = k // 2
    r = (k1 / k) ** (mu + 2.0)
    return (thetas[k] - r * thetas[k1]) / (1.0 - r)


def _run(kernel_name, mode, u, lam, tol, k_max, richardson, include_lambda=True):
    if not tol > 0:
        raise ValueError("tol must be positive")
    if k_max < 10:
        raise ValueError("k_max must be at least 10")
    thetas = np.empty(k_max + 1)
    state = np.array([0.0, math.inf])
    args = (mode.mu, float(u.u1), float(u.u2), float(u.u3), float(lam), float(tol), int(k_max))
    if kernel_name == "series":
        k, ok = _series_kernel(*args, bool(include_lambda), thetas, state)
    else:
        k, ok = _frobenius_kernel(*args, thetas, state)
        if k < 0:
            raise SingularStep(f"singular recursion matrix at k={-k}")
    k = int(k)
    theta = thetas[k]
    tail = float(state[1])
    if not ok and k >= _K_FIRST_CHECK and np.isfinite(theta):
        tail = tail_estimate(thetas, k, mode.mu)
    if richardson and k >= 2 and np.isfinite(theta):
        theta = _richardson(thetas, k, mode.mu)
    res = ThetaResult(theta=float(theta), k_used=k, tail_estimate=tail, converged=bool(ok))
    if not ok:
        raise NoConvergence(
            f"Theta not converged to tol={tol:g} after k={k} terms (tail {tail:.3g})", best=res
        )
    return res


def theta_limit(
    mode: ModeOrder,
    u: ParamVec,
    lam: float,
    tol: float = DEFAULT_TOL,
    k_max: int = DEFAULT_K_MAX,
    richardson: bool = False,
    include_lambda: bool = True,
) -> ThetaResult:
    """Theta(Lambda, u) as the limit of the increment recurrence.

    Parameters
    ----------
    mode : ModeOrder
    u : ParamVec
    lam : float
        Eigenvalue parameter Lambda.
    tol : float
        Target for the tail estimate.
    k_max : int
        Maximum number of terms.
    richardson : bool
        Extrapolate the final value assuming error ``~ C k^-(mu+2)``.
    include_lambda : bool
        ``False`` selects the Lambda-free recurrence, valid only at
        ``Lambda = 0``.

    Raises
    ------
    NoConvergence
        With the estimate at ``k_max`` attached as ``best``.
    """
    return _run("series", mode, u, lam, tol, k_max, richardson, include_lambda)


def theta_frobenius(
    mode: ModeOrder,
    u: ParamVec,
    lam: float,
    tol: float = DEFAULT_TOL,
    k_max: int = DEFAULT_K_MAX,
    richardson: bool = False,
) -> ThetaResult:
    """Theta(Lambda, u) from the three-term Frobenius recursion.

    ``(A0 - (k+alpha) I) d_k = (A0 + A1 - C - (k-1+alpha) I) d_{k-1} + C d_{k-2}``
    with ``d_{-1} = 0``.
    """
    return _run("frobenius", mode, u, lam, tol, k_max, richardson)


def theta_sequence(
    mode: ModeOrder, u: ParamVec, lam: float, k_max: int, method: str = "series"
) -> np.ndarray:
    """All partial values ``e1 . d_k`` for ``k = 0..k_max`` (no early stop)."""
    thetas = np.empty(k_max + 1)
    state = np.array([0.0, math.inf])
    args = (mode.mu, float(u.u1), float(u.u2), float(u.u3), float(lam), -1.0, int(k_max))
    if method == "series":
        k, _ = _series_kernel(*args, True, thetas, state)
    elif method == "frobenius":
        k, _ = _frobenius_kernel(*args, thetas, state)
    else:
        raise ValueError(f"unknown method {method!r}")
    if k != k_max:
        raise ArithmeticError(f"non-finite term at k={abs(k)}")
    return thetas


def convergence_order(
    mode: ModeOrder, u: ParamVec, lam: float, k_lo: int = 200, k_hi: int = 2000
) -> float:
    """Empirical exponent of ``|e1 . d_k - Theta|`` against ``k`` on ``[k_lo, k_hi]``.

    The reference Theta is the Richardson-extrapolated value at ``100 * k_hi``.
    Expected result is close to ``-(mu + 2)``.
    """
    if not (k_lo >= 100 and k_hi >= 2 * k_lo):
        raise ValueError("need k_hi >= 2 * k_lo >= 200")
    k_ref = 100 * k_hi
    thetas = theta_sequence(mode, u, lam, k_ref)
    ref = _richardson(thetas, k_ref, mode.mu)
    ks = np.unique(np.geomspace(k_lo, k_hi, 60).astype(int))
    err = np.abs(thetas[ks] - ref)
    keep = err > 0
    if keep.sum() < len(ks) // 2:
        raise DegenerateData("error sequence vanishes before k_lo")
    slope = np.polyfit(np.log(ks[keep]), np.log(err[keep]), 1)[0]
    return float(slope)
