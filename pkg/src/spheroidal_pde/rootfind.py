"""Scalar root finding for Theta restricted to the ``Psi = 0`` surface."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .connection import DEFAULT_K_MAX, DEFAULT_TOL, theta_limit
from .errors import MaxIterations, NoConvergence
from .params import ModeOrder, ParamVec, surface_u3

__all__ = [
    "Bracket",
    "RootResult",
    "ScanResult",
    "theta_on_surface",
    "scan_grid",
    "scan_brackets",
    "refine_root",
    "find_surface_roots",
]

DEFAULT_XTOL = 1e-13
DEFAULT_FTOL = 1e-11
DEFAULT_MAX_ITER = 100


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo * self.f_hi > 0:
            raise ValueError("bracket endpoints have the same sign")


@dataclass(frozen=True)
class RootResult:
    root: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class ScanResult:
    """Brackets found by :func:`scan_brackets` plus the sampled table."""

    brackets: list[Bracket]
    x: np.ndarray
    f: np.ndarray


def theta_on_surface(
    mode: ModeOrder,
    a: float,
    b: float,
    lam: float,
    tol: float = DEFAULT_TOL,
    k_max: int = DEFAULT_K_MAX,
) -> float:
    """``Theta(Lambda, a, b, (a + b^2 - 1) Lambda - 2(mu+1) b)``."""
    u = ParamVec(a, b, surface_u3(mode, a, b, lam))
    return theta_limit(mode, u, lam, tol=tol, k_max=k_max).theta


def scan_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Uniform grid ``lo, lo + step, ...`` not exceeding ``hi`` (up to rounding)."""
    if not lo < hi:
        raise ValueError("scan needs lo < hi")
    if not step > 0:
        raise ValueError("scan needs step > 0")
    n = int(math.floor((hi - lo) / step + 1e-9))
    return lo + step * np.arange(n + 1)


def scan_brackets(
    f: Callable[[float], float], lo: float, hi: float, step: float
) -> ScanResult:
    """Sample ``f`` on a uniform grid and return all sign-change brackets.

    Non-finite samples never form a bracket.
    """
    x = scan_grid(lo, hi, step)
    fx = np.array([f(float(xi)) for xi in x])
    brackets = []
    for i in range(len(x) - 1):
        f0, f1 = fx[i], fx[i + 1]
        if not (np.isfinite(f0) and np.isfinite(f1)):
            continue
        if f0 == 0.0 or f0 * f1 < 0.0:
            brackets.append(Bracket(float(x[i]), float(x[i + 1]), float(f0), float(f1)))
    if len(x) and np.isfinite(fx[-1]) and fx[-1] == 0.0 and len(x) > 1:
        # a zero at the last grid point is not caught by the left-endpoint test
        brackets.append(Bracket(float(x[-2]), float(x[-1]), float(fx[-2]), 0.0))
    return ScanResult(brackets=brackets, x=x, f=fx)


def refine_root(
    f: Callable[[float], float],
    br: Bracket,
    xtol: float = DEFAULT_XTOL,
    ftol: float = DEFAULT_FTOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> RootResult:
    """Secant iteration safeguarded by bisection on a sign-change bracket.

    A secant step is replaced by bisection when it would leave the current
    bracket, when the step length has failed to shrink for three
    iterations, or when the previous step did not halve the bracket (this
    catches the one-sided approach typical of multiple roots).  Iterates
    never leave the initial bracket.

    Raises
    ------
    MaxIterations
        With the best iterate so far attached.
    """
    lo, hi, flo, fhi = br.lo, br.hi, br.f_lo, br.f_hi
    if flo == 0.0:
        return RootResult(lo, 0.0, 0)
    if fhi == 0.0:
        return RootResult(hi, 0.0, 0)
    # the two most recent iterates drive the secant step
    x0, f0, x1, f1 = lo, flo, hi, fhi
    best_x, best_f = (lo, flo) if abs(flo) <= abs(fhi) else (hi, fhi)
    steps = []
    width_ref, since_ref = hi - lo, 0
    for it in range(1, max_iter + 1):
        x = None
        # the previous step did not halve the bracket
        slow = since_ref >= 1 and hi - lo > 0.5 * width_ref
        if f1 != f0 and not slow:
            cand = x1 - f1 * (x1 - x0) / (f1 - f0)
            # stalled: no step of the last three is shorter than the one before them
            stalled = len(steps) >= 4 and min(steps[-3:]) >= steps[-4]
            if lo < cand < hi and not stalled:
                x = cand
        if x is None:
            x = 0.5 * (lo + hi)
            steps.clear()
        # nudge by xtol/2 when the step is below resolution so the bracket collapses
        half = 0.5 * xtol
        if abs(x - x1) < half:
            x = x1 + half if hi - x1 > x1 - lo else x1 - half
            x = min(max(x, lo), hi)
        fx = f(x)
        steps.append(abs(x - x1))
        if abs(fx) < abs(best_f):
            best_x, best_f = x, fx
        if fx == 0.0:
            return RootResult(x, 0.0, it)
        if (fx < 0) == (flo < 0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        x0, f0, x1, f1 = x1, f1, x, fx
        since_ref += 1
        if hi - lo <= 0.5 * width_ref:
            width_ref, since_ref = hi - lo, 0
        if abs(best_f) <= ftol or hi - lo <= xtol:
            return RootResult(best_x, best_f, it)
    raise MaxIterations(
        f"no root within {max_iter} iterations", best=RootResult(best_x, best_f, max_iter)
    )


def find_surface_roots(
    mode: ModeOrder,
    a: float,
    b: float,
    lam_min: float = -3.0,
    lam_max: float = 1.0,
    step: float = 0.05,
    tol: float = DEFAULT_TOL,
    k_max: int = DEFAULT_K_MAX,
    xtol: float = DEFAULT_XTOL,
    ftol: float = DEFAULT_FTOL,
) -> list[RootResult]:
    """All zeros of Theta on the ``Psi = 0`` surface inside a Lambda window.

    Grid points where Theta does not converge are skipped by the scan.
    """

    def f(lam):
        return theta_on_surface(mode, a, b, lam, tol=tol, k_max=k_max)

    def f_scan(lam):
        try:
            return f(lam)
        except NoConvergence:
            return math.nan

    scan = scan_brackets(f_scan, lam_min, lam_max, step)
    return [refine_root(f, br, xtol=xtol, ftol=ftol) for br in scan.brackets]
