"""Numerical checks of the deformation identities and the eigenvalue PDEs.

The matrix identities are exact, so their residuals must vanish to rounding
level.  The PDEs involve an eigenvalue surface with no closed form, so they
are checked by central differences on surfaces obtained from Theta by local
continuation; the residual then decays like ``h^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .connection import DEFAULT_K_MAX, DEFAULT_TOL, theta_limit
from .errors import BranchLoss, MaxIterations, NoConvergence
from .params import (
    BurgersChart,
    ModeOrder,
    ParamVec,
    SpheroidalChart,
    eval_g,
    eval_ghat,
    eval_h,
    eval_hhat,
    eval_j,
    eval_w,
    surface_u3,
)
from .rootfind import Bracket, refine_root

__all__ = [
    "PdeCoefficients",
    "HatPdeCoefficients",
    "ResidualReport",
    "qpde_coefficients",
    "hat_pde_coefficients",
    "dG_dz",
    "dH_du",
    "dHhat_dv",
    "deformation_terms",
    "deformation_residual",
    "hat_deformation_terms",
    "hat_deformation_residual",
    "scaled_residual",
    "chain_rule_residuals",
    "continue_root",
    "local_surface",
    "qpde_residual",
    "omega_on_surface",
    "spde_forcing",
    "burgers_forcing",
    "burgers_form",
    "spde_residual",
]


@dataclass(frozen=True)
class PdeCoefficients:
    f1: float
    f2: float
    f3: float
    g: float


@dataclass(frozen=True)
class HatPdeCoefficients:
    f1_hat: float
    f2_hat: float
    g_hat: float


@dataclass(frozen=True)
class ResidualReport:
    max_abs_residual: float
    grid_spec: str
    order_estimate: float | None = None
    scale: float | None = None
    details: dict = field(default_factory=dict)


def qpde_coefficients(mode: ModeOrder, u: ParamVec, lam: float) -> PdeCoefficients:
    mu = mode.mu
    u1, u2, u3 = u
    q = u1 + u2 * u2
    return PdeCoefficients(
        f1=2.0 * u1,
        f2=(lam + 2.0) * q + lam + u2 + u3,
        f3=(2.0 * lam + u3 + 2.0) * (2.0 * lam * u2 - 2.0 * mu - 1.0) - 2.0 * (mu + 1.0) * q + 2.0 * mu,
        g=(1.0 + 2.0 * mu - 2.0 * lam * u2) * (lam + 2.0) - 2.0 * mu,
    )


def hat_pde_coefficients(mode: ModeOrder, c: SpheroidalChart) -> HatPdeCoefficients:
    v1, v2, zeta = c.v1, c.v2, c.zeta
    return HatPdeCoefficients(
        f1_hat=(zeta + v2) * (1.0 - v1 * v1),
        f2_hat=(zeta * v1 + v1 * v2 + 0.5) * v2,
        g_hat=4.0 * mode.alpha**2 * v1 * (1.0 - v1 * v1) - zeta * v1 * v2,
    )


# -- closed-form derivatives -------------------------------------------------


def dG_dz(u: ParamVec) -> np.ndarray:
    u2 = u.u2
    return np.array([[2.0, 2.0 * u2], [2.0 * u2, 2.0 * (u.u1 + u2 * u2)]])


def dH_du(u: ParamVec, z: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return (
        np.array([[0.0, 0.0], [0.0, 2.0]]),
        np.array([[0.0, 2.0], [2.0, 4.0 * u.u2]]),
        np.array([[0.0, 0.0], [0.0, 1.0 / z]]),
    )


def dHhat_dv(mode: ModeOrder, c: SpheroidalChart, z: float) -> tuple[np.ndarray, np.ndarray]:
    a = mode.alpha
    d1 = np.array([[2.0 * a / (1.0 - z), 2.0 * c.v2], [2.0 * c.v2, -2.0 * a / z]])
    d2 = np.array([[2.0, 2.0 * c.v1], [2.0 * c.v1, 2.0]])
    return d1, d2


def dGhat_dz(c: SpheroidalChart) -> np.ndarray:
    return np.array([[c.v2, c.v1 * c.v2], [c.v1 * c.v2, c.v2]])


# -- deformation identities --------------------------------------------------


def deformation_terms(mode: ModeOrder, u: ParamVec, lam: float, z: float) -> list[np.ndarray]:
    """Signed terms whose sum is the deformation residual.

    Order: ``dG/dz``, ``(Lambda W + H) J G``, ``-G J (Lambda W + H)``,
    ``-f_k dH/du_k`` for k = 1..3, ``-g W``.
    """
    W = eval_w(z)
    H = eval_h(mode, u, z)
    G = eval_g(mode, u, lam, z)
    J = eval_j()
    M = lam * W + H
    co = qpde_coefficients(mode, u, lam)
    h1, h2, h3 = dH_du(u, z)
    return [
        dG_dz(u),
        M @ J @ G,
        -(G @ J @ M),
        -co.f1 * h1,
        -co.f2 * h2,
        -co.f3 * h3,
        -co.g * W,
    ]


def deformation_residual(mode: ModeOrder, u: ParamVec, lam: float, z: float) -> np.ndarray:
    """``dG/dz + (Lambda W + H) J G - G J (Lambda W + H) - sum f_k dH/du_k - g W``."""
    return sum(deformation_terms(mode, u, lam, z))


def hat_deformation_terms(mode: ModeOrder, c: SpheroidalChart, z: float) -> list[np.ndarray]:
    W = eval_w(z)
    H = eval_hhat(mode, c, z)
    G = eval_ghat(mode, c, z)
    J = eval_j()
    M = c.zeta * W + H
    co = hat_pde_coefficients(mode, c)
    d1, d2 = dHhat_dv(mode, c, z)
    return [
        dGhat_dz(c),
        M @ J @ G,
        -(G @ J @ M),
        -co.f1_hat * d1,
        -co.f2_hat * d2,
        -co.g_hat * W,
    ]


def hat_deformation_residual(mode: ModeOrder, c: SpheroidalChart, z: float) -> np.ndarray:
    return sum(hat_deformation_terms(mode, c, z))


def scaled_residual(terms: list[np.ndarray]) -> float:
    """``max |sum of terms|`` divided by the largest entry of any single term."""
    scale = max(float(np.abs(t).max()) for t in terms)
    res = float(np.abs(sum(terms)).max())
    return res / scale if scale > 0 else res


def chain_rule_residuals(c: SpheroidalChart) -> tuple[float, float]:
    """Residuals of the two identities linking the hat PDE to the Burgers chart.

    ``2 omega / cosh^2 u = 2 (zeta + v2)(1 - v1^2)`` and
    ``e^t cosh u + 2 omega e^t sinh u = 2 (zeta v1 + v1 v2 + 1/2) v2``,
    each returned relative to the magnitude of its terms.
    """
    u = math.atanh(c.v1)
    t = math.log(c.v2 / math.cosh(u))
    omega = c.zeta + c.v2
    et = math.exp(t)
    l1 = 2.0 * omega / math.cosh(u) ** 2
    r1 = 2.0 * (c.zeta + c.v2) * (1.0 - c.v1 * c.v1)
    l2 = et * math.cosh(u) + 2.0 * omega * et * math.sinh(u)
    r2 = 2.0 * (c.zeta * c.v1 + c.v1 * c.v2 + 0.5) * c.v2
    s1 = max(abs(l1), abs(r1), 2.0 * abs(c.v2), 2.0 * abs(c.zeta), 1e-300)
    s2 = max(
        abs(et * math.cosh(u)),
        abs(2.0 * omega * et * math.sinh(u)),
        abs(2.0 * c.zeta * c.v1 * c.v2),
        abs(2.0 * c.v1 * c.v2 * c.v2),
        1e-300,
    )
    return abs(l1 - r1) / s1, abs(l2 - r2) / s2


# -- continuation of eigenvalue surfaces -------------------------------------


def continue_root(
    f,
    seed: float,
    h: float,
    max_jump: float = 0.5,
    xtol: float = 1e-13,
    ftol: float = 0.0,
) -> float:
    """Zero of ``f`` on the branch through ``seed``.

    A sign change is searched in windows ``seed +/- w`` with ``w`` growing
    from ``4 h`` by doubling up to ``max_jump``; the root closest to the seed
    is then refined.

    Raises
    ------
    BranchLoss
        If no bracket is found within ``max_jump`` or the refinement fails.
    """

    def g(x):
        try:
            return f(x)
        except NoConvergence as exc:
            return exc.best.theta

    w = 4.0 * h
    f0 = g(seed)
    if f0 == 0.0:
        return seed
    while w <= max_jump:
        fl, fr = g(seed - w), g(seed + w)
        cands = []
        if f0 * fr <= 0.0:
            cands.append(Bracket(seed, seed + w, f0, fr))
        if fl * f0 <= 0.0:
            cands.append(Bracket(seed - w, seed, fl, f0))
        if cands:
            try:
                roots = [refine_root(g, br, xtol=xtol, ftol=ftol, max_iter=200) for br in cands]
            except MaxIterations as exc:
                raise BranchLoss(f"refinement failed near {seed!r}") from exc
            return min((r.root for r in roots), key=lambda x: abs(x - seed))
        w *= 2.0
    raise BranchLoss(f"no eigenvalue within {max_jump} of seed {seed!r}")


def _theta_fn(mode, u, tol, k_max):
    return lambda lam: theta_limit(mode, u, lam, tol=tol, k_max=k_max).theta


def local_surface(
    mode: ModeOrder,
    center: ParamVec,
    lambda_seed: float,
    h: float = 1e-3,
    tol: float = DEFAULT_TOL,
    k_max: int = DEFAULT_K_MAX,
    max_jump: float = 0.5,
) -> dict[str, float]:
    """Eigenvalues on a 7-point stencil ``center``, ``center +/- h e_i``.

    Keys are ``"0"`` for the centre and ``"+1"``, ``"-1"``, ... ``"-3"``
    for the displaced points.  Each displaced value is continued from the
    centre value.
    """
    lam_c = continue_root(_theta_fn(mode, center, tol, k_max), lambda_seed, h, max_jump)
    out = {"0": lam_c}
    base = center.as_array()
    for i in range(3):
        for sgn in (1, -1):
            p = base.copy()
            p[i] += sgn * h
            fn = _theta_fn(mode, ParamVec(*p), tol, k_max)
            out[f"{'+' if sgn > 0 else '-'}{i + 1}"] = continue_root(fn, lam_c, h, max_jump)
    return out


def _qpde_once(mode, center, lambda_seed, h, tol, k_max):
    st = local_surface(mode, center, lambda_seed, h, tol, k_max)
    grad = [(st[f"+{i}"] - st[f"-{i}"]) / (2.0 * h) for i in (1, 2, 3)]
    co = qpde_coefficients(mode, center, st["0"])
    terms = [co.f1 * grad[0], co.f2 * grad[1], co.f3 * grad[2], -co.g]
    return abs(sum(terms)), max(abs(x) for x in terms), st["0"]


def qpde_residual(
    mode: ModeOrder,
    center: ParamVec,
    lambda_seed: float,
    h: float = 1e-3,
    tol: float = DEFAULT_TOL,
    k_max: int = DEFAULT_K_MAX,
) -> ResidualReport:
    """Central-difference residual of ``f1 L_u1 + f2 L_u2 + f3 L_u3 - g``.

    ``order_estimate`` is ``residual(h) / residual(h/2)`` (about 4 for a
    second-order stencil).
    """
    r1, scale, lam_c = _qpde_once(mode, center, lambda_seed, h, tol, k_max)
    r2, _, _ = _qpde_once(mode, center, lam_c, h / 2.0, tol, k_max)
    return ResidualReport(
        max_abs_residual=r1,
        grid_spec=f"7-point central stencil, h={h:g} and h/2",
        order_estimate=r1 / r2 if r2 > 0 else math.inf,
        scale=scale,
        details={"residual_h": r1, "residual_h2": r2, "lambda_center": lam_c},
    )


# -- Burgers chart -----------------------------------------------------------


def omega_on_surface(
    mode: ModeOrder,
    t: float,
    u: float,
    lambda_seed: float,
    h: float = 1e-3,
    tol: float = DEFAULT_TOL,
    k_max: int = DEFAULT_K_MAX,
    max_jump: float = 0.5,
) -> tuple[float, float]:
    """``(omega, Lambda)`` at ``(t, u)`` on the branch through ``lambda_seed``.

    Maps ``(t, u)`` to ``u1 = e^(2t)``, ``u2 = e^t sinh u``, solves for
    Lambda on the ``Psi = 0`` surface, then ``zeta = Lambda v2 - (mu+1) v1``
    and ``omega = zeta + v2``.
    """
    v1 = math.tanh(u)
    v2 = math.exp(t) * math.cosh(u)
    u1 = (1.0 - v1 * v1) * v2 * v2
    u2 = v1 * v2

    def fn(lam):
        p = ParamVec(u1, u2, surface_u3(mode, u1, u2, lam))
        return theta_limit(mode, p, lam, tol=tol, k_max=k_max).theta

    lam = continue_root(fn, lambda_seed, h, max_jump)
    zeta = lam * v2 - (mode.mu + 1.0) * v1
    return zeta + v2, lam


def spde_forcing(mode: ModeOrder, t: float, u: float) -> float:
    """Right-hand side of ``omega_t + 2 omega omega_u = F(t, u)``."""
    return (
        2.0 * (mode.mu + 1.0) ** 2 * math.tanh(u) / math.cosh(u) ** 2
        + math.exp(2.0 * t) * math.sinh(2.0 * u)
        + math.exp(t) * math.cosh(u)
    )


def burgers_forcing(mode: ModeOrder, s: float, u: float) -> float:
    """Forcing ``f(s, u)`` of ``omega_s + omega omega_u = f`` with ``s = 2t``."""
    return (
        (mode.mu + 1.0) ** 2 * math.tanh(u) / math.cosh(u) ** 2
        + 0.5 * math.exp(s) * math.sinh(2.0 * u)
        + 0.5 * math.exp(0.5 * s) * math.cosh(u)
    )


def burgers_form(mode: ModeOrder, b: BurgersChart) -> float:
    return burgers_forcing(mode, 2.0 * b.t, b.u)


def _spde_once(mode, t, u, seed, h, tol, k_max):
    w0, lam0 = omega_on_surface(mode, t, u, seed, h, tol, k_max)
    wtp, _ = omega_on_surface(mode, t + h, u, lam0, h, tol, k_max)
    wtm, _ = omega_on_surface(mode, t - h, u, lam0, h, tol, k_max)
    wup, _ = omega_on_surface(mode, t, u + h, lam0, h, tol, k_max)
    wum, _ = omega_on_surface(mode, t, u - h, lam0, h, tol, k_max)
    w_t = (wtp - wtm) / (2.0 * h)
    w_u = (wup - wum) / (2.0 * h)
    rhs = spde_forcing(mode, t, u)
    terms = [w_t, 2.0 * w0 * w_u, -rhs]
    return abs(sum(terms)), max(abs(x) for x in terms), lam0


def spde_residual(
    mode: ModeOrder,
    b: BurgersChart,
    lambda_seed: float,
    h: float = 1e-3,
    tol: float = DEFAULT_TOL,
    k_max: int = DEFAULT_K_MAX,
) -> ResidualReport:
    """Central-difference residual of ``omega_t + 2 omega omega_u - F(t, u)`` at ``(b.t, b.u)``.

    ``b.omega`` is not used; omega is recomputed from Theta.
    """
    r1, scale, lam_c = _spde_once(mode, b.t, b.u, lambda_seed, h, tol, k_max)
    r2, _, _ = _spde_once(mode, b.t, b.u, lam_c, h / 2.0, tol, k_max)
    return ResidualReport(
        max_abs_residual=r1,
        grid_spec=f"5-point central stencil in (t, u), h={h:g} and h/2",
        order_estimate=r1 / r2 if r2 > 0 else math.inf,
        scale=scale,
        details={"residual_h": r1, "residual_h2": r2, "lambda_center": lam_c},
    )
