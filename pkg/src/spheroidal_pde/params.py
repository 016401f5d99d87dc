"""Parameter types, coordinate charts and the 2x2 coefficient matrices.

Three coordinate systems describe the same eigenvalue problem:

* ``(u1, u2, u3)`` with eigenvalue slot ``Lambda`` -- the general
  Hamiltonian system ``J y' - H y = Lambda W y`` on ``0 < z < 1``;
* ``(v1, v2, zeta)`` -- the spheroidal chart on the surface ``beta = 0``;
* ``(t, u, omega)`` -- the Burgers chart, ``v1 = tanh u``,
  ``v2 = e^t cosh u``, ``omega = zeta + v2``.

The Coulomb spheroidal parameters relate to the first chart by
``gamma^2 = u1``, ``beta = -u3 - 2(mu+1) u2``, ``lambda = u3 + mu(mu+1)``.

All matrices are returned as ``(2, 2)`` float64 numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ModeOrder",
    "ParamVec",
    "CswParams",
    "SpheroidalChart",
    "BurgersChart",
    "u_from_csw",
    "csw_from_u",
    "chart_to_spheroidal",
    "spheroidal_to_u",
    "chart_to_burgers",
    "burgers_to_spheroidal",
    "eval_psi",
    "surface_u3",
    "eval_w",
    "eval_j",
    "eval_h",
    "eval_g",
    "eval_hhat",
    "eval_ghat",
    "eval_phi",
]


def _check_finite(obj, names):
    for name in names:
        if not math.isfinite(getattr(obj, name)):
            raise DomainError(f"{type(obj).__name__}.{name} must be finite")


@dataclass(frozen=True)
class ModeOrder:
    """Order ``mu >= 0`` of the spheroidal equation and ``alpha = (mu+1)/2``."""

    mu: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu >= 0):
            raise DomainError(f"mu must be finite and >= 0, got {self.mu!r}")
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def alpha(self) -> float:
        return (self.mu + 1.0) / 2.0


@dataclass(frozen=True)
class ParamVec:
    """Deformation parameters ``(u1, u2, u3)``."""

    u1: float
    u2: float
    u3: float

    def __post_init__(self):
        _check_finite(self, ("u1", "u2", "u3"))

    def __iter__(self):
        return iter((self.u1, self.u2, self.u3))

    def as_array(self) -> np.ndarray:
        return np.array([self.u1, self.u2, self.u3], dtype=float)


@dataclass(frozen=True)
class CswParams:
    """Coulomb spheroidal parameters: ``gamma2`` (gamma squared), ``beta``, ``lambda_``."""

    gamma2: float
    beta: float
    lambda_: float

    def __post_init__(self):
        _check_finite(self, ("gamma2", "beta", "lambda_"))


@dataclass(frozen=True)
class SpheroidalChart:
    v1: float
    v2: float
    zeta: float

    def __post_init__(self):
        _check_finite(self, ("v1", "v2", "zeta"))
        if not -1.0 < self.v1 < 1.0:
            raise DomainError(f"v1 must lie in (-1, 1), got {self.v1!r}")
        if not self.v2 > 0.0:
            raise DomainError(f"v2 must be positive, got {self.v2!r}")


@dataclass(frozen=True)
class BurgersChart:
    t: float
    u: float
    omega: float

    def __post_init__(self):
        _check_finite(self, ("t", "u", "omega"))

    @property
    def v1(self) -> float:
        return math.tanh(self.u)

    @property
    def v2(self) -> float:
        return math.exp(self.t) * math.cosh(self.u)


# -- parameter maps ----------------------------------------------------------


def u_from_csw(mode: ModeOrder, p: CswParams) -> tuple[ParamVec, bool]:
    """Map CSWE parameters to ``u``.

    The second element is always ``True``: the CSWE eigenvalue ``p.lambda_``
    corresponds to the eigenvalue ``Lambda = 0`` of the Hamiltonian system
    at the returned ``u``.
    """
    u3 = p.lambda_ - mode.mu * (mode.mu + 1.0)
    u2 = -(p.beta + u3) / (2.0 * (mode.mu + 1.0))
    return ParamVec(p.gamma2, u2, u3), True


def csw_from_u(mode: ModeOrder, u: ParamVec) -> CswParams:
    return CswParams(
        gamma2=u.u1,
        beta=-u.u3 - 2.0 * (mode.mu + 1.0) * u.u2,
        lambda_=u.u3 + mode.mu * (mode.mu + 1.0),
    )


def chart_to_spheroidal(mode: ModeOrder, u: ParamVec, lam: float) -> SpheroidalChart:
    """``(u, Lambda) -> (v1, v2, zeta)``; defined for ``u1 + u2^2 > 0``.

    ``u3`` does not enter: on the ``beta = 0`` surface it is a function of
    the other coordinates (see :func:`surface_u3`).
    """
    q = u.u1 + u.u2 * u.u2
    if not q > 0.0:
        raise DomainError(f"chart undefined for u1 + u2^2 = {q!r} <= 0")
    v2 = math.sqrt(q)
    return SpheroidalChart(
        v1=u.u2 / v2,
        v2=v2,
        zeta=(lam * q - 2.0 * mode.alpha * u.u2) / v2,
    )


def spheroidal_to_u(mode: ModeOrder, c: SpheroidalChart) -> tuple[ParamVec, float]:
    """Inverse of :func:`chart_to_spheroidal`; ``u3`` is put on the ``Psi = 0`` surface."""
    u2 = c.v1 * c.v2
    u1 = (1.0 - c.v1 * c.v1) * c.v2 * c.v2
    lam = (c.zeta + 2.0 * mode.alpha * c.v1) / c.v2
    return ParamVec(u1, u2, surface_u3(mode, u1, u2, lam)), lam


def chart_to_burgers(c: SpheroidalChart) -> BurgersChart:
    u = math.atanh(c.v1)
    return BurgersChart(t=math.log(c.v2 / math.cosh(u)), u=u, omega=c.zeta + c.v2)


def burgers_to_spheroidal(b: BurgersChart) -> SpheroidalChart:
    v2 = b.v2
    return SpheroidalChart(v1=b.v1, v2=v2, zeta=b.omega - v2)


# -- conserved quantity ------------------------------------------------------


def surface_u3(mode: ModeOrder, u1: float, u2: float, lam: float) -> float:
    """``u3`` on the surface ``Psi = 0``, i.e. where ``beta = 0`` once ``Lambda = 0``."""
    return lam * (u1 + u2 * u2 - 1.0) - 2.0 * (mode.mu + 1.0) * u2


def eval_psi(mode: ModeOrder, u: ParamVec, lam: float) -> float:
    """``Psi = Lambda (u1 + u2^2 - 1) - 2(mu+1) u2 - u3``."""
    return surface_u3(mode, u.u1, u.u2, lam) - u.u3


# -- matrices ----------------------------------------------------------------


def _check_z(z):
    if not 0.0 < z < 1.0:
        raise DomainError(f"z must lie in the open interval (0, 1), got {z!r}")


def eval_j() -> np.ndarray:
    return np.array([[0.0, -1.0], [1.0, 0.0]])


def eval_w(z: float) -> np.ndarray:
    """Weight ``W(z) = diag(1/(1-z), 1/z)``."""
    _check_z(z)
    return np.array([[1.0 / (1.0 - z), 0.0], [0.0, 1.0 / z]])


def eval_h(mode: ModeOrder, u: ParamVec, z: float) -> np.ndarray:
    _check_z(z)
    a = mode.alpha
    off = -a / z + a / (1.0 - z) + 2.0 * u.u2
    return np.array([[2.0, off], [off, u.u3 / z + 2.0 * (u.u1 + u.u2 * u.u2)]])


def eval_g(mode: ModeOrder, u: ParamVec, lam: float, z: float) -> np.ndarray:
    """Generator ``G(z, Lambda, u)`` of the deformation identity."""
    _check_z(z)
    off = 2.0 * z * u.u2 + lam * u.u2 - mode.mu - 0.5
    return np.array([[2.0 * z, off], [off, 2.0 * (z - 1.0) * (u.u1 + u.u2 * u.u2)]])


def eval_hhat(mode: ModeOrder, c: SpheroidalChart, z: float) -> np.ndarray:
    _check_z(z)
    a = mode.alpha
    off = -a / z + a / (1.0 - z) + 2.0 * c.v1 * c.v2
    return np.array(
        [
            [2.0 * c.v2 + 2.0 * a * c.v1 / (1.0 - z), off],
            [off, 2.0 * c.v2 - 2.0 * a * c.v1 / z],
        ]
    )


def eval_ghat(mode: ModeOrder, c: SpheroidalChart, z: float) -> np.ndarray:
    _check_z(z)
    off = c.v1 * c.v2 * z + mode.alpha * (c.v1 * c.v1 - 1.0) - 0.5 * c.v1 * c.v2
    return np.array([[c.v2 * z, off], [off, c.v2 * (z - 1.0)]])


def eval_phi(mode: ModeOrder, b: BurgersChart, z: float) -> np.ndarray:
    """Coefficient matrix of the Burgers-chart system; equals ``Hhat - v2 W``."""
    _check_z(z)
    a = mode.alpha
    et = math.exp(b.t)
    ch = et * math.cosh(b.u)
    sh = et * math.sinh(b.u)
    th = math.tanh(b.u)
    off = -a / z + a / (1.0 - z) + 2.0 * sh
    return np.array(
        [
            [2.0 * ch + (2.0 * a * th - ch) / (1.0 - z), off],
            [off, 2.0 * ch - (2.0 * a * th + ch) / z],
        ]
    )
