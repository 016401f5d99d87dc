"""Characteristic curves of the eigenvalue PDE.

The full system (``GEN``) carries ``(u1, u2, u3, Lambda)``; the reduced
system (``RED``) lives on the surface ``Psi = 0`` and carries
``(u1, u2, Lambda)`` with ``u3`` reconstructed.  Starting from a zero
``Lambda_0`` of Theta on that surface and following the reduced curve to
``Lambda(t0) = 0`` yields an eigenvalue ``(mu+1)(mu - 2 u2(t0))`` of the
angular spheroidal equation at ``gamma^2 = u1(t0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .connection import theta_limit
from .errors import Blowup, BranchLoss, NoCrossing
from .params import ModeOrder, ParamVec, surface_u3

__all__ = [
    "GEN",
    "RED",
    "CharState",
    "TraceResult",
    "rhs_gen_char",
    "rhs_red_char",
    "integrate",
    "trace_to_eigenvalue",
]

GEN = "GenChar"
RED = "RedChar"

BLOWUP_LIMIT = 1e12
EVENT_TOL = 1e-12


@dataclass(frozen=True)
class CharState:
    """A point on a characteristic curve; ``psi`` is the conserved-law monitor."""

    t: float
    u1: float
    u2: float
    lam: float
    u3: float
    psi: float = 0.0

    @property
    def u(self) -> ParamVec:
        return ParamVec(self.u1, self.u2, self.u3)


@dataclass(frozen=True)
class TraceResult:
    t0: float
    state_at_t0: CharState
    gamma2: float
    lambda_: float
    psi_drift_max: float
    samples: list[CharState]


def _psi(mu, u1, u2, u3, lam):
    return lam * (u1 + u2 * u2 - 1.0) - 2.0 * (mu + 1.0) * u2 - u3


def _gen(mu, y):
    u1, u2, u3, lam = y
    q = u1 + u2 * u2
    return np.array(
        [
            2.0 * u1,
            (lam + 2.0) * q + lam + u2 + u3,
            (2.0 * lam + u3 + 2.0) * (2.0 * lam * u2 - 2.0 * mu - 1.0)
            - 2.0 * (mu + 1.0) * q
            + 2.0 * mu,
            (1.0 + 2.0 * mu - 2.0 * lam * u2) * (lam + 2.0) - 2.0 * mu,
        ]
    )


def _red(mu, y):
    u1, u2, lam = y
    return np.array(
        [
            2.0 * u1,
            2.0 * (lam + 1.0) * (u1 + u2 * u2) - (2.0 * mu + 1.0) * u2,
            (1.0 + 2.0 * mu - 2.0 * lam * u2) * (lam + 2.0) - 2.0 * mu,
        ]
    )


def rhs_gen_char(mode: ModeOrder, s: CharState) -> np.ndarray:
    """``(du1, du2, du3, dLambda)/dt`` of the full characteristic system."""
    return _gen(mode.mu, (s.u1, s.u2, s.u3, s.lam))


def rhs_red_char(mode: ModeOrder, s: CharState) -> np.ndarray:
    """``(du1, du2, dLambda)/dt`` of the reduced system; ``s.u3`` is ignored."""
    return _red(mode.mu, (s.u1, s.u2, s.lam))


def _rk4(f, mu, y, h):
    k1 = f(mu, y)
    k2 = f(mu, y + 0.5 * h * k1)
    k3 = f(mu, y + 0.5 * h * k2)
    k4 = f(mu, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_blowup(y, t):
    if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > BLOWUP_LIMIT:
        raise Blowup(f"characteristic left |x| <= {BLOWUP_LIMIT:g} near t={t:.6g}", t=t)


def _to_vec(system, s):
    if system == GEN:
        return np.array([s.u1, s.u2, s.u3, s.lam])
    return np.array([s.u1, s.u2, s.lam])


def _to_state(mu, system, t, y):
    if system == GEN:
        u1, u2, u3, lam = (float(v) for v in y)
    else:
        u1, u2, lam = (float(v) for v in y)
        u3 = lam * (u1 + u2 * u2 - 1.0) - 2.0 * (mu + 1.0) * u2
    return CharState(t=t, u1=u1, u2=u2, lam=lam, u3=u3, psi=_psi(mu, u1, u2, u3, lam))


def _step_sizes(h, t_max):
    n = max(1, math.ceil(abs(t_max) / h - 1e-9))
    sizes = [h] * n
    sizes[-1] = abs(t_max) - h * (n - 1)
    sign = 1.0 if t_max >= 0 else -1.0
    return [sign * s for s in sizes if s > 0]


def integrate(
    mode: ModeOrder,
    system: str,
    init: CharState,
    h: float,
    t_max: float,
    stop_on_blowup: bool = False,
) -> list[CharState]:
    """Fixed-step classical Runge-Kutta from ``init.t`` over a span ``t_max``.

    A negative ``t_max`` integrates backward.  For the reduced system ``u3``
    is reconstructed on the ``Psi = 0`` surface at every sample; for the full
    system ``psi`` records Psi along the curve.

    Raises
    ------
    Blowup
        If any component exceeds ``1e12`` in magnitude, unless
        ``stop_on_blowup`` is set, in which case the samples before the
        escape are returned.
    """
    if system not in (GEN, RED):
        raise ValueError(f"unknown system {system!r}")
    if not h > 0:
        raise ValueError("h must be positive")
    if t_max == 0:
        raise ValueError("t_max must be nonzero")
    f = _gen if system == GEN else _red
    mu = mode.mu
    y = _to_vec(system, init)
    t = init.t
    out = [_to_state(mu, system, t, y)]
    for i, dt in enumerate(_step_sizes(h, t_max), start=1):
        y = _rk4(f, mu, y, dt)
        t = init.t + _t_after(h, t_max, i)
        try:
            _check_blowup(y, t)
        except Blowup:
            if stop_on_blowup:
                break
            raise
        out.append(_to_state(mu, system, t, y))
    return out


def _t_after(h, t_max, i):
    # i * h rather than a running sum, so sample times do not drift
    span = abs(t_max)
    return math.copysign(min(i * h, span), t_max)


def _find_crossing(mu, y_start, c_start, h, t_max, validate):
    """March until Lambda changes sign; returns bracket data or ``None``."""
    y = y_start
    c = c_start
    t = 0.0
    samples = [(t, y, c)]
    for i, dt in enumerate(_step_sizes(h, t_max), start=1):
        y_new = _rk4(_red, mu, y, dt)
        c_new = _rk4(_gen, mu, c, dt)
        t_new = _t_after(h, t_max, i)
        _check_blowup(y_new, t_new)
        if validate is not None:
            validate(i, t_new, y_new)
        if y_new[2] == 0.0 or y[2] * y_new[2] < 0.0:
            return samples, (t, y, c, dt)
        samples.append((t_new, y_new, c_new))
        y, c, t = y_new, c_new, t_new
    return samples, None


def trace_to_eigenvalue(
    mode: ModeOrder,
    a: float,
    b: float,
    lambda0: float,
    h: float = 1e-3,
    t_max: float = 1.0,
    validate_every: int = 0,
    validate_tol: float = 1e-6,
) -> TraceResult:
    """Follow the reduced characteristic from ``(a, b, Lambda_0)`` to ``Lambda = 0``.

    ``Lambda_0`` must be a zero of Theta on the ``Psi = 0`` surface through
    ``(a, b)``.  The first sign change of ``Lambda(t)`` is searched forward
    on ``[0, t_max]`` and then backward on ``[-t_max, 0]``; the crossing is
    refined by bisecting a single Runge-Kutta step from the bracket start
    until ``|Lambda(t0)| <= 1e-12``.

    ``psi_drift_max`` is the largest ``|Psi|`` met along the full system
    integrated alongside from the same initial point; it should stay at
    rounding level because ``Psi`` obeys ``dPsi/dt = Psi`` with ``Psi(0) = 0``.

    With ``validate_every = N > 0`` the eigenvalue condition
    ``|Theta(Lambda(t), u(t))| <= validate_tol`` is checked every N steps and
    :class:`BranchLoss` is raised if it fails.
    """
    mu = mode.mu
    c0 = surface_u3(mode, a, b, lambda0)
    y0 = np.array([a, b, lambda0], dtype=float)
    g0 = np.array([a, b, c0, lambda0], dtype=float)

    validate = None
    if validate_every > 0:

        def validate(i, t, y):
            if i % validate_every:
                return
            u3 = surface_u3(mode, y[0], y[1], y[2])
            th = theta_limit(mode, ParamVec(y[0], y[1], u3), y[2], tol=1e-10).theta
            if abs(th) > validate_tol:
                raise BranchLoss(f"|Theta| = {abs(th):.3g} at t = {t:.6g} left the eigenvalue surface")

    if lambda0 == 0.0:
        st = _to_state(mu, RED, 0.0, y0)
        return TraceResult(0.0, st, st.u1, (mu + 1.0) * (mu - 2.0 * st.u2), 0.0, [st])

    found = None
    for span in (t_max, -t_max):
        samples, found = _find_crossing(mu, y0, g0, h, span, validate)
        if found is not None:
            break
    if found is None:
        raise NoCrossing(t_max)

    t_lo, y_lo, c_lo, dt = found
    s_lo, s_hi = 0.0, dt
    s_best, y_best = dt, _rk4(_red, mu, y_lo, dt)
    while abs(y_best[2]) > EVENT_TOL:
        s_mid = 0.5 * (s_lo + s_hi)
        if s_mid in (s_lo, s_hi):
            break
        y_mid = _rk4(_red, mu, y_lo, s_mid)
        if abs(y_mid[2]) < abs(y_best[2]):
            s_best, y_best = s_mid, y_mid
        if y_mid[2] * y_lo[2] > 0.0:
            s_lo = s_mid
        else:
            s_hi = s_mid
    y_fin = y_best
    c_fin = _rk4(_gen, mu, c_lo, s_best)
    t0 = t_lo + s_best

    states = [_to_state(mu, RED, t, y) for t, y, _ in samples]
    end = _to_state(mu, RED, t0, y_fin)
    states.append(end)
    psi_gen = [abs(_psi(mu, *c[:3], c[3])) for _, _, c in samples]
    psi_gen.append(abs(_psi(mu, *c_fin[:3], c_fin[3])))
    return TraceResult(
        t0=t0,
        state_at_t0=end,
        gamma2=end.u1,
        lambda_=(mu + 1.0) * (mu - 2.0 * end.u2),
        psi_drift_max=max(psi_gen),
        samples=states,
    )
