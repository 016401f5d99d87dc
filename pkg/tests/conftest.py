"""Shared constants and independent reference implementations for the tests."""

import mpmath as mp
import numpy as np

# published values for mu = 1, a = 5, b = 0
PUBLISHED_LAMBDA0 = -0.8417200168449013
PUBLISHED_T0 = 0.2793371978706399
PUBLISHED_GAMMA2 = 8.7417666942941543
PUBLISHED_LAMBDA = -5.2736106330552739


def mp_frobenius_sequence(mu, u1, u2, u3, lam, k_max, dps=30):
    """``e1 . d_k`` for ``k = 0..k_max`` from the Floquet ansatz, in mpmath.

    Built directly from the system ``y' = (A0/z + A1/(z-1) + C) y`` with
    generic 2x2 solves, independent of the package kernels.
    """
    with mp.workdps(dps):
        mu, u1, u2, u3, lam = (mp.mpf(x) for x in (mu, u1, u2, u3, lam))
        a = (mu + 1) / 2
        A0 = mp.matrix([[-a, u3 + lam], [0, a]])
        A1 = mp.matrix([[-1, 0], [lam, 2 * a - 1]])
        C = mp.matrix([[2 * u2, 2 * (u1 + u2**2)], [-2, -2 * u2]])
        eye = mp.eye(2)
        prev = mp.matrix([[0], [0]])
        d = mp.matrix([[(u3 + lam) / (2 * a)], [1]])
        out = [d[0]]
        for n in range(1, k_max + 1):
            rhs = (A0 + A1 - C - (n - 1 + a) * eye) * d + C * prev
            prev, d = d, mp.lu_solve(A0 - (n + a) * eye, rhs)
            out.append(d[0])
        return np.array([float(x) for x in out])


def rk4_reference(f, y0, t_end, n):
    """Plain RK4 with ``n`` equal steps; used for step-halving checks."""
    y = np.array(y0, dtype=float)
    h = t_end / n
    for _ in range(n):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


# one (criterion, passed, detail) entry per acceptance criterion, in run order
ACCEPTANCE_RESULTS = []


def record_criterion(number, title, passed, detail):
    ACCEPTANCE_RESULTS.append((number, title, bool(passed), detail))
    print(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}")
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}")
