"""Ground truth for the 2x2 propagator by direct ODE integration.

``dX/dt = A X, X(0) = I`` is integrated with the 5-stage Radau IIA
collocation method (order 9, L-stable) under step-doubling error control.
For a linear autonomous system one Runge-Kutta step of size ``h`` is the
matrix ``S(h) = I + h (b^T x I)(I - h a x A)^{-1}(1 x A)``, so steps are
cached per step size. Nothing here uses eigenvalues of ``A``.
"""
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from .errors import DomainError, NumericalFailure

_STAGES = 5
_ORDER = 2 * _STAGES - 1


@lru_cache(maxsize=None)
def radau_iia_tableau(stages=_STAGES):
    """Butcher coefficients ``(a, b, c)`` of the s-stage Radau IIA collocation method."""
    coefs = np.zeros(stages + 1)
    coefs[stages] = 1.0
    coefs[stages - 1] = -1.0
    x = np.sort(legendre.legroots(coefs).real)
    c = (x + 1.0) / 2.0
    c[-1] = 1.0
    vinv = np.linalg.inv(np.vander(c, stages, increasing=True))
    powers = np.arange(1, stages + 1)
    a = (c[:, None] ** powers[None, :] / powers[None, :]) @ vinv
    b = (1.0 / powers) @ vinv
    return a, b, c


def generator(R, params):
    """The matrix ``A`` of the linear mode equation at ``R = |xi|^2``."""
    mu, chi, gam = params.mu, params.chi, params.gamma
    return np.array([[-(mu + chi) * R, 2 * chi * R], [2 * chi, -(gam * R + 4 * chi)]], dtype=float)


def _step_matrix(A, h):
    a, b, _ = radau_iia_tableau()
    s, m = len(b), A.shape[0]
    lhs = np.eye(s * m) - h * np.kron(a, A)
    stage = np.linalg.solve(lhs, np.kron(np.ones((s, 1)), A))
    return np.eye(m) + h * np.kron(b[None, :], np.eye(m)) @ stage


def integrate_linear(A, t, rtol=1e-12, max_steps=2_000_000):
    """``e^{tA}`` for a small real matrix with entrywise positive exponential."""
    t = float(t)
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")
    m = A.shape[0]
    X = np.eye(m)
    if t == 0:
        return X
    scale = np.abs(A).max()
    h = t if scale == 0 else min(t, 0.05 / scale)
    cache = {}

    def step(hh):
        S = cache.get(hh)
        if S is None:
            S = cache[hh] = _step_matrix(A, hh)
        return S

    tau = 0.0
    steps = 0
    richardson = 2.0 ** _ORDER - 1.0
    while tau < t:
        if steps >= max_steps:
            raise NumericalFailure("oracle exceeded its step budget", {"t": t, "reached": tau})
        h = min(h, t - tau)
        if h <= 1e-15 * max(t, 1.0):
            raise NumericalFailure("oracle step size underflow", {"t": t, "reached": tau, "h": h})
        coarse = step(h) @ X
        half = step(0.5 * h)
        fine = half @ (half @ X)
        tol = rtol * np.abs(fine) + 1e-300
        err = float(np.max(np.abs(fine - coarse) / tol)) / richardson
        if err <= 1.0:
            X = fine
            tau += h
            steps += 1
            grow = 2.0 if err == 0 else min(2.0, max(0.2, 0.9 * err ** (-1.0 / (_ORDER + 1))))
            h *= grow
        else:
            h *= max(0.2, 0.9 * err ** (-1.0 / (_ORDER + 1)))
    return X


def expm_oracle(R, t, params, rtol=1e-12):
    """``e^{tA}`` by adaptive Runge-Kutta integration; top-right entry is ``R * e12``."""
    if not R >= 0:
        raise DomainError(f"R must be >= 0, got {R}")
    return integrate_linear(generator(float(R), params), t, rtol=rtol)
