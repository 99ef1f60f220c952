"""Exact Fourier symbol of the linear micropolar semigroup.

In vorticity variables the linear system is, mode by mode,

    d/dt (w, h) = A (w, h),   A = [[-(mu+chi) R, 2 chi R], [2 chi, -(gamma R + 4 chi)]]

with ``R = |xi|^2``. Its exponential has the closed form

    e^{tA} = [[e11, R e12], [e21, e22]],   e21 = e12,

whose entries are evaluated here without cancellation for every ``R >= 0``.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigurationError, DomainError
from .spectral import (
    ScalarField,
    SpectralState,
    biot_savart,
    curl,
    laplacian,
    perp_gradient,
)


@dataclass(frozen=True)
class SymbolIntermediates:
    R: object
    alpha: object
    beta: object
    D: object
    sqrtD: object
    decay_slow: object
    decay_fast: object
    sqrtD_plus_beta: object
    sqrtD_minus_beta: object

    @property
    def eigenvalues(self):
        """``(lambda_+, lambda_-) = (-decay_slow, -decay_fast)``."""
        return -self.decay_slow, -self.decay_fast


@dataclass(frozen=True)
class SymbolMatrix:
    e11: object
    e12: object
    e21: object
    e22: object

    def as_matrix(self, R):
        """The 2x2 propagator acting on ``(w, h)``; scalar inputs only."""
        return np.array([[self.e11, R * self.e12], [self.e21, self.e22]], dtype=float)


def _check_R(R):
    R = np.asarray(R, dtype=float)
    if np.any(~(R >= 0)) or np.any(~np.isfinite(R)):
        raise DomainError("R = |xi|^2 must be finite and >= 0")
    return R


def _scalarize(x):
    return float(x) if np.ndim(x) == 0 else x


def intermediates(R, params):
    """``alpha, beta, D`` and both decay exponents at ``R = |xi|^2``.

    ``decay_slow = alpha - sqrt(D)`` is formed from the rationalized quotient
    ``(4 chi mu R + gamma (chi + mu) R^2) / (alpha + sqrt(D))``.
    """
    R = _check_R(R)
    mu, chi, gam = params.mu, params.chi, params.gamma
    alpha = 0.5 * (mu + chi + gam) * R + 2 * chi
    beta = 0.5 * (mu + chi - gam) * R - 2 * chi
    D = beta * beta + 4 * chi * chi * R
    sqrtD = np.sqrt(D)
    decay_fast = alpha + sqrtD
    decay_slow = (4 * chi * mu * R + gam * (chi + mu) * R * R) / decay_fast
    # sqrt(D) -/+ beta: add the magnitudes, recover the small one from
    # (sqrtD + beta)(sqrtD - beta) = 4 chi^2 R.
    big = sqrtD + np.abs(beta)
    small = 4 * chi * chi * R / big
    pos = beta >= 0
    dp = np.where(pos, big, small)
    dm = np.where(pos, small, big)
    return SymbolIntermediates(
        R=_scalarize(R),
        alpha=_scalarize(alpha),
        beta=_scalarize(beta),
        D=_scalarize(D),
        sqrtD=_scalarize(sqrtD),
        decay_slow=_scalarize(decay_slow),
        decay_fast=_scalarize(decay_fast),
        sqrtD_plus_beta=_scalarize(dp),
        sqrtD_minus_beta=_scalarize(dm),
    )


def symbol(R, t, params):
    """Entries ``e11, e12 = e21, e22`` of the propagator at ``(R, t)``.

    ``R`` and ``t`` broadcast against each other. At ``t = 0`` the identity is
    returned exactly.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr >= 0)) or np.any(~np.isfinite(t_arr)):
        raise DomainError("t must be finite and >= 0")
    it = intermediates(R, params)
    R_arr = np.asarray(it.R, dtype=float)
    shape = np.broadcast(R_arr, t_arr).shape
    sqrtD = np.asarray(it.sqrtD)
    es = np.exp(-t_arr * it.decay_slow)
    ef = np.exp(-t_arr * it.decay_fast)
    inv2 = 0.5 / sqrtD
    e11 = (es * it.sqrtD_minus_beta + ef * it.sqrtD_plus_beta) * inv2
    e22 = (es * it.sqrtD_plus_beta + ef * it.sqrtD_minus_beta) * inv2
    # decay_fast - decay_slow = 2 sqrt(D)
    e12 = (params.chi / sqrtD) * es * (-np.expm1(-2.0 * t_arr * sqrtD))
    zero_t = np.broadcast_to(t_arr == 0, shape)
    if np.any(zero_t):
        e11 = np.where(zero_t, 1.0, np.broadcast_to(e11, shape))
        e22 = np.where(zero_t, 1.0, np.broadcast_to(e22, shape))
        e12 = np.where(zero_t, 0.0, np.broadcast_to(e12, shape))
    e11, e12, e22 = (_scalarize(np.broadcast_to(a, shape)) for a in (e11, e12, e22))
    return SymbolMatrix(e11=e11, e12=e12, e21=e12, e22=e22)


def symbol_matrix(R, t, params):
    """Scalar ``(R, t)`` -> the 2x2 ndarray ``[[e11, R e12], [e21, e22]]``."""
    return symbol(R, t, params).as_matrix(float(R))


def symbol_K(xi1, xi2, t, params):
    """The 3x3 complex symbol acting on ``(u1_hat, u2_hat, h_hat)`` at one frequency."""
    R = xi1 * xi1 + xi2 * xi2
    s = symbol(R, t, params)
    return np.array(
        [
            [s.e11, 0.0, 1j * xi2 * s.e12],
            [0.0, s.e11, -1j * xi1 * s.e12],
            [-1j * xi2 * s.e21, 1j * xi1 * s.e21, s.e22],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class PropagatorTable:
    """Per-mode propagator entries on a grid's half layout, for one time step."""

    t: float
    e11: np.ndarray
    re12: np.ndarray
    e21: np.ndarray
    e22: np.ndarray

    def apply(self, w, h):
        return _kernels.apply_propagator(w, h, self.e11, self.re12, self.e21, self.e22)


def propagator_table(grid, t, params):
    R = grid.ksq
    s = symbol(R, t, params)
    c = np.ascontiguousarray
    return PropagatorTable(
        t=float(t),
        e11=c(np.broadcast_to(s.e11, R.shape), dtype=float),
        re12=c(R * s.e12, dtype=float),
        e21=c(np.broadcast_to(s.e21, R.shape), dtype=float),
        e22=c(np.broadcast_to(s.e22, R.shape), dtype=float),
    )


def heat_table(grid, nu, t):
    """Decoupled propagator: heat flow with viscosity ``nu`` on ``omega``, ``h`` annihilated."""
    e = np.exp(-nu * t * grid.ksq)
    z = np.zeros(grid.spectral_shape)
    return PropagatorTable(t=float(t), e11=np.ascontiguousarray(e), re12=z, e21=z, e22=z)


def apply_semigroup(state0, t, params):
    """Exact linear evolution ``z_L(t) = e^{tM} z0`` applied mode by mode."""
    t = float(t)
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if t == 0:
        return state0.copy()
    table = propagator_table(state0.grid, t, params)
    w, h = table.apply(state0.omega_hat.spectral, state0.h_hat.spectral)
    return SpectralState.from_arrays(state0.grid, w, h)


def heat_semigroup(f, nu, t):
    """``e^{nu t Delta} f``."""
    if not nu > 0:
        raise DomainError(f"nu must be > 0, got {nu}")
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if isinstance(f, tuple):
        return tuple(heat_semigroup(c, nu, t) for c in f)
    if t == 0:
        return f.copy()
    return ScalarField(f.grid, np.exp(-nu * t * f.grid.ksq) * f.spectral)


def _initial_state(z0):
    state = getattr(z0, "state", z0)
    if not isinstance(state, SpectralState):
        raise ConfigurationError("expected a SpectralState or built initial data")
    return state


def profile_u(z0, t, params):
    """``e^{mu t Delta} u0 - 1/2 grad_perp e^{mu t Delta} h0`` as a velocity pair."""
    if not t > 0:
        raise DomainError(f"profiles are defined for t > 0, got {t}")
    state = _initial_state(z0)
    u1, u2 = heat_semigroup(biot_savart(state.omega_hat), params.mu, t)
    p1, p2 = perp_gradient(heat_semigroup(state.h_hat, params.mu, t))
    return u1 - 0.5 * p1, u2 - 0.5 * p2


def profile_h(z0, t, params):
    """``1/2 curl e^{mu t Delta} u0 - 1/4 Delta e^{mu t Delta} h0``."""
    if not t > 0:
        raise DomainError(f"profiles are defined for t > 0, got {t}")
    state = _initial_state(z0)
    u1, u2 = heat_semigroup(biot_savart(state.omega_hat), params.mu, t)
    lap_h = laplacian(heat_semigroup(state.h_hat, params.mu, t))
    return 0.5 * curl(u1, u2) - 0.25 * lap_h
