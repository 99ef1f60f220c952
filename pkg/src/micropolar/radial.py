"""Continuum (whole-plane) L^2 norms of radial data by 1D quadrature.

All built-in data classes have radial spectra: the vorticity transform
``w(r)`` and microrotation transform ``g(r)`` depend on ``r = |xi|`` only.
With the convention ``||f||^2 = (2 pi)^-2 int |f_hat|^2 dxi`` every norm
below is ``(2 pi)^-1 int_0^inf F(r) r dr`` for a scalar integrand ``F``;
velocity norms use ``|u_hat|^2 = |w_hat|^2 / r^2``.

Integration runs in ``s = log r`` with breakpoints at ``r = 1`` and at the
heat scale ``r = (mu t)^-1/2``, on the range where the integrand exceeds
``1e-16`` of its peak.
"""
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericalFailure
from .symbol import symbol

PHI_KINDS = ("rational", "gaussian")
DATA_KINDS = ("power_law_velocity", "power_law_micro", "enhanced_pair")
NORMS = (
    "u_L",
    "h_L",
    "profile-error-u",
    "profile-error-h",
    "heat-u",
    "heat-pair",
    "u0",
    "h0",
)

_S_LO, _S_HI = -80.0, 40.0
_RTOL = 1e-8
_ATOL_REL = 1e-13


def _data_norms(spec):
    return {"power_law_velocity": ("u0",), "power_law_micro": ("h0",), "enhanced_pair": ("u0", "h0")}[spec.kind]


def phi(R, kind="rational"):
    """Built-in cut-off profiles ``Phi(xi)`` as functions of ``R = |xi|^2``."""
    if kind == "rational":
        return 1.0 / (1.0 + R)
    if kind == "gaussian":
        return np.exp(-R)
    raise DomainError(f"unknown phi_kind {kind!r}; expected one of {PHI_KINDS}")


@dataclass(frozen=True)
class RadialDataSpec:
    """Power-law data ``|xi|^(Gamma-2) Phi(xi)`` in one of three arrangements.

    ``power_law_velocity``: ``u0_hat = 1/2 (-i xi2, i xi1) |xi|^(Gamma-2) Phi``, ``h0 = 0``.
    ``power_law_micro``: ``u0 = 0``, ``h0_hat = |xi|^(Gamma-2) Phi``.
    ``enhanced_pair``: both of the above, so that ``u0 = 1/2 grad_perp h0``.

    ``scale`` stretches the cut-off to ``Phi(scale * xi)``; it moves the
    spectral peak without touching the low-frequency power law.
    """

    Gamma: float
    phi_kind: str = "rational"
    amplitude: float = 1.0
    kind: str = "power_law_velocity"
    scale: float = 1.0

    def __post_init__(self):
        if not (0 < self.Gamma <= 2):
            raise DomainError(f"Gamma must lie in (0, 2], got {self.Gamma}")
        if self.phi_kind not in PHI_KINDS:
            raise DomainError(f"unknown phi_kind {self.phi_kind!r}")
        if self.kind not in DATA_KINDS:
            raise DomainError(f"unknown radial data kind {self.kind!r}")
        if self.kind != "power_law_velocity" and self.Gamma <= 1:
            raise DomainError("h0 = |xi|^(Gamma-2) Phi is square integrable only for Gamma > 1")
        if not np.isfinite(self.amplitude):
            raise DomainError("amplitude must be finite")
        if not (self.scale > 0 and np.isfinite(self.scale)):
            raise DomainError(f"scale must be finite and > 0, got {self.scale}")

    def cutoff(self, R):
        """``Phi(scale * xi)`` at ``R = |xi|^2``."""
        return phi(self.scale * self.scale * R, self.phi_kind)

    def vorticity(self, r):
        """``w(r)``, the vorticity transform of ``u0``."""
        if self.kind == "power_law_micro":
            return np.zeros_like(r)
        return -0.5 * self.amplitude * r ** self.Gamma * self.cutoff(r * r)

    def micro(self, r):
        """``g(r)``, the transform of ``h0``."""
        if self.kind == "power_law_velocity":
            return np.zeros_like(r)
        return self.amplitude * r ** (self.Gamma - 2) * self.cutoff(r * r)


def _integrand(spec, which, t, params):
    mu = params.mu

    def F(r):
        R = r * r
        w = spec.vorticity(r)
        g = spec.micro(r)
        if which in ("u0", "h0"):
            return w * w / R if which == "u0" else g * g
        heat = np.exp(-mu * t * R)
        if which == "heat-u":
            v = heat * w
            return v * v / R
        if which == "heat-pair":
            v = heat * (w + 0.5 * R * g)
            return v * v / R
        s = symbol(R, t, params)
        wL = s.e11 * w + R * s.e12 * g
        hL = s.e21 * w + s.e22 * g
        if which == "u_L":
            return wL * wL / R
        if which == "h_L":
            return hL * hL
        if which == "profile-error-u":
            v = wL - heat * (w + 0.5 * R * g)
            return v * v / R
        if which == "profile-error-h":
            v = hL - heat * (0.5 * w + 0.25 * R * g)
            return v * v
        raise DomainError(f"unknown norm {which!r}; expected one of {NORMS}")

    return F


def radial_norms(spec, which, t, params):
    """Squared whole-plane L^2 norm of the quantity ``which`` at time ``t``."""
    if which not in NORMS:
        raise DomainError(f"unknown norm {which!r}; expected one of {NORMS}")
    t = float(t)
    if which.startswith("profile-error") and not t > 0:
        raise DomainError("profile errors need t > 0")
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")
    F = _integrand(spec, which, t, params)

    def G(s):
        r = np.exp(s)
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            v = F(r) * r * r
        return np.where(np.isfinite(v), v, 0.0)

    scan = np.linspace(_S_LO, _S_HI, 4001)
    vals = np.abs(G(scan))
    peak = vals.max()
    if peak == 0:
        return 0.0
    live = np.nonzero(vals > 1e-16 * peak)[0]
    step = scan[1] - scan[0]
    lo = scan[max(live[0] - 1, 0)]
    hi = scan[min(live[-1] + 1, len(scan) - 1)]
    cuts = {lo, hi, 0.0, -float(np.log(spec.scale))}
    if t > 0:
        cuts.add(-0.5 * np.log(params.mu * t))
    pts = sorted(c for c in cuts if lo <= c <= hi)

    total = 0.0
    err = 0.0
    failures = []
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a < 1e-12 * step:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, est, info = integrate.quad(
                lambda s: float(G(np.array(s))), a, b,
                epsabs=0.0, epsrel=1e-10, limit=400, full_output=True,
            )[:3]
        total += val
        err += est
        if info.get("last", 0) >= 400:
            failures.append((a, b, est))
    if err > _RTOL * abs(total) and which not in ("u0", "h0"):
        # quantities that cancel to rounding noise: judge the error against the data size
        ref = 2 * np.pi * sum(radial_norms(spec, k, 0.0, params) for k in _data_norms(spec))
        if err <= _ATOL_REL * ref:
            return total / (2 * np.pi)
    if err > _RTOL * abs(total):
        raise NumericalFailure(
            f"radial quadrature for {which!r} did not converge",
            {"t": t, "value": total, "error_estimate": err, "panels": pts, "stalled": failures},
        )
    return total / (2 * np.pi)
