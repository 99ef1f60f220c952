"""Every quantity the identities and decay statements refer to.

Quadratic quantities are assembled from nine spectral moments
``sum k^{2p} {|w|^2, |h|^2, Re(w conj h)}`` for ``p = -1, 0, 1`` (one pass
through the kernel), so a record costs one sweep over the coefficients.
"""
import math
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from . import _kernels
from .errors import ConfigurationError, DomainError, InsufficientDataError
from .spectral import (
    ScalarField,
    biot_savart,
    gradient,
    l2_norm_sq,
    low_freq_energy,
    to_physical,
)
from .symbol import apply_semigroup, profile_h, profile_u


@dataclass
class DiagnosticsRecord:
    t: float
    energy_u: float
    energy_h: float
    grad_u_sq: float
    grad_h_sq: float
    omega_minus_2h_sq: float
    theta_sq: float
    grad_theta_sq: float
    psi: float
    eps_sq: float
    diss_u_cum: float
    diss_h_cum: float
    diss_coupling_cum: float
    low_freq_u: float = float("nan")
    linf_zL: float = float("nan")
    profile_err_u: float = float("nan")
    profile_err_h: float = float("nan")
    diff_lin_u: float = float("nan")
    diff_lin_h: float = float("nan")

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]

    def values(self):
        return [getattr(self, c) for c in self.columns()]

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class DecayFit:
    gamma_hat: float
    window: tuple
    rms_residual: float
    samples: int = 0
    intercept: float = 0.0

    def as_dict(self):
        out = asdict(self)
        out["window"] = list(self.window)
        return out


# Running time integrals carried by the solver. Order is the CSV order.
ACCUMULATORS = (
    "diss_u",  # int ||grad u||^2
    "diss_h",  # int ||grad h||^2
    "diss_coupling",  # int ||omega - 2h||^2
    "grad_theta",  # int ||grad theta||^2 (= int ||grad eps - mu/(2chi) grad omega||^2)
    "eps",  # int ||eps||^2
    "grad_omega",  # int ||grad omega||^2
    "psi",  # int psi
    "g_sq",  # int g^2
    "fs_source",  # int e g^2 I_u
)


def zero_accumulators():
    return dict.fromkeys(ACCUMULATORS, 0.0)


def theta_coefficient(params):
    return (params.chi + params.mu) / (2 * params.chi)


def theta_field(state, params):
    """``theta = h - (chi + mu)/(2 chi) omega``."""
    return state.h_hat - state.omega_hat * theta_coefficient(params)


def epsilon_field(state):
    """``eps = h - omega/2``."""
    return state.h_hat - state.omega_hat * 0.5


def a_coeff(params):
    """``a = (gamma chi + mu chi + 2 mu gamma) / (4 chi^2)``."""
    mu, chi, gam = params.mu, params.chi, params.gamma
    return (gam * chi + mu * chi + 2 * mu * gam) / (4 * chi * chi)


def a_discriminant(params, a=None):
    """``16 chi^2 a^2 - 8 (gamma chi + mu chi + 2 mu gamma) a + (gamma - mu)^2``."""
    mu, chi, gam = params.mu, params.chi, params.gamma
    if a is None:
        a = a_coeff(params)
    return 16 * chi * chi * a * a - 8 * (gam * chi + mu * chi + 2 * mu * gam) * a + (gam - mu) ** 2


def moments(state):
    """Norm-scaled moments ``m[p][q]``, ``p`` in (-1, 0, 1), ``q`` in (ww, hh, wh)."""
    g = state.grid
    m = _kernels.quadratic_moments(
        state.omega_hat.spectral, state.h_hat.spectral, g.ksq, g.inv_ksq, g.weight
    )
    return np.asarray(m).reshape(3, 3) * g.norm_factor


def quadratics(state, params):
    """Instantaneous norms (no running integrals)."""
    m = moments(state)
    ww_m, _, _ = m[0]
    ww0, hh0, wh0 = m[1]
    ww1, hh1, wh1 = m[2]
    c = theta_coefficient(params)
    theta_sq = max(hh0 - 2 * c * wh0 + c * c * ww0, 0.0)
    grad_theta_sq = max(hh1 - 2 * c * wh1 + c * c * ww1, 0.0)
    energy_h = hh0
    return {
        "energy_u": ww_m,
        "energy_h": energy_h,
        "grad_u_sq": ww0,
        "grad_h_sq": hh1,
        "omega_minus_2h_sq": max(ww0 - 4 * wh0 + 4 * hh0, 0.0),
        "theta_sq": theta_sq,
        "grad_theta_sq": grad_theta_sq,
        "psi": params.mu * energy_h + params.chi * theta_sq,
        "eps_sq": max(hh0 - wh0 + 0.25 * ww0, 0.0),
        "grad_omega_sq": ww1,
    }


def accumulator_rates(q):
    """Integrands of the running integrals that depend on the state alone."""
    return {
        "diss_u": q["grad_u_sq"],
        "diss_h": q["grad_h_sq"],
        "diss_coupling": q["omega_minus_2h_sq"],
        "grad_theta": q["grad_theta_sq"],
        "eps": q["eps_sq"],
        "grad_omega": q["grad_omega_sq"],
        "psi": q["psi"],
    }


def record(state, params, t, accumulators, low_freq_radius=None, z0=None, linf=False, q=None):
    """Assemble a :class:`DiagnosticsRecord`.

    ``low_freq_radius`` enables ``I_u``; ``z0`` enables the profile and
    linear-difference errors (``t > 0``); ``linf`` enables ``sup |z_L|``.
    """
    if q is None:
        q = quadratics(state, params)
    acc = accumulators or zero_accumulators()
    rec = DiagnosticsRecord(
        t=float(t),
        energy_u=q["energy_u"],
        energy_h=q["energy_h"],
        grad_u_sq=q["grad_u_sq"],
        grad_h_sq=q["grad_h_sq"],
        omega_minus_2h_sq=q["omega_minus_2h_sq"],
        theta_sq=q["theta_sq"],
        grad_theta_sq=q["grad_theta_sq"],
        psi=q["psi"],
        eps_sq=q["eps_sq"],
        diss_u_cum=acc["diss_u"],
        diss_h_cum=acc["diss_h"],
        diss_coupling_cum=acc["diss_coupling"],
    )
    if low_freq_radius is not None:
        rec.low_freq_u = low_freq_energy(state, low_freq_radius)
    if z0 is not None and t > 0:
        pu, ph, lu, lh = profile_errors(state, z0, t, params)
        rec.profile_err_u, rec.profile_err_h, rec.diff_lin_u, rec.diff_lin_h = pu, ph, lu, lh
        if linf:
            rec.linf_zL = sup_norm_zL(z0, t, params, state.grid)[0]
    return rec


def _records(traj):
    return traj.records if hasattr(traj, "records") else traj


def _acc(traj, i, name):
    return traj.accumulators[i][name]


def _check_indices(traj, s, t):
    n = len(_records(traj))
    if not (0 <= s <= t < n):
        raise DomainError(f"need 0 <= s_index <= t_index < {n}, got {s}, {t}")


def energy_equality_residual(traj, s_index, t_index, params):
    """``E(t) - E(s) + 2 mu int ||grad u||^2 + 2 gamma int ||grad h||^2 + 2 chi int ||omega - 2h||^2``."""
    _check_indices(traj, s_index, t_index)
    if s_index == t_index:
        return 0.0
    r = _records(traj)
    a, b = r[s_index], r[t_index]
    dE = (b.energy_u + b.energy_h) - (a.energy_u + a.energy_h)
    return (
        dE
        + 2 * params.mu * (b.diss_u_cum - a.diss_u_cum)
        + 2 * params.gamma * (b.diss_h_cum - a.diss_h_cum)
        + 2 * params.chi * (b.diss_coupling_cum - a.diss_coupling_cum)
    )


def identity_residual_gamma0(traj, s_index, t_index, params):
    """``psi(t) - psi(s) + 2 chi (chi + mu) int [||omega - 2h||^2 + ||grad theta||^2]``."""
    if params.gamma != 0:
        raise DomainError("this identity holds for gamma = 0 only")
    _check_indices(traj, s_index, t_index)
    if s_index == t_index:
        return 0.0
    r = _records(traj)
    chi, mu = params.chi, params.mu
    integral = (
        _acc(traj, t_index, "diss_coupling")
        - _acc(traj, s_index, "diss_coupling")
        + _acc(traj, t_index, "grad_theta")
        - _acc(traj, s_index, "grad_theta")
    )
    return r[t_index].psi - r[s_index].psi + 2 * chi * (chi + mu) * integral


def identity_residual_gammapos(traj, s_index, t_index, params):
    """Integrated balance for ``1/2 (||eps||^2 + a ||omega||^2)`` when ``gamma > 0``."""
    if not params.gamma > 0:
        raise DomainError("this identity holds for gamma > 0 only")
    _check_indices(traj, s_index, t_index)
    if s_index == t_index:
        return 0.0
    r = _records(traj)
    mu, chi, gam = params.mu, params.chi, params.gamma
    a = a_coeff(params)

    def d(name):
        return _acc(traj, t_index, name) - _acc(traj, s_index, name)

    lhs = 0.5 * ((r[t_index].eps_sq + a * r[t_index].grad_u_sq) - (r[s_index].eps_sq + a * r[s_index].grad_u_sq))
    # grad eps - mu/(2 chi) grad omega is grad theta
    return (
        lhs
        + 4 * chi * d("eps")
        + (gam + chi) * d("grad_theta")
        + mu * gam * (mu + chi) / (4 * chi * chi) * d("grad_omega")
    )


def monotonicity_report(series):
    """Count increases beyond ``1e-10 * value(0)`` in a ``(t, value)`` series."""
    vals = np.asarray([v for _, v in series], dtype=float)
    if vals.size < 2:
        raise InsufficientDataError("monotonicity needs at least 2 samples")
    slack = 1e-10 * abs(vals[0])
    up = np.diff(vals)
    return {"violations": int(np.sum(up > slack)), "max_uptick": float(max(up.max(), 0.0))}


def decay_slope_fit(series, window):
    """Least-squares slope of ``log value`` against ``log t`` inside ``window``."""
    t_lo, t_hi = float(window[0]), float(window[1])
    if not (0 < t_lo < t_hi):
        raise DomainError(f"window must satisfy 0 < t_lo < t_hi, got {window}")
    ts = np.asarray([t for t, _ in series], dtype=float)
    vs = np.asarray([v for _, v in series], dtype=float)
    sel = (ts >= t_lo) & (ts <= t_hi)
    ts, vs = ts[sel], vs[sel]
    if ts.size < 8:
        raise InsufficientDataError(f"decay fit needs >= 8 samples in the window, got {ts.size}")
    if ts.max() / ts.min() < 10 * (1 - 1e-12):
        raise InsufficientDataError("decay fit window must span at least one decade")
    if np.any(~(vs > 0)):
        raise DomainError("decay fit needs positive values")
    x, y = np.log(ts), np.log(vs)
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    return DecayFit(
        gamma_hat=float(-slope),
        window=(t_lo, t_hi),
        rms_residual=float(np.sqrt(np.mean(resid ** 2))),
        samples=int(ts.size),
        intercept=float(icpt),
    )


def zeta(t, Gamma):
    """Profile-error rate ``zeta_Gamma(t)``."""
    if not (0 <= Gamma <= 2):
        raise DomainError(f"Gamma must lie in [0, 2], got {Gamma}")
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if Gamma < 1:
        return (1 + t) ** (-2 * Gamma)
    if Gamma == 1:
        return (1 + t) ** -2 * math.log(math.e + t) ** 2
    return (1 + t) ** -2


def delta_fs(params):
    """``delta = mu + 5 chi - sqrt(mu^2 + 25 chi^2 - 6 chi mu)``, evaluated without cancellation."""
    mu, chi = params.mu, params.chi
    root = math.sqrt((mu - 3 * chi) ** 2 + 16 * chi * chi)
    return 16 * chi * mu / (mu + 5 * chi + root)


def eta_fs(params):
    return (params.mu + params.chi - delta_fs(params) / 2) / (2 * params.chi)


@dataclass(frozen=True)
class GSchedule:
    """Fourier-splitting radius: ``g(t)^2 = c / (delta (t + t0))`` or ``g = 0``."""

    kind: str = "inverse"
    c: float = 3.0
    t0: float = 10.0

    def __post_init__(self):
        if self.kind not in ("inverse", "zero"):
            raise ConfigurationError(f"unknown g schedule {self.kind!r}")
        if self.kind == "inverse" and not (self.c > 0 and self.t0 > 0):
            raise ConfigurationError("g schedule needs c > 0 and t0 > 0")

    def g_sq(self, t, delta):
        if self.kind == "zero":
            return 0.0
        return self.c / (delta * (t + self.t0))

    def radius(self, t, delta):
        return math.sqrt(self.g_sq(t, delta))

    def as_dict(self):
        return asdict(self)


def fourier_splitting_check(traj, params, g_schedule, tol=1e-6):
    """Compare ``||z(t)||^2 e(t)`` with ``||z0||^2 + delta int e g^2 I_u``, ``e = exp(delta int g^2)``."""
    meta = getattr(traj, "meta", {}) or {}
    used = meta.get("g_schedule")
    if used is None or used != g_schedule.as_dict():
        raise ConfigurationError(f"trajectory was sampled with g schedule {used}, not {g_schedule.as_dict()}")
    delta = delta_fs(params)
    r = _records(traj)
    times, lhs, rhs, ratio = [], [], [], []
    z0 = r[0].energy_u + r[0].energy_h
    for i, rec in enumerate(r):
        e = math.exp(delta * _acc(traj, i, "g_sq"))
        left = (rec.energy_u + rec.energy_h) * e
        right = z0 + delta * _acc(traj, i, "fs_source")
        times.append(rec.t)
        lhs.append(left)
        rhs.append(right)
        ratio.append(left / right if right > 0 else (0.0 if left == 0 else math.inf))
    worst = max(ratio) if ratio else 0.0
    return {
        "delta": delta,
        "times": times,
        "lhs": lhs,
        "rhs": rhs,
        "ratio": ratio,
        "max_ratio": worst,
        "passed": bool(worst <= 1 + tol),
    }


def profile_errors(state, z0, t, params):
    """``(||u - profile_u||, ||h - profile_h||, ||u - u_L||, ||h - h_L||)``."""
    if not t > 0:
        raise DomainError(f"profile errors need t > 0, got {t}")
    z0 = getattr(z0, "state", z0)
    u1, u2 = biot_savart(state.omega_hat)
    p1, p2 = profile_u(z0, t, params)
    ph = profile_h(z0, t, params)
    lin = apply_semigroup(z0, t, params)
    # ||u - u_L|| through the vorticity difference
    dw = ScalarField(state.grid, state.omega_hat.spectral - lin.omega_hat.spectral)
    du = biot_savart(dw)
    return (
        math.sqrt(l2_norm_sq((u1 - p1, u2 - p2))),
        math.sqrt(l2_norm_sq(state.h_hat - ph)),
        math.sqrt(l2_norm_sq(du)),
        math.sqrt(l2_norm_sq(state.h_hat - lin.h_hat)),
    )


def sup_norm_zL(z0, t, params, grid):
    """``(max |z_L|, max |grad z_L|)`` over the physical grid, ``z_L = (u_L, h_L)``."""
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")
    z0 = getattr(z0, "state", z0)
    if z0.grid != grid:
        raise ConfigurationError("state and grid differ")
    lin = apply_semigroup(z0, t, params)
    u1, u2 = biot_savart(lin.omega_hat)
    comps = [to_physical(u1), to_physical(u2), to_physical(lin.h_hat)]
    z = np.sqrt(sum(c * c for c in comps))
    grads = []
    for f in (u1, u2, lin.h_hat):
        grads.extend(to_physical(d) for d in gradient(f))
    gz = np.sqrt(sum(d * d for d in grads))
    return float(z.max()), float(gz.max())
