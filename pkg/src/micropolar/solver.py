"""Pseudo-spectral integrating-factor RK4 for the vorticity/microrotation system.

The linear part is propagated exactly by the per-mode symbol; only the
transport terms ``-(u . grad omega, u . grad h)`` go through the RK stages
(Lawson's integrating-factor RK4). With the transport switched off a step is
a single application of the exact propagator.
"""
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .diagnostics import (
    ACCUMULATORS,
    GSchedule,
    accumulator_rates,
    delta_fs,
    quadratics,
    record,
    zero_accumulators,
)
from .errors import ConfigurationError, SolverDivergence
from .spectral import (
    ScalarField,
    SpectralState,
    biot_savart,
    irfft2,
    low_freq_energy,
    rfft2,
    to_physical,
)
from .symbol import heat_table, propagator_table

MODES = ("nonlinear", "linear", "ns_reference")


class CFLWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    t_end: float
    save_every: int = 1
    cfl_limit: float = 0.5
    enforce_dealias: bool = True
    mode: str = "nonlinear"
    strict: bool = False
    snapshot_every: int = 0
    profile_errors: bool = False
    linf: bool = False
    g_schedule: Optional[GSchedule] = None

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigurationError(f"time.dt must be > 0, got {self.dt}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ConfigurationError(f"time.t_end must be > 0, got {self.t_end}")
        if self.dt > self.t_end:
            raise ConfigurationError("time.dt must not exceed time.t_end")
        if int(self.save_every) != self.save_every or self.save_every < 1:
            raise ConfigurationError("time.save_every must be a positive integer")
        if not self.cfl_limit > 0:
            raise ConfigurationError("cfl_limit must be > 0")
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.snapshot_every < 0:
            raise ConfigurationError("snapshot_every must be >= 0")

    @property
    def n_steps(self):
        return max(1, int(math.ceil(self.t_end / self.dt - 1e-9)))

    @property
    def dt_effective(self):
        return self.t_end / self.n_steps


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    records: list = field(default_factory=list)
    accumulators: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    final_state: Optional[SpectralState] = None

    def series(self, name):
        return [(r.t, getattr(r, name)) for r in self.records]

    def __len__(self):
        return len(self.records)


class _Transport:
    """Array-level evaluation of the dealiased transport terms."""

    def __init__(self, grid, with_h=True):
        self.grid = grid
        self.with_h = with_h
        self.mask = grid.dealias_mask
        g = grid
        self.ik1 = 1j * g.k1
        self.ik2 = 1j * g.k2
        self.inv = g.inv_ksq

    def __call__(self, w, h):
        n = self.grid.n
        ws = w * self.inv
        parts = [self.ik2 * ws, -self.ik1 * ws, self.ik1 * w, self.ik2 * w]
        if self.with_h:
            parts += [self.ik1 * h, self.ik2 * h]
        phys = irfft2(np.stack(parts), n)
        if self.with_h:
            nw, nh = _kernels.transport(*phys)
            out = rfft2(np.stack([nw, nh]))
        else:
            z = np.zeros_like(phys[0])
            nw, _ = _kernels.transport(phys[0], phys[1], phys[2], phys[3], z, z)
            out = rfft2(nw[None])
            out = np.concatenate([out, np.zeros_like(out)])
        out *= self.mask
        out[0, 0, 0] = 0.0
        return out[0], out[1]


def nonlinear_rhs(state, params=None):
    """``(-u . grad omega, -u . grad h)`` in spectral form, dealiased, zero-mean ``omega`` part."""
    w = state.omega_hat.spectral
    h = state.h_hat.spectral
    nw, nh = _Transport(state.grid)(w, h)
    if not (np.all(np.isfinite(nw)) and np.all(np.isfinite(nh))):
        raise SolverDivergence("non-finite transport term", float("nan"))
    g = state.grid
    return ScalarField(g, nw), ScalarField(g, nh)


class IFRK4:
    """Integrating-factor RK4 with tables for ``dt/2`` and ``dt`` precomputed."""

    def __init__(self, grid, params, dt, mode="nonlinear"):
        self.grid = grid
        self.params = params
        self.dt = float(dt)
        self.mode = mode
        if mode == "ns_reference":
            self.half = heat_table(grid, params.mu, 0.5 * dt)
            self.full = heat_table(grid, params.mu, dt)
        else:
            self.half = propagator_table(grid, 0.5 * dt, params)
            self.full = propagator_table(grid, dt, params)
        self.rhs = None if mode == "linear" else _Transport(grid, with_h=(mode != "ns_reference"))

    def step(self, w, h):
        E, Eh, dt = self.full, self.half, self.dt
        if self.rhs is None:
            return E.apply(w, h)
        N = self.rhs
        k1w, k1h = N(w, h)
        a = Eh.apply(w + 0.5 * dt * k1w, h + 0.5 * dt * k1h)
        k2w, k2h = N(*a)
        ehw, ehh = Eh.apply(w, h)
        k3w, k3h = N(ehw + 0.5 * dt * k2w, ehh + 0.5 * dt * k2h)
        ezw, ezh = E.apply(w, h)
        e3w, e3h = Eh.apply(k3w, k3h)
        k4w, k4h = N(ezw + dt * e3w, ezh + dt * e3h)
        e1w, e1h = E.apply(k1w, k1h)
        e23w, e23h = Eh.apply(k2w + k3w, k2h + k3h)
        c = dt / 6.0
        w_new = ezw + c * (e1w + 2.0 * e23w + k4w)
        h_new = ezh + c * (e1h + 2.0 * e23h + k4h)
        return w_new, h_new


def step_ifrk4(state, dt, params, grid=None, mode="nonlinear", integrator=None):
    """One IFRK4 step; pass a prebuilt ``integrator`` to reuse its tables."""
    grid = grid or state.grid
    if state.grid != grid:
        raise ConfigurationError("state does not live on the given grid")
    integ = integrator or IFRK4(grid, params, dt, mode)
    w, h = integ.step(state.omega_hat.spectral, state.h_hat.spectral)
    return SpectralState.from_arrays(grid, w, h)


def max_velocity(state):
    u1, u2 = biot_savart(state.omega_hat)
    a, b = to_physical(u1), to_physical(u2)
    return float(np.sqrt(a * a + b * b).max())


def cfl_check(state, cfg):
    """Advisory ``dt <= cfl_limit * dx / max |u|``; returns the admissible dt."""
    umax = max_velocity(state)
    limit = math.inf if umax == 0 else cfg.cfl_limit * state.grid.dx / umax
    if cfg.dt_effective > limit:
        msg = f"dt = {cfg.dt_effective:.4g} exceeds the CFL bound {limit:.4g} (max |u| = {umax:.4g})"
        if cfg.strict:
            raise ConfigurationError(msg)
        warnings.warn(msg, CFLWarning, stacklevel=3)
    return limit


def run(z0, params, cfg):
    """Integrate from ``z0`` (a :class:`SpectralState` or built initial data)."""
    state = getattr(z0, "state", z0)
    if not isinstance(state, SpectralState):
        raise ConfigurationError("run needs a SpectralState or built initial data")
    grid = state.grid
    mode = cfg.mode
    w = state.omega_hat.spectral.copy()
    h = state.h_hat.spectral.copy()
    if cfg.enforce_dealias:
        w = np.where(grid.dealias_mask, w, 0.0)
        h = np.where(grid.dealias_mask, h, 0.0)
    if mode == "ns_reference":
        h = np.zeros_like(h)
    w[0, 0] = 0.0
    start = SpectralState.from_arrays(grid, w, h)
    cfl = cfl_check(start, cfg)

    dt = cfg.dt_effective
    n_steps = cfg.n_steps
    integ = IFRK4(grid, params, dt, mode)
    sched = cfg.g_schedule
    delta = delta_fs(params)
    z_ref = start if cfg.profile_errors and mode != "ns_reference" else None

    traj = Trajectory()
    traj.meta = {
        "mode": mode,
        "dt": cfg.dt,
        "dt_effective": dt,
        "n_steps": n_steps,
        "t_end": cfg.t_end,
        "save_every": cfg.save_every,
        "cfl_dt_limit": cfl,
        "validity_time": grid.validity_time(params.mu),
        "g_schedule": sched.as_dict() if sched is not None else None,
        "delta": delta,
        "accumulators": list(ACCUMULATORS),
    }

    acc = zero_accumulators()

    def sample(t, st):
        q = quadratics(st, params)
        extra = {}
        if sched is not None:
            g2 = sched.g_sq(t, delta)
            extra["g_sq"] = g2
            extra["I_u"] = low_freq_energy(st, math.sqrt(g2))
        return q, extra

    def rates(t, q, extra):
        r = accumulator_rates(q)
        if sched is not None:
            r["g_sq"] = extra["g_sq"]
            # e(t) uses int g^2 up to t, which the caller updates first
            r["fs_source"] = math.exp(delta * acc["g_sq"]) * extra["g_sq"] * extra["I_u"]
        else:
            r["g_sq"] = 0.0
            r["fs_source"] = 0.0
        return r

    def save(t, st, q, extra):
        rec = record(
            st,
            params,
            t,
            acc,
            low_freq_radius=math.sqrt(extra["g_sq"]) if sched is not None else None,
            z0=z_ref,
            linf=cfg.linf,
            q=q,
        )
        traj.times.append(t)
        traj.records.append(rec)
        traj.accumulators.append(dict(acc))
        if cfg.snapshot_every and (len(traj.records) - 1) % cfg.snapshot_every == 0:
            traj.snapshots.append((t, st.copy()))
        return rec

    q, extra = sample(0.0, start)
    r_prev = rates(0.0, q, extra)
    last_saved = save(0.0, start, q, extra)
    last_t = 0.0
    for k in range(1, n_steps + 1):
        t = k * dt if k < n_steps else cfg.t_end
        w, h = integ.step(w, h)
        st = SpectralState.from_arrays(grid, w, h)
        q, extra = sample(t, st)
        e_now = q["energy_u"] + q["energy_h"]
        if not math.isfinite(e_now):
            raise SolverDivergence("non-finite energy", last_t)
        if sched is not None:
            acc["g_sq"] += 0.5 * (t - last_t) * (r_prev["g_sq"] + extra["g_sq"])
        r_now = rates(t, q, extra)
        for name in ACCUMULATORS:
            if name == "g_sq":
                continue
            acc[name] += 0.5 * (t - last_t) * (r_prev[name] + r_now[name])
        r_prev = r_now
        if k % cfg.save_every == 0 or k == n_steps:
            e_prev = last_saved.energy_u + last_saved.energy_h
            if e_prev > 0 and e_now > 10 * e_prev:
                raise SolverDivergence(f"energy grew from {e_prev:.4g} to {e_now:.4g}", last_saved.t)
            last_saved = save(t, st, q, extra)
        last_t = t
    traj.final_state = SpectralState.from_arrays(grid, w, h)
    return traj


def solver_config_from(config, mode=None):
    """Build a :class:`SolverConfig` from an experiment configuration."""
    return SolverConfig(
        dt=config.time.dt,
        t_end=config.time.t_end,
        save_every=config.time.save_every,
        cfl_limit=config.time.cfl_limit,
        enforce_dealias=config.time.enforce_dealias,
        mode=mode or config.mode,
        strict=config.strict,
        snapshot_every=config.outputs.snapshot_every if config.outputs.emit_snapshots else 0,
        profile_errors=config.diagnostics.profile_errors,
        linf=config.diagnostics.linf,
        g_schedule=config.diagnostics.g_schedule(),
    )


def simulate(config, initial=None):
    """Run the experiment described by ``config``; returns a :class:`Trajectory`."""
    from .initial_data import build

    grid = config.torus_grid()
    data = initial if initial is not None else build(config.initial_data, grid, strict=config.strict, params=config.params)
    traj = run(data, config.params, solver_config_from(config))
    traj.meta["data_metrics"] = dict(getattr(data, "metrics", {}))
    return traj


def ns_reference(config, initial=None):
    """Navier-Stokes comparator: same ``u0`` and ``mu``, coupling and ``h`` removed."""
    from .initial_data import build

    grid = config.torus_grid()
    data = initial if initial is not None else build(config.initial_data, grid, strict=config.strict, params=config.params)
    traj = run(data, config.params, solver_config_from(config, mode="ns_reference"))
    traj.meta["data_metrics"] = dict(getattr(data, "metrics", {}))
    return traj
