"""Sweeps of the propagator entries against their heat-kernel asymptotics.

For every ``t`` on a log grid the sweep takes the supremum over a log grid in
``R = |xi|^2`` of

    t   |e11 - e^{-mu t R}|,   t^2 |e22 - R/4 e^{-mu t R}|,   t |e21 - 1/2 e^{-mu t R}|

and reports their maxima per decade of ``t``. When ``gamma = 0`` the entries
carry extra terms that decay exponentially in ``t`` but not in ``R``; those
are fitted from the high-frequency part of the sweep as ``C e^{-ct} / w(R)``
and removed before taking the supremum.
"""
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError
from .symbol import intermediates, symbol

_ENTRIES = ("e11", "e22", "e21")
# weight w(R) attached to each gamma = 0 extra term
_EXTRA_WEIGHT = {"e11": "1+R", "e22": "1", "e21": "1+R"}


@dataclass
class BoundsReport:
    params: dict
    r_grid: list
    t_grid: list
    scaled_sup: dict
    per_decade_maxima: dict
    decade_edges: list
    fitted_constants: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    def decade_ratio(self, name):
        vals = np.asarray(self.per_decade_maxima[name], dtype=float)
        vals = vals[vals > 0]
        if len(vals) == 0:
            return 1.0
        return float(vals.max() / vals.min())

    def passed(self, threshold=1.5):
        """Per-decade maxima vary by less than ``threshold`` and every structural check holds."""
        ok = all(self.decade_ratio(k) < threshold for k in self.per_decade_maxima)
        return ok and all(bool(c.get("passed", True)) for c in self.checks.values())

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _decades(t_grid):
    lo = int(np.floor(np.log10(t_grid[0]) + 1e-12))
    hi = int(np.ceil(np.log10(t_grid[-1]) - 1e-12))
    hi = max(hi, lo + 1)
    edges = [10.0 ** k for k in range(lo, hi + 1)]
    bins = []
    for a, b in zip(edges[:-1], edges[1:]):
        bins.append(np.nonzero((t_grid >= a * (1 - 1e-12)) & (t_grid <= b * (1 + 1e-12)))[0])
    return edges, bins


def _per_decade(values, bins):
    return [float(values[idx].max()) if len(idx) else 0.0 for idx in bins]


def _fit_extra(t_grid, M):
    """Envelope ``C e^{-ct}`` over ``M(t)`` fitted on log-linear scale."""
    good = M > 1e-300
    if good.sum() < 2:
        return 0.0, 0.0
    slope, icpt = np.polyfit(t_grid[good], np.log(M[good]), 1)
    c = max(-slope, 0.0)
    logC = float(np.max(np.log(M[good]) + c * t_grid[good]))
    return float(np.exp(logC)), float(c)


def _frobenius(s, R):
    # |K|_F^2 = 2 e11^2 + e22^2 + |xi|^2 (e12^2 + e21^2)
    return np.sqrt(2 * s.e11 ** 2 + s.e22 ** 2 + R * (s.e12 ** 2 + s.e21 ** 2))


def kernel_bound(params, R_grid, t_grid):
    """Fit ``|K(R, t)|_F <= C e^{-c t min(1, R)}`` on the given grid."""
    R = np.asarray(R_grid, dtype=float)[None, :]
    t = np.asarray(t_grid, dtype=float)[:, None]
    K = _frobenius(symbol(R, t, params), R)
    C = 2.0 * float(K.max())
    m = t * np.minimum(1.0, R)
    live = (m > 0) & (K > 0)
    c = float(np.min((np.log(C) - np.log(K[live])) / m[live])) if live.any() else 0.0
    # the coarse grid only samples the rate; keep a 10% margin for unseen points
    return C, 0.9 * c


def check_kernel_bound(params, C, c, R_grid, t_grid):
    R = np.asarray(R_grid, dtype=float)[None, :]
    t = np.asarray(t_grid, dtype=float)[:, None]
    K = _frobenius(symbol(R, t, params), R)
    bound = C * np.exp(-c * t * np.minimum(1.0, R))
    excess = float(np.max(K - bound * (1 + 1e-9)))
    return excess <= 0.0, excess


def _bracket(params, R):
    it = intermediates(R, params)
    slow = np.asarray(it.decay_slow)
    fast = np.asarray(it.decay_fast)
    if params.gamma > 0:
        ref_slow = R
    else:
        ref_slow = R / (1 + R)
    pos = R > 0
    ratio_slow = slow[pos] / ref_slow[pos]
    ratio_fast = fast / (1 + R)
    return {
        "slow_lower": float(ratio_slow.min()),
        "slow_upper": float(ratio_slow.max()),
        "fast_lower": float(ratio_fast.min()),
        "fast_upper": float(ratio_fast.max()),
        "min_decay_fast": float(fast.min()),
        "min_decay_slow": float(slow.min()),
        "passed": bool(ratio_slow.min() > 0 and fast.min() >= 2 * params.chi and slow.min() >= 0),
    }


def sweep_symbol_bounds(params, R_grid, t_grid):
    """Sweep the symbol over ``R_grid x t_grid`` and return a :class:`BoundsReport`."""
    R = np.asarray(R_grid, dtype=float)
    T = np.asarray(t_grid, dtype=float)
    if R.size == 0 or T.size == 0:
        raise DomainError("sweep grids must be nonempty")
    if np.any(~(R >= 0)):
        raise DomainError("R_grid must be >= 0")
    if np.any(~(T >= 1)):
        raise DomainError("t_grid must lie in [1, inf)")
    R = np.sort(R)
    T = np.sort(T)
    mu = params.mu
    Rm = R[None, :]
    Tm = T[:, None]
    s = symbol(Rm, Tm, params)
    heat = np.exp(-mu * Tm * Rm)
    diffs = {
        "e11": np.abs(s.e11 - heat),
        "e22": np.abs(s.e22 - 0.25 * Rm * heat),
        "e21": np.abs(s.e21 - 0.5 * heat),
    }
    scale = {"e11": T, "e22": T ** 2, "e21": T}
    fitted = {}
    if params.gamma == 0:
        high = R >= 1
        for name in _ENTRIES:
            w = (1 + Rm) if _EXTRA_WEIGHT[name] == "1+R" else np.ones_like(Rm)
            if high.any():
                M = np.max(diffs[name][:, high] * w[:, high], axis=1)
                C, c = _fit_extra(T, M)
            else:
                C, c = 0.0, 0.0
            fitted[name] = {"C": C, "c": c, "weight": _EXTRA_WEIGHT[name]}
            diffs[name] = np.maximum(diffs[name] - C * np.exp(-c * Tm) / w, 0.0)

    scaled = {name: diffs[name].max(axis=1) * scale[name] for name in _ENTRIES}
    edges, bins = _decades(T)
    per_decade = {name: _per_decade(scaled[name], bins) for name in _ENTRIES}

    if params.gamma > 0:
        # L^1 -> L^2 bounds: t^{(1+k)/2} ||R^{k/2} K(., t)||_{L^2_xi}, k = 0, 1.
        K2 = _frobenius(s, Rm) ** 2
        logR = np.log(R[R > 0])
        for k in (0, 1):
            integrand = (Rm ** (k + 1) * K2)[:, R > 0]
            # int d^2 xi = pi int dR = pi int R d(log R)
            val = np.sqrt(np.pi * np.trapezoid(integrand, logR, axis=1)) if logR.size > 1 else np.zeros(T.size)
            key = f"prop53_k{k}"
            scaled[key] = val * T ** ((1 + k) / 2)
            per_decade[key] = _per_decade(scaled[key], bins)

    coarse_R = np.concatenate([[0.0], np.logspace(-6, 6, 61)])
    coarse_t = np.concatenate([[0.0], np.logspace(-3, 4, 36)])
    C, c = kernel_bound(params, coarse_R, coarse_t)
    fine_R = np.concatenate([[0.0], np.logspace(-8, 8, 801)])
    fine_t = np.concatenate([[0.0], np.logspace(-4, 4.5, 341)])
    ok, excess = check_kernel_bound(params, C, c, fine_R, fine_t)
    fitted["kernel_bound"] = {"C": C, "c": c}
    checks = {
        "kernel_bound": {"passed": bool(ok and c > 0), "max_excess": excess, "C": C, "c": c},
        "exponent_bracket": _bracket(params, R),
    }
    return BoundsReport(
        params=params.as_dict(),
        r_grid=R.tolist(),
        t_grid=T.tolist(),
        scaled_sup={k: v.tolist() for k, v in scaled.items()},
        per_decade_maxima=per_decade,
        decade_edges=edges,
        fitted_constants=fitted,
        checks=checks,
    )
