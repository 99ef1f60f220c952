"""Initial data on the torus grid.

Power-law kinds sample the whole-plane transforms of :mod:`micropolar.radial`
at the grid wavenumbers. With the unscaled forward transform a field whose
continuum transform is ``F(xi)`` has coefficients ``(n / L)^2 F(xi_k)``, which
makes the discrete norms Riemann sums of the continuum ones.
"""
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DomainError
from .radial import DATA_KINDS as RADIAL_KINDS
from .radial import PHI_KINDS, RadialDataSpec
from .symbol import intermediates
from .spectral import ScalarField, SpectralState, biot_savart, curl, l2_norm_sq, perp_gradient

KINDS = RADIAL_KINDS + ("gaussian_vortex", "random_field", "single_mode")
LOWEST_SHELL_LIMIT = 0.2


class UnresolvedSpectrumWarning(UserWarning):
    pass


@dataclass(frozen=True)
class InitialDataSpec:
    kind: str
    Gamma: Optional[float] = None
    phi_kind: str = "rational"
    amplitude: float = 1.0
    seed: int = 0
    scale: float = 1.0
    # gaussian_vortex
    width: float = 0.5
    center: Optional[tuple] = None
    h_amplitude: float = 0.0
    # random_field
    spectrum_exponent: float = 0.0
    cutoff: Optional[float] = None
    # single_mode
    mode: tuple = (1, 0)
    # replace h0 by the slow-eigenvector partner of omega0 (needs params at build time)
    h_slow: bool = False
    # power-law kinds: multiply the radial spectrum by seeded unit phases
    random_phase: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown initial data kind {self.kind!r}; expected one of {KINDS}")
        if self.kind in RADIAL_KINDS:
            if self.Gamma is None:
                raise DomainError(f"{self.kind} needs Gamma")
            self.radial()  # validates Gamma, phi_kind, scale
        if self.phi_kind not in PHI_KINDS:
            raise DomainError(f"unknown phi_kind {self.phi_kind!r}")
        for name in ("amplitude", "h_amplitude", "spectrum_exponent"):
            if not np.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not self.width > 0:
            raise DomainError(f"width must be > 0, got {self.width}")
        if not (-2 ** 63 <= int(self.seed) < 2 ** 64):
            raise DomainError("seed must fit in 64 bits")
        if self.cutoff is not None and not self.cutoff > 0:
            raise DomainError("cutoff must be > 0")

    def radial(self):
        """The continuum counterpart of a power-law spec."""
        if self.kind not in RADIAL_KINDS:
            raise DomainError(f"{self.kind} has no radial counterpart")
        return RadialDataSpec(
            Gamma=float(self.Gamma),
            phi_kind=self.phi_kind,
            amplitude=float(self.amplitude),
            kind=self.kind,
            scale=float(self.scale),
        )

    def as_dict(self):
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["center"] = list(self.center) if self.center is not None else None
        out["mode"] = list(self.mode)
        return out


@dataclass
class InitialData:
    spec: Optional[InitialDataSpec]
    state: SpectralState
    u0: tuple
    h0: ScalarField
    metrics: dict = field(default_factory=dict)

    @property
    def grid(self):
        return self.state.grid


def lowest_shell_fraction(state):
    """Fraction of ``||u||^2 + ||h||^2`` carried by the modes with ``|k| = k_min``."""
    g = state.grid
    shell = np.isclose(g.kmag_sq, g.k_min ** 2)
    w = state.omega_hat.spectral
    h = state.h_hat.spectral
    e = g.weight * (np.abs(w) ** 2 * g.inv_ksq + np.abs(h) ** 2)
    total = e.sum()
    return float(e[shell].sum() / total) if total > 0 else 0.0


def _power_law(spec, grid):
    """Sample ``h0`` and the velocity potential, then build ``u0`` and ``omega0 = curl u0``.

    Both power-law velocities are ``u0 = 1/2 grad_perp f`` with
    ``f_hat = |xi|^(Gamma-2) Phi``, so the enhanced pair identity holds bit for bit.
    """
    rs = spec.radial()
    r = np.sqrt(grid.kmag_sq)
    pos = (r > 0) & grid.dealias_mask
    coef = (grid.n / grid.length) ** 2
    f = np.zeros(grid.spectral_shape, dtype=complex)
    f[pos] = coef * spec.amplitude * r[pos] ** (spec.Gamma - 2) * rs.cutoff(grid.kmag_sq[pos])
    if spec.random_phase:
        f *= unit_phases(spec.seed, grid)
    f = ScalarField(grid, f)
    zero = ScalarField.zeros(grid)
    if spec.kind == "power_law_micro":
        u0 = (zero, zero.copy())
    else:
        p1, p2 = perp_gradient(f)
        u0 = (p1 * 0.5, p2 * 0.5)
    h0 = zero if spec.kind == "power_law_velocity" else f
    return SpectralState(curl(*u0), h0.copy()), u0


def gaussian_vortex(center, width, amplitude, grid, h_amplitude=0.0):
    """Mean-free Gaussian vorticity ``amplitude (G - <G>)``, ``G = exp(-|x - c|^2 / (2 width^2))``.

    Distances use the nearest periodic image. ``h0 = h_amplitude * G``.
    """
    if not width > 0:
        raise DomainError(f"width must be > 0, got {width}")
    if width >= grid.length / 4:
        warnings.warn(
            f"vortex width {width} is not small against the box ({grid.length})",
            UnresolvedSpectrumWarning,
            stacklevel=2,
        )
    if center is None:
        center = (grid.length / 2, grid.length / 2)
    L = grid.length
    X1, X2 = grid.coords()
    d1 = (X1 - center[0] + L / 2) % L - L / 2
    d2 = (X2 - center[1] + L / 2) % L - L / 2
    G = np.exp(-(d1 * d1 + d2 * d2) / (2 * width * width))
    omega = ScalarField.from_physical(grid, amplitude * (G - G.mean()))
    h = ScalarField.from_physical(grid, h_amplitude * G)
    return SpectralState(omega, h)


def unit_phases(seed, grid, count=None):
    """Unit-modulus Hermitian-paired phases from the transform of real white noise."""
    rng = np.random.default_rng(int(seed) % 2 ** 64)
    n = grid.n
    shape = (n, n) if count is None else (count, n, n)
    noise = np.fft.rfft2(rng.standard_normal(shape), axes=(-2, -1))
    mag = np.abs(noise)
    phase = np.where(mag > 0, noise / np.where(mag > 0, mag, 1.0), 0.0)
    # self-conjugate columns are Hermitian up to rounding; make them exact
    rows = (-np.arange(n)) % n
    for col in (0, n // 2):
        c = phase[..., :, col]
        phase[..., :, col] = 0.5 * (c + np.conj(c[..., rows]))
    return phase


def random_field(seed, spectrum_exponent, grid, amplitude=1.0, cutoff=None, h_amplitude=0.0):
    """Random-phase data with ``|u_hat| ~ |xi|^spectrum_exponent e^{-(|xi|/cutoff)^4}``.

    Phases come from the transform of real white noise, so they are
    conjugate-paired automatically. The velocity energy decays under the
    heat flow like ``t^-(spectrum_exponent + 1)``.
    """
    n = grid.n
    if cutoff is None:
        cutoff = grid.k_min * n / 8
    phase = unit_phases(seed, grid, count=2)
    r = np.sqrt(grid.kmag_sq)
    pos = r > 0
    profile = np.zeros(grid.spectral_shape)
    profile[pos] = r[pos] ** spectrum_exponent * np.exp(-((r[pos] / cutoff) ** 4))
    profile = np.where(grid.dealias_mask, profile, 0.0)
    coef = (n / grid.length) ** 2
    w = amplitude * coef * r * profile * phase[0]
    h = h_amplitude * coef * profile * phase[1]
    h[0, 0] = 0.0
    return SpectralState.from_arrays(grid, w, h)


def single_mode(grid, mode=(1, 0), amplitude=1.0, h_amplitude=0.0):
    """``omega = amplitude cos(k . x)`` and ``h = h_amplitude cos(k . x)`` for one wave vector."""
    j1, j2 = (int(m) for m in mode)
    n = grid.n
    if (j1, j2) == (0, 0):
        raise DomainError("the zero mode cannot carry vorticity")
    if 3 * abs(j1) >= n or 3 * abs(j2) >= n:
        raise DomainError(f"mode {mode} lies outside the dealiased band")
    if j2 < 0 or (j2 == 0 and j1 < 0):
        j1, j2 = -j1, -j2
    w = np.zeros(grid.spectral_shape, dtype=complex)
    h = np.zeros(grid.spectral_shape, dtype=complex)
    half = 0.5 * n * n
    for arr, a in ((w, amplitude), (h, h_amplitude)):
        arr[j1 % n, j2] = a * half
        if j2 == 0:
            arr[(-j1) % n, 0] = a * half
    return SpectralState.from_arrays(grid, w, h)


def slow_mode_h(omega_hat, params):
    """``h_hat = 2 chi w / (gamma R + 4 chi - decay_slow)``: no fast-mode content in the linear flow."""
    g = omega_hat.grid
    it = intermediates(g.ksq, params)
    ratio = 2 * params.chi / (params.gamma * g.ksq + 4 * params.chi - it.decay_slow)
    return ScalarField(g, ratio * omega_hat.spectral)


def build(spec, grid, strict=False, params=None):
    """Construct :class:`InitialData` for ``spec`` on ``grid``.

    Power-law data whose lowest shell holds more than 20% of the energy are
    flagged as unresolved: a warning, or :class:`ConfigurationError` when
    ``strict``.
    """
    kind = spec.kind
    u0 = None
    if kind in RADIAL_KINDS:
        state, u0 = _power_law(spec, grid)
    elif kind == "gaussian_vortex":
        state = gaussian_vortex(spec.center, spec.width, spec.amplitude, grid, spec.h_amplitude)
    elif kind == "random_field":
        state = random_field(
            spec.seed, spec.spectrum_exponent, grid, spec.amplitude, spec.cutoff, spec.h_amplitude
        )
    else:
        state = single_mode(grid, spec.mode, spec.amplitude, spec.h_amplitude)

    if spec.h_slow:
        if params is None:
            raise ConfigurationError("h_slow data need material parameters")
        state = SpectralState(state.omega_hat, slow_mode_h(state.omega_hat, params))
    if u0 is None:
        u0 = biot_savart(state.omega_hat)
    metrics = {
        "lowest_shell_fraction": lowest_shell_fraction(state),
        "energy_u": l2_norm_sq(u0),
        "energy_h": l2_norm_sq(state.h_hat),
    }
    if kind in RADIAL_KINDS and metrics["lowest_shell_fraction"] > LOWEST_SHELL_LIMIT:
        msg = (
            f"lowest shell carries {metrics['lowest_shell_fraction']:.1%} of the energy; "
            "the grid does not resolve the low-frequency power law"
        )
        if strict:
            raise ConfigurationError(msg)
        warnings.warn(msg, UnresolvedSpectrumWarning, stacklevel=2)
    return InitialData(spec=spec, state=state, u0=u0, h0=state.h_hat.copy(), metrics=metrics)
