"""Torus grids, spectral fields and Fourier-multiplier operators.

Conventions
-----------
Physical samples ``f[i1, i2]`` live at ``x = (i1, i2) * dx`` on the periodic
box ``[0, L)^2``. Spectral coefficients are stored in the real-FFT half layout
``(n, n // 2 + 1)``: axis 0 carries the full index set in FFT order, axis 1
the non-negative indices. Hermitian symmetry ``c(-j) = conj(c(j))`` is
therefore implicit everywhere except on the two self-conjugate columns
(``j2 = 0`` and ``j2 = n/2``), which :func:`hermitian_asymmetry` checks.

The forward transform is unscaled and the inverse carries ``1/n^2``, so

    ||f||^2 = dx^2 * sum_x |f(x)|^2 = (L^2 / n^4) * sum_k |f_k|^2

with the sum running over the full spectrum. :attr:`TorusGrid.norm_factor`
is that ``L^2 / n^4`` constant; half-layout sums use :attr:`TorusGrid.weight`
(2 for interior columns, 1 for the self-conjugate ones).

Derivative multipliers vanish on the Nyquist index in each direction, so the
odd operators keep real fields real and ``curl(perp_gradient(f))`` equals
``laplacian(f)`` mode by mode. The operator symbol ``|xi|^2`` used by the
Laplacian, Biot-Savart inversion, heat and micropolar propagators is built
from these multipliers. Norm cut-offs (:func:`low_freq_energy`) and the
dealiasing mask use the true wavenumber magnitude.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from . import _kernels
from .errors import ConfigurationError, DomainError, InvariantError

_FFT_WORKERS = 1


def set_fft_workers(workers):
    """Set the thread count used by every transform (results do not depend on it)."""
    global _FFT_WORKERS
    workers = int(workers)
    if workers < 1:
        raise ConfigurationError(f"thread count must be >= 1, got {workers}")
    _FFT_WORKERS = workers


def get_fft_workers():
    return _FFT_WORKERS


@dataclass(frozen=True)
class MaterialParams:
    """Kinematic viscosity ``mu``, vortex viscosity ``chi`` and spin viscosity ``gamma``."""

    mu: float
    chi: float
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("mu", "chi", "gamma"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.mu <= 0:
            raise DomainError(f"mu must be > 0, got {self.mu}")
        if self.chi <= 0:
            raise DomainError(f"chi must be > 0, got {self.chi}")
        if self.gamma < 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")

    def as_dict(self):
        return {"mu": self.mu, "chi": self.chi, "gamma": self.gamma}


class TorusGrid:
    """Square periodic grid with ``n`` modes per direction and side ``length``."""

    def __init__(self, n, length=2 * np.pi):
        n = int(n)
        length = float(length)
        if n < 4 or n % 2:
            raise ConfigurationError(f"n must be an even integer >= 4, got {n}")
        if not (length > 0 and np.isfinite(length)):
            raise ConfigurationError(f"length must be a positive finite number, got {length}")
        self.n = n
        self.length = length

    def __repr__(self):
        return f"TorusGrid(n={self.n}, length={self.length!r})"

    def __eq__(self, other):
        return isinstance(other, TorusGrid) and (self.n, self.length) == (other.n, other.length)

    def __hash__(self):
        return hash((self.n, self.length))

    @property
    def dx(self):
        return self.length / self.n

    @property
    def k_min(self):
        return 2 * np.pi / self.length

    @property
    def physical_shape(self):
        return (self.n, self.n)

    @property
    def spectral_shape(self):
        return (self.n, self.n // 2 + 1)

    @property
    def norm_factor(self):
        return self.length ** 2 / float(self.n) ** 4

    @cached_property
    def index(self):
        """Integer mode indices in FFT order, ``-n/2 .. n/2 - 1``."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)

    @cached_property
    def wavenumbers(self):
        """``k_j = (2 pi / L) j`` for the indices of :attr:`index`."""
        return self.k_min * self.index.astype(float)

    @cached_property
    def _idx1(self):
        return self.index[:, None]

    @cached_property
    def _idx2(self):
        return np.arange(self.n // 2 + 1)[None, :]

    @cached_property
    def k1(self):
        """Derivative multiplier along axis 0 (Nyquist row zeroed), shape (n, 1)."""
        k = self.k_min * self._idx1.astype(float)
        k[self._idx1 == -self.n // 2] = 0.0
        return k

    @cached_property
    def k2(self):
        """Derivative multiplier along axis 1 (Nyquist column zeroed), shape (1, n//2+1)."""
        k = self.k_min * self._idx2.astype(float)
        k[self._idx2 == self.n // 2] = 0.0
        return k

    @cached_property
    def ksq(self):
        """Operator symbol ``|xi|^2`` on the half layout."""
        return np.ascontiguousarray(self.k1 ** 2 + self.k2 ** 2)

    @cached_property
    def inv_ksq(self):
        out = np.zeros(self.spectral_shape)
        nz = self.ksq > 0
        out[nz] = 1.0 / self.ksq[nz]
        return out

    @cached_property
    def kmag_sq(self):
        """True ``|xi|^2`` including Nyquist indices; used for cut-offs."""
        k1 = self.k_min * self._idx1.astype(float)
        k2 = self.k_min * self._idx2.astype(float)
        return np.ascontiguousarray(k1 ** 2 + k2 ** 2)

    @cached_property
    def weight(self):
        w = np.full(self.spectral_shape, 2.0)
        w[:, 0] = 1.0
        w[:, -1] = 1.0
        return w

    @cached_property
    def dealias_mask(self):
        """Two-thirds rule on the half layout: ``|j1| < n/3`` and ``|j2| < n/3``."""
        return (3 * np.abs(self._idx1) < self.n) & (3 * np.abs(self._idx2) < self.n)

    @cached_property
    def full_dealias_mask(self):
        idx = np.abs(self.index)
        return (3 * idx[:, None] < self.n) & (3 * idx[None, :] < self.n)

    @cached_property
    def ones(self):
        return np.ones(self.spectral_shape)

    def coords(self):
        """Physical sample coordinates ``(X1, X2)`` with ``ij`` indexing."""
        x = np.arange(self.n) * self.dx
        return np.meshgrid(x, x, indexing="ij")

    def validity_time(self, mu):
        """Largest time for which the lowest mode keeps >= 90% under ``e^{mu t Delta}``."""
        return 0.1 / (mu * self.k_min ** 2)


def rfft2(samples):
    return sfft.rfft2(samples, workers=_FFT_WORKERS)


def irfft2(coefs, n):
    return sfft.irfft2(coefs, s=(n, n), workers=_FFT_WORKERS)


class ScalarField:
    """A real scalar field on a :class:`TorusGrid`, stored spectrally."""

    __slots__ = ("grid", "spectral")

    def __init__(self, grid, spectral):
        spectral = np.ascontiguousarray(spectral, dtype=np.complex128)
        if spectral.shape != grid.spectral_shape:
            raise ConfigurationError(
                f"spectral array has shape {spectral.shape}, grid expects {grid.spectral_shape}"
            )
        self.grid = grid
        self.spectral = spectral

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.spectral_shape, dtype=np.complex128))

    @classmethod
    def from_physical(cls, grid, samples):
        return to_spectral(grid, samples)

    @property
    def physical(self):
        return to_physical(self)

    def copy(self):
        return ScalarField(self.grid, self.spectral.copy())

    def full_spectrum(self):
        """Expand to the full ``n x n`` FFT layout using Hermitian symmetry."""
        n = self.grid.n
        full = np.empty((n, n), dtype=np.complex128)
        m = n // 2 + 1
        full[:, :m] = self.spectral
        neg_rows = (-np.arange(n)) % n
        for j in range(m, n):
            full[:, j] = np.conj(self.spectral[neg_rows, n - j])
        return full

    def _check(self, other):
        if other.grid != self.grid:
            raise ConfigurationError("fields live on different grids")

    def __add__(self, other):
        self._check(other)
        return ScalarField(self.grid, self.spectral + other.spectral)

    def __sub__(self, other):
        self._check(other)
        return ScalarField(self.grid, self.spectral - other.spectral)

    def __mul__(self, scalar):
        return ScalarField(self.grid, self.spectral * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, -self.spectral)


@dataclass
class SpectralState:
    """Spectral vorticity ``omega`` and microrotation ``h``; the solver state."""

    omega_hat: ScalarField
    h_hat: ScalarField

    def __post_init__(self):
        if self.omega_hat.grid != self.h_hat.grid:
            raise ConfigurationError("omega and h live on different grids")
        if self.omega_hat.spectral[0, 0] != 0:
            w = self.omega_hat.spectral.copy()
            w[0, 0] = 0.0
            self.omega_hat = ScalarField(self.omega_hat.grid, w)

    @property
    def grid(self):
        return self.omega_hat.grid

    @classmethod
    def zeros(cls, grid):
        return cls(ScalarField.zeros(grid), ScalarField.zeros(grid))

    @classmethod
    def from_arrays(cls, grid, omega_hat, h_hat):
        return cls(ScalarField(grid, omega_hat), ScalarField(grid, h_hat))

    def copy(self):
        return SpectralState(self.omega_hat.copy(), self.h_hat.copy())

    def velocity(self):
        return biot_savart(self.omega_hat)


def to_spectral(grid, samples):
    """Forward (unscaled) transform of physical samples."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != grid.physical_shape:
        raise ConfigurationError(
            f"physical array has shape {samples.shape}, grid expects {grid.physical_shape}"
        )
    return ScalarField(grid, rfft2(samples))


def to_physical(field):
    """Inverse transform (scaled by ``1/n^2``) back to real samples."""
    return irfft2(field.spectral, field.grid.n)


def hermitian_asymmetry(field):
    """Max ``|c(-j) - conj(c(j))|`` over the self-conjugate columns, relative to max ``|c|``."""
    c = field.spectral
    scale = np.abs(c).max()
    if scale == 0:
        return 0.0
    n = field.grid.n
    neg_rows = (-np.arange(n)) % n
    worst = 0.0
    for col in (0, n // 2):
        v = c[:, col]
        worst = max(worst, float(np.abs(v[neg_rows] - np.conj(v)).max()))
    return worst / scale


def _vector_grid(u1, u2):
    if u1.grid != u2.grid:
        raise ConfigurationError("vector components live on different grids")
    return u1.grid


def biot_savart(omega_hat):
    """Velocity ``u = -i xi_perp / |xi|^2 * omega`` from mean-free vorticity."""
    if omega_hat.spectral[0, 0] != 0:
        raise InvariantError(
            f"Biot-Savart needs zero-mean vorticity, zero mode is {omega_hat.spectral[0, 0]!r}"
        )
    g = omega_hat.grid
    w = omega_hat.spectral * g.inv_ksq
    return ScalarField(g, 1j * g.k2 * w), ScalarField(g, -1j * g.k1 * w)


def gradient(f):
    g = f.grid
    return ScalarField(g, 1j * g.k1 * f.spectral), ScalarField(g, 1j * g.k2 * f.spectral)


def perp_gradient(f):
    """``grad_perp f = (-d2 f, d1 f)``."""
    g = f.grid
    return ScalarField(g, -1j * g.k2 * f.spectral), ScalarField(g, 1j * g.k1 * f.spectral)


def laplacian(f):
    return ScalarField(f.grid, -f.grid.ksq * f.spectral)


def curl(u1, u2):
    """``d1 u2 - d2 u1``."""
    g = _vector_grid(u1, u2)
    return ScalarField(g, 1j * g.k1 * u2.spectral - 1j * g.k2 * u1.spectral)


def divergence(u1, u2):
    g = _vector_grid(u1, u2)
    return ScalarField(g, 1j * g.k1 * u1.spectral + 1j * g.k2 * u2.spectral)


def dealias(f):
    """Zero every coefficient outside the two-thirds mask."""
    return ScalarField(f.grid, np.where(f.grid.dealias_mask, f.spectral, 0.0))


def _spectral_sq_sum(coefs, grid, mult=None):
    a = coefs.real * coefs.real + coefs.imag * coefs.imag
    if mult is not None:
        a = a * mult
    return float((grid.weight * a).sum())


def l2_norm_sq(f):
    """``||f||^2`` for a field or a tuple of component fields."""
    if isinstance(f, tuple):
        return sum(l2_norm_sq(c) for c in f)
    return f.grid.norm_factor * _spectral_sq_sum(f.spectral, f.grid)


def h1_seminorm_sq(f):
    """``||grad f||^2`` (summed over components for a tuple)."""
    if isinstance(f, tuple):
        return sum(h1_seminorm_sq(c) for c in f)
    return f.grid.norm_factor * _spectral_sq_sum(f.spectral, f.grid, f.grid.ksq)


def physical_l2_norm_sq(f):
    """``dx^2 * sum |f(x)|^2`` computed from physical samples."""
    return f.grid.dx ** 2 * float(np.sum(to_physical(f) ** 2))


def low_freq_energy(obj, radius):
    """``sum_{|xi| <= radius} |coefficient|^2`` in the norm convention of :func:`l2_norm_sq`.

    For a :class:`SpectralState` the sum is over the velocity, which is the
    low-frequency energy used by Fourier splitting.
    """
    radius = float(radius)
    if not radius >= 0:
        raise DomainError(f"radius must be >= 0, got {radius}")
    if isinstance(obj, SpectralState):
        g = obj.grid
        s = _kernels.masked_sum(obj.omega_hat.spectral, g.kmag_sq, g.inv_ksq, g.weight, radius * radius)
        return g.norm_factor * s
    if isinstance(obj, tuple):
        return sum(low_freq_energy(c, radius) for c in obj)
    g = obj.grid
    return g.norm_factor * _kernels.masked_sum(obj.spectral, g.kmag_sq, g.ones, g.weight, radius * radius)
