import warnings

import numpy as np
import pytest

from micropolar import MaterialParams, TorusGrid
from micropolar.errors import ConfigurationError, DomainError
from micropolar.initial_data import (
    InitialDataSpec,
    UnresolvedSpectrumWarning,
    build,
    gaussian_vortex,
    lowest_shell_fraction,
    random_field,
    single_mode,
    slow_mode_h,
    unit_phases,
)
from micropolar.spectral import (
    biot_savart,
    divergence,
    hermitian_asymmetry,
    l2_norm_sq,
    perp_gradient,
    to_physical,
)
from micropolar.symbol import intermediates

BIG = TorusGrid(64, 200 * np.pi)


def test_gaussian_vortex_norm():
    g = TorusGrid(128, 20.0)
    s = gaussian_vortex(None, 0.8, 1.0, g)
    # ||G - mean||^2 = pi w^2 - (2 pi w^2)^2 / L^2 for a Gaussian much narrower than the box
    w, L = 0.8, 20.0
    assert l2_norm_sq(s.omega_hat) == pytest.approx(np.pi * w * w - (2 * np.pi * w * w) ** 2 / L ** 2, rel=1e-10)
    assert s.omega_hat.spectral[0, 0] == 0


def test_gaussian_vortex_is_centered():
    g = TorusGrid(32, 2 * np.pi)
    w = to_physical(gaussian_vortex((1.0, 2.0), 0.3, 1.0, g).omega_hat)
    X1, X2 = g.coords()
    i = np.unravel_index(np.argmax(w), w.shape)
    assert abs(X1[i] - 1.0) <= g.dx and abs(X2[i] - 2.0) <= g.dx


def test_wide_vortex_warns():
    with pytest.warns(UserWarning):
        gaussian_vortex(None, 2.0, 1.0, TorusGrid(16, 2 * np.pi))


def test_single_mode_is_a_cosine():
    g = TorusGrid(16)
    s = single_mode(g, (2, 1), 3.0, 0.5)
    X1, X2 = g.coords()
    np.testing.assert_allclose(to_physical(s.omega_hat), 3.0 * np.cos(2 * X1 + X2), atol=1e-12)
    np.testing.assert_allclose(to_physical(s.h_hat), 0.5 * np.cos(2 * X1 + X2), atol=1e-12)


def test_random_field_is_seeded_and_real():
    g = TorusGrid(32)
    a = random_field(5, -1.0, g)
    b = random_field(5, -1.0, g)
    c = random_field(6, -1.0, g)
    assert a.omega_hat.spectral.tobytes() == b.omega_hat.spectral.tobytes()
    assert not np.array_equal(a.omega_hat.spectral, c.omega_hat.spectral)
    assert hermitian_asymmetry(a.omega_hat) < 1e-14


def test_unit_phases_have_unit_modulus():
    ph = unit_phases(3, TorusGrid(16))
    assert np.allclose(np.abs(ph), 1.0)


def test_power_law_velocity_is_divergence_free():
    d = build(InitialDataSpec("power_law_velocity", Gamma=1.0, scale=5.0, random_phase=True, seed=2), BIG)
    assert np.abs(divergence(*d.u0).spectral).max() < 1e-9 * np.abs(d.u0[0].spectral).max()
    assert l2_norm_sq(d.h0) == 0.0
    assert hermitian_asymmetry(d.state.omega_hat) < 1e-14


def test_enhanced_pair_identity_is_exact():
    d = build(InitialDataSpec("enhanced_pair", Gamma=1.5, scale=5.0, random_phase=True, seed=1), BIG)
    p1, p2 = perp_gradient(d.h0)
    assert np.array_equal(d.u0[0].spectral, 0.5 * p1.spectral)
    assert np.array_equal(d.u0[1].spectral, 0.5 * p2.spectral)


def test_power_law_energy_approaches_continuum():
    spec = InitialDataSpec("power_law_velocity", Gamma=1.0, scale=5.0)
    d = build(spec, TorusGrid(256, 200 * np.pi))
    from micropolar.radial import radial_norms

    cont = radial_norms(spec.radial(), "u0", 0.0, MaterialParams(1, 1, 1))
    assert d.metrics["energy_u"] / cont == pytest.approx(0.956, abs=0.01)


def test_unresolved_power_law_warns_or_raises():
    spec = InitialDataSpec("power_law_velocity", Gamma=0.5)
    coarse = TorusGrid(16, 2 * np.pi)
    with pytest.warns(UnresolvedSpectrumWarning):
        d = build(spec, coarse)
    assert d.metrics["lowest_shell_fraction"] > 0.2
    with pytest.raises(ConfigurationError, match="lowest shell"):
        build(spec, coarse, strict=True)


def test_resolved_power_law_is_quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        d = build(InitialDataSpec("power_law_velocity", Gamma=1.0, scale=5.0), TorusGrid(128, 200 * np.pi))
    assert lowest_shell_fraction(d.state) < 0.2


def test_slow_mode_h_is_the_slow_eigenvector():
    p = MaterialParams(1.0, 1.0, 1.0)
    g = TorusGrid(16)
    w = single_mode(g, (1, 1), 1.0).omega_hat
    h = slow_mode_h(w, p)
    R = 2.0
    it = intermediates(R, p)
    # A (w, h) = -decay_slow (w, h) on the slow eigenvector
    j = (1, 1)
    wv, hv = w.spectral[j], h.spectral[j]
    lhs = -(p.mu + p.chi) * R * wv + 2 * p.chi * R * hv
    assert lhs == pytest.approx(-it.decay_slow * wv, rel=1e-12)


def test_h_slow_needs_params():
    spec = InitialDataSpec("gaussian_vortex", width=1.0, h_slow=True)
    with pytest.raises(ConfigurationError):
        build(spec, TorusGrid(16))
    d = build(spec, TorusGrid(16), params=MaterialParams(1, 1, 0))
    assert l2_norm_sq(d.h0) > 0


def test_spec_validation():
    with pytest.raises(DomainError):
        InitialDataSpec("vortex_sheet")
    with pytest.raises(DomainError):
        InitialDataSpec("power_law_velocity")
    with pytest.raises(DomainError):
        InitialDataSpec("power_law_micro", Gamma=0.8)
    with pytest.raises(DomainError):
        InitialDataSpec("gaussian_vortex", width=0.0)
    with pytest.raises(DomainError):
        InitialDataSpec("random_field", cutoff=-1.0)


def test_velocity_matches_biot_savart():
    d = build(InitialDataSpec("gaussian_vortex", width=0.5), TorusGrid(32))
    u1, u2 = biot_savart(d.state.omega_hat)
    np.testing.assert_allclose(u1.spectral, d.u0[0].spectral)
