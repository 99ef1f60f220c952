import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from micropolar import ScalarField, SpectralState, TorusGrid
from micropolar.errors import ConfigurationError, DomainError, InvariantError
from micropolar.spectral import (
    biot_savart,
    curl,
    dealias,
    divergence,
    get_fft_workers,
    gradient,
    h1_seminorm_sq,
    hermitian_asymmetry,
    l2_norm_sq,
    laplacian,
    low_freq_energy,
    perp_gradient,
    physical_l2_norm_sq,
    set_fft_workers,
    to_physical,
    to_spectral,
)


def _field(grid, rng):
    return to_spectral(grid, rng.standard_normal(grid.physical_shape))


def test_round_trip(grid, rng):
    x = rng.standard_normal(grid.physical_shape)
    back = to_physical(to_spectral(grid, x))
    assert np.abs(back - x).max() <= 1e-12 * np.abs(x).max()


@given(st.sampled_from([8, 16, 32, 64]), st.floats(0.5, 1000.0), st.integers(0, 2 ** 32 - 1))
def test_plancherel(n, length, seed):
    g = TorusGrid(n, length)
    f = to_spectral(g, np.random.default_rng(seed).standard_normal(g.physical_shape))
    a, b = l2_norm_sq(f), physical_l2_norm_sq(f)
    assert abs(a - b) <= 1e-12 * b


def test_single_mode_norms():
    L = 4 * np.pi
    g = TorusGrid(32, L)
    X1, X2 = g.coords()
    k = 2 * np.pi / L
    f = to_spectral(g, np.sin(3 * k * X1) * np.cos(2 * k * X2))
    # ||sin(a x) cos(b y)||^2 = L^2 / 4 on the torus, and the gradient picks up (a^2 + b^2)
    assert l2_norm_sq(f) == pytest.approx(L * L / 4, rel=1e-13)
    assert h1_seminorm_sq(f) == pytest.approx(L * L / 4 * 13 * k * k, rel=1e-13)


def test_derivatives_of_trig_polynomial():
    g = TorusGrid(16)
    X1, X2 = g.coords()
    f = to_spectral(g, np.sin(X1) * np.sin(2 * X2))
    d1, d2 = gradient(f)
    np.testing.assert_allclose(to_physical(d1), np.cos(X1) * np.sin(2 * X2), atol=1e-13)
    np.testing.assert_allclose(to_physical(d2), 2 * np.sin(X1) * np.cos(2 * X2), atol=1e-13)
    np.testing.assert_allclose(to_physical(laplacian(f)), -5 * np.sin(X1) * np.sin(2 * X2), atol=1e-12)


def test_biot_savart_inverts_curl(grid, rng):
    w = dealias(_field(grid, rng))
    w.spectral[0, 0] = 0
    u1, u2 = biot_savart(w)
    assert np.abs(to_physical(divergence(u1, u2))).max() < 1e-12
    np.testing.assert_allclose(curl(u1, u2).spectral, w.spectral, atol=1e-10)


def test_biot_savart_needs_zero_mean(grid):
    w = ScalarField.zeros(grid)
    w.spectral[0, 0] = 1.0
    with pytest.raises(InvariantError):
        biot_savart(w)


def test_state_drops_vorticity_mean(grid, rng):
    w = _field(grid, rng)
    s = SpectralState(w, _field(grid, rng))
    assert s.omega_hat.spectral[0, 0] == 0


def test_perp_gradient_is_divergence_free(grid, rng):
    f = _field(grid, rng)
    p1, p2 = perp_gradient(f)
    assert np.abs(divergence(p1, p2).spectral).max() < 1e-9


def test_dealias_mask_two_thirds():
    g = TorusGrid(12)
    m = g.dealias_mask
    idx = np.abs(g.index)
    assert m[idx == 3, 0].all() and not m[idx == 4, 0].any()
    assert m[0, 3] and not m[0, 4]


def test_dealiased_product_has_no_aliasing():
    g = TorusGrid(24)
    X1, X2 = g.coords()
    a = dealias(to_spectral(g, np.cos(7 * X1) + np.sin(5 * X2)))
    b = dealias(to_spectral(g, np.cos(7 * X1 + 3 * X2)))
    prod = dealias(to_spectral(g, to_physical(a) * to_physical(b)))
    exact = to_spectral(g, np.cos(7 * X1 + 3 * X2) * (np.cos(7 * X1) + np.sin(5 * X2)))
    np.testing.assert_allclose(prod.spectral, dealias(exact).spectral, atol=1e-10)


def test_hermitian_symmetry_of_real_data(grid, rng):
    assert hermitian_asymmetry(_field(grid, rng)) < 1e-15


def test_full_spectrum_matches_fft2(grid, rng):
    x = rng.standard_normal(grid.physical_shape)
    f = to_spectral(grid, x)
    np.testing.assert_allclose(f.full_spectrum(), np.fft.fft2(x), atol=1e-10)


def test_low_freq_energy(grid, rng):
    f = _field(grid, rng)
    assert low_freq_energy(f, 1e9) == pytest.approx(l2_norm_sq(f), rel=1e-13)
    assert low_freq_energy(f, 0.0) == pytest.approx(grid.norm_factor * abs(f.spectral[0, 0]) ** 2)
    with pytest.raises(DomainError):
        low_freq_energy(f, -1.0)


def test_low_freq_energy_of_state_is_velocity_energy(grid, rng):
    s = SpectralState(dealias(_field(grid, rng)), ScalarField.zeros(grid))
    assert low_freq_energy(s, 1e9) == pytest.approx(l2_norm_sq(biot_savart(s.omega_hat)), rel=1e-12)


def test_grid_validation():
    for bad in (3, 7, 0):
        with pytest.raises(ConfigurationError):
            TorusGrid(bad)
    with pytest.raises(ConfigurationError):
        TorusGrid(8, -1.0)


def test_shape_and_grid_mismatch(rng):
    g1, g2 = TorusGrid(8), TorusGrid(16)
    with pytest.raises(ConfigurationError):
        ScalarField(g1, np.zeros(g2.spectral_shape))
    with pytest.raises(ConfigurationError):
        ScalarField.zeros(g1) + ScalarField.zeros(g2)
    with pytest.raises(ConfigurationError):
        SpectralState(ScalarField.zeros(g1), ScalarField.zeros(g2))


def test_thread_count_does_not_change_results(rng):
    g = TorusGrid(64)
    x = rng.standard_normal(g.physical_shape)
    before = get_fft_workers()
    try:
        set_fft_workers(1)
        a = to_spectral(g, x).spectral.copy()
        set_fft_workers(4)
        b = to_spectral(g, x).spectral.copy()
    finally:
        set_fft_workers(before)
    assert a.tobytes() == b.tobytes()
    with pytest.raises(ConfigurationError):
        set_fft_workers(0)


def test_validity_time():
    g = TorusGrid(256, 200 * np.pi)
    # lowest mode k = 0.01 keeps e^{-mu t k^2} >= 0.9 roughly up to 0.1 / (mu k^2)
    assert g.validity_time(1.0) == pytest.approx(1000.0)
