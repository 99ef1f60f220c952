import math

import numpy as np
import pytest
from oracle_values import RADIAL_ORACLE, RADIAL_PARAMS

from micropolar import MaterialParams
from micropolar.errors import DomainError
from micropolar.radial import RadialDataSpec, phi, radial_norms

P = MaterialParams(*RADIAL_PARAMS)


@pytest.mark.parametrize("case", RADIAL_ORACLE)
def test_matches_frozen_quadrature(case):
    which, kind, G, t, want = case
    got = radial_norms(RadialDataSpec(G, kind=kind), which, t, P)
    assert got == pytest.approx(want, rel=1e-8)


def test_closed_forms():
    # ||u0||^2 = (2 pi)^-1 int 1/4 r / (1 + s^2 r^2)^2 dr = 1 / (16 pi s^2)
    for s in (1.0, 5.0):
        assert radial_norms(RadialDataSpec(1.0, scale=s), "u0", 0.0, P) == pytest.approx(1 / (16 * math.pi * s * s), rel=1e-9)
    # ||h0||^2 for Gamma = 3/2: (2 pi)^-1 int (1 + r^2)^-2 dr = 1/8
    assert radial_norms(RadialDataSpec(1.5, kind="power_law_micro"), "h0", 0.0, P) == pytest.approx(0.125, rel=1e-9)
    # heat flow of Gaussian-cut data: 1 / (32 pi (1 + mu t))
    spec = RadialDataSpec(1.0, phi_kind="gaussian")
    for t in (0.0, 3.0, 1e3):
        assert radial_norms(spec, "heat-u", t, P) == pytest.approx(1 / (32 * math.pi * (1 + t)), rel=1e-9)


def test_amplitude_scales_quadratically():
    a = radial_norms(RadialDataSpec(1.0, amplitude=3.0), "u_L", 5.0, P)
    b = radial_norms(RadialDataSpec(1.0), "u_L", 5.0, P)
    assert a == pytest.approx(9 * b, rel=1e-9)


def test_linear_flow_starts_at_data():
    spec = RadialDataSpec(1.5, kind="enhanced_pair")
    assert radial_norms(spec, "u_L", 0.0, P) == pytest.approx(radial_norms(spec, "u0", 0.0, P), rel=1e-9)


def test_enhanced_pair_has_zero_heat_profile():
    # u0 = 1/2 grad_perp h0 makes the velocity profile vanish identically
    spec = RadialDataSpec(1.5, kind="enhanced_pair")
    assert radial_norms(spec, "heat-pair", 10.0, P) <= 1e-20 * radial_norms(spec, "u0", 0.0, P)


def test_profile_error_decays_faster_than_norm():
    spec = RadialDataSpec(1.0)
    for t in (10.0, 100.0):
        assert radial_norms(spec, "profile-error-u", t, P) < 0.1 * radial_norms(spec, "u_L", t, P)


def test_validation():
    with pytest.raises(DomainError):
        RadialDataSpec(0.0)
    with pytest.raises(DomainError):
        RadialDataSpec(2.5)
    with pytest.raises(DomainError, match="Gamma > 1"):
        RadialDataSpec(1.0, kind="power_law_micro")
    with pytest.raises(DomainError):
        RadialDataSpec(1.0, phi_kind="box")
    with pytest.raises(DomainError):
        radial_norms(RadialDataSpec(1.0), "nope", 1.0, P)
    with pytest.raises(DomainError):
        radial_norms(RadialDataSpec(1.0), "profile-error-u", 0.0, P)
    with pytest.raises(DomainError):
        phi(1.0, "box")


def test_phi_values():
    assert phi(0.0) == 1.0 and phi(1.0) == 0.5
    assert phi(2.0, "gaussian") == pytest.approx(np.exp(-2.0))
