import math

import pytest

from micropolar.config import CHECKS, DEFAULTS, from_dict, load_config, parse_config
from micropolar.errors import ConfigurationError
from micropolar.experiments import BASES, base_config, default_config

GOOD = """
seed = 4
[params]
mu = 2.0
chi = 0.5
gamma = 0.25
[grid]
n = 64
length_over_pi = 4.0
[time]
dt = 0.01
t_end = 1.0
[initial_data]
kind = "random_field"
spectrum_exponent = -1.0
[diagnostics]
g_schedule = "inverse"
[checks]
energy_equality = true
fourier_splitting = 1e-5
"""


def test_parse_good_file():
    c = parse_config(GOOD)
    assert c.params.as_dict() == {"mu": 2.0, "chi": 0.5, "gamma": 0.25}
    assert c.grid.length == pytest.approx(4 * math.pi)
    assert c.torus_grid().n == 64
    assert c.seed == 4
    assert c.checks == {"energy_equality": CHECKS["energy_equality"], "fourier_splitting": 1e-5}
    assert c.diagnostics.g_schedule().kind == "inverse"
    assert c.time.save_every == DEFAULTS["time"]["save_every"]


def test_defaults_parse():
    c = parse_config("")
    assert c.mode == "nonlinear" and c.initial_data.kind == "gaussian_vortex"
    assert c.diagnostics.g_schedule() is None


def test_round_trip_through_dict():
    c = parse_config(GOOD)
    assert from_dict(c.to_dict()).to_dict() == c.to_dict()


@pytest.mark.parametrize(
    "text, match",
    [
        ("[params]\nchi = 0.0\n", "params.chi"),
        ("[params]\ngamma = -1\n", "params.gamma"),
        ("[params]\nnu = 1\n", "unknown key 'nu' in \\[params\\]"),
        ("bogus = 1\n", "unknown key 'bogus'"),
        ("[grid]\nn = 7\n", "grid.n"),
        ("[grid]\nlength = 1\nlength_over_pi = 1\n", "grid.length"),
        ("[time]\ndt = 0\n", "time.dt"),
        ("[time]\ndt = 2.0\nt_end = 1.0\n", "time.dt"),
        ("mode = \"euler\"\n", "mode"),
        ("[initial_data]\nkind = \"sheet\"\n", "initial_data"),
        ("[diagnostics]\nfit_window = [5.0, 1.0]\n", "diagnostics.fit_window"),
        ("[checks]\nvibes = 1\n", "unknown key 'vibes' in \\[checks\\]"),
        ("[params]\nmu = \"one\"\n", "params.mu"),
    ],
)
def test_validation_names_the_field(text, match):
    with pytest.raises(ConfigurationError, match=match):
        parse_config(text)


def test_parse_error_has_line_number():
    with pytest.raises(ConfigurationError, match="line 3"):
        parse_config("[params]\nmu = 1.0\nchi = = 2\n")


def test_load_config(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text(GOOD)
    assert load_config(p).seed == 4
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "missing.toml")


def test_replace_keeps_validation():
    c = parse_config(GOOD)
    d = c.replace(seed=9)
    assert d.seed == 9 and c.seed == 4


@pytest.mark.parametrize("command", sorted(BASES))
def test_command_bases_are_valid(command):
    c = default_config(command)
    assert c.checks
    assert base_config(command)["grid"]["n"] == c.grid.n
