"""Experiment configuration files (TOML).

A file is a handful of tables; everything missing takes the default shown in
``DEFAULTS`` (or the command-specific base passed to :func:`parse_config`).
Unknown keys are rejected, parse errors carry the line number and validation
errors name the offending field.

    seed = 0
    mode = "nonlinear"          # nonlinear | linear | ns_reference

    [params]
    mu = 1.0
    chi = 1.0
    gamma = 0.0

    [grid]
    n = 128
    length_over_pi = 2.0        # or: length = 6.283185307179586

    [time]
    dt = 1e-3
    t_end = 10.0
    save_every = 10

    [initial_data]
    kind = "gaussian_vortex"
    width = 1.0

    [checks]
    energy_equality = 1e-6
"""
import copy
import math
import re
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .diagnostics import GSchedule
from .errors import ConfigurationError, MicropolarError
from .initial_data import InitialDataSpec
from .spectral import MaterialParams, TorusGrid

# check name -> default tolerance
CHECKS = {
    "energy_equality": 1e-6,  # |residual| / (E0 T)
    "identity": 1e-6,  # enstrophy identity residual per unit time
    "psi_monotone": 1e-10,  # slack relative to psi(0)
    "little_o": 0.1,  # final-window value / peak
    "decay_slope_u": 0.15,  # |gamma_hat - expected|
    "decay_slope_h": 0.3,
    "slope_gap": 0.8,  # energy_h exponent >= energy_u exponent + tol
    "profile_ratio": 5.0,  # max/min of err^2 / zeta
    "profile_h_slope": 0.4,
    "fourier_splitting": 1e-6,
    "enhanced_dissipation": 0.5,  # micropolar final energy / NS final energy
    "slope_difference": 0.3,
}

DEFAULTS = {
    "seed": 0,
    "mode": "nonlinear",
    "strict": False,
    "params": {"mu": 1.0, "chi": 1.0, "gamma": 0.0},
    "grid": {"n": 128, "length": 2 * math.pi},
    "time": {
        "dt": 1e-3,
        "t_end": 10.0,
        "save_every": 10,
        "cfl_limit": 0.5,
        "enforce_dealias": True,
    },
    "initial_data": {"kind": "gaussian_vortex", "width": 1.0},
    "outputs": {
        "directory": "out",
        "emit_csv": True,
        "emit_json": True,
        "emit_snapshots": False,
        "emit_svg": False,
        "snapshot_every": 1,
    },
    "diagnostics": {
        "profile_errors": False,
        "linf": False,
        "g_schedule": "none",
        "g_c": 3.0,
        "g_t0": 10.0,
        "fit_window": [],
        "eddy_turnovers": 5.0,
        "expected_gamma": -1.0,
    },
    "checks": {},
}

_INITIAL_KEYS = set(InitialDataSpec.__dataclass_fields__)
_TOP_KEYS = {"seed", "mode", "strict", "params", "grid", "time", "initial_data", "outputs", "diagnostics", "checks"}


@dataclass(frozen=True)
class GridSection:
    n: int
    length: float


@dataclass(frozen=True)
class TimeSection:
    dt: float
    t_end: float
    save_every: int
    cfl_limit: float = 0.5
    enforce_dealias: bool = True


@dataclass(frozen=True)
class OutputsSection:
    directory: str = "out"
    emit_csv: bool = True
    emit_json: bool = True
    emit_snapshots: bool = False
    emit_svg: bool = False
    snapshot_every: int = 1


@dataclass(frozen=True)
class DiagnosticsSection:
    profile_errors: bool = False
    linf: bool = False
    g_schedule_kind: str = "none"
    g_c: float = 3.0
    g_t0: float = 10.0
    fit_window: tuple = ()
    eddy_turnovers: float = 5.0
    expected_gamma: float = -1.0

    def g_schedule(self):
        if self.g_schedule_kind == "none":
            return None
        return GSchedule(kind=self.g_schedule_kind, c=self.g_c, t0=self.g_t0)


@dataclass(frozen=True)
class ExperimentConfig:
    params: MaterialParams
    grid: GridSection
    time: TimeSection
    initial_data: InitialDataSpec
    mode: str = "nonlinear"
    outputs: OutputsSection = field(default_factory=OutputsSection)
    diagnostics: DiagnosticsSection = field(default_factory=DiagnosticsSection)
    checks: dict = field(default_factory=dict)
    seed: int = 0
    strict: bool = False

    def torus_grid(self):
        return TorusGrid(self.grid.n, self.grid.length)

    def to_dict(self):
        d = self.diagnostics
        return {
            "seed": self.seed,
            "mode": self.mode,
            "strict": self.strict,
            "params": self.params.as_dict(),
            "grid": asdict(self.grid),
            "time": asdict(self.time),
            "initial_data": self.initial_data.as_dict(),
            "outputs": asdict(self.outputs),
            "diagnostics": {
                "profile_errors": d.profile_errors,
                "linf": d.linf,
                "g_schedule": d.g_schedule_kind,
                "g_c": d.g_c,
                "g_t0": d.g_t0,
                "fit_window": list(d.fit_window),
                "eddy_turnovers": d.eddy_turnovers,
                "expected_gamma": d.expected_gamma,
            },
            "checks": dict(self.checks),
        }

    def replace(self, **changes):
        """Return a copy with top-level sections replaced."""
        data = {k: getattr(self, k) for k in self.__dataclass_fields__}
        data.update(changes)
        return ExperimentConfig(**data)


def deep_merge(base, override):
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "initial_data":
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _reject_unknown(section, data, allowed):
    extra = sorted(set(data) - set(allowed))
    if extra:
        where = f"[{section}]" if section else "top level"
        raise ConfigurationError(f"unknown key {extra[0]!r} in {where}")


def _num(section, key, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{section}.{key}: expected a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise ConfigurationError(f"{section}.{key}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _bool(section, key, value):
    if not isinstance(value, bool):
        raise ConfigurationError(f"{section}.{key}: expected true or false, got {value!r}")
    return value


def from_dict(raw, base=None):
    """Validate a nested dict (as produced by TOML parsing) merged over ``base``."""
    if not isinstance(raw, dict):
        raise ConfigurationError("configuration must be a table")
    _reject_unknown("", raw, _TOP_KEYS)
    for sec in ("params", "grid", "time", "initial_data", "outputs", "diagnostics", "checks"):
        if sec in raw and not isinstance(raw[sec], dict):
            raise ConfigurationError(f"{sec}: expected a table")
    merged = deep_merge(base if base is not None else DEFAULTS, raw)
    if "initial_data" not in raw and base is None:
        merged["initial_data"] = copy.deepcopy(DEFAULTS["initial_data"])

    p = merged["params"]
    _reject_unknown("params", p, ("mu", "chi", "gamma"))
    vals = {k: _num("params", k, p[k]) for k in ("mu", "chi", "gamma") if k in p}
    for k in ("mu", "chi"):
        if k not in vals:
            raise ConfigurationError(f"params.{k}: required")
    if not vals["mu"] > 0:
        raise ConfigurationError(f"params.mu: must be > 0, got {vals['mu']}")
    if not vals["chi"] > 0:
        raise ConfigurationError(f"params.chi: must be > 0, got {vals['chi']}")
    if not vals.get("gamma", 0.0) >= 0:
        raise ConfigurationError(f"params.gamma: must be >= 0, got {vals['gamma']}")
    params = MaterialParams(**vals)

    g = merged["grid"]
    _reject_unknown("grid", g, ("n", "length", "length_over_pi"))
    if "length_over_pi" in raw.get("grid", {}) and "length" in raw.get("grid", {}):
        raise ConfigurationError("grid.length: give either length or length_over_pi, not both")
    n = _num("grid", "n", g.get("n"), int)
    if "length_over_pi" in g and "length" not in raw.get("grid", {}):
        length = _num("grid", "length_over_pi", g["length_over_pi"]) * math.pi
    else:
        length = _num("grid", "length", g.get("length"))
    if n < 4 or n % 2:
        raise ConfigurationError(f"grid.n: must be an even integer >= 4, got {n}")
    if not (length > 0 and math.isfinite(length)):
        raise ConfigurationError(f"grid.length: must be > 0, got {length}")
    grid = GridSection(n=n, length=length)

    t = merged["time"]
    _reject_unknown("time", t, ("dt", "t_end", "save_every", "cfl_limit", "enforce_dealias"))
    dt = _num("time", "dt", t["dt"])
    t_end = _num("time", "t_end", t["t_end"])
    save_every = _num("time", "save_every", t["save_every"], int)
    cfl = _num("time", "cfl_limit", t["cfl_limit"])
    if not dt > 0:
        raise ConfigurationError(f"time.dt: must be > 0, got {dt}")
    if not t_end > 0:
        raise ConfigurationError(f"time.t_end: must be > 0, got {t_end}")
    if dt > t_end:
        raise ConfigurationError("time.dt: must not exceed time.t_end")
    if save_every < 1:
        raise ConfigurationError("time.save_every: must be >= 1")
    if not cfl > 0:
        raise ConfigurationError("time.cfl_limit: must be > 0")
    time = TimeSection(dt, t_end, save_every, cfl, _bool("time", "enforce_dealias", t["enforce_dealias"]))

    idata = dict(merged["initial_data"])
    _reject_unknown("initial_data", idata, _INITIAL_KEYS)
    for k in ("center", "mode"):
        if k in idata and idata[k] is not None:
            idata[k] = tuple(idata[k])
    if "seed" not in idata:
        idata["seed"] = _num("", "seed", merged["seed"], int)
    try:
        initial = InitialDataSpec(**idata)
    except MicropolarError as exc:
        raise ConfigurationError(f"initial_data: {exc}") from exc
    except TypeError as exc:
        raise ConfigurationError(f"initial_data: {exc}") from exc

    mode = merged["mode"]
    if mode not in ("nonlinear", "linear", "ns_reference"):
        raise ConfigurationError(f"mode: must be nonlinear, linear or ns_reference, got {mode!r}")

    o = merged["outputs"]
    _reject_unknown("outputs", o, OutputsSection.__dataclass_fields__)
    outputs = OutputsSection(
        directory=str(o["directory"]),
        emit_csv=_bool("outputs", "emit_csv", o["emit_csv"]),
        emit_json=_bool("outputs", "emit_json", o["emit_json"]),
        emit_snapshots=_bool("outputs", "emit_snapshots", o["emit_snapshots"]),
        emit_svg=_bool("outputs", "emit_svg", o["emit_svg"]),
        snapshot_every=_num("outputs", "snapshot_every", o["snapshot_every"], int),
    )
    if outputs.snapshot_every < 1:
        raise ConfigurationError("outputs.snapshot_every: must be >= 1")

    d = merged["diagnostics"]
    _reject_unknown("diagnostics", d, DEFAULTS["diagnostics"])
    kind = d["g_schedule"]
    if kind not in ("none", "inverse", "zero"):
        raise ConfigurationError(f"diagnostics.g_schedule: must be none, inverse or zero, got {kind!r}")
    window = tuple(float(x) for x in d["fit_window"])
    if window and not (len(window) == 2 and 0 < window[0] < window[1]):
        raise ConfigurationError(f"diagnostics.fit_window: need [t_lo, t_hi] with 0 < t_lo < t_hi, got {list(window)}")
    diagnostics = DiagnosticsSection(
        profile_errors=_bool("diagnostics", "profile_errors", d["profile_errors"]),
        linf=_bool("diagnostics", "linf", d["linf"]),
        g_schedule_kind=kind,
        g_c=_num("diagnostics", "g_c", d["g_c"]),
        g_t0=_num("diagnostics", "g_t0", d["g_t0"]),
        fit_window=window,
        eddy_turnovers=_num("diagnostics", "eddy_turnovers", d["eddy_turnovers"]),
        expected_gamma=_num("diagnostics", "expected_gamma", d["expected_gamma"]),
    )
    if kind == "inverse" and not (diagnostics.g_c > 0 and diagnostics.g_t0 > 0):
        raise ConfigurationError("diagnostics.g_c and diagnostics.g_t0: must be > 0")

    checks = {}
    for name, tol in merged["checks"].items():
        if name not in CHECKS:
            raise ConfigurationError(f"unknown key {name!r} in [checks]")
        if tol is True:
            tol = CHECKS[name]
        checks[name] = _num("checks", name, tol)

    return ExperimentConfig(
        params=params,
        grid=grid,
        time=time,
        initial_data=initial,
        mode=mode,
        outputs=outputs,
        diagnostics=diagnostics,
        checks=checks,
        seed=_num("", "seed", merged["seed"], int),
        strict=_bool("", "strict", merged["strict"]),
    )


_LINE = re.compile(r"line (\d+)")


def read_toml(text):
    """Raw tables from TOML ``text``; parse errors name the line."""
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = _LINE.search(str(exc))
        line = m.group(1) if m else "?"
        raise ConfigurationError(f"config parse error at line {line}: {exc}") from exc


def parse_config(text, base=None):
    """Parse TOML ``text`` into a validated :class:`ExperimentConfig`."""
    return from_dict(read_toml(text), base=base)


def load_config(path, base=None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base=base)
