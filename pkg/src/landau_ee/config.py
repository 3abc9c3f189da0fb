"""Study configuration: a plain-text INI file parsed into a validated
StudyConfig. Unknown sections or keys are hard errors (silent default
substitution corrupts studies); every module precondition that can be
checked from the configuration alone is checked here, with field-level
messages.
"""

import configparser
import math
import os
from dataclasses import dataclass, field

from .assembly import RegionSpec, disk_region, square_region
from .errors import ConfigError, DomainError
from .fields import (
    TamenessParams,
    gaussian_bump,
    gaussian_potential,
    power_law_field,
    power_law_potential,
    zero_field,
    zero_potential,
)

_KNOWN_KEYS = {
    "model": {"b0"},
    "tameness": {"gamma", "eps"},
    "field": {"kind", "amplitude", "width", "center", "exponent"},
    "potential": {"kind", "amplitude", "width", "center", "exponent"},
    "region": {"shape", "radius", "side"},
    "scan": {"l_min", "l_max", "count", "spacing", "alphas", "interval", "p_values"},
    "truncation": {"mode", "levels", "m_max"},
    "quadrature": {"n_radial", "n_angular", "r_max"},
    "run": {"seed", "jobs", "out", "plots", "fit_window", "schatten_trials"},
    "tolerances": {"endpoint_gap"},
    "kernels": {"level", "t", "points"},
}

_DEFAULTS_TEXT = """
[model]
b0 = 1.0

[tameness]
gamma = 2.0
eps = 0.5

[field]
kind = zero

[potential]
kind = zero

[region]
shape = disk
radius = 1.0

[scan]
l_min = 3.0
l_max = 8.0
count = 6
spacing = linear
alphas = 0.5, 1.0, 2.0
interval = 0.5, 2.0
p_values = 1.0

[truncation]
mode = auto
levels = 4

[run]
seed = 0
jobs = 1
out = out
plots = true
fit_window = 4
schatten_trials = 100

[kernels]
level = 0
t = 0.3
points = 0.1,0.2 | 1.0,0.0 | -0.7,2.1
"""


@dataclass
class StudyConfig:
    b0: float
    tameness: TamenessParams
    field_family: object
    potential_family: object
    region: RegionSpec
    l_grid: tuple
    alphas: tuple
    interval: tuple
    p_values: tuple
    truncation_mode: str
    levels: int
    m_max: int
    quadrature_overrides: dict
    seed: int
    jobs: int
    out: str
    plots: bool
    fit_window: int
    schatten_trials: int
    endpoint_gap: float
    kernels_level: int
    kernels_t: float
    kernels_points: tuple
    raw: dict = field(repr=False, default=None)


def _floats(text):
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _point_list(text):
    # pairs are separated by '|' because ';' would start an inline comment
    pts = []
    for chunk in text.split("|"):
        chunk = chunk.strip()
        if not chunk:
            continue
        xy = _floats(chunk)
        if len(xy) != 2:
            raise ConfigError(f"[kernels] points: {chunk!r} is not an x,y pair")
        pts.append(xy)
    return tuple(pts)


def _build_family(section, values, tameness, is_field):
    kind = values.get("kind", "zero")
    zero, gauss, power = (
        (zero_field, gaussian_bump, power_law_field)
        if is_field
        else (zero_potential, gaussian_potential, power_law_potential)
    )
    allowed = {
        "zero": {"kind"},
        "gaussian": {"kind", "amplitude", "width", "center"},
        "power_law": {"kind", "amplitude", "exponent"},
    }
    if kind not in allowed:
        raise ConfigError(f"[{section}] kind: unknown family {kind!r}")
    extra = set(values) - allowed[kind]
    if extra:
        raise ConfigError(
            f"[{section}] keys {sorted(extra)} do not apply to kind={kind}"
        )
    try:
        if kind == "zero":
            return zero(tameness)
        if kind == "gaussian":
            center = _floats(values.get("center", "0,0"))
            if len(center) != 2:
                raise ConfigError(f"[{section}] center must be two numbers")
            return gauss(
                float(values["amplitude"]), float(values["width"]), center, tameness
            )
        return power(float(values["amplitude"]), float(values["exponent"]), tameness)
    except KeyError as missing:
        raise ConfigError(f"[{section}] missing required key {missing}")
    except DomainError as bad:
        raise ConfigError(f"[{section}]: {bad}")


def _check_interval(interval, b0, gap):
    for name, endpoint in zip("ab", interval):
        if endpoint < 0:
            raise ConfigError(f"[scan] interval endpoint {name}={endpoint} negative")
        # distance to the nearest Landau level B0(2n+1)
        n = max(0, round((endpoint / b0 - 1.0) / 2.0))
        for cand in (n - 1, n, n + 1):
            if cand >= 0 and abs(endpoint - b0 * (2 * cand + 1)) <= gap:
                raise ConfigError(
                    f"[scan] interval endpoint {name}={endpoint} lies within the gap "
                    f"tolerance {gap:g} of the Landau level B0(2*{cand}+1)="
                    f"{b0 * (2 * cand + 1):g}; endpoints must avoid the spectrum"
                )
    if not interval[0] < interval[1]:
        raise ConfigError("[scan] interval must satisfy a < b")


def load_config(path=None, text=None, overrides=None):
    """Parse and validate a study configuration.

    `overrides` is a mapping {("section","key"): value} applied after the
    file (the CLI layers --out/--jobs/--seed and environment variables on
    top through this).
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.read_string(_DEFAULTS_TEXT)
    given = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if text is not None:
        try:
            given.read_string(text)
        except configparser.Error as bad:
            raise ConfigError(f"malformed config: {bad}")
    elif path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path) as fh:
                given.read_string(fh.read())
        except configparser.Error as bad:
            raise ConfigError(f"malformed config {path}: {bad}")
    # keys the user actually wrote, as opposed to merged-in defaults; the
    # does-not-apply checks below must not fire on a default the user never set
    user_keys = set()
    for section in given.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        unknown = set(given[section]) - _KNOWN_KEYS[section]
        if unknown:
            raise ConfigError(
                f"unknown key(s) {sorted(unknown)} in section [{section}]"
            )
        if not parser.has_section(section):
            parser.add_section(section)
        for key, value in given[section].items():
            parser[section][key] = value
            user_keys.add((section, key))
    if overrides:
        for (section, key), value in overrides.items():
            parser[section][key] = str(value)
            user_keys.add((section, key))

    def get(section, key, cast=str):
        try:
            return cast(parser[section][key])
        except (ValueError, KeyError) as bad:
            raise ConfigError(f"[{section}] {key}: invalid value ({bad})")

    b0 = get("model", "b0", float)
    if not b0 > 0:
        raise ConfigError("[model] b0 must be positive")
    try:
        tameness = TamenessParams(get("tameness", "gamma", float),
                                  get("tameness", "eps", float))
    except DomainError as bad:
        raise ConfigError(f"[tameness]: {bad}")

    field_family = _build_family("field", dict(parser["field"]), tameness, True)
    potential_family = _build_family(
        "potential", dict(parser["potential"]), tameness, False
    )

    shape = get("region", "shape")
    if shape == "disk":
        if ("region", "side") in user_keys:
            raise ConfigError("[region] side does not apply to shape=disk")
        parser.remove_option("region", "side")
        region = disk_region(get("region", "radius", float))
    elif shape == "square":
        if ("region", "radius") in user_keys:
            raise ConfigError("[region] radius does not apply to shape=square")
        parser.remove_option("region", "radius")
        if not parser.has_option("region", "side"):
            raise ConfigError("[region] shape=square needs side")
        region = square_region(get("region", "side", float))
    else:
        raise ConfigError(f"[region] shape: unknown shape {shape!r}")

    l_min = get("scan", "l_min", float)
    l_max = get("scan", "l_max", float)
    count = get("scan", "count", int)
    spacing = get("scan", "spacing")
    if count < 1:
        raise ConfigError("[scan] count must be >= 1")
    if count > 1 and not l_min < l_max:
        raise ConfigError("[scan] needs l_min < l_max")
    if spacing == "linear":
        step = 0.0 if count == 1 else (l_max - l_min) / (count - 1)
        l_grid = tuple(l_min + i * step for i in range(count))
    elif spacing == "log":
        if l_min <= 0:
            raise ConfigError("[scan] log spacing needs l_min > 0")
        ratio = 1.0 if count == 1 else (l_max / l_min) ** (1.0 / (count - 1))
        l_grid = tuple(l_min * ratio**i for i in range(count))
    else:
        raise ConfigError(f"[scan] spacing must be linear or log, got {spacing!r}")

    alphas = _floats(parser["scan"]["alphas"])
    if not alphas or any(a <= 0 for a in alphas):
        raise ConfigError("[scan] alphas must be positive")
    interval = _floats(parser["scan"]["interval"])
    if len(interval) != 2:
        raise ConfigError("[scan] interval must be two numbers a, b")
    endpoint_gap = (
        float(parser["tolerances"]["endpoint_gap"])
        if parser.has_option("tolerances", "endpoint_gap")
        else 1e-8 * b0
    )
    _check_interval(interval, b0, endpoint_gap)
    p_values = _floats(parser["scan"]["p_values"])
    if not p_values or any(p <= 0 for p in p_values):
        raise ConfigError("[scan] p_values must be positive")

    mode = get("truncation", "mode")
    if mode not in ("auto", "explicit"):
        raise ConfigError("[truncation] mode must be auto or explicit")
    levels = get("truncation", "levels", int)
    if levels < 1:
        raise ConfigError("[truncation] levels must be >= 1")
    m_max = 0
    if mode == "explicit":
        m_max = get("truncation", "m_max", int)
        if m_max < 1:
            raise ConfigError("[truncation] explicit mode needs m_max >= 1")
    elif parser.has_option("truncation", "m_max"):
        raise ConfigError("[truncation] m_max applies only to mode=explicit")

    quad = {}
    if parser.has_section("quadrature"):
        for key in parser["quadrature"]:
            cast = float if key == "r_max" else int
            quad[key] = get("quadrature", key, cast)
            if quad[key] <= 0:
                raise ConfigError(f"[quadrature] {key} must be positive")

    jobs = get("run", "jobs", int)
    if jobs < 1:
        raise ConfigError("[run] jobs must be >= 1")
    fit_window = get("run", "fit_window", int)
    if fit_window < 3:
        raise ConfigError("[run] fit_window must be >= 3")
    plots_text = get("run", "plots").lower()
    if plots_text not in ("true", "false", "yes", "no", "1", "0"):
        raise ConfigError("[run] plots must be a boolean")
    trials = get("run", "schatten_trials", int)
    if trials < 1:
        raise ConfigError("[run] schatten_trials must be >= 1")

    raw = {s: dict(parser[s]) for s in parser.sections()}
    return StudyConfig(
        b0=b0,
        tameness=tameness,
        field_family=field_family,
        potential_family=potential_family,
        region=region,
        l_grid=l_grid,
        alphas=alphas,
        interval=(interval[0], interval[1]),
        p_values=p_values,
        truncation_mode=mode,
        levels=levels,
        m_max=m_max,
        quadrature_overrides=quad,
        seed=get("run", "seed", int),
        jobs=jobs,
        out=get("run", "out"),
        plots=plots_text in ("true", "yes", "1"),
        fit_window=fit_window,
        schatten_trials=trials,
        endpoint_gap=endpoint_gap,
        kernels_level=get("kernels", "level", int),
        kernels_t=get("kernels", "t", float),
        kernels_points=_point_list(parser["kernels"]["points"]),
        raw=raw,
    )


def config_echo(cfg):
    """Nested dict of every resolved setting; feeding it back through
    echo_to_text + load_config reproduces the run."""
    return {section: dict(values) for section, values in cfg.raw.items()}


def echo_to_text(echo):
    lines = []
    for section, values in echo.items():
        lines.append(f"[{section}]")
        for key, value in values.items():
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)
