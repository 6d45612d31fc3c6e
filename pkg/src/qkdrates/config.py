"""INI scenario files.

Every physical key carries its unit in the name. A scenario either names a
preset (``set = 1``) whose fields it may override, or spells out every field
of the platforms it uses. Example::

    [scenario]
    set = 1
    protocol = decoy
    sweep = transmittance
    t_min = 1e-6
    t_max = 1
    grid = 40

    [photon_counter]
    detector_efficiency = 0.15
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields, replace
from typing import Optional

from .presets import HomodyneParams, ParameterSet, PhotonCounterParams, get_preset

# INI key -> dataclass field, per section
PHOTON_COUNTER_KEYS = {
    "visibility_pm": "V_pm",
    "visibility_eb": "V_eb",
    "bob_transmission": "t_B",
    "detector_efficiency": "eta",
    "dark_count_prob_per_gate": "p_d",
    "cow_bit_error": "eps_cow",
    "eb_multipair_pns_fraction": "zeta",
    "f_ec": "f_EC",
}
HOMODYNE_KEYS = {
    "excess_noise_snu": "epsilon",
    "detector_efficiency": "eta",
    "electronic_noise_snu": "v_el",
    "reconciliation_efficiency": "beta",
}
SWEEP_VARIABLES = ("transmittance", "distance")
SCENARIOS = ("uncalibrated", "calibrated_upper")


class ConfigError(ValueError):
    """Malformed or incomplete configuration; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class ScenarioConfig:
    params: ParameterSet
    protocols: tuple[str, ...] = ()
    sweep: str = "transmittance"
    x_min: float = 1e-7
    x_max: float = 1.0
    grid: int = 50
    scenario: str = "uncalibrated"
    out_csv: Optional[str] = None
    out_svg: Optional[str] = None

    def __post_init__(self):
        if self.grid < 2:
            raise ConfigError("scenario.grid", "grid size must be >= 2")
        if not 0.0 < self.x_min < self.x_max:
            raise ConfigError("scenario.range", "range must be positive and ordered")
        if self.sweep not in SWEEP_VARIABLES:
            raise ConfigError("scenario.sweep", f"must be one of {SWEEP_VARIABLES}")
        if self.scenario not in SCENARIOS:
            raise ConfigError("scenario.scenario", f"must be one of {SCENARIOS}")


def _float(section: configparser.SectionProxy, key: str) -> float:
    try:
        return float(section[key])
    except ValueError:
        raise ConfigError(f"{section.name}.{key}", f"not a number: {section[key]!r}") from None


def _section_params(cp: configparser.ConfigParser, name: str, keymap: dict,
                    cls, base):
    values = {}
    if cp.has_section(name):
        sec = cp[name]
        unknown = set(sec.keys()) - set(keymap)
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(f"{name}.{key}", "unknown key")
        values = {keymap[k]: _float(sec, k) for k in sec.keys()}
    if base is not None:
        return replace(base, **values)
    inverse = {v: k for k, v in keymap.items()}
    for f in fields(cls):
        if f.name not in values:
            raise ConfigError(f"{name}.{inverse[f.name]}", "missing (no preset set given)")
    return cls(**values)


def parse_config(text: str, needs=("photon_counter", "homodyne")) -> ScenarioConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("file", str(exc).splitlines()[0]) from None
    sc = cp["scenario"] if cp.has_section("scenario") else {}
    base = None
    if "set" in sc:
        try:
            base = get_preset(sc["set"])
        except ValueError as exc:
            raise ConfigError("scenario.set", str(exc)) from None

    dv = cv = None
    if "photon_counter" in needs or cp.has_section("photon_counter"):
        dv = _section_params(cp, "photon_counter", PHOTON_COUNTER_KEYS, PhotonCounterParams,
                             base.dv if base else None)
    if "homodyne" in needs or cp.has_section("homodyne"):
        cv = _section_params(cp, "homodyne", HOMODYNE_KEYS, HomodyneParams,
                             base.cv if base else None)
    alpha = base.alpha_db_per_km if base else 0.2
    if cp.has_section("fiber") and "alpha_db_per_km" in cp["fiber"]:
        alpha = _float(cp["fiber"], "alpha_db_per_km")
    params = ParameterSet(name=base.name if base else "custom",
                          dv=dv if dv is not None else (base.dv if base else None),
                          cv=cv if cv is not None else (base.cv if base else None),
                          alpha_db_per_km=alpha)

    kw = {}
    if "protocol" in sc:
        kw["protocols"] = tuple(p.strip() for p in sc["protocol"].split(",") if p.strip())
    for key in ("sweep", "scenario"):
        if key in sc:
            kw[key] = sc[key].strip()
    lo_key, hi_key = ("t_min", "t_max")
    if kw.get("sweep") == "distance":
        lo_key, hi_key = ("distance_min_km", "distance_max_km")
    if lo_key in sc:
        kw["x_min"] = _float(cp["scenario"], lo_key)
    if hi_key in sc:
        kw["x_max"] = _float(cp["scenario"], hi_key)
    if "grid" in sc:
        try:
            kw["grid"] = int(sc["grid"])
        except ValueError:
            raise ConfigError("scenario.grid", f"not an integer: {sc['grid']!r}") from None
    for key in ("out_csv", "out_svg"):
        if key in sc:
            kw[key] = sc[key].strip()
    return ScenarioConfig(params=params, **kw)


def load_config(path: str, needs=("photon_counter", "homodyne")) -> ScenarioConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("file", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, needs)
