"""Scenario configuration and its INI file form.

The file holds one section per module; every key maps onto a field of
:class:`ScenarioConfig`.  Unknown sections or keys are rejected::

    [array]
    n_antennas = 128
    carrier_freq = 28e9

    [scenario]
    n_users = 16
    cell_radius = 100

    [campaign]
    trials = 200
    master_seed = 2024
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
import json
from dataclasses import dataclass, fields
from pathlib import Path

from .beamforming import Scheme
from .power import FgConfig
from .scheduling import FAR_POLICIES, NEAR_POLICIES, Policy


class ConfigError(ValueError):
    pass


SECTIONS: dict[str, tuple[str, ...]] = {
    "array": ("n_antennas", "carrier_freq", "element_spacing"),
    "scenario": (
        "n_users", "cell_radius", "min_distance", "d0", "path_loss_exp",
        "noise_power", "static_prob",
    ),
    "beamforming": ("scheme", "epsilon", "near_norm"),
    "clustering": ("clustering_on", "cluster_k", "dbscan_eps", "dbscan_min_pts"),
    "power": (
        "total_power", "allocator", "near_budget_fraction", "fg_step_weight",
        "fg_max_iters", "fg_tol", "oracle_grid_steps",
    ),
    "scheduling": ("policy_near", "policy_far", "leakage", "interference_form"),
    "metrics": ("connectivity_threshold_db",),
    "campaign": ("trials", "master_seed"),
}

ALLOCATORS = ("fg", "equal", "oracle")


@dataclass(frozen=True)
class ScenarioConfig:
    n_antennas: int = 128
    carrier_freq: float = 28e9
    element_spacing: float | None = None
    n_users: int = 16
    cell_radius: float = 100.0
    min_distance: float = 1.0
    d0: float = 20.0
    path_loss_exp: float = 2.7
    noise_power: float = 1e-9
    static_prob: float = 0.3
    scheme: str = "cognitive"
    epsilon: float = 0.95
    near_norm: str | None = None
    clustering_on: bool = True
    cluster_k: int | None = None
    dbscan_eps: float = 0.5
    dbscan_min_pts: int = 2
    total_power: float = 20.0
    allocator: str = "fg"
    near_budget_fraction: float | None = None
    fg_step_weight: float = 0.3
    fg_max_iters: int = 200
    fg_tol: float = 1e-6
    oracle_grid_steps: int = 20
    policy_near: str = "all"
    policy_far: str = "all"
    leakage: float = 0.2
    interference_form: str = "literal"
    connectivity_threshold_db: float = 0.0
    trials: int = 200
    master_seed: int = 2024

    def __post_init__(self):
        try:
            self.validate()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self) -> None:
        positive = ("n_antennas", "carrier_freq", "n_users", "cell_radius", "min_distance", "d0",
                    "path_loss_exp", "noise_power", "total_power", "dbscan_eps", "trials",
                    "fg_max_iters", "fg_tol", "oracle_grid_steps", "dbscan_min_pts")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)!r}")
        for name in ("n_antennas", "n_users", "trials", "fg_max_iters", "dbscan_min_pts",
                     "oracle_grid_steps", "master_seed"):
            if int(getattr(self, name)) != getattr(self, name):
                raise ConfigError(f"{name} must be an integer, got {getattr(self, name)!r}")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be >= 0")
        if self.element_spacing is not None and not self.element_spacing > 0:
            raise ConfigError("element_spacing must be > 0")
        if not self.min_distance < self.cell_radius:
            raise ConfigError("min_distance must be < cell_radius")
        if not 0 <= self.static_prob <= 1:
            raise ConfigError("static_prob must lie in [0, 1]")
        if not 0 < self.epsilon <= 1:
            raise ConfigError("epsilon must lie in (0, 1]")
        if not 0 <= self.leakage <= 1:
            raise ConfigError("leakage must lie in [0, 1]")
        if self.near_budget_fraction is not None and not 0 <= self.near_budget_fraction <= 1:
            raise ConfigError("near_budget_fraction must lie in [0, 1]")
        if self.cluster_k is not None and not self.cluster_k >= 1:
            raise ConfigError("cluster_k must be >= 1")
        if self.scheme not in {s.value for s in Scheme}:
            raise ConfigError(f"scheme must be one of {[s.value for s in Scheme]}")
        if self.near_norm not in (None, "unit", "squared"):
            raise ConfigError("near_norm must be 'unit' or 'squared'")
        if self.allocator not in ALLOCATORS:
            raise ConfigError(f"allocator must be one of {ALLOCATORS}")
        if self.interference_form not in ("literal", "conventional"):
            raise ConfigError("interference_form must be 'literal' or 'conventional'")
        self.near_policies()
        self.far_policies()
        FgConfig(self.fg_step_weight, self.fg_max_iters, self.fg_tol)

    @property
    def fg(self) -> FgConfig:
        return FgConfig(self.fg_step_weight, self.fg_max_iters, self.fg_tol)

    @property
    def scheme_enum(self) -> Scheme:
        return Scheme(self.scheme)

    def near_policies(self) -> tuple[Policy, ...]:
        return _parse_policies(self.policy_near, NEAR_POLICIES, "policy_near")

    def far_policies(self) -> tuple[Policy, ...]:
        return _parse_policies(self.policy_far, FAR_POLICIES, "policy_far")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def canonical(self) -> dict:
        return dataclasses.asdict(self)

    def fingerprint(self) -> str:
        """Stable short hash of the canonical config."""
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _parse_policies(text: str, allowed: tuple[Policy, ...], key: str) -> tuple[Policy, ...]:
    if text == "all":
        return allowed
    names = [t.strip() for t in text.split(",") if t.strip()]
    out = []
    for name in names:
        try:
            pol = Policy(name)
        except ValueError:
            pol = None
        if pol not in allowed:
            raise ConfigError(f"{key}: {name!r} is not one of {[p.value for p in allowed]}")
        out.append(pol)
    if not out:
        raise ConfigError(f"{key} is empty")
    return tuple(out)


_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def coerce(key: str, raw) -> object:
    """Convert a raw (usually string) value to the type of field ``key``."""
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown key {key!r}")
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    kind = _FIELD_TYPES[key]
    optional = "None" in kind
    if optional and text.lower() in ("", "none", "auto"):
        return None
    try:
        if kind.startswith("bool"):
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind.startswith("int"):
            return int(text)
        if kind.startswith("float"):
            return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind}") from None
    return text


def parse_overrides(items) -> dict:
    """``["key=value", ...]`` -> typed dict."""
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        out[key] = coerce(key, value)
    return out


def load_config(path: str | Path, **overrides) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None

    values: dict = {}
    unknown = []
    for section in parser.sections():
        if section not in SECTIONS:
            unknown.append(f"[{section}]")
            continue
        for key, raw in parser.items(section):
            if key not in SECTIONS[section]:
                unknown.append(f"{section}.{key}")
                continue
            values[key] = coerce(key, raw)
    if parser.defaults():
        unknown.extend(f"DEFAULT.{k}" for k in parser.defaults())
    if unknown:
        raise ConfigError("unknown config keys: " + ", ".join(unknown))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ScenarioConfig(**values)


def dump_config(cfg: ScenarioConfig) -> str:
    """INI text that loads back to ``cfg``."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    data = cfg.canonical()
    for section, keys in SECTIONS.items():
        parser[section] = {k: _format_value(data[k]) for k in keys}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def _format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    return str(value)
