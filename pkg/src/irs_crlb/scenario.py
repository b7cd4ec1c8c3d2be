"""Experiment geometry, constants and random channel/target generation."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

__all__ = [
    "Scenario",
    "ChannelRealization",
    "path_loss",
    "generate_channel",
    "ula_response",
    "dbm_to_watts",
    "watts_to_dbm",
    "db_to_linear",
    "load_scenario",
    "scenario_hash",
]


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    return 10.0 * math.log10(p_w) + 30.0


def db_to_linear(g_db: float) -> float:
    return 10.0 ** (g_db / 10.0)


@dataclass(frozen=True)
class Scenario:
    """Ground truth of one experiment.  Powers in watts, gains linear.

    Angles of the array broadsides are measured from the +x axis.  When
    ``irs_broadside`` is None the IRS faces the target, so the true DoA is 0.
    """

    num_ap_antennas: int = 8
    num_irs_elements: int = 8
    dwell_slots: int = 256
    power_budget: float = dbm_to_watts(30.0)
    noise_power: float = dbm_to_watts(-120.0)
    element_spacing_ratio: float = 0.5
    ap_position: tuple[float, float] = (0.0, 0.0)
    irs_position: tuple[float, float] = (5.0, 5.0)
    target_position: tuple[float, float] = (5.0, 0.0)
    rician_factor: float = 0.5
    pathloss_ref: float = db_to_linear(-30.0)
    ref_distance: float = 1.0
    pathloss_exponent: float = 2.5
    rcs: float = 1.0
    rng_seed: int = 0
    ap_broadside: float = math.pi / 2
    irs_broadside: float | None = None

    def __post_init__(self):
        if self.num_ap_antennas <= 1:
            raise ValueError("num_ap_antennas must be > 1")
        if self.num_irs_elements <= 1:
            raise ValueError("num_irs_elements must be > 1")
        if self.dwell_slots < 1:
            raise ValueError("dwell_slots must be >= 1")
        if not self.power_budget > 0:
            raise ValueError("power_budget must be > 0")
        if not self.noise_power > 0:
            raise ValueError("noise_power must be > 0")
        if not self.element_spacing_ratio > 0:
            raise ValueError("element_spacing_ratio must be > 0")
        if self.rician_factor < 0:
            raise ValueError("rician_factor must be >= 0")

    @property
    def M(self) -> int:
        return self.num_ap_antennas

    @property
    def N(self) -> int:
        return self.num_irs_elements

    def with_power(self, p_watts: float) -> "Scenario":
        return dataclasses.replace(self, power_budget=p_watts)

    def irs_broadside_angle(self) -> float:
        if self.irs_broadside is not None:
            return self.irs_broadside
        d = np.subtract(self.target_position, self.irs_position)
        return math.atan2(d[1], d[0])


@dataclass
class ChannelRealization:
    G: np.ndarray
    alpha: complex
    theta: float
    meta: dict = field(default_factory=dict)


def path_loss(d: float, scenario: Scenario) -> float:
    """Linear power gain ``K0 (d / d0)^(-alpha0)``."""
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d}")
    return scenario.pathloss_ref * (d / scenario.ref_distance) ** (-scenario.pathloss_exponent)


def ula_response(n: int, angle: float, spacing_ratio: float = 0.5) -> np.ndarray:
    return np.exp(2j * np.pi * spacing_ratio * np.arange(n) * np.sin(angle))


def _angle_from_broadside(origin, towards, broadside: float) -> float:
    d = np.subtract(towards, origin)
    normal = np.array([math.cos(broadside), math.sin(broadside)])
    axis = np.array([-normal[1], normal[0]])
    return math.atan2(float(d @ axis), float(d @ normal))


def generate_channel(scenario: Scenario, rng: np.random.Generator) -> ChannelRealization:
    """Draw a Rician AP-IRS channel and a target coefficient.

    ``rician_factor = inf`` gives the pure line-of-sight (rank-one) channel.
    """
    M, N = scenario.M, scenario.N
    d_ai = float(np.linalg.norm(np.subtract(scenario.irs_position, scenario.ap_position)))
    d_it = float(np.linalg.norm(np.subtract(scenario.target_position, scenario.irs_position)))
    irs_bs = scenario.irs_broadside_angle()

    aod = _angle_from_broadside(scenario.ap_position, scenario.irs_position, scenario.ap_broadside)
    aoa = _angle_from_broadside(scenario.irs_position, scenario.ap_position, irs_bs)
    g_los = np.outer(ula_response(N, aoa, scenario.element_spacing_ratio), ula_response(M, aod, 0.5))
    g_nlos = (rng.standard_normal((N, M)) + 1j * rng.standard_normal((N, M))) / np.sqrt(2)
    kappa = scenario.rician_factor
    if math.isinf(kappa):
        G = g_los
    else:
        G = math.sqrt(kappa / (1 + kappa)) * g_los + math.sqrt(1 / (1 + kappa)) * g_nlos
    G = math.sqrt(path_loss(d_ai, scenario)) * G

    amp = math.sqrt(scenario.rcs) * path_loss(d_it, scenario)
    alpha = amp * np.exp(1j * rng.uniform(0, 2 * np.pi))
    theta = _angle_from_broadside(scenario.irs_position, scenario.target_position, irs_bs)
    return ChannelRealization(G=G, alpha=complex(alpha), theta=theta, meta={"aod": aod, "aoa": aoa})


# config file ---------------------------------------------------------------

# file key -> (field, converter)
_CONFIG_KEYS = {
    "num_ap_antennas": ("num_ap_antennas", int),
    "num_irs_elements": ("num_irs_elements", int),
    "dwell_slots": ("dwell_slots", int),
    "power_budget_dbm": ("power_budget", dbm_to_watts),
    "noise_power_dbm": ("noise_power", dbm_to_watts),
    "element_spacing_ratio": ("element_spacing_ratio", float),
    "ap_position": ("ap_position", lambda v: tuple(float(x) for x in v)),
    "irs_position": ("irs_position", lambda v: tuple(float(x) for x in v)),
    "target_position": ("target_position", lambda v: tuple(float(x) for x in v)),
    "rician_factor": ("rician_factor", float),
    "pathloss_ref_db": ("pathloss_ref", db_to_linear),
    "ref_distance": ("ref_distance", float),
    "pathloss_exponent": ("pathloss_exponent", float),
    "rcs": ("rcs", float),
    "rng_seed": ("rng_seed", int),
    "ap_broadside_deg": ("ap_broadside", math.radians),
    "irs_broadside_deg": ("irs_broadside", lambda v: None if v is None else math.radians(v)),
}


def scenario_from_mapping(data: dict) -> Scenario:
    kwargs = {}
    for key, value in data.items():
        if key not in _CONFIG_KEYS:
            raise ValueError(f"unknown scenario key {key!r}")
        name, conv = _CONFIG_KEYS[key]
        try:
            kwargs[name] = conv(value)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"bad value for scenario key {key!r}: {value!r}") from exc
    return Scenario(**kwargs)


def load_scenario(path: str | Path) -> Scenario:
    """Read a flat ``key: value`` YAML scenario file (units in key suffixes)."""
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: scenario file must be a flat mapping")
    return scenario_from_mapping(data)


def scenario_hash(scenario: Scenario) -> str:
    payload = json.dumps(dataclasses.asdict(scenario), sort_keys=True, default=repr)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]
