"""Scenario JSON files.

Layout (every section and key optional; unknown keys are rejected)::

    {
      "geometry": {"p_B": [0, 0, 0], "p_U": [280, 0, 0], "p_T": [0, 20, 0], "H_m": 150,
                   "regions": {"R1": {"x_m": [50, 100], "y_m": [50, 100]},
                               "R2": {"x_m": [0, 100], "y_m": [0, 100]}},
                   "fixed_pose": {"xy_m": [75, 75], "gamma_rad": [0, 0, 0]}},
      "rf": {"f_c_hz": 3.6e9, "beta0": 1e-3, "eta_sensing": 2.2, "eta_comm": 3.0,
             "d_spacing_over_lambda": 0.5},
      "arrays": {"N_t": 32, "N_r": 32, "N_x": 4, "N_y": 4},
      "power": {"P_t_w": 1.0, "sigma_c2_w": 1e-11, "sigma_s2_w": 1e-11, "Gamma0_dB": 10},
      "pso": {"M": 50, "T_max": 200, "c1": 1.6, "c2": 2.0, "omega_ini": 0.9, "omega_end": 0.1,
              "tau_mode": "auto", "v_clamp_frac": 0.2, "scalar_random": true,
              "patience": 30, "tol_rel": 1e-4},
      "pbf": {"restarts": 4, "tol": 1e-6, "max_iters": 500},
      "ao": {"rounds": 10, "tol": 1e-3}
    }

``tau_mode`` is ``"auto"`` or a positive number used as the penalty weight.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .channel import Scenario
from .geometry import Region
from .manifold import PbfOptions
from .pso import SwarmConfig


class ConfigError(ValueError):
    pass


@dataclass
class AoOptions:
    rounds: int = 10
    tol: float = 1e-3


@dataclass
class SolverConfig:
    pso: SwarmConfig = field(default_factory=SwarmConfig)
    pbf: PbfOptions = field(default_factory=PbfOptions)
    ao: AoOptions = field(default_factory=AoOptions)


_SECTIONS = {
    "geometry": {"p_B", "p_U", "p_T", "H_m", "regions", "fixed_pose"},
    "rf": {"f_c_hz", "beta0", "eta_sensing", "eta_comm", "d_spacing_over_lambda"},
    "arrays": {"N_t", "N_r", "N_x", "N_y"},
    "power": {"P_t_w", "sigma_c2_w", "sigma_s2_w", "Gamma0_dB"},
    "pso": {"M", "T_max", "c1", "c2", "omega_ini", "omega_end", "tau_mode", "v_clamp_frac",
            "scalar_random", "patience", "tol_rel"},
    "pbf": {"restarts", "tol", "max_iters"},
    "ao": {"rounds", "tol"},
}


def _check_keys(where, obj, allowed):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {sorted(unknown)}")


def _vec3(where, x):
    if not (isinstance(x, list) and len(x) == 3):
        raise ConfigError(f"{where}: expected a list of 3 numbers")
    return tuple(float(c) for c in x)


def _pair(where, x):
    if not (isinstance(x, list) and len(x) == 2):
        raise ConfigError(f"{where}: expected [min, max]")
    return float(x[0]), float(x[1])


def parse_config(doc: dict):
    """Build ``(Scenario, SolverConfig)`` from a decoded JSON document."""
    _check_keys("<root>", doc, _SECTIONS)
    for name, keys in _SECTIONS.items():
        _check_keys(name, doc.get(name, {}), keys)

    geo, rf, arr, pw = (doc.get(k, {}) for k in ("geometry", "rf", "arrays", "power"))
    kw = {}
    for key in ("p_B", "p_U", "p_T"):
        if key in geo:
            kw[key] = _vec3(f"geometry.{key}", geo[key])
    H = float(geo.get("H_m", Scenario.H))
    kw["H"] = H
    if "regions" in geo:
        regions = {}
        _check_keys("geometry.regions", geo["regions"], geo["regions"].keys())
        for name, reg in geo["regions"].items():
            _check_keys(f"geometry.regions.{name}", reg, {"x_m", "y_m"})
            x = _pair(f"geometry.regions.{name}.x_m", reg["x_m"])
            y = _pair(f"geometry.regions.{name}.y_m", reg["y_m"])
            regions[name] = Region(x[0], x[1], y[0], y[1], H)
        kw["regions"] = regions
    else:
        kw["regions"] = {k: Region(r.x_min, r.x_max, r.y_min, r.y_max, H) for k, r in Scenario().regions.items()}
    if "fixed_pose" in geo:
        fp = geo["fixed_pose"]
        _check_keys("geometry.fixed_pose", fp, {"xy_m", "gamma_rad"})
        if "xy_m" in fp:
            kw["fixed_xy"] = _pair("geometry.fixed_pose.xy_m", fp["xy_m"])
        if "gamma_rad" in fp:
            kw["fixed_gamma"] = _vec3("geometry.fixed_pose.gamma_rad", fp["gamma_rad"])

    rename = {
        "f_c_hz": "f_c", "beta0": "beta0", "eta_sensing": "eta_sensing", "eta_comm": "eta_comm",
        "d_spacing_over_lambda": "d_over_lambda", "P_t_w": "P_t", "sigma_c2_w": "sigma_c2",
        "sigma_s2_w": "sigma_s2", "Gamma0_dB": "Gamma0_dB",
    }
    for section in (rf, pw):
        for key, val in section.items():
            kw[rename[key]] = float(val)
    for key, val in arr.items():
        kw[key] = int(val)

    try:
        scenario = Scenario(**kw)
        pso_doc = dict(doc.get("pso", {}))
        tau_mode = pso_doc.pop("tau_mode", "auto")
        if tau_mode == "auto":
            tau = None
        elif isinstance(tau_mode, (int, float)) and not isinstance(tau_mode, bool):
            tau = float(tau_mode)
        else:
            raise ConfigError(f"pso.tau_mode: expected 'auto' or a number, got {tau_mode!r}")
        solver = SolverConfig(
            pso=SwarmConfig(tau=tau, **pso_doc),
            pbf=PbfOptions(**doc.get("pbf", {})),
            ao=AoOptions(**doc.get("ao", {})),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return scenario, solver


def load_config(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        return parse_config(doc)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def dump_config(scenario: Scenario, solver: SolverConfig | None = None) -> dict:
    solver = solver or SolverConfig()
    s, p = scenario, solver.pso
    return {
        "geometry": {
            "p_B": list(s.p_B), "p_U": list(s.p_U), "p_T": list(s.p_T), "H_m": s.H,
            "regions": {k: {"x_m": [r.x_min, r.x_max], "y_m": [r.y_min, r.y_max]} for k, r in s.regions.items()},
            "fixed_pose": {"xy_m": list(s.fixed_xy), "gamma_rad": list(s.fixed_gamma)},
        },
        "rf": {"f_c_hz": s.f_c, "beta0": s.beta0, "eta_sensing": s.eta_sensing,
               "eta_comm": s.eta_comm, "d_spacing_over_lambda": s.d_over_lambda},
        "arrays": {"N_t": s.N_t, "N_r": s.N_r, "N_x": s.N_x, "N_y": s.N_y},
        "power": {"P_t_w": s.P_t, "sigma_c2_w": s.sigma_c2, "sigma_s2_w": s.sigma_s2, "Gamma0_dB": s.Gamma0_dB},
        "pso": {"M": p.M, "T_max": p.T_max, "c1": p.c1, "c2": p.c2, "omega_ini": p.omega_ini,
                "omega_end": p.omega_end, "tau_mode": "auto" if p.tau is None else p.tau,
                "v_clamp_frac": p.v_clamp_frac, "scalar_random": p.scalar_random,
                "patience": p.patience, "tol_rel": p.tol_rel},
        "pbf": {"restarts": solver.pbf.restarts, "tol": solver.pbf.tol, "max_iters": solver.pbf.max_iters},
        "ao": {"rounds": solver.ao.rounds, "tol": solver.ao.tol},
    }
