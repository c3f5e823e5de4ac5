"""SNRs, S&C correlation, the stage-1 fitness and its penalised form."""
from __future__ import annotations

import numpy as np

from .channel import ChannelSet, Scenario, build_channels, comm_channel, sensing_channels
from .geometry import Pose6D, halfspace_violation

UNIT_MODULUS_TOL = 1e-9


def as_phase_vector(v, n=None) -> np.ndarray:
    """Validate IRS reflection coefficients (unit modulus, optional length)."""
    v = np.asarray(v, dtype=complex).ravel()
    if n is not None and v.size != n:
        raise ValueError(f"phase vector has {v.size} entries, expected {n}")
    if np.any(np.abs(np.abs(v) - 1.0) > UNIT_MODULUS_TOL):
        raise ValueError("phase vector entries must have unit modulus")
    return v


def as_beamformer(f) -> np.ndarray:
    f = np.asarray(f, dtype=complex).ravel()
    if np.linalg.norm(f) > 1.0 + 1e-9:
        raise ValueError("beamformer norm exceeds 1")
    return f


def db(x):
    return 10.0 * np.log10(x)


def snr_c(cs: ChannelSet, v, f, scenario: Scenario) -> float:
    h_c = comm_channel(cs, v)
    return float(scenario.P_t * abs(h_c @ f) ** 2 / scenario.sigma_c2)


def snr_s(cs: ChannelSet, v, f, scenario: Scenario) -> float:
    h_st, h_sr, _ = sensing_channels(cs, v)
    return float(scenario.P_t * np.vdot(h_sr, h_sr).real * abs(h_st @ f) ** 2 / scenario.sigma_s2)


def rho_from(h_st, h_c) -> float:
    n_st, n_c = np.linalg.norm(h_st), np.linalg.norm(h_c)
    if n_st == 0.0 or n_c == 0.0:
        raise ValueError("correlation undefined for a zero channel")
    return float(min(abs(np.vdot(h_c, h_st)) / (n_st * n_c), 1.0))


def correlation_rho(cs: ChannelSet, v) -> float:
    h_st, _, _ = sensing_channels(cs, v)
    return rho_from(h_st, comm_channel(cs, v))


def fitness_from(h_st, h_sr, h_c):
    """``-||h_sr||^2 |h_st h_c^H|^2``; broadcasts over leading axes."""
    hs2 = np.sum(np.abs(h_sr) ** 2, axis=-1)
    inner = np.sum(h_st * np.conj(h_c), axis=-1)
    return -hs2 * np.abs(inner) ** 2


def fitness_F(cs: ChannelSet, v) -> float:
    h_st, h_sr, _ = sensing_channels(cs, v)
    return float(fitness_from(h_st, h_sr, comm_channel(cs, v)))


def direct_fitness(cs: ChannelSet) -> float:
    """Fitness with the IRS path removed; pose independent."""
    return float(fitness_from(cs.h_BT, cs.hbar_TB, cs.h_BU))


def penalty_term(pose: Pose6D, scenario: Scenario, tau: float) -> float:
    nodes = [scenario.node(x) for x in "BUT"]
    return float(tau * np.sum(halfspace_violation(pose, nodes) ** 2))


def penalty_L(pose: Pose6D, scenario: Scenario, tau: float, v) -> float:
    """Fitness plus ``tau * sum_X max(0, -n . u_X)^2`` over X in {B, U, T}."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    return fitness_F(build_channels(scenario, pose), v) + penalty_term(pose, scenario, tau)
