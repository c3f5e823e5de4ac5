"""Closed-form transmit beamformer for a rank-1 sensing channel.

Maximises ``|h_st f|^2`` subject to ``P_t |h_c f|^2 / sigma_c^2 >= Gamma0`` and
``||f|| <= 1``.  The optimum lies in span{h_c^H, h_st^H}: write
``f = a u1 + b u2`` with ``u1 = h_c^H / ||h_c||`` and ``u2`` the unit part of
``h_st^H`` orthogonal to ``u1``.  Either the matched filter already meets the
constraint, or the constraint is tight at ``|a|^2 = rho_c``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Scenario
from .metrics import db

COLLINEAR_TOL = 1e-12


class BeamformerInfeasible(ValueError):
    def __init__(self, max_snr_c_dB: float, Gamma0_dB: float):
        super().__init__(
            f"communication threshold {Gamma0_dB:.2f} dB unreachable; "
            f"maximum achievable SNR_c is {max_snr_c_dB:.2f} dB"
        )
        self.max_snr_c_dB = max_snr_c_dB
        self.Gamma0_dB = Gamma0_dB


@dataclass(frozen=True)
class BfSolution:
    f: np.ndarray
    snr_s_dB: float
    snr_c_dB: float
    constraint_active: bool


def solve_beamformer(h_st, h_sr_norm2: float, h_c, scenario: Scenario, Gamma0_dB: float | None = None) -> BfSolution:
    """``Gamma0_dB`` defaults to the scenario threshold; pass ``-inf`` to drop it."""
    h_st = np.asarray(h_st, dtype=complex)
    h_c = np.asarray(h_c, dtype=complex)
    n_c, n_st = np.linalg.norm(h_c), np.linalg.norm(h_st)
    if n_c == 0.0 or n_st == 0.0:
        raise ValueError("channels must be nonzero")
    g0_dB = scenario.Gamma0_dB if Gamma0_dB is None else Gamma0_dB
    g0 = 10.0 ** (g0_dB / 10.0)
    P, sc2, ss2 = scenario.P_t, scenario.sigma_c2, scenario.sigma_s2

    def pack(f, active):
        snr_s = P * h_sr_norm2 * abs(h_st @ f) ** 2 / ss2
        snr_c = P * abs(h_c @ f) ** 2 / sc2
        return BfSolution(f, float(db(snr_s)), float(db(snr_c)), active)

    rho_c = g0 * sc2 / (P * n_c**2)
    if rho_c > 1.0:
        raise BeamformerInfeasible(float(db(P * n_c**2 / sc2)), g0_dB)

    f_mf = h_st.conj() / n_st
    if P * abs(h_c @ f_mf) ** 2 / sc2 >= g0:
        return pack(f_mf, False)

    u1 = h_c.conj() / n_c
    r = h_st.conj() - np.vdot(u1, h_st.conj()) * u1
    n_r = np.linalg.norm(r)
    c1 = h_st @ u1
    if n_r <= COLLINEAR_TOL * n_st:
        # matched filter is u1 up to phase and rho_c <= 1, so it met the threshold
        return pack(np.exp(-1j * np.angle(c1)) * u1, True)
    u2 = r / n_r
    c2 = h_st @ u2
    f = np.sqrt(rho_c) * np.exp(-1j * np.angle(c1)) * u1 + np.sqrt(1.0 - rho_c) * np.exp(-1j * np.angle(c2)) * u2
    return pack(f, True)
