"""Line-of-sight channel synthesis for the BS / UE / target / IRS geometry.

Row channels (``h_BU``, ``h_RU``, ``h_BT``, ``h_RT``, ``h_c``, ``h_st``) are
stored as 1-D numpy arrays and multiply beamformers directly (``h @ f``).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .geometry import (
    CoincidentNodesError,
    Pose6D,
    Region,
    incidence_angle,
    rotation_matrices,
    upa_angles,
)

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class Scenario:
    """Node positions, RF constants, array sizes and noise/power levels."""

    p_B: tuple = (0.0, 0.0, 0.0)
    p_U: tuple = (280.0, 0.0, 0.0)
    p_T: tuple = (0.0, 20.0, 0.0)
    H: float = 150.0
    regions: dict = field(
        default_factory=lambda: {
            "R1": Region(50.0, 100.0, 50.0, 100.0, 150.0),
            "R2": Region(0.0, 100.0, 0.0, 100.0, 150.0),
        }
    )
    fixed_xy: tuple = (75.0, 75.0)
    fixed_gamma: tuple = (0.0, 0.0, 0.0)
    N_t: int = 32
    N_r: int = 32
    N_x: int = 4
    N_y: int = 4
    f_c: float = 3.6e9
    beta0: float = 1e-3
    eta_sensing: float = 2.2
    eta_comm: float = 3.0
    d_over_lambda: float = 0.5
    P_t: float = 1.0
    sigma_c2: float = 1e-11
    sigma_s2: float = 1e-11
    Gamma0_dB: float = 10.0

    def __post_init__(self):
        for name in ("N_t", "N_r", "N_x", "N_y"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.f_c <= 0 or self.beta0 <= 0:
            raise ValueError("f_c and beta0 must be positive")
        if min(self.eta_sensing, self.eta_comm) < 2:
            raise ValueError("path-loss exponents must be >= 2")
        if min(self.P_t, self.sigma_c2, self.sigma_s2) <= 0:
            raise ValueError("powers must be positive")
        for name, reg in self.regions.items():
            if reg.H != self.H:
                raise ValueError(f"region {name} altitude {reg.H} != H {self.H}")

    @cached_property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c

    @property
    def N(self) -> int:
        return self.N_x * self.N_y

    @property
    def d_spacing(self) -> float:
        return self.d_over_lambda * self.wavelength

    @property
    def Gamma0_lin(self) -> float:
        return 10.0 ** (self.Gamma0_dB / 10.0)

    @property
    def fixed_pose(self) -> Pose6D:
        return Pose6D([self.fixed_xy[0], self.fixed_xy[1], self.H], self.fixed_gamma)

    def node(self, name: str) -> np.ndarray:
        return np.asarray({"B": self.p_B, "U": self.p_U, "T": self.p_T}[name], dtype=float)

    def eta(self, a: str, b: str) -> float:
        """Exponent of link a<->b: UE links are communication, the rest sensing."""
        return self.eta_comm if "U" in (a, b) else self.eta_sensing

    def replace(self, **changes) -> "Scenario":
        return replace(self, **changes)


@dataclass(frozen=True)
class ChannelSet:
    h_BU: np.ndarray
    H_BR: np.ndarray
    h_RU: np.ndarray
    h_BT: np.ndarray
    h_RT: np.ndarray
    hbar_TB: np.ndarray
    hbar_TR: np.ndarray
    Hbar_RB: np.ndarray
    F_cu: float
    F_st: float
    F_sr: float
    alpha: dict


def path_gain(p_I, p_J, eta: float, scenario: Scenario) -> complex:
    d = float(np.linalg.norm(np.asarray(p_J, dtype=float) - np.asarray(p_I, dtype=float)))
    if d == 0.0:
        raise CoincidentNodesError(f"coincident nodes at {p_I}")
    return np.sqrt(scenario.beta0 * d ** (-eta)) * np.exp(-2j * np.pi * d / scenario.wavelength)


def ula_steering(cos_angle: float, n: int, scenario: Scenario) -> np.ndarray:
    if abs(cos_angle) > 1.0 + 1e-12:
        raise ValueError(f"|cos_angle| > 1: {cos_angle}")
    k = np.arange(n)
    return np.exp(2j * np.pi * scenario.d_over_lambda * k * cos_angle)


def upa_steering(theta_e: float, theta_a: float, N_x: int, N_y: int, scenario: Scenario) -> np.ndarray:
    """x-factor (phase ~ sin e cos a) kron y-factor (phase ~ sin e sin a)."""
    kd = 2 * np.pi * scenario.d_over_lambda
    ax = np.exp(1j * kd * np.arange(N_x) * np.sin(theta_e) * np.cos(theta_a))
    ay = np.exp(1j * kd * np.arange(N_y) * np.sin(theta_e) * np.sin(theta_a))
    return np.kron(ax, ay)


def aperture_gain(theta_in_e: float, theta_ref_e: float) -> float:
    """Cosine aperture factor; angles are measured from the outward normal.

    Angles beyond pi/2 (node behind the face) contribute zero.
    """
    c_in = np.cos(theta_in_e) if theta_in_e < np.pi / 2 else 0.0
    c_ref = np.cos(theta_ref_e) if theta_ref_e < np.pi / 2 else 0.0
    return float(max(c_in, 0.0) * max(c_ref, 0.0))


def _bs_cos(p_from, p_to) -> float:
    diff = np.asarray(p_to, dtype=float) - np.asarray(p_from, dtype=float)
    return float(diff[2] / np.linalg.norm(diff))


def build_channels(scenario: Scenario, pose: Pose6D) -> ChannelSet:
    s = scenario
    pB, pU, pT, pR = s.node("B"), s.node("U"), s.node("T"), pose.p_R
    Nx, Ny = s.N_x, s.N_y

    alpha = {
        "BU": path_gain(pB, pU, s.eta("B", "U"), s),
        "BT": path_gain(pB, pT, s.eta("B", "T"), s),
        "TB": path_gain(pT, pB, s.eta("T", "B"), s),
        "BR": path_gain(pB, pR, s.eta("B", "R"), s),
        "RB": path_gain(pR, pB, s.eta("R", "B"), s),
        "RU": path_gain(pR, pU, s.eta("R", "U"), s),
        "RT": path_gain(pR, pT, s.eta("R", "T"), s),
        "TR": path_gain(pT, pR, s.eta("T", "R"), s),
    }

    a_BU = ula_steering(_bs_cos(pB, pU), s.N_t, s)
    a_BT = ula_steering(_bs_cos(pB, pT), s.N_t, s)
    a_BR = ula_steering(_bs_cos(pB, pR), s.N_t, s)
    abar_TB = ula_steering(_bs_cos(pT, pB), s.N_r, s)
    abar_RB = ula_steering(_bs_cos(pR, pB), s.N_r, s)

    at_BR = upa_steering(*upa_angles(pose, pB, pR), Nx, Ny, s)
    at_RU = upa_steering(*upa_angles(pose, pR, pU), Nx, Ny, s)
    at_RT = upa_steering(*upa_angles(pose, pR, pT), Nx, Ny, s)
    at_TR = upa_steering(*upa_angles(pose, pT, pR), Nx, Ny, s)
    at_RB = upa_steering(*upa_angles(pose, pR, pB), Nx, Ny, s)

    th_B = incidence_angle(pose, pB)
    th_U = incidence_angle(pose, pU)
    th_T = incidence_angle(pose, pT)

    return ChannelSet(
        h_BU=alpha["BU"] * a_BU,
        H_BR=alpha["BR"] * np.outer(at_BR, a_BR),
        h_RU=alpha["RU"] * at_RU,
        h_BT=alpha["BT"] * a_BT,
        h_RT=alpha["RT"] * at_RT,
        hbar_TB=alpha["TB"] * abar_TB,
        hbar_TR=alpha["TR"] * at_TR,
        Hbar_RB=alpha["RB"] * np.outer(abar_RB, at_RB),
        F_cu=aperture_gain(th_B, th_U),
        F_st=aperture_gain(th_B, th_T),
        F_sr=aperture_gain(th_B, th_T),
        alpha=alpha,
    )


def comm_channel(cs: ChannelSet, v) -> np.ndarray:
    v = np.asarray(v)
    return cs.h_BU + np.sqrt(cs.F_cu) * (cs.h_RU * v) @ cs.H_BR


def sensing_channels(cs: ChannelSet, v):
    """Return ``(h_st, h_sr, H_s)`` with ``H_s = outer(h_sr, h_st)``."""
    v = np.asarray(v)
    h_st = cs.h_BT + np.sqrt(cs.F_st) * (cs.h_RT * v) @ cs.H_BR
    h_sr = cs.hbar_TB + np.sqrt(cs.F_sr) * cs.Hbar_RB @ (v * cs.hbar_TR)
    return h_st, h_sr, np.outer(h_sr, h_st)


# -- vectorised evaluation over many poses (the PSO hot path) -----------------


def _gain(d, eta, s: Scenario):
    return np.sqrt(s.beta0 * d ** (-eta)) * np.exp(-2j * np.pi * d / s.wavelength)


class PoseBatchEvaluator:
    """Evaluates ``(h_c, h_st, h_sr)`` for many poses at a fixed phase vector.

    Uses the rank-1 structure of the BS-IRS links so each pose costs O(N + N_t)
    instead of forming the ``N x N_t`` matrices.
    """

    def __init__(self, scenario: Scenario):
        s = scenario
        self.s = s
        self.pB, self.pU, self.pT = s.node("B"), s.node("U"), s.node("T")
        kx, ky = np.meshgrid(np.arange(s.N_x), np.arange(s.N_y), indexing="ij")
        self.kx, self.ky = kx.ravel().astype(float), ky.ravel().astype(float)
        self.kd = 2 * np.pi * s.d_over_lambda
        self.t = np.arange(s.N_t)
        self.r = np.arange(s.N_r)
        self.h_BU = path_gain(self.pB, self.pU, s.eta("B", "U"), s) * ula_steering(_bs_cos(self.pB, self.pU), s.N_t, s)
        self.h_BT = path_gain(self.pB, self.pT, s.eta("B", "T"), s) * ula_steering(_bs_cos(self.pB, self.pT), s.N_t, s)
        self.hbar_TB = path_gain(self.pT, self.pB, s.eta("T", "B"), s) * ula_steering(_bs_cos(self.pT, self.pB), s.N_r, s)

    def _irs(self, u):
        return np.exp(1j * self.kd * (u[:, 0:1] * self.kx + u[:, 1:2] * self.ky))

    def evaluate(self, poses, v):
        """Return ``h_c (M, N_t)``, ``h_st (M, N_t)``, ``h_sr (M, N_r)``, ``violation (M, 3)``.

        ``violation`` columns follow the node order B, U, T.
        """
        s = self.s
        poses = np.atleast_2d(np.asarray(poses, dtype=float))
        v = np.asarray(v)
        pR = poses[:, :3]
        Q = rotation_matrices(poses[:, 3:])
        normal = -Q[:, :, 2]

        loc, dist, viol, cos_in = {}, {}, [], {}
        for name, p in (("B", self.pB), ("U", self.pU), ("T", self.pT)):
            diff = p - pR
            d = np.linalg.norm(diff, axis=1)
            if np.any(d == 0.0):
                raise CoincidentNodesError(f"IRS coincides with node {name}")
            lp = np.einsum("mji,mj->mi", Q, diff) / d[:, None]
            loc[name], dist[name] = lp, d
            cos_in[name] = np.maximum(0.0, -lp[:, 2])
            viol.append(np.maximum(0.0, -np.einsum("mi,mi->m", normal, diff) / d))

        dB, dU, dT = dist["B"], dist["U"], dist["T"]
        a_BR = np.exp(1j * self.kd * np.outer((pR[:, 2] - self.pB[2]) / dB, self.t))
        abar_RB = np.exp(1j * self.kd * np.outer((self.pB[2] - pR[:, 2]) / dB, self.r))
        at_BR = self._irs(-loc["B"])
        at_RB = self._irs(loc["B"])
        at_RU = self._irs(loc["U"])
        at_RT = self._irs(loc["T"])
        at_TR = self._irs(-loc["T"])

        g_BR = _gain(dB, s.eta("B", "R"), s)
        g_RB = _gain(dB, s.eta("R", "B"), s)
        g_RU = _gain(dU, s.eta("R", "U"), s)
        g_RT = _gain(dT, s.eta("R", "T"), s)
        g_TR = _gain(dT, s.eta("T", "R"), s)

        F_cu = cos_in["B"] * cos_in["U"]
        F_s = cos_in["B"] * cos_in["T"]

        c_u = np.sqrt(F_cu) * g_RU * g_BR * ((at_RU * at_BR) @ v)
        c_t = np.sqrt(F_s) * g_RT * g_BR * ((at_RT * at_BR) @ v)
        c_r = np.sqrt(F_s) * g_RB * g_TR * ((at_RB * at_TR) @ v)

        h_c = self.h_BU + c_u[:, None] * a_BR
        h_st = self.h_BT + c_t[:, None] * a_BR
        h_sr = self.hbar_TB + c_r[:, None] * abar_RB
        return h_c, h_st, h_sr, np.stack(viol, axis=1)
