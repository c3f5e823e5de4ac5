"""Particle swarm search over the IRS pose with a fixed phase vector.

Positions are 6-vectors ``[x, y, z, gamma_x, gamma_y, gamma_z]``.  The altitude
is pinned, x/y are clamped to the movable region and angles wrap modulo 2*pi.
Fitness is the stage-1 objective plus a quadratic half-space penalty.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .channel import PoseBatchEvaluator, Scenario
from .geometry import TWO_PI, Pose6D, Region, wrap_angles
from .metrics import fitness_from

log = logging.getLogger(__name__)


class InfeasiblePoseError(RuntimeError):
    """No pose satisfying the half-space constraint was found."""

    def __init__(self, pose: Pose6D, violation: float):
        super().__init__(
            f"no feasible pose found; best infeasible pose p_R={pose.p_R.tolist()} "
            f"gamma={pose.gamma.tolist()} with total violation {violation:.3e}"
        )
        self.pose = pose
        self.violation = violation


@dataclass
class SwarmConfig:
    M: int = 50
    T_max: int = 200
    c1: float = 1.6
    c2: float = 2.0
    omega_ini: float = 0.9
    omega_end: float = 0.1
    tau: float | None = None  # None: 10 x |best initial fitness|
    v_clamp_frac: float = 0.2
    scalar_random: bool = True
    patience: int = 30
    tol_rel: float = 1e-4

    def __post_init__(self):
        if self.M < 2 or self.T_max < 1:
            raise ValueError("need M >= 2 and T_max >= 1")
        if not 0 <= self.omega_end <= self.omega_ini:
            raise ValueError("need 0 <= omega_end <= omega_ini")
        if self.tau is not None and self.tau <= 0:
            raise ValueError("tau must be positive")


@dataclass
class Particle:
    g: Pose6D
    mu: np.ndarray
    pbest: Pose6D
    pbest_value: float


@dataclass
class Swarm:
    config: SwarmConfig
    v_fixed: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    vmax: np.ndarray
    tau: float
    positions: np.ndarray
    velocities: np.ndarray
    pbest: np.ndarray
    pbest_value: np.ndarray
    gbest: np.ndarray
    gbest_value: float
    gbest_feasible: bool
    reference: float  # fitness without the IRS path, scale for stopping rules
    evaluator: PoseBatchEvaluator = field(repr=False)
    feasible_best: np.ndarray | None = None
    feasible_best_value: float = np.inf
    t: int = 0
    trace: list = field(default_factory=list)

    def particle(self, m: int) -> Particle:
        return Particle(
            Pose6D.from_vector(self.positions[m]),
            self.velocities[m].copy(),
            Pose6D.from_vector(self.pbest[m]),
            float(self.pbest_value[m]),
        )


@dataclass
class PsoResult:
    pose: Pose6D
    fitness: float
    trace: list
    tau: float
    iterations: int


def search_box(region: Region):
    lo = np.array([region.x_min, region.y_min, region.H, 0.0, 0.0, 0.0])
    hi = np.array([region.x_max, region.y_max, region.H, TWO_PI, TWO_PI, TWO_PI])
    return lo, hi


def project(positions, lo, hi):
    """Clamp location to the box (altitude pinned) and wrap angles."""
    out = np.array(positions, dtype=float, copy=True)
    out[..., :3] = np.clip(out[..., :3], lo[:3], hi[:3])
    out[..., 3:] = wrap_angles(out[..., 3:])
    return out


def _displacement(target, origin):
    """``target - origin`` with the angular part taken along the shorter arc."""
    d = target - origin
    d[..., 3:] = (d[..., 3:] + np.pi) % TWO_PI - np.pi
    return d


def _evaluate(evaluator, positions, v, tau):
    h_c, h_st, h_sr, viol = evaluator.evaluate(positions, v)
    F = fitness_from(h_st, h_sr, h_c)
    return F + tau * np.sum(viol**2, axis=1), F, np.all(viol == 0.0, axis=1), viol


def inertia(t: int, config: SwarmConfig) -> float:
    if not 0 <= t <= config.T_max:
        raise ValueError(f"iteration {t} outside [0, {config.T_max}]")
    return (config.omega_ini - config.omega_end) * (config.T_max - t) / config.T_max + config.omega_end


def init_swarm(config: SwarmConfig, scenario: Scenario, v_fixed, rng, region: Region, incumbent: Pose6D | None = None) -> Swarm:
    """Uniform positions over the region and [0, 2*pi)^3, uniform velocities.

    ``incumbent`` (if given) replaces particle 0 so the run can never end worse
    than the pose it started from.
    """
    lo, hi = search_box(region)
    vmax = config.v_clamp_frac * (hi - lo)
    M = config.M
    positions = lo + rng.uniform(size=(M, 6)) * (hi - lo)
    positions[:, 2] = region.H
    positions = project(positions, lo, hi)
    velocities = rng.uniform(-1.0, 1.0, size=(M, 6)) * vmax
    if incumbent is not None:
        positions[0] = project(incumbent.as_vector(), lo, hi)

    evaluator = PoseBatchEvaluator(scenario)
    v_fixed = np.asarray(v_fixed, dtype=complex)
    _, F, feasible, viol = _evaluate(evaluator, positions, v_fixed, 1.0)
    tau = config.tau
    if tau is None:
        tau = 10.0 * abs(F.min()) or 1.0
    L = F + tau * np.sum(viol**2, axis=1)
    best = int(np.argmin(L))
    reference = float(fitness_from(evaluator.h_BT, evaluator.hbar_TB, evaluator.h_BU))

    swarm = Swarm(
        config=config,
        v_fixed=v_fixed,
        lo=lo,
        hi=hi,
        vmax=vmax,
        tau=float(tau),
        positions=positions,
        velocities=velocities,
        pbest=positions.copy(),
        pbest_value=L.copy(),
        gbest=positions[best].copy(),
        gbest_value=float(L[best]),
        gbest_feasible=bool(feasible[best]),
        reference=reference,
        evaluator=evaluator,
    )
    _track_feasible(swarm, positions, F, feasible)
    swarm.trace.append(swarm.gbest_value)
    return swarm


def _track_feasible(swarm: Swarm, positions, F, feasible):
    if not feasible.any():
        return
    idx = np.flatnonzero(feasible)
    j = idx[np.argmin(F[idx])]
    if F[j] < swarm.feasible_best_value:
        swarm.feasible_best_value = float(F[j])
        swarm.feasible_best = positions[j].copy()


def step(swarm: Swarm, rng) -> Swarm:
    """One velocity/position update with pbest and gbest refresh (in place)."""
    cfg = swarm.config
    M = swarm.positions.shape[0]
    w = inertia(min(swarm.t, cfg.T_max), cfg)
    shape = (M, 1) if cfg.scalar_random else (M, 6)
    r1 = rng.uniform(size=shape)
    r2 = rng.uniform(size=shape)
    g = swarm.positions
    mu = (
        w * swarm.velocities
        + cfg.c1 * r1 * _displacement(swarm.pbest, g)
        + cfg.c2 * r2 * _displacement(swarm.gbest[None, :], g)
    )
    mu = np.clip(mu, -swarm.vmax, swarm.vmax)
    g = project(g + mu, swarm.lo, swarm.hi)

    L, F, feasible, _ = _evaluate(swarm.evaluator, g, swarm.v_fixed, swarm.tau)
    better = L < swarm.pbest_value
    swarm.pbest[better] = g[better]
    swarm.pbest_value[better] = L[better]
    best = int(np.argmin(L))
    if L[best] < swarm.gbest_value:
        swarm.gbest = g[best].copy()
        swarm.gbest_value = float(L[best])
        swarm.gbest_feasible = bool(feasible[best])
    _track_feasible(swarm, g, F, feasible)

    swarm.positions = g
    swarm.velocities = mu
    swarm.t += 1
    swarm.trace.append(swarm.gbest_value)
    return swarm


def _stalled(swarm: Swarm) -> bool:
    p = swarm.config.patience
    if len(swarm.trace) <= p:
        return False
    old, new = swarm.trace[-1 - p], swarm.trace[-1]
    scale = abs(old - swarm.reference) or abs(old) or 1.0
    return (old - new) < swarm.config.tol_rel * scale


def _repair(swarm: Swarm, rng, n_samples=256):
    """Perturb the angles of an infeasible gbest until the half-space holds."""
    radii = np.geomspace(1e-3, np.pi, n_samples)[:, None]
    cand = np.repeat(swarm.gbest[None, :], n_samples, axis=0)
    cand[:, 3:] += radii * rng.standard_normal((n_samples, 3))
    cand = project(cand, swarm.lo, swarm.hi)
    _, F, feasible, _ = _evaluate(swarm.evaluator, cand, swarm.v_fixed, swarm.tau)
    _track_feasible(swarm, cand, F, feasible)


def run_pso(config: SwarmConfig, scenario: Scenario, v_fixed, rng, region: Region, incumbent: Pose6D | None = None) -> PsoResult:
    swarm = init_swarm(config, scenario, v_fixed, rng, region, incumbent)
    while swarm.t < config.T_max:
        step(swarm, rng)
        if _stalled(swarm):
            break

    if swarm.gbest_feasible:
        best, value = swarm.gbest, swarm.gbest_value
    else:
        _repair(swarm, rng)
        if swarm.feasible_best is None:
            _, _, _, viol = swarm.evaluator.evaluate(swarm.gbest[None, :], swarm.v_fixed)
            raise InfeasiblePoseError(Pose6D.from_vector(swarm.gbest), float(viol.sum()))
        log.debug("gbest infeasible after %d iterations; using best feasible visit", swarm.t)
        best, value = swarm.feasible_best, swarm.feasible_best_value
    return PsoResult(Pose6D.from_vector(best), float(value), list(swarm.trace), swarm.tau, swarm.t)
