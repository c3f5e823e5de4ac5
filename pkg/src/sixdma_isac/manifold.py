"""Passive beamforming on the complex circle manifold.

Minimises ``Q(v) = -||h_r(v)||^2 |h_t(v) h_c(v)^H|^2`` over unit-modulus ``v``
by Riemannian gradient descent with Armijo backtracking.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet


@dataclass(frozen=True)
class PbfProblem:
    U_c: np.ndarray  # N x N_t
    U_r: np.ndarray  # N_r x N
    U_t: np.ndarray  # N x N_t
    h_BU: np.ndarray
    hbar_TB: np.ndarray
    h_BT: np.ndarray

    @property
    def N(self) -> int:
        return self.U_c.shape[0]

    def h_c(self, v):
        return self.h_BU + v @ self.U_c

    def h_r(self, v):
        return self.hbar_TB + self.U_r @ v

    def h_t(self, v):
        return self.h_BT + v @ self.U_t


@dataclass
class PbfOptions:
    tol: float = 1e-6
    max_iters: int = 500
    initial_step: float = 1.0
    contraction: float = 0.5
    armijo: float = 1e-4
    restarts: int = 4


def assemble_pbf(cs: ChannelSet) -> PbfProblem:
    return PbfProblem(
        U_c=np.sqrt(cs.F_cu) * cs.h_RU[:, None] * cs.H_BR,
        U_r=np.sqrt(cs.F_sr) * cs.Hbar_RB * cs.hbar_TR[None, :],
        U_t=np.sqrt(cs.F_st) * cs.h_RT[:, None] * cs.H_BR,
        h_BU=cs.h_BU,
        hbar_TB=cs.hbar_TB,
        h_BT=cs.h_BT,
    )


def objective_Q(problem: PbfProblem, v) -> float:
    h_r, h_t, h_c = problem.h_r(v), problem.h_t(v), problem.h_c(v)
    return float(-np.vdot(h_r, h_r).real * abs(np.vdot(h_c, h_t)) ** 2)


def direct_objective(problem: PbfProblem) -> float:
    """Objective with every reflection coefficient switched off."""
    return objective_Q(problem, np.zeros(problem.N, dtype=complex))


def euclidean_gradient(problem: PbfProblem, v) -> np.ndarray:
    """Conjugate Wirtinger gradient ``dQ/d(conj v)``."""
    v = np.asarray(v, dtype=complex)
    h_r, h_t, h_c = problem.h_r(v), problem.h_t(v), problem.h_c(v)
    A = np.vdot(h_r, h_r).real
    s = np.sum(h_t * np.conj(h_c))
    dA = problem.U_r.conj().T @ h_r
    dB = np.conj(s) * (problem.U_c.conj() @ h_t) + s * (problem.U_t.conj() @ h_c)
    return -(abs(s) ** 2 * dA + A * dB)


def tangent_project(v, egrad) -> np.ndarray:
    return egrad - np.real(egrad * np.conj(v)) * v


def riemannian_step(v, egrad, step: float, max_halvings: int = 60) -> np.ndarray:
    """Move against the projected gradient and retract onto unit modulus."""
    v = np.asarray(v, dtype=complex)
    rgrad = tangent_project(v, egrad)
    for _ in range(max_halvings):
        w = v - step * rgrad
        mag = np.abs(w)
        if np.all(mag > 0.0):
            return w / mag
        step *= 0.5
    raise FloatingPointError("retraction failed: zero-modulus entry after repeated halving")


def optimize_pbf(problem: PbfProblem, v0, opts: PbfOptions | None = None):
    """Single descent trajectory from ``v0``; returns ``(v, trace)``.

    Trial steps are expressed as a maximum per-element phase move so the
    iteration is independent of the (tiny, geometry-dependent) objective scale.
    Stops once ``2 ||rgrad|| <= tol * |Q(v) - Q(0)|``, i.e. the relative rate of
    change of the IRS-dependent part of Q falls below ``tol``.
    """
    opts = opts or PbfOptions()
    v = np.asarray(v0, dtype=complex)
    v = v / np.abs(v)
    q0 = direct_objective(problem)
    q = objective_Q(problem, v)
    trace = [q]
    move = opts.initial_step
    for _ in range(opts.max_iters):
        rgrad = tangent_project(v, euclidean_gradient(problem, v))
        gnorm2 = np.vdot(rgrad, rgrad).real
        if 2.0 * np.sqrt(gnorm2) <= opts.tol * abs(q - q0):
            break
        gmax = np.max(np.abs(rgrad))
        if gmax == 0.0:
            break
        t = move / gmax
        accepted = False
        backtracked = False
        while t * gmax > 1e-12:
            w = riemannian_step(v, rgrad, t)
            qw = objective_Q(problem, w)
            if qw <= q - opts.armijo * t * 2.0 * gnorm2:
                accepted = True
                break
            t *= opts.contraction
            backtracked = True
        if not accepted:
            break
        v, q = w, qw
        trace.append(q)
        move = t * gmax if backtracked else min(2.0 * t * gmax, np.pi)
    return v, trace


def optimize_pbf_multistart(problem: PbfProblem, v0, opts: PbfOptions | None, rng):
    """Best of the warm start ``v0`` and ``opts.restarts`` random-phase starts."""
    opts = opts or PbfOptions()
    best_v, best_trace = optimize_pbf(problem, v0, opts)
    for _ in range(opts.restarts):
        start = np.exp(1j * rng.uniform(0.0, 2 * np.pi, problem.N))
        v, trace = optimize_pbf(problem, start, opts)
        if trace[-1] < best_trace[-1]:
            best_v, best_trace = v, trace
    return best_v, best_trace
