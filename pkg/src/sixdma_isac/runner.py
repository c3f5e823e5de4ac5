"""Alternating optimisation, baseline schemes, sweeps and CSV export.

Seeding: a sweep with master seed ``m`` runs job (scheme, N_x, replicate ``r``)
with the child seed ``SeedSequence([m, crc32(scheme), N_x, r]).generate_state(1)[0]``.
The child seed is what the ``seed`` CSV column records, and
``run --seed <child>`` with the same scenario and N_x replays that row.
"""
from __future__ import annotations

import csv
import logging
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .beamformer import BeamformerInfeasible, solve_beamformer
from .channel import Scenario, build_channels, comm_channel, sensing_channels
from .config import SolverConfig
from .geometry import Pose6D, Region
from .manifold import assemble_pbf, optimize_pbf_multistart
from .metrics import db, direct_fitness, fitness_F, rho_from
from .pso import run_pso

log = logging.getLogger(__name__)

PBF_ONLY, ORIENT_PBF, SIXD_PBF = "pbf_only", "orient_pbf", "6d_pbf"

CSV_COLUMNS = (
    "scheme", "N_x", "N_y", "Gamma0_dB", "seed", "snr_s_dB", "snr_c_dB", "rho",
    "p_R_x", "p_R_y", "p_R_z", "gamma_x", "gamma_y", "gamma_z", "ao_iters",
)
CSV_HEADER = ",".join(CSV_COLUMNS)
_INT_COLUMNS = {"N_x", "N_y", "seed", "ao_iters"}

SCHEME_ORDER = ("6d-pbf-r2", "6d-pbf-r1", "orient-pbf", "pbf-only")


@dataclass(frozen=True)
class Scheme:
    name: str
    kind: str
    region: Region | None = None
    fixed_pose: Pose6D | None = None

    def __post_init__(self):
        if self.kind == SIXD_PBF:
            if self.region is None or self.fixed_pose is not None:
                raise ValueError("6D scheme takes a region and no fixed pose")
        elif self.kind in (PBF_ONLY, ORIENT_PBF):
            if self.fixed_pose is None or self.region is not None:
                raise ValueError(f"{self.kind} takes a fixed pose and no region")
        else:
            raise ValueError(f"unknown scheme kind {self.kind!r}")


def scheme_from_name(name: str, scenario: Scenario) -> Scheme:
    if name == "pbf-only":
        return Scheme(name, PBF_ONLY, fixed_pose=scenario.fixed_pose)
    if name == "orient-pbf":
        return Scheme(name, ORIENT_PBF, fixed_pose=scenario.fixed_pose)
    if name.startswith("6d-pbf-"):
        key = name[len("6d-pbf-"):].upper()
        if key in scenario.regions:
            return Scheme(name, SIXD_PBF, region=scenario.regions[key])
    known = ["pbf-only", "orient-pbf"] + [f"6d-pbf-{k.lower()}" for k in scenario.regions]
    raise ValueError(f"unknown scheme {name!r}; choose from {known}")


def standard_schemes(scenario: Scenario) -> list:
    return [scheme_from_name(n, scenario) for n in SCHEME_ORDER]


@dataclass
class AoResult:
    pose: Pose6D
    v: np.ndarray
    trace: list
    ao_iters: int
    pso_traces: list = field(default_factory=list)
    pbf_traces: list = field(default_factory=list)


@dataclass
class SchemeResult:
    scheme: str
    N_x: int
    N_y: int
    Gamma0_dB: float
    seed: int
    pose: Pose6D
    v: np.ndarray
    f: np.ndarray | None
    snr_s_dB: float
    snr_c_dB: float
    rho: float
    fitness_trace: list
    ao_iters: int
    pso_traces: list = field(default_factory=list, repr=False)
    pbf_traces: list = field(default_factory=list, repr=False)

    @property
    def feasible(self) -> bool:
        return self.f is not None

    def row(self) -> dict:
        return {
            "scheme": self.scheme, "N_x": self.N_x, "N_y": self.N_y,
            "Gamma0_dB": float(self.Gamma0_dB), "seed": int(self.seed),
            "snr_s_dB": float(self.snr_s_dB), "snr_c_dB": float(self.snr_c_dB), "rho": float(self.rho),
            "p_R_x": float(self.pose.p_R[0]), "p_R_y": float(self.pose.p_R[1]), "p_R_z": float(self.pose.p_R[2]),
            "gamma_x": float(self.pose.gamma[0]), "gamma_y": float(self.pose.gamma[1]),
            "gamma_z": float(self.pose.gamma[2]), "ao_iters": int(self.ao_iters),
        }


def child_seed(master: int, scheme: str, N_x: int, replicate: int) -> int:
    ss = np.random.SeedSequence([int(master), zlib.crc32(scheme.encode()), int(N_x), int(replicate)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def _fitness(scenario, pose, v):
    return fitness_F(build_channels(scenario, pose), v)


def alternate_optimize(scenario: Scenario, scheme: Scheme, seed: int, solver: SolverConfig | None = None) -> AoResult:
    """Alternate PSO over the unlocked pose dimensions with manifold PBF.

    Phases start at all-ones and get one PBF pass at the starting pose before
    the first pose search.  6D schemes start from the scenario's fixed pose when
    it lies inside their region (the region centre otherwise), so every scheme
    begins from the PBF-only solution.  Each block starts from the incumbent and
    is only accepted if it does not increase the fitness, so the round-by-round
    trace is non-increasing.
    """
    solver = solver or SolverConfig()
    rng = np.random.default_rng(seed)
    if scheme.kind == SIXD_PBF:
        fixed = scenario.fixed_pose
        start = fixed.p_R if scheme.region.contains(fixed.p_R) else scheme.region.center
        pose = Pose6D(start, fixed.gamma)
        search = scheme.region
    else:
        pose = scheme.fixed_pose
        search = Region.point(pose.p_R)

    v = np.ones(scenario.N, dtype=complex)
    cs = build_channels(scenario, pose)
    reference = direct_fitness(cs)
    F = fitness_F(cs, v)
    trace = [F]
    pso_traces, pbf_traces = [], []
    v_new, pbf_trace = optimize_pbf_multistart(assemble_pbf(cs), v, solver.pbf, rng)
    pbf_traces.append(pbf_trace)
    F_new = fitness_F(cs, v_new)
    if F_new <= F:
        v, F = v_new, F_new
    trace.append(F)
    if scheme.kind == PBF_ONLY:
        return AoResult(pose, v, trace, 1, pso_traces, pbf_traces)
    rounds = 1
    for rounds in range(2, solver.ao.rounds + 1):
        F_prev = F
        res = run_pso(solver.pso, scenario, v, rng, search, incumbent=pose)
        pso_traces.append(res.trace)
        F_new = _fitness(scenario, res.pose, v)
        if F_new <= F:
            pose, F = res.pose, F_new
        cs = build_channels(scenario, pose)
        v_new, pbf_trace = optimize_pbf_multistart(assemble_pbf(cs), v, solver.pbf, rng)
        pbf_traces.append(pbf_trace)
        F_new = fitness_F(cs, v_new)
        if F_new <= F:
            v, F = v_new, F_new
        trace.append(F)
        scale = abs(F_prev - reference) or abs(F_prev) or 1.0
        if F_prev - F < solver.ao.tol * scale:
            break
    return AoResult(pose, v, trace, rounds, pso_traces, pbf_traces)


def evaluate_solution(scenario: Scenario, pose: Pose6D, v, Gamma0_dB: float | None = None):
    """Beamform at a fixed IRS solution; returns ``(f, snr_s_dB, snr_c_dB, rho)``.

    ``f`` is None (and the SNRs NaN) when the threshold is unreachable.
    """
    cs = build_channels(scenario, pose)
    h_c = comm_channel(cs, v)
    h_st, h_sr, _ = sensing_channels(cs, v)
    rho = rho_from(h_st, h_c)
    try:
        bf = solve_beamformer(h_st, float(np.vdot(h_sr, h_sr).real), h_c, scenario, Gamma0_dB)
    except BeamformerInfeasible as exc:
        log.info("%s", exc)
        return None, math.nan, math.nan, rho
    return bf.f, bf.snr_s_dB, bf.snr_c_dB, rho


def recompute_metrics(result: SchemeResult, scenario: Scenario):
    """``(snr_s_dB, snr_c_dB, rho)`` recomputed from the stored pose, phases and beamformer."""
    cs = build_channels(scenario, result.pose)
    h_c = comm_channel(cs, result.v)
    h_st, h_sr, _ = sensing_channels(cs, result.v)
    rho = rho_from(h_st, h_c)
    if result.f is None:
        return math.nan, math.nan, rho
    snr_s = scenario.P_t * np.vdot(h_sr, h_sr).real * abs(h_st @ result.f) ** 2 / scenario.sigma_s2
    snr_c = scenario.P_t * abs(h_c @ result.f) ** 2 / scenario.sigma_c2
    return float(db(snr_s)), float(db(snr_c)), rho


def run_scheme(scenario: Scenario, scheme: Scheme, seed: int, solver: SolverConfig | None = None) -> SchemeResult:
    ao = alternate_optimize(scenario, scheme, seed, solver)
    f, s_dB, c_dB, rho = evaluate_solution(scenario, ao.pose, ao.v)
    return SchemeResult(
        scheme=scheme.name, N_x=scenario.N_x, N_y=scenario.N_y, Gamma0_dB=scenario.Gamma0_dB, seed=seed,
        pose=ao.pose, v=ao.v, f=f, snr_s_dB=s_dB, snr_c_dB=c_dB, rho=rho,
        fitness_trace=ao.trace, ao_iters=ao.ao_iters, pso_traces=ao.pso_traces, pbf_traces=ao.pbf_traces,
    )


def _elements_job(args):
    scenario, name, seed, solver = args
    return run_scheme(scenario, scheme_from_name(name, scenario), seed, solver)


def _gamma_job(args):
    scenario, name, seed, solver, gammas = args
    base = run_scheme(scenario, scheme_from_name(name, scenario), seed, solver)
    out = []
    for g0 in gammas:
        f, s_dB, c_dB, rho = evaluate_solution(scenario, base.pose, base.v, g0)
        out.append(SchemeResult(
            scheme=base.scheme, N_x=base.N_x, N_y=base.N_y, Gamma0_dB=float(g0), seed=seed,
            pose=base.pose, v=base.v, f=f, snr_s_dB=s_dB, snr_c_dB=c_dB, rho=rho,
            fitness_trace=base.fitness_trace, ao_iters=base.ao_iters,
            pso_traces=base.pso_traces, pbf_traces=base.pbf_traces,
        ))
    return out


def _map(fn, jobs, n_workers):
    if n_workers and n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def _names(schemes):
    return [s.name if isinstance(s, Scheme) else str(s) for s in schemes]


def sweep_elements(scenario: Scenario, schemes, nx_list, seeds: int, master_seed: int = 0,
                   solver: SolverConfig | None = None, workers: int = 1) -> list:
    """Run every scheme at ``N_x = N_y`` in ``nx_list`` for ``seeds`` replicates."""
    if not schemes or not nx_list or seeds < 1:
        raise ValueError("need at least one scheme, one N_x and one replicate")
    jobs = []
    for name in _names(schemes):
        for nx in nx_list:
            sc = scenario.replace(N_x=int(nx), N_y=int(nx))
            for r in range(seeds):
                jobs.append((sc, name, child_seed(master_seed, name, nx, r), solver))
    return sort_results(_map(_elements_job, jobs, workers))


def sweep_gamma(scenario: Scenario, schemes, gamma_list, seeds: int, master_seed: int = 0,
                solver: SolverConfig | None = None, workers: int = 1) -> list:
    """Optimise the IRS once per (scheme, replicate), then sweep the comm threshold."""
    if not schemes or len(gamma_list) == 0 or seeds < 1:
        raise ValueError("need at least one scheme, one threshold and one replicate")
    gammas = [float(g) for g in gamma_list]
    jobs = [
        (scenario, name, child_seed(master_seed, name, scenario.N_x, r), solver, gammas)
        for name in _names(schemes) for r in range(seeds)
    ]
    return sort_results([res for batch in _map(_gamma_job, jobs, workers) for res in batch])


def _scheme_rank(name):
    return (SCHEME_ORDER.index(name), "") if name in SCHEME_ORDER else (len(SCHEME_ORDER), name)


def _row_key(row):
    return (_scheme_rank(row["scheme"]), row["N_x"], row["N_y"], row["Gamma0_dB"], row["seed"])


def sort_results(results: list) -> list:
    return sorted(results, key=lambda r: _row_key(r.row()))


def to_table(results) -> list:
    return [r.row() if isinstance(r, SchemeResult) else dict(r) for r in results]


def _fmt(col, val):
    if col == "scheme":
        return str(val)
    if col in _INT_COLUMNS:
        return str(int(val))
    return repr(float(val))


def export_results(table, path) -> Path:
    """Write rows as UTF-8 CSV with LF endings and round-trip float precision."""
    rows = sorted(to_table(table), key=_row_key)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in rows:
                writer.writerow([_fmt(c, row[c]) for c in CSV_COLUMNS])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


def read_results(path) -> list:
    path = Path(path)
    try:
        with path.open(encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
                raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
            rows = []
            for raw in reader:
                row = {}
                for c in CSV_COLUMNS:
                    row[c] = raw[c] if c == "scheme" else int(raw[c]) if c in _INT_COLUMNS else float(raw[c])
                rows.append(row)
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc}") from exc
    return rows


def median_table(table, keys=("scheme", "N_x"), fields=("snr_s_dB", "snr_c_dB", "rho")) -> list:
    """Per-cell medians; NaN (infeasible) cells count as -inf."""
    groups = {}
    for row in to_table(table):
        groups.setdefault(tuple(row[k] for k in keys), []).append(row)
    out = []
    for key, rows in groups.items():
        med = dict(zip(keys, key))
        for f in fields:
            vals = np.array([r[f] for r in rows], dtype=float)
            med[f] = float(np.median(np.where(np.isnan(vals), -np.inf, vals)))
        med["count"] = len(rows)
        out.append(med)
    out.sort(key=lambda m: tuple(_scheme_rank(m[k]) if k == "scheme" else m[k] for k in keys))
    return out


def trace_records(results) -> list:
    """Per-iteration traces as JSON-serialisable records, in canonical order."""
    records = []
    seen = set()
    for res in sort_results(results):
        job = (res.scheme, res.N_x, res.N_y, res.seed)
        if job in seen:
            continue
        seen.add(job)
        base = {"scheme": res.scheme, "N_x": res.N_x, "N_y": res.N_y, "seed": res.seed}
        for i, val in enumerate(res.fitness_trace):
            records.append({**base, "stage": "ao", "round": i, "iter": i, "value": val})
        for rnd, tr in enumerate(res.pso_traces, start=1):
            records.extend({**base, "stage": "pso", "round": rnd, "iter": i, "value": val} for i, val in enumerate(tr))
        for rnd, tr in enumerate(res.pbf_traces, start=1):
            records.extend({**base, "stage": "pbf", "round": rnd, "iter": i, "value": val} for i, val in enumerate(tr))
    return records
