"""Continuous trajectories from discrete plans, and their validation.

Synthesis glues three phases: snap-in (straight lines to the assigned
vertices over the max snap distance), the grid phase (each discrete step
executed synchronously over one edge length of time, so speeds never
exceed 1), and snap-out (the goal snap reversed).  Validation computes
the exact minimum center distance for every disc pair over every common
linear window; discs are open, so the plan is collision-free when that
minimum stays at or above 2 (within 1e-9).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discretize import ContinuousInstance, SnapResult
from .geometry import EDGE_LEN, TriGrid, Vec2, Workspace
from .plan import DiscretePlan

CONTACT = 2.0
TOL = 1e-9


class SynthesisError(ValueError):
    """Plan endpoints disagree with the snap assignments."""


@dataclass
class ContinuousPlan:
    trajectories: list[list[tuple[float, Vec2]]]   # per disc: (time, point)
    makespan: float
    snap_in: float
    grid_duration: float
    snap_out: float


@dataclass
class ValidationReport:
    min_pair_clearance: float
    violations: list[tuple[tuple[int, int], float, float]]  # (pair, time, dist)
    boundary_ok: bool
    makespan: float

    @property
    def valid(self) -> bool:
        return self.boundary_ok and self.min_pair_clearance >= CONTACT - TOL


def synthesize(inst: ContinuousInstance, grid: TriGrid, dplan: DiscretePlan,
               snap_s: SnapResult, snap_g: SnapResult) -> ContinuousPlan:
    """Timed piecewise-linear trajectories for the full three-phase plan."""
    n = inst.n
    if dplan.n != n:
        raise SynthesisError("plan robot count differs from instance")
    if tuple(dplan.steps[0]) != tuple(snap_s.assignment):
        raise SynthesisError("plan does not start at the snapped start vertices")
    if tuple(dplan.steps[-1]) != tuple(snap_g.assignment):
        raise SynthesisError("plan does not end at the snapped goal vertices")

    t_in = snap_s.phase_duration
    t_grid = dplan.T * EDGE_LEN
    t_out = snap_g.phase_duration
    makespan = t_in + t_grid + t_out

    trajectories = []
    for r in range(n):
        pts: list[tuple[float, Vec2]] = [(0.0, inst.starts[r])]

        def append(t: float, p: Vec2) -> None:
            lt, lp = pts[-1]
            if t > lt + 1e-15 or (lp.x, lp.y) != (p.x, p.y):
                pts.append((t, p))

        append(t_in, snap_s.segments[r][1])
        for k in range(1, len(dplan.steps)):
            append(t_in + k * EDGE_LEN, grid.vertices[dplan.steps[k][r]])
        append(makespan, inst.goals[r])
        if pts[-1][0] < makespan - 1e-15:
            pts.append((makespan, inst.goals[r]))
        trajectories.append(pts)
    return ContinuousPlan(trajectories=trajectories, makespan=makespan,
                          snap_in=t_in, grid_duration=t_grid, snap_out=t_out)


def synthesize_discrete(grid: TriGrid, dplan: DiscretePlan) -> ContinuousPlan:
    """Trajectories for a purely discrete instance (endpoints on vertices)."""
    makespan = dplan.T * EDGE_LEN
    trajectories = []
    for r in range(dplan.n):
        pts = [(0.0, grid.vertices[dplan.steps[0][r]])]
        for k in range(1, len(dplan.steps)):
            pts.append((k * EDGE_LEN, grid.vertices[dplan.steps[k][r]]))
        trajectories.append(pts)
    return ContinuousPlan(trajectories=trajectories, makespan=makespan,
                          snap_in=0.0, grid_duration=makespan, snap_out=0.0)


def max_segment_speed(plan: ContinuousPlan) -> float:
    worst = 0.0
    for pts in plan.trajectories:
        for (t0, p0), (t1, p1) in zip(pts, pts[1:]):
            if t1 > t0:
                worst = max(worst, p0.dist(p1) / (t1 - t0))
    return worst


def _sample_positions(plan: ContinuousPlan, times: np.ndarray) -> np.ndarray:
    """(n, len(times), 2) positions by linear interpolation."""
    n = len(plan.trajectories)
    out = np.empty((n, len(times), 2))
    for r, pts in enumerate(plan.trajectories):
        ts = np.array([t for t, _ in pts])
        xs = np.array([p.x for _, p in pts])
        ys = np.array([p.y for _, p in pts])
        out[r, :, 0] = np.interp(times, ts, xs)
        out[r, :, 1] = np.interp(times, ts, ys)
    return out


def validate(plan: ContinuousPlan, ws: Workspace) -> ValidationReport:
    """Exact pairwise minimum distances over all common linear windows,
    plus boundary clearance of 1 for every breakpoint (segments stay
    inside by convexity)."""
    n = len(plan.trajectories)
    boundary_ok = True
    for pts in plan.trajectories:
        for _, p in pts:
            if min(p.x, p.y, ws.w - p.x, ws.h - p.y) < 1.0 - TOL:
                boundary_ok = False

    if n < 2:
        return ValidationReport(min_pair_clearance=math.inf, violations=[],
                                boundary_ok=boundary_ok, makespan=plan.makespan)

    times = sorted({t for pts in plan.trajectories for t, _ in pts})
    merged = [times[0]]
    for t in times[1:]:
        if t - merged[-1] > 1e-12:
            merged.append(t)
    times_arr = np.array(merged)
    pos = _sample_positions(plan, times_arr)

    pairs = np.array([(i, j) for i in range(n) for j in range(i + 1, n)])
    pi, pj = pairs[:, 0], pairs[:, 1]
    min_clear = math.inf
    violations: list[tuple[tuple[int, int], float, float]] = []

    for k in range(len(merged) - 1):
        a0, a1 = pos[:, k, :], pos[:, k + 1, :]
        dp = a0[pj] - a0[pi]
        dv = (a1[pj] - a1[pi]) - dp
        # skip pairs that provably stay farther than the current threshold
        d_start = np.linalg.norm(dp, axis=1)
        move = np.linalg.norm(dv, axis=1)
        cand = d_start - move <= max(CONTACT + 1e-6, min_clear)
        if not np.any(cand):
            continue
        dpc, dvc = dp[cand], dv[cand]
        vv = np.einsum("ij,ij->i", dvc, dvc)
        d0 = np.einsum("ij,ij->i", dpc, dpc)
        pe = dpc + dvc
        d1 = np.einsum("ij,ij->i", pe, pe)
        tt = np.where(vv > 0, -np.einsum("ij,ij->i", dpc, dvc)
                      / np.where(vv > 0, vv, 1.0), 0.0)
        tt = np.clip(tt, 0.0, 1.0)
        pm = dpc + tt[:, None] * dvc
        dm = np.einsum("ij,ij->i", pm, pm)
        all3 = np.stack([d0, dm, d1])
        which = np.argmin(all3, axis=0)
        dmin = np.sqrt(all3[which, np.arange(all3.shape[1])])
        t_lo, t_hi = merged[k], merged[k + 1]
        tbest = np.choose(which, [np.zeros_like(tt), tt, np.ones_like(tt)])
        idxs = np.nonzero(cand)[0]
        min_clear = min(min_clear, float(dmin.min()))
        bad = np.nonzero(dmin < CONTACT - TOL)[0]
        for bk in bad:
            gi = idxs[bk]
            violations.append(((int(pi[gi]), int(pj[gi])),
                               t_lo + float(tbest[bk]) * (t_hi - t_lo),
                               float(dmin[bk])))

    return ValidationReport(min_pair_clearance=min_clear,
                            violations=violations,
                            boundary_ok=boundary_ok,
                            makespan=plan.makespan)


@dataclass
class MetricsAggregate:
    per_instance: list[float]
    aggregate: float


def optimality_metrics(step_counts: list[tuple[int, int]]) -> MetricsAggregate:
    """Ratios from (achieved, lower bound) discrete step counts.

    Aggregate = sum of achieved / sum of lower bounds; all-identity
    suites (zero denominators) report 1.0 by convention.
    """
    per = []
    for t, t_hat in step_counts:
        per.append(1.0 if t_hat == 0 else t / t_hat)
    total_hat = sum(t_hat for _, t_hat in step_counts)
    total = sum(t for t, _ in step_counts)
    agg = 1.0 if total_hat == 0 else total / total_hat
    return MetricsAggregate(per_instance=per, aggregate=agg)
