"""Synchronous discrete plans on the triangular grid and their legality rules.

A plan is a list of per-step robot position rows.  A step is legal when
per-robot motion is along an edge or a stay, positions stay injective,
no edge is crossed in both directions at once, and no two robots move
within the same lattice triangle (the sharp-angle exclusion).
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import TriGrid


@dataclass
class DiscretePlan:
    steps: list[tuple[int, ...]]   # steps[t][r] = vertex of robot r at step t

    @property
    def T(self) -> int:
        return len(self.steps) - 1

    @property
    def n(self) -> int:
        return len(self.steps[0]) if self.steps else 0


def _edge_triangle_map(grid: TriGrid) -> dict[tuple[int, int], list[int]]:
    m: dict[tuple[int, int], list[int]] = {}
    for tid, (a, b, c) in enumerate(grid.triangles):
        for e in ((a, b), (a, c), (b, c)):
            m.setdefault(e, []).append(tid)
    return m


def check_plan(grid: TriGrid, plan: DiscretePlan,
               v_starts: tuple[int, ...] | None = None,
               v_goals: tuple[int, ...] | None = None) -> list[str]:
    """All violations of the plan rules (empty list = valid plan)."""
    errors: list[str] = []
    if not plan.steps:
        return ["plan has no steps"]
    n = plan.n
    for t, row in enumerate(plan.steps):
        if len(row) != n:
            errors.append(f"step {t}: row length {len(row)} != {n}")
            return errors
        if len(set(row)) != n:
            errors.append(f"step {t}: positions not injective")

    if v_starts is not None and tuple(plan.steps[0]) != tuple(v_starts):
        errors.append("step 0 does not match start configuration")
    if v_goals is not None and tuple(plan.steps[-1]) != tuple(v_goals):
        errors.append(f"step {plan.T} does not match goal configuration")

    etri = _edge_triangle_map(grid)
    adj = [set(a) for a in grid.adjacency]
    for t in range(plan.T):
        cur, nxt = plan.steps[t], plan.steps[t + 1]
        moves = []
        for r in range(n):
            u, v = cur[r], nxt[r]
            if u == v:
                continue
            if v not in adj[u]:
                errors.append(f"step {t}: robot {r} jumps {u}->{v}")
                continue
            moves.append((r, u, v))
        directed = {(u, v) for _, u, v in moves}
        for r, u, v in moves:
            if (v, u) in directed:
                errors.append(f"step {t}: head-on exchange on edge ({u},{v})")
        tri_count: dict[int, int] = {}
        for _, u, v in moves:
            for tid in etri.get((min(u, v), max(u, v)), ()):
                tri_count[tid] = tri_count.get(tid, 0) + 1
        for tid, cnt in tri_count.items():
            if cnt > 1:
                errors.append(
                    f"step {t}: {cnt} concurrent moves on triangle {grid.triangles[tid]}")
    return errors
