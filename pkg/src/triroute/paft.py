"""Combinatorial grid planner built on hexagon rotations.

Rotating all discs around a hexagon of the grid by one position is
always a legal synchronous step (every turn is 120 degrees), and two
overlapping hexagons generate enough rotations to transpose any two
adjacent discs in the pair region while returning everyone else home.
Those cached swap schedules are the workhorse:

* ``isag``    routes a (virtually completed) full-occupancy instance by
  recursive interval bisection over a snake threading of the covers-all
  waving path family, each level realized as rounds of odd-even adjacent
  transpositions, batched greedily under footprint disjointness.
* ``paft``    wraps the same core with the cell pipeline: compute the
  max start-goal distance, partition the workspace into square cells,
  run greedy hexagon circulations that push discs toward their goal
  cells, then finish with the bisection sort.

Sharp boundary corners lie on no hexagon, so they are settled before
the parallel machinery runs: their goal discs are rolled in (or the
corner is emptied) with sequential single-disc moves, which are always
collision-free.  At full occupancy nothing can move a corner disc at
all, so instances that demand it are rejected as infeasible.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .discretize import DiscreteInstance
from .geometry import EDGE_LEN, TriGrid, bfs_distances
from .plan import DiscretePlan


class InfeasibleInstanceError(ValueError):
    """No legal plan exists (full occupancy forcing a locked corner move)."""


class SwapSearchError(RuntimeError):
    """Rotation search exhausted without realizing the transposition."""


_SEARCH_CAP = 400_000
_LEAF = 10


@dataclass
class SwapSchedule:
    region: frozenset[int]                       # vertices of both rings
    footprint: frozenset[int]                    # region plus ring centers
    steps: list[tuple[tuple[int, int], ...]]     # per step: (from, to) moves
    net_permutation: dict[int, int]              # start vertex -> end vertex
    centers: tuple[int, ...] = ()                # ring centers used


@dataclass
class PaftReport:
    makespan: int
    max_goal_distance: int
    ratio: float
    cell_count: int
    circulation_steps: int
    swap_constant: int


@dataclass
class CellPartition:
    side: float
    cell_of: list[tuple[int, int]]
    d_g: int

    @property
    def cell_count(self) -> int:
        return len(set(self.cell_of))


def build_cell_partition(grid: TriGrid, d_g: int) -> CellPartition:
    """Square cells of side about 5*d_g, clamped to one hexagon pitch
    below and the workspace extent above."""
    ws = grid.workspace
    side = min(max(5.0 * d_g, 2.0 * EDGE_LEN), max(ws.w, ws.h))
    cell_of = [(int(p.x // side), int(p.y // side)) for p in grid.vertices]
    return CellPartition(side=side, cell_of=cell_of, d_g=d_g)


def _apply_perm(state: tuple[int, ...], perm: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(state)
    for s, d in enumerate(state):
        out[perm[s]] = d
    return tuple(out)


def _invert(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    return tuple(inv)


def _bidirectional_search(gens: list[tuple[object, tuple[int, ...]]],
                          start: tuple[int, ...], target: tuple[int, ...]
                          ) -> list[object] | None:
    """Shortest generator word mapping start to target (None if absent)."""
    if start == target:
        return []
    inv_gens = [(tag, _invert(p)) for tag, p in gens]
    fw: dict[tuple[int, ...], tuple] = {start: None}
    bw: dict[tuple[int, ...], tuple] = {target: None}
    fq, bq = deque([start]), deque([target])

    def path_fw(state) -> list[object]:
        out = []
        while fw[state] is not None:
            state, tag = fw[state]
            out.append(tag)
        return list(reversed(out))

    def path_bw(state) -> list[object]:
        out = []
        while bw[state] is not None:
            state, tag = bw[state]
            out.append(tag)
        return out

    while fq and bq:
        if len(fw) + len(bw) > _SEARCH_CAP:
            return None
        if len(fq) <= len(bq):
            for _ in range(len(fq)):
                st = fq.popleft()
                for tag, perm in gens:
                    ns = _apply_perm(st, perm)
                    if ns in fw:
                        continue
                    fw[ns] = (st, tag)
                    if ns in bw:
                        return path_fw(ns) + path_bw(ns)
                    fq.append(ns)
        else:
            for _ in range(len(bq)):
                st = bq.popleft()
                for tag, perm in inv_gens:
                    ns = _apply_perm(st, perm)
                    if ns in bw:
                        continue
                    bw[ns] = (st, tag)
                    if ns in fw:
                        return path_fw(ns) + path_bw(ns)
                    bq.append(ns)
    return None


class SwapEngine:
    """Finds and caches adjacent-pair swap schedules on a grid."""

    def __init__(self, grid: TriGrid):
        self.grid = grid
        self._member: dict[int, list[int]] = {}
        for center in sorted(grid.ring_of):
            for v in grid.ring_of[center]:
                self._member.setdefault(v, []).append(center)
        self._cache: dict[tuple, list | None] = {}
        self._pair_cache: dict[tuple[int, int], SwapSchedule] = {}
        self.c_swap = 0

    def _axial(self, v: int) -> tuple[int, int]:
        m, k = self.grid.row_of[v], self.grid.col_of[v]
        return (k - m // 2, m)

    def _candidate_pairs(self, a: int, b: int) -> list[tuple[int, int]]:
        ca = self._member.get(a, [])
        cb = self._member.get(b, [])
        pairs = set()
        for c1 in ca:
            ring1 = set(self.grid.ring_of[c1])
            for c2 in cb:
                if c1 != c2 and ring1 & set(self.grid.ring_of[c2]):
                    pairs.add((min(c1, c2), max(c1, c2)))
            if b in ring1:
                # partner may be any overlapping ring
                for v in ring1:
                    for c2 in self._member.get(v, []):
                        if c2 != c1:
                            pairs.add((min(c1, c2), max(c1, c2)))

        def rank(p):
            d = self.grid.vertices[p[0]].dist(self.grid.vertices[p[1]])
            same_cover = 0 if abs(d - math.sqrt(3.0) * EDGE_LEN) < 1e-6 else 1
            return (same_cover, p)

        return sorted(pairs, key=rank)

    def _rotation_word(self, c1: int, c2: int, a: int, b: int) -> list | None:
        base = self._axial(c1)

        def rel(v):
            av = self._axial(v)
            return (av[0] - base[0], av[1] - base[1])

        key = (rel(c2), rel(a), rel(b))
        if key in self._cache:
            return self._cache[key]
        rings = (self.grid.ring_of[c1], self.grid.ring_of[c2])
        slots = sorted(set(rings[0]) | set(rings[1]))
        idx = {v: i for i, v in enumerate(slots)}
        gens = []
        for which in (0, 1):
            ring = rings[which]
            for d in (1, -1):
                perm = list(range(len(slots)))
                for i, v in enumerate(ring):
                    perm[idx[v]] = idx[ring[(i + d) % len(ring)]]
                gens.append(((which, d), tuple(perm)))
        ident = tuple(range(len(slots)))
        tgt = list(ident)
        tgt[idx[a]], tgt[idx[b]] = tgt[idx[b]], tgt[idx[a]]
        word = _bidirectional_search(gens, ident, tuple(tgt))
        self._cache[key] = word
        return word

    def _materialize(self, c1: int, c2: int, a: int, b: int,
                     word: list) -> SwapSchedule:
        rings = (self.grid.ring_of[c1], self.grid.ring_of[c2])
        steps = []
        for which, d in word:
            ring = rings[which]
            steps.append(tuple((ring[i], ring[(i + d) % len(ring)])
                               for i in range(len(ring))))
        region = frozenset(rings[0]) | frozenset(rings[1])
        pos = {v: v for v in region}
        for moves in steps:
            mv = dict(moves)
            pos = {d0: mv.get(v, v) for d0, v in pos.items()}
        net = dict(pos)
        assert net[a] == b and net[b] == a, "schedule is not the transposition"
        assert all(net[v] == v for v in region if v not in (a, b)), \
            "schedule moves a bystander"
        self.c_swap = max(self.c_swap, len(steps))
        return SwapSchedule(region=region,
                            footprint=region | frozenset((c1, c2)),
                            steps=steps, net_permutation=net,
                            centers=(c1, c2))

    def schedule_for_pair(self, a: int, b: int) -> SwapSchedule:
        """Swap schedule for adjacent covered vertices a, b (cached)."""
        key = (min(a, b), max(a, b))
        cached = self._pair_cache.get(key)
        if cached is not None:
            return cached
        if b not in self.grid.adjacency[a]:
            raise ValueError(f"vertices {a}, {b} are not adjacent")
        tried = 0
        for c1, c2 in self._candidate_pairs(a, b):
            word = self._rotation_word(c1, c2, a, b)
            tried += 1
            if word is not None:
                sched = self._materialize(c1, c2, a, b, word)
                self._pair_cache[key] = sched
                return sched
        raise SwapSearchError(
            f"no rotation word for pair ({a}, {b}) after {tried} regions")


def find_swap_schedule(g: TriGrid, hex_a: tuple[int, ...], hex_b: tuple[int, ...],
                       a: int, b: int) -> SwapSchedule:
    """Shortest rotation composition on two given hexagons whose net
    effect transposes the discs at a and b (identity when a == b)."""
    region = frozenset(hex_a) | frozenset(hex_b)
    centers = []
    for ring in (hex_a, hex_b):
        adj = set(range(g.n_vertices))
        for v in ring:
            adj &= set(g.adjacency[v])
        centers.extend(sorted(adj))
    footprint = region | frozenset(centers)
    if a == b:
        return SwapSchedule(region=region, footprint=footprint, steps=[],
                            net_permutation={v: v for v in region},
                            centers=tuple(centers))
    if a not in region or b not in region:
        raise ValueError("a and b must lie inside the two hexagons")
    slots = sorted(region)
    idx = {v: i for i, v in enumerate(slots)}
    gens = []
    for which, ring in ((0, hex_a), (1, hex_b)):
        for d in (1, -1):
            perm = list(range(len(slots)))
            for i, v in enumerate(ring):
                perm[idx[v]] = idx[ring[(i + d) % len(ring)]]
            gens.append(((which, d), tuple(perm)))
    ident = tuple(range(len(slots)))
    tgt = list(ident)
    tgt[idx[a]], tgt[idx[b]] = tgt[idx[b]], tgt[idx[a]]
    word = _bidirectional_search(gens, ident, tuple(tgt))
    if word is None:
        raise SwapSearchError(
            f"no rotation word for ({a}, {b}) on the given hexagons")
    steps = []
    for which, d in word:
        ring = (hex_a, hex_b)[which]
        steps.append(tuple((ring[i], ring[(i + d) % len(ring)])
                           for i in range(len(ring))))
    pos = {v: v for v in region}
    for moves in steps:
        mv = dict(moves)
        pos = {d0: mv.get(v, v) for d0, v in pos.items()}
    return SwapSchedule(region=region, footprint=footprint, steps=steps,
                        net_permutation=pos, centers=tuple(centers))


def _avoid_path(grid: TriGrid, source: int, target: int,
                forbidden: set[int]) -> list[int]:
    """Deterministic shortest path staying off the forbidden set."""
    if source == target:
        return [source]
    prev = {source: -1}
    frontier = [source]
    while frontier and target not in prev:
        nxt = []
        for u in frontier:
            for v in grid.adjacency[u]:
                if v in prev or (v in forbidden and v != target):
                    continue
                prev[v] = u
                nxt.append(v)
        frontier = nxt
    if target not in prev:
        raise SwapSearchError(
            f"no path {source}->{target} avoiding {sorted(forbidden)}")
    path = [target]
    while path[-1] != source:
        path.append(prev[path[-1]])
    path.reverse()
    return path


class _Router:
    """Occupancy state plus plan recording shared by isag and paft.

    Disc ids 0..n_real-1 are the instance robots; higher ids are virtual
    discs standing in for empty vertices.  Steps where only virtual
    discs move are not recorded (physically nothing happens).
    """

    def __init__(self, grid: TriGrid, engine: SwapEngine | None = None):
        self.grid = grid
        self.engine = engine if engine is not None else SwapEngine(grid)
        self.occ = [-1] * grid.n_vertices
        self.pos: list[int] = []
        self.n_real = 0
        self.rows: list[tuple[int, ...]] = []

    def load(self, starts: tuple[int, ...]) -> None:
        self.n_real = len(starts)
        self.pos = list(starts)
        for r, v in enumerate(starts):
            if self.occ[v] != -1:
                raise ValueError("duplicate start vertex")
            self.occ[v] = r
        self.rows = [tuple(starts)]

    def add_virtual(self, v: int) -> int:
        assert self.occ[v] == -1
        d = len(self.pos)
        self.pos.append(v)
        self.occ[v] = d
        return d

    def apply_step(self, moves: list[tuple[int, int]]) -> None:
        if not moves:
            return
        real_moved = False
        discs = []
        for u, _ in moves:
            d = self.occ[u]
            assert d != -1, f"move from empty vertex {u}"
            discs.append(d)
            if d < self.n_real:
                real_moved = True
        for u, _ in moves:
            self.occ[u] = -1
        for (u, v), d in zip(moves, discs):
            assert self.occ[v] == -1, f"two discs target vertex {v}"
            self.occ[v] = d
            self.pos[d] = v
        if real_moved:
            self.rows.append(tuple(self.pos[:self.n_real]))

    def finish(self) -> DiscretePlan:
        return DiscretePlan(steps=self.rows)

    # sequential single-disc machinery (boundary corners)

    def _nearest_hole(self, target: int, forbidden: set[int]) -> int:
        seen = {target}
        frontier = [target]
        while frontier:
            for u in frontier:
                if self.occ[u] == -1 and u not in forbidden:
                    return u
            nxt = []
            for u in frontier:
                for v in self.grid.adjacency[u]:
                    if v not in seen and v not in forbidden:
                        seen.add(v)
                        nxt.append(v)
            frontier = sorted(nxt)
        raise SwapSearchError(f"no reachable hole near {target}")

    def walk_hole(self, hole: int, target: int, forbidden: set[int]) -> None:
        """Move the empty slot to target; passed discs shift one step."""
        path = _avoid_path(self.grid, hole, target, forbidden)
        cur = hole
        for w in path[1:]:
            self.apply_step([(w, cur)])
            cur = w

    def place_disc(self, d: int, target: int, forbidden: set[int]) -> None:
        """Roll disc d to target with single moves, never entering forbidden."""
        while self.pos[d] != target:
            path = _avoid_path(self.grid, self.pos[d], target, forbidden)
            w = path[1]
            protect = forbidden | {self.pos[d]}
            hole = self._nearest_hole(w, protect)
            self.walk_hole(hole, w, protect)
            self.apply_step([(self.pos[d], w)])

    def settle_boundary(self, goals: tuple[int, ...]) -> set[int]:
        """Fix every non-hexagon vertex to its final content.

        Goal owners are rolled in first; remaining such vertices are
        emptied.  At full occupancy any required change is impossible.
        """
        unswappable = sorted(set(range(self.grid.n_vertices)) - self.grid.covered)
        if not unswappable:
            return set()
        owner = {g: r for r, g in enumerate(goals)}
        has_hole = self.n_real < self.grid.n_vertices
        finalized: set[int] = set()
        for u in unswappable:
            if u in owner:
                r = owner[u]
                if self.pos[r] != u:
                    if not has_hole:
                        raise InfeasibleInstanceError(
                            f"full occupancy: vertex {u} lies on no hexagon, its "
                            f"disc can never move")
                    self.place_disc(r, u, finalized)
                finalized.add(u)
        for u in unswappable:
            if u not in owner:
                if self.occ[u] != -1:
                    # a non-goal vertex implies a hole exists somewhere
                    hole = self._nearest_hole(u, finalized)
                    self.walk_hole(hole, u, finalized)
                finalized.add(u)
        return finalized

    # parallel swap machinery

    def _snake(self) -> list[int]:
        order: list[int] = []
        for i, path in enumerate(self.grid.horizontal_paths):
            seq = path if i % 2 == 0 else list(reversed(path))
            order.extend(v for v in seq if v in self.grid.covered)
        assert set(order) == set(self.grid.covered)
        for a, b in zip(order, order[1:]):
            assert b in self.grid.adjacency[a], \
                "snake threading broke at a dropped corner"
        return order

    def _run_rounds(self, snake: list[int], cmp_val, active: list[tuple[int, int]]
                    ) -> None:
        """Odd-even transposition rounds until every interval is clean."""
        if not active:
            return
        max_len = max(hi - lo for lo, hi in active)
        clean_streak = 0
        parity = 0
        rounds = 0
        while clean_streak < 2:
            rounds += 1
            assert rounds <= max_len + 4, "odd-even rounds failed to converge"
            wanted: list[tuple[int, int]] = []
            for lo, hi in active:
                p = lo + ((parity + lo) % 2)
                while p + 1 < hi:
                    if cmp_val(p) > cmp_val(p + 1):
                        wanted.append((snake[p], snake[p + 1]))
                    p += 2
            parity ^= 1
            if not wanted:
                clean_streak += 1
                continue
            clean_streak = 0
            while wanted:
                used: set[int] = set()
                batch: list[SwapSchedule] = []
                deferred: list[tuple[int, int]] = []
                for a, b in wanted:
                    sched = self.engine.schedule_for_pair(a, b)
                    if sched.footprint & used:
                        deferred.append((a, b))
                        continue
                    used |= sched.footprint
                    batch.append(sched)
                depth = max(len(s.steps) for s in batch)
                for i in range(depth):
                    moves = [m for s in batch if i < len(s.steps)
                             for m in s.steps[i]]
                    self.apply_step(moves)
                wanted = deferred

    def sort_covered(self, target_of: dict[int, int]) -> None:
        """Route every disc with a covered target to it by bisection sort."""
        snake = self._snake()
        slot_of = {v: i for i, v in enumerate(snake)}
        key = [0] * len(self.pos)
        for d, tv in target_of.items():
            key[d] = slot_of[tv]

        intervals = [(0, len(snake))]
        while intervals:
            splits = [(lo, hi) for lo, hi in intervals if hi - lo > _LEAF]
            leaves = [(lo, hi) for lo, hi in intervals if hi - lo <= _LEAF]
            mid_at: dict[int, int] = {}
            for lo, hi in splits:
                mid = (lo + hi) // 2
                for p in range(lo, hi):
                    mid_at[p] = mid

            def cmp_val(p: int) -> int:
                k = key[self.occ[snake[p]]]
                mid = mid_at.get(p)
                if mid is None:
                    return k
                return 1 if k >= mid else 0

            self._run_rounds(snake, cmp_val, splits + leaves)
            for lo, hi in leaves:
                for p in range(lo, hi):
                    assert key[self.occ[snake[p]]] == p, "leaf sort incomplete"
            intervals = []
            for lo, hi in splits:
                mid = (lo + hi) // 2
                intervals.extend([(lo, mid), (mid, hi)])

    def greedy_circulations(self, target_of: dict[int, int], cap: int) -> int:
        """Synchronized ring rotations chosen by a goal-distance potential.

        Real discs pull rotations toward their targets; virtual discs are
        free riders.  Stops at the first iteration with no improving ring
        or after cap rounds.
        """
        dist: dict[int, list[int]] = {}
        for d, tv in target_of.items():
            if d < self.n_real:
                dist[d] = bfs_distances(self.grid, tv)
        centers = sorted(self.grid.ring_of)
        done = 0
        for _ in range(cap):
            options = []
            for c in centers:
                ring = self.grid.ring_of[c]
                for dr in (1, -1):
                    gain = 0
                    for i, v in enumerate(ring):
                        dt = dist.get(self.occ[v])
                        if dt is not None:
                            gain += dt[v] - dt[ring[(i + dr) % len(ring)]]
                    if gain > 0:
                        options.append((-gain, c, dr))
            if not options:
                break
            options.sort()
            used: set[int] = set()
            moves: list[tuple[int, int]] = []
            for _, c, dr in options:
                ring = self.grid.ring_of[c]
                fp = set(ring) | {c}
                if fp & used:
                    continue
                used |= fp
                moves.extend((ring[i], ring[(i + dr) % len(ring)])
                             for i in range(len(ring)))
            self.apply_step(moves)
            done += 1
        return done


def _completion_targets(router: _Router, inst: DiscreteInstance
                        ) -> dict[int, int]:
    """Targets for the covered-vertex sort: real goals plus a bijective
    completion for virtual discs (keep the start when possible)."""
    grid = inst.grid
    target_of: dict[int, int] = {}
    used: set[int] = set()
    for r, g in enumerate(inst.v_goals):
        if g in grid.covered:
            target_of[r] = g
            used.add(g)
    holes = [v for v in sorted(grid.covered) if router.occ[v] == -1]
    leftovers = set(v for v in grid.covered if v not in used)
    stay = [v for v in holes if v in leftovers]
    roam = [v for v in holes if v not in leftovers]
    roam_targets = sorted(leftovers - set(stay))
    assert len(roam) == len(roam_targets)
    for v in stay:
        target_of[router.add_virtual(v)] = v
    for v, t in zip(roam, roam_targets):
        target_of[router.add_virtual(v)] = t
    return target_of


def _verify_goals(router: _Router, inst: DiscreteInstance) -> None:
    for r, g in enumerate(inst.v_goals):
        assert router.pos[r] == g, f"robot {r} ended at {router.pos[r]}, not {g}"


def isag(inst: DiscreteInstance, engine: SwapEngine | None = None
         ) -> DiscretePlan:
    """Route the instance by boundary settlement plus bisection sorting.

    Accepts any occupancy up to n = |V|; empty vertices are completed
    with virtual discs so the sort operates on a full permutation.  A
    shared SwapEngine carries warm schedule caches across instances.
    """
    router = _Router(inst.grid, engine)
    router.load(inst.v_starts)
    if tuple(inst.v_starts) == tuple(inst.v_goals):
        return router.finish()
    router.settle_boundary(inst.v_goals)
    target_of = _completion_targets(router, inst)
    router.sort_covered(target_of)
    _verify_goals(router, inst)
    return router.finish()


def max_goal_distance(inst: DiscreteInstance) -> int:
    worst = 0
    for s, g in zip(inst.v_starts, inst.v_goals):
        worst = max(worst, bfs_distances(inst.grid, s)[g])
    return worst


def paft(inst: DiscreteInstance, engine: SwapEngine | None = None
         ) -> tuple[DiscretePlan, PaftReport]:
    """Cell pipeline: partition, circulations toward goal cells, sort."""
    d_g = max_goal_distance(inst)
    if d_g == 0:
        plan = DiscretePlan(steps=[tuple(inst.v_starts)])
        return plan, PaftReport(makespan=0, max_goal_distance=0, ratio=0.0,
                                cell_count=1, circulation_steps=0,
                                swap_constant=0)
    partition = build_cell_partition(inst.grid, d_g)
    router = _Router(inst.grid, engine)
    router.load(inst.v_starts)
    router.settle_boundary(inst.v_goals)
    target_of = _completion_targets(router, inst)
    circ = 0
    if partition.cell_count > 1:
        diameter_cap = 2 * (inst.grid.n_rows + inst.grid.len_even) + 10
        circ = router.greedy_circulations(target_of, cap=diameter_cap)
    router.sort_covered(target_of)
    _verify_goals(router, inst)
    # final per-cell pass: everyone is on an exact goal, cells must agree
    for r, g in enumerate(inst.v_goals):
        assert partition.cell_of[router.pos[r]] == partition.cell_of[g]
    plan = router.finish()
    return plan, PaftReport(makespan=plan.T, max_goal_distance=d_g,
                            ratio=plan.T / max(1, d_g),
                            cell_count=partition.cell_count,
                            circulation_steps=circ,
                            swap_constant=router.engine.c_swap)
