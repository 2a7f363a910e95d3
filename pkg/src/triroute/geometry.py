"""Workspace and triangular-grid construction.

The workspace is a w-by-h rectangle with w = 4*n1 + 2 and
h = (4/sqrt(3))*n2 + 2.  A triangular lattice with edge length 4/sqrt(3)
is embedded at clearance 1 from the boundary: vertical vertex columns
two units apart (so w - 2 splits into exactly 2*n1 triangle columns),
odd columns shifted half an edge upward, anchored at (1, 1).  With these
dimensions the lattice tiles the inset box [1, w-1] x [1, h-1] exactly:
columns end on x = w - 1 and even columns on y = h - 1, so every point
of the box is within 4/3 (the triangle circumradius) of a grid vertex.
That bound is what makes nearest-vertex snapping injective and safe.
Vertex ids run column-major: left to right, bottom to top inside a
column.

Besides vertices/edges/triangles the grid carries the structures the
planners need: the 60-degree ("sharp") angle list, up to three
interleaving hexagon covers (rings around every degree-6 vertex, grouped
by a 3-coloring of the lattice), and two families of vertex-disjoint
paths: "horizontal" waving paths that cover every vertex, and "vertical"
column-pair waves that miss the rightmost column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

EDGE_LEN = 4.0 / math.sqrt(3.0)   # lattice edge length
ROW_STEP = 2.0                    # spacing between vertex columns
HALF_SHIFT = EDGE_LEN / 2.0       # in-column offset of odd columns
CLEARANCE = 1.0                   # grid-to-boundary clearance
GEO_TOL = 1e-9


class BoundsError(ValueError):
    """Workspace parameters outside the supported range."""


class CoverageError(RuntimeError):
    """Hexagon covers failed to reach a vertex they should cover."""


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def scaled(self, f: float) -> "Vec2":
        return Vec2(self.x * f, self.y * f)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other: "Vec2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y


@dataclass(frozen=True)
class Workspace:
    w: float
    h: float
    n1: int
    n2: int


@dataclass(frozen=True)
class SharpAngle:
    """A 60-degree corner: edges (apex, arm1) and (apex, arm2)."""

    apex: int
    arm1: int
    arm2: int


@dataclass
class TriGrid:
    """Immutable after construction; safe to share across threads."""

    workspace: Workspace
    vertices: list[Vec2]
    adjacency: list[list[int]]            # sorted neighbor ids per vertex
    edges: list[tuple[int, int]]          # (i, j) with i < j, sorted
    triangles: list[tuple[int, int, int]]  # sorted triples, sorted list
    hex_covers: list[list[tuple[int, ...]]] = field(default_factory=list)
    vertical_paths: list[list[int]] = field(default_factory=list)
    horizontal_paths: list[list[int]] = field(default_factory=list)
    # lattice bookkeeping: "row" m is the m-th vertex column (x = 1 + 2m),
    # "col" k is the position inside it (y = 1 + k*edge, odd columns offset)
    row_of: list[int] = field(default_factory=list)
    col_of: list[int] = field(default_factory=list)
    row_start: list[int] = field(default_factory=list)
    row_len: list[int] = field(default_factory=list)
    n_rows: int = 0
    len_even: int = 0
    len_odd: int = 0
    # swap machinery support
    hex_centers: list[list[int]] = field(default_factory=list)  # per cover
    ring_of: dict[int, tuple[int, ...]] = field(default_factory=dict)
    locked: frozenset[int] = frozenset()   # vertices with only sharp edge pairs
    covered: frozenset[int] = frozenset()  # vertices on at least one hexagon

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def vertex_id(self, col: int, row: int) -> int:
        if not (0 <= row < self.n_rows and 0 <= col < self.row_len[row]):
            raise IndexError(f"no vertex at col={col}, row={row}")
        return self.row_start[row] + col

    def has_vertex(self, col: int, row: int) -> bool:
        return 0 <= row < self.n_rows and 0 <= col < self.row_len[row]

    def neighbors(self, vid: int) -> list[int]:
        return self.adjacency[vid]


def build_workspace(n1: int, n2: int) -> Workspace:
    """Workspace with w = 4*n1 + 2, h = (4/sqrt(3))*n2 + 2."""
    if n1 < 2 or n2 < 3:
        raise BoundsError(f"need n1 >= 2 and n2 >= 3, got n1={n1}, n2={n2}")
    return Workspace(w=4.0 * n1 + 2.0, h=EDGE_LEN * n2 + 2.0, n1=n1, n2=n2)


def triangle_circumradius() -> float:
    """Center-to-vertex distance of a lattice triangle (side/sqrt(3))."""
    return EDGE_LEN / math.sqrt(3.0)


def density_limit() -> float:
    """Asymptotic fraction of free space occupied by unit discs packed
    on a triangular pattern with pitch 8/3."""
    return (math.pi / 2.0) / (0.5 * (8.0 / 3.0) * EDGE_LEN)


def _axial(col: int, row: int) -> tuple[int, int]:
    # lattice basis e1=(EDGE_LEN, 0), e2=(HALF_SHIFT, ROW_STEP)
    return col - row // 2, row


def _color(col: int, row: int) -> int:
    a, b = _axial(col, row)
    return (a - b) % 3


def build_grid(ws: Workspace) -> TriGrid:
    """Deterministic triangular grid for the workspace.

    Keeps every lattice point inside [1, w-1] x [1, h-1] (1e-9 tie
    tolerance).  Identical inputs produce bit-identical grids.
    """
    x_lo, x_hi = CLEARANCE, ws.w - CLEARANCE
    y_lo, y_hi = CLEARANCE, ws.h - CLEARANCE

    cols: list[list[float]] = []
    col_i = 0
    while True:
        x = x_lo + ROW_STEP * col_i
        if x > x_hi + GEO_TOL:
            break
        off = HALF_SHIFT if col_i % 2 else 0.0
        ys = []
        k = 0
        while True:
            y = y_lo + off + EDGE_LEN * k
            if y > y_hi + GEO_TOL:
                break
            ys.append(y)
            k += 1
        cols.append(ys)
        col_i += 1

    n_rows = len(cols)
    vertices: list[Vec2] = []
    row_start, row_len, row_of, col_of = [], [], [], []
    for m, ys in enumerate(cols):
        row_start.append(len(vertices))
        row_len.append(len(ys))
        for k, y in enumerate(ys):
            vertices.append(Vec2(x_lo + ROW_STEP * m, y))
            row_of.append(m)
            col_of.append(k)

    grid = TriGrid(
        workspace=ws,
        vertices=vertices,
        adjacency=[[] for _ in vertices],
        edges=[],
        triangles=[],
        row_of=row_of,
        col_of=col_of,
        row_start=row_start,
        row_len=row_len,
        n_rows=n_rows,
        len_even=row_len[0],
        len_odd=row_len[1] if n_rows > 1 else 0,
    )

    # adjacency: same row +-1 col; row above/below at col offsets given by parity
    edges = set()
    for vid in range(len(vertices)):
        m, k = row_of[vid], col_of[vid]
        cand = [(k - 1, m), (k + 1, m)]
        if m % 2 == 0:
            cand += [(k - 1, m - 1), (k, m - 1), (k - 1, m + 1), (k, m + 1)]
        else:
            cand += [(k, m - 1), (k + 1, m - 1), (k, m + 1), (k + 1, m + 1)]
        for ck, cm in cand:
            if grid.has_vertex(ck, cm):
                u = grid.vertex_id(ck, cm)
                grid.adjacency[vid].append(u)
                edges.add((min(vid, u), max(vid, u)))
    for lst in grid.adjacency:
        lst.sort()
    grid.edges = sorted(edges)

    # triangles = 3-cliques
    tris = []
    adj_sets = [set(a) for a in grid.adjacency]
    for i, j in grid.edges:
        for k in sorted(adj_sets[i] & adj_sets[j]):
            if k > j:
                tris.append((i, j, k))
    grid.triangles = sorted(tris)

    _attach_hex_covers(grid)
    _attach_path_families(grid)
    return grid


def enumerate_sharp_angles(g: TriGrid) -> list[SharpAngle]:
    """All 60-degree corners: three per triangle, one at each vertex."""
    out = []
    for i, j, k in g.triangles:
        out.append(SharpAngle(apex=i, arm1=j, arm2=k))
        out.append(SharpAngle(apex=j, arm1=i, arm2=k))
        out.append(SharpAngle(apex=k, arm1=i, arm2=j))
    return out


def _ring(g: TriGrid, center: int) -> tuple[int, ...]:
    """The hexagon around a degree-6 vertex, ordered counterclockwise."""
    c = g.vertices[center]
    nbrs = g.adjacency[center]
    ordered = sorted(nbrs, key=lambda v: math.atan2(g.vertices[v].y - c.y,
                                                    g.vertices[v].x - c.x))
    return tuple(ordered)


def _locked_vertices(g: TriGrid) -> frozenset[int]:
    """Vertices all of whose incident edge pairs meet at 60 degrees.

    These are boundary corners of the embedding; no hexagon (or any
    turn-free cycle) passes through them.
    """
    locked = set()
    for vid in range(g.n_vertices):
        nbrs = g.adjacency[vid]
        p = g.vertices[vid]
        wide = False
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                u = g.vertices[nbrs[i]] - p
                w = g.vertices[nbrs[j]] - p
                cosang = u.dot(w) / (u.norm() * w.norm())
                if cosang < 0.5 - 1e-6:  # angle > 60 degrees
                    wide = True
        if not wide:
            locked.add(vid)
    return frozenset(locked)


def build_hex_covers(g: TriGrid) -> list[list[tuple[int, ...]]]:
    """Up to three interleaving hexagon covers.

    Hexagons are the 6-cycles around degree-6 vertices; covers group them
    by the 3-coloring of ring centers.  Together they reach every vertex
    except the sharp boundary corners (which lie on no hexagon at all).
    """
    by_color: list[list[int]] = [[], [], []]
    for vid in range(g.n_vertices):
        if len(g.adjacency[vid]) == 6:
            by_color[_color(g.col_of[vid], g.row_of[vid])].append(vid)

    covers, centers = [], []
    ring_of = {}
    covered: set[int] = set()
    for color in range(3):
        if not by_color[color]:
            continue
        cov = []
        for c in sorted(by_color[color]):
            ring = _ring(g, c)
            cov.append(ring)
            ring_of[c] = ring
            covered.update(ring)
        covers.append(cov)
        centers.append(sorted(by_color[color]))

    locked = _locked_vertices(g)
    missing = set(range(g.n_vertices)) - covered - set(locked)
    if missing:
        raise CoverageError(
            f"hexagon covers miss non-corner vertices {sorted(missing)}")

    g.hex_centers = centers
    g.ring_of = ring_of
    g.locked = locked
    g.covered = frozenset(covered)
    return covers


def _attach_hex_covers(g: TriGrid) -> None:
    g.hex_covers = build_hex_covers(g)


def _attach_path_families(g: TriGrid) -> None:
    """Horizontal waving paths (cover everything; the last one widens to
    absorb the long even columns) and vertical column-pair waves (miss
    the rightmost column, since the column count 2*n1 + 1 is odd)."""
    le, lo, nrows = g.len_even, g.len_odd, g.n_rows

    full_cover: list[list[int]] = []
    if lo == le:
        plain_cols = le
    else:
        plain_cols = lo - 1  # last columns handled by a wide snake
    for k in range(plain_cols):
        full_cover.append([g.vertex_id(k, m) for m in range(nrows)])
    if lo != le:
        # wide wave over slots lo-1 (all columns) and le-1 (even columns)
        wide = [g.vertex_id(lo - 1, 0), g.vertex_id(le - 1, 0),
                g.vertex_id(lo - 1, 1)]
        m = 2
        while m < nrows:
            wide.append(g.vertex_id(le - 1, m))
            wide.append(g.vertex_id(lo - 1, m))
            if m + 1 < nrows:
                wide.append(g.vertex_id(lo - 1, m + 1))
            m += 2
        full_cover.append(wide)
    g.horizontal_paths = full_cover

    vertical: list[list[int]] = []
    for base in range(0, nrows - 1, 2):
        wave = []
        for k in range(g.row_len[base + 1]):
            wave.append(g.vertex_id(k, base))
            wave.append(g.vertex_id(k, base + 1))
        if g.row_len[base] > g.row_len[base + 1]:
            wave.append(g.vertex_id(g.row_len[base] - 1, base))
        vertical.append(wave)
    g.vertical_paths = vertical

    for fam in (g.vertical_paths, g.horizontal_paths):
        for path in fam:
            for a, b in zip(path, path[1:]):
                assert b in g.adjacency[a], "path family not a grid path"


def nearest_vertex(g: TriGrid, p: Vec2) -> int:
    """Closest grid vertex to p; ties broken by lowest vertex id.

    Constant time: candidate columns/slots come from lattice-coordinate
    rounding (a 3x3 index neighborhood, clamped to the grid).
    """
    best: tuple[float, int] | None = None
    mf = (p.x - CLEARANCE) / ROW_STEP
    m0 = round(mf)
    for m in (m0 - 1, m0, m0 + 1):
        if not (0 <= m < g.n_rows):
            continue
        off = HALF_SHIFT if m % 2 else 0.0
        kf = (p.y - CLEARANCE - off) / EDGE_LEN
        k0 = round(kf)
        for k in (k0 - 1, k0, k0 + 1):
            kk = min(max(k, 0), g.row_len[m] - 1)
            vid = g.vertex_id(kk, m)
            d = g.vertices[vid].dist(p)
            if best is None or d < best[0] - GEO_TOL or (
                    abs(d - best[0]) <= GEO_TOL and vid < best[1]):
                best = (d, vid)
    assert best is not None
    return best[1]


def bfs_distances(g: TriGrid, source: int) -> list[int]:
    """Hop distances from source to every vertex (-1 if unreachable)."""
    dist = [-1] * g.n_vertices
    dist[source] = 0
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for v in g.adjacency[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def bfs_path(g: TriGrid, source: int, target: int) -> list[int]:
    """A shortest path, deterministic (lowest-id parent wins)."""
    if source == target:
        return [source]
    dist = bfs_distances(g, source)
    if dist[target] < 0:
        raise ValueError("target unreachable")
    path = [target]
    cur = target
    while cur != source:
        cur = min(v for v in g.adjacency[cur] if dist[v] == dist[cur] - 1)
        path.append(cur)
    path.reverse()
    return path
