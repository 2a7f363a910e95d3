"""Instance generators: dense triangular packings and random placements."""

from __future__ import annotations

import math
import random

from .discretize import SEPARATION, ContinuousInstance
from .geometry import Vec2, Workspace


class GenerationError(RuntimeError):
    """Could not place the requested number of discs."""


def dense_points(ws: Workspace, strict: bool = True) -> list[Vec2]:
    """Triangular packing of the inset box at pitch 8/3 (+1e-6 when strict,
    since the separation requirement is a strict inequality)."""
    pitch = SEPARATION + (1e-6 if strict else 0.0)
    row_h = pitch * math.sqrt(3.0) / 2.0
    pts = []
    y = 1.0
    row = 0
    while y <= ws.h - 1.0 + 1e-12:
        x = 1.0 + (pitch / 2.0 if row % 2 else 0.0)
        while x <= ws.w - 1.0 + 1e-12:
            pts.append(Vec2(x, y))
            x += pitch
        y += row_h
        row += 1
    return pts


def dense_instance(ws: Workspace, count: int, seed: int,
                   strict: bool = True) -> ContinuousInstance:
    """First `count` packing positions; goals are the same positions under
    a seeded random relabeling."""
    pts = dense_points(ws, strict=strict)
    if count > len(pts):
        raise GenerationError(
            f"workspace fits {len(pts)} discs at pitch 8/3, wanted {count}")
    starts = pts[:count]
    rng = random.Random(seed)
    perm = list(range(count))
    rng.shuffle(perm)
    goals = [starts[perm[i]] for i in range(count)]
    return ContinuousInstance(workspace=ws, starts=tuple(starts),
                              goals=tuple(goals))


def _sample_config(ws: Workspace, count: int, rng: random.Random,
                   attempts: int) -> list[Vec2]:
    pts: list[Vec2] = []
    budget = attempts
    while len(pts) < count:
        if budget <= 0:
            raise GenerationError(
                f"rejection sampling exhausted after {attempts} attempts "
                f"({len(pts)}/{count} placed)")
        budget -= 1
        p = Vec2(rng.uniform(1.0, ws.w - 1.0), rng.uniform(1.0, ws.h - 1.0))
        if all(p.dist(q) > SEPARATION + 1e-9 for q in pts):
            pts.append(p)
    return pts


def random_instance(ws: Workspace, count: int, seed: int,
                    attempts: int = 20000) -> ContinuousInstance:
    """Rejection-sampled starts and goals at pairwise separation > 8/3."""
    rng = random.Random(seed)
    starts = _sample_config(ws, count, rng, attempts)
    goals = _sample_config(ws, count, rng, attempts)
    return ContinuousInstance(workspace=ws, starts=tuple(starts),
                              goals=tuple(goals))
