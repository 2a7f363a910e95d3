import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from triroute.discretize import DiscreteInstance
from triroute.geometry import build_grid, build_workspace


@pytest.fixture(scope="session")
def minimal_grid():
    return build_grid(build_workspace(2, 3))


@pytest.fixture(scope="session")
def small_grid():
    return build_grid(build_workspace(3, 3))


@pytest.fixture(scope="session")
def medium_grid():
    return build_grid(build_workspace(4, 5))


def random_discrete_instance(grid, n, seed):
    """n distinct random starts and goals on the grid."""
    rng = random.Random(seed)
    starts = tuple(rng.sample(range(grid.n_vertices), n))
    goals = tuple(rng.sample(range(grid.n_vertices), n))
    return DiscreteInstance(grid=grid, v_starts=starts, v_goals=goals)


def full_occupancy_instance(grid, seed):
    """Every vertex occupied; the permutation fixes vertices that lie on
    no hexagon (anything else is provably unsolvable)."""
    rng = random.Random(seed)
    covered = sorted(grid.covered)
    perm = covered[:]
    rng.shuffle(perm)
    goals = list(range(grid.n_vertices))
    for v, p in zip(covered, perm):
        goals[v] = p
    return DiscreteInstance(grid=grid,
                            v_starts=tuple(range(grid.n_vertices)),
                            v_goals=tuple(goals))
