import random
from fractions import Fraction

import pytest

from stackmp import Arena, parse_game


RUNNING_TEXT = """\
vertex v0 0
vertex v1 1
vertex v2 1
vertex v3 0
vertex v4 0
vertex v5 0
vertex v6 0
edge v0 v1 0 0
edge v0 v2 0 0
edge v1 v3 0 0
edge v1 v4 0 0
edge v2 v5 0 0
edge v2 v6 0 0
edge v3 v3 10 10
edge v4 v4 0 9
edge v5 v5 8 9
edge v6 v6 4 5
"""

TRADEOFF_TEXT = """\
vertex v0 1
vertex v1 0
vertex v2 0
edge v0 v1 1 1
edge v0 v2 0 1
edge v1 v1 0 2
edge v1 v0 1 1
edge v2 v2 0 1
"""

LOOP_TEXT = "vertex a 0\nedge a a 3 5\n"


@pytest.fixture
def running() -> Arena:
    return parse_game(RUNNING_TEXT)


@pytest.fixture
def tradeoff() -> Arena:
    return parse_game(TRADEOFF_TEXT)


@pytest.fixture
def loop() -> Arena:
    return parse_game(LOOP_TEXT)


def random_arena(
    rng: random.Random,
    n_vertices: int | None = None,
    max_out: int = 2,
    weight_bound: int = 4,
) -> Arena:
    """Small random bi-weighted arena; every vertex keeps an out-edge."""
    n = n_vertices or rng.randint(2, 4)
    names = [f"u{i}" for i in range(n)]
    vertices = [(v, rng.randint(0, 1)) for v in names]
    edges = []
    for v in names:
        for _ in range(rng.randint(1, max_out)):
            edges.append(
                (
                    v,
                    rng.choice(names),
                    rng.randint(-weight_bound, weight_bound),
                    rng.randint(-weight_bound, weight_bound),
                )
            )
    return Arena(vertices, edges)


def random_rational(rng: random.Random, lo: int = -6, hi: int = 6, max_den: int = 4) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(lo * den, hi * den), den)
