"""Named example games, parametric ones integer-scaled with the factor recorded."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .model import Arena, ModelError
from .solver import make_partition_game


@dataclass(frozen=True)
class Fixture:
    name: str
    arena: Arena
    scale: int
    params: Mapping[str, Fraction]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "scale": self.scale,
            "params": {k: str(v) for k, v in self.params.items()},
            "arena": self.arena.to_json(),
        }


def _scaled_arena(vertices, weighted_edges) -> tuple[Arena, int]:
    """Clear denominators so the game file stays integral."""
    scale = 1
    for _, _, w0, w1 in weighted_edges:
        scale = math.lcm(scale, Fraction(w0).denominator, Fraction(w1).denominator)
    edges = [(s, d, Fraction(w0) * scale, Fraction(w1) * scale) for s, d, w0, w1 in weighted_edges]
    return Arena(vertices, edges), scale


def running_example() -> Fixture:
    """Seven-vertex game where maximizing against exact best responses is fragile."""
    arena = Arena(
        [("v0", 0), ("v1", 1), ("v2", 1), ("v3", 0), ("v4", 0), ("v5", 0), ("v6", 0)],
        [
            ("v0", "v1", 0, 0),
            ("v0", "v2", 0, 0),
            ("v1", "v3", 0, 0),
            ("v1", "v4", 0, 0),
            ("v2", "v5", 0, 0),
            ("v2", "v6", 0, 0),
            ("v3", "v3", 10, 10),
            ("v4", "v4", 0, 9),
            ("v5", "v5", 8, 9),
            ("v6", "v6", 4, 5),
        ],
    )
    return Fixture("running", arena, 1, {})


def running_example_perturbed() -> Fixture:
    """Hand-written sample from the 0.6-band around the running example: the
    two left loops move to 9.55 and 9.45, flipping Follower's preference."""
    arena, scale = _scaled_arena(
        [("v0", 0), ("v1", 1), ("v2", 1), ("v3", 0), ("v4", 0), ("v5", 0), ("v6", 0)],
        [
            ("v0", "v1", 0, 0),
            ("v0", "v2", 0, 0),
            ("v1", "v3", 0, 0),
            ("v1", "v4", 0, 0),
            ("v2", "v5", 0, 0),
            ("v2", "v6", 0, 0),
            ("v3", "v3", 10, Fraction(189, 20)),  # 9.45
            ("v4", "v4", 0, Fraction(191, 20)),  # 9.55
            ("v5", "v5", 8, 9),
            ("v6", "v6", 4, 5),
        ],
    )
    return Fixture("running-perturbed", arena, scale, {})


def fragile_game(mu: Fraction, iota: Fraction) -> Fixture:
    """Two one-shot loops: the adversarial value collapses under perturbation."""
    mu, iota = Fraction(mu), Fraction(iota)
    if mu <= 0 or iota <= 0:
        raise ModelError("mu and iota must be positive")
    arena, scale = _scaled_arena(
        [("v0", 1), ("v1", 0), ("v2", 0)],
        [
            ("v0", "v1", 0, 0),
            ("v0", "v2", 0, 0),
            ("v1", "v1", -2 * mu, 1 - iota / 2),
            ("v2", "v2", 0, 1),
        ],
    )
    return Fixture("fragile", arena, scale, {"mu": mu, "iota": iota})


def fragile_perturbed(mu: Fraction) -> Fixture:
    """Hand-written perturbation of the fragile game: both loops now tie for Follower."""
    mu = Fraction(mu)
    arena, scale = _scaled_arena(
        [("v0", 1), ("v1", 0), ("v2", 0)],
        [
            ("v0", "v1", 0, 0),
            ("v0", "v2", 0, 0),
            ("v1", "v1", -2 * mu, 1),
            ("v2", "v2", 0, 1),
        ],
    )
    return Fixture("fragile-perturbed", arena, scale, {"mu": mu})


def imprecision_game(mu_prime: Fraction, delta: Fraction) -> Fixture:
    """All-Follower game separating the two robustness notions."""
    mu_prime, delta = Fraction(mu_prime), Fraction(delta)
    arena, scale = _scaled_arena(
        [("v1", 1), ("v2", 1)],
        [
            ("v1", "v1", mu_prime, 2 * delta),
            ("v1", "v2", 0, 0),
            ("v2", "v2", 0, 0),
            ("v2", "v1", 0, 0),
        ],
    )
    return Fixture("imprecision", arena, scale, {"mu_prime": mu_prime, "delta": delta})


def asv_example() -> Fixture:
    """Three-vertex game whose value is 1 - eps; finite memory attains it."""
    arena = Arena(
        [("v0", 1), ("v1", 0), ("v2", 0)],
        [
            ("v0", "v1", 1, 1),
            ("v0", "v2", 0, 1),
            ("v1", "v1", 0, 2),
            ("v1", "v0", 1, 1),
            ("v2", "v2", 0, 1),
        ],
    )
    return Fixture("tradeoff", arena, 1, {})


def needs_infinite_memory(eps: Fraction) -> Fixture:
    """Leader needs unbounded memory to hit the value exactly; the loop reward
    depends on the tolerance, so the fixture is generated per eps."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ModelError("eps must be positive")
    arena, scale = _scaled_arena(
        [("v0", 1), ("v1", 0), ("v2", 0)],
        [
            ("v0", "v0", 2, 0),
            ("v0", "v1", 0, 0),
            ("v0", "v2", 0, 1),
            ("v1", "v1", 0, 2 + 2 * eps),
            ("v1", "v0", 0, 0),
            ("v2", "v2", 0, 1),
        ],
    )
    return Fixture("needs-inf-memory", arena, scale, {"eps": eps})


def follower_needs_infinite_memory() -> Fixture:
    """No finite-memory tolerance-optimal response exists for Follower here."""
    arena = Arena(
        [("v0", 0), ("v1", 1), ("v2", 0)],
        [
            ("v0", "v0", 0, 3),
            ("v0", "v1", 0, 0),
            ("v0", "v2", 0, 0),
            ("v1", "v1", 3, 0),
            ("v1", "v0", 0, 0),
            ("v2", "v2", 1, 0),
        ],
    )
    return Fixture("follower-memory", arena, 1, {})


def single_loop() -> Fixture:
    arena = Arena([("a", 0)], [("a", "a", 3, 5)])
    return Fixture("loop", arena, 1, {})


def partition_fixture(values) -> Fixture:
    pg = make_partition_game(values)
    return Fixture("partition", pg.arena, pg.scale, {f"a{i}": Fraction(a) for i, a in enumerate(pg.values, 1)})


def build_fixture(name: str, **params) -> Fixture:
    builders: dict[str, Callable[..., Fixture]] = {
        "running": running_example,
        "running-perturbed": running_example_perturbed,
        "fragile": lambda: fragile_game(params.get("mu", Fraction(1)), params.get("iota", Fraction(1, 8))),
        "fragile-perturbed": lambda: fragile_perturbed(params.get("mu", Fraction(1))),
        "imprecision": lambda: imprecision_game(
            params.get("mu_prime", Fraction(100)), params.get("delta", Fraction(1, 2))
        ),
        "tradeoff": asv_example,
        "needs-inf-memory": lambda: needs_infinite_memory(params.get("eps", Fraction(1, 4))),
        "follower-memory": follower_needs_infinite_memory,
        "loop": single_loop,
        "partition": lambda: partition_fixture(params.get("values", (1, 2, 3))),
    }
    name = FIXTURE_ALIASES.get(name, name)
    if name not in builders:
        raise ModelError(f"unknown fixture {name!r}; known: {', '.join(sorted(builders))}")
    return builders[name]()


FIXTURE_NAMES = (
    "fragile",
    "fragile-perturbed",
    "follower-memory",
    "imprecision",
    "loop",
    "needs-inf-memory",
    "partition",
    "running",
    "running-perturbed",
    "tradeoff",
)

# short figure-style aliases, handy when cross-referencing plotted write-ups
FIXTURE_ALIASES = {
    "fig1": "running",
    "fig2": "fragile",
    "fig3": "fragile-perturbed",
    "fig4": "imprecision",
    "fig5": "tradeoff",
    "fig7": "needs-inf-memory",
    "fig8": "partition",
}
