"""Zero-sum mean-payoff value oracle and the zero-sum robustness check.

The game is interpreted on dimension 0: Player 0 maximizes the liminf mean of
w0, Player 1 minimizes it.  Values come from value iteration run to the
standard pseudopolynomial bound and snapped to the unique cycle mean with
denominator at most |V|; positional optimal strategies are recovered by
guarded enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .model import (
    Arena,
    DEFAULT_GUARDS,
    Guards,
    MealyStrategy,
    ModelError,
    enumerate_memoryless,
    fix_player0_memoryless,
    format_rational,
    perturb_game,
)
from .graphs import karp_max_mean, karp_min_mean


@dataclass(frozen=True)
class ZsValueTable:
    value: Mapping[str, Fraction]
    optimal0: MealyStrategy
    optimal1: MealyStrategy


def _value_iteration(arena: Arena, dimension: int) -> dict[str, Fraction]:
    # clear denominators so the iteration runs on integers
    denom = 1
    for e in arena.edges:
        denom = math.lcm(denom, e.weight(dimension).denominator)
    weights = [int(e.weight(dimension) * denom) for i, e in enumerate(arena.edges)]
    n = len(arena.vertices)
    w_max = max((abs(w) for w in weights), default=0)
    steps = 4 * n**3 * max(w_max, 1) + 1
    current = {v: 0 for v in arena.vertices}
    for _ in range(steps):
        nxt = {}
        for v in arena.vertices:
            options = [weights[i] + current[arena.edges[i].dst] for i in arena.out_indices(v)]
            nxt[v] = max(options) if arena.owners[v] == 0 else min(options)
        current = nxt
    values = {}
    for v in arena.vertices:
        approx = Fraction(current[v], steps)
        values[v] = approx.limit_denominator(n) / denom
    return values


def _fix_player1(arena: Arena, sigma1: MealyStrategy) -> Arena:
    state = sigma1.states[0]
    keep = [i for i, e in enumerate(arena.edges) if arena.owners[e.src] != 1]
    keep += [sigma1.choice(arena, state, v) for v in arena.player_vertices(1)]
    keep.sort()
    return Arena(
        [(v, arena.owners[v]) for v in arena.vertices],
        [(arena.edges[i].src, arena.edges[i].dst, arena.edges[i].w0, arena.edges[i].w1) for i in keep],
    )


def strategy_worst_values(arena: Arena, sigma0: MealyStrategy, dimension: int = 0) -> dict[str, Fraction]:
    """Val(sigma0)(v) for every v: the min mean cycle Player 1 can reach."""
    restricted = fix_player0_memoryless(arena, sigma0)
    return {v: karp_min_mean(restricted, dimension, v) for v in arena.vertices}


def zs_value(arena: Arena, dimension: int = 0, guards: Guards = DEFAULT_GUARDS) -> ZsValueTable:
    """Exact zero-sum values plus positional optimal strategies for both players."""
    values = _value_iteration(arena, dimension)
    optimal0 = None
    for sigma0 in enumerate_memoryless(arena, 0, guards):
        if strategy_worst_values(arena, sigma0, dimension) == values:
            optimal0 = sigma0
            break
    optimal1 = None
    for sigma1 in enumerate_memoryless(arena, 1, guards):
        restricted = _fix_player1(arena, sigma1)
        if {v: karp_max_mean(restricted, dimension, v) for v in arena.vertices} == values:
            optimal1 = sigma1
            break
    if optimal0 is None or optimal1 is None:
        raise ModelError("no positional strategy matches the iterated values; inconsistent arena?")
    return ZsValueTable(values, optimal0, optimal1)


@dataclass(frozen=True)
class EmbeddingReport:
    vertex: str
    c: Fraction
    eps: Fraction
    zs_value: Fraction
    asv_value: Fraction
    zs_exceeds: bool
    asv_exceeds: bool

    @property
    def agree(self) -> bool:
        return self.zs_exceeds == self.asv_exceeds

    def to_json(self) -> dict:
        return {
            "vertex": self.vertex,
            "c": format_rational(self.c),
            "eps": format_rational(self.eps),
            "zs_value": format_rational(self.zs_value),
            "asv_value": format_rational(self.asv_value),
            "zs_exceeds": self.zs_exceeds,
            "asv_exceeds": self.asv_exceeds,
            "agree": self.agree,
        }


def zs_embedding_check(
    arena0: Arena, v: str, c: Fraction, eps: Fraction, guards: Guards = DEFAULT_GUARDS
) -> EmbeddingReport:
    """Embed a single-weighted game as a bi-weighted one with w1 = 0 and compare
    the zero-sum threshold with the ASV^eps threshold."""
    if any(e.w1 != 0 for e in arena0.edges):
        raise ModelError("zs_embedding_check expects w1 = 0 on every edge")
    from .solver import asv_epsilon  # deferred: solver depends on this module's siblings

    c = Fraction(c)
    table = zs_value(arena0, 0, guards)
    asv = asv_epsilon(arena0, v, Fraction(eps), guards=guards)
    return EmbeddingReport(
        v, c, Fraction(eps), table.value[v], asv.value,
        table.value[v] > c, asv.value > c,
    )


@dataclass(frozen=True)
class ZsRobustnessRow:
    sample_index: int
    vertex: str
    base_value: Fraction
    perturbed_value: Fraction
    margin: Fraction  # perturbed - (base - delta); positive iff the bound holds

    def to_json(self) -> dict:
        return {
            "sample": self.sample_index,
            "vertex": self.vertex,
            "base_value": format_rational(self.base_value),
            "perturbed_value": format_rational(self.perturbed_value),
            "margin": format_rational(self.margin),
        }


@dataclass(frozen=True)
class ZsRobustnessReport:
    delta: Fraction
    samples: int
    seed: int
    rows: tuple[ZsRobustnessRow, ...]

    @property
    def min_margin(self) -> Fraction:
        return min(row.margin for row in self.rows)

    @property
    def violations(self) -> int:
        return sum(1 for row in self.rows if row.margin <= 0)

    def to_json(self) -> dict:
        return {
            "delta": format_rational(self.delta),
            "samples": self.samples,
            "seed": self.seed,
            "min_margin": format_rational(self.min_margin),
            "violations": self.violations,
            "rows": [row.to_json() for row in self.rows],
        }


def zs_robustness_check(
    arena: Arena,
    sigma0: MealyStrategy,
    delta: Fraction,
    samples: int,
    seed: int,
    granularity: int = 16,
) -> ZsRobustnessReport:
    """Check the zero-sum robustness bound on sampled perturbations.

    For every sampled H in the +-delta band and every vertex v, Player 1's best
    response to sigma0 in H keeps Player 0 above Val_G(sigma0)(v) - delta.
    Margins are exact; any non-positive margin would falsify the guarantee and
    is counted as a violation.
    """
    delta = Fraction(delta)
    base = strategy_worst_values(arena, sigma0, 0)
    rows = []
    for k in range(samples):
        sample = perturb_game(arena, delta, seed + k, granularity)
        perturbed = strategy_worst_values(sample.arena, sigma0, 0)
        for v in arena.vertices:
            margin = perturbed[v] - (base[v] - delta)
            rows.append(ZsRobustnessRow(k, v, base[v], perturbed[v], margin))
    return ZsRobustnessReport(delta, samples, seed, tuple(rows))
