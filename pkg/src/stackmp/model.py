"""Game model: arenas, strategies, lassos, perturbations, and the game file format.

Every scalar is an exact rational (``fractions.Fraction``).  Game files carry
integer weights; all derived quantities (cycle means, thresholds, epsilon,
delta, perturbed weights) stay rational end to end -- no floating point
anywhere in solver paths.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Rational = Fraction

PLAYER0 = 0  # Leader (maximizes dimension 0)
PLAYER1 = 1  # Follower (maximizes dimension 1)


class GameFormatError(ValueError):
    """Malformed game file."""


class ModelError(ValueError):
    """Invalid model-level input: bad query, missing choice, non-edge step."""


class ResourceGuardError(RuntimeError):
    """A configured resource guard tripped; raised instead of hanging."""


class CertificateError(RuntimeError):
    """A certificate failed re-verification; indicates a solver bug."""


@dataclass(frozen=True)
class Guards:
    """Caps for the constructions that are exponential in the worst case."""

    max_cycles: int = 100_000
    max_extended_vertices: int = 4096
    max_memoryless: int = 100_000


DEFAULT_GUARDS = Guards()


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q' or an integer string into an exact rational."""
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ModelError(f"not a rational: {text!r}") from exc
    return value


def format_rational(value) -> str:
    if value == math.inf:
        return "+inf"
    if value == -math.inf:
        return "-inf"
    return str(Fraction(value))


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    w0: Fraction
    w1: Fraction

    def weight(self, dimension: int) -> Fraction:
        return self.w0 if dimension == 0 else self.w1


class Arena:
    """Finite bi-weighted game graph with a vertex ownership partition.

    Parallel edges between the same vertex pair are allowed (they occur in the
    partition-problem games); edges are therefore identified by index.
    Instances are immutable after construction.
    """

    __slots__ = ("vertices", "owners", "edges", "_out", "max_abs_weight")

    def __init__(self, vertices: Sequence[tuple[str, int]], edges: Sequence[tuple]):
        names = []
        owners = {}
        for name, owner in vertices:
            if name in owners:
                raise GameFormatError(f"duplicate vertex name: {name}")
            if owner not in (0, 1):
                raise GameFormatError(f"owner of {name} must be 0 or 1, got {owner}")
            names.append(name)
            owners[name] = owner
        edge_objs = []
        out: dict[str, list[int]] = {name: [] for name in names}
        for src, dst, w0, w1 in edges:
            if src not in owners:
                raise GameFormatError(f"edge source {src!r} is not a declared vertex")
            if dst not in owners:
                raise GameFormatError(f"edge target {dst!r} is not a declared vertex")
            out[src].append(len(edge_objs))
            edge_objs.append(Edge(src, dst, Fraction(w0), Fraction(w1)))
        for name in names:
            if not out[name]:
                raise GameFormatError(f"vertex with no outgoing edge: {name}")
        self.vertices = tuple(names)
        self.owners = owners
        self.edges = tuple(edge_objs)
        self._out = {name: tuple(idxs) for name, idxs in out.items()}
        w = Fraction(0)
        for e in edge_objs:
            w = max(w, abs(e.w0), abs(e.w1))
        self.max_abs_weight = w

    def owner(self, v: str) -> int:
        return self.owners[v]

    def out_indices(self, v: str) -> tuple[int, ...]:
        return self._out[v]

    def out_edges(self, v: str) -> list[Edge]:
        return [self.edges[i] for i in self._out[v]]

    def successors(self, v: str) -> list[str]:
        return [self.edges[i].dst for i in self._out[v]]

    def player_vertices(self, player: int) -> list[str]:
        return [v for v in self.vertices if self.owners[v] == player]

    def has_integer_weights(self) -> bool:
        return all(e.w0.denominator == 1 and e.w1.denominator == 1 for e in self.edges)

    def with_weights(self, w0: Sequence[Fraction], w1: Sequence[Fraction]) -> "Arena":
        """Same graph, new weights (used for perturbed games and rescaling)."""
        if len(w0) != len(self.edges) or len(w1) != len(self.edges):
            raise ModelError("weight vectors must cover every edge")
        return Arena(
            [(v, self.owners[v]) for v in self.vertices],
            [(e.src, e.dst, w0[i], w1[i]) for i, e in enumerate(self.edges)],
        )

    def to_json(self) -> dict:
        return {
            "vertices": [{"name": v, "owner": self.owners[v]} for v in self.vertices],
            "edges": [
                {"src": e.src, "dst": e.dst, "w0": format_rational(e.w0), "w1": format_rational(e.w1)}
                for e in self.edges
            ],
        }

    def __eq__(self, other):
        return (
            isinstance(other, Arena)
            and self.vertices == other.vertices
            and self.owners == other.owners
            and self.edges == other.edges
        )

    def __repr__(self):
        return f"Arena({len(self.vertices)} vertices, {len(self.edges)} edges, W={self.max_abs_weight})"


def parse_game(text: str) -> Arena:
    """Parse the line-based game format.

    Lines: ``# comment`` | ``vertex <name> <0|1>`` | ``edge <src> <dst> <w0> <w1>``
    with integer weights.
    """
    vertices: list[tuple[str, int]] = []
    edges: list[tuple] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        kind = tokens[0]
        if kind == "vertex":
            if len(tokens) != 3:
                raise GameFormatError(f"line {lineno}: expected 'vertex <name> <0|1>'")
            name, owner = tokens[1], tokens[2]
            if owner not in ("0", "1"):
                raise GameFormatError(f"line {lineno}: owner must be 0 or 1")
            vertices.append((name, int(owner)))
        elif kind == "edge":
            if len(tokens) != 5:
                raise GameFormatError(f"line {lineno}: expected 'edge <src> <dst> <w0> <w1>'")
            try:
                w0, w1 = int(tokens[3]), int(tokens[4])
            except ValueError:
                raise GameFormatError(f"line {lineno}: weights must be integers") from None
            edges.append((tokens[1], tokens[2], w0, w1))
        else:
            raise GameFormatError(f"line {lineno}: unknown directive {kind!r}")
    try:
        return Arena(vertices, edges)
    except GameFormatError:
        raise


def emit_game(arena: Arena) -> str:
    """Byte-stable inverse of parse_game; requires integer weights."""
    if not arena.has_integer_weights():
        raise ModelError("game files carry integer weights only")
    lines = [f"vertex {v} {arena.owners[v]}" for v in arena.vertices]
    lines += [f"edge {e.src} {e.dst} {int(e.w0)} {int(e.w1)}" for e in arena.edges]
    return "\n".join(lines) + "\n"


class MealyStrategy:
    """Finite-state deterministic strategy for one player.

    The machine state summarizes the history before the current vertex: at
    vertex ``v`` in state ``s`` the player moves along ``choices[s][v]`` (an
    edge index), and the state updates to ``transitions[s][v]`` (missing
    entries keep the state).  A memoryless strategy is the 1-state special
    case.
    """

    __slots__ = ("player", "initial", "transitions", "choices", "states")

    def __init__(
        self,
        player: int,
        initial: str,
        transitions: Mapping[str, Mapping[str, str]],
        choices: Mapping[str, Mapping[str, int]],
    ):
        if player not in (0, 1):
            raise ModelError("player must be 0 or 1")
        states = set(transitions) | set(choices) | {initial}
        for table in transitions.values():
            states.update(table.values())
        if initial not in states:
            raise ModelError("initial state missing")
        self.player = player
        self.initial = initial
        self.transitions = {s: dict(transitions.get(s, {})) for s in states}
        self.choices = {s: dict(choices.get(s, {})) for s in states}
        self.states = tuple(sorted(states))

    @property
    def is_memoryless(self) -> bool:
        return len(self.states) == 1

    def next_state(self, state: str, vertex: str) -> str:
        return self.transitions.get(state, {}).get(vertex, state)

    def choice(self, arena: Arena, state: str, vertex: str) -> int:
        table = self.choices.get(state, {})
        if vertex not in table:
            raise ModelError(f"strategy has no choice at ({state!r}, {vertex!r})")
        idx = table[vertex]
        if not (0 <= idx < len(arena.edges)) or arena.edges[idx].src != vertex:
            raise ModelError(f"choice at ({state!r}, {vertex!r}) is not an edge out of {vertex!r}")
        return idx

    @classmethod
    def memoryless(cls, arena: Arena, player: int, choice_by_vertex: Mapping[str, int | str]) -> "MealyStrategy":
        """Build a 1-state strategy; values are edge indices or (unambiguous) successor names."""
        table = {}
        for v, target in choice_by_vertex.items():
            table[v] = _resolve_choice(arena, v, target)
        return cls(player, "s", {"s": {}}, {"s": table})

    def to_json(self) -> dict:
        return {
            "player": self.player,
            "initial": self.initial,
            "transitions": {s: dict(t) for s, t in self.transitions.items() if t},
            "choices": {s: dict(c) for s, c in self.choices.items() if c},
        }

    @classmethod
    def from_json(cls, data: dict, arena: Arena | None = None) -> "MealyStrategy":
        strat = cls(
            int(data["player"]),
            str(data["initial"]),
            {s: {v: str(t) for v, t in table.items()} for s, table in data.get("transitions", {}).items()},
            {
                s: {v: (c if isinstance(c, int) else _resolve_choice(arena, v, c))
                    for v, c in table.items()}
                for s, table in data.get("choices", {}).items()
            },
        )
        return strat


def _resolve_choice(arena: Arena | None, vertex: str, target: int | str) -> int:
    if isinstance(target, int):
        return target
    if arena is None:
        raise ModelError("an arena is required to resolve successor-name choices")
    candidates = [i for i in arena.out_indices(vertex) if arena.edges[i].dst == target]
    if not candidates:
        raise ModelError(f"no edge {vertex} -> {target}")
    if len(candidates) > 1:
        raise ModelError(f"ambiguous parallel edges {vertex} -> {target}; use an edge index")
    return candidates[0]


def _resolve_step(arena: Arena, src: str, dst: str, edge_index: int | None) -> int:
    if edge_index is not None:
        e = arena.edges[edge_index]
        if e.src != src or e.dst != dst:
            raise ModelError(f"edge index {edge_index} is not {src} -> {dst}")
        return edge_index
    candidates = [i for i in arena.out_indices(src) if arena.edges[i].dst == dst]
    if not candidates:
        raise ModelError(f"non-edge transition {src} -> {dst}")
    if len(candidates) > 1:
        raise ModelError(f"ambiguous parallel edges {src} -> {dst}; pass explicit edge indices")
    return candidates[0]


def _resolve_walk(arena: Arena, vertices: Sequence[str], closing: bool, edge_indices=None) -> list[int]:
    steps = len(vertices) if closing else len(vertices) - 1
    resolved = []
    for k in range(steps):
        src = vertices[k]
        dst = vertices[(k + 1) % len(vertices)]
        idx = None if edge_indices is None else edge_indices[k]
        resolved.append(_resolve_step(arena, src, dst, idx))
    return resolved


def lasso_payoff(
    arena: Arena,
    prefix: Sequence[str],
    cycle: Sequence[str],
    prefix_edges: Sequence[int] | None = None,
    cycle_edges: Sequence[int] | None = None,
) -> tuple[Fraction, Fraction]:
    """Exact mean payoff pair of the play prefix . cycle^omega.

    The prefix never contributes: liminf equals limsup for an eventually
    periodic play and both equal the cycle mean.  Edge indices disambiguate
    parallel edges; without them any ambiguous step is an error.
    """
    if not cycle:
        raise ModelError("lasso cycle must be non-empty")
    walk = list(prefix) + [cycle[0]] if prefix else []
    if prefix:
        pfx_edges = list(prefix_edges) + [None] if prefix_edges is not None else None
        _resolve_walk(arena, walk, closing=False, edge_indices=pfx_edges)
    cyc = _resolve_walk(arena, list(cycle), closing=True, edge_indices=cycle_edges)
    total0 = sum((arena.edges[i].w0 for i in cyc), Fraction(0))
    total1 = sum((arena.edges[i].w1 for i in cyc), Fraction(0))
    return total0 / len(cyc), total1 / len(cyc)


@dataclass(frozen=True)
class Lasso:
    """Eventually periodic play with its exact mean payoff pair."""

    prefix: tuple[str, ...]
    cycle: tuple[str, ...]
    payoff0: Fraction
    payoff1: Fraction
    prefix_edges: tuple[int, ...] = ()
    cycle_edges: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {
            "prefix": list(self.prefix),
            "cycle": list(self.cycle),
            "payoff0": format_rational(self.payoff0),
            "payoff1": format_rational(self.payoff1),
        }


def make_lasso(
    arena: Arena,
    prefix: Sequence[str],
    cycle: Sequence[str],
    prefix_edges: Sequence[int] | None = None,
    cycle_edges: Sequence[int] | None = None,
) -> Lasso:
    if not cycle:
        raise ModelError("lasso cycle must be non-empty")
    if prefix:
        walk = list(prefix) + [cycle[0]]
        pfx = _resolve_walk(
            arena, walk, closing=False,
            edge_indices=(list(prefix_edges) + [None]) if prefix_edges is not None else None,
        )
    else:
        pfx = []
    cyc = _resolve_walk(arena, list(cycle), closing=True, edge_indices=cycle_edges)
    p0, p1 = lasso_payoff(arena, prefix, cycle, prefix_edges, cycle_edges)
    return Lasso(tuple(prefix), tuple(cycle), p0, p1, tuple(pfx), tuple(cyc))


@dataclass(frozen=True)
class PerturbedSample:
    """One sampled game from the +-delta band around a base arena.

    Each perturbed weight is w + (j/granularity)*delta for a uniformly random
    integer j strictly between -granularity and granularity, so every weight
    stays strictly inside the open delta-band and remains rational.
    """

    base: Arena
    delta: Fraction
    granularity: int
    rng_seed: int
    perturbed_w0: tuple[Fraction, ...]
    perturbed_w1: tuple[Fraction, ...]

    @property
    def arena(self) -> Arena:
        return self.base.with_weights(self.perturbed_w0, self.perturbed_w1)


def perturb_game(arena: Arena, delta: Fraction, seed: int, granularity: int = 16) -> PerturbedSample:
    delta = Fraction(delta)
    if delta <= 0:
        raise ModelError("delta must be positive")
    if granularity < 1:
        raise ModelError("granularity must be >= 1")
    rng = random.Random(seed)
    w0 = []
    w1 = []
    for e in arena.edges:
        j0 = rng.randint(-(granularity - 1), granularity - 1) if granularity > 1 else 0
        j1 = rng.randint(-(granularity - 1), granularity - 1) if granularity > 1 else 0
        w0.append(e.w0 + Fraction(j0, granularity) * delta)
        w1.append(e.w1 + Fraction(j1, granularity) * delta)
    return PerturbedSample(arena, delta, granularity, seed, tuple(w0), tuple(w1))


def enumerate_memoryless(arena: Arena, player: int, guards: Guards = DEFAULT_GUARDS):
    """Yield every memoryless strategy of the player, guarded by the product of
    out-degrees over the player's vertices."""
    import itertools

    verts = arena.player_vertices(player)
    count = 1
    for v in verts:
        count *= len(arena.out_indices(v))
        if count > guards.max_memoryless:
            raise ResourceGuardError(
                f"memoryless strategy count exceeds {guards.max_memoryless}"
            )
    for combo in itertools.product(*(arena.out_indices(v) for v in verts)):
        yield MealyStrategy.memoryless(arena, player, dict(zip(verts, combo)))


def fix_player0_memoryless(arena: Arena, sigma0: MealyStrategy) -> Arena:
    """Restrict every Player-0 vertex to its chosen edge; Player 1 keeps all options."""
    if sigma0.player != 0:
        raise ModelError("expected a Player-0 strategy")
    if not sigma0.is_memoryless:
        raise ModelError("expected a memoryless (1-state) strategy")
    state = sigma0.states[0]
    keep = []
    for i, e in enumerate(arena.edges):
        if arena.owners[e.src] != 0:
            keep.append(i)
    for v in arena.player_vertices(0):
        keep.append(sigma0.choice(arena, state, v))
    keep.sort()
    return Arena(
        [(v, arena.owners[v]) for v in arena.vertices],
        [(arena.edges[i].src, arena.edges[i].dst, arena.edges[i].w0, arena.edges[i].w1) for i in keep],
    )


@dataclass(frozen=True)
class ProductArena:
    """Arena x strategy product: a one-player game for the opponent."""

    arena: Arena
    base: Arena
    start: str
    base_vertex: Mapping[str, str]
    origin_edges: tuple[int, ...]


def product_vertex_name(vertex: str, state: str) -> str:
    return f"{vertex}@{state}"


def product_with_strategy(arena: Arena, sigma0: MealyStrategy, start: str | None = None) -> ProductArena:
    """Product of the arena with a finite-memory strategy of either player.

    Vertices are (vertex, state) pairs reachable from the start (or from every
    vertex paired with the initial state when no start is given); vertices
    owned by the strategy's player have out-degree 1.
    """
    seeds = [(start, sigma0.initial)] if start is not None else [(v, sigma0.initial) for v in arena.vertices]
    if start is not None and start not in arena.owners:
        raise ModelError(f"unknown start vertex {start!r}")
    order: list[tuple[str, str]] = []
    seen = set()
    frontier = list(seeds)
    while frontier:
        pair = frontier.pop(0)
        if pair in seen:
            continue
        seen.add(pair)
        order.append(pair)
        v, s = pair
        if arena.owners[v] == sigma0.player:
            indices = [sigma0.choice(arena, s, v)]
        else:
            indices = list(arena.out_indices(v))
        ns = sigma0.next_state(s, v)
        for i in indices:
            frontier.append((arena.edges[i].dst, ns))
    vertices = [(product_vertex_name(v, s), arena.owners[v]) for v, s in order]
    edges = []
    origin = []
    for v, s in order:
        if arena.owners[v] == sigma0.player:
            indices = [sigma0.choice(arena, s, v)]
        else:
            indices = list(arena.out_indices(v))
        ns = sigma0.next_state(s, v)
        for i in indices:
            e = arena.edges[i]
            edges.append((product_vertex_name(v, s), product_vertex_name(e.dst, ns), e.w0, e.w1))
            origin.append(i)
    product = Arena(vertices, edges)
    base_vertex = {product_vertex_name(v, s): v for v, s in order}
    start_name = product_vertex_name(*seeds[0]) if start is not None else product_vertex_name(*order[0])
    return ProductArena(product, arena, start_name, base_vertex, tuple(origin))
