"""Deciding when Follower can punish: per-vertex badness and the full region
of punishable threshold pairs.

A vertex is bad for a pair (c, d) at tolerance eps when Follower can force,
from it, a play with MP0 <= c and MP1 > d - eps (strict variant) or MP1 >= d
(closed variant).  Two independent routes answer the question: a flow LP over
each strongly connected piece of the Leader-restricted graph (point queries)
and an exact region construction by quantifier elimination (whole regions).
Tests require the two to agree everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import (
    Arena,
    DEFAULT_GUARDS,
    Guards,
    MealyStrategy,
    ModelError,
    enumerate_memoryless,
    fix_player0_memoryless,
)
from .graphs import SccRecord, enumerate_simple_cycles, reachable, tarjan_scc
from .geometry import (
    Cell,
    Region,
    canonical_region,
    fm_eliminate,
    fmin_closure,
    lincon,
    region_intersect,
    region_union,
    full_region,
    empty_region,
)
from . import lp

SYMBOLIC = None  # eps left as a region variable


@dataclass(frozen=True)
class BadnessQuery:
    """Can Follower force MP0 <= c and MP1 > d - eps (or >= d) from the vertex?"""

    vertex: str
    c: Fraction
    d: Fraction
    eps: Fraction
    strict_second: bool = True

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "d", Fraction(self.d))
        object.__setattr__(self, "eps", Fraction(self.eps))
        if self.strict_second and self.eps <= 0:
            raise ModelError("the strict variant needs eps > 0")
        if not self.strict_second and self.eps != 0:
            raise ModelError("the closed variant takes eps = 0")

    @property
    def bound(self) -> Fraction:
        return self.d - self.eps


@dataclass(frozen=True)
class MulticycleLP:
    """Flow program over an SCC's edges: conservation at every vertex,
    chi >= 0, total mass 1, with the payoff rows attached per query."""

    scc: SccRecord
    edge_indices: tuple[int, ...]
    flow_eq: tuple[tuple[tuple[Fraction, ...], Fraction], ...]
    w0_row: tuple[Fraction, ...]
    w1_row: tuple[Fraction, ...]


def multicycle_lp(scc: SccRecord, arena: Arena) -> MulticycleLP:
    if scc.is_trivial:
        raise ModelError("trivial SCC has no multicycle")
    edge_indices = [
        i
        for i, e in enumerate(arena.edges)
        if e.src in scc.vertex_set and e.dst in scc.vertex_set
    ]
    m = len(edge_indices)
    eq = []
    for v in sorted(scc.vertex_set):
        row = [Fraction(0)] * m
        for k, i in enumerate(edge_indices):
            e = arena.edges[i]
            if e.dst == v:
                row[k] += 1
            if e.src == v:
                row[k] -= 1
        eq.append((tuple(row), Fraction(0)))
    eq.append((tuple([Fraction(1)] * m), Fraction(1)))  # normalize: sums are means
    w0 = tuple(arena.edges[i].w0 for i in edge_indices)
    w1 = tuple(arena.edges[i].w1 for i in edge_indices)
    return MulticycleLP(scc, tuple(edge_indices), tuple(eq), w0, w1)


def multicycle_feasible(scc: SccRecord, arena1p: Arena, q: BadnessQuery) -> bool:
    """Does the SCC admit a normalized multicycle with mean w0 <= c and mean
    w1 above the bound?  Exact: maximize the w1 mean under the other
    constraints and compare against the bound with the query's strictness."""
    prog = multicycle_lp(scc, arena1p)
    status, best, _ = lp.lp_maximize(
        list(prog.w1_row),
        eq=[(list(r), rhs) for r, rhs in prog.flow_eq],
        ub=[(list(prog.w0_row), q.c)],
    )
    if status != lp.OPTIMAL:
        return False
    return best > q.bound if q.strict_second else best >= q.bound


def _restricted_sccs(arena: Arena, sigma0: MealyStrategy, start: str) -> tuple[Arena, list[SccRecord]]:
    restricted = fix_player0_memoryless(arena, sigma0)
    reach = reachable(restricted, start)
    sccs = [s for s in tarjan_scc(restricted, restrict=reach) if not s.is_trivial]
    return restricted, sccs


def defends(arena: Arena, sigma0: MealyStrategy, q: BadnessQuery) -> bool:
    """Polynomial-time certificate check: with the Leader fixed to this
    memoryless strategy, no SCC reachable from the query vertex lets Follower
    realize MP0 <= c with MP1 above the bound."""
    restricted, sccs = _restricted_sccs(arena, sigma0, q.vertex)
    return not any(multicycle_feasible(scc, restricted, q) for scc in sccs)


def find_punishing(arena: Arena, q: BadnessQuery, guards: Guards = DEFAULT_GUARDS):
    """First memoryless Leader strategy that defends the query, or None.

    Searching memoryless strategies only is exact: when Leader can win the
    complementary disjunction at all, a memoryless strategy suffices.
    """
    if q.vertex not in arena.owners:
        raise ModelError(f"unknown vertex {q.vertex!r}")
    for sigma0 in enumerate_memoryless(arena, 0, guards):
        if defends(arena, sigma0, q):
            return sigma0
    return None


def is_bad_vertex(arena: Arena, q: BadnessQuery, guards: Guards = DEFAULT_GUARDS) -> bool:
    """Point query: true iff no memoryless Leader strategy defends the vertex."""
    return find_punishing(arena, q, guards) is None


def _scc_punish_cell(
    arena: Arena,
    scc: SccRecord,
    eps: Fraction | None,
    strict_second: bool,
    guards: Guards,
) -> Cell:
    """The (c, d[, eps]) pairs Follower realizes inside one SCC: relax the
    mean-payoff cell with x <= c and the shifted bound on y, then project x, y
    away."""
    cycles = enumerate_simple_cycles(scc, arena, guards)
    base = fmin_closure([c.coordinate for c in cycles]).cells[0]
    rel = ">" if strict_second else ">="
    if eps is SYMBOLIC:
        second = lincon({"y": 1, "d": -1, "eps": 1}, rel, 0)
    else:
        second = lincon({"y": 1, "d": -1}, rel, -Fraction(eps))
    cell = Cell(base.constraints + (lincon({"x": 1, "c": -1}, "<=", 0), second))
    return fm_eliminate(fm_eliminate(cell, "x"), "y")


def lambda_region(
    arena: Arena,
    v: str,
    eps: Fraction | None,
    strict_second: bool = True,
    guards: Guards = DEFAULT_GUARDS,
) -> Region:
    """The full region of pairs (c, d) for which the vertex is bad.

    Intersection over memoryless Leader strategies of the union, over SCCs
    reachable in the restricted graph, of that SCC's realizable relaxation.
    Pass eps=None to keep eps as a region variable (constraints stay linear in
    it); the region then carries eps > 0.
    """
    if v not in arena.owners:
        raise ModelError(f"unknown vertex {v!r}")
    if eps is not SYMBOLIC:
        eps = Fraction(eps)
        if strict_second and eps <= 0:
            raise ModelError("the strict variant needs eps > 0")
        if not strict_second and eps != 0:
            raise ModelError("the closed variant takes eps = 0")
    variables = ("c", "d") if eps is not SYMBOLIC else ("c", "d", "eps")
    acc = full_region(variables)
    for sigma0 in enumerate_memoryless(arena, 0, guards):
        restricted, sccs = _restricted_sccs(arena, sigma0, v)
        cells = [
            _scc_punish_cell(restricted, scc, eps, strict_second, guards) for scc in sccs
        ]
        branch = canonical_region(Region(variables, tuple(cells)))
        acc = region_intersect(acc, branch)
        if acc.is_empty():
            return acc
    if eps is SYMBOLIC:
        acc = region_intersect(
            acc, Region(variables, (Cell((lincon({"eps": 1}, ">", 0),)),))
        )
    return acc
