"""Graph algorithms: SCC decomposition, simple-cycle enumeration, max-mean-cycle
oracle, and the visited-set extended game."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .model import Arena, DEFAULT_GUARDS, Guards, ModelError, ResourceGuardError


@dataclass(frozen=True)
class SccRecord:
    id: int
    vertex_set: frozenset[str]
    is_trivial: bool


def tarjan(vertices: Sequence, successors: Callable) -> list[set]:
    """Iterative Tarjan over an arbitrary successor function.

    Components come out in reverse topological order (a component is emitted
    only after everything it can reach), deterministically for a fixed vertex
    and successor order.
    """
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    sccs: list[set] = []
    counter = [0]

    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = lowlink[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def tarjan_scc(arena: Arena, restrict: Iterable[str] | None = None) -> list[SccRecord]:
    """Maximal SCCs of the arena (optionally of an induced subgraph), in
    reverse topological order."""
    allowed = set(arena.vertices) if restrict is None else set(restrict)
    vertices = [v for v in arena.vertices if v in allowed]

    def succ(v):
        return [d for d in arena.successors(v) if d in allowed]

    records = []
    for i, comp in enumerate(tarjan(vertices, succ)):
        trivial = len(comp) == 1 and all(
            not (e.src in comp and e.dst in comp) for e in (arena.edges[j] for v in comp for j in arena.out_indices(v))
        )
        records.append(SccRecord(i, frozenset(comp), trivial))
    return records


def reachable(arena: Arena, start: str) -> set[str]:
    seen = {start}
    frontier = [start]
    while frontier:
        v = frontier.pop()
        for d in arena.successors(v):
            if d not in seen:
                seen.add(d)
                frontier.append(d)
    return seen


@dataclass(frozen=True)
class CycleRecord:
    """A simple cycle in canonical rotation (lexicographically smallest start)."""

    vertices: tuple[str, ...]
    edge_indices: tuple[int, ...]
    mp0: Fraction
    mp1: Fraction

    @property
    def coordinate(self) -> tuple[Fraction, Fraction]:
        return (self.mp0, self.mp1)


def enumerate_simple_cycles(
    scc: SccRecord, arena: Arena, guards: Guards = DEFAULT_GUARDS
) -> list[CycleRecord]:
    """Every simple cycle of the SCC exactly once up to rotation.

    Parallel edges yield distinct cycles (same vertices, different weights).
    Enumeration starts each cycle at its lexicographically smallest vertex, so
    output order is deterministic.  Exceeding the cycle cap raises
    ResourceGuardError.
    """
    if scc.is_trivial:
        return []
    verts = sorted(scc.vertex_set)
    rank = {v: i for i, v in enumerate(verts)}
    out: dict[str, list[int]] = {v: [] for v in verts}
    for v in verts:
        for i in arena.out_indices(v):
            if arena.edges[i].dst in scc.vertex_set:
                out[v].append(i)
    cycles: list[CycleRecord] = []

    def record(path_vertices, path_edges):
        total0 = sum((arena.edges[i].w0 for i in path_edges), Fraction(0))
        total1 = sum((arena.edges[i].w1 for i in path_edges), Fraction(0))
        n = len(path_edges)
        cycles.append(
            CycleRecord(tuple(path_vertices), tuple(path_edges), total0 / n, total1 / n)
        )
        if len(cycles) > guards.max_cycles:
            raise ResourceGuardError(
                f"simple-cycle enumeration exceeded the cap of {guards.max_cycles}"
            )

    for start in verts:
        path = [start]
        on_path = {start}
        edge_stack: list[int] = []
        iter_stack = [iter(out[start])]
        while iter_stack:
            advanced = False
            for i in iter_stack[-1]:
                dst = arena.edges[i].dst
                if dst == start:
                    record(path, edge_stack + [i])
                    continue
                if dst in on_path or rank[dst] < rank[start]:
                    continue
                path.append(dst)
                on_path.add(dst)
                edge_stack.append(i)
                iter_stack.append(iter(out[dst]))
                advanced = True
                break
            if not advanced:
                iter_stack.pop()
                if edge_stack:
                    edge_stack.pop()
                    on_path.discard(path.pop())
    return cycles


def _karp_extreme(arena: Arena, dimension: int, start: str, maximize: bool) -> Fraction:
    """Karp's algorithm per reachable SCC; extreme mean over reachable cycles."""
    if start not in arena.owners:
        raise ModelError(f"unknown vertex {start!r}")
    reach = reachable(arena, start)
    best: Fraction | None = None
    for scc in tarjan_scc(arena, restrict=reach):
        if scc.is_trivial:
            continue
        verts = sorted(scc.vertex_set)
        pos = {v: i for i, v in enumerate(verts)}
        n = len(verts)
        edges = [
            (pos[e.src], pos[e.dst], e.weight(dimension) if maximize else -e.weight(dimension))
            for v in verts
            for e in (arena.edges[i] for i in arena.out_indices(v))
            if e.dst in scc.vertex_set
        ]
        # F[k][v] = best weight of a k-edge walk from verts[0] to v inside the SCC
        NEG = None
        table = [[NEG] * n for _ in range(n + 1)]
        table[0][0] = Fraction(0)
        for k in range(1, n + 1):
            row = table[k]
            prev = table[k - 1]
            for u, v, w in edges:
                if prev[u] is None:
                    continue
                cand = prev[u] + w
                if row[v] is None or cand > row[v]:
                    row[v] = cand
        value: Fraction | None = None
        for v in range(n):
            if table[n][v] is None:
                continue
            inner = None
            for k in range(n):
                if table[k][v] is None:
                    continue
                ratio = (table[n][v] - table[k][v]) / (n - k)
                if inner is None or ratio < inner:
                    inner = ratio
            if inner is not None and (value is None or inner > value):
                value = inner
        if value is not None:
            cand = value if maximize else -value
            if best is None or (cand > best if maximize else cand < best):
                best = cand
    if best is None:
        raise ModelError(f"no cycle reachable from {start!r}")
    return best


def karp_max_mean(arena: Arena, dimension: int, start: str) -> Fraction:
    """Maximum mean weight over cycles reachable from start, exact."""
    return _karp_extreme(arena, dimension, start, maximize=True)


def karp_min_mean(arena: Arena, dimension: int, start: str) -> Fraction:
    return _karp_extreme(arena, dimension, start, maximize=False)


def extended_vertex_name(vertex: str, visited: frozenset[str]) -> str:
    return f"{vertex}|{{{','.join(sorted(visited))}}}"


@dataclass(frozen=True)
class ExtendedArena:
    """Reachable fragment of the visited-set product game.

    Vertices are (v, P) pairs with P the set of base vertices seen so far;
    along any play the P component only grows, so every SCC lives at a fixed
    P, recoverable through ``visited_of``.
    """

    arena: Arena
    base: Arena
    root: str
    base_vertex: dict[str, str]
    visited: dict[str, frozenset[str]]
    origin_edges: tuple[int, ...]

    def visited_of(self, scc: SccRecord) -> frozenset[str]:
        sets = {self.visited[v] for v in scc.vertex_set}
        assert len(sets) == 1, "an extended SCC has a single visited set"
        return next(iter(sets))

    def to_json(self) -> dict:
        name_index = {v: i for i, v in enumerate(self.arena.vertices)}
        return {
            "root": self.root,
            "vertices": [
                {"v": self.base_vertex[v], "P": sorted(self.visited[v])} for v in self.arena.vertices
            ],
            "edges": [[name_index[e.src], name_index[e.dst]] for e in self.arena.edges],
        }


def build_extended_game(arena: Arena, root: str, guards: Guards = DEFAULT_GUARDS) -> ExtendedArena:
    """Lazily build the fragment of the visited-set game reachable from (root, {root})."""
    if root not in arena.owners:
        raise ModelError(f"unknown vertex {root!r}")
    start = (root, frozenset({root}))
    order: list[tuple[str, frozenset[str]]] = []
    seen = {start}
    frontier = [start]
    while frontier:
        pair = frontier.pop(0)
        order.append(pair)
        if len(order) > guards.max_extended_vertices:
            raise ResourceGuardError(
                f"extended game exceeded {guards.max_extended_vertices} vertices"
            )
        v, visited = pair
        for i in arena.out_indices(v):
            dst = arena.edges[i].dst
            nxt = (dst, visited | {dst})
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    vertices = [(extended_vertex_name(v, p), arena.owners[v]) for v, p in order]
    edges = []
    origin = []
    for v, p in order:
        for i in arena.out_indices(v):
            e = arena.edges[i]
            edges.append(
                (extended_vertex_name(v, p), extended_vertex_name(e.dst, p | {e.dst}), e.w0, e.w1)
            )
            origin.append(i)
    ext = Arena(vertices, edges)
    return ExtendedArena(
        ext,
        arena,
        extended_vertex_name(root, frozenset({root})),
        {extended_vertex_name(v, p): v for v, p in order},
        {extended_vertex_name(v, p): p for v, p in order},
        tuple(origin),
    )
