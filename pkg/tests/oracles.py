"""Independent reference implementations used only to cross-check the solver.

Everything here is deliberately naive (exhaustive DFS, pairwise reachability,
direct interval intersection) and shares no code with the production paths it
checks.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def brute_simple_cycles(arena, vertex_set):
    """All simple cycles inside the vertex set, by naive path extension.

    Returns a list of (vertex tuple, edge index tuple, mp0, mp1) with each
    cycle rotated to start at its smallest vertex.
    """
    verts = sorted(vertex_set)
    results = []

    def extend(path_vertices, path_edges):
        u = path_vertices[-1]
        for i in arena.out_indices(u):
            e = arena.edges[i]
            if e.dst not in vertex_set:
                continue
            if e.dst == path_vertices[0]:
                edges = path_edges + [i]
                total0 = sum((arena.edges[j].w0 for j in edges), Fraction(0))
                total1 = sum((arena.edges[j].w1 for j in edges), Fraction(0))
                results.append(
                    (tuple(path_vertices), tuple(edges), total0 / len(edges), total1 / len(edges))
                )
            elif e.dst not in path_vertices and e.dst > path_vertices[0]:
                extend(path_vertices + [e.dst], path_edges + [i])

    for start in verts:
        extend([start], [])
    return results


def reachability_matrix(arena):
    verts = list(arena.vertices)
    reach = {v: {v} for v in verts}
    changed = True
    while changed:
        changed = False
        for v in verts:
            for w in arena.successors(v):
                new = {w} | reach[w]
                if not new <= reach[v]:
                    reach[v] |= new
                    changed = True
    return reach


def brute_sccs(arena, restrict=None):
    """Maximal SCCs via pairwise mutual reachability."""
    allowed = set(arena.vertices) if restrict is None else set(restrict)
    sub_edges = [
        e for e in arena.edges if e.src in allowed and e.dst in allowed
    ]

    succ = {v: [] for v in allowed}
    for e in sub_edges:
        succ[e.src].append(e.dst)

    def reach_from(v):
        seen = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in succ[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    reach = {v: reach_from(v) for v in allowed}
    comps = []
    assigned = set()
    for v in sorted(allowed):
        if v in assigned:
            continue
        comp = {u for u in allowed if u in reach[v] and v in reach[u]}
        assigned |= comp
        comps.append(frozenset(comp))
    return comps


def hull_feasible(points, c, bound, strict):
    """Is there (x, y) in the convex hull of the points with x <= c and
    y > bound (>= when not strict)?  Computed directly from the point set:
    the best y over the x <= c slice is realized at an input point or where a
    segment between input points crosses x = c."""
    candidates = [p[1] for p in points if p[0] <= c]
    for p, q in itertools.combinations(points, 2):
        if (p[0] - c) * (q[0] - c) < 0:
            t = (c - p[0]) / (q[0] - p[0])
            candidates.append(p[1] + t * (q[1] - p[1]))
    if not candidates:
        return False
    best = max(candidates)
    return best > bound if strict else best >= bound


def point_in_hull(point, points, lp_maximize):
    """Membership in the convex hull via an exact feasibility LP."""
    px, py = point
    n = len(points)
    status, _, _ = lp_maximize(
        [Fraction(0)] * n,
        eq=[
            ([p[0] for p in points], px),
            ([p[1] for p in points], py),
            ([Fraction(1)] * n, Fraction(1)),
        ],
    )
    return status == "optimal"


def interval_feasible(cell, point, variable):
    """Does some value of `variable` satisfy the cell at the fixed point?

    Direct per-constraint interval intersection; no Fourier-Motzkin involved.
    """
    lo, lo_strict = None, False
    hi, hi_strict = None, False
    for con in cell.constraints:
        cmap = con.coeff_map()
        coef = cmap.pop(variable, Fraction(0))
        rest = sum((c * point[v] for v, c in cmap.items()), Fraction(0))
        if coef == 0:
            ok = {
                "<": rest < con.rhs,
                "<=": rest <= con.rhs,
                "=": rest == con.rhs,
                ">=": rest >= con.rhs,
                ">": rest > con.rhs,
            }[con.rel]
            if not ok:
                return False
            continue
        bound = (con.rhs - rest) / coef
        rel = con.rel
        if coef < 0:
            rel = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "=": "="}[rel]
        if rel == "=":
            if (lo is not None and (bound < lo or (bound == lo and lo_strict))) or (
                hi is not None and (bound > hi or (bound == hi and hi_strict))
            ):
                return False
            lo, lo_strict, hi, hi_strict = bound, False, bound, False
        elif rel in ("<", "<="):
            strict = rel == "<"
            if hi is None or bound < hi or (bound == hi and strict):
                if hi is None or bound < hi:
                    hi, hi_strict = bound, strict
                else:
                    hi_strict = hi_strict or strict
        else:
            strict = rel == ">"
            if lo is None or bound > lo or (bound == lo and strict):
                if lo is None or bound > lo:
                    lo, lo_strict = bound, strict
                else:
                    lo_strict = lo_strict or strict
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and (lo_strict or hi_strict)):
            return False
    return True


def simulate_lasso_average(arena, prefix, cycle, steps, resolve=None):
    """Running average after `steps` edges of prefix . cycle^omega."""
    seq_edges = []
    walk = list(prefix) + list(cycle)
    cyc_start = len(prefix)

    def edge_between(u, w):
        if resolve is not None and (u, w) in resolve:
            return resolve[(u, w)]
        for i in arena.out_indices(u):
            if arena.edges[i].dst == w:
                return i
        raise AssertionError(f"no edge {u} -> {w}")

    pos = 0
    total0 = Fraction(0)
    total1 = Fraction(0)
    current = walk[0]
    idx = 0
    for _ in range(steps):
        nxt_idx = idx + 1
        if nxt_idx >= len(walk):
            nxt_idx = cyc_start
        nxt = walk[nxt_idx]
        e = arena.edges[edge_between(current, nxt)]
        total0 += e.w0
        total1 += e.w1
        current, idx = nxt, nxt_idx
    return total0 / steps, total1 / steps
