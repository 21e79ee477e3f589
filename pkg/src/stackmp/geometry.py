"""Exact polyhedral machinery over a small named-variable set.

Regions are finite unions of convex cells; a cell is a conjunction of linear
constraints with first-class strictness.  Everything is exact: Fourier-Motzkin
projection, emptiness, canonicalization, supremum extraction, convex hulls and
the pointwise-min closure all run on rationals with no tolerance anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .model import ModelError

Point2 = tuple[Fraction, Fraction]

RELATIONS = ("<", "<=", "=", ">=", ">")


@dataclass(frozen=True)
class LinearConstraint:
    """sum(coeff * var) REL rhs, coefficients sorted by variable name."""

    coeffs: tuple[tuple[str, Fraction], ...]
    rel: str
    rhs: Fraction

    def coeff_map(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    def evaluate(self, point: Mapping[str, Fraction]) -> bool:
        lhs = sum((c * point[v] for v, c in self.coeffs), Fraction(0))
        if self.rel == "<":
            return lhs < self.rhs
        if self.rel == "<=":
            return lhs <= self.rhs
        if self.rel == "=":
            return lhs == self.rhs
        if self.rel == ">=":
            return lhs >= self.rhs
        return lhs > self.rhs

    def variables(self) -> set[str]:
        return {v for v, _ in self.coeffs}

    def pretty(self) -> str:
        if not self.coeffs:
            return f"0 {self.rel} {self.rhs}"
        coeffs, rel, rhs = self.coeffs, self.rel, self.rhs
        # flip an all-negative inequality for readability: -c <= 0 becomes c >= 0
        if rel in ("<", "<=") and all(c < 0 for _, c in coeffs):
            coeffs = tuple((v, -c) for v, c in coeffs)
            rhs = -rhs
            rel = ">" if rel == "<" else ">="
        parts = []
        for v, c in coeffs:
            if c == 1:
                term = v
            elif c == -1:
                term = f"-{v}"
            else:
                term = f"{c}*{v}"
            parts.append(term if not parts else (f"+ {term}" if c > 0 else f"- {term.lstrip('-')}"))
        return f"{' '.join(parts)} {rel} {rhs}"

    def to_json(self) -> dict:
        return {"coef": {v: str(c) for v, c in self.coeffs}, "rel": self.rel, "rhs": str(self.rhs)}


def lincon(coeffs: Mapping[str, object], rel: str, rhs) -> LinearConstraint:
    if rel not in RELATIONS:
        raise ModelError(f"unknown relation {rel!r}")
    items = tuple(sorted((v, Fraction(c)) for v, c in coeffs.items() if Fraction(c) != 0))
    return LinearConstraint(items, rel, Fraction(rhs))


@dataclass(frozen=True)
class Cell:
    """Conjunction of constraints; denotes a convex (possibly open) set."""

    constraints: tuple[LinearConstraint, ...]

    def evaluate(self, point: Mapping[str, Fraction]) -> bool:
        return all(c.evaluate(point) for c in self.constraints)

    def variables(self) -> set[str]:
        out = set()
        for c in self.constraints:
            out |= c.variables()
        return out

    def pretty(self) -> str:
        return "{" + " & ".join(c.pretty() for c in self.constraints) + "}" if self.constraints else "{true}"


@dataclass(frozen=True)
class Region:
    """Finite union of cells over a shared ordered variable list."""

    variables: tuple[str, ...]
    cells: tuple[Cell, ...]

    def evaluate(self, point: Mapping[str, Fraction]) -> bool:
        return any(cell.evaluate(point) for cell in self.cells)

    def is_empty(self) -> bool:
        return not self.cells

    def pretty(self) -> str:
        return " | ".join(cell.pretty() for cell in self.cells) if self.cells else "{false}"

    def to_json(self) -> dict:
        return {
            "vars": list(self.variables),
            "cells": [[c.to_json() for c in cell.constraints] for cell in self.cells],
        }


def region(variables: Sequence[str], cells: Iterable[Cell]) -> Region:
    return canonical_region(Region(tuple(variables), tuple(cells)))


def full_region(variables: Sequence[str]) -> Region:
    return Region(tuple(variables), (Cell(()),))


def empty_region(variables: Sequence[str]) -> Region:
    return Region(tuple(variables), ())


# ---------------------------------------------------------------------------
# Row form: sum(coeffs * var) <= rhs (strict flag for <).  Equalities expand to
# two rows.  All Fourier-Motzkin work happens on rows.

Row = tuple[tuple[tuple[str, Fraction], ...], Fraction, bool]


def _row(coeffs: Mapping[str, Fraction], rhs: Fraction, strict: bool) -> Row:
    items = tuple(sorted((v, c) for v, c in coeffs.items() if c != 0))
    return (items, rhs, strict)


def _normalize_row(row: Row) -> Row:
    coeffs, rhs, strict = row
    if not coeffs:
        return row
    denom_lcm = 1
    for _, c in coeffs:
        denom_lcm = math.lcm(denom_lcm, c.denominator)
    denom_lcm = math.lcm(denom_lcm, rhs.denominator)
    ints = [int(c * denom_lcm) for _, c in coeffs] + [int(rhs * denom_lcm)]
    g = 0
    for value in ints:
        g = math.gcd(g, abs(value))
    scale = Fraction(denom_lcm, g if g else 1)
    return (
        tuple((v, c * scale) for v, c in coeffs),
        rhs * scale,
        strict,
    )


def _constraint_rows(con: LinearConstraint) -> list[Row]:
    coeffs = con.coeff_map()
    neg = {v: -c for v, c in coeffs.items()}
    if con.rel == "<=":
        return [_row(coeffs, con.rhs, False)]
    if con.rel == "<":
        return [_row(coeffs, con.rhs, True)]
    if con.rel == ">=":
        return [_row(neg, -con.rhs, False)]
    if con.rel == ">":
        return [_row(neg, -con.rhs, True)]
    return [_row(coeffs, con.rhs, False), _row(neg, -con.rhs, False)]


def _cell_rows(cell: Cell) -> list[Row]:
    rows = []
    for con in cell.constraints:
        rows.extend(_constraint_rows(con))
    return rows


def _rows_ground_consistent(rows: Iterable[Row]) -> bool:
    for coeffs, rhs, strict in rows:
        if not coeffs and (rhs < 0 or (strict and rhs == 0)):
            return False
    return True


def _prune_rows(rows: Iterable[Row]) -> list[Row]:
    """Drop trivially-true grounds and keep the tightest row per direction."""
    best: dict[tuple, tuple[Fraction, bool]] = {}
    grounds: list[Row] = []
    for row in rows:
        coeffs, rhs, strict = _normalize_row(row)
        if not coeffs:
            if rhs < 0 or (strict and rhs == 0):
                grounds.append((coeffs, rhs, strict))
            continue
        key = coeffs
        if key not in best:
            best[key] = (rhs, strict)
        else:
            rhs0, strict0 = best[key]
            if rhs < rhs0 or (rhs == rhs0 and strict and not strict0):
                best[key] = (rhs, strict)
    out = grounds + [(k, rhs, strict) for k, (rhs, strict) in best.items()]
    out.sort(key=lambda r: (r[0], r[1], r[2]))
    return out


def _eliminate_rows(rows: list[Row], var: str) -> list[Row]:
    lowers = []  # rows normalized to  -var + expr <= rhs   (expr <= rhs + var)
    uppers = []  # rows normalized to   var + expr <= rhs
    rest = []
    for coeffs, rhs, strict in rows:
        a = dict(coeffs).get(var)
        if a is None:
            rest.append((coeffs, rhs, strict))
            continue
        scaled = {v: c / abs(a) for v, c in coeffs if v != var}
        scaled_rhs = rhs / abs(a)
        if a > 0:
            uppers.append((scaled, scaled_rhs, strict))
        else:
            lowers.append((scaled, scaled_rhs, strict))
    out = list(rest)
    for lo_coeffs, lo_rhs, lo_strict in lowers:
        for up_coeffs, up_rhs, up_strict in uppers:
            combined = dict(lo_coeffs)
            for v, c in up_coeffs.items():
                combined[v] = combined.get(v, Fraction(0)) + c
            out.append(_row(combined, lo_rhs + up_rhs, lo_strict or up_strict))
    return _prune_rows(out)


def _rows_empty(rows: list[Row], variables: Sequence[str] | None = None) -> bool:
    rows = _prune_rows(rows)
    if not _rows_ground_consistent(rows):
        return True
    if variables is None:
        seen = set()
        for coeffs, _, _ in rows:
            seen.update(v for v, _ in coeffs)
        variables = sorted(seen)
    for var in variables:
        rows = _eliminate_rows(rows, var)
        if not _rows_ground_consistent(rows):
            return True
    return not _rows_ground_consistent(rows)


def _negation_rows(con: LinearConstraint) -> list[list[Row]]:
    """Rows of each disjunct of NOT(con)."""
    coeffs = con.coeff_map()
    neg = {v: -c for v, c in coeffs.items()}
    if con.rel == "<=":
        return [[_row(neg, -con.rhs, True)]]
    if con.rel == "<":
        return [[_row(neg, -con.rhs, False)]]
    if con.rel == ">=":
        return [[_row(coeffs, con.rhs, True)]]
    if con.rel == ">":
        return [[_row(coeffs, con.rhs, False)]]
    return [[_row(coeffs, con.rhs, True)], [_row(neg, -con.rhs, True)]]


def negate_constraint(con: LinearConstraint) -> list[LinearConstraint]:
    flipped = {"<=": ">", "<": ">=", ">=": "<", ">": "<="}
    if con.rel in flipped:
        return [LinearConstraint(con.coeffs, flipped[con.rel], con.rhs)]
    return [
        LinearConstraint(con.coeffs, "<", con.rhs),
        LinearConstraint(con.coeffs, ">", con.rhs),
    ]


def fm_eliminate(cell: Cell, drop: str) -> Cell:
    """Exact projection of the cell along one variable (Fourier-Motzkin).

    Strictness propagates: a combination is strict when either side is.
    """
    rows = _eliminate_rows(_prune_rows(_cell_rows(cell)), drop)
    return _rows_to_cell(rows)


def _rows_to_cell(rows: list[Row]) -> Cell:
    rows = _prune_rows(rows)
    # pair non-strict opposite rows into equalities
    by_key = {coeffs: (rhs, strict) for coeffs, rhs, strict in rows}
    used = set()
    constraints = []
    for coeffs, rhs, strict in rows:
        if coeffs in used:
            continue
        if not coeffs:
            constraints.append(LinearConstraint((), "<" if strict else "<=", rhs))
            used.add(coeffs)
            continue
        mirror = tuple((v, -c) for v, c in coeffs)
        if not strict and mirror in by_key:
            m_rhs, m_strict = by_key[mirror]
            if not m_strict and m_rhs == -rhs:
                lead_positive = coeffs[0][1] > 0
                eq = coeffs if lead_positive else mirror
                eq_rhs = rhs if lead_positive else -rhs
                constraints.append(LinearConstraint(eq, "=", eq_rhs))
                used.add(coeffs)
                used.add(mirror)
                continue
        constraints.append(LinearConstraint(coeffs, "<" if strict else "<=", rhs))
        used.add(coeffs)
    constraints.sort(key=lambda c: (c.rel != "=", c.coeffs, c.rel, c.rhs))
    return Cell(tuple(constraints))


def cell_is_empty(cell: Cell) -> bool:
    return _rows_empty(_cell_rows(cell))


def _implied(rows: list[Row], con: LinearConstraint) -> bool:
    """True when the rows imply the constraint (every disjunct of NOT con is empty)."""
    return all(_rows_empty(rows + neg) for neg in _negation_rows(con))


def cell_canonical(cell: Cell) -> Cell | None:
    """Equivalent cell with primitive constraints and no redundancy; None if empty."""
    rows = _prune_rows(_cell_rows(cell))
    if _rows_empty(rows):
        return None
    merged = _rows_to_cell(rows)
    kept = list(merged.constraints)
    changed = True
    while changed:
        changed = False
        for i, con in enumerate(list(kept)):
            others = kept[:i] + kept[i + 1 :]
            other_rows = []
            for c in others:
                other_rows.extend(_constraint_rows(c))
            if _implied(other_rows, con):
                kept = others
                changed = True
                break
    kept.sort(key=lambda c: (c.rel != "=", c.coeffs, c.rel, c.rhs))
    return Cell(tuple(kept))


def _cell_subsumed(inner: Cell, outer: Cell) -> bool:
    rows = _prune_rows(_cell_rows(inner))
    return all(_implied(rows, con) for con in outer.constraints)


def canonical_region(reg: Region) -> Region:
    cells = []
    seen = set()
    for cell in reg.cells:
        canon = cell_canonical(cell)
        if canon is None:
            continue
        if canon.constraints in seen:
            continue
        seen.add(canon.constraints)
        cells.append(canon)
    # subsumption pass: drop any cell contained in another surviving cell
    survivors: list[Cell] = []
    removed = [False] * len(cells)
    for i, cell in enumerate(cells):
        for j, other in enumerate(cells):
            if i == j or removed[j]:
                continue
            if _cell_subsumed(cell, other):
                if _cell_subsumed(other, cell) and i < j:
                    continue  # mutual containment: keep the earlier cell
                removed[i] = True
                break
        if not removed[i]:
            survivors.append(cell)
    survivors.sort(key=lambda c: tuple((x.coeffs, x.rel, x.rhs) for x in c.constraints))
    return Region(reg.variables, tuple(survivors))


def _check_vars(a: Region, b: Region):
    if a.variables != b.variables:
        raise ModelError(f"variable lists differ: {a.variables} vs {b.variables}")


def region_union(a: Region, b: Region) -> Region:
    _check_vars(a, b)
    return canonical_region(Region(a.variables, a.cells + b.cells))


def region_intersect(a: Region, b: Region) -> Region:
    _check_vars(a, b)
    cells = []
    for ca in a.cells:
        for cb in b.cells:
            cells.append(Cell(ca.constraints + cb.constraints))
    return canonical_region(Region(a.variables, tuple(cells)))


def region_complement(a: Region) -> Region:
    """Exact complement with relation flipping (De Morgan over the cells)."""
    acc = full_region(a.variables)
    for cell in a.cells:
        pieces = []
        for con in cell.constraints:
            for neg in negate_constraint(con):
                pieces.append(Cell((neg,)))
        if not cell.constraints:
            return empty_region(a.variables)
        acc = region_intersect(acc, Region(a.variables, tuple(pieces)))
        if acc.is_empty():
            return acc
    return acc


def region_substitute(reg: Region, var: str, value: Fraction) -> Region:
    value = Fraction(value)
    if var not in reg.variables:
        raise ModelError(f"{var} not in region variables")
    new_vars = tuple(v for v in reg.variables if v != var)
    cells = []
    for cell in reg.cells:
        cons = []
        for con in cell.constraints:
            cmap = con.coeff_map()
            coef = cmap.pop(var, Fraction(0))
            cons.append(lincon(cmap, con.rel, con.rhs - coef * value))
        cells.append(Cell(tuple(cons)))
    return canonical_region(Region(new_vars, tuple(cells)))


def region_rename(reg: Region, old: str, new: str) -> Region:
    if old not in reg.variables:
        raise ModelError(f"{old} not in region variables")
    if new in reg.variables:
        raise ModelError(f"{new} already in region variables")
    new_vars = tuple(new if v == old else v for v in reg.variables)
    cells = []
    for cell in reg.cells:
        cons = []
        for con in cell.constraints:
            cmap = {(new if v == old else v): c for v, c in con.coeffs}
            cons.append(lincon(cmap, con.rel, con.rhs))
        cells.append(Cell(tuple(cons)))
    return Region(new_vars, tuple(cells))


def region_lift(reg: Region, variables: Sequence[str]) -> Region:
    missing = set(reg.variables) - set(variables)
    if missing:
        raise ModelError(f"lift must keep existing variables, missing {missing}")
    return Region(tuple(variables), reg.cells)


def _objective_interval(cell: Cell, objective: str):
    """Project the cell to the objective axis; return (lo, lo_strict, hi, hi_strict)
    with None for an absent bound, or None when the cell is empty."""
    rows = _prune_rows(_cell_rows(cell))
    for var in sorted(cell.variables() - {objective}):
        rows = _eliminate_rows(rows, var)
    if not _rows_ground_consistent(rows):
        return None
    lo = hi = None
    lo_strict = hi_strict = False
    for coeffs, rhs, strict in rows:
        if not coeffs:
            continue
        assert len(coeffs) == 1 and coeffs[0][0] == objective
        a = coeffs[0][1]
        bound = rhs / a
        if a > 0:
            if hi is None or bound < hi or (bound == hi and strict):
                if hi is None or bound < hi:
                    hi, hi_strict = bound, strict
                else:
                    hi_strict = hi_strict or strict
        else:
            if lo is None or bound > lo or (bound == lo and strict):
                if lo is None or bound > lo:
                    lo, lo_strict = bound, strict
                else:
                    lo_strict = lo_strict or strict
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and (lo_strict or hi_strict)):
            return None
    return (lo, lo_strict, hi, hi_strict)


def lp_sup(reg: Region, objective: str):
    """Exact supremum of a variable over the region.

    Returns (value, attained) where value is a Fraction, +inf (unbounded) or
    -inf (empty region); attained is False when the binding constraint is
    strict or the region is empty or unbounded.
    """
    best = -math.inf
    attained = False
    for cell in reg.cells:
        interval = _objective_interval(cell, objective)
        if interval is None:
            continue
        _, _, hi, hi_strict = interval
        if hi is None:
            return (math.inf, False)
        if hi > best:
            best, attained = hi, not hi_strict
        elif hi == best and not hi_strict:
            attained = True
    return (best, attained)


def lp_inf(reg: Region, objective: str):
    best = math.inf
    attained = False
    for cell in reg.cells:
        interval = _objective_interval(cell, objective)
        if interval is None:
            continue
        lo, lo_strict, _, _ = interval
        if lo is None:
            return (-math.inf, False)
        if lo < best:
            best, attained = lo, not lo_strict
        elif lo == best and not lo_strict:
            attained = True
    return (best, attained)


def sample_point(cell: Cell, variables: Sequence[str]) -> dict[str, Fraction] | None:
    """Deterministically pick a rational point of the cell, or None if empty."""
    if cell_is_empty(cell):
        return None
    point: dict[str, Fraction] = {}
    current = cell
    for i, var in enumerate(variables):
        interval = _objective_interval(current, var)
        if interval is None:
            return None
        lo, lo_strict, hi, hi_strict = interval
        if lo is not None and hi is not None:
            value = lo if (lo == hi) else (lo + hi) / 2
        elif lo is not None:
            value = lo + 1 if lo_strict else lo
        elif hi is not None:
            value = hi - 1 if hi_strict else hi
        else:
            value = Fraction(0)
        point[var] = value
        reduced = region_substitute(Region((var,) + tuple(variables[i + 1 :]), (current,)), var, value)
        if reduced.is_empty():
            return None
        current = reduced.cells[0]
    return point


# ---------------------------------------------------------------------------
# Exact 2D convex hulls and the pointwise-min closure.


@dataclass(frozen=True)
class Polygon2D:
    """Convex polygon, vertices counterclockwise; may degenerate to a segment
    or a single point."""

    vertices: tuple[Point2, ...]

    def __len__(self):
        return len(self.vertices)


def _cross(o: Point2, a: Point2, b: Point2) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points: Sequence[Point2]) -> Polygon2D:
    pts = sorted({(Fraction(x), Fraction(y)) for x, y in points})
    if not pts:
        raise ModelError("convex hull of an empty point set")
    if len(pts) == 1:
        return Polygon2D((pts[0],))
    lower: list[Point2] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point2] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = tuple(lower[:-1] + upper[:-1])
    if len(hull) == 2 and hull[0] == hull[1]:
        hull = hull[:1]
    return Polygon2D(hull)


def polygon_contains(poly: Polygon2D, pt: Point2) -> bool:
    vs = poly.vertices
    if len(vs) == 1:
        return pt == vs[0]
    if len(vs) == 2:
        p, q = vs
        if _cross(p, q, pt) != 0:
            return False
        return min(p, q) <= pt <= max(p, q)
    return all(_cross(vs[i], vs[(i + 1) % len(vs)], pt) >= 0 for i in range(len(vs)))


def polygon_max_x_at_y(poly: Polygon2D, y: Fraction) -> Fraction | None:
    """Largest x with (x, y) in the polygon, or None when the line misses it."""
    y = Fraction(y)
    best = None
    vs = poly.vertices
    n = len(vs)
    for v in vs:
        if v[1] == y and (best is None or v[0] > best):
            best = v[0]
    if n >= 2:
        for i in range(n if n > 2 else 1):
            p, q = vs[i], vs[(i + 1) % n]
            if p[1] == q[1]:
                continue
            lo, hi = (p, q) if p[1] < q[1] else (q, p)
            if lo[1] <= y <= hi[1]:
                x = p[0] + (q[0] - p[0]) * (y - p[1]) / (q[1] - p[1])
                if best is None or x > best:
                    best = x
    return best


def polygon_boundary_pair(poly: Polygon2D, pt: Point2) -> tuple[Point2, Point2]:
    """Two hull vertices whose segment contains the boundary point pt."""
    vs = poly.vertices
    for v in vs:
        if v == pt:
            return (v, v)
    n = len(vs)
    segments = [(vs[i], vs[(i + 1) % n]) for i in range(n)] if n > 2 else [(vs[0], vs[1])]
    for p, q in segments:
        if _cross(p, q, pt) == 0 and min(p, q) <= pt <= max(p, q):
            return (p, q)
    raise ModelError(f"{pt} is not on the polygon boundary")


def fmin_closure(points: Sequence[Point2], varnames: tuple[str, str] = ("x", "y")) -> Region:
    """Region for the pointwise-min closure of the convex hull of the points.

    In two dimensions closing under pairwise minima before taking the hull is
    enough; the result is a single closed convex cell.
    """
    if not points:
        raise ModelError("fmin closure of an empty point set")
    pts = [(Fraction(x), Fraction(y)) for x, y in points]
    augmented = set(pts)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            augmented.add((min(pts[i][0], pts[j][0]), min(pts[i][1], pts[j][1])))
    hull = convex_hull_2d(sorted(augmented))
    xv, yv = varnames
    vs = hull.vertices
    cons: list[LinearConstraint] = []
    if len(vs) == 1:
        (a, b) = vs[0]
        cons = [lincon({xv: 1}, "=", a), lincon({yv: 1}, "=", b)]
    elif len(vs) == 2:
        p, q = vs
        # points on the segment p-q: collinearity plus parameter bounds
        cons.append(
            lincon({xv: q[1] - p[1], yv: -(q[0] - p[0])}, "=", (q[1] - p[1]) * p[0] - (q[0] - p[0]) * p[1])
        )
        if p[0] != q[0]:
            cons.append(lincon({xv: 1}, ">=", min(p[0], q[0])))
            cons.append(lincon({xv: 1}, "<=", max(p[0], q[0])))
        else:
            cons.append(lincon({yv: 1}, ">=", min(p[1], q[1])))
            cons.append(lincon({yv: 1}, "<=", max(p[1], q[1])))
    else:
        for i in range(len(vs)):
            p, q = vs[i], vs[(i + 1) % len(vs)]
            # interior lies to the left of each CCW edge
            cons.append(
                lincon(
                    {xv: -(q[1] - p[1]), yv: q[0] - p[0]},
                    ">=",
                    -(q[1] - p[1]) * p[0] + (q[0] - p[0]) * p[1],
                )
            )
    return canonical_region(Region(tuple(varnames), (Cell(tuple(cons)),)))
