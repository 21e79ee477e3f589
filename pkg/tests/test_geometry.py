import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stackmp import lincon
from stackmp.geometry import (
    Cell,
    Region,
    canonical_region,
    cell_canonical,
    cell_is_empty,
    convex_hull_2d,
    empty_region,
    fm_eliminate,
    fmin_closure,
    full_region,
    lp_inf,
    lp_sup,
    polygon_boundary_pair,
    polygon_contains,
    polygon_max_x_at_y,
    region_complement,
    region_intersect,
    region_lift,
    region_rename,
    region_substitute,
    region_union,
    sample_point,
)
from stackmp.lp import lp_maximize
from stackmp.model import ModelError

from .conftest import random_rational
from .oracles import interval_feasible, point_in_hull


def canon(*constraints) -> Cell:
    return cell_canonical(Cell(tuple(constraints)))


def region_of(variables, *cells) -> Region:
    return canonical_region(Region(tuple(variables), tuple(Cell(tuple(cs)) for cs in cells)))


# ---------------------------------------------------------------------- hulls

def test_hull_single_point():
    poly = convex_hull_2d([(Fraction(3), Fraction(5))])
    assert poly.vertices == ((Fraction(3), Fraction(5)),)


def test_hull_triangle_from_worked_example():
    pts = [(Fraction(0), Fraction(2)), (Fraction(1), Fraction(1)), (Fraction(0), Fraction(1))]
    poly = convex_hull_2d(pts)
    assert set(poly.vertices) == set(pts)
    assert len(poly.vertices) == 3


def test_hull_collinear_degenerates_to_segment():
    pts = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)), (Fraction(2), Fraction(2))]
    poly = convex_hull_2d(pts)
    assert poly.vertices == ((Fraction(0), Fraction(0)), (Fraction(2), Fraction(2)))


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.fractions(max_denominator=8), st.fractions(max_denominator=8)),
        min_size=1,
        max_size=12,
    )
)
def test_hull_matches_extreme_point_filter(points):
    poly = convex_hull_2d(points)
    unique = sorted({(Fraction(x), Fraction(y)) for x, y in points})
    hull_set = set(poly.vertices)
    for p in unique:
        others = [q for q in unique if q != p]
        if not others:
            assert p in hull_set
            continue
        redundant = point_in_hull(p, others, lp_maximize)
        assert (p not in hull_set) == redundant
    for p in unique:
        assert polygon_contains(poly, p)


def test_polygon_max_x_at_y():
    poly = convex_hull_2d(
        [(Fraction(0), Fraction(2)), (Fraction(1), Fraction(1)), (Fraction(0), Fraction(1))]
    )
    assert polygon_max_x_at_y(poly, Fraction(1)) == 1
    assert polygon_max_x_at_y(poly, Fraction(3, 2)) == Fraction(1, 2)
    assert polygon_max_x_at_y(poly, Fraction(2)) == 0
    assert polygon_max_x_at_y(poly, Fraction(3)) is None
    p, q = polygon_boundary_pair(poly, (Fraction(1, 2), Fraction(3, 2)))
    assert {p, q} == {(Fraction(0), Fraction(2)), (Fraction(1), Fraction(1))}
    v, w = polygon_boundary_pair(poly, (Fraction(1), Fraction(1)))
    assert v == w == (Fraction(1), Fraction(1))


# ------------------------------------------------------------- fmin closure

def test_fmin_two_points_gives_reference_triangle():
    reg = fmin_closure([(Fraction(0), Fraction(2)), (Fraction(1), Fraction(1))])
    reference_form = region_of(
        ("x", "y"),
        (
            lincon({"x": 1}, ">=", 0),
            lincon({"x": 1}, "<=", 1),
            lincon({"y": 1}, ">=", 1),
            lincon({"y": 1}, "<=", 2),
            lincon({"x": 1, "y": 1}, "<=", 2),
        ),
    )
    assert reg.cells == reference_form.cells


def test_fmin_single_point_is_equalities():
    reg = fmin_closure([(Fraction(0), Fraction(1))])
    assert reg.cells == region_of(
        ("x", "y"), (lincon({"x": 1}, "=", 0), lincon({"y": 1}, "=", 1))
    ).cells


def test_fmin_adds_pairwise_minima():
    reg = fmin_closure([(Fraction(2), Fraction(0)), (Fraction(0), Fraction(2)), (Fraction(1), Fraction(1))])
    # pairwise minima add (0, 0); the closure is the (2,0),(0,2),(0,0) triangle
    for pt, want in [
        ((0, 0), True),
        ((2, 0), True),
        ((0, 2), True),
        ((1, 1), True),
        ((Fraction(1, 2), Fraction(1, 2)), True),
        ((Fraction(3, 2), Fraction(3, 2)), False),
        ((-1, 0), False),
    ]:
        assert reg.evaluate({"x": Fraction(pt[0]), "y": Fraction(pt[1])}) == want


def test_fmin_contains_inputs_and_pairwise_minima():
    rng = random.Random(2)
    for trial in range(20):
        pts = [
            (random_rational(rng, -3, 3), random_rational(rng, -3, 3))
            for _ in range(rng.randint(1, 5))
        ]
        reg = fmin_closure(pts)
        for p in pts:
            assert reg.evaluate({"x": p[0], "y": p[1]})
        for p in pts:
            for q in pts:
                assert reg.evaluate({"x": min(p[0], q[0]), "y": min(p[1], q[1])})


def test_fmin_closed_under_pointwise_min_of_members():
    rng = random.Random(8)
    pts = [(Fraction(0), Fraction(3)), (Fraction(2), Fraction(1)), (Fraction(1), Fraction(2))]
    reg = fmin_closure(pts)
    cell = reg.cells[0]
    samples = []
    for trial in range(40):
        x = random_rational(rng, 0, 2)
        y = random_rational(rng, 0, 3)
        if reg.evaluate({"x": x, "y": y}):
            samples.append((x, y))
    assert len(samples) >= 2
    for p in samples:
        for q in samples:
            assert reg.evaluate({"x": min(p[0], q[0]), "y": min(p[1], q[1])})


def test_fmin_empty_input_rejected():
    with pytest.raises(ModelError):
        fmin_closure([])


# ------------------------------------------------------ elimination and sup

def test_fm_eliminate_single_pair():
    out = cell_canonical(fm_eliminate(Cell((lincon({"x": 1, "c": -1}, ">", 0), lincon({"x": 1}, "<=", 1))), "x"))
    assert out == canon(lincon({"c": 1}, "<", 1))


def test_fm_eliminate_worked_chain():
    cell = Cell(
        (
            lincon({"x": 1, "c": -1}, ">", 0),
            lincon({"x": 1}, ">=", 0),
            lincon({"x": 1}, "<=", 1),
            lincon({"y": 1}, ">=", 1),
            lincon({"y": 1}, "<=", 2),
            lincon({"x": 1, "y": 1}, "<=", 2),
            lincon({"y": 1}, ">=", Fraction(5, 4)),
        )
    )
    out = cell_canonical(fm_eliminate(fm_eliminate(cell, "x"), "y"))
    assert out == canon(lincon({"c": 1}, "<", Fraction(3, 4)))


def test_fm_eliminate_keeps_equalities_exact():
    cell = Cell((lincon({"x": 1, "y": 1}, "=", 2), lincon({"x": 1}, ">=", 0), lincon({"y": 1, "c": -1}, ">", 0)))
    out = cell_canonical(fm_eliminate(cell, "y"))
    # y = 2 - x with x >= 0 and y > c  ->  c < 2 - x <= 2
    assert out is not None
    assert not cell_is_empty(out)
    assert interval_feasible(cell, {"x": Fraction(1), "c": Fraction(0)}, "y")


def _random_cell(rng, variables, n_constraints):
    cons = []
    for _ in range(n_constraints):
        coeffs = {v: Fraction(rng.randint(-2, 2)) for v in variables}
        rel = rng.choice(["<", "<=", "=", ">=", ">"])
        if rel == "=" and rng.random() < 0.5:
            rel = "<="
        cons.append(lincon(coeffs, rel, random_rational(rng, -2, 2, 2)))
    return Cell(tuple(cons))


def test_fm_eliminate_agrees_with_interval_oracle():
    rng = random.Random(31)
    grid = [Fraction(n, 2) for n in range(-4, 5)]
    checked = 0
    for trial in range(40):
        cell = _random_cell(rng, ("a", "b", "t"), rng.randint(2, 4))
        projected = fm_eliminate(cell, "t")
        for a in grid:
            for b in grid:
                point = {"a": a, "b": b}
                want = interval_feasible(cell, point, "t")
                got = projected.evaluate(point)
                assert got == want, (cell, point)
                checked += 1
    assert checked > 1000


def test_lp_sup_strict_boundary():
    reg = Region(
        ("x", "y", "c"),
        (
            Cell(
                (
                    lincon({"x": 1}, "=", 3),
                    lincon({"y": 1}, "=", 5),
                    lincon({"x": 1, "c": -1}, ">", 0),
                )
            ),
        ),
    )
    assert lp_sup(reg, "c") == (Fraction(3), False)


def test_lp_sup_worked_rho_region():
    triangle = fmin_closure([(Fraction(0), Fraction(2)), (Fraction(1), Fraction(1))])
    rho = region_intersect(
        region_intersect(
            region_lift(triangle, ("x", "y", "c")),
            Region(("x", "y", "c"), (Cell((lincon({"x": 1, "c": -1}, ">", 0),)),)),
        ),
        region_of(
            ("x", "y", "c"),
            (lincon({"c": 1}, "<", 0),),
            (lincon({"y": 1}, ">=", Fraction(5, 4)),),
        ),
    )
    assert lp_sup(rho, "c") == (Fraction(3, 4), False)


def test_lp_sup_empty_and_unbounded():
    assert lp_sup(empty_region(("c",)), "c") == (-math.inf, False)
    reg = region_of(("c",), (lincon({"c": 1}, ">=", 0),))
    assert lp_sup(reg, "c") == (math.inf, False)
    assert lp_inf(reg, "c") == (Fraction(0), True)


def test_lp_sup_union_is_max_of_parts():
    rng = random.Random(13)
    for trial in range(25):
        a = Region(("u", "w"), (_random_cell(rng, ("u", "w"), 3),))
        b = Region(("u", "w"), (_random_cell(rng, ("u", "w"), 3),))
        union = region_union(a, b)
        got = lp_sup(union, "u")
        parts = [lp_sup(a, "u"), lp_sup(b, "u")]
        want_value = max(p[0] for p in parts)
        assert got[0] == want_value
        if got[0] not in (math.inf, -math.inf):
            assert got[1] == any(p[1] for p in parts if p[0] == want_value)


# ----------------------------------------------------------- region algebra

def test_complement_of_worked_region():
    reg = region_of(("c", "y"), (lincon({"c": 1}, ">=", 0), lincon({"y": 1}, "<", Fraction(5, 4))))
    comp = region_complement(reg)
    want = region_of(
        ("c", "y"),
        (lincon({"c": 1}, "<", 0),),
        (lincon({"y": 1}, ">=", Fraction(5, 4)),),
    )
    assert comp.cells == want.cells


def test_complement_is_disjoint_and_covering():
    rng = random.Random(41)
    for trial in range(30):
        cells = [_random_cell(rng, ("c", "d"), rng.randint(1, 3)) for _ in range(rng.randint(1, 2))]
        reg = canonical_region(Region(("c", "d"), tuple(cells)))
        comp = region_complement(reg)
        assert region_intersect(reg, comp).is_empty()
        for _ in range(20):
            point = {"c": random_rational(rng, -3, 3, 4), "d": random_rational(rng, -3, 3, 4)}
            assert reg.evaluate(point) != comp.evaluate(point)


def test_set_ops_match_pointwise_semantics():
    rng = random.Random(59)
    checked = 0
    for trial in range(20):
        a = canonical_region(Region(("c", "d"), (_random_cell(rng, ("c", "d"), 2), _random_cell(rng, ("c", "d"), 2))))
        b = canonical_region(Region(("c", "d"), (_random_cell(rng, ("c", "d"), 2),)))
        union = region_union(a, b)
        inter = region_intersect(a, b)
        comp = region_complement(a)
        for _ in range(50):
            point = {"c": random_rational(rng, -3, 3, 4), "d": random_rational(rng, -3, 3, 4)}
            assert union.evaluate(point) == (a.evaluate(point) or b.evaluate(point))
            assert inter.evaluate(point) == (a.evaluate(point) and b.evaluate(point))
            assert comp.evaluate(point) == (not a.evaluate(point))
            checked += 1
    assert checked == 1000


def test_complement_is_involutive_up_to_denotation():
    rng = random.Random(47)
    for trial in range(15):
        reg = canonical_region(
            Region(("c", "d"), (_random_cell(rng, ("c", "d"), 2), _random_cell(rng, ("c", "d"), 1)))
        )
        twice = region_complement(region_complement(reg))
        for _ in range(30):
            point = {"c": random_rational(rng, -3, 3, 4), "d": random_rational(rng, -3, 3, 4)}
            assert twice.evaluate(point) == reg.evaluate(point)


def test_variable_mismatch_rejected():
    a = full_region(("c", "d"))
    b = full_region(("c", "y"))
    with pytest.raises(ModelError):
        region_union(a, b)
    with pytest.raises(ModelError):
        region_intersect(a, b)


def test_canonicalization_prunes_subsumed_cells():
    reg = region_of(
        ("c", "d"),
        (lincon({"c": 1}, ">=", 1), lincon({"d": 1}, "<", Fraction(5, 4))),
        (lincon({"c": 1}, ">=", 0), lincon({"d": 1}, "<", Fraction(5, 4))),
    )
    assert len(reg.cells) == 1
    assert reg.cells == region_of(
        ("c", "d"), (lincon({"c": 1}, ">=", 0), lincon({"d": 1}, "<", Fraction(5, 4)))
    ).cells


def test_canonicalization_merges_equality_pairs():
    cell = canon(lincon({"x": 1}, "<=", 2), lincon({"x": 1}, ">=", 2))
    assert cell == canon(lincon({"x": 1}, "=", 2))


def test_substitute_and_rename():
    reg = region_of(("c", "d"), (lincon({"c": 1, "d": 1}, "<=", 2),))
    fixed = region_substitute(reg, "c", Fraction(1))
    assert fixed.variables == ("d",)
    assert fixed.evaluate({"d": Fraction(1)}) and not fixed.evaluate({"d": Fraction(2)})
    renamed = region_rename(reg, "d", "y")
    assert renamed.variables == ("c", "y")
    assert renamed.evaluate({"c": Fraction(0), "y": Fraction(2)})


def test_sample_point_hits_every_nonempty_cell():
    rng = random.Random(73)
    found = 0
    for trial in range(60):
        cell = _random_cell(rng, ("a", "b", "t"), rng.randint(1, 4))
        if cell_is_empty(cell):
            assert sample_point(cell, ("a", "b", "t")) is None
            continue
        point = sample_point(cell, ("a", "b", "t"))
        assert point is not None
        assert cell.evaluate(point)
        found += 1
    assert found >= 10


def test_simplex_basic_cases():
    status, value, solution = lp_maximize(
        [Fraction(1), Fraction(1)],
        ub=[([Fraction(1), Fraction(2)], Fraction(4)), ([Fraction(1), Fraction(0)], Fraction(3))],
    )
    assert (status, value) == ("optimal", Fraction(7, 2))
    assert solution == [Fraction(3), Fraction(1, 2)]
    status, _, _ = lp_maximize([Fraction(1)], eq=[([Fraction(1)], Fraction(-1))])
    assert status == "infeasible"
    status, _, _ = lp_maximize([Fraction(1)])
    assert status == "unbounded"


def test_simplex_degenerate_flow_square():
    # two parallel unit flows; maximize the second: the first must vanish
    status, value, solution = lp_maximize(
        [Fraction(0), Fraction(1)],
        eq=[([Fraction(1), Fraction(1)], Fraction(1))],
        ub=[([Fraction(1), Fraction(0)], Fraction(0))],
    )
    assert (status, value) == ("optimal", Fraction(1))
    assert solution == [Fraction(0), Fraction(1)]
