"""Exact two-phase simplex over rationals (Bland's rule, no cycling).

Small by design: the flow programs it solves have one variable per edge of an
SCC and a handful of constraints, so a dense tableau is plenty.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
OPTIMAL = "optimal"


def _pivot(tableau, basis, row, col):
    piv = tableau[row][col]
    tableau[row] = [v / piv for v in tableau[row]]
    for r in range(len(tableau)):
        if r != row and tableau[r][col] != 0:
            factor = tableau[r][col]
            tableau[r] = [a - factor * b for a, b in zip(tableau[r], tableau[row])]
    basis[row] = col


def _solve(tableau, basis, n_cols):
    """Maximize the objective stored in the last tableau row (Bland's rule)."""
    while True:
        obj = tableau[-1]
        col = next((j for j in range(n_cols) if obj[j] > 0), None)
        if col is None:
            return OPTIMAL
        row = None
        best = None
        for r in range(len(tableau) - 1):
            a = tableau[r][col]
            if a > 0:
                ratio = tableau[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[row]):
                    best = ratio
                    row = r
        if row is None:
            return UNBOUNDED
        _pivot(tableau, basis, row, col)


def lp_maximize(
    objective: Sequence[Fraction],
    eq: Sequence[tuple[Sequence[Fraction], Fraction]] = (),
    ub: Sequence[tuple[Sequence[Fraction], Fraction]] = (),
):
    """Maximize c.x subject to A_eq x = b_eq, A_ub x <= b_ub, x >= 0.

    Returns (status, value, solution); value/solution are None unless optimal.
    """
    n = len(objective)
    rows = []
    for coeffs, rhs in eq:
        rows.append(([Fraction(c) for c in coeffs], Fraction(rhs), "="))
    for coeffs, rhs in ub:
        rows.append(([Fraction(c) for c in coeffs], Fraction(rhs), "<="))
    m = len(rows)
    n_slack = sum(1 for _, _, kind in rows if kind == "<=")
    width = n + n_slack + m  # structural + slack + artificial
    tableau = []
    basis = []
    slack_idx = 0
    for i, (coeffs, rhs, kind) in enumerate(rows):
        row = list(coeffs) + [Fraction(0)] * (n_slack + m) + [rhs]
        if kind == "<=":
            row[n + slack_idx] = Fraction(1)
            slack_idx += 1
        if rhs < 0:
            row = [-v for v in row]
        row[n + n_slack + i] = Fraction(1)
        tableau.append(row)
        basis.append(n + n_slack + i)
    # phase 1: drive the artificial variables to zero (reduced costs of
    # maximize -sum(artificials) with the artificial basis zeroed out)
    phase1 = [Fraction(0)] * (width + 1)
    for r in range(m):
        for j in range(width + 1):
            phase1[j] += tableau[r][j]
    for i in range(m):
        phase1[n + n_slack + i] = Fraction(0)
    tableau.append(phase1)
    status = _solve(tableau, basis, n + n_slack)
    if tableau[-1][-1] != 0:
        return (INFEASIBLE, None, None)
    tableau.pop()
    # pivot any artificial variable out of the basis, then drop those columns
    for r in range(m):
        if basis[r] >= n + n_slack:
            col = next((j for j in range(n + n_slack) if tableau[r][j] != 0), None)
            if col is not None:
                _pivot(tableau, basis, r, col)
    keep = [r for r in range(m) if basis[r] < n + n_slack]
    tableau = [[tableau[r][j] for j in range(n + n_slack)] + [tableau[r][-1]] for r in keep]
    basis = [basis[r] for r in keep]
    # phase 2
    obj = [Fraction(c) for c in objective] + [Fraction(0)] * n_slack + [Fraction(0)]
    for r, b in enumerate(basis):
        if obj[b] != 0:
            factor = obj[b]
            obj = [a - factor * v for a, v in zip(obj, tableau[r])]
    tableau.append(obj)
    status = _solve(tableau, basis, n + n_slack)
    if status == UNBOUNDED:
        return (UNBOUNDED, None, None)
    solution = [Fraction(0)] * n
    for r, b in enumerate(basis):
        if b < n:
            solution[b] = tableau[r][-1]
    return (OPTIMAL, -tableau[-1][-1], solution)
