"""Exact linear programming over rationals via two-phase primal simplex.

Problems here are tiny (a handful of variables per best-response query),
so a dense tableau with Bland's rule is both sufficient and guaranteed to
terminate.  Every coefficient is a Fraction; there are no tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class LpResult:
    status: str
    x: Optional[tuple]  # primal solution, None unless optimal
    value: Optional[Fraction]


def solve(objective: Sequence, rows: Sequence, rhs: Sequence) -> LpResult:
    """Minimize objective . x subject to rows . x == rhs, x >= 0."""
    m, n = len(rows), len(objective)
    cost = [Fraction(c) for c in objective]
    table = []
    b = []
    for r in range(m):
        if len(rows[r]) != n:
            raise ValueError(f"row {r} has {len(rows[r])} entries, expected {n}")
        coeffs = [Fraction(v) for v in rows[r]]
        beta = Fraction(rhs[r])
        if beta < 0:  # simplex wants nonnegative right-hand sides
            coeffs = [-v for v in coeffs]
            beta = -beta
        table.append(coeffs)
        b.append(beta)

    # Phase 1: artificial variable per row, minimize their sum.
    for r in range(m):
        table[r].extend(_ONE if j == r else _ZERO for j in range(m))
    basis = list(range(n, n + m))
    phase1 = [_ZERO] * n + [_ONE] * m
    value = _pivot_to_optimum(table, b, basis, phase1, n + m)
    if value != 0:
        return LpResult(status=INFEASIBLE, x=None, value=None)

    _drive_out_artificials(table, b, basis, n)
    # Drop artificial columns; any remaining artificial basis row is all-zero
    # in the original columns and can be deleted as redundant.
    keep = [r for r in range(len(basis)) if basis[r] < n]
    table = [table[r][:n] for r in keep]
    b = [b[r] for r in keep]
    basis = [basis[r] for r in keep]

    value = _pivot_to_optimum(table, b, basis, cost, n)
    if value is None:
        return LpResult(status=UNBOUNDED, x=None, value=None)
    x = [_ZERO] * n
    for r, j in enumerate(basis):
        x[j] = b[r]
    return LpResult(status=OPTIMAL, x=tuple(x), value=value)


def _pivot_to_optimum(table, b, basis, cost, width) -> Optional[Fraction]:
    """Run Bland-rule pivots to optimality; None signals unboundedness."""
    while True:
        # Reduced costs relative to the current basis.
        y = _basis_multipliers(table, basis, cost)
        entering = None
        for j in range(width):
            if j in basis:
                continue
            reduced = cost[j] - sum(y[r] * table[r][j] for r in range(len(table)))
            if reduced < 0:
                entering = j
                break
        if entering is None:
            return sum(cost[basis[r]] * b[r] for r in range(len(table)))
        # Ratio test; ties break to the lowest basis variable (Bland).
        leaving = None
        best = None
        for r in range(len(table)):
            if table[r][entering] > 0:
                ratio = b[r] / table[r][entering]
                if best is None or ratio < best or (
                    ratio == best and basis[r] < basis[leaving]
                ):
                    best = ratio
                    leaving = r
        if leaving is None:
            return None
        _pivot(table, b, basis, leaving, entering)


def _basis_multipliers(table, basis, cost):
    # The tableau is kept in "basis = identity" form, so the multiplier for
    # row r is just the basic variable's cost.
    return [cost[basis[r]] for r in range(len(table))]


def _pivot(table, b, basis, row, col) -> None:
    pivot = table[row][col]
    table[row] = [v / pivot for v in table[row]]
    b[row] /= pivot
    for r in range(len(table)):
        if r != row and table[r][col] != 0:
            factor = table[r][col]
            table[r] = [v - factor * w for v, w in zip(table[r], table[row])]
            b[r] -= factor * b[row]
    basis[row] = col


def _drive_out_artificials(table, b, basis, n) -> None:
    """Pivot degenerate artificials out of the basis where possible."""
    for r in range(len(basis)):
        if basis[r] >= n:
            for j in range(n):
                if table[r][j] != 0:
                    _pivot(table, b, basis, r, j)
                    break
