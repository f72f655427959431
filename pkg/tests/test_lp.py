import random
from fractions import Fraction

from translucent_games import lp


def test_simple_optimum():
    # min -x - y  s.t.  x + y + s = 4, x + 2y + t = 6
    result = lp.solve(
        [-1, -1, 0, 0],
        [[1, 1, 1, 0], [1, 2, 0, 1]],
        [4, 6],
    )
    assert result.status == lp.OPTIMAL
    assert result.value == -4
    x, y = result.x[0], result.x[1]
    assert x + y == 4


def test_infeasible():
    # x + y = -1 with x, y >= 0 has no solution.
    result = lp.solve([0, 0], [[1, 1]], [-1])
    assert result.status == lp.INFEASIBLE


def test_unbounded():
    # min -x  s.t.  x - y = 0: the ray x = y -> inf.
    result = lp.solve([-1, 0], [[1, -1]], [0])
    assert result.status == lp.UNBOUNDED


def test_fractional_solution_exact():
    # x = 1/3 forced exactly.
    result = lp.solve([1], [[3]], [1])
    assert result.status == lp.OPTIMAL
    assert result.x[0] == Fraction(1, 3)


def test_degenerate_redundant_rows():
    # Duplicated constraint must not confuse phase 2.
    result = lp.solve(
        [1, 1],
        [[1, 1], [1, 1], [2, 2]],
        [1, 1, 2],
    )
    assert result.status == lp.OPTIMAL
    assert result.value == 1


def test_random_feasible_systems_are_found_feasible():
    rng = random.Random(42)
    for _ in range(50):
        n = rng.randint(2, 5)
        m = rng.randint(1, 3)
        x0 = [Fraction(rng.randint(0, 4)) for _ in range(n)]
        rows = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(m)]
        rhs = [sum(r * v for r, v in zip(row, x0)) for row in rows]
        result = lp.solve([0] * n, rows, rhs)
        assert result.status == lp.OPTIMAL
        for row, b in zip(rows, rhs):
            assert sum(r * v for r, v in zip(row, result.x)) == b
        assert all(v >= 0 for v in result.x)


def test_random_optimum_beats_random_feasible_points():
    rng = random.Random(7)
    for _ in range(30):
        n = rng.randint(2, 4)
        x0 = [Fraction(rng.randint(0, 3)) for _ in range(n)]
        row = [Fraction(1) for _ in range(n)]
        rhs = [sum(x0)]
        if rhs[0] == 0:
            continue
        cost = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
        result = lp.solve(cost, [row], rhs)
        assert result.status == lp.OPTIMAL
        # Every vertex is some coordinate carrying the whole mass.
        best_vertex = min(c * rhs[0] for c in cost)
        assert result.value == best_vertex
