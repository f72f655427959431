import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from translucent_games.games import Game, ex2, pd, reverse_traveler
from translucent_games.kripke import CounterfactualStructure, Distribution


@pytest.fixture
def pd12():
    return pd(1, 2)


@pytest.fixture
def game_ex2():
    return ex2()


@pytest.fixture
def rt10():
    return reverse_traveler(10, Fraction(1, 2))


@pytest.fixture
def matching_pennies():
    table = {
        (0, 0): (1, -1),
        (0, 1): (-1, 1),
        (1, 0): (-1, 1),
        (1, 1): (1, -1),
    }
    return Game.from_function(("P1", "P2"), (("H", "T"), ("H", "T")), table.__getitem__)


@pytest.fixture
def constant_game():
    return Game.from_function(
        ("P1", "P2"), (("a", "b"), ("c", "d")), lambda _profile: (5, 5)
    )


@pytest.fixture
def one_by_one():
    return Game.from_function(("Solo",), (("only",),), lambda _profile: (7,))


def flat_structure(game):
    """One state per profile; deviations keep the opponents fixed and each
    player's belief depends only on their own strategy (everyone believes
    the opponents play their first strategy), so the structure respects
    unilateral deviations.  At the all-first-strategies state the beliefs
    are point self-beliefs."""
    profiles = list(game.profiles())
    index = {p: i for i, p in enumerate(profiles)}
    closest = []
    for prof in profiles:
        by_player = []
        for i in game.players:
            row = []
            for sigma in game.strategies(i):
                moved = prof[:i] + (sigma,) + prof[i + 1 :]
                row.append(index[moved])
            by_player.append(tuple(row))
        closest.append(tuple(by_player))
    beliefs = []
    for i in game.players:
        per_state = []
        for prof in profiles:
            believed = tuple(prof[i] if j == i else 0 for j in game.players)
            per_state.append(Distribution.point(index[believed]))
        beliefs.append(tuple(per_state))
    return CounterfactualStructure(
        game=game,
        strategy_map=tuple(profiles),
        closest=tuple(closest),
        beliefs=tuple(beliefs),
    )


rationals = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=12
)


@st.composite
def games(draw, max_players=3, max_strategies=3, payoff=st.integers(-5, 5)):
    num_players = draw(st.integers(1, max_players))
    counts = [draw(st.integers(1, max_strategies)) for _ in range(num_players)]
    names = tuple(tuple(f"s{k}" for k in range(c)) for c in counts)
    total = 1
    for c in counts:
        total *= c
    rows = draw(
        st.lists(
            st.tuples(*(payoff for _ in range(num_players))),
            min_size=total,
            max_size=total,
        )
    )
    return Game(
        tuple(f"P{i}" for i in range(num_players)),
        names,
        tuple(tuple(Fraction(v) for v in row) for row in rows),
    )


def seeded_rng(seed):
    return random.Random(seed)
