"""Seeded random games, appropriate structures and formulas.

The structure generator builds belief assignments cluster-by-cluster so the
two belief conditions hold by construction: states in a cluster share one
distribution whose support stays inside the cluster, and clusters never
cross own-strategy classes.  A bias parameter makes some states
self-believing for every player, which produces KW/KS states for the
equilibrium-style tests.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Optional, Sequence

from .games import Game, Restriction
from .kripke import CounterfactualStructure, Distribution
from . import logic


def random_game(
    rng: random.Random,
    num_players: Optional[int] = None,
    max_strategies: int = 4,
    payoff_lo: int = -3,
    payoff_hi: int = 3,
) -> Game:
    if num_players is None:
        num_players = rng.randint(2, 3)
    counts = [rng.randint(2, max_strategies) for _ in range(num_players)]
    names = tuple(tuple(f"s{k}" for k in range(c)) for c in counts)
    players = tuple(f"P{i + 1}" for i in range(num_players))

    def payoff(_profile):
        return tuple(
            Fraction(rng.randint(payoff_lo, payoff_hi)) for _ in range(num_players)
        )

    return Game.from_function(players, names, payoff)


def random_restriction(rng: random.Random, game: Game) -> Restriction:
    sets = []
    for i in game.players:
        count = len(game.strategy_names[i])
        size = rng.randint(1, count)
        sets.append(sorted(rng.sample(range(count), size)))
    return Restriction.from_sets(sets)


def _random_distribution(rng: random.Random, support: Sequence) -> Distribution:
    weights = [rng.randint(1, 4) for _ in support]
    total = sum(weights)
    return Distribution(
        tuple(sorted((s, Fraction(w, total)) for s, w in zip(support, weights)))
    )


def random_appropriate_structure(
    rng: random.Random,
    game: Game,
    num_states: Optional[int] = None,
    self_believing_bias: float = 0.3,
) -> CounterfactualStructure:
    max_count = max(game.strategy_counts)
    if num_states is None:
        num_states = rng.randint(max_count, max_count + 8)
    if num_states < max_count:
        raise ValueError("need at least one state per strategy of the largest player")

    # Strategy map: a covering block guarantees every strategy is played
    # somewhere (so the closest-state table can be total), the rest random.
    strategy_map: List[tuple] = []
    for omega in range(num_states):
        if omega < max_count:
            strategy_map.append(
                tuple(omega % len(game.strategy_names[i]) for i in game.players)
            )
        else:
            strategy_map.append(
                tuple(
                    rng.randrange(len(game.strategy_names[i])) for i in game.players
                )
            )

    self_believing = {
        omega for omega in range(num_states) if rng.random() < self_believing_bias
    }

    beliefs = []
    for i in game.players:
        per_state: List[Optional[Distribution]] = [None] * num_states
        for omega in self_believing:
            per_state[omega] = Distribution.point(omega)
        by_own: dict = {}
        for omega in range(num_states):
            if omega in self_believing:
                continue
            by_own.setdefault(strategy_map[omega][i], []).append(omega)
        for members in by_own.values():
            rng.shuffle(members)
            while members:
                size = rng.randint(1, len(members))
                cluster = sorted(members[:size])
                del members[:size]
                support_size = rng.randint(1, len(cluster))
                support = sorted(rng.sample(cluster, support_size))
                dist = _random_distribution(rng, support)
                for omega in cluster:
                    per_state[omega] = dist
        beliefs.append(tuple(per_state))

    by_strategy = [
        {
            sigma: [w for w in range(num_states) if strategy_map[w][i] == sigma]
            for sigma in game.strategies(i)
        }
        for i in game.players
    ]
    closest = []
    for omega in range(num_states):
        by_player = []
        for i in game.players:
            row = []
            for sigma in game.strategies(i):
                if sigma == strategy_map[omega][i]:
                    row.append(omega)
                else:
                    row.append(rng.choice(by_strategy[i][sigma]))
            by_player.append(tuple(row))
        closest.append(tuple(by_player))

    return CounterfactualStructure(
        game=game,
        strategy_map=tuple(strategy_map),
        closest=tuple(closest),
        beliefs=tuple(beliefs),
    )


def random_l0_formula(rng: random.Random, game: Game, depth: int = 3) -> logic.Formula:
    """Random formula without the counterfactual operators."""
    return _random_formula(rng, game, depth, counterfactual=False)


def random_formula(rng: random.Random, game: Game, depth: int = 3) -> logic.Formula:
    return _random_formula(rng, game, depth, counterfactual=True)


def _random_formula(
    rng: random.Random, game: Game, depth: int, counterfactual: bool
) -> logic.Formula:
    def atom():
        roll = rng.randrange(4 if not counterfactual else 5)
        if roll == 0:
            return logic.TrueF()
        if roll == 1:
            i = rng.randrange(game.num_players)
            return logic.Play(i, rng.randrange(len(game.strategy_names[i])))
        if roll == 2:
            return logic.Rat(rng.randrange(game.num_players))
        if roll == 3:
            return logic.RatAll()
        return rng.choice([logic.KS(), logic.KR(), logic.KW()])

    def build(d: int) -> logic.Formula:
        if d <= 0:
            return atom()
        ops = ["not", "and", "b", "eb", "cb", "atom"]
        if counterfactual:
            ops += ["k", "ebstar", "cbstar"]
        op = rng.choice(ops)
        if op == "atom":
            return atom()
        if op == "not":
            return logic.Not(build(d - 1))
        if op == "and":
            return logic.And(build(d - 1), build(d - 1))
        if op == "b":
            return logic.B(rng.randrange(game.num_players), build(d - 1))
        if op == "k":
            return logic.K(rng.randrange(game.num_players), build(d - 1))
        if op == "eb":
            return logic.EB(build(d - 1))
        if op == "ebstar":
            return logic.EBStar(build(d - 1))
        if op == "cbstar":
            return logic.CBStar(build(d - 1))
        return logic.CB(build(d - 1))

    return build(depth)
