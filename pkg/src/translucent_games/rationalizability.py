"""Classical (Pearce) rationalizability through exact linear feasibility.

A pure strategy is a best response to some correlated belief over the
opponents' surviving sub-profiles iff no mixture over the player's own
strategies strictly dominates it pointwise on that support; the two sides
are duals and exactly one witness exists per query.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import lp
from .domination import Deletion, DeletionTrace, Round
from .games import Game, Restriction, format_rational, insert_strategy

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class Belief:
    """Correlated belief of ``player`` over opponents' sub-profiles.

    ``weights`` maps -i sub-profiles (player order, ``player`` omitted) to
    probabilities; support stays within the restriction it was solved for.
    """

    player: int
    weights: tuple  # sorted ((sub-profile, Fraction), ...)

    def expected_utility(self, game: Game, sigma: int) -> Fraction:
        return sum(
            w * game.utility(insert_strategy(self.player, sigma, tau), self.player)
            for tau, w in self.weights
        )

    def to_json_dict(self, game: Game) -> dict:
        out = {}
        for tau, w in self.weights:
            labels = []
            k = 0
            for j in game.players:
                if j == self.player:
                    continue
                labels.append(game.strategy_names[j][tau[k]])
                k += 1
            out[",".join(labels)] = format_rational(w)
        return out


@dataclass(frozen=True)
class MixedStrategy:
    """Mixture over ``player``'s own strategies (the dominance certificate)."""

    player: int
    weights: tuple  # sorted ((strategy, Fraction), ...)

    def expected_utility(self, game: Game, opponents_profile: tuple) -> Fraction:
        return sum(
            w * game.utility(insert_strategy(self.player, s, opponents_profile), self.player)
            for s, w in self.weights
        )

    def to_json_dict(self, game: Game) -> dict:
        return {
            game.strategy_names[self.player][s]: format_rational(w)
            for s, w in self.weights
        }


def best_response_to_some_belief(
    game: Game, player: int, sigma: int, opponents: Restriction
) -> Optional[Belief]:
    """A belief with support in ``opponents`` against which ``sigma`` is a
    best response among all of the player's strategies, or None.

    Feasibility problem: weights w >= 0, sum w = 1, and for every rival
    strategy the expected payoff difference is >= 0.
    """
    opponents.validate_for(game)
    taus = list(opponents.opponent_profiles(player))
    rivals = [s for s in game.strategies(player) if s != sigma]
    num_w = len(taus)
    # Columns: w_tau, then one surplus variable per rival constraint.
    width = num_w + len(rivals)
    rows = []
    rhs = []
    for r, rival in enumerate(rivals):
        row = [_ZERO] * width
        for t, tau in enumerate(taus):
            profile_sigma = insert_strategy(player, sigma, tau)
            profile_rival = insert_strategy(player, rival, tau)
            row[t] = game.utility(profile_sigma, player) - game.utility(
                profile_rival, player
            )
        row[num_w + r] = Fraction(-1)
        rows.append(row)
        rhs.append(_ZERO)
    rows.append([_ONE] * num_w + [_ZERO] * len(rivals))
    rhs.append(_ONE)
    result = lp.solve([_ZERO] * width, rows, rhs)
    if result.status != lp.OPTIMAL:
        return None
    weights = tuple(
        (tau, result.x[t]) for t, tau in enumerate(taus) if result.x[t] != 0
    )
    return Belief(player=player, weights=weights)


def mixed_dominance_certificate(
    game: Game, player: int, sigma: int, opponents: Restriction
) -> Optional[MixedStrategy]:
    """A mixture strictly beating ``sigma`` against every opponents'
    sub-profile in the restriction, or None.

    Maximizes the minimum payoff margin; a certificate exists iff the
    optimum margin is positive.
    """
    opponents.validate_for(game)
    taus = list(opponents.opponent_profiles(player))
    own = list(game.strategies(player))
    num_mu = len(own)
    # Columns: mu_s, t+, t-, then one surplus variable per tau constraint.
    width = num_mu + 2 + len(taus)
    rows = []
    rhs = []
    for r, tau in enumerate(taus):
        row = [_ZERO] * width
        base = game.utility(insert_strategy(player, sigma, tau), player)
        for s_idx, s in enumerate(own):
            row[s_idx] = game.utility(insert_strategy(player, s, tau), player) - base
        row[num_mu] = Fraction(-1)
        row[num_mu + 1] = _ONE
        row[num_mu + 2 + r] = Fraction(-1)
        rows.append(row)
        rhs.append(_ZERO)
    rows.append([_ONE] * num_mu + [_ZERO] * (width - num_mu))
    rhs.append(_ONE)
    objective = [_ZERO] * num_mu + [Fraction(-1), _ONE] + [_ZERO] * len(taus)
    result = lp.solve(objective, rows, rhs)
    if result.status != lp.OPTIMAL or -result.value <= 0:
        return None
    weights = tuple((own[s_idx], result.x[s_idx]) for s_idx in range(num_mu) if result.x[s_idx] != 0)
    return MixedStrategy(player=player, weights=weights)


def rationalizable_set(game: Game) -> DeletionTrace:
    """Iterated elimination of never-best-responses against the survivors.

    Each deletion records the dual certificate (a strictly dominating
    mixture) as its witness.
    """
    current = Restriction.full(game)
    rounds = []
    while True:
        deletions = []
        new_sets = []
        for i in game.players:
            survivors = []
            for sigma in current.sets[i]:
                if best_response_to_some_belief(game, i, sigma, current) is not None:
                    survivors.append(sigma)
                    continue
                certificate = mixed_dominance_certificate(game, i, sigma, current)
                if certificate is None:
                    raise AssertionError(
                        f"duality violated for player {i} strategy {sigma}"
                    )
                deletions.append(
                    Deletion(player=i, strategy=sigma, certificate=certificate.weights)
                )
            if not survivors:
                raise AssertionError(f"deletion emptied player {i}'s set")
            new_sets.append(tuple(survivors))
        after = Restriction(tuple(new_sets))
        if not deletions:
            return DeletionTrace(rounds=tuple(rounds), final=current)
        rounds.append(Round(before=current, after=after, deleted=tuple(deletions)))
        current = after
