"""Iterated deletion of minimax-dominated strategies and individual rationality.

A strategy is minimax dominated when some alternative's worst case (against
the opponents' current sets) strictly beats its best case.  Deletion is
"maximal": each round removes every currently dominated strategy, with
dominators drawn from the player's full strategy set.  A seeded policy
variant exists solely to exercise order independence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .games import (
    Game,
    Profile,
    Restriction,
    format_rational,
    insert_strategy,
)


def best_case(game: Game, player: int, sigma: int, opponents: Restriction) -> Fraction:
    """max over the opponents' sub-profiles of u_player(sigma, tau)."""
    return max(
        game.utility(insert_strategy(player, sigma, tau), player)
        for tau in opponents.opponent_profiles(player)
    )


def worst_case(game: Game, player: int, sigma: int, opponents: Restriction) -> Fraction:
    """min over the opponents' sub-profiles of u_player(sigma, tau)."""
    return min(
        game.utility(insert_strategy(player, sigma, tau), player)
        for tau in opponents.opponent_profiles(player)
    )


def minimax_dominates(
    game: Game,
    player: int,
    dominator: int,
    dominated: int,
    opponents: Restriction,
) -> bool:
    """True iff dominator's worst case strictly beats dominated's best case."""
    opponents.validate_for(game)
    return worst_case(game, player, dominator, opponents) > best_case(
        game, player, dominated, opponents
    )


@dataclass(frozen=True)
class Deletion:
    """One deleted strategy with its witness.

    ``dominator`` is a pure minimax-dominating strategy (NSD traces);
    ``certificate`` is a strictly dominating mixture (never-best-response
    traces), stored as sorted (strategy, weight) pairs.
    """

    player: int
    strategy: int
    dominator: Optional[int] = None
    certificate: Optional[tuple] = None

    def to_json_dict(self) -> dict:
        entry = {"player": self.player, "strategy": self.strategy}
        if self.dominator is not None:
            entry["dominator"] = self.dominator
        if self.certificate is not None:
            entry["certificate"] = {
                str(s): format_rational(w) for s, w in self.certificate
            }
        return entry


@dataclass(frozen=True)
class Round:
    before: Restriction
    after: Restriction
    deleted: tuple

    def to_json_dict(self) -> dict:
        return {
            "deleted": [d.to_json_dict() for d in self.deleted],
            "survivors": [list(entries) for entries in self.after.sets],
        }


@dataclass(frozen=True)
class DeletionTrace:
    """Per-round record of a deletion run; ``final`` is the fixpoint."""

    rounds: tuple
    final: Restriction

    @property
    def num_rounds(self) -> int:
        return len(self.rounds)

    def to_json_dict(self) -> dict:
        return {
            "rounds": [r.to_json_dict() for r in self.rounds],
            "final": [list(entries) for entries in self.final.sets],
        }


def _dominated_now(
    game: Game, current: Restriction, player: int, dominators: Sequence
) -> list:
    """(strategy, witness) pairs dominated w.r.t. current_{-player}.

    The witness is the lowest-index dominating strategy.
    """
    out = []
    worst = {d: worst_case(game, player, d, current) for d in dominators}
    for sigma in current.sets[player]:
        best_sigma = best_case(game, player, sigma, current)
        for d in dominators:
            if worst[d] > best_sigma:
                out.append((sigma, d))
                break
    return out


def nsd_step(
    game: Game, current: Restriction, restrict_dominators: bool = False
) -> tuple:
    """One maximal deletion round; returns (next restriction, Round).

    Dominators range over the player's full strategy set unless
    ``restrict_dominators`` limits them to the current survivors (the
    equivalent formulation tested by the restricted-dominator variant).
    """
    current.validate_for(game)
    deletions = []
    new_sets = []
    for i in game.players:
        dominators = current.sets[i] if restrict_dominators else tuple(game.strategies(i))
        doomed = _dominated_now(game, current, i, dominators)
        doomed_set = {sigma for sigma, _ in doomed}
        survivors = tuple(s for s in current.sets[i] if s not in doomed_set)
        if not survivors:
            raise AssertionError(
                f"deletion emptied player {i}'s set; maximin strategies must survive"
            )
        new_sets.append(survivors)
        deletions.extend(
            Deletion(player=i, strategy=sigma, dominator=d) for sigma, d in doomed
        )
    after = Restriction(tuple(new_sets))
    return after, Round(before=current, after=after, deleted=tuple(deletions))


def nsd_fixpoint(game: Game, restrict_dominators: bool = False) -> DeletionTrace:
    """Iterate maximal deletion from the full sets until nothing is dominated."""
    current = Restriction.full(game)
    rounds = []
    while True:
        nxt, record = nsd_step(game, current, restrict_dominators=restrict_dominators)
        if not record.deleted:
            return DeletionTrace(rounds=tuple(rounds), final=current)
        rounds.append(record)
        current = nxt


def nsd_fixpoint_restricted_dominators(game: Game) -> DeletionTrace:
    """Deletion with dominators drawn from the survivors only.

    Per-round survivor sets coincide with ``nsd_fixpoint``'s; witnesses
    may differ.
    """
    return nsd_fixpoint(game, restrict_dominators=True)


def nsd_fixpoint_with_order(game: Game, order_seed: int) -> DeletionTrace:
    """Seeded partial-deletion policy: each round removes a random nonempty
    subset of the currently dominated strategies.  Every seed must reach the
    same fixpoint as maximal deletion."""
    rng = random.Random(order_seed)
    current = Restriction.full(game)
    rounds = []
    while True:
        doomed = []
        for i in game.players:
            for sigma, d in _dominated_now(game, current, i, tuple(game.strategies(i))):
                doomed.append(Deletion(player=i, strategy=sigma, dominator=d))
        if not doomed:
            return DeletionTrace(rounds=tuple(rounds), final=current)
        chosen = [d for d in doomed if rng.getrandbits(1)]
        if not chosen:
            chosen = [doomed[rng.randrange(len(doomed))]]
        new_sets = []
        for i in game.players:
            removed = {d.strategy for d in chosen if d.player == i}
            new_sets.append(tuple(s for s in current.sets[i] if s not in removed))
        after = Restriction(tuple(new_sets))
        rounds.append(Round(before=current, after=after, deleted=tuple(chosen)))
        current = after


@dataclass(frozen=True)
class MaximinReport:
    """Exact pure-strategy maximin value and a strategy attaining it."""

    player: int
    opponents: Restriction
    value: Fraction
    argmax_strategy: int


def maximin(
    game: Game,
    player: int,
    opponents: Restriction,
    candidates: Optional[Iterable] = None,
) -> MaximinReport:
    """max over candidate strategies of the worst case against ``opponents``.

    Ties break to the lowest strategy index. Candidates default to the
    player's full strategy set (the deviation set of the IR definitions).
    """
    opponents.validate_for(game)
    pool = tuple(candidates) if candidates is not None else tuple(game.strategies(player))
    best_sigma = None
    best_value = None
    for sigma in pool:
        value = worst_case(game, player, sigma, opponents)
        if best_value is None or value > best_value:
            best_sigma, best_value = sigma, value
    return MaximinReport(
        player=player, opponents=opponents, value=best_value, argmax_strategy=best_sigma
    )


def _ir_profiles(game: Game, z: Restriction, thresholds: Sequence) -> tuple:
    out = []
    for profile in z.profiles():
        payoff = game.payoff_vector(profile)
        if all(payoff[i] >= thresholds[i] for i in game.players):
            out.append(profile)
    return tuple(out)


def ir_set(game: Game) -> tuple:
    """Profiles meeting every player's full-game maximin value."""
    full = Restriction.full(game)
    thresholds = [maximin(game, i, full).value for i in game.players]
    return _ir_profiles(game, full, thresholds)


def ir_relative(game: Game, z: Restriction) -> tuple:
    """IR of the subgame restricted to z: deviations range over z_i."""
    z.validate_for(game)
    thresholds = [maximin(game, i, z, candidates=z.sets[i]).value for i in game.players]
    return _ir_profiles(game, z, thresholds)


def ir_prime(game: Game, z: Restriction) -> tuple:
    """Strong relative IR: deviations range over the full strategy set."""
    z.validate_for(game)
    thresholds = [maximin(game, i, z).value for i in game.players]
    return _ir_profiles(game, z, thresholds)


def z_sets_failure(game: Game, profile: Profile, z: Restriction) -> Optional[str]:
    """None when z witnesses minimax rationalizability of ``profile``;
    otherwise a description of the first failing condition."""
    z.validate_for(game)
    game.check_profile(profile)
    for i, sigma in enumerate(profile):
        if sigma not in z.sets[i]:
            return f"profile strategy {sigma} of player {i} is not in Z_{i}"
    for i in game.players:
        for member in z.sets[i]:
            member_best = best_case(game, i, member, z)
            for rival in game.strategies(i):
                if worst_case(game, i, rival, z) > member_best:
                    return (
                        f"strategy {member} of player {i} is minimax dominated "
                        f"by {rival} within Z"
                    )
    return None


def check_z_sets(game: Game, profile: Profile, z: Restriction) -> bool:
    """Do the candidate Z sets satisfy both witness conditions for profile?"""
    return z_sets_failure(game, profile, z) is None


def minimax_rationalizable(game: Game, profile: Profile) -> Optional[Restriction]:
    """Witness Z sets (the deletion fixpoint) when the profile survives
    iterated minimax deletion; None otherwise."""
    game.check_profile(profile)
    final = nsd_fixpoint(game).final
    if final.contains(profile):
        return final
    return None
