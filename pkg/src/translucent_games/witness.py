"""Mechanical constructions of the structures behind the characterization
results: punishment-belief witnesses for survivors of minimax deletion, the
knowing-the-world variants, flat individual-rationality witnesses, and the
lift that turns a probability structure into a counterfactual structure
respecting unilateral deviations.

Every constructor re-validates its output with the checkers before
returning, so a transcription bug surfaces as a hard error rather than a
silently wrong fixture.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, List, Optional, Tuple

from .domination import ir_prime, ir_set, z_sets_failure
from .games import Game, Profile, Restriction, insert_strategy
from .kripke import (
    CounterfactualStructure,
    Distribution,
    ValidationReport,
    validate_appropriate,
    validate_strongly_appropriate,
)
from .logic import CB, KW, ModelChecker, PlayProfile, RatAll, And, ccbr_check


class PreconditionError(ValueError):
    """The requested witness does not exist for these inputs."""


class ConstructionError(RuntimeError):
    """A constructed structure failed its own verification."""

    def __init__(self, message: str, report: Optional[ValidationReport] = None):
        self.report = report
        super().__init__(message)


@dataclass(frozen=True)
class TotalOrder:
    """Fixed total order on opponent sub-profiles used to resolve ties.

    The default compares index tuples lexicographically (player order);
    ``reverse`` flips the comparison.  Extremum selectors return the
    order-maximum of the arg set, so results are deterministic.
    """

    reverse: bool = False

    def _key(self, candidate: tuple) -> tuple:
        if self.reverse:
            return tuple(-x for x in candidate)
        return candidate

    def _select(self, candidates, score: Callable, minimize: bool) -> tuple:
        pool = list(candidates)
        if not pool:
            raise ValueError("extremum over an empty candidate set")
        scores = [score(c) for c in pool]
        target = min(scores) if minimize else max(scores)
        ties = [c for c, s in zip(pool, scores) if s == target]
        return max(ties, key=self._key)

    def argmax_star(self, candidates, score: Callable) -> tuple:
        return self._select(candidates, score, minimize=False)

    def argmin_star(self, candidates, score: Callable) -> tuple:
        return self._select(candidates, score, minimize=True)


@dataclass(frozen=True)
class TaggedState:
    """Provenance of one constructed state.

    kind "W0": a mutual-rationality state; "Wi": a state where ``player``
    has switched; "flat": one state per profile (IR witness); "lifted": a
    (profile, base state) pair, ``added`` when the base state came from the
    self-believing augmentation.
    """

    kind: str
    profile: Profile
    player: Optional[int] = None
    base_state: Optional[int] = None
    added: bool = False

    def to_json_dict(self) -> dict:
        out = {"kind": self.kind, "profile": list(self.profile)}
        if self.player is not None:
            out["player"] = self.player
        if self.base_state is not None:
            out["base_state"] = self.base_state
        if self.kind == "lifted":
            out["added"] = self.added
        return out


@dataclass(frozen=True)
class WitnessResult:
    structure: CounterfactualStructure
    designated_state: int
    tags: tuple


@dataclass(frozen=True)
class LiftResult:
    structure: CounterfactualStructure
    state_map: tuple  # original base state -> lifted state index
    tags: tuple


def _utility_vs(game: Game, player: int, sigma: int):
    def score(tau: tuple):
        return game.utility(insert_strategy(player, sigma, tau), player)

    return score


def _punishment_states(
    game: Game, z: Restriction, order: TotalOrder
) -> Tuple[List[Profile], List[TaggedState], Dict, Dict]:
    w0_profiles = list(z.profiles())
    tags: List[TaggedState] = [TaggedState("W0", prof) for prof in w0_profiles]
    w0_index = {prof: idx for idx, prof in enumerate(w0_profiles)}
    wi_index: Dict[Tuple[int, Profile], int] = {}
    for i in game.players:
        pools = [
            tuple(game.strategies(j)) if j == i else z.sets[j] for j in game.players
        ]
        for prof in product(*pools):
            wi_index[(i, prof)] = len(tags)
            tags.append(TaggedState("Wi", prof, player=i))
    profiles = [t.profile for t in tags]
    return profiles, tags, w0_index, wi_index


def _build_punishment_structure(
    game: Game,
    z: Restriction,
    order: TotalOrder,
    kw_profile: Optional[Profile] = None,
) -> Tuple[CounterfactualStructure, List[TaggedState], Dict]:
    """Common core of the CCBR and KW witnesses.

    In mutual-rationality states every player believes the others maximize
    his utility; a player who has switched believes they minimize it.  The
    closest-state map sends a switch to the state where the opponents play
    the utility-minimizing response to the new strategy (within Z).
    ``kw_profile`` additionally pins that profile's W0 state to believe in
    itself, for every player.
    """
    profiles, tags, w0_index, wi_index = _punishment_states(game, z, order)
    num_states = len(profiles)

    def maximal_response(j: int, sigma: int) -> tuple:
        others = [z.sets[jj] for jj in game.players if jj != j]
        return order.argmax_star(product(*others), _utility_vs(game, j, sigma))

    def minimal_response(j: int, sigma: int) -> tuple:
        others = [z.sets[jj] for jj in game.players if jj != j]
        return order.argmin_star(product(*others), _utility_vs(game, j, sigma))

    beliefs = []
    for j in game.players:
        per_state = []
        for idx in range(num_states):
            tag = tags[idx]
            prof = tag.profile
            if kw_profile is not None and tag.kind == "W0" and prof == kw_profile:
                per_state.append(Distribution.point(idx))
                continue
            if tag.kind == "Wi" and tag.player == j:
                target = insert_strategy(j, prof[j], minimal_response(j, prof[j]))
                per_state.append(Distribution.point(wi_index[(j, target)]))
            else:
                target = insert_strategy(j, prof[j], maximal_response(j, prof[j]))
                per_state.append(Distribution.point(w0_index[target]))
        beliefs.append(tuple(per_state))

    closest = []
    for idx in range(num_states):
        prof = tags[idx].profile
        by_player = []
        for j in game.players:
            row = []
            for sigma in game.strategies(j):
                if sigma == prof[j]:
                    row.append(idx)
                else:
                    target = insert_strategy(j, sigma, minimal_response(j, sigma))
                    row.append(wi_index[(j, target)])
            by_player.append(tuple(row))
        closest.append(tuple(by_player))

    structure = CounterfactualStructure(
        game=game,
        strategy_map=tuple(profiles),
        closest=tuple(closest),
        beliefs=tuple(beliefs),
    )
    return structure, tags, w0_index


def _verify(structure: CounterfactualStructure, strong: bool, what: str) -> None:
    report = (
        validate_strongly_appropriate(structure)
        if strong
        else validate_appropriate(structure)
    )
    if not report.ok:
        raise ConstructionError(f"{what} failed validation", report)


def build_ccbr_witness(
    game: Game,
    profile: Profile,
    z: Restriction,
    order: TotalOrder = TotalOrder(),
) -> WitnessResult:
    """Strongly appropriate structure whose designated state plays
    ``profile`` and satisfies every rationality level."""
    game.check_profile(profile)
    failure = z_sets_failure(game, profile, z)
    if failure is not None:
        raise PreconditionError(failure)
    structure, tags, w0_index = _build_punishment_structure(game, z, order)
    designated = w0_index[tuple(profile)]
    _verify(structure, strong=True, what="ccbr witness")
    holds, _ = ccbr_check(structure, designated)
    if not holds:
        raise ConstructionError("ccbr witness does not satisfy CCBR")
    return WitnessResult(structure=structure, designated_state=designated, tags=tuple(tags))


def build_kw_witness(
    game: Game,
    profile: Profile,
    z: Restriction,
    order: TotalOrder = TotalOrder(),
) -> WitnessResult:
    """CCBR witness whose designated state is additionally self-believing
    for every player (so the exact world state is known there)."""
    game.check_profile(profile)
    failure = z_sets_failure(game, profile, z)
    if failure is not None:
        raise PreconditionError(failure)
    profile = tuple(profile)
    if profile not in set(ir_prime(game, z)):
        raise PreconditionError(
            "profile is not individually rational against Z with full-game deviations"
        )
    structure, tags, w0_index = _build_punishment_structure(
        game, z, order, kw_profile=profile
    )
    designated = w0_index[profile]
    _verify(structure, strong=True, what="kw witness")
    checker = ModelChecker(structure)
    if not checker.satisfies(designated, KW()):
        raise ConstructionError("kw witness does not satisfy KW")
    holds, _ = ccbr_check(structure, designated)
    if not holds:
        raise ConstructionError("kw witness does not satisfy CCBR")
    return WitnessResult(structure=structure, designated_state=designated, tags=tuple(tags))


def build_ir_witness(
    game: Game,
    profile: Profile,
    order: TotalOrder = TotalOrder(),
) -> WitnessResult:
    """One self-believing state per profile; deviations are punished with
    the full-game utility-minimizing response."""
    game.check_profile(profile)
    profile = tuple(profile)
    if profile not in set(ir_set(game)):
        raise PreconditionError("profile is not individually rational")
    all_profiles = list(game.profiles())
    index = {prof: idx for idx, prof in enumerate(all_profiles)}
    full = Restriction.full(game)

    def minimal_response(j: int, sigma: int) -> tuple:
        others = [full.sets[jj] for jj in game.players if jj != j]
        return order.argmin_star(product(*others), _utility_vs(game, j, sigma))

    beliefs = tuple(
        tuple(Distribution.point(idx) for idx in range(len(all_profiles)))
        for _ in game.players
    )
    closest = []
    for prof in all_profiles:
        by_player = []
        for j in game.players:
            row = []
            for sigma in game.strategies(j):
                if sigma == prof[j]:
                    row.append(index[prof])
                else:
                    target = insert_strategy(j, sigma, minimal_response(j, sigma))
                    row.append(index[target])
            by_player.append(tuple(row))
        closest.append(tuple(by_player))

    structure = CounterfactualStructure(
        game=game,
        strategy_map=tuple(all_profiles),
        closest=tuple(closest),
        beliefs=beliefs,
    )
    designated = index[profile]
    tags = tuple(TaggedState("flat", prof) for prof in all_profiles)
    _verify(structure, strong=True, what="ir witness")
    checker = ModelChecker(structure)
    goal = And(And(KW(), PlayProfile(profile)), CB(RatAll()))
    if not checker.satisfies(designated, goal):
        raise ConstructionError("ir witness does not satisfy KW & play & CB RAT")
    return WitnessResult(structure=structure, designated_state=designated, tags=tags)


def lift_unilateral(base: CounterfactualStructure) -> LiftResult:
    """Product lift (profile, base state) of a probability structure.

    The base's closest-state table is ignored; only its strategy map and
    beliefs matter, and they must satisfy the two belief conditions.  The
    base is first augmented so every profile has a state that is
    self-believing for all players.  In the lift, a state's player-i belief
    is the base belief pushed onto states whose profile keeps i's current
    strategy and takes the opponents' strategies from the believed base
    state; deviations move only the deviator's profile coordinate.  The
    result is strongly appropriate and respects unilateral deviations.
    """
    report = _validate_probability(base)
    if not report.ok:
        raise PreconditionError(
            f"base structure violates the belief conditions: "
            f"{report.violations[0].detail}"
        )
    game = base.game
    original = base.num_states
    aug_s = list(base.strategy_map)
    aug_beliefs = [list(per_state) for per_state in base.beliefs]

    self_believing = set()
    for omega in base.states:
        if all(base.belief(i, omega).weight(omega) == 1 for i in game.players):
            self_believing.add(base.profile(omega))
    for prof in game.profiles():
        if prof not in self_believing:
            idx = len(aug_s)
            aug_s.append(prof)
            for i in game.players:
                aug_beliefs[i].append(Distribution.point(idx))

    num_base = len(aug_s)
    all_profiles = list(game.profiles())
    profile_rank = {prof: r for r, prof in enumerate(all_profiles)}

    def lifted_index(prof: Profile, omega: int) -> int:
        return profile_rank[prof] * num_base + omega

    strategy_map = []
    tags = []
    for prof in all_profiles:
        for omega in range(num_base):
            strategy_map.append(prof)
            tags.append(
                TaggedState(
                    "lifted", prof, base_state=omega, added=omega >= original
                )
            )

    beliefs = []
    for i in game.players:
        per_state = []
        for prof in all_profiles:
            for omega in range(num_base):
                weights = {}
                for target, w in aug_beliefs[i][omega].items:
                    others = aug_s[target][:i] + aug_s[target][i + 1 :]
                    moved = lifted_index(insert_strategy(i, prof[i], others), target)
                    weights[moved] = weights.get(moved, 0) + w
                per_state.append(Distribution(tuple(sorted(weights.items()))))
        beliefs.append(tuple(per_state))

    closest = []
    for prof in all_profiles:
        for omega in range(num_base):
            by_player = []
            for i in game.players:
                others = prof[:i] + prof[i + 1 :]
                row = tuple(
                    lifted_index(insert_strategy(i, sigma, others), omega)
                    for sigma in game.strategies(i)
                )
                by_player.append(row)
            closest.append(tuple(by_player))

    structure = CounterfactualStructure(
        game=game,
        strategy_map=tuple(strategy_map),
        closest=tuple(closest),
        beliefs=tuple(beliefs),
    )
    _verify(structure, strong=True, what="unilateral lift")
    state_map = tuple(
        lifted_index(base.profile(omega), omega) for omega in range(original)
    )
    return LiftResult(structure=structure, state_map=state_map, tags=tuple(tags))


def _validate_probability(m: CounterfactualStructure) -> ValidationReport:
    """P1/P2 checks only; the closest-state table is irrelevant here."""
    full = validate_appropriate(m)
    kept = tuple(v for v in full.violations if v.condition in ("P1", "P2"))
    return ValidationReport(kept)
