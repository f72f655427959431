"""Counterfactual structures: finite state spaces with a strategy map, a
closest-state table and per-player probability-1 belief assignments.

The closest-state function is stored as an explicit total table so the
validators are total and exact.  Validators return complete violation
lists (tags P1, P2, F1, F2, SA) rather than stopping at the first defect.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Union

from .games import (
    Game,
    Profile,
    format_rational,
    parse_game,
    parse_rational,
    serialize_game,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


class StructureFormatError(ValueError):
    """Malformed structure data; ``path`` names the offending location."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class Distribution:
    """Exact probability distribution over state indices.

    Zero weights are dropped at construction, so equality and hashing are
    value equality of the supports and weights.
    """

    items: tuple  # sorted ((state, Fraction), ...), weights > 0

    @classmethod
    def from_weights(cls, weights: Mapping) -> "Distribution":
        total = _ZERO
        items = []
        for state in sorted(weights):
            w = weights[state]
            if w < 0:
                raise ValueError(f"negative weight {w} on state {state}")
            if w > 0:
                items.append((state, w))
            total += w
        if total != 1:
            raise ValueError(f"weights sum {format_rational(total)} != 1")
        return cls(tuple(items))

    @classmethod
    def point(cls, state: int) -> "Distribution":
        return cls(((state, _ONE),))

    def support(self) -> tuple:
        return tuple(state for state, _ in self.items)

    def weight(self, state: int) -> Fraction:
        for s, w in self.items:
            if s == state:
                return w
        return _ZERO

    def mass(self, states: Iterable) -> Fraction:
        members = set(states)
        return sum((w for s, w in self.items if s in members), _ZERO)

    def pushforward(self, fn: Callable) -> "Distribution":
        acc = {}
        for state, w in self.items:
            target = fn(state)
            acc[target] = acc.get(target, _ZERO) + w
        return Distribution(tuple(sorted(acc.items())))

    def to_json_dict(self) -> dict:
        return {str(state): format_rational(w) for state, w in self.items}


@dataclass(frozen=True)
class CounterfactualStructure:
    """(states, strategy map s, closest-state table f, beliefs PR_i).

    ``closest[state][player][strategy]`` is the state the player lands in
    after switching to that strategy; ``beliefs[player][state]`` is PR_i(ω).
    Construction checks only structural totality; appropriateness is the
    validators' job.
    """

    game: Game
    strategy_map: tuple  # Profile per state
    closest: tuple  # [state][player][strategy] -> state
    beliefs: tuple  # [player][state] -> Distribution

    def __post_init__(self):
        n = self.num_states
        for omega, profile in enumerate(self.strategy_map):
            self.game.check_profile(profile)
        if len(self.closest) != n:
            raise ValueError("closest-state table must cover every state")
        for omega, by_player in enumerate(self.closest):
            if len(by_player) != self.game.num_players:
                raise ValueError(f"state {omega}: closest table missing players")
            for i, row in enumerate(by_player):
                if len(row) != len(self.game.strategy_names[i]):
                    raise ValueError(
                        f"state {omega}, player {i}: closest table not total"
                    )
                for target in row:
                    if not 0 <= target < n:
                        raise ValueError(f"closest target {target} out of range")
        if len(self.beliefs) != self.game.num_players:
            raise ValueError("one belief assignment per player required")
        for i, per_state in enumerate(self.beliefs):
            if len(per_state) != n:
                raise ValueError(f"player {i}: one distribution per state required")
            for omega, dist in enumerate(per_state):
                for state, _ in dist.items:
                    if not 0 <= state < n:
                        raise ValueError(
                            f"player {i}, state {omega}: belief on unknown state {state}"
                        )

    @property
    def num_states(self) -> int:
        return len(self.strategy_map)

    @property
    def states(self) -> range:
        return range(self.num_states)

    def profile(self, omega: int) -> Profile:
        return self.strategy_map[omega]

    def own_strategy(self, omega: int, player: int) -> int:
        return self.strategy_map[omega][player]

    def others_profile(self, omega: int, player: int) -> tuple:
        prof = self.strategy_map[omega]
        return prof[:player] + prof[player + 1 :]

    def belief(self, player: int, omega: int) -> Distribution:
        return self.beliefs[player][omega]

    def closest_state(self, omega: int, player: int, strategy: int) -> int:
        return self.closest[omega][player][strategy]


def counterfactual_belief(
    m: CounterfactualStructure, omega: int, player: int, strategy: int
) -> Distribution:
    """What the player believes would happen after switching: the
    pushforward of PR_i(omega) through the closest-state map."""
    return m.belief(player, omega).pushforward(
        lambda state: m.closest_state(state, player, strategy)
    )


@dataclass(frozen=True)
class Violation:
    condition: str  # P1 | P2 | F1 | F2 | SA
    state: int
    player: Optional[int]
    strategy: Optional[int]
    detail: str

    def to_json_dict(self) -> dict:
        out = {"condition": self.condition, "state": self.state, "detail": self.detail}
        if self.player is not None:
            out["player"] = self.player
        if self.strategy is not None:
            out["strategy"] = self.strategy
        return out


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [v.to_json_dict() for v in self.violations],
        }


def validate_appropriate(m: CounterfactualStructure) -> ValidationReport:
    """Check belief-of-own-strategy (P1), belief-of-own-beliefs (P2) and the
    closest-state axioms (F1, F2), reporting every violation."""
    found = []
    for i in m.game.players:
        for omega in m.states:
            dist = m.belief(i, omega)
            own = m.own_strategy(omega, i)
            for target in dist.support():
                if m.own_strategy(target, i) != own:
                    found.append(
                        Violation(
                            "P1",
                            omega,
                            i,
                            None,
                            f"belief puts weight on state {target} where the "
                            f"player plays {m.own_strategy(target, i)} != {own}",
                        )
                    )
                if m.belief(i, target) != dist:
                    found.append(
                        Violation(
                            "P2",
                            omega,
                            i,
                            None,
                            f"belief puts weight on state {target} with a "
                            f"different belief assignment",
                        )
                    )
    for omega in m.states:
        for i in m.game.players:
            for sigma in m.game.strategies(i):
                target = m.closest_state(omega, i, sigma)
                if m.own_strategy(target, i) != sigma:
                    found.append(
                        Violation(
                            "F1",
                            omega,
                            i,
                            sigma,
                            f"closest state {target} plays "
                            f"{m.own_strategy(target, i)}, not {sigma}",
                        )
                    )
                if sigma == m.own_strategy(omega, i) and target != omega:
                    found.append(
                        Violation(
                            "F2",
                            omega,
                            i,
                            sigma,
                            f"closest state for the played strategy is {target}, "
                            f"not the state itself",
                        )
                    )
    return ValidationReport(tuple(found))


def validate_strongly_appropriate(m: CounterfactualStructure) -> ValidationReport:
    """Appropriateness plus counterfactual-belief self-knowledge: every
    state in the support of PR^c has that same PR^c (tag SA)."""
    base = validate_appropriate(m)
    found = list(base.violations)
    for i in m.game.players:
        for omega in m.states:
            for sigma in m.game.strategies(i):
                cf = counterfactual_belief(m, omega, i, sigma)
                for target in cf.support():
                    if counterfactual_belief(m, target, i, sigma) != cf:
                        found.append(
                            Violation(
                                "SA",
                                omega,
                                i,
                                sigma,
                                f"counterfactual belief differs at support "
                                f"state {target}",
                            )
                        )
    return ValidationReport(tuple(found))


def respects_unilateral_deviations(m: CounterfactualStructure) -> bool:
    """Do deviations leave everyone else's strategies and beliefs fixed?"""
    for omega in m.states:
        for i in m.game.players:
            for sigma in m.game.strategies(i):
                target = m.closest_state(omega, i, sigma)
                if m.others_profile(target, i) != m.others_profile(omega, i):
                    return False
                for j in m.game.players:
                    if j != i and m.belief(j, target) != m.belief(j, omega):
                        return False
    return True


def _projection(m: CounterfactualStructure, player: int, dist: Distribution) -> dict:
    """Project a distribution onto the opponents' (strategies, beliefs)."""
    out = {}
    for state, w in dist.items:
        key = (
            m.others_profile(state, player),
            tuple(m.belief(j, state) for j in m.game.players if j != player),
        )
        out[key] = out.get(key, _ZERO) + w
    return out


def _tv_distance(p: dict, q: dict) -> Fraction:
    keys = set(p) | set(q)
    return sum((abs(p.get(k, _ZERO) - q.get(k, _ZERO)) for k in keys), _ZERO) / 2


def epsilon_closeness(m: CounterfactualStructure) -> Fraction:
    """Worst-case total-variation gap between a player's counterfactual and
    actual beliefs, both projected onto the opponents' strategies-and-beliefs.

    Structures respecting unilateral deviations report exactly 0.
    """
    worst = _ZERO
    for i in m.game.players:
        for omega in m.states:
            actual = _projection(m, i, m.belief(i, omega))
            for sigma in m.game.strategies(i):
                cf = _projection(m, i, counterfactual_belief(m, omega, i, sigma))
                gap = _tv_distance(cf, actual)
                if gap > worst:
                    worst = gap
    return worst


# ---------------------------------------------------------------------------
# Serialization


def serialize_structure(m: CounterfactualStructure, include_game: bool = True) -> str:
    payload = structure_json_dict(m, include_game=include_game)
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def structure_json_dict(m: CounterfactualStructure, include_game: bool = True) -> dict:
    f_entries = []
    for omega in m.states:
        for i in m.game.players:
            for sigma in m.game.strategies(i):
                f_entries.append(
                    {
                        "state": omega,
                        "player": i,
                        "strategy": sigma,
                        "to": m.closest_state(omega, i, sigma),
                    }
                )
    payload = {
        "states": m.num_states,
        "s": [list(profile) for profile in m.strategy_map],
        "f": f_entries,
        "beliefs": [
            [m.belief(i, omega).to_json_dict() for omega in m.states]
            for i in m.game.players
        ],
    }
    if include_game:
        payload["game"] = json.loads(serialize_game(m.game))
    return payload


def parse_structure(
    text: Union[str, bytes, dict],
    game: Optional[Game] = None,
    load_game_path: Optional[Callable] = None,
) -> CounterfactualStructure:
    """Parse the structure JSON schema against ``game`` (or the inline/path
    "game" field).  Validation of appropriateness is NOT implied."""
    if isinstance(text, (str, bytes)):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StructureFormatError("$", f"invalid JSON: {exc}") from exc
    else:
        data = text
    if not isinstance(data, dict):
        raise StructureFormatError("$", "expected a JSON object")
    unknown = set(data) - {"game", "states", "s", "f", "beliefs"}
    if unknown:
        raise StructureFormatError(sorted(unknown)[0], "unknown field")

    if game is None:
        if "game" not in data:
            raise StructureFormatError("game", "missing field and no game supplied")
        spec = data["game"]
        if isinstance(spec, str):
            if load_game_path is None:
                raise StructureFormatError("game", "game paths are not allowed here")
            game = load_game_path(spec)
        else:
            game = parse_game(spec)

    num_states = data.get("states")
    if not isinstance(num_states, int) or num_states < 1:
        raise StructureFormatError("states", "expected a positive integer")

    s_rows = data.get("s")
    if not isinstance(s_rows, list) or len(s_rows) != num_states:
        raise StructureFormatError("s", f"expected {num_states} profiles")
    strategy_map = []
    for omega, row in enumerate(s_rows):
        if not isinstance(row, list) or len(row) != game.num_players:
            raise StructureFormatError(f"s[{omega}]", "malformed profile")
        try:
            game.check_profile(tuple(row))
        except ValueError as exc:
            raise StructureFormatError(f"s[{omega}]", str(exc)) from exc
        strategy_map.append(tuple(row))

    table = [
        [[None] * len(game.strategy_names[i]) for i in game.players]
        for _ in range(num_states)
    ]
    entries = data.get("f")
    if not isinstance(entries, list):
        raise StructureFormatError("f", "expected an array of entries")
    for idx, entry in enumerate(entries):
        path = f"f[{idx}]"
        if not isinstance(entry, dict) or set(entry) != {
            "state",
            "player",
            "strategy",
            "to",
        }:
            raise StructureFormatError(path, "expected state/player/strategy/to")
        omega, i, sigma, target = (
            entry["state"],
            entry["player"],
            entry["strategy"],
            entry["to"],
        )
        if not (isinstance(omega, int) and 0 <= omega < num_states):
            raise StructureFormatError(f"{path}.state", "state out of range")
        if not (isinstance(i, int) and 0 <= i < game.num_players):
            raise StructureFormatError(f"{path}.player", "player out of range")
        if not (isinstance(sigma, int) and 0 <= sigma < len(game.strategy_names[i])):
            raise StructureFormatError(f"{path}.strategy", "strategy out of range")
        if not (isinstance(target, int) and 0 <= target < num_states):
            raise StructureFormatError(f"{path}.to", "target state out of range")
        if table[omega][i][sigma] is not None:
            raise StructureFormatError(path, "duplicate closest-state entry")
        table[omega][i][sigma] = target
    for omega in range(num_states):
        for i in game.players:
            for sigma in game.strategies(i):
                if table[omega][i][sigma] is None:
                    raise StructureFormatError(
                        "f",
                        f"missing entry for state {omega}, player {i}, "
                        f"strategy {sigma}",
                    )

    belief_rows = data.get("beliefs")
    if not isinstance(belief_rows, list) or len(belief_rows) != game.num_players:
        raise StructureFormatError("beliefs", "expected one list per player")
    beliefs = []
    for i, per_state in enumerate(belief_rows):
        if not isinstance(per_state, list) or len(per_state) != num_states:
            raise StructureFormatError(
                f"beliefs[{i}]", f"expected {num_states} distributions"
            )
        dists = []
        for omega, weights in enumerate(per_state):
            path = f"beliefs[{i}][{omega}]"
            if not isinstance(weights, dict):
                raise StructureFormatError(path, "expected a state->weight object")
            parsed = {}
            for key, raw in weights.items():
                try:
                    state = int(key)
                except ValueError:
                    raise StructureFormatError(path, f"bad state key {key!r}") from None
                if not 0 <= state < num_states:
                    raise StructureFormatError(path, f"state {state} out of range")
                try:
                    parsed[state] = parse_rational(raw, f"{path}[{key}]")
                except ValueError as exc:
                    raise StructureFormatError(f"{path}[{key}]", str(exc)) from exc
            try:
                dists.append(Distribution.from_weights(parsed))
            except ValueError as exc:
                raise StructureFormatError(path, str(exc)) from exc
        beliefs.append(tuple(dists))

    return CounterfactualStructure(
        game=game,
        strategy_map=tuple(strategy_map),
        closest=tuple(
            tuple(tuple(row) for row in by_player) for by_player in table
        ),
        beliefs=tuple(beliefs),
    )
