"""Finite normal-form games with exact rational payoffs.

Payoffs (and every probability elsewhere in the package) are
`fractions.Fraction` values; no floating point enters any comparison.
Players and strategies are identified by dense 0-based indices; names are
display metadata kept for serialization and the CLI.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

Profile = tuple  # tuple[int, ...], one strategy index per player

_RATIONAL_RE = re.compile(r"^(-?\d+)/(\d+)$")


class GameFormatError(ValueError):
    """Malformed game data; ``path`` names the offending JSON location."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def parse_rational(value: object, path: str = "value") -> Fraction:
    """Parse an exact rational from an int or a ``"num/den"`` string.

    Floats are rejected: rounding would corrupt the exact set identities
    and strict inequalities the rest of the package relies on.
    """
    if isinstance(value, bool):
        raise GameFormatError(path, f"expected rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        match = _RATIONAL_RE.match(value)
        if match is None:
            raise GameFormatError(path, f'expected "num/den", got {value!r}')
        den = int(match.group(2))
        if den == 0:
            raise GameFormatError(path, "zero denominator")
        return Fraction(int(match.group(1)), den)
    raise GameFormatError(
        path, f'expected int or "num/den" string, got {type(value).__name__}'
    )


def format_rational(q: Fraction) -> Union[int, str]:
    """Canonical JSON form: bare int when integral, else lowest-terms "num/den"."""
    if q.denominator == 1:
        return int(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Game:
    """A finite normal-form game with a total exact-rational payoff tensor.

    ``utilities`` holds one row per strategy profile (profiles enumerated in
    lexicographic order, player 0 varying slowest) and one entry per player.
    """

    player_names: tuple
    strategy_names: tuple
    utilities: tuple

    def __post_init__(self):
        if len(self.player_names) < 1:
            raise GameFormatError("players", "need at least one player")
        if len(self.strategy_names) != len(self.player_names):
            raise GameFormatError("strategies", "one strategy list per player required")
        for i, names in enumerate(self.strategy_names):
            if len(names) < 1:
                raise GameFormatError(f"strategies[{i}]", "player needs at least one strategy")
            if len(set(names)) != len(names):
                raise GameFormatError(f"strategies[{i}]", "strategy names must be unique")
        expected = 1
        for names in self.strategy_names:
            expected *= len(names)
        if len(self.utilities) != expected:
            raise GameFormatError(
                "payoffs", f"expected {expected} profiles, got {len(self.utilities)}"
            )
        for rank, row in enumerate(self.utilities):
            if len(row) != len(self.player_names):
                raise GameFormatError(
                    f"payoffs(rank {rank})",
                    f"expected {len(self.player_names)} utilities, got {len(row)}",
                )
            for q in row:
                if not isinstance(q, Fraction):
                    raise GameFormatError(f"payoffs(rank {rank})", "utilities must be Fractions")

    @property
    def num_players(self) -> int:
        return len(self.player_names)

    @property
    def strategy_counts(self) -> tuple:
        return tuple(len(names) for names in self.strategy_names)

    @property
    def players(self) -> range:
        return range(self.num_players)

    def strategies(self, player: int) -> range:
        return range(len(self.strategy_names[player]))

    def profiles(self) -> Iterator[Profile]:
        """All strategy profiles in rank (lexicographic) order."""
        return product(*(self.strategies(i) for i in self.players))

    def profile_rank(self, profile: Profile) -> int:
        self.check_profile(profile)
        rank = 0
        for i, sigma in enumerate(profile):
            rank = rank * len(self.strategy_names[i]) + sigma
        return rank

    def check_profile(self, profile: Sequence) -> None:
        if len(profile) != self.num_players:
            raise ValueError(
                f"profile {profile!r} has {len(profile)} entries for "
                f"{self.num_players} players"
            )
        for i, sigma in enumerate(profile):
            if not isinstance(sigma, int) or not 0 <= sigma < len(self.strategy_names[i]):
                raise ValueError(f"profile {profile!r}: invalid strategy for player {i}")

    def utility(self, profile: Profile, player: int) -> Fraction:
        """u_player(profile), exactly."""
        if not 0 <= player < self.num_players:
            raise ValueError(f"no player {player}")
        return self.utilities[self.profile_rank(profile)][player]

    def payoff_vector(self, profile: Profile) -> tuple:
        return self.utilities[self.profile_rank(profile)]

    def strategy_index(self, player: int, label: Union[int, str]) -> int:
        """Resolve a strategy given as an index or a display name."""
        names = self.strategy_names[player]
        if isinstance(label, int):
            if not 0 <= label < len(names):
                raise ValueError(f"player {player} has no strategy {label}")
            return label
        if label in names:
            return names.index(label)
        if label.isdigit() and 0 <= int(label) < len(names) and label not in names:
            return int(label)
        raise ValueError(f"player {player} has no strategy named {label!r}")

    def profile_from_labels(self, labels: Sequence) -> Profile:
        if len(labels) != self.num_players:
            raise ValueError(f"expected {self.num_players} strategies, got {len(labels)}")
        return tuple(self.strategy_index(i, lab) for i, lab in enumerate(labels))

    @classmethod
    def from_function(
        cls,
        player_names: Sequence,
        strategy_names: Sequence,
        payoff: Callable,
    ) -> "Game":
        """Build a game from ``payoff(profile) -> sequence of rationals``."""
        names = tuple(tuple(s) for s in strategy_names)
        rows = []
        for profile in product(*(range(len(s)) for s in names)):
            rows.append(tuple(Fraction(q) for q in payoff(profile)))
        return cls(tuple(player_names), names, tuple(rows))


@dataclass(frozen=True)
class Restriction:
    """Nonempty per-player strategy subsets (the Z_i / survivor sets).

    ``sets`` holds one sorted, duplicate-free index tuple per player.
    """

    sets: tuple

    def __post_init__(self):
        for i, entries in enumerate(self.sets):
            if len(entries) == 0:
                raise ValueError(f"restriction for player {i} is empty")
            if list(entries) != sorted(set(entries)):
                raise ValueError(f"restriction for player {i} must be sorted and unique")

    @classmethod
    def from_sets(cls, sets: Iterable) -> "Restriction":
        return cls(tuple(tuple(sorted(set(entries))) for entries in sets))

    @classmethod
    def full(cls, game: Game) -> "Restriction":
        return cls(tuple(tuple(game.strategies(i)) for i in game.players))

    def validate_for(self, game: Game) -> None:
        if len(self.sets) != game.num_players:
            raise ValueError(
                f"restriction has {len(self.sets)} players, game has {game.num_players}"
            )
        for i, entries in enumerate(self.sets):
            for sigma in entries:
                if not 0 <= sigma < len(game.strategy_names[i]):
                    raise ValueError(f"player {i} has no strategy {sigma}")

    @property
    def num_players(self) -> int:
        return len(self.sets)

    def contains(self, profile: Profile) -> bool:
        return len(profile) == len(self.sets) and all(
            sigma in entries for sigma, entries in zip(profile, self.sets)
        )

    def profiles(self) -> Iterator[Profile]:
        return product(*self.sets)

    def opponent_profiles(self, player: int) -> Iterator[tuple]:
        """Sub-profiles over the players other than ``player``, in player order.

        For a 1-player game this yields the single empty tuple, so min/max
        over opponents' choices is always over a nonempty set.
        """
        others = [entries for j, entries in enumerate(self.sets) if j != player]
        return product(*others)

    def replace(self, player: int, strategies: Iterable) -> "Restriction":
        entries = tuple(sorted(set(strategies)))
        if not entries:
            raise ValueError(f"restriction for player {player} is empty")
        return Restriction(
            tuple(entries if j == player else s for j, s in enumerate(self.sets))
        )

    def is_subset_of(self, other: "Restriction") -> bool:
        return all(
            set(mine) <= set(theirs) for mine, theirs in zip(self.sets, other.sets)
        )

    def size(self) -> int:
        total = 0
        for entries in self.sets:
            total += len(entries)
        return total


def insert_strategy(player: int, sigma: int, opponents: tuple) -> Profile:
    """Full profile from player ``player``'s strategy and a -i sub-profile."""
    return opponents[:player] + (sigma,) + opponents[player:]


def drop_strategy(player: int, profile: Profile) -> tuple:
    """The -player sub-profile of ``profile``."""
    return profile[:player] + profile[player + 1 :]


# ---------------------------------------------------------------------------
# Serialization


def serialize_game(game: Game) -> str:
    """Canonical JSON: sorted keys, lowest-terms rationals, ints for integers.

    ``parse_game(serialize_game(g))`` equals ``g``, and re-serializing is
    byte-identical.
    """

    def tensor(prefix: Profile, player: int):
        if player == game.num_players:
            return [format_rational(q) for q in game.payoff_vector(prefix)]
        return [tensor(prefix + (s,), player + 1) for s in game.strategies(player)]

    payload = {
        "players": list(game.player_names),
        "strategies": [list(names) for names in game.strategy_names],
        "payoffs": tensor((), 0),
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def parse_game(text: Union[str, bytes, dict]) -> Game:
    """Parse the game JSON schema, validating totality and exactness."""
    if isinstance(text, (str, bytes)):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GameFormatError("$", f"invalid JSON: {exc}") from exc
    else:
        data = text
    if not isinstance(data, dict):
        raise GameFormatError("$", "expected a JSON object")
    unknown = set(data) - {"players", "strategies", "payoffs"}
    if unknown:
        raise GameFormatError(sorted(unknown)[0], "unknown field")
    for key in ("players", "strategies", "payoffs"):
        if key not in data:
            raise GameFormatError(key, "missing field")

    players = data["players"]
    if not isinstance(players, list) or not players:
        raise GameFormatError("players", "expected a nonempty array of names")
    for i, name in enumerate(players):
        if not isinstance(name, str):
            raise GameFormatError(f"players[{i}]", "expected a string")

    strategies = data["strategies"]
    if not isinstance(strategies, list) or len(strategies) != len(players):
        raise GameFormatError("strategies", f"expected {len(players)} strategy lists")
    for i, names in enumerate(strategies):
        if not isinstance(names, list) or not names:
            raise GameFormatError(f"strategies[{i}]", "expected a nonempty array of names")
        for j, name in enumerate(names):
            if not isinstance(name, str):
                raise GameFormatError(f"strategies[{i}][{j}]", "expected a string")

    counts = [len(names) for names in strategies]
    rows = [None] * _prod(counts)

    def walk(node, player: int, path: str, prefix: tuple):
        if player == len(players):
            if not isinstance(node, list) or len(node) != len(players):
                raise GameFormatError(path, f"expected {len(players)} utilities")
            rank = 0
            for i, sigma in enumerate(prefix):
                rank = rank * counts[i] + sigma
            rows[rank] = tuple(
                parse_rational(entry, f"{path}[{i}]") for i, entry in enumerate(node)
            )
            return
        if not isinstance(node, list):
            raise GameFormatError(path, "expected an array")
        if len(node) != counts[player]:
            raise GameFormatError(
                path, f"expected {counts[player]} entries, got {len(node)}"
            )
        for sigma, child in enumerate(node):
            walk(child, player + 1, f"{path}[{sigma}]", prefix + (sigma,))

    walk(data["payoffs"], 0, "payoffs", ())
    if any(row is None for row in rows):
        raise GameFormatError("payoffs", "payoff tensor is not total")
    return Game(
        tuple(players),
        tuple(tuple(names) for names in strategies),
        tuple(rows),
    )


def _prod(values: Sequence) -> int:
    out = 1
    for v in values:
        out *= v
    return out


# ---------------------------------------------------------------------------
# Built-in games


def pd(r, p) -> Game:
    """Prisoner's Dilemma between translucent firms: cooperate or sue.

    Suing yields a small reward r > 0; being sued costs the penalty p > 0.
    """
    r, p = Fraction(r), Fraction(p)
    if r <= 0 or p <= 0:
        raise ValueError("pd requires r > 0 and p > 0")
    table = {
        (0, 0): (Fraction(0), Fraction(0)),
        (0, 1): (-p, r),
        (1, 0): (r, -p),
        (1, 1): (r - p, r - p),
    }
    return Game.from_function(("P1", "P2"), (("C", "S"), ("C", "S")), table.__getitem__)


def reverse_traveler(k: int, p) -> Game:
    """Both players announce 1..k; both receive the smaller value and the
    player announcing the larger value earns the bonus p."""
    p = Fraction(p)
    if k < 1:
        raise ValueError("reverse_traveler requires k >= 1")
    if not 0 < p < 1:
        raise ValueError("reverse_traveler requires 0 < p < 1")

    def payoff(profile):
        x, y = profile[0] + 1, profile[1] + 1
        if x > y:
            return (y + p, Fraction(y))
        if y > x:
            return (Fraction(x), x + p)
        return (Fraction(x), Fraction(x))

    names = tuple(str(v + 1) for v in range(k))
    return Game.from_function(("P1", "P2"), (names, names), payoff)


def ex2() -> Game:
    """2x2 game whose profiles all survive minimax deletion while (b,d)
    fails individual rationality (row can always guarantee 100 with a)."""
    table = {
        (0, 0): (Fraction(100), Fraction(0)),
        (0, 1): (Fraction(100), Fraction(0)),
        (1, 0): (Fraction(150), Fraction(0)),
        (1, 1): (Fraction(50), Fraction(0)),
    }
    return Game.from_function(("Row", "Col"), (("a", "b"), ("c", "d")), table.__getitem__)


def builtin_games() -> dict:
    """Named constructors for the built-in example games."""
    return {"pd": pd, "reverse_traveler": reverse_traveler, "ex2": ex2}
