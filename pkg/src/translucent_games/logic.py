"""Formula language for counterfactual games: AST, parser and model checker.

Surface syntax numbers players from 1 (``RAT_1``, ``B_2 ...``); the AST and
all JSON carry 0-based indices.  Macro nodes (EB, EB*, SRAT^k, WRAT^k, RAT,
play(...)) expand purely syntactically, with no simplification, so the
expansion stays auditable against the defining abbreviations.

Common belief is the greatest fixpoint of the everyone-believes step
E(X) = {w : every player's belief puts mass 1 on X}; CB* uses the
counterfactual step quantified over every strategy switch.  Extensions are
memoized per checker, keyed by the (hashable) macro-free AST, which keeps
tower formulas polynomial to evaluate despite their exponential tree size.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from .games import Game, Profile, insert_strategy
from .kripke import CounterfactualStructure, Distribution, counterfactual_belief

_ONE = Fraction(1)


class FormulaParseError(ValueError):
    """Syntax or resolution error; ``column`` is 0-based into the text."""

    def __init__(self, message: str, column: int):
        self.column = column
        super().__init__(f"column {column}: {message}")


# ---------------------------------------------------------------------------
# AST


class Formula:
    """Base class; subclasses are frozen dataclasses usable as cache keys."""

    __slots__ = ()


@dataclass(frozen=True)
class TrueF(Formula):
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Play(Formula):
    player: int
    strategy: int

    def __str__(self):
        return f"play_{self.player + 1}(#{self.strategy})"


@dataclass(frozen=True)
class Rat(Formula):
    player: int

    def __str__(self):
        return f"RAT_{self.player + 1}"


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula

    def __str__(self):
        return f"! {self.sub}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class B(Formula):
    player: int
    sub: Formula

    def __str__(self):
        return f"B_{self.player + 1} {self.sub}"


@dataclass(frozen=True)
class K(Formula):
    player: int
    sub: Formula

    def __str__(self):
        return f"K_{self.player + 1} {self.sub}"


@dataclass(frozen=True)
class CB(Formula):
    sub: Formula

    def __str__(self):
        return f"CB {self.sub}"


@dataclass(frozen=True)
class CBStar(Formula):
    sub: Formula

    def __str__(self):
        return f"CB* {self.sub}"


@dataclass(frozen=True)
class KS(Formula):
    def __str__(self):
        return "KS"


@dataclass(frozen=True)
class KR(Formula):
    def __str__(self):
        return "KR"


@dataclass(frozen=True)
class KW(Formula):
    def __str__(self):
        return "KW"


# Macro nodes.


@dataclass(frozen=True)
class RatAll(Formula):
    def __str__(self):
        return "RAT"


@dataclass(frozen=True)
class PlayProfile(Formula):
    profile: tuple

    def __str__(self):
        inner = ",".join(f"#{s}" for s in self.profile)
        return f"play({inner})"


@dataclass(frozen=True)
class EB(Formula):
    sub: Formula

    def __str__(self):
        return f"EB {self.sub}"


@dataclass(frozen=True)
class EBStar(Formula):
    sub: Formula

    def __str__(self):
        return f"EB* {self.sub}"


@dataclass(frozen=True)
class SRat(Formula):
    level: int
    player: Optional[int] = None

    def __str__(self):
        tail = "" if self.player is None else f"_{self.player + 1}"
        return f"SRAT^{self.level}{tail}"


@dataclass(frozen=True)
class WRat(Formula):
    level: int
    player: Optional[int] = None

    def __str__(self):
        tail = "" if self.player is None else f"_{self.player + 1}"
        return f"WRAT^{self.level}{tail}"


def conj(parts: List[Formula]) -> Formula:
    """Left-associated conjunction; empty conjunction is true."""
    if not parts:
        return TrueF()
    node = parts[0]
    for part in parts[1:]:
        node = And(node, part)
    return node


def format_formula(phi: Formula, game: Game) -> str:
    """Grammar-conformant rendering with strategy names resolved."""
    if isinstance(phi, Play):
        return f"play_{phi.player + 1}({game.strategy_names[phi.player][phi.strategy]})"
    if isinstance(phi, PlayProfile):
        inner = ",".join(
            game.strategy_names[i][s] for i, s in enumerate(phi.profile)
        )
        return f"play({inner})"
    if isinstance(phi, Not):
        return f"! {format_formula(phi.sub, game)}"
    if isinstance(phi, And):
        return (
            f"({format_formula(phi.left, game)} & {format_formula(phi.right, game)})"
        )
    if isinstance(phi, B):
        return f"B_{phi.player + 1} {format_formula(phi.sub, game)}"
    if isinstance(phi, K):
        return f"K_{phi.player + 1} {format_formula(phi.sub, game)}"
    if isinstance(phi, CB):
        return f"CB {format_formula(phi.sub, game)}"
    if isinstance(phi, CBStar):
        return f"CB* {format_formula(phi.sub, game)}"
    if isinstance(phi, EB):
        return f"EB {format_formula(phi.sub, game)}"
    if isinstance(phi, EBStar):
        return f"EB* {format_formula(phi.sub, game)}"
    return str(phi)


# ---------------------------------------------------------------------------
# Parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<play_i>play_(?P<play_player>\d+)\()
  | (?P<play>play\()
  | (?P<srat>SRAT\^(?P<srat_level>\d+)(?:_(?P<srat_player>\d+))?)
  | (?P<wrat>WRAT\^(?P<wrat_level>\d+)(?:_(?P<wrat_player>\d+))?)
  | (?P<rat_i>RAT_(?P<rat_player>\d+))
  | (?P<rat>RAT)
  | (?P<true>true)
  | (?P<b>B_(?P<b_player>\d+))
  | (?P<k>K_(?P<k_player>\d+))
  | (?P<ebstar>EB\*)
  | (?P<eb>EB)
  | (?P<cbstar>CB\*)
  | (?P<cb>CB)
  | (?P<ks>KS)
  | (?P<kr>KR)
  | (?P<kw>KW)
  | (?P<not>!)
  | (?P<and>&)
  | (?P<lparen>\()
  | (?P<rparen>\))
    """,
    re.VERBOSE,
)

_NAME_RE = re.compile(r"[^(),\s]+")


class _Parser:
    def __init__(self, text: str, game: Game):
        self.text = text
        self.game = game
        self.pos = 0

    def error(self, message: str, column: Optional[int] = None):
        raise FormulaParseError(message, self.pos if column is None else column)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def player(self, raw: str, column: int) -> int:
        index = int(raw)
        if not 1 <= index <= self.game.num_players:
            self.error(f"unknown player index {index}", column)
        return index - 1

    def strategy(self, player: int, column: int) -> int:
        self.skip_ws()
        match = _NAME_RE.match(self.text, self.pos)
        if match is None:
            self.error("expected a strategy name")
        name = match.group(0)
        try:
            resolved = self.game.strategy_index(player, name)
        except ValueError:
            self.error(f"unknown strategy name {name!r} for player {player + 1}", column)
        self.pos = match.end()
        return resolved

    def expect(self, char: str):
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != char:
            self.error(f"expected {char!r}")
        self.pos += 1

    def parse_formula(self) -> Formula:
        node = self.parse_unary()
        while True:
            self.skip_ws()
            if self.pos < len(self.text) and self.text[self.pos] == "&":
                self.pos += 1
                node = And(node, self.parse_unary())
            else:
                return node

    def parse_unary(self) -> Formula:
        self.skip_ws()
        if self.pos >= len(self.text):
            self.error("unexpected end of formula")
        column = self.pos
        match = _TOKEN_RE.match(self.text, self.pos)
        if match is None or match.lastgroup == "ws":
            self.error(f"unexpected character {self.text[self.pos]!r}")
        kind = match.lastgroup
        self.pos = match.end()
        if kind == "not":
            return Not(self.parse_unary())
        if kind == "lparen":
            node = self.parse_formula()
            self.expect(")")
            return node
        if kind == "b":
            return B(self.player(match.group("b_player"), column), self.parse_unary())
        if kind == "k":
            return K(self.player(match.group("k_player"), column), self.parse_unary())
        if kind == "eb":
            return EB(self.parse_unary())
        if kind == "ebstar":
            return EBStar(self.parse_unary())
        if kind == "cb":
            return CB(self.parse_unary())
        if kind == "cbstar":
            return CBStar(self.parse_unary())
        if kind == "true":
            return TrueF()
        if kind == "rat":
            return RatAll()
        if kind == "rat_i":
            return Rat(self.player(match.group("rat_player"), column))
        if kind == "ks":
            return KS()
        if kind == "kr":
            return KR()
        if kind == "kw":
            return KW()
        if kind == "srat":
            player = match.group("srat_player")
            return SRat(
                int(match.group("srat_level")),
                None if player is None else self.player(player, column),
            )
        if kind == "wrat":
            player = match.group("wrat_player")
            return WRat(
                int(match.group("wrat_level")),
                None if player is None else self.player(player, column),
            )
        if kind == "play_i":
            player = self.player(match.group("play_player"), column)
            strategy = self.strategy(player, column)
            self.expect(")")
            return Play(player, strategy)
        if kind == "play":
            strategies = []
            for i in self.game.players:
                if i > 0:
                    self.expect(",")
                strategies.append(self.strategy(i, column))
            self.expect(")")
            return PlayProfile(tuple(strategies))
        self.error(f"unexpected token {match.group(0)!r}", column)


def parse_formula(text: str, game: Game) -> Formula:
    """Parse the formula grammar; the game resolves names and bounds."""
    parser = _Parser(text, game)
    node = parser.parse_formula()
    if not parser.at_end():
        parser.error(f"trailing input {parser.text[parser.pos:]!r}")
    return node


# ---------------------------------------------------------------------------
# Macro expansion


def expand_macros(phi: Formula, game: Game) -> Formula:
    """Rewrite macro nodes into the core language; purely syntactic.

    SRAT^0_i is true; SRAT^{k+1}_i is RAT_i & K_i(conjunction of the other
    players' SRAT^k); WRAT swaps K_i for B_i; EB/EB* conjoin B_i/K_i; no
    simplification is performed.  Shared sub-DAGs are built once.
    """
    cache: Dict[Formula, Formula] = {}

    def check_player(player: Optional[int]):
        if player is not None and not 0 <= player < game.num_players:
            raise ValueError(f"unknown player index {player}")

    def walk(node: Formula) -> Formula:
        hit = cache.get(node)
        if hit is not None:
            return hit
        out = rewrite(node)
        cache[node] = out
        return out

    def rewrite(node: Formula) -> Formula:
        if isinstance(node, (TrueF, KS, KR, KW)):
            return node
        if isinstance(node, Play):
            check_player(node.player)
            if not 0 <= node.strategy < len(game.strategy_names[node.player]):
                raise ValueError(
                    f"player {node.player} has no strategy {node.strategy}"
                )
            return node
        if isinstance(node, Rat):
            check_player(node.player)
            return node
        if isinstance(node, Not):
            return Not(walk(node.sub))
        if isinstance(node, And):
            return And(walk(node.left), walk(node.right))
        if isinstance(node, B):
            check_player(node.player)
            return B(node.player, walk(node.sub))
        if isinstance(node, K):
            check_player(node.player)
            return K(node.player, walk(node.sub))
        if isinstance(node, CB):
            return CB(walk(node.sub))
        if isinstance(node, CBStar):
            return CBStar(walk(node.sub))
        if isinstance(node, RatAll):
            return conj([Rat(i) for i in game.players])
        if isinstance(node, PlayProfile):
            game.check_profile(node.profile)
            return conj([Play(i, s) for i, s in enumerate(node.profile)])
        if isinstance(node, EB):
            sub = walk(node.sub)
            return conj([B(i, sub) for i in game.players])
        if isinstance(node, EBStar):
            sub = walk(node.sub)
            return conj([K(i, sub) for i in game.players])
        if isinstance(node, (SRat, WRat)):
            check_player(node.player)
            if node.level < 0:
                raise ValueError("tower level must be >= 0")
            modal = K if isinstance(node, SRat) else B
            kind = type(node)
            if node.player is None:
                return conj([walk(kind(node.level, j)) for j in game.players])
            if node.level == 0:
                return TrueF()
            others = conj(
                [walk(kind(node.level - 1, j)) for j in game.players if j != node.player]
            )
            return And(Rat(node.player), modal(node.player, others))
        raise TypeError(f"unknown formula node {node!r}")

    return walk(phi)


# ---------------------------------------------------------------------------
# Satisfaction


def _expected_utility(
    m: CounterfactualStructure, dist: Distribution, player: int, strategy: int
) -> Fraction:
    total = Fraction(0)
    for state, w in dist.items:
        profile = insert_strategy(player, strategy, m.others_profile(state, player))
        total += w * m.game.utility(profile, player)
    return total


def rat_holds(m: CounterfactualStructure, omega: int, player: int) -> bool:
    """Translucent rationality: the played strategy's expected utility under
    actual beliefs weakly beats every alternative's expected utility under
    the matching counterfactual beliefs."""
    actual = m.belief(player, omega)
    played = m.own_strategy(omega, player)
    lhs = _expected_utility(m, actual, player, played)
    for sigma in m.game.strategies(player):
        cf = counterfactual_belief(m, omega, player, sigma)
        if lhs < _expected_utility(m, cf, player, sigma):
            return False
    return True


def rat_holds_f_form(m: CounterfactualStructure, omega: int, player: int) -> bool:
    """Equivalent closest-state form of the rationality inequality: expected
    utilities of deviations are taken at f(., player, sigma) directly."""
    actual = m.belief(player, omega)
    played = m.own_strategy(omega, player)
    lhs = _expected_utility(m, actual, player, played)
    for sigma in m.game.strategies(player):
        rhs = Fraction(0)
        for state, w in actual.items:
            moved = m.closest_state(state, player, sigma)
            profile = insert_strategy(player, sigma, m.others_profile(moved, player))
            rhs += w * m.game.utility(profile, player)
        if lhs < rhs:
            return False
    return True


def classical_rat_holds(m: CounterfactualStructure, omega: int, player: int) -> bool:
    """Probability-structure rationality: best response to the induced
    opponent distribution, ignoring the closest-state function."""
    actual = m.belief(player, omega)
    lhs = _expected_utility(m, actual, player, m.own_strategy(omega, player))
    return all(
        lhs >= _expected_utility(m, actual, player, sigma)
        for sigma in m.game.strategies(player)
    )


COUNTERFACTUAL = "counterfactual"
PROBABILITY = "probability"


@dataclass(frozen=True)
class Extension:
    """A formula with exactly its satisfying states."""

    formula: Formula
    states: frozenset


class ModelChecker:
    """Exact bottom-up model checker for one structure.

    ``semantics`` selects the counterfactual reading (default) or plain
    probability-structure semantics, which supports only the fragment
    without K_i/CB*/KR/KW/KS and reads RAT_i classically.
    """

    def __init__(self, m: CounterfactualStructure, semantics: str = COUNTERFACTUAL):
        if semantics not in (COUNTERFACTUAL, PROBABILITY):
            raise ValueError(f"unknown semantics {semantics!r}")
        self.m = m
        self.semantics = semantics
        self._ext: Dict[Formula, frozenset] = {}
        self._cf_cache: Dict[Tuple, Distribution] = {}
        self._all = frozenset(m.states)

    # -- helpers

    def counterfactual(self, omega: int, player: int, sigma: int) -> Distribution:
        """PR^c cached by the underlying belief (states sharing beliefs share
        counterfactual beliefs)."""
        base = self.m.belief(player, omega)
        key = (player, sigma, base)
        hit = self._cf_cache.get(key)
        if hit is None:
            hit = base.pushforward(
                lambda state: self.m.closest_state(state, player, sigma)
            )
            self._cf_cache[key] = hit
        return hit

    def _believes_all(self, dist: Distribution, states: frozenset) -> bool:
        return all(s in states for s in dist.support())

    def everyone_believes_step(self, states: frozenset) -> frozenset:
        return frozenset(
            w
            for w in self.m.states
            if all(
                self._believes_all(self.m.belief(i, w), states)
                for i in self.m.game.players
            )
        )

    def everyone_counterfactually_believes_step(self, states: frozenset) -> frozenset:
        out = []
        for w in self.m.states:
            good = True
            for i in self.m.game.players:
                for sigma in self.m.game.strategies(i):
                    if not self._believes_all(self.counterfactual(w, i, sigma), states):
                        good = False
                        break
                if not good:
                    break
            if good:
                out.append(w)
        return frozenset(out)

    def _common_fixpoint(self, start: frozenset, step) -> frozenset:
        # Intersecting with the running set makes the chain monotone; the
        # result equals the intersection of the bare step iterates.
        current = step(start)
        while True:
            nxt = step(current) & current
            if nxt == current:
                return current
            current = nxt

    # -- atoms

    def _rat_states(self, player: int) -> frozenset:
        if self.semantics == PROBABILITY:
            test = classical_rat_holds
        else:
            test = rat_holds
        return frozenset(w for w in self.m.states if test(self.m, w, player))

    def _ks_states(self) -> frozenset:
        m = self.m
        out = []
        for w in m.states:
            if all(
                all(
                    m.others_profile(t, i) == m.others_profile(w, i)
                    for t in m.belief(i, w).support()
                )
                for i in m.game.players
            ):
                out.append(w)
        return frozenset(out)

    def _kr_states(self) -> frozenset:
        m = self.m
        out = []
        for w in m.states:
            good = True
            for i in m.game.players:
                for sigma in m.game.strategies(i):
                    reaction = m.others_profile(m.closest_state(w, i, sigma), i)
                    cf = self.counterfactual(w, i, sigma)
                    if any(
                        m.others_profile(t, i) != reaction for t in cf.support()
                    ):
                        good = False
                        break
                if not good:
                    break
            if good:
                out.append(w)
        return frozenset(out)

    def _kw_states(self) -> frozenset:
        m = self.m
        return frozenset(
            w
            for w in m.states
            if all(m.belief(i, w).weight(w) == _ONE for i in m.game.players)
        )

    # -- evaluation

    def extension_set(self, phi: Formula) -> frozenset:
        """Satisfying states of a formula (macros expanded internally)."""
        phi = expand_macros(phi, self.m.game)
        return self._eval(phi)

    def extension(self, phi: Formula) -> Extension:
        return Extension(formula=phi, states=self.extension_set(phi))

    def satisfies(self, omega: int, phi: Formula) -> bool:
        if not 0 <= omega < self.m.num_states:
            raise ValueError(f"no state {omega}")
        return omega in self.extension_set(phi)

    def _forbid_counterfactual(self, phi: Formula):
        raise ValueError(
            f"{phi} is outside the probability-structure fragment"
        )

    def _eval(self, phi: Formula) -> frozenset:
        hit = self._ext.get(phi)
        if hit is not None:
            return hit
        out = self._eval_uncached(phi)
        self._ext[phi] = out
        return out

    def _eval_uncached(self, phi: Formula) -> frozenset:
        m = self.m
        if isinstance(phi, TrueF):
            return self._all
        if isinstance(phi, Play):
            return frozenset(
                w for w in m.states if m.own_strategy(w, phi.player) == phi.strategy
            )
        if isinstance(phi, Rat):
            return self._rat_states(phi.player)
        if isinstance(phi, Not):
            return self._all - self._eval(phi.sub)
        if isinstance(phi, And):
            return self._eval(phi.left) & self._eval(phi.right)
        if isinstance(phi, B):
            states = self._eval(phi.sub)
            return frozenset(
                w
                for w in m.states
                if self._believes_all(m.belief(phi.player, w), states)
            )
        if isinstance(phi, K):
            if self.semantics == PROBABILITY:
                self._forbid_counterfactual(phi)
            states = self._eval(phi.sub)
            return frozenset(
                w
                for w in m.states
                if all(
                    self._believes_all(self.counterfactual(w, phi.player, s), states)
                    for s in m.game.strategies(phi.player)
                )
            )
        if isinstance(phi, CB):
            return self._common_fixpoint(
                self._eval(phi.sub), self.everyone_believes_step
            )
        if isinstance(phi, CBStar):
            if self.semantics == PROBABILITY:
                self._forbid_counterfactual(phi)
            return self._common_fixpoint(
                self._eval(phi.sub), self.everyone_counterfactually_believes_step
            )
        if isinstance(phi, (KS, KR, KW)):
            if self.semantics == PROBABILITY:
                self._forbid_counterfactual(phi)
            if isinstance(phi, KS):
                return self._ks_states()
            if isinstance(phi, KR):
                return self._kr_states()
            return self._kw_states()
        raise TypeError(f"macro node {phi!r} survived expansion")

    def subformula_extensions(self, phi: Formula) -> List[Extension]:
        """Post-order, first-occurrence extensions of every subformula."""
        phi = expand_macros(phi, self.m.game)
        seen = []
        seen_set = set()

        def walk(node: Formula):
            for child in _children(node):
                walk(child)
            if node not in seen_set:
                seen_set.add(node)
                seen.append(Extension(formula=node, states=self._eval(node)))

        walk(phi)
        return seen


def _children(node: Formula) -> Iterator[Formula]:
    if isinstance(node, Not):
        yield node.sub
    elif isinstance(node, And):
        yield node.left
        yield node.right
    elif isinstance(node, (B, K, CB, CBStar, EB, EBStar)):
        yield node.sub


def satisfies(m: CounterfactualStructure, omega: int, phi: Formula) -> bool:
    return ModelChecker(m).satisfies(omega, phi)


def extension(m: CounterfactualStructure, phi: Formula) -> Extension:
    return ModelChecker(m).extension(phi)


# ---------------------------------------------------------------------------
# Rationality towers (iterative SRAT^k / WRAT^k extensions)


def _tower(m: CounterfactualStructure, counterfactual_modal: bool) -> List[Tuple]:
    """Per-player extension vectors of the k-level towers, level 0 until the
    first repeated vector.  Levels are monotone decreasing per player."""
    checker = ModelChecker(m)
    players = list(m.game.players)
    rat = {i: checker.extension_set(Rat(i)) for i in players}
    levels = [tuple(frozenset(m.states) for _ in players)]
    while True:
        prev = levels[-1]
        nxt = []
        for i in players:
            others = frozenset(m.states)
            for j in players:
                if j != i:
                    others &= prev[j]
            if counterfactual_modal:
                believers = frozenset(
                    w
                    for w in m.states
                    if all(
                        checker._believes_all(checker.counterfactual(w, i, s), others)
                        for s in m.game.strategies(i)
                    )
                )
            else:
                believers = frozenset(
                    w
                    for w in m.states
                    if checker._believes_all(m.belief(i, w), others)
                )
            nxt.append(rat[i] & believers)
        nxt = tuple(nxt)
        levels.append(nxt)
        if nxt == prev:
            return levels


def srat_tower(m: CounterfactualStructure) -> List[Tuple]:
    return _tower(m, counterfactual_modal=True)


def wrat_tower(m: CounterfactualStructure) -> List[Tuple]:
    return _tower(m, counterfactual_modal=False)


def ccbr_check(m: CounterfactualStructure, omega: int) -> Tuple[bool, int]:
    """Does every SRAT^k hold at ``omega``?  Returns (holds, k*) where k* is
    the level at which the per-player extensions stabilize."""
    if not 0 <= omega < m.num_states:
        raise ValueError(f"no state {omega}")
    levels = srat_tower(m)
    stable = levels[-1]
    k_star = len(levels) - 1
    return all(omega in stable[i] for i in m.game.players), k_star
