"""Naive re-computation of deletion fixpoints and rationality sets.

Deliberately shares no code with the domination module: everything here is
plain nested-loop enumeration over the payoff tensor, so it can serve as an
independent oracle for the optimized paths (the CLI exposes it as
``oracle``).
"""

from __future__ import annotations

from itertools import product

from .games import Game


def _u(game: Game, profile, player):
    return game.utility(tuple(profile), player)


def _opponent_tuples(sets, player):
    pools = [entries for j, entries in enumerate(sets) if j != player]
    return list(product(*pools))


def _full_profile(player, sigma, tau):
    return tau[:player] + (sigma,) + tau[player:]


def nsd_rounds(game: Game):
    """Survivor sets after each deletion round, last entry the fixpoint."""
    sets = [list(game.strategies(i)) for i in game.players]
    rounds = [[list(s) for s in sets]]
    while True:
        new_sets = []
        changed = False
        for i in game.players:
            taus = _opponent_tuples(sets, i)
            keep = []
            for sigma in sets[i]:
                best = None
                for tau in taus:
                    v = _u(game, _full_profile(i, sigma, tau), i)
                    if best is None or v > best:
                        best = v
                dominated = False
                for rival in game.strategies(i):
                    worst = None
                    for tau in taus:
                        v = _u(game, _full_profile(i, rival, tau), i)
                        if worst is None or v < worst:
                            worst = v
                    if worst > best:
                        dominated = True
                        break
                if not dominated:
                    keep.append(sigma)
            if keep != sets[i]:
                changed = True
            new_sets.append(keep)
        if not changed:
            return rounds
        sets = new_sets
        rounds.append([list(s) for s in sets])


def nsd_final(game: Game):
    return nsd_rounds(game)[-1]


def maximin_values(game: Game, sets=None, deviations=None):
    """Per-player max-over-own of min-over-opponents utilities."""
    if sets is None:
        sets = [list(game.strategies(i)) for i in game.players]
    values = []
    for i in game.players:
        taus = _opponent_tuples(sets, i)
        pool = deviations[i] if deviations is not None else list(game.strategies(i))
        best = None
        for sigma in pool:
            worst = None
            for tau in taus:
                v = _u(game, _full_profile(i, sigma, tau), i)
                if worst is None or v < worst:
                    worst = v
            if best is None or worst > best:
                best = worst
        values.append(best)
    return values


def ir_profiles(game: Game, sets=None, full_deviations=False):
    """Profiles meeting every player's maximin threshold.

    With ``sets`` the thresholds and the profile pool come from the
    restricted sets; ``full_deviations`` widens the deviation pool to the
    whole strategy set (the primed variant).
    """
    if sets is None:
        sets = [list(game.strategies(i)) for i in game.players]
    deviations = (
        [list(game.strategies(i)) for i in game.players]
        if full_deviations
        else [list(s) for s in sets]
    )
    thresholds = maximin_values(game, sets, deviations)
    out = []
    for profile in product(*sets):
        ok = True
        for i in game.players:
            if _u(game, profile, i) < thresholds[i]:
                ok = False
                break
        if ok:
            out.append(tuple(profile))
    return out


def minimax_rationalizable_witness(game: Game, profile):
    """Exhaustive search for valid witness sets containing the profile.

    Exponential in the strategy counts; intended for small games in tests.
    Returns per-player sets or None.
    """
    pools = []
    for i in game.players:
        options = []
        others = [s for s in game.strategies(i) if s != profile[i]]
        for mask in product((False, True), repeat=len(others)):
            chosen = [profile[i]] + [s for s, keep in zip(others, mask) if keep]
            options.append(tuple(sorted(chosen)))
        pools.append(options)
    for candidate in product(*pools):
        sets = [list(entries) for entries in candidate]
        ok = True
        for i in game.players:
            taus = _opponent_tuples(sets, i)
            for member in sets[i]:
                best = max(_u(game, _full_profile(i, member, tau), i) for tau in taus)
                for rival in game.strategies(i):
                    worst = min(
                        _u(game, _full_profile(i, rival, tau), i) for tau in taus
                    )
                    if worst > best:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            return sets
    return None


def oracle_report(game: Game) -> dict:
    """Everything the ``oracle`` CLI command reports, 0-based indices."""
    rounds = nsd_rounds(game)
    from .games import format_rational  # local import keeps module standalone

    return {
        "nsd_rounds": rounds[1:],
        "nsd_final": rounds[-1],
        "nsd_round_count": len(rounds) - 1,
        "ir": [list(p) for p in ir_profiles(game)],
        "maximin": [format_rational(v) for v in maximin_values(game)],
    }
