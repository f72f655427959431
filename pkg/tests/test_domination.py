import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings

from conftest import games
from translucent_games import bruteforce
from translucent_games.domination import (
    check_z_sets,
    ir_prime,
    ir_relative,
    ir_set,
    maximin,
    minimax_dominates,
    minimax_rationalizable,
    nsd_fixpoint,
    nsd_fixpoint_restricted_dominators,
    nsd_fixpoint_with_order,
    nsd_step,
    z_sets_failure,
)
from translucent_games.games import Restriction, reverse_traveler
from translucent_games.sampling import random_game


def verify_trace(game, trace):
    """The trace invariants: proper shrinking, valid witnesses, fixpoint."""
    current = Restriction.full(game)
    for rnd in trace.rounds:
        assert rnd.before == current
        assert rnd.deleted
        assert rnd.after.is_subset_of(rnd.before)
        assert rnd.after != rnd.before
        for d in rnd.deleted:
            assert minimax_dominates(game, d.player, d.dominator, d.strategy, rnd.before)
        current = rnd.after
    assert current == trace.final
    for i in game.players:
        for sigma in trace.final.sets[i]:
            for rival in game.strategies(i):
                assert not minimax_dominates(game, i, rival, sigma, trace.final)


class TestMinimaxDominates:
    def test_reverse_traveler_one_is_dominated(self):
        game = reverse_traveler(3, Fraction(1, 2))
        full = Restriction.full(game)
        assert minimax_dominates(game, 0, 1, 0, full)
        assert minimax_dominates(game, 1, 1, 0, full)

    @given(games())
    @settings(max_examples=25)
    def test_never_self_dominating(self, game):
        full = Restriction.full(game)
        for i in game.players:
            for sigma in game.strategies(i):
                assert not minimax_dominates(game, i, sigma, sigma, full)

    def test_pd_sue_does_not_minimax_dominate(self, pd12):
        full = Restriction.full(pd12)
        # min u(S,.) = -1 < 0 = max u(C,.), enumerated over all four cells.
        assert not minimax_dominates(pd12, 0, 1, 0, full)

    def test_empty_opponents_unrepresentable(self):
        with pytest.raises(ValueError, match="empty"):
            Restriction.from_sets([[0], []])


class TestNsdStep:
    def test_reverse_traveler_first_round(self, rt10):
        after, record = nsd_step(rt10, Restriction.full(rt10))
        assert {(d.player, d.strategy) for d in record.deleted} == {(0, 0), (1, 0)}
        assert after.sets == (tuple(range(1, 10)), tuple(range(1, 10)))

    def test_one_by_one_fixpoint(self, one_by_one):
        after, record = nsd_step(one_by_one, Restriction.full(one_by_one))
        assert record.deleted == ()
        assert after == Restriction.full(one_by_one)

    def test_ex2_no_deletion(self, game_ex2):
        _, record = nsd_step(game_ex2, Restriction.full(game_ex2))
        assert record.deleted == ()


class TestNsdFixpoint:
    def test_reverse_traveler_k_minus_one_rounds(self, rt10):
        trace = nsd_fixpoint(rt10)
        assert trace.final.sets == ((9,), (9,))
        assert trace.num_rounds == 9
        verify_trace(rt10, trace)

    def test_ex2_everything_survives(self, game_ex2):
        trace = nsd_fixpoint(game_ex2)
        assert trace.final == Restriction.full(game_ex2)
        assert trace.num_rounds == 0

    def test_pd_everything_survives(self, pd12):
        trace = nsd_fixpoint(pd12)
        assert trace.final == Restriction.full(pd12)

    @given(games())
    @settings(max_examples=25, deadline=None)
    def test_monotone_nonempty_and_bounded(self, game):
        trace = nsd_fixpoint(game)
        verify_trace(game, trace)
        assert trace.num_rounds <= sum(game.strategy_counts)
        previous = Restriction.full(game)
        for rnd in trace.rounds:
            # The previous round's maximin strategy survives the deletion.
            for i in game.players:
                report = maximin(game, i, rnd.before, candidates=rnd.before.sets[i])
                assert report.argmax_strategy in rnd.after.sets[i]
            previous = rnd.after

    def test_trace_json_shape(self, rt10):
        payload = nsd_fixpoint(rt10).to_json_dict()
        assert payload["final"] == [[9], [9]]
        first = payload["rounds"][0]
        assert {"deleted", "survivors"} <= set(first)
        assert first["deleted"][0].keys() == {"player", "strategy", "dominator"}


class TestOrderIndependence:
    def test_reverse_traveler_many_seeds(self):
        game = reverse_traveler(5, Fraction(1, 2))
        target = nsd_fixpoint(game).final
        for seed in range(100):
            trace = nsd_fixpoint_with_order(game, seed)
            assert trace.final == target
            verify_trace(game, trace)

    def test_no_dominated_strategies_zero_rounds(self, game_ex2):
        trace = nsd_fixpoint_with_order(game_ex2, 3)
        assert trace.num_rounds == 0

    def test_random_games_match_maximal_deletion(self):
        rng = random.Random(5)
        for _ in range(25):
            game = random_game(rng, num_players=2, max_strategies=3)
            target = nsd_fixpoint(game).final
            for seed in range(20):
                assert nsd_fixpoint_with_order(game, seed).final == target


class TestRestrictedDominators:
    def test_reverse_traveler_identical_rounds(self, rt10):
        a = nsd_fixpoint(rt10)
        b = nsd_fixpoint_restricted_dominators(rt10)
        assert [r.after for r in a.rounds] == [r.after for r in b.rounds]

    def test_ex2_identical(self, game_ex2):
        assert (
            nsd_fixpoint_restricted_dominators(game_ex2).final
            == nsd_fixpoint(game_ex2).final
        )

    @given(games(max_players=2, max_strategies=4))
    @settings(max_examples=30, deadline=None)
    def test_per_round_survivors_equal(self, game):
        a = nsd_fixpoint(game)
        b = nsd_fixpoint_restricted_dominators(game)
        assert [r.after for r in a.rounds] == [r.after for r in b.rounds]
        verify_trace(game, b)


class TestMaximin:
    def test_ex2_row_guarantees_100(self, game_ex2):
        report = maximin(game_ex2, 0, Restriction.full(game_ex2))
        assert report.value == 100
        assert report.argmax_strategy == 0

    def test_pd_maximin_is_sue(self, pd12):
        report = maximin(pd12, 0, Restriction.full(pd12))
        assert report.value == -1
        assert report.argmax_strategy == 1

    def test_one_by_one_single_payoff(self, one_by_one):
        report = maximin(one_by_one, 0, Restriction.full(one_by_one))
        assert report.value == 7
        assert report.argmax_strategy == 0

    def test_tie_breaks_to_lowest_index(self, constant_game):
        report = maximin(constant_game, 0, Restriction.full(constant_game))
        assert report.argmax_strategy == 0


class TestIndividualRationality:
    def test_ex2_excludes_bd(self, game_ex2):
        assert set(ir_set(game_ex2)) == {(0, 0), (0, 1), (1, 0)}

    def test_pd_cc_and_ss(self, pd12):
        assert set(ir_set(pd12)) == {(0, 0), (1, 1)}

    def test_constant_game_everything(self, constant_game):
        assert set(ir_set(constant_game)) == set(constant_game.profiles())

    def test_relative_on_full_equals_ir(self, pd12, game_ex2, rt10):
        for game in (pd12, game_ex2, rt10):
            assert ir_relative(game, Restriction.full(game)) == ir_set(game)

    def test_relative_single_profile(self, pd12):
        z = Restriction.from_sets([[0], [0]])
        assert ir_relative(pd12, z) == ((0, 0),)

    def test_rt10_nsd1_subgame(self, rt10):
        # Subgame maximin on {2..10}^2 is 5/2, so only announcements >= 3
        # meet the relative threshold; the full-game quote is about ir_set.
        z = Restriction.from_sets([range(1, 10), range(1, 10)])
        got = ir_relative(rt10, z)
        assert set(got) == set(product(range(2, 10), repeat=2))
        assert set(ir_set(rt10)) >= set(z.profiles())
        oracle = bruteforce.ir_profiles(rt10, [list(range(1, 10))] * 2)
        assert set(got) == set(oracle)

    def test_prime_on_deletion_fixpoint(self, rt10):
        z = nsd_fixpoint(rt10).final
        assert ir_prime(rt10, z) == ((9, 9),)

    @given(games())
    @settings(max_examples=30, deadline=None)
    def test_prime_subset_of_relative(self, game):
        z = nsd_fixpoint(game).final
        assert set(ir_prime(game, z)) <= set(ir_relative(game, z))

    def test_prime_equals_relative_on_fixpoint(self):
        rng = random.Random(11)
        for _ in range(40):
            game = random_game(rng)
            z = nsd_fixpoint(game).final
            assert ir_prime(game, z) == ir_relative(game, z)

    def test_ir_profiles_survive_one_round(self):
        # Flagged property: individually rational profiles sit inside the
        # first-round survivors on every sampled game.
        rng = random.Random(13)
        for _ in range(60):
            game = random_game(rng)
            survivors, _ = nsd_step(game, Restriction.full(game))
            for profile in ir_set(game):
                assert survivors.contains(profile), (
                    f"IR profile {profile} deleted in round one of "
                    f"{game.strategy_counts} game: {game.utilities}"
                )


class TestMinimaxRationalizable:
    def test_rt10_survivor(self, rt10):
        z = minimax_rationalizable(rt10, (9, 9))
        assert z is not None and z.sets == ((9,), (9,))
        assert check_z_sets(rt10, (9, 9), z)

    def test_rt10_deleted_profile(self, rt10):
        assert minimax_rationalizable(rt10, (0, 0)) is None

    def test_ex2_full_witness(self, game_ex2):
        z = minimax_rationalizable(game_ex2, (1, 1))
        assert z == Restriction.full(game_ex2)

    def test_failure_reports_bullet(self, rt10):
        z = Restriction.from_sets([[9], [9]])
        message = z_sets_failure(rt10, (0, 0), z)
        assert "not in Z_0" in message
        bad = Restriction.from_sets([[0, 9], [0, 9]])
        message = z_sets_failure(rt10, (9, 9), bad)
        assert "minimax dominated" in message

    def test_witness_matches_exhaustive_search(self):
        rng = random.Random(23)
        for _ in range(25):
            game = random_game(rng, num_players=2, max_strategies=3)
            for profile in game.profiles():
                witness = minimax_rationalizable(game, profile)
                exhaustive = bruteforce.minimax_rationalizable_witness(game, profile)
                if witness is None:
                    assert exhaustive is None
                else:
                    assert exhaustive is not None
                    assert check_z_sets(game, profile, witness)
