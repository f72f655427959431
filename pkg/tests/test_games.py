import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import games, rationals
from translucent_games.games import (
    Game,
    GameFormatError,
    Restriction,
    builtin_games,
    ex2,
    format_rational,
    parse_game,
    parse_rational,
    pd,
    reverse_traveler,
    serialize_game,
)


class TestUtility:
    def test_reverse_traveler_off_diagonal(self):
        # Announcing (1, 2): the low announcer fixes both base payoffs at 1,
        # the high announcer collects the 1/2 bonus.
        game = reverse_traveler(3, Fraction(1, 2))
        profile = game.profile_from_labels(["1", "2"])
        assert game.utility(profile, 1) == Fraction(3, 2)
        assert game.utility(profile, 0) == 1

    def test_pd_sue_against_cooperate(self, pd12):
        profile = pd12.profile_from_labels(["S", "C"])
        assert pd12.utility(profile, 0) == 1
        assert pd12.utility(profile, 1) == -2

    @given(games())
    @settings(max_examples=30)
    def test_read_back_equals_written(self, game):
        for rank, profile in enumerate(game.profiles()):
            assert game.profile_rank(profile) == rank
            for i in game.players:
                assert game.utility(profile, i) == game.utilities[rank][i]

    def test_malformed_profile_rejected(self, pd12):
        with pytest.raises(ValueError):
            pd12.utility((0,), 0)
        with pytest.raises(ValueError):
            pd12.utility((0, 5), 0)
        with pytest.raises(ValueError):
            pd12.utility((0, 0), 9)


class TestRationals:
    def test_parse_fraction_string(self):
        assert parse_rational("1/3") == Fraction(1, 3)
        assert parse_rational("-7/2") == Fraction(-7, 2)
        assert parse_rational(4) == Fraction(4)

    def test_lowest_terms_output(self):
        assert format_rational(Fraction(2, 4)) == "1/2"
        assert format_rational(Fraction(6, 3)) == 2

    def test_zero_denominator(self):
        with pytest.raises(GameFormatError, match="zero denominator"):
            parse_rational("1/0", "payoffs[0]")

    def test_float_rejected(self):
        with pytest.raises(GameFormatError):
            parse_rational(1.5)
        with pytest.raises(GameFormatError):
            parse_rational("1.5")

    @given(rationals, rationals)
    def test_exact_arithmetic(self, a, b):
        assert (a + b) - b == a


class TestSerialization:
    @given(games())
    @settings(max_examples=30)
    def test_round_trip_identity(self, game):
        assert parse_game(serialize_game(game)) == game

    def test_round_trip_byte_identical(self, pd12, game_ex2):
        for game in (pd12, game_ex2):
            text = serialize_game(game)
            assert serialize_game(parse_game(text)) == text

    def test_missing_cell_names_path(self):
        data = json.loads(serialize_game(pd(1, 2)))
        del data["payoffs"][0][1]
        with pytest.raises(GameFormatError, match=r"payoffs\[0\]"):
            parse_game(json.dumps(data))

    def test_ragged_tensor(self):
        data = json.loads(serialize_game(pd(1, 2)))
        data["payoffs"][1][0] = [1]
        with pytest.raises(GameFormatError, match=r"payoffs\[1\]\[0\]"):
            parse_game(json.dumps(data))

    def test_unknown_field(self):
        data = json.loads(serialize_game(pd(1, 2)))
        data["extra"] = 1
        with pytest.raises(GameFormatError, match="extra"):
            parse_game(json.dumps(data))

    def test_zero_denominator_in_tensor(self):
        data = json.loads(serialize_game(pd(1, 2)))
        data["payoffs"][0][0][0] = "1/0"
        with pytest.raises(GameFormatError, match=r"payoffs\[0\]\[0\]\[0\]"):
            parse_game(json.dumps(data))

    def test_fraction_payoff_parses_exactly(self):
        data = json.loads(serialize_game(pd(1, 2)))
        data["payoffs"][0][0][0] = "1/3"
        game = parse_game(json.dumps(data))
        assert game.utility((0, 0), 0) == Fraction(1, 3)


class TestBuiltins:
    def test_ex2_row_payoffs(self, game_ex2):
        assert game_ex2.utility(game_ex2.profile_from_labels(["a", "c"]), 0) == 100
        assert game_ex2.utility(game_ex2.profile_from_labels(["b", "c"]), 0) == 150
        assert game_ex2.utility(game_ex2.profile_from_labels(["b", "d"]), 0) == 50

    def test_reverse_traveler_diagonal(self):
        game = reverse_traveler(3, Fraction(1, 2))
        profile = game.profile_from_labels(["2", "2"])
        assert game.payoff_vector(profile) == (2, 2)

    def test_pd_mutual_suit(self, pd12):
        profile = pd12.profile_from_labels(["S", "S"])
        assert pd12.payoff_vector(profile) == (-1, -1)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            reverse_traveler(0, Fraction(1, 2))
        with pytest.raises(ValueError):
            reverse_traveler(3, Fraction(3, 2))
        with pytest.raises(ValueError):
            pd(0, 1)
        with pytest.raises(ValueError):
            pd(1, 0)

    def test_builtin_names(self):
        constructors = builtin_games()
        assert set(constructors) == {"pd", "reverse_traveler", "ex2"}
        assert constructors["ex2"]().num_players == 2

    def test_ex2_round_trips(self, game_ex2):
        assert parse_game(serialize_game(game_ex2)) == game_ex2


class TestRestriction:
    def test_empty_set_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            Restriction.from_sets([[0], []])

    def test_full_and_membership(self, pd12):
        full = Restriction.full(pd12)
        assert full.sets == ((0, 1), (0, 1))
        assert full.contains((1, 0))
        sub = full.replace(0, [1])
        assert not sub.contains((0, 0))
        assert sub.is_subset_of(full)

    def test_opponent_profiles_single_player(self, one_by_one):
        full = Restriction.full(one_by_one)
        assert list(full.opponent_profiles(0)) == [()]

    def test_validate_for_game(self, pd12):
        foreign = Restriction.from_sets([[0, 1], [0, 2]])
        with pytest.raises(ValueError):
            foreign.validate_for(pd12)
