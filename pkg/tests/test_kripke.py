import json
import random
from fractions import Fraction

import pytest

from conftest import flat_structure
from translucent_games.games import Restriction
from translucent_games.kripke import (
    CounterfactualStructure,
    Distribution,
    StructureFormatError,
    counterfactual_belief,
    epsilon_closeness,
    parse_structure,
    respects_unilateral_deviations,
    serialize_structure,
    validate_appropriate,
    validate_strongly_appropriate,
)
from translucent_games.sampling import random_appropriate_structure, random_game
from translucent_games.witness import build_ccbr_witness, build_ir_witness


def reckless_frames_fixture(pd12):
    """Appropriate but not strongly appropriate: switching to the reckless
    strategy leads to two frames of mind with different beliefs."""
    s = ((0, 0), (0, 0), (1, 0), (1, 0), (0, 1))
    half = Fraction(1, 2)
    pr0 = (
        Distribution(((0, half), (1, half))),
        Distribution(((0, half), (1, half))),
        Distribution.point(2),
        Distribution.point(3),
        Distribution.point(4),
    )
    pr1 = tuple(Distribution.point(w) for w in range(5))
    f = [
        [[0, 2], [0, 4]],
        [[1, 3], [1, 4]],
        [[0, 2], [2, 4]],
        [[0, 3], [3, 4]],
        [[4, 2], [0, 4]],
    ]
    return CounterfactualStructure(
        game=pd12,
        strategy_map=s,
        closest=tuple(tuple(tuple(row) for row in by_player) for by_player in f),
        beliefs=(pr0, pr1),
    )


class TestDistribution:
    def test_normalization_required(self):
        with pytest.raises(ValueError, match="sum"):
            Distribution.from_weights({0: Fraction(1), 1: Fraction(1)})
        with pytest.raises(ValueError, match="negative"):
            Distribution.from_weights({0: Fraction(3, 2), 1: Fraction(-1, 2)})

    def test_zero_weights_dropped(self):
        d = Distribution.from_weights({0: Fraction(1), 1: Fraction(0)})
        assert d == Distribution.point(0)
        assert d.support() == (0,)

    def test_mass_and_pushforward(self):
        d = Distribution.from_weights({0: Fraction(1, 3), 2: Fraction(2, 3)})
        assert d.mass([0, 2]) == 1
        assert d.mass([2]) == Fraction(2, 3)
        assert d.pushforward(lambda _s: 5) == Distribution.point(5)


class TestValidateAppropriate:
    def test_ir_witness_is_appropriate(self, pd12):
        result = build_ir_witness(pd12, (0, 0))
        assert validate_appropriate(result.structure).ok

    def test_planted_p1_defect(self, pd12):
        m = build_ir_witness(pd12, (0, 0)).structure
        # State 0 plays (C,C); point belief on a state playing (S,*) breaks P1.
        beliefs = list(list(per) for per in m.beliefs)
        beliefs[0][0] = Distribution.point(2)
        broken = CounterfactualStructure(
            game=m.game,
            strategy_map=m.strategy_map,
            closest=m.closest,
            beliefs=(tuple(beliefs[0]), tuple(beliefs[1])),
        )
        report = validate_appropriate(broken)
        assert not report.ok
        assert "P1" in {v.condition for v in report.violations}

    def test_planted_f2_defect(self, pd12):
        m = build_ir_witness(pd12, (0, 0)).structure
        closest = [list(list(row) for row in by_player) for by_player in m.closest]
        played = m.own_strategy(0, 0)
        closest[0][0][played] = 3  # the played strategy must map to the state itself
        broken = CounterfactualStructure(
            game=m.game,
            strategy_map=m.strategy_map,
            closest=tuple(tuple(tuple(row) for row in bp) for bp in closest),
            beliefs=m.beliefs,
        )
        report = validate_appropriate(broken)
        conditions = {v.condition for v in report.violations}
        assert "F2" in conditions

    def test_violations_are_complete(self, pd12):
        m = reckless_frames_fixture(pd12)
        assert validate_appropriate(m).ok
        report = validate_strongly_appropriate(m)
        assert {v.condition for v in report.violations} == {"SA"}
        # Both half-weighted states expose the differing reckless frames.
        assert {(v.state, v.player, v.strategy) for v in report.violations} == {
            (0, 0, 1),
            (1, 0, 1),
        }


class TestCounterfactualBelief:
    def test_same_strategy_is_actual_belief(self, pd12):
        rng = random.Random(1)
        for _ in range(10):
            m = random_appropriate_structure(rng, pd12)
            for w in m.states:
                for i in pd12.players:
                    sigma = m.own_strategy(w, i)
                    assert counterfactual_belief(m, w, i, sigma) == m.belief(i, w)

    def test_point_mass_pushforward(self, pd12):
        m = build_ir_witness(pd12, (0, 0)).structure
        for w in m.states:
            for i in pd12.players:
                for sigma in pd12.strategies(i):
                    expected = Distribution.point(m.closest_state(w, i, sigma))
                    assert counterfactual_belief(m, w, i, sigma) == expected

    def test_pd_punishment_witness_counterfactual(self, pd12):
        result = build_ccbr_witness(pd12, (0, 0), Restriction.full(pd12))
        m = result.structure
        w0 = result.designated_state
        cf = counterfactual_belief(m, w0, 0, 1)
        # Switching to S is believed to land where the opponent also plays S.
        target = next(
            idx
            for idx, tag in enumerate(result.tags)
            if tag.kind == "Wi" and tag.player == 0 and tag.profile == (1, 1)
        )
        assert cf == Distribution.point(target)

    def test_support_is_f_image(self, pd12):
        rng = random.Random(2)
        for _ in range(10):
            m = random_appropriate_structure(rng, pd12)
            for w in m.states:
                for i in pd12.players:
                    for sigma in pd12.strategies(i):
                        cf = counterfactual_belief(m, w, i, sigma)
                        image = {
                            m.closest_state(t, i, sigma)
                            for t in m.belief(i, w).support()
                        }
                        assert set(cf.support()) == image

    def test_belief_determinism(self):
        rng = random.Random(3)
        game = random_game(rng, num_players=2, max_strategies=3)
        for _ in range(10):
            m = random_appropriate_structure(rng, game)
            for w1 in m.states:
                for w2 in m.states:
                    for i in game.players:
                        if m.belief(i, w1) == m.belief(i, w2):
                            for sigma in game.strategies(i):
                                assert counterfactual_belief(
                                    m, w1, i, sigma
                                ) == counterfactual_belief(m, w2, i, sigma)

    def test_counterfactual_strategy_is_known(self):
        rng = random.Random(4)
        game = random_game(rng)
        for _ in range(10):
            m = random_appropriate_structure(rng, game)
            for w in m.states:
                for i in game.players:
                    for sigma in game.strategies(i):
                        cf = counterfactual_belief(m, w, i, sigma)
                        assert all(
                            m.own_strategy(t, i) == sigma for t in cf.support()
                        )


class TestStrongAppropriateness:
    def test_witness_structures_pass(self, pd12, rt10):
        from translucent_games.domination import nsd_fixpoint

        for game, profile in ((pd12, (0, 0)), (rt10, (9, 9))):
            z = nsd_fixpoint(game).final
            if z.contains(profile):
                result = build_ccbr_witness(game, profile, z)
                assert validate_strongly_appropriate(result.structure).ok

    def test_strong_implies_appropriate(self, pd12):
        rng = random.Random(5)
        for _ in range(15):
            m = random_appropriate_structure(rng, pd12)
            strong = validate_strongly_appropriate(m)
            if strong.ok:
                assert validate_appropriate(m).ok


class TestUnilateralDeviations:
    def test_flat_structure_respects(self, pd12):
        assert respects_unilateral_deviations(flat_structure(pd12))

    def test_punishment_witness_does_not(self, rt10):
        from translucent_games.domination import nsd_fixpoint

        z = nsd_fixpoint(rt10).final
        result = build_ccbr_witness(rt10, (9, 9), z)
        assert not respects_unilateral_deviations(result.structure)

    def test_single_strategy_game_vacuous(self, one_by_one):
        assert respects_unilateral_deviations(flat_structure(one_by_one))


class TestEpsilonCloseness:
    def test_unilateral_respecting_is_zero(self, pd12, matching_pennies):
        for game in (pd12, matching_pennies):
            m = flat_structure(game)
            assert respects_unilateral_deviations(m)
            assert epsilon_closeness(m) == 0

    def test_pd_ir_witness_regression(self, pd12):
        m = build_ir_witness(pd12, (0, 0)).structure
        value = epsilon_closeness(m)
        assert 0 < value <= 1
        assert value == 1

    def test_single_strategy_game_zero(self, one_by_one):
        assert epsilon_closeness(flat_structure(one_by_one)) == 0


class TestSerialization:
    def test_round_trip(self, pd12):
        m = build_ir_witness(pd12, (0, 0)).structure
        text = serialize_structure(m)
        again = parse_structure(text)
        assert again == m
        assert serialize_structure(again) == text

    def test_round_trip_with_supplied_game(self, pd12):
        m = flat_structure(pd12)
        text = serialize_structure(m, include_game=False)
        assert parse_structure(text, game=pd12) == m
        with pytest.raises(StructureFormatError, match="game"):
            parse_structure(text)

    def test_unnormalized_distribution(self, pd12):
        data = json.loads(serialize_structure(flat_structure(pd12)))
        data["beliefs"][0][0] = {"0": 1, "1": 1}
        with pytest.raises(StructureFormatError, match="sum"):
            parse_structure(json.dumps(data))

    def test_dangling_state(self, pd12):
        data = json.loads(serialize_structure(flat_structure(pd12)))
        data["beliefs"][0][0] = {"99": 1}
        with pytest.raises(StructureFormatError, match="out of range"):
            parse_structure(json.dumps(data))

    def test_f_target_out_of_range(self, pd12):
        data = json.loads(serialize_structure(flat_structure(pd12)))
        data["f"][0]["to"] = 99
        with pytest.raises(StructureFormatError, match="to"):
            parse_structure(json.dumps(data))

    def test_missing_f_entry(self, pd12):
        data = json.loads(serialize_structure(flat_structure(pd12)))
        del data["f"][3]
        with pytest.raises(StructureFormatError, match="missing entry"):
            parse_structure(json.dumps(data))

    def test_unknown_field(self, pd12):
        data = json.loads(serialize_structure(flat_structure(pd12)))
        data["comment"] = "nope"
        with pytest.raises(StructureFormatError, match="comment"):
            parse_structure(json.dumps(data))
