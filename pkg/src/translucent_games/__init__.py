"""Toolkit for finite games with translucent players: exact minimax-domination
analysis, rationalizability, counterfactual belief structures, an epistemic
model checker and the witness constructions tying them together."""

from .games import (
    Game,
    GameFormatError,
    Restriction,
    builtin_games,
    ex2,
    parse_game,
    pd,
    reverse_traveler,
    serialize_game,
)
from .domination import (
    DeletionTrace,
    MaximinReport,
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
)
from .rationalizability import (
    Belief,
    MixedStrategy,
    best_response_to_some_belief,
    mixed_dominance_certificate,
    rationalizable_set,
)
from .kripke import (
    CounterfactualStructure,
    Distribution,
    StructureFormatError,
    ValidationReport,
    counterfactual_belief,
    epsilon_closeness,
    parse_structure,
    respects_unilateral_deviations,
    serialize_structure,
    validate_appropriate,
    validate_strongly_appropriate,
)
from .logic import (
    Extension,
    FormulaParseError,
    ModelChecker,
    ccbr_check,
    expand_macros,
    extension,
    parse_formula,
    rat_holds,
    satisfies,
)
from .witness import (
    ConstructionError,
    PreconditionError,
    TotalOrder,
    build_ccbr_witness,
    build_ir_witness,
    build_kw_witness,
    lift_unilateral,
)

__version__ = "0.1.0"
