"""Command-line surface: batch analysis and fixture generation over JSON.

Exit codes: 0 success, 1 negative analysis (model-check false, witness
precondition not met), 2 structure validation failure, 3 input error.
Machine-readable errors go to stderr as ``{"error": {...}}``.  The
``TG_MAX_STATES`` environment variable (default 10000) caps how large a
structure the tool will load or construct.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import bruteforce
from .domination import (
    ir_prime,
    ir_relative,
    ir_set,
    maximin,
    nsd_fixpoint,
)
from .games import Game, GameFormatError, Restriction, format_rational, parse_game
from .kripke import (
    StructureFormatError,
    epsilon_closeness,
    parse_structure,
    respects_unilateral_deviations,
    structure_json_dict,
    validate_appropriate,
    validate_strongly_appropriate,
)
from .logic import FormulaParseError, ModelChecker, format_formula, parse_formula
from .rationalizability import rationalizable_set
from .witness import (
    PreconditionError,
    build_ccbr_witness,
    build_ir_witness,
    build_kw_witness,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INVALID = 2
EXIT_INPUT = 3


class CliError(Exception):
    def __init__(self, code: int, message: str, path: Optional[str] = None):
        self.code = code
        self.path = path
        super().__init__(message)


def _max_states() -> int:
    raw = os.environ.get("TG_MAX_STATES", "10000")
    try:
        return int(raw)
    except ValueError:
        raise CliError(EXIT_INPUT, f"TG_MAX_STATES must be an integer, got {raw!r}")


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read {path}: {exc.strerror}") from exc


def _load_game(path: str) -> Game:
    try:
        return parse_game(_read_file(path))
    except GameFormatError as exc:
        raise CliError(EXIT_INPUT, str(exc), path=exc.path) from exc


def _load_structure(path: str):
    """Load a structure file; witness output wrappers are accepted too."""
    try:
        data = json.loads(_read_file(path))
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, f"{path}: invalid JSON: {exc}") from exc
    if isinstance(data, dict) and "structure" in data:
        data = data["structure"]
    if isinstance(data, dict):
        declared = data.get("states")
        if isinstance(declared, int) and declared > _max_states():
            raise CliError(
                EXIT_INPUT,
                f"structure has {declared} states, above TG_MAX_STATES={_max_states()}",
            )
    base_dir = os.path.dirname(os.path.abspath(path))

    def load_game_path(rel: str) -> Game:
        return _load_game(os.path.join(base_dir, rel))

    try:
        return parse_structure(data, load_game_path=load_game_path)
    except StructureFormatError as exc:
        raise CliError(EXIT_INPUT, str(exc), path=exc.path) from exc


def _load_restriction(path: str, game: Game) -> Restriction:
    try:
        data = json.loads(_read_file(path))
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "sets" not in data:
        raise CliError(EXIT_INPUT, f'{path}: expected {{"sets": [[...], ...]}}')
    sets = data["sets"]
    if not isinstance(sets, list) or len(sets) != game.num_players:
        raise CliError(EXIT_INPUT, f"{path}: expected one set per player")
    resolved = []
    for i, entries in enumerate(sets):
        if not isinstance(entries, list) or not entries:
            raise CliError(EXIT_INPUT, f"{path}: sets[{i}] must be a nonempty array")
        try:
            resolved.append([game.strategy_index(i, e) for e in entries])
        except ValueError as exc:
            raise CliError(EXIT_INPUT, f"{path}: sets[{i}]: {exc}") from exc
    try:
        restriction = Restriction.from_sets(resolved)
        restriction.validate_for(game)
    except ValueError as exc:
        raise CliError(EXIT_INPUT, f"{path}: {exc}") from exc
    return restriction


def _parse_profile(game: Game, text: str) -> tuple:
    labels = [part.strip() for part in text.split(",")]
    try:
        return game.profile_from_labels(labels)
    except ValueError as exc:
        raise CliError(EXIT_INPUT, f"--profile: {exc}") from exc


def _profiles_json(profiles) -> list:
    return [list(p) for p in profiles]


# ---------------------------------------------------------------------------
# Command handlers: each returns (exit code, payload)


def _cmd_analyze(args) -> tuple:
    game = _load_game(args.game)
    trace = nsd_fixpoint(game)
    payload = {
        "survivors": [list(s) for s in trace.final.sets],
        "rounds": trace.num_rounds,
        "trace": trace.to_json_dict(),
        "witness_sets": [list(s) for s in trace.final.sets],
    }
    return EXIT_OK, payload


def _cmd_ir(args) -> tuple:
    game = _load_game(args.game)
    if args.restrict is not None:
        z = _load_restriction(args.restrict, game)
        if args.prime:
            kind, profiles = "IR_prime", ir_prime(game, z)
            values = [maximin(game, i, z).value for i in game.players]
        else:
            kind, profiles = "IR_relative", ir_relative(game, z)
            values = [
                maximin(game, i, z, candidates=z.sets[i]).value for i in game.players
            ]
    else:
        full = Restriction.full(game)
        kind, profiles = "IR", ir_set(game)
        values = [maximin(game, i, full).value for i in game.players]
    payload = {
        "kind": kind,
        "profiles": _profiles_json(profiles),
        "maximin": [format_rational(v) for v in values],
    }
    return EXIT_OK, payload


def _cmd_rationalizable(args) -> tuple:
    game = _load_game(args.game)
    trace = rationalizable_set(game)
    return EXIT_OK, {"trace": trace.to_json_dict(), "final": [list(s) for s in trace.final.sets]}


def _cmd_check_structure(args) -> tuple:
    m = _load_structure(args.structure)
    report = validate_appropriate(m)
    payload = {"appropriate": report.to_json_dict()}
    failed = not report.ok
    if args.strong:
        strong = validate_strongly_appropriate(m)
        payload["strongly_appropriate"] = strong.to_json_dict()
        failed = failed or not strong.ok
    if args.unilateral:
        payload["respects_unilateral_deviations"] = respects_unilateral_deviations(m)
    if args.epsilon:
        if report.ok:
            payload["epsilon"] = format_rational(epsilon_closeness(m))
        else:
            payload["epsilon"] = None
    return (EXIT_INVALID if failed else EXIT_OK), payload


def _cmd_model_check(args) -> tuple:
    m = _load_structure(args.structure)
    if not 0 <= args.state < m.num_states:
        raise CliError(EXIT_INPUT, f"--state: no state {args.state}")
    try:
        phi = parse_formula(args.formula, m.game)
    except FormulaParseError as exc:
        raise CliError(EXIT_INPUT, f"--formula: {exc}") from exc
    checker = ModelChecker(m)
    holds = checker.satisfies(args.state, phi)
    payload = {"holds": holds, "state": args.state, "formula": args.formula}
    if args.explain:
        payload["extensions"] = [
            {
                "formula": format_formula(ext.formula, m.game),
                "states": sorted(ext.states),
            }
            for ext in checker.subformula_extensions(phi)
        ]
    return (EXIT_OK if holds else EXIT_NEGATIVE), payload


def _cmd_witness(args) -> tuple:
    game = _load_game(args.game)
    profile = _parse_profile(game, args.profile)
    if args.z is not None:
        z = _load_restriction(args.z, game)
    else:
        z = nsd_fixpoint(game).final

    cap = _max_states()
    if args.kind in ("ccbr", "kw"):
        expected = 1
        for entries in z.sets:
            expected *= len(entries)
        for i in game.players:
            block = len(game.strategy_names[i])
            for j in game.players:
                if j != i:
                    block *= len(z.sets[j])
            expected += block
    else:
        expected = 1
        for count in game.strategy_counts:
            expected *= count
    if expected > cap:
        raise CliError(
            EXIT_INPUT, f"witness would have {expected} states, above TG_MAX_STATES={cap}"
        )

    try:
        if args.kind == "ccbr":
            result = build_ccbr_witness(game, profile, z)
        elif args.kind == "kw":
            result = build_kw_witness(game, profile, z)
        else:
            result = build_ir_witness(game, profile)
    except PreconditionError as exc:
        raise CliError(EXIT_NEGATIVE, str(exc)) from exc
    payload = {
        "kind": args.kind,
        "structure": structure_json_dict(result.structure),
        "designated_state": result.designated_state,
        "tags": [tag.to_json_dict() for tag in result.tags],
    }
    return EXIT_OK, payload


def _cmd_oracle(args) -> tuple:
    game = _load_game(args.game)
    return EXIT_OK, bruteforce.oracle_report(game)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tgames",
        description="Exact analysis of finite games with translucent players.",
    )
    parser.add_argument(
        "--pretty", action="store_true", help="indent JSON output"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="iterated minimax deletion with trace")
    p.add_argument("game")
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("ir", help="individual-rationality sets")
    p.add_argument("game")
    p.add_argument("--restrict", metavar="Z_JSON", help="restriction file")
    p.add_argument(
        "--prime", action="store_true", help="deviations range over the full game"
    )
    p.set_defaults(handler=_cmd_ir)

    p = sub.add_parser("rationalizable", help="iterated never-best-response deletion")
    p.add_argument("game")
    p.set_defaults(handler=_cmd_rationalizable)

    p = sub.add_parser("check-structure", help="validate a counterfactual structure")
    p.add_argument("structure")
    p.add_argument("--strong", action="store_true", help="also check strong appropriateness")
    p.add_argument(
        "--unilateral",
        action="store_true",
        help="report whether deviations leave others' strategies and beliefs fixed",
    )
    p.add_argument(
        "--epsilon", action="store_true", help="report worst-case counterfactual drift"
    )
    p.set_defaults(handler=_cmd_check_structure)

    p = sub.add_parser("model-check", help="evaluate a formula at a state")
    p.add_argument("structure")
    p.add_argument("--state", type=int, required=True)
    p.add_argument("--formula", required=True)
    p.add_argument(
        "--explain", action="store_true", help="include per-subformula extensions"
    )
    p.set_defaults(handler=_cmd_model_check)

    p = sub.add_parser("witness", help="construct a characterization witness")
    p.add_argument("game")
    p.add_argument("--profile", required=True, help="comma-separated strategy names")
    p.add_argument("--kind", choices=("ccbr", "kw", "ir"), required=True)
    p.add_argument(
        "--z", metavar="Z_JSON", help="witness sets (default: deletion fixpoint)"
    )
    p.set_defaults(handler=_cmd_witness)

    p = sub.add_parser("oracle", help="brute-force recomputation for cross-checking")
    p.add_argument("game")
    p.set_defaults(handler=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, payload = args.handler(args)
    except CliError as exc:
        error = {"message": str(exc), "code": exc.code}
        if exc.path is not None:
            error["path"] = exc.path
        print(json.dumps({"error": error}, sort_keys=True), file=sys.stderr)
        return exc.code
    if payload is not None:
        indent = 2 if args.pretty else None
        print(json.dumps(payload, sort_keys=True, indent=indent))
    return code


if __name__ == "__main__":
    sys.exit(main())
