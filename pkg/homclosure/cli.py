"""Command-line front end: ``homclosure <command> ...``.

Exit codes: 0 for yes (and informational output), 1 for no or
no-at-bound, 2 for errors.
"""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from homclosure.config import DEFAULT_SETTINGS, ToolkitSettings, load_settings
from homclosure.core.formula import Formula
from homclosure.core.loader import Loader
from homclosure.core.signature import Signature
from homclosure.exceptions import LogicError
from homclosure.semantics.homs import HomConstraint
from homclosure.workflows import (
    EMIT_CONSTRUCTIONS,
    WorkflowReport,
    cmd_capture,
    cmd_charcheck,
    cmd_check,
    cmd_classify,
    cmd_emit,
    cmd_hom,
    cmd_homclosed,
    cmd_inhomcl,
    cmd_parse,
    cmd_reduce_3sat,
    cmd_sat,
    cmd_tgd_homclosed,
    cmd_tiling_check,
    cmd_tiling_sentence,
    cmd_tiling_solve,
)

logger = logging.getLogger(__name__)

EXIT_ERROR = 2

Handler = Callable[[argparse.Namespace, ToolkitSettings], WorkflowReport]


def settings_from_args(args: argparse.Namespace) -> ToolkitSettings:
    """Settings file first, then the ``--budget`` and ``--max-size`` overrides."""
    settings = load_settings(args.config) if args.config else DEFAULT_SETTINGS
    overrides: dict[str, object] = {}
    if args.budget is not None:
        overrides["max_candidates"] = args.budget
    if args.max_size is not None:
        overrides["default_max_size"] = args.max_size
    if args.log_level is not None:
        overrides["log_level"] = args.log_level
    if not overrides:
        return settings
    return ToolkitSettings(**{**settings.model_dump(), **overrides})


# Handlers


def _sentence(args: argparse.Namespace) -> tuple[Signature, Formula]:
    return Loader.load_sentence(args.sentence)


def run_parse(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    sig, phi = _sentence(args)
    return cmd_parse(sig, phi)


def run_check(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    sig, phi = _sentence(args)
    return cmd_check(phi, Loader.load_structure(args.structure, sig), settings)


def run_classify(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    sig, phi = _sentence(args)
    return cmd_classify(sig, phi)


def run_hom(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    source = Loader.load_structure(args.source)
    target = Loader.load_structure(args.target, source.sig)
    constraint = HomConstraint(
        injective=args.injective, surjective=args.surjective, strong=args.strong
    )
    return cmd_hom(source, target, constraint, args.verify)


def run_sat(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    sig, phi = _sentence(args)
    return cmd_sat(sig, phi, settings.default_max_size, settings)


def run_emit(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    sig, phi = _sentence(args)
    target = Loader.load_structure(args.target, sig) if args.target else None
    return cmd_emit(args.construction, sig, phi, target, args.n, settings)


def run_inhomcl(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    sig, phi = _sentence(args)
    target = Loader.load_structure(args.structure, sig)
    return cmd_inhomcl(
        phi, target, settings.default_max_size, args.strategy, settings, args.verify
    )


def run_homclosed(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    sig, phi = _sentence(args)
    return cmd_homclosed(sig, phi, settings.default_max_size, args.engine, settings, args.verify)


def run_tgd_homclosed(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    sig, phi = _sentence(args)
    return cmd_tgd_homclosed(sig, phi, args.verify)


def run_charcheck(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    sig, phi = _sentence(args)
    sig, psi = Loader.load_sentence(args.characterization, sig)
    return cmd_charcheck(sig, phi, psi, settings.default_max_size, settings, args.verify)


def run_capture(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    sig, phi = _sentence(args)
    structures = Loader.load_structures(args.structure, sig) if args.structure else []
    return cmd_capture(
        sig,
        phi,
        fragment=args.fragment,
        bound=args.bound or settings.default_max_size,
        structures=structures,
        lfp=args.lfp,
        check_stabilization=args.stabilization,
        settings=settings,
        verify=args.verify,
    )


def run_tiling_check(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    dsys = Loader.load_domino_system(args.dominoes)
    tiling = Loader.load_tiling(args.tiling) if args.tiling else None
    return cmd_tiling_check(dsys, tiling)


def run_tiling_solve(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    dsys = Loader.load_domino_system(args.dominoes)
    return cmd_tiling_solve(dsys, args.k, args.periodic, settings, args.verify)


def run_tiling_sentence(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    return cmd_tiling_sentence(Loader.load_domino_system(args.dominoes), args.mdtgd)


def run_reduce_3sat(args: argparse.Namespace, settings: ToolkitSettings) -> WorkflowReport:
    clauses = Loader.load_clauses(args.clauses)
    return cmd_reduce_3sat(clauses, args.decide, args.strategy, settings, args.verify)


# Parser


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML settings file")
    common.add_argument("--max-size", type=int, help="Largest domain size searched")
    common.add_argument("--budget", type=int, help="Search node budget (max_candidates)")
    common.add_argument("--json", action="store_true", help="Print the report as JSON")
    common.add_argument("--verify", action="store_true", help="Re-check witnesses independently")
    common.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (overrides the settings file)",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="homclosure", description="Homomorphism-closure toolkit for finite structures"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Handler, help_text: str) -> argparse.ArgumentParser:
        s = subparsers.add_parser(name, parents=[common], help=help_text)
        s.set_defaults(main=handler)
        return s

    def sentence(s: argparse.ArgumentParser) -> None:
        s.add_argument("sentence", type=Path, help="Sentence file with optional sig header")

    sentence(command("parse", run_parse, "Parse, validate and print a sentence"))

    s = command("check", run_check, "Evaluate a sentence in a structure")
    sentence(s)
    s.add_argument("structure", type=Path)

    sentence(command("classify", run_classify, "Report fragment memberships"))

    s = command("hom", run_hom, "Search a homomorphism between two structures")
    s.add_argument("source", type=Path)
    s.add_argument("target", type=Path)
    s.add_argument("--injective", action="store_true")
    s.add_argument("--surjective", action="store_true")
    s.add_argument("--strong", action="store_true")

    sentence(command("sat", run_sat, "Bounded model search"))

    s = command("emit", run_emit, "Print a sentence construction")
    sentence(s)
    s.add_argument("construction", choices=EMIT_CONSTRUCTIONS)
    s.add_argument("--target", type=Path, help="Target structure for colorings")
    s.add_argument("--n", type=int, help="Label bound for tr-n")

    s = command("inhomcl", run_inhomcl, "Homclosure membership of a structure")
    sentence(s)
    s.add_argument("structure", type=Path)
    s.add_argument("--strategy", choices=["labelled", "coloring"], default="labelled")

    s = command("homclosed", run_homclosed, "Closure under finite-target homomorphisms")
    sentence(s)
    s.add_argument("--engine", choices=["spoiler", "tgd", "brute"], default="spoiler")

    sentence(command("tgd-homclosed", run_tgd_homclosed, "Exact decision for TGD sentences"))

    s = command("charcheck", run_charcheck, "Check that a sentence characterizes the closure")
    sentence(s)
    s.add_argument("characterization", type=Path, help="Candidate defining sentence")

    s = command("capture", run_capture, "Build the capture of a guarded or two-variable sentence")
    sentence(s)
    s.add_argument("--fragment", choices=["gfo", "tgf", "fo2"], default="gfo")
    s.add_argument("--bound", type=int, help="Model size bound for summaries")
    s.add_argument("--lfp", action="store_true", help="Also print the fixpoint translation")
    s.add_argument("--structure", type=Path, help="Structures to test for membership")
    s.add_argument("--stabilization", action="store_true", help="Check summaries at bound+1")

    tiling = subparsers.add_parser("tiling", help="Domino systems and tilings")
    tiling_commands = tiling.add_subparsers(dest="tiling_command", required=True)

    t = tiling_commands.add_parser("check", parents=[common], help="Check determinism and a tiling")
    t.set_defaults(main=run_tiling_check)
    t.add_argument("dominoes", type=Path)
    t.add_argument("--tiling", type=Path, help="Rows of tile names, bottom row first")

    t = tiling_commands.add_parser("solve", parents=[common], help="Search a tiling")
    t.set_defaults(main=run_tiling_solve)
    t.add_argument("dominoes", type=Path)
    t.add_argument("--k", type=int, default=4, help="Side of the square")
    t.add_argument("--periodic", action="store_true", help="Search an ultimately periodic tiling")

    t = tiling_commands.add_parser("sentence", parents=[common], help="Print the tiling sentence")
    t.set_defaults(main=run_tiling_sentence)
    t.add_argument("dominoes", type=Path)
    t.add_argument("--mdtgd", action="store_true", help="Print the disjunctive variant")

    s = command("reduce-3sat", run_reduce_3sat, "Build the 3SAT gadget")
    s.add_argument("clauses", type=Path, help="One JSON array of three literals per line")
    s.add_argument("--decide", action="store_true", help="Decide membership at bound |A_S|")
    s.add_argument("--strategy", choices=["labelled", "coloring"], default="labelled")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = settings_from_args(args)
        logging.basicConfig(level=settings.log_level, format="%(levelname)s %(name)s: %(message)s")
        report: WorkflowReport = args.main(args, settings)
    except LogicError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR

    print(report.to_json() if args.json else report.to_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
