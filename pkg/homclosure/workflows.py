"""
Decision workflows shared by the command line and the agent tool.

Every workflow returns a ``WorkflowReport``. Verdicts found by a search up
to a size bound are labelled ``no-at-bound`` (or ``yes-at-bound`` when the
bounded search looks for a counterexample), never plain ``no``/``yes``.
"""

import json
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any, Literal

from homclosure.capture.builder import build_capture
from homclosure.capture.eafo import eafo_homclosure
from homclosure.capture.lfp import lfp_translate_capture
from homclosure.capture.normal_form import Fragment
from homclosure.config import DEFAULT_SETTINGS, ToolkitSettings
from homclosure.core.formula import Formula, conj, is_first_order, neg
from homclosure.core.loader import parse_document
from homclosure.core.signature import Signature
from homclosure.core.structure import Structure, bit_predicate, bit_width
from homclosure.exceptions import FormulaValidationError, FragmentError, HomError, ReductionError
from homclosure.reductions.dominoes import (
    DominoSystem,
    Tiling,
    bounded_tiling,
    check_deterministic,
    check_tiling,
    periodic_tiling,
)
from homclosure.reductions.grid import mdtgd_variant, tiling_sentence, tiling_signature
from homclosure.reductions.sat3 import SAT3_SIGNATURE, sat3_gadget
from homclosure.semantics.evaluator import evaluate
from homclosure.semantics.homs import HomConstraint, find_hom
from homclosure.semantics.model_finder import bounded_models, bounded_sat
from homclosure.syntax.fragments import classify
from homclosure.syntax.normal_forms import nnf, quantifier_rank
from homclosure.tgd.decider import Certificate, tgd_homclosed
from homclosure.transforms.coloring import (
    ColoringWitness,
    coloring,
    coloring_signature,
    decode_coloring_witness,
    homclosure_witness,
)
from homclosure.transforms.labels import tr_n
from homclosure.transforms.relativize import relativize
from homclosure.transforms.second_order import eso_fin_wrap, so_shom, so_sup
from homclosure.transforms.spoilers import (
    INCLUSION_PREDICATE,
    SURVIVOR_PREDICATE,
    SpoilerKind,
    spoiler_construction,
    spoiler_search,
)
from homclosure.utils.formula_printer import FormulaPrinter
from homclosure.utils.serialization import StructureCodec

logger = logging.getLogger(__name__)

Verdict = Literal["yes", "no", "no-at-bound", "yes-at-bound"]
Strategy = Literal["labelled", "coloring"]
Engine = Literal["spoiler", "tgd", "brute"]

EMIT_CONSTRUCTIONS = (
    "nnf",
    "relativize",
    "tr-n",
    "coloring-int",
    "coloring-ext",
    "spoiler-injective",
    "spoiler-strong-surjective",
    "spoiler-monomerge",
    "spoiler-combined-arb",
    "spoiler-combined-fin",
    "sup",
    "shom",
    "eso-fin",
    "eafo",
)


@dataclass(frozen=True)
class WorkflowReport:
    """Outcome of one workflow run."""

    command: str
    verdict: Verdict | None = None
    """None for purely informational commands"""

    details: dict[str, Any] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return 0 if self.verdict in (None, "yes", "yes-at-bound") else 1

    def to_dict(self) -> dict[str, Any]:
        return {"command": self.command, "verdict": self.verdict, **self.details}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_text(self) -> str:
        lines = [f"{self.command}: {self.verdict}" if self.verdict else self.command]
        for key in sorted(self.details):
            value = self.details[key]
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True)
            lines.append(f"  {key}: {value}")
        return "\n".join(lines)


def _document(sig: Signature, phi: Formula) -> str:
    return FormulaPrinter.document(sig, phi).strip()


def _structure(structure: Structure) -> dict[str, Any]:
    return StructureCodec.to_dict(structure)


# Basic commands


def cmd_parse(sig: Signature, phi: Formula) -> WorkflowReport:
    return WorkflowReport("parse", details={"sentence": _document(sig, phi)})


def cmd_classify(sig: Signature, phi: Formula) -> WorkflowReport:
    return WorkflowReport("classify", details={"fragments": classify(phi, sig).to_dict()})


def cmd_check(
    phi: Formula, structure: Structure, settings: ToolkitSettings | None = None
) -> WorkflowReport:
    holds = evaluate(structure, phi, settings=settings)
    return WorkflowReport("check", "yes" if holds else "no")


def cmd_hom(
    source: Structure,
    target: Structure,
    constraint: HomConstraint = HomConstraint(),
    verify: bool = False,
) -> WorkflowReport:
    """Exact homomorphism search under the requested side conditions."""
    hom = find_hom(source, target, constraint)
    if hom is None:
        return WorkflowReport("hom", "no")
    if verify:
        hom.verify(constraint)
    return WorkflowReport("hom", "yes", {"hom": hom.to_dict()})


def cmd_sat(
    sig: Signature, phi: Formula, bound: int, settings: ToolkitSettings | None = None
) -> WorkflowReport:
    model = bounded_sat(phi, sig, bound, settings)
    if model is None:
        return WorkflowReport("sat", "no-at-bound", {"bound": bound})
    return WorkflowReport("sat", "yes", {"bound": bound, "model": _structure(model)})


def emit_construction(
    construction: str,
    sig: Signature,
    phi: Formula,
    target: Structure | None = None,
    n: int | None = None,
    settings: ToolkitSettings | None = None,
) -> tuple[Signature, Formula]:
    """
    Build one of ``EMIT_CONSTRUCTIONS`` together with its signature.

    Raises:
        ValueError: If the construction is unknown or misses its target structure
        FormulaValidationError: If a first-order construction receives another formula
    """
    if construction == "nnf":
        return sig, nnf(phi)
    if construction == "relativize":
        return sig.with_predicates([(SURVIVOR_PREDICATE, 1)]), relativize(
            phi, SURVIVOR_PREDICATE, sig
        )
    if construction == "tr-n":
        labels = n or max(1, quantifier_rank(phi))
        bits = [(bit_predicate(j), 1) for j in range(1, bit_width(labels) + 1)]
        return sig.with_predicates(bits), tr_n(phi, labels)
    if construction in ("coloring-int", "coloring-ext"):
        if target is None:
            raise ValueError(f"{construction} needs a target structure")
        mode: Literal["int", "ext"] = "int" if construction == "coloring-int" else "ext"
        return coloring_signature(target), coloring(phi, target, mode)
    if construction.startswith("spoiler-"):
        built = spoiler_construction(phi, sig, SpoilerKind(construction.removeprefix("spoiler-")))
        if built.kind in (SpoilerKind.STRONG_SURJECTIVE, SpoilerKind.COMBINED_ARB):
            logger.warning("The strong surjective spoiler sentence may be exponentially large")
        return built.sig, built.formula
    if construction == "sup":
        return sig, so_sup(phi, sig)
    if construction == "shom":
        return sig, so_shom(phi, sig)
    if construction == "eso-fin":
        return sig, eso_fin_wrap(phi, INCLUSION_PREDICATE, sig)
    if construction == "eafo":
        return sig, eafo_homclosure(phi, sig, settings)
    raise ValueError(f"Unknown construction: {construction}")


def cmd_emit(
    construction: str,
    sig: Signature,
    phi: Formula,
    target: Structure | None = None,
    n: int | None = None,
    settings: ToolkitSettings | None = None,
) -> WorkflowReport:
    out_sig, result = emit_construction(construction, sig, phi, target, n, settings)
    return WorkflowReport(
        "emit",
        details={
            "construction": construction,
            "sentence": _document(out_sig, result),
            "fragments": classify(result, out_sig).to_dict(),
        },
    )


# Homclosure membership


def _revalidate(phi: Formula, target: Structure, witness: ColoringWitness) -> list[str]:
    problems = []
    if not evaluate(witness.model, phi):
        problems.append("witness is not a model of the sentence")
    if not witness.hom.is_valid() or witness.hom.target != target:
        problems.append("witness map is not a homomorphism into the target")
    if not evaluate(witness.encode(), coloring(phi, target, "int")):
        problems.append("encoded witness does not satisfy the intrinsic coloring")
    return problems


def cmd_inhomcl(
    phi: Formula,
    target: Structure,
    bound: int,
    strategy: Strategy = "labelled",
    settings: ToolkitSettings | None = None,
    verify: bool = True,
) -> WorkflowReport:
    """
    Is the target a homomorphic image of a model of phi with at most ``bound`` elements?

    Args:
        phi: Sentence over the target's signature
        target: Finite target structure
        bound: Largest witness model size searched
        strategy: ``labelled`` fixes the homomorphism first; ``coloring``
            searches models of the intrinsic coloring directly
        settings: Search budgets
        verify: Re-check a found witness independently

    Returns:
        ``yes`` with the witness model and its map, or ``no-at-bound``

    Raises:
        HomError: If a found witness does not re-check
        BudgetExceededError: If a search exceeds its budget
    """
    settings = settings or DEFAULT_SETTINGS
    if strategy == "coloring":
        colored = bounded_sat(
            coloring(phi, target, "int"), coloring_signature(target), bound, settings
        )
        witness = decode_coloring_witness(colored, target) if colored is not None else None
    elif strategy == "labelled":
        witness = homclosure_witness(phi, target, bound, settings)
    else:
        raise ValueError(f"Unknown strategy: {strategy}")

    details: dict[str, Any] = {"bound": bound, "strategy": strategy}
    if witness is None:
        return WorkflowReport("inhomcl", "no-at-bound", details)
    if verify:
        problems = _revalidate(phi, target, witness)
        if problems:
            raise HomError("Homclosure witness does not re-check: " + "; ".join(problems))
    details["model"] = _structure(witness.model)
    details["hom"] = witness.hom.to_dict()
    return WorkflowReport("inhomcl", "yes", details)


# Homclosedness


def cmd_homclosed(
    sig: Signature,
    phi: Formula,
    bound: int,
    engine: Engine = "spoiler",
    settings: ToolkitSettings | None = None,
    verify: bool = True,
) -> WorkflowReport:
    """
    Is phi closed under homomorphisms into finite structures?

    The spoiler and brute engines search spoilers up to the bound: a found
    spoiler is a definite ``no``, an empty search is ``yes-at-bound``. The
    TGD engine decides exactly.

    Raises:
        FragmentError: If the tgd engine receives a non-TGD sentence
        HomError: If a found spoiler or certificate does not re-check
        BudgetExceededError: If a search exceeds its budget
    """
    settings = settings or DEFAULT_SETTINGS
    details: dict[str, Any] = {"engine": engine}
    if engine == "tgd":
        if not classify(phi, sig).tgd:
            raise FragmentError("The tgd engine needs a TGD sentence")
        closed, artifact = tgd_homclosed(phi, sig)
        if verify:
            if isinstance(artifact, Certificate):
                artifact.verify()
            else:
                artifact.verify(phi)
        details["certificate" if closed else "spoiler"] = artifact.to_dict()
        return WorkflowReport("homclosed", "yes" if closed else "no", details)

    details["bound"] = bound
    if engine == "spoiler":
        construction = spoiler_construction(phi, sig, SpoilerKind.COMBINED_FIN)
        model = bounded_sat(construction.formula, construction.sig, bound, settings)
        spoiler = construction.decode(model, settings) if model is not None else None
    elif engine == "brute":
        spoiler = spoiler_search(phi, sig, bound, settings)
    else:
        raise ValueError(f"Unknown engine: {engine}")

    if spoiler is None:
        return WorkflowReport("homclosed", "yes-at-bound", details)
    if verify:
        spoiler.verify(phi, settings)
    details["spoiler"] = spoiler.to_dict()
    return WorkflowReport("homclosed", "no", details)


def cmd_tgd_homclosed(sig: Signature, phi: Formula, verify: bool = True) -> WorkflowReport:
    report = cmd_homclosed(sig, phi, 0, "tgd", verify=verify)
    return WorkflowReport("tgd-homclosed", report.verdict, report.details)


# Characterization check


def cmd_charcheck(
    sig: Signature,
    phi: Formula,
    psi: Formula,
    bound: int,
    settings: ToolkitSettings | None = None,
    verify: bool = True,
) -> WorkflowReport:
    """
    Bounded evidence that psi defines the homomorphism closure of phi.

    1. entailment: no model of phi falsifies psi.
    2. homclosed: psi has no spoiler (the brute engine for fixpoint psi).
    3. coverage: every model of psi is the image of a model of phi.

    Each check reports ``pass-at-bound``, ``fail`` (a definite
    counterexample) or ``fail-at-bound``.
    """
    settings = settings or DEFAULT_SETTINGS
    checks: dict[str, Any] = {}

    countermodel = bounded_sat(conj(phi, neg(psi)), sig, bound, settings)
    checks["entailment"] = (
        {"result": "pass-at-bound"}
        if countermodel is None
        else {"result": "fail", "countermodel": _structure(countermodel)}
    )

    engine: Engine = "spoiler" if is_first_order(psi) else "brute"
    closed = cmd_homclosed(sig, psi, bound, engine, settings, verify)
    checks["homclosed"] = (
        {"result": "pass-at-bound"}
        if closed.verdict == "yes-at-bound"
        else {"result": "fail", "spoiler": closed.details.get("spoiler")}
    )

    uncovered = None
    for model in bounded_models(psi, sig, bound, settings):
        if homclosure_witness(phi, model, bound, settings) is None:
            uncovered = model
            break
    checks["coverage"] = (
        {"result": "pass-at-bound"}
        if uncovered is None
        else {"result": "fail-at-bound", "uncovered": _structure(uncovered)}
    )

    results = [c["result"] for c in checks.values()]
    verdict: Verdict
    if all(r == "pass-at-bound" for r in results):
        verdict = "yes-at-bound"
    elif "fail" in results:
        verdict = "no"
    else:
        verdict = "no-at-bound"
    return WorkflowReport("charcheck", verdict, {"bound": bound, "checks": checks})


# Capture


def cmd_capture(
    sig: Signature,
    phi: Formula,
    fragment: Fragment = "gfo",
    bound: int | None = None,
    structures: Sequence[Structure] = (),
    lfp: bool = False,
    check_stabilization: bool = False,
    settings: ToolkitSettings | None = None,
    verify: bool = False,
) -> WorkflowReport:
    """
    Build the capture of phi's homomorphism closure and decide membership.

    With structures, the verdict is ``yes`` when all are admitted and
    ``no-at-bound`` otherwise, since a larger size bound may add summaries.

    Raises:
        FragmentError: If phi is outside the fragment
        HomError: If ``verify`` is set and a witness expansion fails the capture sentence
    """
    capture = build_capture(phi, sig, fragment, bound, settings, check_stabilization)
    details: dict[str, Any] = {"capture": capture.to_dict()}
    if lfp:
        details["lfp"] = FormulaPrinter.to_text(lfp_translate_capture(capture))
    if not structures:
        return WorkflowReport("capture", details=details)

    memberships = []
    for structure in structures:
        witness = capture.admits(structure)
        if verify and witness is not None:
            expanded = capture.witness_structure(structure, witness)
            if not evaluate(expanded, capture.disjunct(witness.summary)):
                raise HomError("Capture witness does not satisfy its disjunct")
        memberships.append(
            {"admitted": witness is not None, "witness": witness.to_dict() if witness else None}
        )
    details["memberships"] = memberships
    verdict: Verdict = "yes" if all(m["admitted"] for m in memberships) else "no-at-bound"
    return WorkflowReport("capture", verdict, details)


# Tilings


def cmd_tiling_check(dsys: DominoSystem, tiling: Tiling | None = None) -> WorkflowReport:
    """Determinism of the system, and validity of a tiling when given."""
    deterministic, violation = check_deterministic(dsys)
    details: dict[str, Any] = {"deterministic": deterministic, "violation": violation}
    ok = deterministic
    if tiling is not None:
        problems = check_tiling(dsys, tiling)
        details["tiling_problems"] = problems
        ok = ok and not problems
    return WorkflowReport("tiling check", "yes" if ok else "no", details)


def cmd_tiling_solve(
    dsys: DominoSystem,
    k: int,
    periodic: bool = False,
    settings: ToolkitSettings | None = None,
    verify: bool = True,
) -> WorkflowReport:
    """
    Search a k x k tiling, or an ultimately periodic one within the configured bounds.

    Raises:
        ReductionError: If ``verify`` is set and a found tiling violates a constraint
    """
    settings = settings or DEFAULT_SETTINGS
    if periodic:
        found = periodic_tiling(dsys, settings)
        if found is None:
            return WorkflowReport("tiling solve", "no-at-bound", {"periodic": True})
        window, spec = found
        if verify and check_tiling(dsys, window):
            raise ReductionError("Periodic tiling window violates the domino constraints")
        return WorkflowReport(
            "tiling solve",
            "yes",
            {"periodic": True, "window": [list(r) for r in window], "spec": spec.to_dict()},
        )
    tiling = bounded_tiling(dsys, k, settings=settings)
    if tiling is None:
        return WorkflowReport("tiling solve", "no", {"k": k})
    if verify and check_tiling(dsys, tiling):
        raise ReductionError("Tiling violates the domino constraints")
    return WorkflowReport("tiling solve", "yes", {"k": k, "tiling": [list(r) for r in tiling]})


def cmd_tiling_sentence(dsys: DominoSystem, mdtgd: bool = False) -> WorkflowReport:
    phi = mdtgd_variant(dsys) if mdtgd else tiling_sentence(dsys)
    sig = tiling_signature(dsys)
    return WorkflowReport(
        "tiling sentence",
        details={"variant": "mdtgd" if mdtgd else "tgd", "sentence": _document(sig, phi)},
    )


# 3SAT


def cmd_reduce_3sat(
    clauses: Iterable[Sequence[int | str]],
    decide: bool = False,
    strategy: Strategy = "labelled",
    settings: ToolkitSettings | None = None,
    verify: bool = True,
) -> WorkflowReport:
    """
    Emit the 3SAT gadget, and optionally decide membership at bound |A_S|.

    Raises:
        ReductionError: On malformed clauses
    """
    clauses = [list(c) for c in clauses]
    structure, phi = sat3_gadget(clauses)
    details: dict[str, Any] = {
        "structure": _structure(structure),
        "sentence": _document(SAT3_SIGNATURE, phi),
    }
    if not decide:
        return WorkflowReport("reduce-3sat", details=details)
    report = cmd_inhomcl(phi, structure, len(structure), strategy, settings, verify)
    details["membership"] = report.details
    return WorkflowReport("reduce-3sat", report.verdict, details)


# Dispatch for text inputs


def run_workflow(
    workflow: str,
    sentence: str,
    structure: str | None = None,
    bound: int | None = None,
    settings: ToolkitSettings | None = None,
) -> WorkflowReport:
    """
    Run ``inhomcl``, ``homclosed`` or ``classify`` on texts in the module formats.

    Raises:
        ValueError: On an unknown workflow or a missing structure
        LogicError: Parse, validation and budget errors
    """
    settings = settings or DEFAULT_SETTINGS
    bound = bound or settings.default_max_size
    sig, phi = parse_document(sentence)
    if workflow == "classify":
        return cmd_classify(sig, phi)
    if workflow == "homclosed":
        if not is_first_order(phi):
            raise FormulaValidationError("homclosed needs a first-order sentence")
        return cmd_homclosed(sig, phi, bound, settings=settings)
    if workflow == "inhomcl":
        if not structure:
            raise ValueError("inhomcl needs a structure")
        targets = StructureCodec.loads(structure, sig)
        return cmd_inhomcl(phi, targets[0], bound, settings=settings)
    raise ValueError(f"Unknown workflow: {workflow}")
