"""
Homclosedness of TGD sentences.

The decision follows a certificate scheme: every connected rule must be
self-redundant; the self-irredundant rules (all disconnected) are chased
from the initial structure into a universal model, and every one of them
must have its head discharged in the union of that model with its body,
glued at the constants. Without constants the head is connected and
irredundant, so this is discharge in the model itself. The nondeterministic
guesses are realized deterministically: redundancy witnesses by
lexicographic search, the derivation by firing rules in their normalized
order.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from itertools import product
from typing import Any

from homclosure.core.formula import Formula
from homclosure.core.signature import Signature
from homclosure.core.structure import Element, Structure, canonical_structure, glued_union
from homclosure.exceptions import FragmentError, HomError
from homclosure.semantics.evaluator import eval_fo
from homclosure.semantics.homs import Hom, find_hom
from homclosure.tgd.rules import TgdRule, check_redundancy_witness, redundancy_witness, tgd_normalize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChaseStep:
    """One rule application of a universal model derivation."""

    rule: int
    """Index of the fired rule in the normalized rule list"""

    trigger: Hom
    """Match of the rule body in the structure before firing"""

    added: dict[str, Element]
    """Elements carrying the head variables after firing"""


def _fire(structure: Structure, rule: TgdRule) -> tuple[Structure, dict[str, Element]]:
    """Add a fresh copy of the head of a disconnected rule, sharing the constants."""
    head, index = rule.head_structure(structure.sig)
    fired, _, right = glued_union(structure, head)
    return fired, {v: right[i] for v, i in index.items()}


def full_structure(sig: Signature) -> Structure:
    """One element per constant (at least one) and every relation full; a model of every TGD."""
    size = max(1, len(sig.constants))
    return Structure.build(
        sig,
        size,
        {c: i for i, c in enumerate(sig.constants)},
        {name: product(range(size), repeat=arity) for name, arity in sig.predicates},
    )


def chase_derivation(
    rules: Sequence[tuple[int, TgdRule]], sig: Signature
) -> tuple[Structure, list[ChaseStep]]:
    """
    Forward chaining from the initial structure, firing every rule at most once.

    Rules are tried in the given order, round after round, until no unfired
    rule has a body match. The initial structure names every constant apart.

    Args:
        rules: Disconnected rules paired with their indices
        sig: Signature of the rules

    Returns:
        Tuple of (universal model, derivation steps)

    Raises:
        FragmentError: If a rule is connected
    """
    for _, rule in rules:
        if rule.connected:
            raise FragmentError(f"Chase needs disconnected rules: {rule}")
    model = canonical_structure(sig, "initial")
    fired: set[int] = set()
    steps: list[ChaseStep] = []
    changed = True
    while changed:
        changed = False
        for index, rule in rules:
            if index in fired:
                continue
            body, _ = rule.body_structure(sig)
            trigger = find_hom(body, model)
            if trigger is None:
                continue
            model, added = _fire(model, rule)
            steps.append(ChaseStep(index, trigger, added))
            fired.add(index)
            changed = True
            logger.debug("Chase fired rule %d, model has %d elements", index, len(model))
    return model, steps


def chase_universal(rules: Sequence[TgdRule], sig: Signature) -> Structure:
    """Universal model of a set of disconnected rules."""
    model, _ = chase_derivation(list(enumerate(rules)), sig)
    return model


def discharge_target(model: Structure, rule: TgdRule) -> Structure:
    """The model glued with a copy of the rule body at the constants."""
    body, _ = rule.body_structure(model.sig)
    return glued_union(model, body)[0]


@dataclass(frozen=True)
class Certificate:
    """Evidence that a TGD sentence is homclosed."""

    sig: Signature
    rules: tuple[TgdRule, ...]
    redundancy: dict[int, dict[str, str]]
    """Self-redundant rules with their substitution of existential variables"""

    irredundant: tuple[int, ...]
    derivation: tuple[ChaseStep, ...]
    universal_model: Structure
    discharge: dict[int, dict[str, Element]]
    """Head variable images in the discharge target, per self-irredundant rule"""

    def problems(self) -> list[str]:
        """Re-check every witness independently; returns the violations found."""
        errors: list[str] = []
        indices = set(range(len(self.rules)))
        if set(self.redundancy) | set(self.irredundant) != indices or set(self.redundancy) & set(
            self.irredundant
        ):
            errors.append("relevance partition does not cover every rule exactly once")
        for i, witness in self.redundancy.items():
            if not check_redundancy_witness(self.rules[i], witness):
                errors.append(f"redundancy witness of rule {i} does not map the head into the body")
        for i in self.irredundant:
            if self.rules[i].connected:
                errors.append(f"connected rule {i} is classified self-irredundant")
        errors.extend(self._replay())
        for i in self.irredundant:
            witness = self.discharge.get(i)
            target = discharge_target(self.universal_model, self.rules[i])
            if witness is None or not _maps_head(self.rules[i], witness, target):
                errors.append(f"rule {i} has no valid discharge witness")
        return errors

    def _replay(self) -> list[str]:
        model = canonical_structure(self.sig, "initial")
        fired: set[int] = set()
        for step in self.derivation:
            if step.rule not in self.irredundant or step.rule in fired:
                return [f"derivation fires rule {step.rule} illegally"]
            body, _ = self.rules[step.rule].body_structure(self.sig)
            trigger = Hom(body, model, step.trigger.mapping)
            if not trigger.is_valid():
                return [f"derivation trigger of rule {step.rule} is not a homomorphism"]
            model, _ = _fire(model, self.rules[step.rule])
            fired.add(step.rule)
        if model != self.universal_model:
            return ["derivation does not produce the universal model"]
        return []

    def verify(self) -> None:
        """
        Raises:
            HomError: If a witness does not re-check
        """
        errors = self.problems()
        if errors:
            raise HomError("Invalid certificate: " + "; ".join(errors))

    def to_dict(self) -> dict[str, Any]:
        from homclosure.utils.serialization import StructureCodec

        return {
            "rules": [str(r) for r in self.rules],
            "redundancy": {str(i): w for i, w in sorted(self.redundancy.items())},
            "irredundant": list(self.irredundant),
            "derivation": [
                {"rule": s.rule, "trigger": s.trigger.to_dict()["map"], "added": s.added}
                for s in self.derivation
            ],
            "universal_model": StructureCodec.to_dict(self.universal_model),
            "discharge": {str(i): w for i, w in sorted(self.discharge.items())},
        }


def _maps_head(rule: TgdRule, witness: dict[str, Element], target: Structure) -> bool:
    head, index = rule.head_structure(target.sig)
    if set(witness) != set(index):
        return False
    mapping = {e: witness[v] for v, e in index.items()}
    mapping.update({head.constants[c]: target.constants[c] for c in head.constants})
    return Hom(head, target, mapping).is_valid()


@dataclass(frozen=True)
class SpoilerSketch:
    """A model, a non-model and the homomorphism between them, for one offending rule."""

    model: Structure
    non_model: Structure
    hom: Hom
    rule: TgdRule
    reason: str = field(default="")

    def problems(self, phi: Formula) -> list[str]:
        errors = []
        if not eval_fo(self.model, phi):
            errors.append("model does not satisfy the sentence")
        if eval_fo(self.non_model, phi):
            errors.append("non-model satisfies the sentence")
        if not self.hom.is_valid():
            errors.append("map is not a homomorphism")
        return errors

    def verify(self, phi: Formula) -> None:
        """
        Raises:
            HomError: If the sketch does not re-check
        """
        errors = self.problems(phi)
        if errors:
            raise HomError("Invalid spoiler sketch: " + "; ".join(errors))

    def to_dict(self) -> dict[str, Any]:
        from homclosure.utils.serialization import StructureCodec

        return {
            "reason": self.reason,
            "rule": str(self.rule),
            "model": StructureCodec.to_dict(self.model),
            "non_model": StructureCodec.to_dict(self.non_model),
            "hom": self.hom.to_dict(),
        }


def _sketch(model: Structure, rule: TgdRule, reason: str) -> SpoilerSketch:
    body, _ = rule.body_structure(model.sig)
    non_model, left, _ = glued_union(model, body)
    return SpoilerSketch(model, non_model, Hom(model, non_model, left), rule, reason)


def tgd_homclosed(phi: Formula, sig: Signature) -> tuple[bool, Certificate | SpoilerSketch]:
    """
    Decide whether a TGD sentence is homclosed.

    A connected self-irredundant rule is refuted on the full structure glued
    with its body. With constants a head atom over constants alone can hold
    there; such a rule is then refuted on the universal model instead.

    Returns:
        ``(True, certificate)`` or ``(False, spoiler sketch)``

    Raises:
        FragmentError: If phi is not a TGD sentence, or a connected rule with
            constants is refuted on neither candidate model
    """
    rules = tuple(tgd_normalize(phi))

    redundancy: dict[int, dict[str, str]] = {}
    irredundant: list[int] = []
    unrefuted: list[int] = []
    for i, rule in enumerate(rules):
        witness = redundancy_witness(rule)
        if witness is not None:
            redundancy[i] = witness
        elif rule.connected:
            logger.debug("Connected rule %d is self-irredundant", i)
            sketch = _sketch(full_structure(sig), rule, f"connected rule {i} is self-irredundant")
            if not sketch.problems(phi):
                return False, sketch
            unrefuted.append(i)
        else:
            irredundant.append(i)

    model, steps = chase_derivation([(i, rules[i]) for i in irredundant], sig)
    for i in unrefuted:
        sketch = _sketch(model, rules[i], f"connected rule {i} is self-irredundant")
        if not sketch.problems(phi):
            return False, sketch
    if unrefuted:
        raise FragmentError(f"Connected rules {unrefuted} have no spoiler on the candidate models")

    discharge: dict[int, dict[str, Element]] = {}
    for i in irredundant:
        head, index = rules[i].head_structure(sig)
        hom = find_hom(head, discharge_target(model, rules[i]))
        if hom is None:
            logger.debug("Rule %d has no discharge witness", i)
            return False, _sketch(model, rules[i], f"rule {i} is not discharged in the universal model")
        discharge[i] = {v: hom(e) for v, e in index.items()}

    certificate = Certificate(
        sig=sig,
        rules=rules,
        redundancy=redundancy,
        irredundant=tuple(irredundant),
        derivation=tuple(steps),
        universal_model=model,
        discharge=discharge,
    )
    return True, certificate
