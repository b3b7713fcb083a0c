"""Stable-model semantics: reduct, least model, and the stability test."""

from __future__ import annotations

from .program import GroundProgram, Rule


def reduct(program: GroundProgram, true_atoms: set[int]) -> list[tuple[int, tuple[int, ...]]]:
    """The positive program obtained for a candidate set of true atoms.

    Rules whose negative body clashes with the candidate are dropped, the
    rest keep only head and positive body. Constraints do not take part in
    the fixpoint and are omitted.
    """
    kept = []
    for rule in program.rules:
        if rule.is_constraint:
            continue
        if any(c in true_atoms for c in rule.neg):
            continue
        kept.append((rule.head, rule.pos))
    return kept


def least_model(positive_rules: list[tuple[int, tuple[int, ...]]]) -> set[int]:
    """Smallest set closed under the given positive rules."""
    derived: set[int] = set()
    changed = True
    while changed:
        changed = False
        for head, pos in positive_rules:
            if head not in derived and all(p in derived for p in pos):
                derived.add(head)
                changed = True
    return derived


def satisfies(rule: Rule, true_atoms: set[int]) -> bool:
    body_holds = all(p in true_atoms for p in rule.pos) and not any(
        c in true_atoms for c in rule.neg
    )
    if rule.is_constraint:
        return not body_holds
    return rule.head in true_atoms or not body_holds


def is_stable_model(program: GroundProgram, true_atoms: set[int]) -> bool:
    """True when the candidate satisfies every rule and equals the least
    model of its reduct."""
    if not all(satisfies(rule, true_atoms) for rule in program.rules):
        return False
    return least_model(reduct(program, true_atoms)) == true_atoms
