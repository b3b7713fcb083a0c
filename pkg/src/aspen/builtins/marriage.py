"""Stable-marriage instances, encodings, and stability propagators.

An instance is a set of facts: ``man(M).``, ``woman(W).``, and one
``pref(P,Q,S).`` fact per ordered person pair, where a higher score ``S``
means ``P`` likes ``Q`` more. A matching marries every man to exactly one
woman; a man ``m`` and a woman ``w`` *block* it when both would rather be
together than with their assigned partners — strictly so for ``m``, weakly
so for ``w``. A matching is stable when no pair blocks it.

The stability test can be enforced three interchangeable ways:

* :class:`MarriageLazy` waits for a complete candidate matching and rejects
  it with one constraint per blocking pair.
* :class:`MarriageEager` reacts to each ``match`` atom the moment it becomes
  true and falsifies every partner assignment it rules out.
* :class:`MarriagePost` draws the same inferences from batches of newly true
  atoms at the propagation fixpoint.

Alternatively :func:`encoding_lines` with ``blocking_constraints=True``
spells the test out as ground constraints, so plain search with no
propagator produces the same models.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from ..errors import PluginContractViolation, SolverError
from ..extensions import Propagator
from ..parser import parse_program

_MAN_RE = re.compile(r"man\(([a-z][A-Za-z0-9_]*)\)\Z")
_WOMAN_RE = re.compile(r"woman\(([a-z][A-Za-z0-9_]*)\)\Z")
_PREF_RE = re.compile(r"pref\(([a-z][A-Za-z0-9_]*),([a-z][A-Za-z0-9_]*),(\d+)\)\Z")
_MATCH_RE = re.compile(r"match\(([a-z][A-Za-z0-9_]*),([a-z][A-Za-z0-9_]*)\)\Z")


@dataclass
class PreferenceTable:
    """Who likes whom how much, read off a program's ``man``/``woman``/``pref`` atoms."""

    men: list[str] = field(default_factory=list)
    women: list[str] = field(default_factory=list)
    score: dict[tuple[str, str], int] = field(default_factory=dict)

    @classmethod
    def from_program(cls, program) -> "PreferenceTable":
        table = cls()
        for name in program.atom_names():
            m = _MAN_RE.fullmatch(name)
            if m:
                table.men.append(m.group(1))
                continue
            m = _WOMAN_RE.fullmatch(name)
            if m:
                table.women.append(m.group(1))
                continue
            m = _PREF_RE.fullmatch(name)
            if m:
                table.score[(m.group(1), m.group(2))] = int(m.group(3))
        return table

    @classmethod
    def from_text(cls, text: str) -> "PreferenceTable":
        return cls.from_program(parse_program(text))

    def validate(self) -> None:
        """Require a score in both directions for every man/woman pair."""
        for m in self.men:
            for w in self.women:
                for p, q in ((m, w), (w, m)):
                    if (p, q) not in self.score:
                        raise SolverError(f"no pref({p},{q},_) fact in the instance")


def generate_sm_instance(n: int, k: int = 0, seed: int = 0) -> str:
    """Text of a random n×n instance: facts only, one per line.

    Every score starts at 2 and each person demotes ``n*k//100`` randomly
    chosen candidates to 1, so ``k`` controls how much preferences diverge
    from indifference. The same ``(n, k, seed)`` always yields the same text.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 <= k <= 100:
        raise ValueError("k must be between 0 and 100")
    rng = random.Random(seed)
    demote = n * k // 100
    lines = [f"man(m{i})." for i in range(1, n + 1)]
    lines += [f"woman(w{i})." for i in range(1, n + 1)]
    for m in range(1, n + 1):
        scores = dict.fromkeys(range(1, n + 1), 2)
        for w in rng.sample(range(1, n + 1), demote):
            scores[w] = 1
        lines += [f"pref(m{m},w{w},{scores[w]})." for w in range(1, n + 1)]
    for w in range(1, n + 1):
        scores = dict.fromkeys(range(1, n + 1), 2)
        for m in rng.sample(range(1, n + 1), demote):
            scores[m] = 1
        lines += [f"pref(w{w},m{m},{scores[m]})." for m in range(1, n + 1)]
    return "\n".join(lines) + "\n"


def encoding_lines(instance: str, *, blocking_constraints: bool = False) -> list[str]:
    """Ground rules turning an instance into a matching program.

    The returned lines generate one partner per man (``match``/``nmatch``
    choice, at-most-one per row and column, everyone married). With
    ``blocking_constraints=True`` they also forbid every would-be blocking
    pair outright, making stability part of the program itself. Bodies are
    emitted already simplified: instance facts are known true and score
    comparisons are evaluated while grounding.
    """
    table = PreferenceTable.from_text(instance)
    table.validate()
    men, women, score = table.men, table.women, table.score
    lines = []
    for m in men:
        for w in women:
            lines.append(f"match({m},{w}) :- not nmatch({m},{w}).")
    for m in men:
        for w in women:
            lines.append(f"nmatch({m},{w}) :- not match({m},{w}).")
    for w in women:
        for i, m1 in enumerate(men):
            for m2 in men[i + 1 :]:
                lines.append(f":- match({m1},{w}), match({m2},{w}).")
    for m in men:
        for i, w1 in enumerate(women):
            for w2 in women[i + 1 :]:
                lines.append(f":- match({m},{w1}), match({m},{w2}).")
    for m in men:
        for w in women:
            lines.append(f"married({m}) :- match({m},{w}).")
    for m in men:
        lines.append(f":- not married({m}).")
    if blocking_constraints:
        seen = set()
        for m in men:
            for w1 in women:  # m's hypothetical partner
                for m1 in men:
                    if m1 == m:
                        continue
                    for w in women:  # m1's hypothetical partner
                        if w == w1:
                            continue
                        if score[(m, w)] > score[(m, w1)] and score[(w, m)] >= score[(w, m1)]:
                            key = frozenset(((m, w1), (m1, w)))
                            if key not in seen:
                                seen.add(key)
                                lines.append(f":- match({m},{w1}), match({m1},{w}).")
    return lines


def encode_stable_marriage(instance: str, *, blocking_constraints: bool = False):
    """Parse an instance plus its matching rules into a ground program."""
    rules = encoding_lines(instance, blocking_constraints=blocking_constraints)
    return parse_program(instance + "\n" + "\n".join(rules) + "\n")


class _MarriageBase(Propagator):
    """Shared binding: the preference table and the program's match atoms."""

    def bind(self, program) -> None:
        self.table = PreferenceTable.from_program(program)
        self.table.validate()
        self._match_atoms: list[tuple[int, str, str]] = []
        self._partner: dict[int, tuple[str, str]] = {}
        men = set(self.table.men)
        women = set(self.table.women)
        for name in program.atom_names():
            m = _MATCH_RE.fullmatch(name)
            if not m:
                continue
            who, whom = m.group(1), m.group(2)
            if who not in men or whom not in women:
                raise SolverError(f"match atom {name} names an unknown person")
            aid = program.atom_id(name)
            self._match_atoms.append((aid, who, whom))
            self._partner[aid] = (who, whom)

    def _blocks(self, m: str, w1: str, m1: str, w: str) -> bool:
        """Would (m,w) or (m1,w1) block the pairing m–w1, m1–w?"""
        score = self.table.score
        return (
            score[(m, w)] > score[(m, w1)] and score[(w, m)] >= score[(w, m1)]
        ) or (
            score[(m1, w1)] > score[(m1, w)] and score[(w1, m1)] >= score[(w1, m)]
        )


class MarriageLazy(_MarriageBase):
    """Accept or reject complete matchings only.

    ``check_stable_model`` scans the candidate's true ``match`` atoms for
    blocking pairs and, when any exist, rejects with one constraint per
    offending pair of assignments, each a pair of currently true atoms.
    """

    _name = "sm-lazy"

    def bind(self, program) -> None:
        super().bind(program)
        self._failures: list[list[int]] = []

    def check_stable_model(self, true_atoms) -> bool:
        true_set = set(true_atoms)
        matched = [entry for entry in self._match_atoms if entry[0] in true_set]
        score = self.table.score
        failures = []
        seen = set()
        for aid1, m, w1 in matched:
            for aid2, m1, w in matched:
                if m1 == m:
                    continue
                if score[(m, w)] > score[(m, w1)] and score[(w, m)] >= score[(w, m1)]:
                    key = frozenset((aid1, aid2))
                    if key not in seen:
                        seen.add(key)
                        failures.append(sorted(key))
        self._failures = failures
        return not failures

    def get_reasons_for_check_failure(self):
        return [list(c) for c in self._failures]


class _StabilityWatcher(_MarriageBase):
    """Inference machinery shared by the eager and post variants.

    Both subscribe to every ``match`` literal in both polarities and mirror
    their assignment. When ``match(m,w1)`` becomes true, any other man's
    assignment ``match(m1,w)`` that would complete a blocked pairing is
    falsified. The mirror also keeps, per ruled-out atom, the triggering
    literal of the inference that actually took effect: a fresh trigger is
    recorded only while the atom is not currently false, so the stored one
    always names an assignment made strictly before the engine acted on the
    inference, which is exactly what a later reason request must justify.
    """

    def bind(self, program) -> None:
        super().bind(program)
        self._truth: dict[int, bool] = {}
        self._cause: dict[int, int] = {}

    def attach_literals(self):
        out = []
        for aid, _, _ in self._match_atoms:
            out.append(aid)
            out.append(-aid)
        return out

    def on_literals_undefined(self, lits) -> None:
        for lit in lits:
            self._truth.pop(abs(lit), None)

    def get_reason_for_literal(self, lit):
        cause = self._cause.get(-lit) if lit < 0 else None
        if cause is None:
            raise PluginContractViolation(f"{self.name}: no inference recorded for literal {lit}")
        return [-lit, cause]

    def _absorb(self, lit: int) -> list[int]:
        """Update the mirror with one true literal; return the inferences."""
        if lit < 0:
            self._truth[-lit] = False
            return []
        self._truth[lit] = True
        m, w1 = self._partner[lit]
        out = []
        for aid2, m1, w in self._match_atoms:
            if m1 == m:
                continue
            if self._blocks(m, w1, m1, w):
                if self._truth.get(aid2) is not False:
                    self._cause[aid2] = lit
                out.append(-aid2)
        return out


class MarriageEager(_StabilityWatcher):
    """Falsify blocked assignments literal by literal inside the fixpoint."""

    _name = "sm-eager"

    def on_literal_true(self, lit):
        return self._absorb(lit)


class MarriagePost(_StabilityWatcher):
    """Falsify blocked assignments from batches at the propagation fixpoint."""

    _name = "sm-post"

    def on_literals_true(self, lits):
        out = []
        emitted = set()
        for lit in lits:
            for inferred in self._absorb(lit):
                if inferred not in emitted:
                    emitted.add(inferred)
                    out.append(inferred)
        return out
