"""Ground normal programs and their nogood translation.

Atoms are interned to dense positive ids. A literal is a signed atom id:
``a`` means the atom is true, ``-a`` means it is false. A nogood is a list of
literals that must never become simultaneously true.
"""

from __future__ import annotations

from dataclasses import dataclass


def complement(lit: int) -> int:
    """The opposite polarity of a literal."""
    return -lit


@dataclass(frozen=True)
class Rule:
    """One ground rule. ``head is None`` encodes a constraint."""

    head: int | None
    pos: tuple[int, ...]
    neg: tuple[int, ...]

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    @property
    def is_fact(self) -> bool:
        return self.head is not None and not self.pos and not self.neg


class GroundProgram:
    """Symbol table plus rule list.

    ``add_rule`` normalizes bodies (duplicates removed) and silently drops
    rules that can never matter: tautologies (head occurs in the positive
    body) and rules whose body contains an atom both positively and
    negatively.
    """

    def __init__(self) -> None:
        self._names: list[str] = []
        self._ids: dict[str, int] = {}
        self.rules: list[Rule] = []

    # ── Symbol table ──────────────────────────────────────────────

    @property
    def num_atoms(self) -> int:
        return len(self._names)

    def atom(self, name: str) -> int:
        """Intern a name, returning its id (first occurrence order, 1-based)."""
        aid = self._ids.get(name)
        if aid is None:
            self._names.append(name)
            aid = len(self._names)
            self._ids[name] = aid
        return aid

    def atom_name(self, aid: int) -> str:
        return self._names[aid - 1]

    def atom_id(self, name: str) -> int | None:
        return self._ids.get(name)

    def atom_names(self) -> list[str]:
        return list(self._names)

    # ── Rules ─────────────────────────────────────────────────────

    def add_rule(self, head: int | None, pos=(), neg=()) -> Rule | None:
        pos = _dedupe(pos)
        neg = _dedupe(neg)
        if head is not None and head in pos:
            return None  # tautology
        if set(pos) & set(neg):
            return None  # body can never hold
        rule = Rule(head, tuple(pos), tuple(neg))
        self.rules.append(rule)
        return rule

    @property
    def facts(self) -> set[int]:
        return {r.head for r in self.rules if r.is_fact}

    # ── Text form ─────────────────────────────────────────────────

    def pretty(self) -> str:
        """Canonical text form; reparsing it reproduces this program."""
        out = []
        for r in self.rules:
            body = [self.atom_name(a) for a in r.pos]
            body += ["not " + self.atom_name(a) for a in r.neg]
            if r.is_constraint:
                out.append(":- " + ", ".join(body) + ".")
            elif body:
                out.append(self.atom_name(r.head) + " :- " + ", ".join(body) + ".")
            else:
                out.append(self.atom_name(r.head) + ".")
        return "\n".join(out) + ("\n" if out else "")

    def __str__(self) -> str:
        return self.pretty()

    def __repr__(self) -> str:
        return f"<GroundProgram atoms={self.num_atoms} rules={len(self.rules)}>"


def _dedupe(items) -> list[int]:
    seen = set()
    out = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def rule_nogood(rule: Rule) -> list[int]:
    """The nogood violated exactly when the body holds but the head does not.

    For a rule ``a :- b1..bj, not c1..cm`` this is
    ``{-a, b1..bj, -c1..-cm}``; a constraint simply drops the head literal.
    """
    lits = [] if rule.head is None else [-rule.head]
    lits += list(rule.pos)
    lits += [-c for c in rule.neg]
    return lits


@dataclass
class Translation:
    """Completion nogoods plus the auxiliary body atoms they introduced.

    Auxiliary atoms occupy ids ``num_real + 1 .. num_real + len(aux_names)``;
    they never appear in reported models.
    """

    nogoods: list[list[int]]
    num_real: int
    aux_names: list[str]

    @property
    def num_atoms(self) -> int:
        return self.num_real + len(self.aux_names)

    def name_of(self, aid: int) -> str:
        if aid <= self.num_real:
            raise IndexError("not an auxiliary atom")
        return self.aux_names[aid - self.num_real - 1]


def completion_nogoods(program: GroundProgram) -> Translation:
    """Clark's completion of the program as nogoods.

    Per rule with a body of two or more literals a fresh auxiliary atom is
    defined to be equivalent to the body conjunction; single-literal bodies
    are used directly. Every head atom gets a support nogood over its body
    atoms, atoms with no defining rule are fixed false, and facts are fixed
    true. Constraints contribute their plain body nogoods. For tight
    programs the total assignments consistent with the result are exactly
    the stable models.
    """
    num_real = program.num_atoms
    aux_names: list[str] = []
    nogoods: list[list[int]] = []

    by_head: dict[int, list[tuple[int, Rule]]] = {}
    for idx, rule in enumerate(program.rules):
        if rule.is_constraint:
            nogoods.append(rule_nogood(rule))
        else:
            by_head.setdefault(rule.head, []).append((idx, rule))

    def new_aux(rule_index: int) -> int:
        aux_names.append(f"__body_{rule_index}")
        return num_real + len(aux_names)

    for atom in range(1, num_real + 1):
        defs = by_head.get(atom)
        if not defs:
            nogoods.append([atom])  # no rule can support it
            continue
        if any(rule.is_fact for _, rule in defs):
            nogoods.append([-atom])  # a fact: always true, support is trivial
            continue
        body_lits: list[int] = []
        for idx, rule in defs:
            body = list(rule.pos) + [-c for c in rule.neg]
            if len(body) == 1:
                beta = body[0]
            else:
                aux = new_aux(idx)
                beta = aux
                # aux holds exactly when the whole body does
                nogoods.append([-aux] + body)
                for lit in body:
                    nogoods.append([aux, -lit])
            body_lits.append(beta)
            nogoods.append([-atom, beta])  # body true forces the head
        # head true demands some body true
        nogoods.append([atom] + [-b for b in body_lits])

    return Translation(nogoods, num_real, aux_names)
