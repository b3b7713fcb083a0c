"""Conflict-driven branching: variable state independent decaying sum.

Each program atom carries an integer score, initially 0. Whenever the engine
learns a constraint, every program atom in it gains a point (*bumping*).
Every 256 conflicts all scores are halved (integer division) and the atom
list is re-sorted by descending score (*rescoring*), ties broken by atom id;
between rescorings the list order stays as it was. A choice picks the first
undefined atom in list order and sets it false.
"""

from __future__ import annotations

from ..extensions import Directive, Heuristic


class Vsids(Heuristic):
    """Score-ordered branching with periodic decay."""

    _name = "vsids"
    RESCORE_INTERVAL = 256

    def bind(self, program) -> None:
        self._atoms = list(range(1, program.num_atoms + 1))
        self._scores = dict.fromkeys(self._atoms, 0)
        self._true: set[int] = set()
        self._conflicts = 0

    def attach_literals(self):
        return [a for a in self._atoms] + [-a for a in self._atoms]

    def on_literals_true(self, lits):
        self._true.update(lits)
        return ()

    def on_literals_undefined(self, lits) -> None:
        self._true.difference_update(lits)

    def on_learning_constraint(self, constraint) -> None:
        for lit in constraint:
            atom = abs(lit)
            if atom in self._scores:  # internal solver atoms carry no score
                self._scores[atom] += 1

    def on_conflict(self) -> None:
        self._conflicts += 1
        if self._conflicts == self.RESCORE_INTERVAL:
            self._conflicts = 0
            for atom in self._atoms:
                self._scores[atom] //= 2
            self._atoms.sort(key=lambda a: (-self._scores[a], a))

    def select_literal(self, ctx) -> Directive:
        true = self._true
        for atom in self._atoms:
            if atom not in true and -atom not in true:
                return Directive.choice(-atom)
        return Directive.use_default(1)  # defensive; the engine never asks then
