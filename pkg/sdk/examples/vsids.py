#!/usr/bin/env python3
"""Conflict-driven branching over the wire — the solver's built-in
``vsids`` heuristic as a stand-alone script.

Every program atom carries an integer score, bumped by one whenever it
appears in a learned constraint. Every 256 conflicts all scores are
halved (integer division) and the atom order is re-sorted by descending
score, ties to the smaller id; between halvings the order stays as it
was. Each choice takes the first atom not currently assigned, negated.
"""

import sys

from aspen_sdk import Directive, Plugin, serve


class Vsids(Plugin):
    """Score-ordered branching with periodic decay."""

    RESCORE_INTERVAL = 256

    def on_init(self) -> None:
        self._atoms = sorted(self.atoms)
        self._scores = dict.fromkeys(self._atoms, 0)
        self._true: set[int] = set()
        self._conflicts = 0

    def attach_literals(self):
        return self._atoms + [-a for a in self._atoms]

    def on_literals_true(self, literals):
        self._true.update(literals)
        return ()

    def on_literals_undefined(self, literals) -> None:
        self._true.difference_update(literals)

    def on_learning_constraint(self, constraint) -> None:
        for lit in constraint:
            atom = abs(lit)
            if atom in self._scores:  # solver-internal atoms carry no score
                self._scores[atom] += 1

    def on_conflict(self) -> None:
        self._conflicts += 1
        if self._conflicts == self.RESCORE_INTERVAL:
            self._conflicts = 0
            for atom in self._atoms:
                self._scores[atom] //= 2
            self._atoms.sort(key=lambda a: (-self._scores[a], a))

    def select_literal(self) -> Directive:
        true = self._true
        for atom in self._atoms:
            if atom not in true and -atom not in true:
                return Directive.choice(-atom)
        return Directive.minisat(1)  # defensive; the solver never asks then


if __name__ == "__main__":
    sys.exit(serve(Vsids()))
