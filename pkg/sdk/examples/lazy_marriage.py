#!/usr/bin/env python3
"""Reject unstable matchings, lazily — the solver's built-in ``sm-lazy``
propagator as a stand-alone script.

The preference table is reconstructed from the atom names handed over at
init (``man(_)``, ``woman(_)``, ``pref(p,q,s)`` with higher scores meaning
stronger preference); nothing else is shared with the solver. Each total
candidate model is scanned for blocking pairs — a man and a woman who
would both rather be together than with their assigned partners, strictly
so for him, weakly so for her — and every blocking pair yields one
two-literal constraint over the offending ``match`` atoms.
"""

import re
import sys

from aspen_sdk import Plugin, serve

_MAN = re.compile(r"man\(([a-z][A-Za-z0-9_]*)\)\Z")
_WOMAN = re.compile(r"woman\(([a-z][A-Za-z0-9_]*)\)\Z")
_PREF = re.compile(r"pref\(([a-z][A-Za-z0-9_]*),([a-z][A-Za-z0-9_]*),(\d+)\)\Z")
_MATCH = re.compile(r"match\(([a-z][A-Za-z0-9_]*),([a-z][A-Za-z0-9_]*)\)\Z")


class LazyMarriage(Plugin):
    """Total-candidate stability check over ``match`` atoms."""

    def on_init(self) -> None:
        men: set[str] = set()
        women: set[str] = set()
        score: dict[tuple[str, str], int] = {}
        for name in self.atoms.values():
            if m := _MAN.fullmatch(name):
                men.add(m.group(1))
            elif m := _WOMAN.fullmatch(name):
                women.add(m.group(1))
            elif m := _PREF.fullmatch(name):
                score[(m.group(1), m.group(2))] = int(m.group(3))
        for man in men:
            for woman in women:
                for p, q in ((man, woman), (woman, man)):
                    if (p, q) not in score:
                        raise ValueError(f"no pref({p},{q},_) fact in the instance")
        self._score = score
        self._matches: list[tuple[int, str, str]] = []
        for aid, name in self.atoms.items():
            m = _MATCH.fullmatch(name)
            if not m:
                continue
            who, whom = m.group(1), m.group(2)
            if who not in men or whom not in women:
                raise ValueError(f"match atom {name} names an unknown person")
            self._matches.append((aid, who, whom))
        self._failures: list[list[int]] = []

    def check_stable_model(self, atoms) -> bool:
        true_set = set(atoms)
        matched = [entry for entry in self._matches if entry[0] in true_set]
        score = self._score
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
        return self._failures


if __name__ == "__main__":
    sys.exit(serve(LazyMarriage()))
