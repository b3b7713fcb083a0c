"""Default branching heuristic: per-atom activity with decay, minisat style.

Every atom carries an activity (initially 0) that is bumped whenever the
atom takes part in conflict analysis; the bump amount grows by a constant
factor per learned constraint, and all activities are rescaled when any of
them overflows the cap. Selection picks the undefined atom with the largest
``activity * factor`` key, breaking ties with a seeded RNG, and branches on
the atom's preferred sign (negative unless configured otherwise).
"""

from __future__ import annotations

import random

from .errors import PluginContractViolation

RESCALE_LIMIT = 1e100
RESCALE_FACTOR = 1e-100
DECAY_GROWTH = 1 / 0.95


class ActivityHeuristic:
    def __init__(self, num_atoms: int, rng: random.Random):
        self.num_atoms = num_atoms
        self.activity = [0.0] * (num_atoms + 1)
        self.factor = [1.0] * (num_atoms + 1)
        # True selects the negative literal, the default preference
        self.sign_negative = [True] * (num_atoms + 1)
        self.inc = 1.0
        self.rng = rng

    # ── Conflict-driven updates ───────────────────────────────────

    def bump(self, atom: int) -> None:
        act = self.activity
        act[atom] += self.inc
        if act[atom] > RESCALE_LIMIT:
            self._rescale()

    def decay(self) -> None:
        """Grow the bump amount; called once per learned constraint."""
        self.inc *= DECAY_GROWTH
        if self.inc > RESCALE_LIMIT:
            self._rescale()

    def bump_and_decay(self, nogood_lits) -> None:
        for lit in nogood_lits:
            self.bump(abs(lit))
        self.decay()

    def _rescale(self) -> None:
        for a in range(1, self.num_atoms + 1):
            self.activity[a] *= RESCALE_FACTOR
        self.inc *= RESCALE_FACTOR

    # ── Configuration hooks (minisat trio) ────────────────────────

    def set_activity(self, atom: int, value: int) -> None:
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise PluginContractViolation(f"initMinisat value for atom {atom} must be an integer >= 0")
        self.activity[atom] = float(value)

    def set_factor(self, atom: int, value: int) -> None:
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise PluginContractViolation(f"factorMinisat value for atom {atom} must be an integer >= 0")
        self.factor[atom] = float(value)

    def set_sign(self, atom: int, sign: str) -> None:
        if sign not in ("pos", "neg"):
            raise PluginContractViolation(f"signMinisat value for atom {atom} must be 'pos' or 'neg'")
        self.sign_negative[atom] = sign == "neg"

    # ── Selection ─────────────────────────────────────────────────

    def choose(self, values) -> int | None:
        """Best undefined literal, or None when everything is assigned."""
        act = self.activity
        fac = self.factor
        best_key = -1.0
        ties: list[int] = []
        for a in range(1, self.num_atoms + 1):
            if values[a] != 0:
                continue
            key = act[a] * fac[a]
            if key > best_key:
                best_key = key
                ties = [a]
            elif key == best_key:
                ties.append(a)
        if not ties:
            return None
        atom = ties[0] if len(ties) == 1 else self.rng.choice(ties)
        return -atom if self.sign_negative[atom] else atom
