"""Extension interface: custom propagators and branching heuristics.

An extension subscribes to a set of literals with ``attach_literals`` and is
then driven by the engine through the methods below. Implementations
override only what they need; the engine inspects which methods are overridden
and never calls the rest, so an in-process extension and a scripted plugin
declaring the same capability set receive identical dispatch sequences.

Contracts the engine enforces at dispatch time:

* ``attach_literals`` may only name atoms of the program.
* ``on_literal_true`` / ``on_literals_true`` are only invoked for attached
  literals that just became true, and their returned literals are asserted
  with this extension as pending reason.
* ``get_reason_for_literal(lit)`` must return a constraint (nogood) that
  contains the complement of ``lit`` while every other literal in it is
  true and was assigned before the inference.
* ``check_stable_model`` is only invoked on total consistent assignments;
  after returning ``False`` the extension must produce at least one
  constraint from ``get_reasons_for_check_failure``, each fully true under
  the current assignment.

Violations raise :class:`aspen.errors.PluginContractViolation`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Sequence

# Python-side handler names and their wire protocol counterparts.
PROPAGATOR_METHODS = {
    "attach_literals": "attachLiterals",
    "simplify": "simplify",
    "on_literal_true": "onLiteralTrue",
    "on_literals_true": "onLiteralsTrue",
    "on_literals_undefined": "onLiteralsUndefined",
    "get_reason_for_literal": "getReasonForLiteral",
    "check_stable_model": "checkStableModel",
    "get_reasons_for_check_failure": "getReasonsForCheckFailure",
}

HEURISTIC_METHODS = {
    "attach_literals": "attachLiterals",
    "on_literal_true": "onLiteralTrue",
    "on_literals_true": "onLiteralsTrue",
    "on_literals_undefined": "onLiteralsUndefined",
    "on_conflict": "onConflict",
    "on_lit_in_conflict": "onLitInConflict",
    "on_learning_constraint": "onLearningConstraint",
    "on_restart": "onRestart",
    "init_minisat": "initMinisat",
    "factor_minisat": "factorMinisat",
    "sign_minisat": "signMinisat",
    "select_literal": "selectLiteral",
}


@dataclass(frozen=True)
class Directive:
    """What a heuristic's ``select_literal`` asks the engine to do.

    ``choice``  pick this undefined literal as the next decision.
    ``minisat`` let the default heuristic decide for the next ``count``
                choices (this one included); ``count == 0`` disables the
                custom heuristic permanently.
    ``unroll``  retract assignments until the literal is undefined again.
    ``restart`` unroll to decision level zero.
    """

    kind: str
    literal: int | None = None
    count: int | None = None

    @classmethod
    def choice(cls, literal: int) -> "Directive":
        return cls("choice", literal=literal)

    @classmethod
    def use_default(cls, count: int) -> "Directive":
        return cls("minisat", count=count)

    @classmethod
    def unroll(cls, literal: int) -> "Directive":
        return cls("unroll", literal=literal)

    @classmethod
    def restart(cls) -> "Directive":
        return cls("restart")


class SelectContext:
    """Read access handed to ``select_literal``."""

    def __init__(self, statistics):
        self.statistics = statistics

    def clock(self) -> float:
        """Monotonic seconds, for time-based strategies."""
        return time.monotonic()


class _Extension:
    role = "extension"
    _method_table: dict[str, str] = {}

    @property
    def name(self) -> str:
        return getattr(self, "_name", type(self).__name__.lower())

    @name.setter
    def name(self, value: str) -> None:
        self._name = value

    def bind(self, program) -> None:
        """Called once at registration with the ground program."""

    def capabilities(self) -> list[str]:
        """Wire names of the methods this class actually overrides."""
        caps = []
        for py_name, wire_name in self._method_table.items():
            mine = getattr(type(self), py_name, None)
            base = getattr(_BASES[self.role], py_name, None)
            if mine is not None and mine is not base:
                caps.append(wire_name)
        return caps

    def implements(self, py_name: str) -> bool:
        wire = self._method_table.get(py_name)
        return wire is not None and wire in self.capabilities()


class Propagator(_Extension):
    """Base class for custom propagation.

    The overridden notification method selects the style: extensions
    overriding ``on_literal_true`` are *eager* and hear literals one by one
    inside the propagation fixpoint; extensions overriding only
    ``on_literals_true`` are *post* and get batches once unit propagation
    and eager extensions are exhausted.
    """

    role = "propagator"
    _method_table = PROPAGATOR_METHODS

    def attach_literals(self) -> Iterable[int]:
        return ()

    def simplify(self) -> Iterable[int]:
        return ()

    def on_literal_true(self, lit: int) -> Iterable[int]:
        return ()

    def on_literals_true(self, lits: Sequence[int]) -> Iterable[int]:
        return ()

    def on_literals_undefined(self, lits: Sequence[int]) -> None:
        pass

    def get_reason_for_literal(self, lit: int) -> Iterable[int]:
        raise NotImplementedError(f"{self.name} inferred a literal but has no reasons")

    def check_stable_model(self, true_atoms: Sequence[int]) -> bool:
        return True

    def get_reasons_for_check_failure(self) -> Iterable[Iterable[int]]:
        raise NotImplementedError(f"{self.name} rejected a model but has no reasons")


class Heuristic(_Extension):
    """Base class for custom branching.

    A heuristic may also attach literals and receive the truth
    notifications, which is how score-keeping strategies mirror the
    assignment. The minisat trio (``init_minisat`` / ``factor_minisat`` /
    ``sign_minisat``) seeds the default heuristic's activities, amplifying
    factors and preferred signs once, after simplification.
    """

    role = "heuristic"
    _method_table = HEURISTIC_METHODS

    def attach_literals(self) -> Iterable[int]:
        return ()

    def on_literal_true(self, lit: int) -> Iterable[int]:
        return ()

    def on_literals_true(self, lits: Sequence[int]) -> Iterable[int]:
        return ()

    def on_literals_undefined(self, lits: Sequence[int]) -> None:
        pass

    def on_conflict(self) -> None:
        pass

    def on_lit_in_conflict(self, lit: int) -> None:
        pass

    def on_learning_constraint(self, constraint: Sequence[int]) -> None:
        pass

    def on_restart(self) -> None:
        pass

    def init_minisat(self) -> Iterable[tuple[int, int]]:
        return ()

    def factor_minisat(self) -> Iterable[tuple[int, int]]:
        return ()

    def sign_minisat(self) -> Iterable[tuple[int, str]]:
        return ()

    def select_literal(self, ctx: SelectContext) -> Directive:
        raise NotImplementedError


_BASES = {"propagator": Propagator, "heuristic": Heuristic}
