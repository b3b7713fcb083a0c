"""Constraint answer sets by exhaustive search over finite integer domains.

Programs carry their constraint part inside ordinary atoms:

* ``cspvar(x,lo,hi)`` declares integer variable ``x`` with ``lo ≤ x ≤ hi``;
  repeated declarations intersect.
* ``required(EXPR REL CONST)`` imposes a comparison, where ``EXPR`` is a sum
  of ``±[coef*]var`` terms and ``REL`` one of ``< <= > >= = !=``.
* ``cspdomain(...)`` tags the dialect and is otherwise inert.

:class:`CaspCheck` accepts a candidate model exactly when the constraints
whose atoms are true in it have a common solution, found by trying every
combination of the declared domains (capped, this is a reference checker,
not a CP solver). A rejected candidate is blocked through one constraint
over all its true ``cspvar``/``cspdomain``/``required`` atoms, so the search
moves on to candidates that differ in the constraint part.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass

from ..errors import DomainProductTooLarge, MalformedConstraint
from ..extensions import Propagator

_REL_RE = re.compile(r"(<=|>=|!=|=|<|>)")
_TERM_RE = re.compile(r"([+-]?)(?:(\d+)\*)?([a-z][A-Za-z0-9_]*)\Z")
_CSPVAR_RE = re.compile(r"cspvar\((.*)\)\Z")
_REQUIRED_RE = re.compile(r"required\((.*)\)\Z")
_CSPDOMAIN_RE = re.compile(r"cspdomain\((.*)\)\Z")

_RELATIONS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


@dataclass(frozen=True)
class LinearConstraint:
    """One comparison ``sum(coef*var) REL bound`` over integer variables."""

    terms: tuple[tuple[int, str], ...]
    relation: str
    bound: int

    def evaluate(self, binding: dict[str, int]) -> bool:
        total = 0
        for coef, var in self.terms:
            value = binding.get(var)
            if value is None:
                raise MalformedConstraint(f"undeclared variable '{var}' in {self}")
            total += coef * value
        return _RELATIONS[self.relation](total, self.bound)

    def __str__(self) -> str:
        parts = []
        for coef, var in self.terms:
            sign = "-" if coef < 0 else ("+" if parts else "")
            mag = abs(coef)
            parts.append(f"{sign}{'' if mag == 1 else f'{mag}*'}{var}")
        return f"{''.join(parts)}{self.relation}{self.bound}"


def parse_required_term(text: str) -> LinearConstraint:
    """Parse the argument of a ``required(...)`` atom."""
    flat = text.replace(" ", "")
    rel = _REL_RE.search(flat)
    if rel is None:
        raise MalformedConstraint(f"no relation in required term {text!r}")
    lhs, rhs = flat[: rel.start()], flat[rel.end() :]
    try:
        bound = int(rhs)
    except ValueError:
        raise MalformedConstraint(f"right side of {text!r} is not an integer") from None
    terms = []
    for chunk in re.findall(r"[+-]?[^+-]+", lhs):
        m = _TERM_RE.fullmatch(chunk)
        if m is None:
            raise MalformedConstraint(f"bad term {chunk!r} in required term {text!r}")
        sign, coef, var = m.groups()
        terms.append(((-1 if sign == "-" else 1) * int(coef or 1), var))
    if not terms:
        raise MalformedConstraint(f"no variables on the left side of {text!r}")
    return LinearConstraint(tuple(terms), rel.group(1), bound)


@dataclass
class CspSpec:
    """A concrete constraint problem: variable bounds plus comparisons."""

    variables: dict[str, tuple[int, int]]
    constraints: list[LinearConstraint]

    @property
    def domain_size(self) -> int:
        return math.prod(
            max(0, hi - lo + 1) for lo, hi in self.variables.values()
        )

    def first_solution(self, cap: int) -> dict[str, int] | None:
        """The first satisfying assignment in lexicographic domain order."""
        if self.domain_size > cap:
            raise DomainProductTooLarge(
                f"{self.domain_size} combinations exceed the cap of {cap}"
            )
        names = sorted(self.variables)
        domains = [range(self.variables[v][0], self.variables[v][1] + 1) for v in names]
        for combo in itertools.product(*domains):
            binding = dict(zip(names, combo))
            if all(c.evaluate(binding) for c in self.constraints):
                return binding
        return None


class CaspCheck(Propagator):
    """Reject candidate models whose constraint part has no solution.

    ``on_solution``, when given, is called with the satisfying binding of
    every accepted candidate (the way answers are surfaced alongside the
    model). The latest binding is also kept in ``last_solution``.
    """

    _name = "casp"
    SEARCH_CAP = 10**6

    def __init__(self, on_solution=None, search_cap: int = SEARCH_CAP):
        self.on_solution = on_solution
        self.search_cap = search_cap
        self.last_solution: dict[str, int] | None = None

    def bind(self, program) -> None:
        self._program = program
        self._rejected: list[int] = []

    def attach_literals(self):
        """Index the constraint-part atoms; no subscriptions are needed."""
        self._bounds: dict[int, tuple[str, int, int]] = {}
        self._required: dict[int, LinearConstraint] = {}
        self._special: set[int] = set()
        for aid in range(1, self._program.num_atoms + 1):
            name = self._program.atom_name(aid)
            m = _CSPVAR_RE.fullmatch(name)
            if m:
                args = m.group(1).split(",")
                try:
                    var, lo, hi = args[0], int(args[1]), int(args[2])
                except (IndexError, ValueError):
                    raise MalformedConstraint(f"bad variable declaration {name}") from None
                if len(args) != 3 or not re.fullmatch(r"[a-z][A-Za-z0-9_]*", var):
                    raise MalformedConstraint(f"bad variable declaration {name}")
                self._bounds[aid] = (var, lo, hi)
                self._special.add(aid)
                continue
            m = _REQUIRED_RE.fullmatch(name)
            if m:
                self._required[aid] = parse_required_term(m.group(1))
                self._special.add(aid)
                continue
            if _CSPDOMAIN_RE.fullmatch(name):
                self._special.add(aid)
        return ()

    def check_stable_model(self, true_atoms) -> bool:
        active = [a for a in true_atoms if a in self._special]
        variables: dict[str, tuple[int, int]] = {}
        constraints = []
        for aid in active:
            if aid in self._bounds:
                var, lo, hi = self._bounds[aid]
                if var in variables:  # repeated declarations intersect
                    lo = max(lo, variables[var][0])
                    hi = min(hi, variables[var][1])
                variables[var] = (lo, hi)
            elif aid in self._required:
                constraints.append(self._required[aid])
        spec = CspSpec(variables, constraints)
        solution = spec.first_solution(self.search_cap)
        if solution is None:
            self._rejected = list(active)
            return False
        self.last_solution = solution
        if self.on_solution is not None:
            self.on_solution(solution)
        return True

    def get_reasons_for_check_failure(self):
        return [list(self._rejected)]
