"""Shared helpers for the test suite: solve wrappers and instance builders."""

from __future__ import annotations

from aspen import (
    MarriageEager,
    MarriageLazy,
    MarriagePost,
    Solver,
    SolverConfig,
    encode_stable_marriage,
    generate_sm_instance,
    model_atom_names,
    parse_program,
)


def solve_all(text, propagators=(), heuristic=None, **cfg):
    """Enumerate every model of a program text; returns (result, program, solver)."""
    program = parse_program(text)
    solver = Solver(
        program,
        propagators=propagators,
        heuristic=heuristic,
        config=SolverConfig(**cfg),
    )
    result = solver.enumerate(0)
    return result, program, solver


def model_sets(text, propagators=(), heuristic=None, **cfg):
    """The program's stable models as a set of frozensets of atom names."""
    result, program, _ = solve_all(text, propagators, heuristic, **cfg)
    return {frozenset(model_atom_names(program, m)) for m in result.models}


def model_lists(text, propagators=(), heuristic=None, **cfg):
    """The models in enumeration order, each a sorted name tuple."""
    result, program, _ = solve_all(text, propagators, heuristic, **cfg)
    return [tuple(sorted(model_atom_names(program, m))) for m in result.models]


def sm_four_ways(n: int, k: int, seed: int, solver_seed: int = 0):
    """Solve one marriage instance the four interchangeable ways.

    Returns (instance text, dict config-name -> set of frozensets of names).
    """
    instance = generate_sm_instance(n, k, seed)
    ground = encode_stable_marriage(instance, blocking_constraints=True)
    plain = encode_stable_marriage(instance)
    out = {}
    result = Solver(ground, config=SolverConfig(seed=solver_seed)).enumerate(0)
    out["ground"] = {
        frozenset(model_atom_names(ground, m)) for m in result.models
    }
    for label, cls in (
        ("lazy", MarriageLazy),
        ("eager", MarriageEager),
        ("post", MarriagePost),
    ):
        result = Solver(
            plain, propagators=[cls()], config=SolverConfig(seed=solver_seed)
        ).enumerate(0)
        out[label] = {
            frozenset(model_atom_names(plain, m)) for m in result.models
        }
    return instance, out


CHOICE_PAIR = "{a} :- not {b}.\n{b} :- not {a}.\n"


def choice_program(*atoms: str) -> str:
    """Free choice over each atom via a complementary partner atom."""
    return "".join(CHOICE_PAIR.format(a=a, b=a + "_off") for a in atoms)


def pigeonhole(pigeons: int, holes: int) -> str:
    """Assign each pigeon one hole, no sharing; incoherent iff pigeons > holes."""
    lines = []
    for p in range(1, pigeons + 1):
        for h in range(1, holes + 1):
            others = [f"not in{p}_{g}" for g in range(1, holes + 1) if g != h]
            body = ", ".join(others) if others else ""
            if body:
                lines.append(f"in{p}_{h} :- {body}.")
            else:
                lines.append(f"in{p}_{h}.")
    for h in range(1, holes + 1):
        for p in range(1, pigeons + 1):
            for q in range(p + 1, pigeons + 1):
                lines.append(f":- in{p}_{h}, in{q}_{h}.")
    return "\n".join(lines) + "\n"

def match_projection(model_names) -> frozenset[str]:
    """Just the match atoms of a model, for comparing matchings."""
    return frozenset(n for n in model_names if n.startswith("match("))


def stable_matchings_by_permutation(instance: str) -> set[frozenset[str]]:
    """Brute-force stable matchings straight off the instance facts.

    Reads the facts with string surgery and tries every way of pairing the
    men with the women, so it shares no code with the solver or the
    encodings it is used to judge. A pairing is rejected when some man and
    woman both prefer each other over their assigned partners (strictly for
    him, at least as much for her).
    """
    import itertools

    men, women, score = [], [], {}
    for line in instance.splitlines():
        line = line.strip().rstrip(".")
        if line.startswith("man("):
            men.append(line[4:-1])
        elif line.startswith("woman("):
            women.append(line[6:-1])
        elif line.startswith("pref("):
            p, q, s = line[5:-1].split(",")
            score[(p, q)] = int(s)
    out = set()
    for perm in itertools.permutations(women):
        pairing = dict(zip(men, perm))
        partner_of = {w: m for m, w in pairing.items()}
        blocked = False
        for m, w1 in pairing.items():
            for w, m1 in partner_of.items():
                if w == w1:
                    continue
                if score[(m, w)] > score[(m, w1)] and score[(w, m)] >= score[(w, m1)]:
                    blocked = True
                    break
            if blocked:
                break
        if not blocked:
            out.add(frozenset(f"match({m},{w})" for m, w in pairing.items()))
    return out

def random_casp_program(rng) -> str:
    """A small random program mixing free boolean atoms with integer
    constraints: variable declarations, guard atoms, and required() atoms
    hung off the guards in different ways."""
    nvars = rng.randint(1, 3)
    variables = [f"v{i}" for i in range(1, nvars + 1)]
    lines = ["cspdomain(fd)."]
    for v in variables:
        lo = rng.randint(0, 2)
        hi = lo + rng.randint(0, 3)
        lines.append(f"cspvar({v},{lo},{hi}).")
        if rng.random() < 0.2:  # repeated declarations intersect
            lo2 = rng.randint(0, 2)
            hi2 = lo2 + rng.randint(0, 3)
            lines.append(f"cspvar({v},{lo2},{hi2}).")
    guards = [f"g{i}" for i in range(1, rng.randint(2, 4) + 1)]
    for g in guards:
        lines.append(f"{g} :- not {g}_off.")
        lines.append(f"{g}_off :- not {g}.")
    templates = []
    for _ in range(rng.randint(2, 5)):
        v = rng.choice(variables)
        w = rng.choice(variables)
        rel = rng.choice(["<", "<=", ">", ">=", "=", "!="])
        bound = rng.randint(0, 6)
        if v == w or rng.random() < 0.5:
            coef = rng.choice(["", "2*", "3*"])
            term = f"{coef}{v}{rel}{bound}"
        else:
            sign = rng.choice(["+", "-"])
            term = f"{v}{sign}{w}{rel}{bound}"
        templates.append(f"required({term})")
    for atom in templates:
        guard = rng.choice(guards)
        if rng.random() < 0.4:
            lines.append(f"{atom}.")
        else:
            lines.append(f"{atom} :- {guard}.")
    return "\n".join(lines) + "\n"


def casp_models_by_hand(text: str) -> set[frozenset[str]]:
    """Independent constraint-model enumeration for random_casp_program texts.

    Stable models of the boolean part come from the brute-force oracle; the
    constraint part of each is then judged by Python itself: the required()
    terms are rewritten to Python comparisons and evaluated over every
    combination of the declared domains.
    """
    import itertools
    import re as _re

    import oracle

    out = set()
    for model in oracle.stable_models(text):
        names = set(model)
        bounds: dict[str, tuple[int, int]] = {}
        exprs = []
        for name in names:
            m = _re.fullmatch(r"cspvar\((\w+),(-?\d+),(-?\d+)\)", name)
            if m:
                v, lo, hi = m.group(1), int(m.group(2)), int(m.group(3))
                if v in bounds:
                    lo = max(lo, bounds[v][0])
                    hi = min(hi, bounds[v][1])
                bounds[v] = (lo, hi)
                continue
            m = _re.fullmatch(r"required\((.*)\)", name)
            if m:
                exprs.append(_re.sub(r"(?<![<>!=])=(?!=)", "==", m.group(1)))
        domains = [range(lo, hi + 1) for lo, hi in bounds.values()]
        for combo in itertools.product(*domains):
            binding = dict(zip(bounds, combo))
            if all(eval(e, {"__builtins__": {}}, dict(binding)) for e in exprs):
                out.add(frozenset(names))
                break
    return out
