"""Conflict-driven search for stable models.

The solver works on the completion nogoods of a ground program. Candidate
total assignments are produced by CDCL: two-watched-literal unit
propagation, first-UIP conflict analysis with backjumping, Luby restarts,
and activity-based deletion of learned nogoods. Because the completion is
only complete for tight programs, every total assignment is checked against
the reduct of the original program; rejected candidates are excluded by a
blocking constraint over their true atoms, which also drives enumeration of
further models.

Custom propagators and heuristics are dispatched through the contracts in
:mod:`aspen.extensions`; all contract checks are enforced here.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .errors import (
    EngineInvariantError,
    PluginContractViolation,
    ResourceLimit,
    UnknownAtom,
)
from .extensions import (
    Directive,
    HEURISTIC_METHODS,
    PROPAGATOR_METHODS,
    SelectContext,
)
from .heuristic import ActivityHeuristic
from .program import GroundProgram, completion_nogoods
from .semantics import is_stable_model

INPUT, LEARNED, EXTERNAL = 0, 1, 2

_WIRE_NAME = {**PROPAGATOR_METHODS, **HEURISTIC_METHODS}

# outcomes threaded through the main loop
_OK = "ok"
_CONTINUE = "continue"
_ACCEPT = "accept"
_INCOHERENT = "incoherent"

_NOGOOD_ACT_LIMIT = 1e20
_NOGOOD_ACT_SCALE = 1e-20
_NOGOOD_ACT_GROWTH = 1 / 0.999


class Nogood:
    __slots__ = ("lits", "kind", "activity", "deleted", "w1", "w2")

    def __init__(self, lits: list[int], kind: int):
        self.lits = lits
        self.kind = kind
        self.activity = 0.0
        self.deleted = False
        self.w1 = 0
        self.w2 = 0

    def __repr__(self) -> str:
        return f"<Nogood {self.lits}>"


class _Handle:
    """Engine-side bookkeeping for one registered extension."""

    __slots__ = (
        "ext",
        "name",
        "role",
        "caps",
        "attached",
        "eager",
        "post",
        "track_undef",
        "notified",
        "batch_ptr",
        "fallback_remaining",
        "fallback_forever",
    )

    def __init__(self, ext, role: str):
        self.ext = ext
        self.name = ext.name
        self.role = role
        self.caps = set(ext.capabilities())
        self.attached: frozenset[int] = frozenset()
        # eager extensions hear literals one by one inside the fixpoint,
        # post extensions get batches after it; eager wins if both declared
        self.eager = "onLiteralTrue" in self.caps
        self.post = not self.eager and "onLiteralsTrue" in self.caps
        self.track_undef = "onLiteralsUndefined" in self.caps
        self.notified: list[tuple[int, int]] = []
        self.batch_ptr = 0
        self.fallback_remaining = 0
        self.fallback_forever = False

    def implements(self, wire_name: str) -> bool:
        return wire_name in self.caps


@dataclass
class Statistics:
    decisions: int = 0
    conflicts: int = 0
    restarts: int = 0
    assignments: int = 0
    learned: int = 0
    deleted: int = 0
    models: int = 0
    dispatches: dict[str, int] = field(default_factory=dict)

    def snapshot(self) -> tuple:
        return (
            self.decisions,
            self.conflicts,
            self.restarts,
            self.assignments,
            self.learned,
            self.deleted,
            self.models,
            tuple(sorted(self.dispatches.items())),
        )


@dataclass
class SolverConfig:
    seed: int = 0
    restart_unit: int = 64
    deletion_base: int = 4000
    deletion_factor: int = 2
    conflict_budget: int | None = None
    time_budget: float | None = None
    validate: bool = True
    record_dispatch: bool = False
    audit: bool = False


@dataclass
class Result:
    coherent: bool
    models: list[list[int]]
    statistics: Statistics

    @property
    def verdict(self) -> str:
        return "COHERENT" if self.coherent else "INCOHERENT"


def model_atom_names(program: GroundProgram, model: list[int]) -> list[str]:
    return [program.atom_name(a) for a in model]


class Solver:
    """One-shot search over a ground program.

    ``propagators`` and ``heuristic`` take extension instances; the engine
    inspects their capabilities, subscribes them to their attached literals
    and drives them through the dispatch points. ``enumerate(n)`` returns up
    to ``n`` stable models (``n == 0`` asks for all of them).
    """

    def __init__(self, program: GroundProgram, propagators=(), heuristic=None, config: SolverConfig | None = None):
        self.program = program
        self.cfg = config or SolverConfig()
        trans = completion_nogoods(program)
        self.translation = trans
        self.num_real = trans.num_real
        self.num_atoms = trans.num_atoms

        n = self.num_atoms
        self.values = [0] * (n + 1)  # 0 undefined, 1 true, -1 false
        self.levels = [0] * (n + 1)
        self.posarr = [-1] * (n + 1)
        self.reasons: list = [None] * (n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.level = 0

        self._wpos: list[list[Nogood]] = [[] for _ in range(n + 1)]
        self._wneg: list[list[Nogood]] = [[] for _ in range(n + 1)]
        self.store: list[Nogood] = []

        self.stats = Statistics()
        self.rng = random.Random(self.cfg.seed)
        self._default_h = ActivityHeuristic(n, self.rng)
        self._seen = bytearray(n + 1)
        self._ng_inc = 1.0
        self._models: list[list[int]] = []
        self._log: list[tuple] | None = [] if self.cfg.record_dispatch else None
        self._abort = False
        self._deadline: float | None = None
        self._luby_u = 1
        self._luby_v = 1
        self._restart_counter = 0
        self._input_count = 0
        self._ran = False

        self._prop_handles: list[_Handle] = [_Handle(p, "propagator") for p in propagators]
        self._heur_handle: _Handle | None = _Handle(heuristic, "heuristic") if heuristic is not None else None
        self._all_handles: list[_Handle] = list(self._prop_handles)
        if self._heur_handle is not None:
            self._all_handles.append(self._heur_handle)

        for h in self._all_handles:
            h.ext.bind(program)
        for h in self._all_handles:
            if h.implements("attachLiterals"):
                res = self._dispatch(h, "attach_literals")
                h.attached = frozenset(self._check_literals(h, res, "attachLiterals"))
            else:
                h.attached = frozenset()

        self._post_handles = [h for h in self._all_handles if h.post]
        eager_handles = [h for h in self._all_handles if h.eager]
        self._have_eager = bool(eager_handles)
        if self._have_eager:
            self._esubs_pos: list[list[_Handle]] = [[] for _ in range(n + 1)]
            self._esubs_neg: list[list[_Handle]] = [[] for _ in range(n + 1)]
            for h in eager_handles:
                for lit in sorted(h.attached):
                    (self._esubs_pos if lit > 0 else self._esubs_neg)[abs(lit)].append(h)

        # input nogoods; a violation here means level-0 inconsistency
        self._init_conflict = False
        for lits in trans.nogoods:
            status, _ = self._install(list(lits), INPUT)
            if status in ("violated", "empty"):
                self._init_conflict = True
                break

    # ── Public entry points ───────────────────────────────────────

    def solve(self) -> Result:
        return self.enumerate(1)

    def enumerate(self, max_models: int = 0) -> Result:
        if self._ran:
            raise RuntimeError("a Solver instance runs a single search")
        self._ran = True
        if self.cfg.time_budget is not None:
            self._deadline = time.monotonic() + self.cfg.time_budget

        if self._init_conflict or not self._simplify_phase():
            return Result(False, [], self.stats)
        self._dispatch_minisat_trio()

        models = self._models
        while True:
            self._budget_check()
            conf = self._propagate()
            if conf is not None:
                if self._handle_conflict(conf) is _INCOHERENT:
                    break
                continue
            if self.cfg.audit:
                self.audit_watches()
            if len(self.trail) == self.num_atoms:
                status = self._run_checks()
                if status is _INCOHERENT:
                    break
                if status is _CONTINUE:
                    continue
                model = [a for a in range(1, self.num_real + 1) if self.values[a] == 1]
                models.append(model)
                self.stats.models += 1
                if max_models and len(models) >= max_models:
                    break
                if self._block_model(model) is _INCOHERENT:
                    break
                continue
            # consistent but partial: maybe restart, then branch
            if self._restart_counter >= self.cfg.restart_unit * self._luby_v:
                self._do_restart()
                self._advance_luby()
                self._reduce_learned()
            lit = self._next_choice()
            if lit is None:
                continue
            self._decide(lit)

        return Result(bool(models), models, self.stats)

    def abort(self) -> None:
        """Ask the running search to stop; it raises ResourceLimit soon after."""
        self._abort = True

    @property
    def dispatch_log(self) -> list[tuple] | None:
        return self._log

    # ── Assignment primitives ─────────────────────────────────────

    def _truth(self, lit: int):
        v = self.values[lit if lit > 0 else -lit]
        if v == 0:
            return None
        return (v == 1) == (lit > 0)

    def _assign(self, lit: int, reason) -> None:
        a = lit if lit > 0 else -lit
        self.values[a] = 1 if lit > 0 else -1
        self.levels[a] = self.level
        self.posarr[a] = len(self.trail)
        self.reasons[a] = reason
        self.trail.append(lit)
        self.stats.assignments += 1

    def _decide(self, lit: int) -> None:
        self.trail_lim.append(len(self.trail))
        self.level += 1
        self._assign(lit, None)
        self.stats.decisions += 1

    def _backjump(self, target: int) -> None:
        """Drop all levels above ``target`` and notify subscribers."""
        if target >= self.level:
            return
        cut = self.trail_lim[target]
        values = self.values
        reasons = self.reasons
        posarr = self.posarr
        for lit in self.trail[cut:]:
            a = lit if lit > 0 else -lit
            values[a] = 0
            reasons[a] = None
            posarr[a] = -1
        del self.trail[cut:]
        del self.trail_lim[target:]
        self.level = target
        if self.qhead > cut:
            self.qhead = cut

        for h in self._all_handles:
            if h.batch_ptr > cut:
                h.batch_ptr = cut
            if h.track_undef and h.notified and h.notified[-1][0] >= cut:
                gone = []
                notified = h.notified
                while notified and notified[-1][0] >= cut:
                    gone.append(notified.pop()[1])
                gone.reverse()
                self._dispatch(h, "on_literals_undefined", tuple(gone))

    # ── Nogood store ──────────────────────────────────────────────

    def _watchlist(self, lit: int) -> list[Nogood]:
        return self._wpos[lit] if lit > 0 else self._wneg[-lit]

    def _install(self, lits: list[int], kind: int) -> tuple[str, Nogood | None]:
        """Add a nogood under the current assignment.

        Literals already true at level 0 are stripped, nogoods containing a
        literal false at level 0 or an atom in both polarities can never
        fire and are dropped. Returns the resulting status: ``unit`` asserts
        the complement of the single non-true literal immediately,
        ``violated`` leaves the conflict to the caller, ``empty`` means the
        nogood reduced to nothing (level-0 inconsistency).
        """
        seen = set()
        out = []
        levels = self.levels
        for lit in lits:
            if lit in seen:
                continue
            if -lit in seen:
                return "satisfied", None
            seen.add(lit)
            t = self._truth(lit)
            if t is True and levels[abs(lit)] == 0:
                continue
            if t is False and levels[abs(lit)] == 0:
                return "satisfied", None
            out.append(lit)
        if not out:
            return "empty", None

        ng = Nogood(out, kind)
        self.store.append(ng)
        if len(out) == 1:
            lit = out[0]
            ng.w1 = lit
            self._watchlist(lit).append(ng)
            t = self._truth(lit)
            if t is True:
                return "violated", ng
            if t is None:
                self._assign(-lit, ng)
                return "unit", ng
            return "ok", ng

        # watch the two literals that would be unassigned last
        posarr = self.posarr
        INF = 1 << 60

        def rank(lit: int) -> int:
            a = lit if lit > 0 else -lit
            return INF if self.values[a] == 0 else posarr[a]

        best = second = None
        best_r = second_r = -1
        for lit in out:
            r = rank(lit)
            if r > best_r:
                second, second_r = best, best_r
                best, best_r = lit, r
            elif r > second_r:
                second, second_r = lit, r
        ng.w1 = best
        ng.w2 = second
        self._watchlist(best).append(ng)
        self._watchlist(second).append(ng)

        non_true = [lit for lit in out if self._truth(lit) is not True]
        if not non_true:
            return "violated", ng
        if len(non_true) == 1 and self._truth(non_true[0]) is None:
            self._assign(-non_true[0], ng)
            return "unit", ng
        return "ok", ng

    def _bump_nogood(self, ng: Nogood) -> None:
        if ng.kind != LEARNED:
            return
        ng.activity += self._ng_inc
        if ng.activity > _NOGOOD_ACT_LIMIT:
            for other in self.store:
                if other.kind == LEARNED:
                    other.activity *= _NOGOOD_ACT_SCALE
            self._ng_inc *= _NOGOOD_ACT_SCALE

    # ── Propagation ───────────────────────────────────────────────

    def _propagate(self) -> Nogood | None:
        """Run to the propagation fixpoint, or return a violated nogood.

        Unit propagation and eager extensions are exhausted first; then each
        post extension receives the batch of its attached literals assigned
        since its last notification, and the first batch that produces new
        inferences sends the loop back to the eager part.
        """
        while True:
            conf = self._eager()
            if conf is not None:
                return conf
            progressed = False
            for h in self._post_handles:
                trail = self.trail
                ptr = h.batch_ptr
                end = len(trail)
                if ptr >= end:
                    continue
                attached = h.attached
                batch = []
                track = h.track_undef
                while ptr < end:
                    lit = trail[ptr]
                    if lit in attached:
                        batch.append(lit)
                        if track:
                            h.notified.append((ptr, lit))
                    ptr += 1
                h.batch_ptr = end
                if not batch:
                    continue
                before = len(trail)
                res = self._dispatch(h, "on_literals_true", tuple(batch))
                conf = self._apply_inferences(h, res, "onLiteralsTrue")
                if conf is not None:
                    return conf
                if len(self.trail) > before:
                    progressed = True
                    break
            if not progressed:
                return None

    def _eager(self) -> Nogood | None:
        trail = self.trail
        while self.qhead < len(trail):
            lit = trail[self.qhead]
            self.qhead += 1
            conf = self._propagate_watches(lit)
            if conf is not None:
                return conf
            if self._have_eager:
                subs = (self._esubs_pos if lit > 0 else self._esubs_neg)[abs(lit)]
                for h in subs:
                    if h.track_undef:
                        h.notified.append((self.qhead - 1, lit))
                    res = self._dispatch(h, "on_literal_true", lit)
                    conf = self._apply_inferences(h, res, "onLiteralTrue")
                    if conf is not None:
                        return conf
        return None

    def _propagate_watches(self, lit: int) -> Nogood | None:
        wl = self._wpos[lit] if lit > 0 else self._wneg[-lit]
        values = self.values
        i = j = 0
        n = len(wl)
        while i < n:
            ng = wl[i]
            i += 1
            if ng.deleted:
                continue
            w1 = ng.w1
            w2 = ng.w2
            if w2 == 0:
                # stored unary nogood just became fully true
                wl[j] = ng
                j += 1
                while i < n:
                    wl[j] = wl[i]
                    j += 1
                    i += 1
                del wl[j:]
                return ng
            other = w1 if w2 == lit else w2
            oa = other if other > 0 else -other
            ov = values[oa]
            if ov != 0 and (ov == 1) != (other > 0):
                wl[j] = ng  # other watch false: nogood disarmed
                j += 1
                continue
            repl = 0
            for cand in ng.lits:
                if cand == w1 or cand == w2:
                    continue
                ca = cand if cand > 0 else -cand
                cv = values[ca]
                if cv == 0 or (cv == 1) != (cand > 0):
                    repl = cand
                    break
            if repl:
                if w1 == lit:
                    ng.w1 = repl
                else:
                    ng.w2 = repl
                (self._wpos[repl] if repl > 0 else self._wneg[-repl]).append(ng)
                continue
            wl[j] = ng
            j += 1
            if ov == 0:
                self._assign(-other, ng)  # unit: the other watch must not hold
            else:
                while i < n:
                    wl[j] = wl[i]
                    j += 1
                    i += 1
                del wl[j:]
                return ng
        del wl[j:]
        return None

    def _apply_inferences(self, h: _Handle, res, method: str) -> Nogood | None:
        lits = self._check_literals(h, res, method)
        if lits and not h.implements("getReasonForLiteral"):
            raise PluginContractViolation(
                f"{h.name}: returned inferences without implementing getReasonForLiteral"
            )
        for m in lits:
            a = m if m > 0 else -m
            v = self.values[a]
            if v == 0:
                self._assign(m, h)
            elif (v == 1) == (m > 0):
                continue
            else:
                # the extension contradicts the assignment: its reason is a
                # violated nogood
                return self._fetch_reason(h, m, inferred=False)
        return None

    def _fetch_reason(self, h: _Handle, lit: int, inferred: bool) -> Nogood:
        res = self._dispatch(h, "get_reason_for_literal", lit)
        lits = self._check_literals(h, res, "getReasonForLiteral")
        comp = -lit
        if comp not in lits:
            raise PluginContractViolation(
                f"{h.name}: reason for {lit} must contain its complement"
            )
        lit_pos = self.posarr[abs(lit)]
        for x in lits:
            if x == comp:
                continue
            if self._truth(x) is not True:
                raise PluginContractViolation(
                    f"{h.name}: reason literal {x} for {lit} is not true"
                )
            if inferred and self.posarr[abs(x)] >= lit_pos:
                raise PluginContractViolation(
                    f"{h.name}: reason literal {x} was assigned after the inference of {lit}"
                )
        status, ng = self._install(lits, EXTERNAL)
        if ng is None:
            # everything was fixed at level 0: level-0 inconsistency
            ng = Nogood([], EXTERNAL)
        else:
            self._fire_learning(ng.lits)
        if inferred:
            self.reasons[abs(lit)] = ng
        return ng

    def _fire_learning(self, lits) -> None:
        h = self._heur_handle
        if h is not None and h.implements("onLearningConstraint"):
            self._dispatch(h, "on_learning_constraint", tuple(lits))

    # ── Conflict analysis ─────────────────────────────────────────

    def _handle_conflict(self, conflict: Nogood) -> str:
        self.stats.conflicts += 1
        self._restart_counter += 1
        h = self._heur_handle
        if h is not None and h.implements("onConflict"):
            self._dispatch(h, "on_conflict")
        lits = conflict.lits
        if not lits:
            return _INCOHERENT
        levels = self.levels
        top = max(levels[l if l > 0 else -l] for l in lits)
        if top == 0:
            return _INCOHERENT
        if top < self.level:
            self._backjump(top)
        learned, blevel, uip = self._analyze(conflict, top)
        self._default_h.decay()
        self._fire_learning(learned)
        self._backjump(blevel)
        status, ng = self._install(learned, LEARNED)
        self.stats.learned += 1
        if ng is not None:
            self._bump_nogood(ng)
        if self.cfg.validate and status != "unit":
            raise EngineInvariantError(
                f"learned nogood not asserting after backjump (status {status})"
            )
        return _OK

    def _analyze(self, conflict: Nogood, top: int) -> tuple[list[int], int, int]:
        """First-UIP resolution over the trail.

        Returns the learned nogood (lower-level literals first, the UIP
        literal last), the backjump level, and the UIP literal.
        """
        trail = self.trail
        levels = self.levels
        reasons = self.reasons
        seen = self._seen
        touched = []
        learned_rest: list[int] = []
        path = 0
        h = self._heur_handle
        notify_lit = h is not None and h.implements("onLitInConflict")
        bump = self._default_h.bump

        pending = conflict.lits
        self._bump_nogood(conflict)
        idx = len(trail) - 1
        uip = 0
        while True:
            for x in pending:
                a = x if x > 0 else -x
                if seen[a]:
                    continue
                seen[a] = 1
                touched.append(a)
                bump(a)
                if notify_lit:
                    self._dispatch(h, "on_lit_in_conflict", x)
                lv = levels[a]
                if lv == top:
                    path += 1
                elif lv > top:
                    raise EngineInvariantError("reason literal above the conflict level")
                elif lv > 0:
                    learned_rest.append(x)
            while not seen[abs(trail[idx])]:
                idx -= 1
            lit = trail[idx]
            idx -= 1
            path -= 1
            if path == 0:
                uip = lit
                break
            r = reasons[abs(lit)]
            if r is None:
                raise EngineInvariantError("tried to resolve a decision before the first UIP")
            if isinstance(r, _Handle):
                r = self._fetch_reason(r, lit, inferred=True)
            self._bump_nogood(r)
            comp = -lit
            pending = [x for x in r.lits if x != comp]

        for a in touched:
            seen[a] = 0
        learned = learned_rest + [uip]
        blevel = 0
        if learned_rest:
            blevel = max(levels[l if l > 0 else -l] for l in learned_rest)
        if self.cfg.validate:
            at_top = sum(1 for l in learned if levels[abs(l)] == top)
            if at_top != 1 or levels[abs(uip)] != top:
                raise EngineInvariantError("learned nogood must contain exactly one literal of the conflict level")
        return learned, blevel, uip

    def _handle_violated_chain(self, ngs: list[Nogood]) -> str:
        """Resolve a batch of freshly added, currently violated nogoods.

        Each round picks the first still-violated one and runs the regular
        conflict path; the backjump un-violates it, and the conflict level
        strictly decreases, so this terminates.
        """
        while True:
            viol = None
            for ng in ngs:
                if ng.deleted or not ng.lits:
                    continue
                if all(self._truth(l) is True for l in ng.lits):
                    viol = ng
                    break
            if viol is None:
                return _CONTINUE
            if self._handle_conflict(viol) is _INCOHERENT:
                return _INCOHERENT

    # ── Restarts and deletion ─────────────────────────────────────

    def _do_restart(self) -> None:
        self._backjump(0)
        h = self._heur_handle
        if h is not None and h.implements("onRestart"):
            self._dispatch(h, "on_restart")
        self.stats.restarts += 1
        self._restart_counter = 0

    def _advance_luby(self) -> None:
        u, v = self._luby_u, self._luby_v
        if (u & -u) == v:
            self._luby_u, self._luby_v = u + 1, 1
        else:
            self._luby_v = 2 * v

    def _reduce_learned(self) -> None:
        """At restart boundaries, drop the less active half of the learned
        nogoods once they outnumber ``max(base, factor * input)``.

        Nogoods serving as the reason of an assigned literal and nogoods of
        size two or less are kept."""
        live = [ng for ng in self.store if ng.kind == LEARNED and not ng.deleted]
        limit = max(self.cfg.deletion_base, self.cfg.deletion_factor * self._input_count)
        if len(live) <= limit:
            return
        locked = {id(r) for r in self.reasons if isinstance(r, Nogood)}
        candidates = [ng for ng in live if len(ng.lits) > 2 and id(ng) not in locked]
        candidates.sort(key=lambda ng: ng.activity)
        for ng in candidates[: len(live) // 2]:
            ng.deleted = True
            self.stats.deleted += 1
        self.store = [ng for ng in self.store if not ng.deleted]
        for lists in (self._wpos, self._wneg):
            for wl in lists:
                wl[:] = [ng for ng in wl if not ng.deleted]

    # ── Model checking ────────────────────────────────────────────

    def _run_checks(self) -> str:
        true_real = [a for a in range(1, self.num_real + 1) if self.values[a] == 1]
        if not is_stable_model(self.program, set(true_real)):
            return self._block_candidate(true_real)
        for h in self._prop_handles:
            if not h.implements("checkStableModel"):
                continue
            verdict = self._dispatch(h, "check_stable_model", tuple(true_real))
            if verdict is True:
                continue
            if verdict is not False:
                raise PluginContractViolation(
                    f"{h.name}: checkStableModel must return a boolean"
                )
            return self._fail_check(h)
        return _ACCEPT

    def _block_candidate(self, true_real: list[int]) -> str:
        status, ng = self._install([a for a in true_real], EXTERNAL)
        if ng is None:
            return _INCOHERENT
        self._fire_learning(ng.lits)
        return self._handle_violated_chain([ng])

    def _fail_check(self, h: _Handle) -> str:
        if not h.implements("getReasonsForCheckFailure"):
            raise PluginContractViolation(
                f"{h.name}: rejected a model without implementing getReasonsForCheckFailure"
            )
        res = self._dispatch(h, "get_reasons_for_check_failure")
        if res is None:
            raise PluginContractViolation(f"{h.name}: no reasons for the failed check")
        constraints = list(res)
        if not constraints:
            raise PluginContractViolation(
                f"{h.name}: check failure must come with at least one constraint"
            )
        installed = []
        for c in constraints:
            lits = self._check_literals(h, c, "getReasonsForCheckFailure")
            for x in lits:
                if self._truth(x) is not True:
                    raise PluginContractViolation(
                        f"{h.name}: check-failure constraint literal {x} is not true"
                    )
            status, ng = self._install(lits, EXTERNAL)
            if ng is None:
                return _INCOHERENT
            self._fire_learning(ng.lits)
            installed.append(ng)
        return self._handle_violated_chain(installed)

    def _block_model(self, model: list[int]) -> str:
        status, ng = self._install([a for a in model], EXTERNAL)
        if ng is None:
            return _INCOHERENT
        self._fire_learning(ng.lits)
        return self._handle_violated_chain([ng])

    # ── Simplification and heuristic seeding ──────────────────────

    def _simplify_phase(self) -> bool:
        conf = self._propagate()
        if conf is not None:
            return False
        self._rewrite_store()
        for h in self._prop_handles:
            if not h.implements("simplify"):
                continue
            res = self._dispatch(h, "simplify")
            for m in self._check_literals(h, res, "simplify"):
                t = self._truth(m)
                if t is True:
                    continue
                if t is False:
                    return False
                self._assign(m, None)
            conf = self._propagate()
            if conf is not None:
                return False
        self._input_count = sum(1 for ng in self.store if ng.kind == INPUT)
        return True

    def _rewrite_store(self) -> None:
        """Level-0 cleanup: strip true literals, drop satisfied nogoods."""
        keep = []
        for ng in self.store:
            drop = False
            newlits = []
            for l in ng.lits:
                t = self._truth(l)
                if t is False:
                    drop = True
                    break
                if t is True:
                    continue
                newlits.append(l)
            if drop:
                continue
            if not newlits:
                raise EngineInvariantError("violated nogood survived level-0 propagation")
            if len(newlits) == 1:
                self._assign(-newlits[0], None)
                continue
            ng.lits = newlits
            keep.append(ng)
        self.store = keep
        for lists in (self._wpos, self._wneg):
            for wl in lists:
                wl.clear()
        for ng in keep:
            ng.w1, ng.w2 = ng.lits[0], ng.lits[1]
            self._watchlist(ng.w1).append(ng)
            self._watchlist(ng.w2).append(ng)

    def _dispatch_minisat_trio(self) -> None:
        h = self._heur_handle
        if h is None:
            return
        if h.implements("initMinisat"):
            for atom, value in self._check_pairs(h, self._dispatch(h, "init_minisat"), "initMinisat"):
                self._default_h.set_activity(atom, value)
        if h.implements("factorMinisat"):
            for atom, value in self._check_pairs(h, self._dispatch(h, "factor_minisat"), "factorMinisat"):
                self._default_h.set_factor(atom, value)
        if h.implements("signMinisat"):
            for atom, value in self._check_pairs(h, self._dispatch(h, "sign_minisat"), "signMinisat"):
                self._default_h.set_sign(atom, value)

    # ── Branching ─────────────────────────────────────────────────

    def _next_choice(self) -> int | None:
        h = self._heur_handle
        if h is not None and h.implements("selectLiteral") and not h.fallback_forever:
            if h.fallback_remaining > 0:
                h.fallback_remaining -= 1
            else:
                d = self._dispatch(h, "select_literal", SelectContext(self.stats))
                if not isinstance(d, Directive):
                    raise PluginContractViolation(
                        f"{h.name}: selectLiteral must return a Directive"
                    )
                if d.kind == "choice":
                    lit = self._check_one_literal(h, d.literal, "selectLiteral")
                    if self._truth(lit) is not None:
                        raise PluginContractViolation(
                            f"{h.name}: chosen literal {lit} is already assigned"
                        )
                    return lit
                if d.kind == "minisat":
                    count = d.count
                    if not isinstance(count, int) or isinstance(count, bool) or count < 0:
                        raise PluginContractViolation(
                            f"{h.name}: minisat directive needs a count >= 0"
                        )
                    if count == 0:
                        h.fallback_forever = True
                    else:
                        h.fallback_remaining = count - 1
                elif d.kind == "unroll":
                    lit = self._check_one_literal(h, d.literal, "selectLiteral")
                    if self._truth(lit) is None:
                        raise PluginContractViolation(
                            f"{h.name}: unroll target {lit} is not assigned"
                        )
                    lv = self.levels[abs(lit)]
                    if lv == 0:
                        raise PluginContractViolation(
                            f"{h.name}: cannot unroll literal {lit} fixed at level 0"
                        )
                    self._backjump(lv - 1)
                    return None
                elif d.kind == "restart":
                    self._do_restart()
                    return None
                else:
                    raise PluginContractViolation(
                        f"{h.name}: unknown directive kind '{d.kind}'"
                    )
        lit = self._default_h.choose(self.values)
        if lit is None:
            raise EngineInvariantError("choice requested on a total assignment")
        return lit

    # ── Extension plumbing ────────────────────────────────────────

    def _dispatch(self, h: _Handle, py_method: str, *args):
        wire = _WIRE_NAME[py_method]
        key = f"{h.name}.{wire}"
        d = self.stats.dispatches
        d[key] = d.get(key, 0) + 1
        if self._log is not None:
            if py_method == "select_literal":
                self._log.append((h.name, wire))
            else:
                self._log.append((h.name, wire, *args))
        return getattr(h.ext, py_method)(*args)

    def _check_literals(self, h: _Handle, res, method: str) -> list[int]:
        if res is None:
            return []
        out = []
        for m in res:
            out.append(self._check_one_literal(h, m, method))
        return out

    def _check_one_literal(self, h: _Handle, m, method: str) -> int:
        if not isinstance(m, int) or isinstance(m, bool) or m == 0:
            raise PluginContractViolation(f"{h.name}.{method}: {m!r} is not a literal")
        if abs(m) > self.num_real:
            raise UnknownAtom(f"{h.name}.{method}: unknown atom {abs(m)}")
        return m

    def _check_pairs(self, h: _Handle, res, method: str) -> list[tuple[int, object]]:
        if res is None:
            return []
        out = []
        for entry in res:
            try:
                atom, value = entry
            except (TypeError, ValueError):
                raise PluginContractViolation(f"{h.name}.{method}: {entry!r} is not an (atom, value) pair")
            if not isinstance(atom, int) or isinstance(atom, bool) or atom <= 0:
                raise PluginContractViolation(f"{h.name}.{method}: bad atom {atom!r}")
            if atom > self.num_real:
                raise UnknownAtom(f"{h.name}.{method}: unknown atom {atom}")
            out.append((atom, value))
        return out

    # ── Budgets and audits ────────────────────────────────────────

    def _budget_check(self) -> None:
        if self._abort:
            raise ResourceLimit("search aborted", list(self._models), self.stats)
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise ResourceLimit("time budget exhausted", list(self._models), self.stats)
        if self.cfg.conflict_budget is not None and self.stats.conflicts >= self.cfg.conflict_budget:
            raise ResourceLimit("conflict budget exhausted", list(self._models), self.stats)

    def audit_watches(self) -> None:
        """Invariant check at propagation fixpoints (``config.audit`` runs it
        after every conflict-free propagate): no nogood may sit with both
        watches true unless one of its literals is false. Terminal states are
        exempt — an incoherent search legitimately abandons a violated
        nogood."""
        for ng in self.store:
            if ng.deleted or ng.w2 == 0:
                continue
            if ng.w1 not in ng.lits or ng.w2 not in ng.lits:
                raise EngineInvariantError("watched literal not in nogood")
            if self._truth(ng.w1) is True and self._truth(ng.w2) is True:
                if not any(self._truth(l) is False for l in ng.lits):
                    raise EngineInvariantError("nogood with two true watches and no false literal")
