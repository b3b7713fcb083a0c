"""The plugin side of the solver's scripted-extension protocol.

A plugin is an executable the solver starts as ``<interpreter> <script>``
and talks to over its standard streams, one JSON object per UTF-8,
LF-terminated line. Each request is ``{"id": int, "method": str,
"params": obj}`` and is answered, strictly in order, by ``{"id": ...,
"result": ...}`` or ``{"id": ..., "error": {"code": int, "message":
str}}`` carrying the same id. The ``init`` request opens every session
with the protocol version, the plugin's role, and the full atom table;
the reply names the wire methods the plugin implements, and only those
are ever called afterwards. Literals on the wire are signed atom ids —
negative means "must be false" — and a constraint is an array of them.

Subclass :class:`Plugin`, override the handlers you need, and hand an
instance to :func:`serve`::

    import sys
    from aspen_sdk import Plugin, serve

    class AcceptAll(Plugin):
        def check_stable_model(self, atoms):
            return True

    if __name__ == "__main__":
        sys.exit(serve(AcceptAll()))

Capabilities are inferred, never declared: a handler counts as
implemented exactly when the subclass overrides it, so the capability
list cannot drift from the code. While :func:`serve` runs, ``sys.stdout``
is redirected to standard error, so stray ``print`` calls end up as
diagnostics instead of corrupting the protocol — responses are the only
bytes the solver ever sees. Response lines are written canonically
(compact separators, sorted keys), which keeps recorded sessions
byte-for-byte reproducible.

Error codes mirror the JSON-RPC flavor the solver speaks: -32700 for an
undecodable request, -32601 for a method outside the capability list,
-32000 for a handler that raised, and -32001 for a protocol version this
SDK does not implement. Decode failures and handler failures are
answered and survived; a version mismatch or a failed startup ends the
process with exit code 1, and ``shutdown`` ends it with exit code 0.
"""

from __future__ import annotations

import json
import sys
import traceback
from dataclasses import dataclass

PROTOCOL_VERSION = 1

E_PARSE = -32700
E_METHOD_NOT_FOUND = -32601
E_HANDLER = -32000
E_VERSION = -32001

#: wire method name → :class:`Plugin` handler name
METHODS = {
    "attachLiterals": "attach_literals",
    "simplify": "simplify",
    "onLiteralTrue": "on_literal_true",
    "onLiteralsTrue": "on_literals_true",
    "onLiteralsUndefined": "on_literals_undefined",
    "getReasonForLiteral": "get_reason_for_literal",
    "checkStableModel": "check_stable_model",
    "getReasonsForCheckFailure": "get_reasons_for_check_failure",
    "onConflict": "on_conflict",
    "onLitInConflict": "on_lit_in_conflict",
    "onLearningConstraint": "on_learning_constraint",
    "onRestart": "on_restart",
    "initMinisat": "init_minisat",
    "factorMinisat": "factor_minisat",
    "signMinisat": "sign_minisat",
    "selectLiteral": "select_literal",
}

_TAKES_LITERAL = {"onLiteralTrue", "getReasonForLiteral", "onLitInConflict"}
_TAKES_LITERALS = {"onLiteralsTrue", "onLiteralsUndefined"}
_RETURNS_LITERALS = {"attachLiterals", "simplify", "onLiteralTrue", "onLiteralsTrue"}
_RETURNS_NULL = {
    "onLiteralsUndefined",
    "onConflict",
    "onLitInConflict",
    "onLearningConstraint",
    "onRestart",
}
_RETURNS_ENTRIES = {"initMinisat", "factorMinisat", "signMinisat"}


@dataclass(frozen=True)
class Directive:
    """What ``select_literal`` tells the solver to do next."""

    kind: str
    literal: int = 0
    n: int = 0

    @classmethod
    def choice(cls, literal: int) -> "Directive":
        """Branch on ``literal``."""
        return cls("choice", literal=literal)

    @classmethod
    def minisat(cls, n: int) -> "Directive":
        """Leave the next ``n`` choices to the built-in strategy (0 = all of them)."""
        return cls("minisat", n=n)

    @classmethod
    def unroll(cls, literal: int) -> "Directive":
        """Backtrack until ``literal`` is undefined again."""
        return cls("unroll", literal=literal)

    @classmethod
    def restart(cls) -> "Directive":
        """Throw the current search away and start over."""
        return cls("restart")

    def to_wire(self) -> dict:
        if self.kind in ("choice", "unroll"):
            return {"kind": self.kind, "literal": self.literal}
        if self.kind == "minisat":
            return {"kind": "minisat", "n": self.n}
        return {"kind": self.kind}


class Plugin:
    """Base plugin: the handlers you override become the capability list.

    ``atoms`` (id → name), ``ids`` (name → id), and ``role`` are filled in
    from the ``init`` request before :meth:`on_init` runs; raise there to
    refuse startup — the solver sees a failed handshake. Handlers receive
    plain literals and constraints and return plain Python values; the
    serve loop does all wire marshalling.
    """

    def __init__(self) -> None:
        self.atoms: dict[int, str] = {}
        self.ids: dict[str, int] = {}
        self.role = ""

    def on_init(self) -> None:
        """Startup hook; the atom table is already in place."""

    def log(self, *parts) -> None:
        """Write a diagnostic line to standard error."""
        print(*parts, file=sys.stderr)

    def capabilities(self) -> list[str]:
        """The wire methods this plugin implements, in wire order."""
        return [
            wire
            for wire, handler in METHODS.items()
            if getattr(type(self), handler) is not getattr(Plugin, handler)
        ]

    # ── propagation ───────────────────────────────────────────────

    def attach_literals(self):
        """Literals whose assignment this plugin wants to hear about."""
        raise NotImplementedError

    def simplify(self):
        """Literals true in every model, asserted up front."""
        raise NotImplementedError

    def on_literal_true(self, literal):
        """One attached literal became true; return inferred literals."""
        raise NotImplementedError

    def on_literals_true(self, literals):
        """Attached literals newly true at a fixpoint; return inferences."""
        raise NotImplementedError

    def on_literals_undefined(self, literals) -> None:
        """Attached literals just un-assigned by backtracking."""
        raise NotImplementedError

    def get_reason_for_literal(self, literal):
        """The constraint that justified inferring ``literal``."""
        raise NotImplementedError

    # ── model checking ────────────────────────────────────────────

    def check_stable_model(self, atoms) -> bool:
        """Accept or reject a total candidate (the true atoms)."""
        raise NotImplementedError

    def get_reasons_for_check_failure(self):
        """Constraints explaining the last rejection, each currently true."""
        raise NotImplementedError

    # ── search observation ────────────────────────────────────────

    def on_conflict(self) -> None:
        raise NotImplementedError

    def on_lit_in_conflict(self, literal) -> None:
        raise NotImplementedError

    def on_learning_constraint(self, constraint) -> None:
        raise NotImplementedError

    def on_restart(self) -> None:
        raise NotImplementedError

    # ── branching ─────────────────────────────────────────────────

    def init_minisat(self):
        """Initial activities, as (atom, value) pairs."""
        raise NotImplementedError

    def factor_minisat(self):
        """Per-atom activity factors, as (atom, value) pairs."""
        raise NotImplementedError

    def sign_minisat(self):
        """Preferred branching signs, as (atom, sign) pairs."""
        raise NotImplementedError

    def select_literal(self) -> Directive:
        """Pick the next move; return a :class:`Directive`."""
        raise NotImplementedError


def _call(plugin: Plugin, method: str, params: dict):
    """Dispatch one declared request and shape its wire result."""
    handler = getattr(plugin, METHODS[method])
    if method in _TAKES_LITERAL:
        result = handler(int(params["literal"]))
    elif method in _TAKES_LITERALS:
        result = handler([int(x) for x in params["literals"]])
    elif method == "onLearningConstraint":
        result = handler([int(x) for x in params["constraint"]])
    elif method == "checkStableModel":
        result = handler([int(x) for x in params["atoms"]])
    else:
        result = handler()

    if method in _RETURNS_LITERALS:
        return {"literals": [int(x) for x in result]}
    if method in _RETURNS_NULL:
        return None
    if method == "getReasonForLiteral":
        return {"constraint": [int(x) for x in result]}
    if method == "checkStableModel":
        return bool(result)
    if method == "getReasonsForCheckFailure":
        return {"constraints": [[int(x) for x in c] for c in result]}
    if method in _RETURNS_ENTRIES:
        return {"entries": [[int(a), int(v)] for a, v in result]}
    return result.to_wire()  # selectLiteral


def serve(plugin: Plugin, stdin=None, stdout=None) -> int:
    """Answer requests until shutdown; returns the process exit code.

    Pass ``stdin``/``stdout`` to drive a session from tests; by default
    the real standard streams are used and ``sys.stdout`` is swapped to
    standard error for the duration, so nothing but protocol lines can
    reach the solver.
    """
    source = stdin if stdin is not None else sys.stdin
    sink = stdout if stdout is not None else sys.stdout

    def send(payload: dict) -> None:
        sink.write(json.dumps(payload, separators=(",", ":"), sort_keys=True) + "\n")
        sink.flush()

    def fail(rid, code: int, message: str) -> None:
        send({"id": rid, "error": {"code": code, "message": message}})

    declared: set[str] = set()
    saved_stdout = sys.stdout
    sys.stdout = sys.stderr
    try:
        for line in source:
            try:
                request = json.loads(line)
            except ValueError:
                fail(None, E_PARSE, "request is not valid JSON")
                continue
            if not isinstance(request, dict) or not isinstance(
                request.get("method"), str
            ):
                rid = request.get("id") if isinstance(request, dict) else None
                fail(rid, E_PARSE, "request is not a call object")
                continue
            rid = request.get("id")
            method = request["method"]
            params = request.get("params") or {}

            if method == "shutdown":
                send({"id": rid, "result": None})
                return 0
            if method == "init":
                version = params.get("version")
                if version != PROTOCOL_VERSION:
                    fail(rid, E_VERSION, f"unsupported protocol version {version!r}")
                    return 1
                plugin.role = str(params.get("role", ""))
                plugin.atoms = {
                    int(entry["id"]): str(entry["name"])
                    for entry in params.get("atoms", ())
                }
                plugin.ids = {name: aid for aid, name in plugin.atoms.items()}
                try:
                    plugin.on_init()
                except Exception as exc:
                    traceback.print_exc()
                    fail(rid, E_HANDLER, f"init failed: {exc}")
                    return 1
                declared = set(plugin.capabilities())
                send({"id": rid, "result": {"capabilities": sorted(declared)}})
                continue
            if method not in declared:
                fail(rid, E_METHOD_NOT_FOUND, f"unknown method {method!r}")
                continue
            try:
                send({"id": rid, "result": _call(plugin, method, params)})
            except Exception as exc:
                traceback.print_exc()
                fail(rid, E_HANDLER, f"{method} failed: {exc}")
    finally:
        sys.stdout = saved_stdout
    return 0
