"""Run extensions as subprocesses, speaking newline-delimited JSON.

A plugin is any executable that answers JSON requests on its standard
input/output, one object per UTF-8, LF-terminated line; standard error
passes through for diagnostics. Requests are
``{"id": int, "method": str, "params": obj}``, answered strictly in order
by ``{"id": int, "result": obj}`` or
``{"id": int, "error": {"code": int, "message": str}}`` with the matching
id — no pipelining.

The ``init`` handshake (always id 0) carries the protocol version, the
plugin's role, and the full atom table::

    {"id":0,"method":"init","params":{"version":1,"role":"propagator",
                                      "atoms":[{"id":1,"name":"a"}, ...]}}

and the plugin replies with the wire method names it implements::

    {"id":0,"result":{"capabilities":["checkStableModel", ...]}}

Only declared methods are ever called afterwards. Literals on the wire are
signed atom ids (negative = "must be false") fitting signed 32-bit ints; a
constraint is an array of such literals. Error codes follow the JSON-RPC
flavor: -32700 undecodable request, -32601 unknown method, -32000 handler
failure, -32001 unsupported protocol version.

Per-method payloads:

====================  ================================  =========================
method                params                            result
====================  ================================  =========================
attachLiterals        {}                                {"literals": [...]}
simplify              {}                                {"literals": [...]}
onLiteralTrue         {"literal": l}                    {"literals": [...]}
onLiteralsTrue        {"literals": [...]}               {"literals": [...]}
onLiteralsUndefined   {"literals": [...]}               null
getReasonForLiteral   {"literal": l}                    {"constraint": [...]}
checkStableModel      {"atoms": [...]}                  true | false
getReasons...Failure  {}                                {"constraints": [[...]]}
onConflict            {}                                null
onLitInConflict       {"literal": l}                    null
onLearningConstraint  {"constraint": [...]}             null
onRestart             {}                                null
initMinisat           {}                                {"entries": [[atom, n]]}
factorMinisat         {}                                {"entries": [[atom, n]]}
signMinisat           {}                                {"entries": [[atom, s]]}
selectLiteral         {}                                {"kind": "choice",
                                                         "literal": l} | {"kind":
                                                        "minisat", "n": n} |
                                                        {"kind": "unroll",
                                                         "literal": l} |
                                                        {"kind": "restart"}
shutdown              {}                                null, then exit
====================  ================================  =========================
"""

from __future__ import annotations

import json
import os
import queue
import shlex
import subprocess
import threading

from .errors import (
    HandshakeError,
    PluginContractViolation,
    PluginCrashed,
    ProtocolError,
    ProtocolVersionMismatch,
    ResponseTimeout,
    SpawnFailed,
)
from .extensions import (
    HEURISTIC_METHODS,
    PROPAGATOR_METHODS,
    Directive,
    Heuristic,
    Propagator,
)

PROTOCOL_VERSION = 1

HANDSHAKE_TIMEOUT = 5.0
RESPONSE_TIMEOUT = 30.0
SHUTDOWN_GRACE = 2.0

# JSON-RPC-flavored error codes (mirrored by any conforming plugin)
E_PARSE = -32700
E_METHOD_NOT_FOUND = -32601
E_HANDLER = -32000
E_VERSION = -32001

_ROLE_METHODS = {
    "propagator": frozenset(PROPAGATOR_METHODS.values()),
    "heuristic": frozenset(HEURISTIC_METHODS.values()),
}


class PluginSession:
    """One plugin subprocess: spawn, handshake, synchronous dispatch, shutdown.

    A reader thread pumps the plugin's stdout into a queue so that the
    engine thread can wait with a deadline; the plugin not answering in
    ``response_timeout`` seconds raises :class:`ResponseTimeout` instead of
    hanging the solve.
    """

    def __init__(
        self,
        command: str,
        role: str,
        atoms: list[tuple[int, str]],
        *,
        response_timeout: float = RESPONSE_TIMEOUT,
        handshake_timeout: float = HANDSHAKE_TIMEOUT,
    ):
        if role not in _ROLE_METHODS:
            raise ValueError(f"role must be 'propagator' or 'heuristic', not {role!r}")
        self.command = command
        self.role = role
        self.response_timeout = response_timeout
        self._closed = False
        self._next_id = 0
        argv = shlex.split(command)
        if not argv:
            raise SpawnFailed("empty plugin command line")
        try:
            self.proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=None,  # plugin diagnostics pass through
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise SpawnFailed(f"cannot start {command!r}: {exc}") from None
        self._lines: queue.Queue = queue.Queue()
        reader = threading.Thread(target=self._pump, daemon=True)
        reader.start()
        self.capabilities = self._handshake(atoms, handshake_timeout)

    # ── Low-level plumbing ────────────────────────────────────────

    def _pump(self) -> None:
        for line in self.proc.stdout:
            self._lines.put(("line", line))
        self._lines.put(("eof", None))

    def _send(self, message: dict) -> None:
        try:
            self.proc.stdin.write(json.dumps(message, separators=(",", ":")) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError):
            raise PluginCrashed(
                f"{self.command}: plugin closed its input"
                f" (exit code {self.proc.poll()})"
            ) from None

    def _recv(self, timeout: float, what: str) -> dict:
        try:
            kind, payload = self._lines.get(timeout=timeout)
        except queue.Empty:
            raise ResponseTimeout(
                f"{self.command}: no response to {what} within {timeout:g}s"
            ) from None
        if kind == "eof":
            try:  # stdout just closed; give the exit status a moment to land
                code = self.proc.wait(timeout=1.0)
            except subprocess.TimeoutExpired:
                code = None
            raise PluginCrashed(
                f"{self.command}: plugin exited (code {code}) while {what} was pending"
            )
        try:
            message = json.loads(payload)
        except ValueError:
            raise ProtocolError(
                f"{self.command}: undecodable response line {payload!r}"
            ) from None
        if not isinstance(message, dict):
            raise ProtocolError(f"{self.command}: response is not an object: {payload!r}")
        return message

    # ── Protocol phases ───────────────────────────────────────────

    def _handshake(self, atoms, timeout: float) -> list[str]:
        self._send(
            {
                "id": 0,
                "method": "init",
                "params": {
                    "version": PROTOCOL_VERSION,
                    "role": self.role,
                    "atoms": [{"id": aid, "name": name} for aid, name in atoms],
                },
            }
        )
        try:
            message = self._recv(timeout, "init")
        except ResponseTimeout as exc:
            raise HandshakeError(str(exc)) from None
        except PluginCrashed as exc:
            raise HandshakeError(str(exc)) from None
        if message.get("id") != 0:
            raise ProtocolError(
                f"{self.command}: handshake response has id {message.get('id')!r}"
            )
        error = message.get("error")
        if error is not None:
            code = error.get("code") if isinstance(error, dict) else None
            text = error.get("message") if isinstance(error, dict) else error
            if code == E_VERSION:
                raise ProtocolVersionMismatch(f"{self.command}: {text}")
            raise HandshakeError(f"{self.command}: init failed: [{code}] {text}")
        result = message.get("result")
        caps = result.get("capabilities") if isinstance(result, dict) else None
        if not isinstance(caps, list) or not all(isinstance(c, str) for c in caps):
            raise HandshakeError(f"{self.command}: init result lacks a capability list")
        allowed = _ROLE_METHODS[self.role]
        for cap in caps:
            if cap not in allowed:
                raise HandshakeError(
                    f"{self.command}: unknown {self.role} capability {cap!r}"
                )
        return list(dict.fromkeys(caps))

    def call(self, method: str, params: dict):
        """One synchronous request–response round trip."""
        if self._closed:
            raise PluginCrashed(f"{self.command}: session already shut down")
        self._next_id += 1
        rid = self._next_id
        self._send({"id": rid, "method": method, "params": params})
        message = self._recv(self.response_timeout, method)
        got = message.get("id")
        if got != rid:
            raise ProtocolError(
                f"{self.command}: out-of-order response id {got!r} to {method} (expected {rid})"
            )
        error = message.get("error")
        if error is not None:
            code = error.get("code") if isinstance(error, dict) else None
            text = error.get("message") if isinstance(error, dict) else error
            raise PluginContractViolation(
                f"{self.command}: {method} failed in the plugin: [{code}] {text}"
            )
        if "result" not in message:
            raise ProtocolError(f"{self.command}: response to {method} has no result")
        return message["result"]

    def shutdown(self) -> None:
        """Ask the plugin to exit; kill it after a grace period. Idempotent."""
        if self._closed:
            return
        self._closed = True
        try:
            self._next_id += 1
            self._send({"id": self._next_id, "method": "shutdown", "params": {}})
        except PluginCrashed:
            pass
        try:
            self.proc.stdin.close()
        except OSError:
            pass
        try:
            self.proc.wait(timeout=SHUTDOWN_GRACE)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            self.proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.shutdown()


# ── Result decoding helpers ───────────────────────────────────────


def _expect_list(session, result, method: str, key: str) -> list:
    value = result.get(key) if isinstance(result, dict) else None
    if not isinstance(value, list):
        raise ProtocolError(
            f"{session.command}: {method} result must be {{\"{key}\": [...]}}, got {result!r}"
        )
    return value


def _expect_int(session, value, method: str):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ProtocolError(f"{session.command}: {method} carried a non-integer {value!r}")
    return value


def _decode_directive(session, result) -> Directive:
    kind = result.get("kind") if isinstance(result, dict) else None
    if kind == "choice":
        return Directive.choice(_expect_int(session, result.get("literal"), "selectLiteral"))
    if kind == "minisat":
        return Directive.use_default(_expect_int(session, result.get("n"), "selectLiteral"))
    if kind == "unroll":
        return Directive.unroll(_expect_int(session, result.get("literal"), "selectLiteral"))
    if kind == "restart":
        return Directive.restart()
    raise ProtocolError(f"{session.command}: selectLiteral returned {result!r}")


def _plugin_name(command: str) -> str:
    """A short name for statistics keys: the script's basename, else the binary's."""
    argv = shlex.split(command)
    path = argv[-1] if len(argv) > 1 else argv[0]
    stem = os.path.basename(path)
    return stem.rsplit(".", 1)[0] if "." in stem else stem


class RemotePropagator(Propagator):
    """In-engine stand-in for a propagator running as a subprocess."""

    def __init__(self, session: PluginSession, name: str | None = None):
        self.session = session
        self._name = name or _plugin_name(session.command)

    def capabilities(self) -> list[str]:
        return list(self.session.capabilities)

    def bind(self, program) -> None:
        pass  # the atom table went out with the handshake

    def shutdown(self) -> None:
        self.session.shutdown()

    def attach_literals(self):
        res = self.session.call("attachLiterals", {})
        return _expect_list(self.session, res, "attachLiterals", "literals")

    def simplify(self):
        res = self.session.call("simplify", {})
        return _expect_list(self.session, res, "simplify", "literals")

    def on_literal_true(self, lit):
        res = self.session.call("onLiteralTrue", {"literal": lit})
        return _expect_list(self.session, res, "onLiteralTrue", "literals")

    def on_literals_true(self, lits):
        res = self.session.call("onLiteralsTrue", {"literals": list(lits)})
        return _expect_list(self.session, res, "onLiteralsTrue", "literals")

    def on_literals_undefined(self, lits) -> None:
        self.session.call("onLiteralsUndefined", {"literals": list(lits)})

    def get_reason_for_literal(self, lit):
        res = self.session.call("getReasonForLiteral", {"literal": lit})
        return _expect_list(self.session, res, "getReasonForLiteral", "constraint")

    def check_stable_model(self, true_atoms):
        return self.session.call("checkStableModel", {"atoms": list(true_atoms)})

    def get_reasons_for_check_failure(self):
        res = self.session.call("getReasonsForCheckFailure", {})
        return _expect_list(self.session, res, "getReasonsForCheckFailure", "constraints")


class RemoteHeuristic(Heuristic):
    """In-engine stand-in for a branching heuristic running as a subprocess."""

    def __init__(self, session: PluginSession, name: str | None = None):
        self.session = session
        self._name = name or _plugin_name(session.command)

    def capabilities(self) -> list[str]:
        return list(self.session.capabilities)

    def bind(self, program) -> None:
        pass

    def shutdown(self) -> None:
        self.session.shutdown()

    def attach_literals(self):
        res = self.session.call("attachLiterals", {})
        return _expect_list(self.session, res, "attachLiterals", "literals")

    def on_literal_true(self, lit):
        res = self.session.call("onLiteralTrue", {"literal": lit})
        return _expect_list(self.session, res, "onLiteralTrue", "literals")

    def on_literals_true(self, lits):
        res = self.session.call("onLiteralsTrue", {"literals": list(lits)})
        return _expect_list(self.session, res, "onLiteralsTrue", "literals")

    def on_literals_undefined(self, lits) -> None:
        self.session.call("onLiteralsUndefined", {"literals": list(lits)})

    def on_conflict(self) -> None:
        self.session.call("onConflict", {})

    def on_lit_in_conflict(self, lit) -> None:
        self.session.call("onLitInConflict", {"literal": lit})

    def on_learning_constraint(self, constraint) -> None:
        self.session.call("onLearningConstraint", {"constraint": list(constraint)})

    def on_restart(self) -> None:
        self.session.call("onRestart", {})

    def init_minisat(self):
        res = self.session.call("initMinisat", {})
        return _expect_list(self.session, res, "initMinisat", "entries")

    def factor_minisat(self):
        res = self.session.call("factorMinisat", {})
        return _expect_list(self.session, res, "factorMinisat", "entries")

    def sign_minisat(self):
        res = self.session.call("signMinisat", {})
        return _expect_list(self.session, res, "signMinisat", "entries")

    def select_literal(self, ctx) -> Directive:
        return _decode_directive(self.session, self.session.call("selectLiteral", {}))


def spawn_plugin(
    command: str,
    role: str,
    program,
    *,
    name: str | None = None,
    response_timeout: float = RESPONSE_TIMEOUT,
):
    """Start a scripted extension and hand back its in-engine stand-in.

    ``program`` supplies the atom table for the handshake, so parse first,
    spawn second, and pass the result to the solver like any other
    extension. Call ``shutdown()`` on the returned object (or use it as a
    context manager via its ``session``) when the solve is over.
    """
    atoms = [(aid, program.atom_name(aid)) for aid in range(1, program.num_atoms + 1)]
    session = PluginSession(command, role, atoms, response_timeout=response_timeout)
    cls = RemotePropagator if role == "propagator" else RemoteHeuristic
    return cls(session, name=name)
