"""The serve loop and the Plugin base: capabilities, marshalling, and
every error path a host can trigger."""

from __future__ import annotations

import io
import json

import pytest

from aspen_sdk import (
    E_HANDLER,
    E_METHOD_NOT_FOUND,
    E_PARSE,
    E_VERSION,
    METHODS,
    Directive,
    Plugin,
    serve,
)

ATOMS = [{"id": 1, "name": "p"}, {"id": 2, "name": "q"}]
INIT = {
    "id": 0,
    "method": "init",
    "params": {"version": 1, "role": "propagator", "atoms": ATOMS},
}


def session(plugin, *requests):
    """Run serve over a scripted request list; returns (exit code, replies)."""
    lines = [r if isinstance(r, str) else json.dumps(r) for r in requests]
    out = io.StringIO()
    code = serve(plugin, stdin=io.StringIO("".join(l + "\n" for l in lines)), stdout=out)
    return code, [json.loads(l) for l in out.getvalue().splitlines()], out.getvalue()


def request(rid, method, **params):
    return {"id": rid, "method": method, "params": params}


class Veto(Plugin):
    def check_stable_model(self, atoms):
        return False

    def get_reasons_for_check_failure(self):
        return [[1], [2, -1]]


class Everything(Plugin):
    def attach_literals(self):
        return [1, -2]

    def simplify(self):
        return []

    def on_literal_true(self, literal):
        return [-literal]

    def on_literals_true(self, literals):
        return literals

    def on_literals_undefined(self, literals):
        return "not a protocol value"  # the result must still be null

    def get_reason_for_literal(self, literal):
        return [-literal, 1]

    def check_stable_model(self, atoms):
        return len(atoms) % 2 == 0

    def get_reasons_for_check_failure(self):
        return [[1, 2]]

    def on_conflict(self):
        pass

    def on_lit_in_conflict(self, literal):
        pass

    def on_learning_constraint(self, constraint):
        pass

    def on_restart(self):
        pass

    def init_minisat(self):
        return [(1, 5)]

    def factor_minisat(self):
        return [(2, 3)]

    def sign_minisat(self):
        return [(1, 1), (2, -1)]

    def select_literal(self):
        return Directive.choice(-1)


# ── Capabilities ──────────────────────────────────────────────────


def test_base_plugin_declares_nothing():
    assert Plugin().capabilities() == []


def test_capabilities_are_the_overridden_handlers():
    assert Veto().capabilities() == ["checkStableModel", "getReasonsForCheckFailure"]


def test_every_wire_method_is_inferrable():
    assert sorted(Everything().capabilities()) == sorted(METHODS)


def test_on_init_is_not_a_capability():
    class Startup(Plugin):
        def on_init(self):
            pass

    assert Startup().capabilities() == []


# ── Handshake ─────────────────────────────────────────────────────


def test_init_replies_with_sorted_capabilities_and_fills_the_table():
    plugin = Veto()
    code, replies, _ = session(plugin, INIT)
    assert code == 0
    assert replies == [
        {"id": 0, "result": {"capabilities": ["checkStableModel", "getReasonsForCheckFailure"]}}
    ]
    assert plugin.atoms == {1: "p", 2: "q"}
    assert plugin.ids == {"p": 1, "q": 2}
    assert plugin.role == "propagator"


def test_version_mismatch_errors_and_exits_nonzero():
    bad = dict(INIT, params=dict(INIT["params"], version=2))
    code, replies, _ = session(Veto(), bad, request(1, "checkStableModel", atoms=[]))
    assert code == 1
    assert replies == [
        {"id": 0, "error": {"code": E_VERSION, "message": "unsupported protocol version 2"}}
    ]


def test_failing_startup_hook_errors_and_exits_nonzero():
    class Refuses(Plugin):
        def on_init(self):
            raise ValueError("table is unusable")

    code, replies, _ = session(Refuses(), INIT)
    assert code == 1
    assert replies[0]["error"]["code"] == E_HANDLER
    assert "table is unusable" in replies[0]["error"]["message"]


# ── Error paths that must not end the session ─────────────────────


def test_garbage_line_gets_a_parse_error_and_the_loop_continues():
    code, replies, _ = session(Veto(), "{not json", INIT)
    assert code == 0
    assert replies[0] == {
        "id": None,
        "error": {"code": E_PARSE, "message": "request is not valid JSON"},
    }
    assert replies[1]["result"]["capabilities"]


@pytest.mark.parametrize("line", ["[1,2,3]", '"hello"', '{"id": 4}'])
def test_non_call_objects_get_a_parse_error(line):
    code, replies, _ = session(Veto(), line, INIT)
    assert code == 0
    assert replies[0]["error"]["code"] == E_PARSE


def test_undeclared_methods_are_unknown():
    code, replies, _ = session(
        Veto(), INIT, request(1, "selectLiteral"), request(2, "checkStableModel", atoms=[1])
    )
    assert code == 0
    assert replies[1] == {
        "id": 1,
        "error": {"code": E_METHOD_NOT_FOUND, "message": "unknown method 'selectLiteral'"},
    }
    assert replies[2] == {"id": 2, "result": False}


def test_requests_before_init_are_unknown():
    code, replies, _ = session(Veto(), request(1, "checkStableModel", atoms=[]))
    assert code == 0
    assert replies[0]["error"]["code"] == E_METHOD_NOT_FOUND


def test_handler_exception_is_answered_logged_and_survived(capsys):
    class Cranky(Plugin):
        def check_stable_model(self, atoms):
            raise RuntimeError("bad day")

        def get_reasons_for_check_failure(self):
            return [[1]]

    code, replies, _ = session(
        Cranky(),
        INIT,
        request(1, "checkStableModel", atoms=[1]),
        request(2, "getReasonsForCheckFailure"),
    )
    assert code == 0
    assert replies[1]["error"]["code"] == E_HANDLER
    assert "checkStableModel failed: bad day" in replies[1]["error"]["message"]
    assert replies[2] == {"id": 2, "result": {"constraints": [[1]]}}
    assert "RuntimeError" in capsys.readouterr().err


def test_missing_params_are_a_handler_failure():
    code, replies, _ = session(Veto(), INIT, {"id": 1, "method": "checkStableModel"})
    assert code == 0
    assert replies[1]["error"]["code"] == E_HANDLER


# ── Session end ───────────────────────────────────────────────────


def test_shutdown_replies_null_and_exits_zero():
    code, replies, _ = session(
        Veto(), INIT, request(7, "shutdown"), request(8, "checkStableModel", atoms=[])
    )
    assert code == 0
    assert replies[-1] == {"id": 7, "result": None}  # nothing read past shutdown


def test_eof_without_shutdown_exits_zero():
    code, replies, _ = session(Veto(), INIT)
    assert code == 0
    assert len(replies) == 1


# ── Marshalling ───────────────────────────────────────────────────


def test_every_result_shape():
    code, replies, _ = session(
        Everything(),
        INIT,
        request(1, "attachLiterals"),
        request(2, "simplify"),
        request(3, "onLiteralTrue", literal=2),
        request(4, "onLiteralsTrue", literals=[1, -2]),
        request(5, "onLiteralsUndefined", literals=[1]),
        request(6, "getReasonForLiteral", literal=-2),
        request(7, "checkStableModel", atoms=[1, 2]),
        request(8, "getReasonsForCheckFailure"),
        request(9, "onConflict"),
        request(10, "onLitInConflict", literal=1),
        request(11, "onLearningConstraint", constraint=[1, -2]),
        request(12, "onRestart"),
        request(13, "initMinisat"),
        request(14, "factorMinisat"),
        request(15, "signMinisat"),
        request(16, "selectLiteral"),
    )
    assert code == 0
    results = {r["id"]: r["result"] for r in replies}
    assert results[1] == {"literals": [1, -2]}
    assert results[2] == {"literals": []}
    assert results[3] == {"literals": [-2]}
    assert results[4] == {"literals": [1, -2]}
    assert results[5] is None
    assert results[6] == {"constraint": [2, 1]}
    assert results[7] is True
    assert results[8] == {"constraints": [[1, 2]]}
    assert results[9] is None and results[10] is None
    assert results[11] is None and results[12] is None
    assert results[13] == {"entries": [[1, 5]]}
    assert results[14] == {"entries": [[2, 3]]}
    assert results[15] == {"entries": [[1, 1], [2, -1]]}
    assert results[16] == {"kind": "choice", "literal": -1}


def test_responses_echo_the_request_id():
    code, replies, _ = session(Veto(), INIT, request(42, "checkStableModel", atoms=[]))
    assert replies[1]["id"] == 42


def test_response_lines_are_canonical():
    _, _, raw = session(Everything(), INIT, request(3, "attachLiterals"))
    assert raw.splitlines()[1] == '{"id":3,"result":{"literals":[1,-2]}}'


def test_stray_prints_go_to_standard_error(capsys):
    class Chatty(Plugin):
        def on_conflict(self):
            print("thinking out loud")

    code, replies, raw = session(Chatty(), INIT, request(1, "onConflict"))
    assert code == 0
    assert len(raw.splitlines()) == 2  # nothing but the two responses
    assert replies[1] == {"id": 1, "result": None}
    assert "thinking out loud" in capsys.readouterr().err


def test_log_writes_to_standard_error(capsys):
    Plugin().log("status:", "ready")
    assert capsys.readouterr().err == "status: ready\n"


# ── Directives ────────────────────────────────────────────────────


@pytest.mark.parametrize(
    "directive,wire",
    [
        (Directive.choice(-3), {"kind": "choice", "literal": -3}),
        (Directive.minisat(0), {"kind": "minisat", "n": 0}),
        (Directive.minisat(2), {"kind": "minisat", "n": 2}),
        (Directive.unroll(5), {"kind": "unroll", "literal": 5}),
        (Directive.restart(), {"kind": "restart"}),
    ],
)
def test_directive_wire_forms(directive, wire):
    assert directive.to_wire() == wire


def test_directives_are_frozen():
    with pytest.raises(AttributeError):
        Directive.choice(1).literal = 2
