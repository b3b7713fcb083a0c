"""Parser for the ground program text format.

Statements are terminated by ``.`` and several may share a line; ``%``
starts a comment. Facts are bare atoms, rules are ``head :- lit, ..., lit.``,
and constraints leave the head empty. Negation is written ``not atom``.
Atom arguments are plain constants; an argument may also be an arithmetic
comparison (used by the constraint-programming extension), in which case it
is kept verbatim with whitespace removed.
"""

from __future__ import annotations

import re

from .errors import DisjunctiveHeadUnsupported, ParseError
from .program import GroundProgram

_NAME_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_CONST_RE = re.compile(r"[a-z0-9_][A-Za-z0-9_]*\Z")
_EXPR_RE = re.compile(r"[A-Za-z0-9_+\-*/<>=! ]+\Z")
_EXPR_OPS = set("+-*/<>=!")


def parse_program(text: str) -> GroundProgram:
    program = GroundProgram()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        for stmt in _split_statements(line, lineno):
            _parse_statement(program, stmt, lineno)
    return program


def _split_statements(line: str, lineno: int) -> list[str]:
    """Cut a line at the ``.`` terminators (outside parentheses)."""
    stmts = []
    depth = 0
    start = 0
    for i, ch in enumerate(line):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "." and depth == 0:
            stmt = line[start:i].strip()
            if not stmt:
                raise ParseError(lineno, "empty statement")
            stmts.append(stmt)
            start = i + 1
    if line[start:].strip():
        raise ParseError(lineno, "statement does not end with '.'")
    return stmts


def _parse_statement(program: GroundProgram, stmt: str, lineno: int) -> None:
    if ":-" in stmt:
        head_text, body_text = stmt.split(":-", 1)
        head_text = head_text.strip()
        body_text = body_text.strip()
        if not body_text:
            raise ParseError(lineno, "empty rule body")
        body = _split_commas(body_text, lineno)
    else:
        head_text = stmt
        body = []

    head = None
    if head_text:
        if "|" in head_text or ";" in head_text or _has_toplevel_comma(head_text):
            raise DisjunctiveHeadUnsupported(lineno, "disjunctive heads are not supported")
        if head_text.startswith("not "):
            raise ParseError(lineno, "negated head")
        head = program.atom(_parse_atom(head_text, lineno))

    pos, neg = [], []
    for item in body:
        item = item.strip()
        if not item:
            raise ParseError(lineno, "empty body literal")
        if item.startswith("not "):
            inner = item[4:].strip()
            if inner.startswith("not "):
                raise ParseError(lineno, "nested negation")
            neg.append(program.atom(_parse_atom(inner, lineno)))
        else:
            pos.append(program.atom(_parse_atom(item, lineno)))
    program.add_rule(head, pos, neg)


def _parse_atom(text: str, lineno: int) -> str:
    """Validate one atom and return its canonical name."""
    text = text.strip()
    if "(" in text:
        if not text.endswith(")"):
            raise ParseError(lineno, f"unbalanced parentheses in '{text}'")
        name, args_text = text.split("(", 1)
        args_text = args_text[:-1]
        name = name.strip()
        args = [a.strip() for a in args_text.split(",")]
        if not args or any(not a for a in args):
            raise ParseError(lineno, f"empty argument in '{text}'")
        canon = []
        for arg in args:
            if _CONST_RE.match(arg):
                canon.append(arg)
            elif _EXPR_RE.match(arg) and any(c in _EXPR_OPS for c in arg):
                canon.append(arg.replace(" ", ""))
            else:
                raise ParseError(lineno, f"bad argument '{arg}' in '{text}'")
    else:
        name = text
        canon = None
    if not _NAME_RE.match(name):
        raise ParseError(lineno, f"bad atom name '{name}'")
    return name if canon is None else f"{name}({','.join(canon)})"


def _split_commas(text: str, lineno: int) -> list[str]:
    """Split on commas outside parentheses."""
    parts = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError(lineno, "unbalanced parentheses")
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth != 0:
        raise ParseError(lineno, "unbalanced parentheses")
    parts.append(text[start:])
    return parts


def _has_toplevel_comma(text: str) -> bool:
    depth = 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return True
    return False
