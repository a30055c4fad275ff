"""A minimal s-expression reader shared by the script and proof formats."""

from __future__ import annotations

import re
from dataclasses import dataclass


class SexprError(ValueError):
    def __init__(self, message, line, column):
        self.line, self.column = line, column
        super().__init__(f"{line}:{column}: {message}")


@dataclass(frozen=True)
class Str:
    """A double-quoted string atom (kept distinct from bare symbols)."""

    text: str
    line: int = 0


@dataclass(frozen=True)
class Sym:
    text: str
    line: int = 0
    column: int = 0

    def __str__(self):
        return self.text


_TOKEN = re.compile(r'\s+|;[^\n]*|(\()|(\))|"((?:[^"\\]|\\.)*)"|([^\s()";]+)')


def _unescape(body):
    """Undo the writer's escaping; a backslash before anything else stays literal."""
    return re.sub(r'\\([\\"])', r"\1", body)


def read_all(text: str) -> list:
    """Parse every top-level expression; lists become Python lists."""
    stack: list = [[]]
    opened: list = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SexprError(f"unexpected {text[pos]!r}", line, pos - line_start + 1)
        col = pos - line_start + 1
        if m.group(1):
            stack.append([])
            opened.append((line, col))
        elif m.group(2):
            if len(stack) == 1:
                raise SexprError("unbalanced ')'", line, col)
            done = stack.pop()
            opened.pop()
            stack[-1].append(done)
        elif m.group(3) is not None:
            stack[-1].append(Str(_unescape(m.group(3)), line))
        elif m.group(4):
            stack[-1].append(Sym(m.group(4), line, col))
        chunk = m.group(0)
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    if len(stack) != 1:
        l, c = opened[-1]
        raise SexprError("unclosed '('", l, c)
    return stack[0]


def read_one(text: str):
    items = read_all(text)
    if len(items) != 1:
        raise SexprError(f"expected one expression, found {len(items)}", 1, 1)
    return items[0]


def head(expr) -> str | None:
    if isinstance(expr, list) and expr and isinstance(expr[0], Sym):
        return expr[0].text
    return None


def write(expr) -> str:
    if isinstance(expr, list):
        return "(" + " ".join(write(e) for e in expr) + ")"
    if isinstance(expr, Str):
        return '"' + expr.text.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(expr, Sym):
        return expr.text
    return str(expr)
