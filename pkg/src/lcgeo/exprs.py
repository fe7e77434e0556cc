"""A small arithmetic expression language for surface components.

Grammar (standard precedence, left associative):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' exponent)?        exponent: numeric literal or parameter
    atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

Identifiers u, v are the chart variables; function names are sin, cos, sinh,
cosh, exp, log, sqrt; every other identifier is a parameter reference.  The
language is deliberately closed under smooth operations only (no conditionals,
no piecewise definitions) because it is evaluated through truncated Taylor
jets.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .jets import Jet, JetDomainError, jet_elementary

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "exp", "log", "sqrt")


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ExprEvalError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Const:
    value: float
    offset: int = 0


@dataclass(frozen=True)
class Var:
    name: str  # "u" or "v"
    offset: int = 0


@dataclass(frozen=True)
class Param:
    name: str
    offset: int = 0


@dataclass(frozen=True)
class Unary:
    op: str  # neg | sin | cos | sinh | cosh | exp | log | sqrt
    operand: "Node"
    offset: int = 0


@dataclass(frozen=True)
class Binary:
    op: str  # add | sub | mul | div
    lhs: "Node"
    rhs: "Node"
    offset: int = 0


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: "Node"  # Const or Param
    offset: int = 0


Node = Const | Var | Param | Unary | Binary | Pow

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start():
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            off = len(text) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", off)
        if m.group("num") is not None:
            tokens.append(("num", text[m.start():m.end()].strip(), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}", off)
        return self.next()

    def parse(self) -> Node:
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {val!r}", off)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, val, off = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.term()
                node = Binary("add" if val == "+" else "sub", node, rhs, off)
            else:
                return node

    def term(self) -> Node:
        node = self.unary()
        while True:
            kind, val, off = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                rhs = self.unary()
                node = Binary("mul" if val == "*" else "div", node, rhs, off)
            else:
                return node

    def unary(self) -> Node:
        kind, val, off = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return Unary("neg", self.unary(), off)
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        kind, val, off = self.peek()
        if kind == "op" and val == "^":
            self.next()
            node = Pow(node, self.exponent(), off)
        return node

    def exponent(self) -> Node:
        sign = 1.0
        kind, val, off = self.peek()
        if kind == "op" and val == "-":
            self.next()
            sign = -1.0
            kind, val, off = self.peek()
        if kind == "num":
            self.next()
            return Const(sign * float(val), off)
        if kind == "ident" and sign == 1.0:
            if val in FUNCTIONS or val in ("u", "v"):
                raise ExprSyntaxError("exponent must be a constant", off)
            self.next()
            return Param(val, off)
        raise ExprSyntaxError("exponent must be a constant", off)

    def atom(self) -> Node:
        kind, val, off = self.next()
        if kind == "num":
            return Const(float(val), off)
        if kind == "ident":
            if val in FUNCTIONS:
                nk, nv, noff = self.peek()
                if nk != "op" or nv != "(":
                    raise ExprSyntaxError(f"function {val!r} needs an argument", noff)
                self.next()
                arg = self.expr()
                self.expect_op(")")
                return Unary(val, arg, off)
            if val in ("u", "v"):
                return Var(val, off)
            return Param(val, off)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        what = repr(val) if val else "end of input"
        raise ExprSyntaxError(f"expected a value, got {what}", off)


def parse_expr(text: str, known_params=None) -> Node:
    """Parse an expression; optionally validate parameter names."""
    node = _Parser(text).parse()
    if known_params is not None:
        for p in collect_params(node):
            if p.name not in known_params:
                raise ExprSyntaxError(f"unknown identifier {p.name!r}", p.offset)
    return node


def collect_params(node: Node) -> list[Param]:
    out = []

    def walk(n):
        if isinstance(n, Param):
            out.append(n)
        elif isinstance(n, Unary):
            walk(n.operand)
        elif isinstance(n, Binary):
            walk(n.lhs)
            walk(n.rhs)
        elif isinstance(n, Pow):
            walk(n.base)
            walk(n.exponent)

    walk(node)
    return out


def to_string(node: Node) -> str:
    """Print an AST so that parse(to_string(ast)) is structurally identical."""
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, (Var, Param)):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            return f"-({to_string(node.operand)})"
        return f"{node.op}({to_string(node.operand)})"
    if isinstance(node, Binary):
        sym = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[node.op]
        return f"({to_string(node.lhs)} {sym} {to_string(node.rhs)})"
    if isinstance(node, Pow):
        return f"({to_string(node.base)})^{to_string(node.exponent)}"
    raise TypeError(f"not an AST node: {node!r}")


def eval_expr_jet(node: Node, point, order: int, params: dict | None = None) -> Jet:
    """Evaluate an expression to a jet at the chart point(s).

    point is (u0, v0); arrays give a batch of jets.  Parameters are constants.
    Domain violations are reported with the offending node's byte offset.
    """
    params = params or {}
    u0 = np.asarray(point[0], dtype=float)
    v0 = np.asarray(point[1], dtype=float)
    batch = np.broadcast_shapes(u0.shape, v0.shape)
    base = (np.broadcast_to(u0, batch), np.broadcast_to(v0, batch))

    def const(value):
        return Jet.constant(np.broadcast_to(np.asarray(value, dtype=float), batch), order, base)

    def ev(n) -> Jet:
        if isinstance(n, Const):
            return const(n.value)
        if isinstance(n, Var):
            return Jet.variable_u(order, base) if n.name == "u" else Jet.variable_v(order, base)
        if isinstance(n, Param):
            if n.name not in params:
                raise ExprEvalError(f"unknown identifier {n.name!r}", n.offset)
            return const(params[n.name])
        if isinstance(n, Unary):
            arg = ev(n.operand)
            if n.op == "neg":
                return -arg
            try:
                return jet_elementary(arg, n.op)
            except JetDomainError as exc:
                raise ExprEvalError(str(exc), n.offset) from exc
        if isinstance(n, Binary):
            lhs = ev(n.lhs)
            rhs = ev(n.rhs)
            if n.op == "div":
                try:
                    return lhs / rhs
                except ZeroDivisionError as exc:
                    raise ExprEvalError(str(exc), n.offset) from exc
            return {"add": lhs + rhs, "sub": lhs - rhs, "mul": lhs * rhs}[n.op]
        if isinstance(n, Pow):
            if isinstance(n.exponent, Const):
                expo = n.exponent.value
            elif isinstance(n.exponent, Param):
                if n.exponent.name not in params:
                    raise ExprEvalError(f"unknown identifier {n.exponent.name!r}", n.exponent.offset)
                expo = float(params[n.exponent.name])
            else:
                raise ExprEvalError("exponent must be a constant", n.offset)
            if expo == int(expo) and 0 <= expo <= 8:
                # small integer powers stay exact for any base sign
                out = const(1.0)
                for _ in range(int(expo)):
                    out = out * ev(n.base)
                return out
            try:
                return jet_elementary(ev(n.base), "pow_const", exponent=expo)
            except JetDomainError as exc:
                raise ExprEvalError(str(exc), n.offset) from exc
        raise TypeError(f"not an AST node: {n!r}")

    return ev(node)
