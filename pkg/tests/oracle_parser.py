"""Independent recursive-descent parser/evaluator for emitted snippets.

Deliberately shares no code with the engine: it re-reads the snippet
text and evaluates it with its own arithmetic so the two paths can be
checked against each other.  Semantics mirrored from the documented
contract: division by a near-zero denominator yields the numerator,
tangent results are limited to +-1e4, every parenthesized binary result
(and the final value) is limited to +-1e6.
"""

from __future__ import annotations

import math

DIV_EPSILON = 1e-6
TAN_LIMIT = 1e4
VALUE_LIMIT = 1e6

_FUNCTIONS = {"sin": math.sin, "cos": math.cos, "tan": math.tan}


class SnippetSyntaxError(ValueError):
    pass


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise SnippetSyntaxError(f"{message} at position {self.pos}: {self.text[self.pos:self.pos+20]!r}")

    def expect(self, literal: str):
        if not self.text.startswith(literal, self.pos):
            self.error(f"expected {literal!r}")
        self.pos += len(literal)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse_statement(self):
        """Returns (swizzle, expression-ast)."""
        self.expect("p.")
        start = self.pos
        while self.peek() in "xyz":
            self.pos += 1
        swizzle = self.text[start:self.pos]
        if not swizzle:
            self.error("expected a swizzle")
        self.expect(" = p.")
        self.expect(swizzle)
        self.expect(" + (")
        expr = self.parse_expr()
        self.expect(");")
        if self.pos != len(self.text.rstrip("\n")):
            self.error("trailing characters")
        return swizzle, ("group", expr)

    def parse_expr(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            left = self.parse_expr()
            self.expect(" ")
            op = self.peek()
            if op not in "+-*/":
                self.error("expected a binary operator")
            self.pos += 1
            self.expect(" ")
            right = self.parse_expr()
            self.expect(")")
            return ("binary", op, left, right)
        for name in _FUNCTIONS:
            if self.text.startswith(name + "(", self.pos):
                self.pos += len(name) + 1
                inner = self.parse_expr()
                self.expect(")")
                return ("call", name, inner)
        if self.text.startswith("p.", self.pos):
            self.pos += 2
            var = self.peek()
            if var not in "xyz":
                self.error("expected a coordinate")
            self.pos += 1
            return ("var", var)
        if self.text.startswith("time", self.pos):
            self.pos += 4
            return ("var", "t")
        return self.parse_number()

    def parse_number(self):
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        while self.peek().isdigit():
            self.pos += 1
        if self.peek() == ".":
            self.pos += 1
            while self.peek().isdigit():
                self.pos += 1
        if self.pos == start:
            self.error("expected a number")
        return ("const", float(self.text[start:self.pos]))


def _limit(value: float, bound: float) -> float:
    return bound if value > bound else -bound if value < -bound else value


def _evaluate(ast, env) -> float:
    kind = ast[0]
    if kind == "const":
        return ast[1]
    if kind == "var":
        return env[ast[1]]
    if kind == "call":
        inner = _evaluate(ast[2], env)
        result = _FUNCTIONS[ast[1]](inner)
        return _limit(result, TAN_LIMIT) if ast[1] == "tan" else result
    if kind == "group":
        return _limit(_evaluate(ast[1], env), VALUE_LIMIT)
    _, op, left_ast, right_ast = ast
    left = _evaluate(left_ast, env)
    right = _evaluate(right_ast, env)
    if op == "+":
        raw = left + right
    elif op == "-":
        raw = left - right
    elif op == "*":
        raw = left * right
    elif abs(right) < DIV_EPSILON:
        raw = left
    else:
        raw = left / right
    return _limit(raw, VALUE_LIMIT)


def parse_snippet(text: str):
    """Parse an emitted statement; returns (swizzle, callable(x, y, z, t))."""
    swizzle, ast = _Parser(text.strip()).parse_statement()

    def evaluate(x: float, y: float, z: float, t: float) -> float:
        return _evaluate(ast, {"x": x, "y": y, "z": z, "t": t})

    return swizzle, evaluate


def displaced(text: str, x: float, y: float, z: float, t: float):
    """Apply the parsed statement the way a shader swizzle would."""
    swizzle, evaluate = parse_snippet(text)
    e = evaluate(x, y, z, t)
    coords = {"x": x, "y": y, "z": z}
    for name in swizzle:
        coords[name] = coords[name] + e
    return coords["x"], coords["y"], coords["z"]
