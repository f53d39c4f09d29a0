"""Tokenizer, recursive-descent parser and evaluator for the metric language.

Grammar::

    file    := letdecl* "L" "=" expr
    letdecl := "let" IDENT "=" expr
    expr    := expr ("+"|"-") term | term
    term    := term ("*"|"/") factor | factor
    factor  := base ("^" REAL)?
    base    := "-" base | "(" expr ")" | CALL | IDENT | NUMBER | "i"
    CALL    := ("exp"|"log"|"sqrt"|"conj"|"abs2"|"re"|"im") "(" expr ")"

Free variables are ``z1 z2 e1 e2``; ``conj(z1)`` etc. give the barred ones.
``#`` starts a comment running to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ArityError, LexError, ParseError, UnknownIdentifierError

FUNCTIONS = ("exp", "log", "sqrt", "conj", "abs2", "re", "im")
VARIABLES = ("z1", "z2", "e1", "e2")
KEYWORDS = ("let", "L", "i")


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER, IDENT, OP, NEWLINE, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()=,])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise LexError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "newline":
            tokens.append(Token("NEWLINE", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind == "number":
            tokens.append(Token("NUMBER", m.group(), line, col))
        elif kind == "ident":
            tokens.append(Token("IDENT", m.group(), line, col))
        elif kind == "op":
            tokens.append(Token("OP", m.group(), line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# -- AST ------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: complex


@dataclass(frozen=True)
class Var:
    name: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Unary:
    op: str
    arg: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: float


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


@dataclass
class Program:
    lets: list = field(default_factory=list)  # [(name, expr)]
    body: object = None
    source: str = ""


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.bound: dict[str, Token] = {}
        self.used: set[str] = set()

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def skip_newlines(self):
        while self.tok.kind == "NEWLINE":
            self.advance()

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = text if text is not None else kind.lower()
            got = t.text if t.kind != "EOF" else "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", t.line, t.col)
        return self.advance()

    def program(self, source: str) -> Program:
        prog = Program(source=source)
        self.skip_newlines()
        while self.tok.kind == "IDENT" and self.tok.text == "let":
            self.advance()
            name = self.expect("IDENT")
            if name.text in VARIABLES or name.text in FUNCTIONS or name.text in KEYWORDS:
                raise ParseError(f"cannot rebind reserved name {name.text!r}", name.line, name.col)
            if name.text in self.bound:
                raise ParseError(f"duplicate binding {name.text!r}", name.line, name.col)
            self.expect("OP", "=")
            expr = self.expr()
            self.bound[name.text] = name
            prog.lets.append((name.text, expr))
            self.end_of_statement()
        t = self.tok
        if not (t.kind == "IDENT" and t.text == "L"):
            got = t.text if t.kind != "EOF" else "end of input"
            raise ParseError(f"expected 'L = <expr>', found {got!r}", t.line, t.col)
        self.advance()
        self.expect("OP", "=")
        prog.body = self.expr()
        self.end_of_statement()
        self.skip_newlines()
        if self.tok.kind != "EOF":
            raise ParseError(f"unexpected {self.tok.text!r} after L expression",
                             self.tok.line, self.tok.col)
        for name, tok in self.bound.items():
            if name not in self.used:
                raise ParseError(f"binding {name!r} is never used", tok.line, tok.col)
        return prog

    def end_of_statement(self):
        if self.tok.kind not in ("NEWLINE", "EOF"):
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.line, self.tok.col)
        self.skip_newlines()

    def operator(self) -> str:
        op = self.advance()
        if self.tok.kind in ("NEWLINE", "EOF"):
            raise ParseError(f"operator {op.text!r} is missing its right operand", op.line, op.col)
        return op.text

    def expr(self):
        node = self.term()
        while self.tok.kind == "OP" and self.tok.text in "+-":
            op = self.operator()
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok.kind == "OP" and self.tok.text in "*/":
            op = self.operator()
            node = Binary(op, node, self.factor())
        return node

    def factor(self):
        node = self.base()
        if self.tok.kind == "OP" and self.tok.text == "^":
            self.advance()
            sign = 1.0
            if self.tok.kind == "OP" and self.tok.text == "-":
                self.advance()
                sign = -1.0
            num = self.expect("NUMBER")
            node = Pow(node, sign * float(num.text))
        return node

    def base(self):
        t = self.tok
        if t.kind == "OP" and t.text == "-":
            self.advance()
            return Unary("-", self.base())
        if t.kind == "OP" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect("OP", ")")
            return node
        if t.kind == "NUMBER":
            self.advance()
            return Num(complex(float(t.text)))
        if t.kind == "IDENT":
            self.advance()
            if t.text in FUNCTIONS:
                self.expect("OP", "(")
                if self.tok.kind == "OP" and self.tok.text == ")":
                    raise ArityError(f"{t.text} takes exactly one argument, got 0", t.line, t.col)
                arg = self.expr()
                if self.tok.kind == "OP" and self.tok.text == ",":
                    raise ArityError(f"{t.text} takes exactly one argument", t.line, t.col)
                self.expect("OP", ")")
                return Call(t.text, arg)
            if self.tok.kind == "OP" and self.tok.text == "(":
                raise UnknownIdentifierError(f"unknown function {t.text!r}", t.line, t.col)
            if t.text == "i":
                return Num(1j)
            if t.text in VARIABLES:
                return Var(t.text, t.line, t.col)
            if t.text in self.bound:
                self.used.add(t.text)
                return Var(t.text, t.line, t.col)
            raise UnknownIdentifierError(f"{t.text!r} is not a variable or let-binding", t.line, t.col)
        got = t.text if t.kind != "EOF" else "end of input"
        raise ParseError(f"unexpected {got!r}", t.line, t.col)


def parse(text: str) -> Program:
    """Parse metric source text into a validated :class:`Program`."""
    return _Parser(text).program(text)


def free_variables(node, lets: dict | None = None) -> set:
    """Coordinate names the expression depends on (through let-bindings too)."""
    lets = lets or {}
    if isinstance(node, Var):
        if node.name in lets:
            return free_variables(lets[node.name], lets)
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, Unary):
        return free_variables(node.arg, lets)
    if isinstance(node, Binary):
        return free_variables(node.left, lets) | free_variables(node.right, lets)
    if isinstance(node, Pow):
        return free_variables(node.base, lets)
    if isinstance(node, Call):
        return free_variables(node.arg, lets)
    raise TypeError(node)


def evaluate(prog: Program, env: dict, ops) -> object:
    """Evaluate ``prog`` with variable values ``env`` using backend ``ops``.

    ``ops`` supplies ``exp log sqrt conj pow`` so the same tree evaluates on
    jets and on plain complex numbers.
    """
    scope = dict(env)
    for name, expr in prog.lets:
        scope[name] = _eval(expr, scope, ops)
    return _eval(prog.body, scope, ops)


def _eval(node, scope, ops):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return scope[node.name]
    if isinstance(node, Unary):
        return -_eval(node.arg, scope, ops)
    if isinstance(node, Binary):
        a = _eval(node.left, scope, ops)
        b = _eval(node.right, scope, ops)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Pow):
        return ops.pow(_eval(node.base, scope, ops), node.exponent)
    if isinstance(node, Call):
        x = _eval(node.arg, scope, ops)
        if node.func == "abs2":
            return x * ops.conj(x)
        if node.func == "re":
            return (x + ops.conj(x)) / 2
        if node.func == "im":
            return (x - ops.conj(x)) / 2j
        return getattr(ops, node.func)(x)
    raise TypeError(node)
