"""Recursive-descent parser for the expression grammar.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | call | IDENT | '(' expr ')'
    call   := IDENT ("'"* | '[' INT (',' INT)* ']')? '(' expr (',' expr)* ')'

Identifiers are ``[A-Za-z][A-Za-z0-9_]*``.  ``t, x, x1, x2, r, z`` are base
variables, ``u`` and ``u_<vars>`` (e.g. ``u_xx``, ``u_tx1``) are jet
coordinates, everything else is a parameter.  Calls resolve to the elementary
functions ``exp, log, sin, cos, sqrt``, to ``quad(integrand, var, lo, hi)``, or
to a declared opaque function; ``D'(u_x)`` and ``f[0,1](t, x)`` denote
partial derivatives of opaque functions.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

from .core import (
    BASE,
    JET,
    PARAM,
    Expr,
    Num,
    Symbol,
    add,
    apply,
    func,
    mul,
    power,
    quad,
    var_order,
)

BASE_NAMES = ("t", "x", "x1", "x2", "r", "z")
DEFAULT_FUNCTIONS = frozenset(
    {"D", "Q", "f", "g", "h", "w", "phi", "U", "V", "W0", "xi0", "xi1", "xi2", "eta"}
)

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<id>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^(),\[\]']))"
)


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def jet_symbol(index: Iterable[str] = ()) -> Symbol:
    """The jet coordinate of ``u`` differentiated by the given base variables."""
    idx = tuple(sorted(index, key=var_order))
    name = "u" if not idx else "u_" + "".join(idx)
    return Symbol(name, JET, idx)


def base_symbol(name: str) -> Symbol:
    return Symbol(name, BASE)


def _split_suffix(suffix: str):
    out = []
    names = sorted(BASE_NAMES, key=len, reverse=True)
    i = 0
    while i < len(suffix):
        for n in names:
            if suffix.startswith(n, i):
                out.append(n)
                i += len(n)
                break
        else:
            return None
    return out


def symbol(name: str) -> Symbol:
    """Resolve an identifier by the naming convention."""
    if name in BASE_NAMES:
        return base_symbol(name)
    if name == "u":
        return jet_symbol(())
    if name.startswith("u_"):
        parts = _split_suffix(name[2:])
        if parts:
            return jet_symbol(parts)
    return Symbol(name, PARAM)


def symbols(names: str) -> tuple[Symbol, ...]:
    return tuple(symbol(n) for n in names.replace(",", " ").split())


class _Parser:
    def __init__(self, text: str, functions, names):
        self.text = text
        self.functions = functions
        self.names = names
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, pos = self.peek()
        if kind is not None:
            raise ParseError(f"unexpected token {val!r}", pos)
        return e

    def expr(self):
        e = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                e = add(e, rhs) if val == "+" else add(e, mul(-1, rhs))
            else:
                return e

    def term(self):
        e = self.unary()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.unary()
                if val == "*":
                    e = mul(e, rhs)
                else:
                    try:
                        e = mul(e, power(rhs, -1))
                    except ZeroDivisionError:
                        raise ParseError("division by zero", pos) from None
            else:
                return e

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.unary()
            return inner if val == "+" else mul(-1, inner)
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            ex = self.unary()
            try:
                return power(base, ex)
            except ZeroDivisionError:
                raise ParseError("0 raised to a negative power", pos) from None
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(Fraction(val))
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "id":
            nk, nv, _ = self.peek()
            if nk == "op" and nv in ("(", "'", "["):
                return self.call(val, pos)
            if val in self.names:
                return self.names[val]
            return symbol(val)
        if kind is None:
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)

    def call(self, name, pos):
        primes = 0
        index = None
        while self.peek()[:2] == ("op", "'"):
            self.take()
            primes += 1
        if self.peek()[:2] == ("op", "["):
            self.take()
            index = []
            while True:
                k, v, p = self.take()
                if k != "num" or "." in v:
                    raise ParseError("expected integer derivative index", p)
                index.append(int(v))
                k, v, p = self.take()
                if (k, v) == ("op", "]"):
                    break
                if (k, v) != ("op", ","):
                    raise ParseError("expected ',' or ']'", p)
        self.expect("(")
        args = [self.expr()]
        while self.peek()[:2] == ("op", ","):
            self.take()
            args.append(self.expr())
        self.expect(")")
        if name in ("exp", "log", "sin", "cos", "sqrt") and not primes and index is None:
            if len(args) != 1:
                raise ParseError(f"{name} takes one argument", pos)
            if name == "sqrt":
                return power(args[0], Fraction(1, 2))
            try:
                return func(name, args[0])
            except ValueError as exc:
                raise ParseError(str(exc), pos) from None
        if name == "quad" and not primes and index is None:
            if len(args) != 4 or not isinstance(args[1], Symbol):
                raise ParseError("quad(integrand, var, lower, upper) expected", pos)
            return quad(args[0], args[1], args[2], args[3])
        if name not in self.functions:
            raise ParseError(f"unknown function name {name!r}", pos)
        if primes:
            if len(args) != 1:
                raise ParseError("prime notation needs a single argument", pos)
            index = [primes]
        if index is not None and len(index) != len(args):
            raise ParseError("derivative index does not match arguments", pos)
        return apply(name, args, index)


def parse(
    text: str,
    functions: Iterable[str] | None = None,
    names: Mapping[str, Expr] | None = None,
) -> Expr:
    """Parse ``text`` into a normalized expression.

    Parameters
    ----------
    functions
        Extra opaque function names accepted on top of the defaults.
    names
        Identifier overrides, e.g. ``{"k": Num(2)}`` to instantiate a parameter.
    """
    fnames = DEFAULT_FUNCTIONS | frozenset(functions or ())
    return _Parser(text, fnames, dict(names or {})).parse()
