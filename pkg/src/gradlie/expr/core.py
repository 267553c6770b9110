"""Immutable expression trees with canonicalizing constructors.

Every node is built through the module-level constructors (``add``, ``mul``,
``power``, ...), which flatten, fold rational constants, collect like terms
and sort operands by a structural key.  A tree produced this way is in normal
form, so rebuilding it is a no-op and structural equality is meaningful.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

BASE = "base"
JET = "jet"
PARAM = "param"

ELEMENTARY = ("exp", "log", "sin", "cos")


def var_order(name: str) -> tuple:
    """Sort key for base variables: time first, then spatial names."""
    return (0, name) if name == "t" else (1, name)


class Expr:
    __slots__ = ("_key", "_hash", "_free")

    rank = -1

    def _make_key(self) -> tuple:
        raise NotImplementedError

    @property
    def key(self) -> tuple:
        try:
            return self._key
        except AttributeError:
            self._key = self._make_key()
            return self._key

    def __hash__(self) -> int:
        try:
            return self._hash
        except AttributeError:
            self._hash = hash(self.key)
            return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return hash(self) == hash(other) and self.key == other.key

    def __ne__(self, other) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    @property
    def children(self) -> tuple:
        return ()

    @property
    def free_symbols(self) -> frozenset:
        try:
            return self._free
        except AttributeError:
            out = frozenset()
            for c in self.children:
                out |= c.free_symbols
            self._free = out
            return out

    # arithmetic sugar
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return add(self, mul(-1, other))

    def __rsub__(self, other):
        return add(other, mul(-1, self))

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return mul(self, power(other, -1))

    def __rtruediv__(self, other):
        return mul(other, power(self, -1))

    def __pow__(self, other):
        return power(self, other)

    def __rpow__(self, other):
        return power(other, self)

    def __neg__(self):
        return mul(-1, self)

    def __repr__(self) -> str:
        from .render import render

        return f"Expr({render(self)!r})"

    def __str__(self) -> str:
        from .render import render

        return render(self)


class Num(Expr):
    __slots__ = ("value",)
    rank = 0

    def __init__(self, value):
        self.value = Fraction(value)

    def _make_key(self):
        return (0, self.value)

    @property
    def free_symbols(self):
        return frozenset()


class Symbol(Expr):
    """A named leaf.

    Jet coordinates carry ``index``, the sorted tuple of base variables the
    dependent variable is differentiated by (``()`` for ``u`` itself).
    """

    __slots__ = ("name", "kind", "index")
    rank = 1

    def __init__(self, name: str, kind: str = PARAM, index: tuple = ()):
        self.name = name
        self.kind = kind
        self.index = tuple(index)

    def _make_key(self):
        return (1, self.name, self.kind)

    @property
    def free_symbols(self):
        try:
            return self._free
        except AttributeError:
            self._free = frozenset((self,))
            return self._free

    @property
    def order(self) -> int:
        return len(self.index)


class Apply(Expr):
    """Opaque function application ``name[index](args)``.

    ``index`` counts partial derivatives taken with respect to each argument
    slot, so mixed partials commute by construction.
    """

    __slots__ = ("name", "args", "index")
    rank = 2

    def __init__(self, name: str, args: tuple, index: tuple):
        self.name = name
        self.args = args
        self.index = index

    def _make_key(self):
        return (2, self.name, self.index, tuple(a.key for a in self.args))

    @property
    def children(self):
        return self.args


class Func(Expr):
    __slots__ = ("name", "arg")
    rank = 3

    def __init__(self, name: str, arg: Expr):
        self.name = name
        self.arg = arg

    def _make_key(self):
        return (3, self.name, self.arg.key)

    @property
    def children(self):
        return (self.arg,)


class Pow(Expr):
    __slots__ = ("base", "exp")
    rank = 4

    def __init__(self, base: Expr, exp: Expr):
        self.base = base
        self.exp = exp

    def _make_key(self):
        return (4, self.base.key, self.exp.key)

    @property
    def children(self):
        return (self.base, self.exp)


class Mul(Expr):
    __slots__ = ("factors",)
    rank = 5

    def __init__(self, factors: tuple):
        self.factors = factors

    def _make_key(self):
        return (5, tuple(f.key for f in self.factors))

    @property
    def children(self):
        return self.factors


class Add(Expr):
    __slots__ = ("terms",)
    rank = 6

    def __init__(self, terms: tuple):
        self.terms = terms

    def _make_key(self):
        return (6, tuple(t.key for t in self.terms))

    @property
    def children(self):
        return self.terms


class Quad(Expr):
    """Unevaluated definite integral of ``integrand`` d``var`` over [lower, upper].

    The integrand may depend on ``var`` only; the bounds are arbitrary.
    """

    __slots__ = ("integrand", "var", "lower", "upper")
    rank = 7

    def __init__(self, integrand: Expr, var: Symbol, lower: Expr, upper: Expr):
        self.integrand = integrand
        self.var = var
        self.lower = lower
        self.upper = upper

    def _make_key(self):
        return (7, self.integrand.key, self.var.key, self.lower.key, self.upper.key)

    @property
    def children(self):
        return (self.integrand, self.lower, self.upper)

    @property
    def free_symbols(self):
        try:
            return self._free
        except AttributeError:
            self._free = (
                (self.integrand.free_symbols - {self.var})
                | self.lower.free_symbols
                | self.upper.free_symbols
            )
            return self._free


ZERO = Num(0)
ONE = Num(1)
NEG_ONE = Num(-1)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not an expression")
    if isinstance(value, (int, Fraction)):
        return Num(value)
    if isinstance(value, float):
        return Num(Fraction(repr(value)))
    if isinstance(value, str):
        from .parser import parse

        return parse(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


def sort_key(e: Expr) -> tuple:
    return e.key


# ---------------------------------------------------------------- constructors


def _flatten(args: Iterable, cls):
    for a in args:
        a = as_expr(a)
        if isinstance(a, cls):
            yield from (a.terms if cls is Add else a.factors)
        else:
            yield a


def _split_coeff(e: Expr) -> tuple[Fraction, Expr]:
    if isinstance(e, Mul) and isinstance(e.factors[0], Num):
        rest = e.factors[1:]
        return e.factors[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return Fraction(1), e


def _with_coeff(c: Fraction, term: Expr) -> Expr:
    if c == 1:
        return term
    if isinstance(term, Mul):
        return Mul((Num(c),) + term.factors)
    return Mul((Num(c), term))


def add(*args) -> Expr:
    const = Fraction(0)
    coeffs: dict[Expr, Fraction] = {}
    for a in _flatten(args, Add):
        if isinstance(a, Num):
            const += a.value
            continue
        c, term = _split_coeff(a)
        coeffs[term] = coeffs.get(term, 0) + c
    terms = [_with_coeff(c, t) for t, c in coeffs.items() if c != 0]
    terms.sort(key=sort_key)
    if const != 0:
        terms.insert(0, Num(const))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Add(tuple(terms))


def mul(*args) -> Expr:
    coeff = Fraction(1)
    bases: dict[Expr, list] = {}
    exp_args = []
    for a in _flatten(args, Mul):
        if isinstance(a, Num):
            coeff *= a.value
            continue
        if isinstance(a, Func) and a.name == "exp":
            exp_args.append(a.arg)
            continue
        if isinstance(a, Pow):
            b, e = a.base, a.exp
        else:
            b, e = a, ONE
        bases.setdefault(b, []).append(e)
    if coeff == 0:
        return ZERO
    out = []
    refold = False
    if exp_args:
        merged = exp(add(*exp_args)) if len(exp_args) > 1 else Func("exp", exp_args[0])
        if not (isinstance(merged, Func) and merged.name == "exp"):
            refold = True
        out.append(merged)
    for b, exps in bases.items():
        if len(exps) == 1:
            p = b if exps[0] is ONE else power(b, exps[0])
        else:
            p = power(b, add(*exps))
        if isinstance(p, (Num, Mul)):
            refold = True
        out.append(p)
    if refold:
        return mul(Num(coeff), *out)
    out = [f for f in out if f != ONE]
    out.sort(key=sort_key)
    if coeff != 1:
        out.insert(0, Num(coeff))
    if not out:
        return Num(coeff)
    if len(out) == 1:
        return out[0]
    return Mul(tuple(out))


def _int_root(n: int, q: int):
    if n < 0:
        return None
    r = round(n ** (1.0 / q))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**q == n:
            return cand
    return None


def exact_root(value: Fraction, q: int):
    """Return value**(1/q) as a Fraction when it is rational, else None."""
    num = _int_root(value.numerator, q)
    den = _int_root(value.denominator, q)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def power(base, exponent) -> Expr:
    b = as_expr(base)
    e = as_expr(exponent)
    if isinstance(e, Num):
        v = e.value
        if v == 0:
            return ONE
        if v == 1:
            return b
        if isinstance(b, Num):
            bv = b.value
            if v.denominator == 1:
                if bv == 0 and v < 0:
                    raise ZeroDivisionError("0 raised to a negative power")
                return Num(bv ** int(v))
            if bv == 0:
                if v < 0:
                    raise ZeroDivisionError("0 raised to a negative power")
                return ZERO
            if bv == 1:
                return ONE
            if bv > 0:
                root = exact_root(bv, v.denominator)
                if root is not None:
                    return Num(root**v.numerator)
            return Pow(b, e)
        if isinstance(b, Pow):
            inner = b.exp
            if v.denominator == 1 or (
                isinstance(inner, Num) and inner.value.denominator != 1
            ):
                return power(b.base, mul(inner, e))
            return Pow(b, e)
        if isinstance(b, Mul) and v.denominator == 1:
            return mul(*(power(f, e) for f in b.factors))
        if isinstance(b, Func) and b.name == "exp":
            return exp(mul(b.arg, e))
        return Pow(b, e)
    if isinstance(b, Num) and b.value == 1:
        return ONE
    if isinstance(b, Pow) and isinstance(b.exp, Num) and b.exp.value.denominator != 1:
        return power(b.base, mul(b.exp, e))
    if isinstance(b, Func) and b.name == "exp":
        return exp(mul(b.arg, e))
    return Pow(b, e)


def _log_term(e: Expr):
    """Split ``c*log(x)`` into ``(c, x)``; None for other terms."""
    if isinstance(e, Func) and e.name == "log":
        return ONE, e.arg
    if isinstance(e, Mul) and len(e.factors) == 2 and isinstance(e.factors[0], Num):
        f = e.factors[1]
        if isinstance(f, Func) and f.name == "log":
            return e.factors[0], f.arg
    return None


def exp(arg) -> Expr:
    a = as_expr(arg)
    if a == ZERO:
        return ONE
    terms = a.terms if isinstance(a, Add) else (a,)
    logs = [_log_term(x) for x in terms]
    if any(lt is not None for lt in logs):
        rest = [x for x, lt in zip(terms, logs) if lt is None]
        powers = [power(x, c) for c, x in (lt for lt in logs if lt is not None)]
        return mul(exp(add(*rest)), *powers)
    return Func("exp", a)


def log(arg) -> Expr:
    a = as_expr(arg)
    if a == ONE:
        return ZERO
    if isinstance(a, Num) and a.value <= 0:
        raise ValueError("log of a non-positive constant")
    if isinstance(a, Func) and a.name == "exp":
        return a.arg
    return Func("log", a)


def sin(arg) -> Expr:
    a = as_expr(arg)
    if a == ZERO:
        return ZERO
    return Func("sin", a)


def cos(arg) -> Expr:
    a = as_expr(arg)
    if a == ZERO:
        return ONE
    return Func("cos", a)


_FUNCS = {"exp": exp, "log": log, "sin": sin, "cos": cos}


def func(name: str, arg) -> Expr:
    try:
        return _FUNCS[name](arg)
    except KeyError:
        raise ValueError(f"unknown elementary function {name!r}") from None


def apply(name: str, args: Sequence, index: Sequence[int] | None = None) -> Expr:
    args = tuple(as_expr(a) for a in args)
    if index is None:
        index = (0,) * len(args)
    index = tuple(int(i) for i in index)
    if len(index) != len(args):
        raise ValueError("derivative index length must match argument count")
    return Apply(name, args, index)


def quad(integrand, var: Symbol, lower, upper) -> Expr:
    integrand = as_expr(integrand)
    lower, upper = as_expr(lower), as_expr(upper)
    if lower == upper:
        return ZERO
    if integrand.free_symbols - {var}:
        raise ValueError("quadrature integrand may depend on its variable only")
    return Quad(integrand, var, lower, upper)


def rebuild(e: Expr, children: Sequence[Expr]) -> Expr:
    """Reconstruct ``e`` with new children through the normalizing constructors."""
    if isinstance(e, Add):
        return add(*children)
    if isinstance(e, Mul):
        return mul(*children)
    if isinstance(e, Pow):
        return power(children[0], children[1])
    if isinstance(e, Func):
        return func(e.name, children[0])
    if isinstance(e, Apply):
        return Apply(e.name, tuple(children), e.index)
    if isinstance(e, Quad):
        return quad(children[0], e.var, children[1], children[2])
    return e


def normalize(e: Expr) -> Expr:
    """Rebuild bottom-up; idempotent on constructor-built trees."""
    if isinstance(e, (Num, Symbol)):
        return e
    return rebuild(e, [normalize(c) for c in e.children])


# ---------------------------------------------------------------- calculus


@lru_cache(maxsize=200_000)
def diff(e: Expr, s: Symbol) -> Expr:
    """Partial derivative of ``e`` with respect to the symbol ``s``."""
    if s not in e.free_symbols:
        return ZERO
    if isinstance(e, Symbol):
        return ONE if e == s else ZERO
    if isinstance(e, Add):
        return add(*(diff(t, s) for t in e.terms))
    if isinstance(e, Mul):
        fs = e.factors
        terms = []
        for i, f in enumerate(fs):
            if s in f.free_symbols:
                terms.append(mul(*fs[:i], diff(f, s), *fs[i + 1 :]))
        return add(*terms)
    if isinstance(e, Pow):
        b, x = e.base, e.exp
        if s not in x.free_symbols:
            return mul(x, power(b, add(x, -1)), diff(b, s))
        return mul(e, add(mul(diff(x, s), log(b)), mul(x, diff(b, s), power(b, -1))))
    if isinstance(e, Func):
        d = diff(e.arg, s)
        if e.name == "exp":
            return mul(e, d)
        if e.name == "log":
            return mul(d, power(e.arg, -1))
        if e.name == "sin":
            return mul(cos(e.arg), d)
        if e.name == "cos":
            return mul(-1, sin(e.arg), d)
    if isinstance(e, Apply):
        terms = []
        for i, a in enumerate(e.args):
            if s in a.free_symbols:
                idx = list(e.index)
                idx[i] += 1
                terms.append(mul(Apply(e.name, e.args, tuple(idx)), diff(a, s)))
        return add(*terms)
    if isinstance(e, Quad):
        at_upper = substitute(e.integrand, {e.var: e.upper})
        at_lower = substitute(e.integrand, {e.var: e.lower})
        return add(
            mul(at_upper, diff(e.upper, s)), mul(-1, at_lower, diff(e.lower, s))
        )
    raise TypeError(f"cannot differentiate {type(e).__name__}")


def substitute(e, bindings: Mapping) -> Expr:
    """Simultaneous substitution; keys are Symbols or Apply nodes."""
    e = as_expr(e)
    bind = {k: as_expr(v) for k, v in bindings.items()}
    sym_keys = frozenset(k for k in bind if isinstance(k, Symbol))
    has_apply = any(isinstance(k, Apply) for k in bind)
    memo: dict = {}

    def go(node: Expr) -> Expr:
        if node in bind:
            return bind[node]
        if isinstance(node, (Num, Symbol)):
            return node
        if not has_apply and node.free_symbols.isdisjoint(sym_keys):
            return node
        try:
            return memo[node]
        except KeyError:
            pass
        if isinstance(node, Quad):
            inner = {k: v for k, v in bind.items() if k != node.var}
            out = quad(substitute(node.integrand, inner), node.var, go(node.lower), go(node.upper))
        else:
            out = rebuild(node, [go(c) for c in node.children])
        memo[node] = out
        return out

    return go(e)


def expand(e, force: bool = False) -> Expr:
    """Distribute products over sums and small positive integer powers.

    With ``force`` powers of products are split factor-wise for any exponent,
    which assumes the factors are positive.
    """
    e = as_expr(e)
    if isinstance(e, (Num, Symbol)):
        return e
    kids = [expand(c, force) for c in e.children]
    if isinstance(e, Mul):
        sums = [[k] if not isinstance(k, Add) else list(k.terms) for k in kids]
        out = [ONE]
        for group in sums:
            out = [mul(a, b) for a in out for b in group]
        return add(*out)
    if isinstance(e, Pow):
        b, x = kids
        if force and isinstance(b, Mul):
            return expand(mul(*(power(f, x) for f in b.factors)), force)
        if isinstance(b, Add) and isinstance(x, Num) and x.value.denominator == 1 and 1 < x.value <= 12:
            acc = b
            for _ in range(int(x.value) - 1):
                acc = expand(mul(acc, b), force)
            return acc
        p = power(b, x)
        if force and isinstance(p, Pow) and isinstance(p.base, Mul):
            return expand(p, force)
        return p if not isinstance(p, Mul) else expand(p, force)
    if isinstance(e, Add):
        return add(*kids)
    return rebuild(e, kids)


def applications(e: Expr, name: str | None = None) -> set:
    """All opaque applications occurring in ``e``."""
    found = set()

    def go(node):
        if isinstance(node, Apply) and (name is None or node.name == name):
            found.add(node)
        for c in node.children:
            go(c)

    go(as_expr(e))
    return found


def contains_func(e: Expr, names: Iterable[str] = ELEMENTARY) -> bool:
    names = set(names)
    if isinstance(e, Func) and e.name in names:
        return True
    return any(contains_func(c, names) for c in e.children)
