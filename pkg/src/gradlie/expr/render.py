"""Render expressions as text accepted by :func:`gradlie.expr.parse`."""

from __future__ import annotations

from fractions import Fraction

from .core import Add, Apply, Expr, Func, Mul, Num, Pow, Quad, Symbol

_ADD, _MUL, _POW, _ATOM = 1, 2, 4, 5


def _num(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _prec(e: Expr) -> int:
    if isinstance(e, Add):
        return _ADD
    if isinstance(e, Mul):
        return _MUL
    if isinstance(e, Num):
        if e.value < 0:
            return _ADD
        return _ATOM if e.value.denominator == 1 else _MUL
    if isinstance(e, Pow):
        return _POW
    return _ATOM


def _wrap(e: Expr, min_prec: int) -> str:
    text = render(e)
    return f"({text})" if _prec(e) < min_prec else text


def _negated(e: Expr):
    """Return -e if ``e`` carries a negative numeric coefficient, else None."""
    if isinstance(e, Num) and e.value < 0:
        return Num(-e.value)
    if isinstance(e, Mul) and isinstance(e.factors[0], Num) and e.factors[0].value < 0:
        c = -e.factors[0].value
        rest = e.factors[1:]
        if c == 1:
            return rest[0] if len(rest) == 1 else Mul(rest)
        return Mul((Num(c),) + rest)
    return None


def render(e: Expr) -> str:
    if isinstance(e, Num):
        return _num(e.value)
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Add):
        parts = [render(e.terms[0])]
        for term in e.terms[1:]:
            neg = _negated(term)
            if neg is not None:
                parts.append(" - " + _wrap(neg, _MUL + 1 if isinstance(neg, Add) else _MUL))
            else:
                parts.append(" + " + render(term))
        return "".join(parts)
    if isinstance(e, Mul):
        fs = list(e.factors)
        prefix = ""
        if isinstance(fs[0], Num):
            c = fs.pop(0).value
            if c == -1:
                prefix = "-"
            else:
                prefix = _num(c) + "*"
        body = "*".join(_wrap(f, _POW) for f in fs)
        return prefix + body
    if isinstance(e, Pow):
        base = _wrap(e.base, _ATOM)
        x = e.exp
        if isinstance(x, Num) and x.value.denominator == 1:
            return f"{base}^{_num(x.value)}"
        if isinstance(x, (Symbol, Func, Apply)):
            return f"{base}^{render(x)}"
        return f"{base}^({render(x)})"
    if isinstance(e, Func):
        return f"{e.name}({render(e.arg)})"
    if isinstance(e, Apply):
        args = ", ".join(render(a) for a in e.args)
        if any(e.index):
            idx = ",".join(str(i) for i in e.index)
            return f"{e.name}[{idx}]({args})"
        return f"{e.name}({args})"
    if isinstance(e, Quad):
        return (
            f"quad({render(e.integrand)}, {e.var.name}, "
            f"{render(e.lower)}, {render(e.upper)})"
        )
    raise TypeError(f"cannot render {type(e).__name__}")
