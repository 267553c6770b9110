"""Symbolic expression kernel."""

from .core import (
    BASE,
    JET,
    ONE,
    PARAM,
    ZERO,
    Add,
    Apply,
    Expr,
    Func,
    Mul,
    Num,
    Pow,
    Quad,
    Symbol,
    add,
    applications,
    apply,
    as_expr,
    contains_func,
    cos,
    diff,
    exp,
    expand,
    log,
    mul,
    normalize,
    power,
    quad,
    sin,
    substitute,
)
from .evaluate import (
    DomainError,
    SamplerConfig,
    ZeroTest,
    compile_expr,
    evaluate,
    is_zero,
    lambdify,
)
from .parser import ParseError, base_symbol, jet_symbol, parse, symbol, symbols
from .render import render

__all__ = [
    "BASE", "JET", "ONE", "PARAM", "ZERO",
    "Add", "Apply", "Expr", "Func", "Mul", "Num", "Pow", "Quad", "Symbol",
    "add", "applications", "apply", "as_expr", "contains_func", "cos", "diff",
    "exp", "expand", "log", "mul", "normalize", "power", "quad", "sin", "substitute",
    "DomainError", "SamplerConfig", "ZeroTest", "compile_expr", "evaluate",
    "is_zero", "lambdify",
    "ParseError", "base_symbol", "jet_symbol", "parse", "symbol", "symbols",
    "render",
]
