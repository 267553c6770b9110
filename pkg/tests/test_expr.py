from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradlie.expr import (
    DomainError, Num, ParseError, SamplerConfig, add, diff, evaluate, exp, is_zero, mul, normalize,
    parse, power, render, substitute, symbol,
)

u, ux, uxx, t, k = (symbol(n) for n in ("u", "u_x", "u_xx", "t", "k"))
W = symbol("W")
SYMS = (u, ux, t)


# ---------------------------------------------------------------- strategies

def _leaf():
    return st.one_of(
        st.sampled_from(SYMS),
        st.fractions(min_value=-5, max_value=5, max_denominator=7).map(Num),
    )


def _power(base, n):
    try:
        return power(base, n)
    except ZeroDivisionError:  # 0 to a negative power
        return base


def _extend(children):
    # exp only wraps leaves: nested exponentials overflow any fixed absolute tolerance
    return st.one_of(
        st.tuples(children, children).map(lambda p: add(*p)),
        st.tuples(children, children).map(lambda p: mul(*p)),
        st.tuples(children, st.integers(min_value=-2, max_value=3)).map(lambda p: _power(*p)),
        _leaf().map(lambda c: exp(mul(F(1, 4), c))),
    )


exprs = st.recursive(_leaf(), _extend, max_leaves=12)
polys = st.recursive(
    _leaf(),
    lambda ch: st.one_of(
        st.tuples(ch, ch).map(lambda p: add(*p)), st.tuples(ch, ch).map(lambda p: mul(*p))
    ),
    max_leaves=10,
)
points = st.fixed_dictionaries({s: st.fractions(F(1, 2), F(2), max_denominator=50) for s in SYMS})


def _eval(e, pt):
    try:
        return evaluate(e, pt)
    except (DomainError, ZeroDivisionError, OverflowError):
        return None


# ---------------------------------------------------------------- examples

def test_power_rule():
    assert is_zero(add(diff(parse("u_x^k"), ux), mul(-1, parse("k*u_x^(k-1)"))))


def test_opaque_chain_rule():
    assert render(diff(parse("D(u_x)*u_xx"), ux)) == "u_xx*D[1](u_x)"


def test_exp_derivative():
    assert diff(parse("exp(-u)"), u) == parse("-exp(-u)")


def test_manifold_substitution_annihilates():
    F_ = parse("u_t - D(u_x)*u_xx - Q(u)")
    assert substitute(F_, {symbol("u_t"): parse("D(u_x)*u_xx + Q(u)")}) == Num(0)


def test_parameter_instantiation():
    assert substitute(parse("u_x^k"), {k: Num(F(1, 2))}) == parse("u_x^(1/2)")


def test_gradient_substitution():
    e = substitute(W, {W: parse("u_x1^2 + u_x2^2")})
    assert e == parse("u_x1^2 + u_x2^2")


def test_is_zero_ring_identity_exact():
    r = is_zero(parse("u_x^2 - u_x*u_x"))
    assert r.zero and r.exact


def test_is_zero_reports_witness():
    r = is_zero(parse("u_x + 1"))
    assert not r.zero
    assert r.witness is not None and "u_x" in r.witness
    assert r.max_residual > 0


def test_is_zero_float_path_for_irrational_exponents():
    r = is_zero(parse("u_x^(1/2)*u_x^(1/2) - u_x"))
    assert r.zero


def test_is_zero_detects_small_transcendental_difference():
    assert not is_zero(parse("exp(u) - 1 - u - u^2/2"))


def test_is_zero_is_seeded():
    a = is_zero(parse("u^3 - u + t"), SamplerConfig(seed=3))
    b = is_zero(parse("u^3 - u + t"), SamplerConfig(seed=3))
    assert a.witness == b.witness


def test_parse_errors_report_position():
    with pytest.raises(ParseError):
        parse("u_x + * 2")


def test_domain_error_on_log_of_negative():
    with pytest.raises(DomainError):
        evaluate(parse("log(u)"), {u: F(-1)})


# ---------------------------------------------------------------- properties

@given(exprs)
def test_normalize_idempotent(e):
    assert normalize(normalize(e)) == normalize(e)


@given(exprs)
def test_render_parse_roundtrip(e):
    assert parse(render(e)) == e


@given(exprs, exprs, points)
def test_evaluation_is_a_homomorphism(a, b, pt):
    va, vb = _eval(a, pt), _eval(b, pt)
    if va is None or vb is None:
        return
    s, p = _eval(add(a, b), pt), _eval(mul(a, b), pt)
    if isinstance(va, F) and isinstance(vb, F):
        assert s == va + vb and p == va * vb
    else:
        assert abs(float(s) - float(va) - float(vb)) <= 1e-9 * (1 + abs(float(va)) + abs(float(vb)))
        assert abs(float(p) - float(va) * float(vb)) <= 1e-9 * (1 + abs(float(va) * float(vb)))


@given(exprs, exprs, st.fractions(-3, 3, max_denominator=5))
def test_diff_linear(a, b, c):
    lhs = diff(add(a, mul(c, b)), u)
    assert is_zero(add(lhs, mul(-1, diff(a, u)), mul(-c, diff(b, u))), SamplerConfig(n_samples=20))


@given(exprs, exprs)
def test_product_rule(a, b):
    lhs = diff(mul(a, b), ux)
    rhs = add(mul(diff(a, ux), b), mul(a, diff(b, ux)))
    assert is_zero(add(lhs, mul(-1, rhs)), SamplerConfig(n_samples=20))


@given(polys.filter(lambda e: e.free_symbols))
def test_nonzero_polynomials_are_detected(e):
    shifted = add(e, mul(e, e), 1)  # never identically zero: p + p^2 + 1 > 0 for real p
    assert not is_zero(shifted, SamplerConfig(n_samples=20))
