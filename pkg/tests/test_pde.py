from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradlie.expr import Num, add, is_zero, mul, parse, substitute, symbol
from gradlie.jet import JetSpace, VectorField
from gradlie.pde import (
    EquivTransform, PdeSpec, apply_equivalence, apply_form_preserving, check_invariance,
    coefficient_ode, determining_system, invariance_expression, solve_coefficient_ode,
    verify_transform,
)

J1, J2 = JetSpace(), JetSpace.of_dimension(2)


def field(J, **c):
    return VectorField.from_components(J, **c)


@pytest.mark.parametrize("n", [1, 2])
def test_translations_always_admitted(n):
    J = JetSpace.of_dimension(n)
    pde = PdeSpec.opaque(n)
    for v in J.base:
        assert check_invariance(pde, field(J, **{v: "1"})).passed


def test_rotation_admitted_in_the_plane():
    assert check_invariance(PdeSpec.opaque(2), field(J2, x1="x2", x2="-x1")).passed


def test_source_shift_for_linear_source():
    assert check_invariance(PdeSpec(1, "D(u_x)", "u"), field(J1, u="exp(t)")).passed


def test_rejects_non_symmetry_with_witness():
    rep = check_invariance(PdeSpec(1, "u_x", "u^3"), field(J1, t="t", u="u"))
    assert not rep.passed and rep.witness is not None


def test_scaling_depends_on_source_power():
    X = field(J1, t="t", u="-u")
    assert not check_invariance(PdeSpec(1, "u_x", "u^3"), X).passed
    assert check_invariance(PdeSpec(1, "u_x", "u^2"), X).passed


@given(st.fractions(-3, 3, max_denominator=4), st.fractions(-3, 3, max_denominator=4))
def test_invariance_expression_is_linear_in_the_field(a, b):
    pde = PdeSpec(1, "u_x^2", "u^3")
    X, Y = field(J1, t="t^2", x="x", u="u"), field(J1, t="1", u="exp(t)*u")
    lhs = invariance_expression(pde, a * X + b * Y)
    rhs = add(mul(a, invariance_expression(pde, X)), mul(b, invariance_expression(pde, Y)))
    assert is_zero(add(lhs, mul(-1, rhs)))


def test_determining_system_matches_printed():
    ds = determining_system()
    assert ds.coefficient_match.zero and ds.remainder_match.zero
    assert ds.coefficient_match.exact and ds.remainder_match.exact
    assert "single sum" in ds.reading


@pytest.mark.parametrize("e,branch", [
    ((0, 1, 0, -2), "ii"), ((3, 0, 0, 2), "iii"), ((0, 0, 0, 0), "i"),
    ((1, 2, 1, 3), "iv"), ((0, 0, 1, 3), "v"), ((0, 0, 1, 0), "v"),
])
def test_coefficient_ode_branches(e, branch):
    sol = solve_coefficient_ode(*e)
    assert sol.branch == branch
    if not sol.arbitrary:
        assert is_zero(coefficient_ode(*e, sol.D))


def test_branch_v_exponent_is_reported():
    sol = solve_coefficient_ode(0, 0, 2, 3)
    assert "e3/e2" in sol.note
    assert is_zero(coefficient_ode(0, 0, 2, 3, sol.D))


def test_equivalence_normalizes_quadratic_source():
    g = EquivTransform(1, 2, 8)
    out = apply_equivalence(PdeSpec(1, "u_x", "8*u^2"), g)
    assert is_zero(add(out.Q, parse("-u^2")))


def test_identity_transform():
    pde = PdeSpec(1, "u_x^2", "u^3")
    out = apply_equivalence(pde, EquivTransform())
    assert out.D == pde.D and out.Q == pde.Q


def test_time_reflection_negates_both():
    out = apply_equivalence(PdeSpec(1, "D(u_x)", "Q(u)"), EquivTransform(t_reflection=True))
    assert out.D == parse("-D(u_x)") and out.Q == parse("-Q(u)")


@pytest.mark.parametrize("src", [PdeSpec(1, "u_x^2", "u^3"), PdeSpec(2, "exp(-W)", "u^3")])
def test_equivalence_pullback(src):
    g = EquivTransform(2, 3, 5, (1, 2, 0, 7))
    tg = apply_equivalence(src, g)
    assert verify_transform(src, tg, g.point_transform(src.n)).verdict.zero


ratios = st.fractions(F(1, 3), 3, max_denominator=4).filter(lambda v: v != 0)


@given(ratios, ratios, ratios, ratios, ratios, ratios)
def test_equivalence_is_a_group_action(a1, b1, c1, a2, b2, c2):
    g1 = EquivTransform(a1, b1, c1, (0, 0, 0, 1))
    g2 = EquivTransform(a2, b2, c2, (0, 0, 0, -2))
    pde = PdeSpec(1, "u_x^2 + u_x", "u^3 - u")
    step = apply_equivalence(apply_equivalence(pde, g1), g2)
    once = apply_equivalence(pde, g2.compose(g1))
    assert is_zero(add(step.D, mul(-1, once.D))) and is_zero(add(step.Q, mul(-1, once.Q)))


@pytest.mark.parametrize("k", [F(-3), F(1, 2), F(2)])
def test_row_five_maps_to_row_four(k):
    src = PdeSpec(1, parse("u_x^k", names={"k": Num(k)}), parse("u^(k+1) + u", names={"k": Num(k)}))
    res = apply_form_preserving(src, "3-0b", k=k, eps2=1)
    assert res.check.verdict.zero
    assert is_zero(add(res.target.Q, mul(-1, parse("u^(k+1)", names={"k": Num(k)}))))


def test_form_preserving_conjugates_generators():
    k = F(3)
    src = PdeSpec(1, "u_x^3", "u^4 + u")
    res = apply_form_preserving(src, "3-0b", k=k, eps2=1)
    X = field(J1, t="exp(-3*t)", u="exp(-3*t)*u")
    assert check_invariance(src, X).passed
    assert check_invariance(res.target, res.pushforward(X)).passed


def test_constant_source_removal():
    res = apply_form_preserving(PdeSpec(1, "D(u_x)", "q"), "3-0a")
    assert res.target.Q == Num(0) and res.check.verdict.zero


@pytest.mark.parametrize("Q,eps2,target", [("2/u - u", -1, "2/u"), ("3*u", 3, "0")])
def test_planar_map_removes_linear_source(Q, eps2, target):
    res = apply_form_preserving(PdeSpec(2, "W^-1", Q), "6", k=-1, eps2=eps2)
    assert res.check.verdict.zero
    assert is_zero(add(res.target.Q, mul(-1, parse(target))))


def test_form_preserving_rejects_bad_parameters():
    with pytest.raises(ValueError):
        apply_form_preserving(PdeSpec(1, "u_x^2", "u^3 + u"), "3-0b", k=0, eps2=1)
    with pytest.raises(ValueError):
        apply_form_preserving(PdeSpec(1, "u_x^2", "u^3 + u"), "6", k=2, eps2=1)


def test_substituting_parameters():
    pde = PdeSpec(1, "u_x^k", "e1*u").subs({symbol("k"): Num(2), symbol("e1"): Num(-1)})
    assert pde.D == parse("u_x^2") and substitute(pde.Q, {}) == parse("-u")
