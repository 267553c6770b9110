from fractions import Fraction as F

import numpy as np
import pytest
from scipy.special import erf

from gradlie.expr import DomainError, is_zero
from gradlie.numerics import integrate_ode, pde_residual_fd
from gradlie.pde import check_invariance
from gradlie.reduce import (
    bernoulli_closed_form, exact_solution, hodograph_1d, invert_sampled, radial_algebra,
    radial_hodograph, radial_pde, radial_reduce, read_profile, reduce_to_ode,
)


@pytest.mark.parametrize("k", [1, -1, F(1, 2)])
def test_radial_reduction(k):
    assert radial_reduce(k).witness.zero


def test_radial_reduction_negative_branch():
    assert radial_reduce(2, sign=-1).witness.zero


@pytest.mark.parametrize("k", [0, F(-1, 2)])
def test_radial_reduction_exclusions(k):
    with pytest.raises(ValueError):
        radial_reduce(k)


@pytest.mark.parametrize("k", [1, F(-1, 3), 2])
def test_radial_algebra_admitted(k):
    ops = radial_algebra(k)
    assert set(ops) == {"X0", "X1", "D0", "D1"}
    for X in ops.values():
        assert check_invariance(radial_pde(k), X).passed


@pytest.mark.parametrize("case,k,lam", [
    ("i", 1, 0), ("i", F(1, 2), 0), ("iii", 1, 2), ("iii", F(-1, 3), 1), ("iii-l0", 1, 0),
    ("iii-l0", 2, 0), ("iv", 1, 3), ("iv", F(1, 2), -2),
])
def test_reductions_match_printed(case, k, lam):
    rc = reduce_to_ode(case, k, lam)
    assert rc.reduces.zero and rc.matches_printed


def test_case_iii_display():
    assert reduce_to_ode("iii", 1, 2).ode_string() == "-phi*phi'^-2 + 1/2*omega*phi'^-1 + 3*phi'' + phi'*omega^-1 = 0"


def test_case_iii_l0_display():
    assert reduce_to_ode("iii-l0", 1).ode_string() == "phi' - 32*phi^3 = 0"


@pytest.mark.parametrize("k,lam", [(2, 0), (1, 3), (F(1, 2), 0)])
def test_case_ii_discrepancy_is_reported(k, lam):
    rc = reduce_to_ode("ii", k, lam)
    assert rc.reduces.zero
    assert not rc.matches_printed
    assert "omega" in rc.as_dict()["discrepancy"]


@pytest.mark.parametrize("case,k,lam", [("i", 0, 0), ("ii", -1, 0), ("iii", 1, 0), ("iv", 1, 0)])
def test_reduction_exclusions(case, k, lam):
    with pytest.raises(ValueError):
        reduce_to_ode(case, k, lam)


def test_bernoulli_matches_hand_solution():
    b = bernoulli_closed_form(-2, 0)
    w = np.array([1.0, 2.0, 3.0])
    assert np.allclose(b.phi(w), 2 * 5 ** 0.25 * np.sqrt(w), atol=1e-9)


@pytest.mark.parametrize("k,C1", [(-2, 0), (-2, 1), (F(1, 2), 6), (2, 20)])
def test_bernoulli_agrees_with_integration(k, C1):
    b = bernoulli_closed_form(k, C1, omega_range=(0.9, 2.1))
    assert b.checks["linearized"].zero and b.checks["derived_ode"].zero
    assert not b.checks["printed_ode"].zero
    rc = reduce_to_ode("ii", k, 0)
    s = np.linspace(1, 2, 21)
    tr = integrate_ode(rc.rhs_function(), [b.phi(1.0), b.dphi(1.0)], (1, 2), tol=1e-10, s_eval=s)
    assert tr.ok
    assert max(abs(tr.at(v)[0] - b.phi(v)) for v in s) <= 1e-6


def test_bernoulli_domain_error_outside_mesh():
    b = bernoulli_closed_form(-2, 0, omega_range=(1, 2))
    with pytest.raises(DomainError):
        b.phi(5.0)


def test_family_4_15_convergence():
    sol = exact_solution("4-15", k=-2, C1=0, omega_range=(0.8, 3.2))
    rep = pde_residual_fd(sol.evaluate, radial_pde(-2), (1, 2), [(1, 2)], 0.05)
    assert 3.5 <= rep.ratio <= 4.5


@pytest.mark.parametrize("sign", [1, -1])
def test_family_4_16_first_integral(sign):
    sol = exact_solution("4-16", lam=1, C2=1, sign=sign)
    assert sol.checks["first_integral"].zero
    assert ("reduced_ode" in sol.checks) == (sign > 0)
    assert all(c.zero for c in sol.checks.values())


def test_family_4_17_adjudication():
    out = {}
    for variant in ("derived", "printed"):
        e = exact_solution("4-17", lam=1, C2=1, variant=variant)
        rep = pde_residual_fd(lambda t, r: e.evaluate(t, r, strict=False), radial_pde(F(-1, 3)),
                              (0, 0.5), [(0.2, 0.8)], 0.05, levels=3)
        out[variant] = rep
        assert e.checks["radial_residual"].zero == (variant == "derived")
    assert 3.5 <= out["derived"].ratio <= 4.5
    stalled = out["printed"].levels
    assert abs(stalled[0].max_residual / stalled[-1].max_residual - 1) < 0.1


@pytest.mark.parametrize("k", [1, 2, F(1, 2)])
def test_family_4_11_closed(k):
    sol = exact_solution("4-11-closed", k=k)
    assert all(c.zero for c in sol.checks.values())


def test_profile_roundtrip(tmp_path):
    sol = exact_solution("4-11-closed", k=1)
    t, r = np.meshgrid([0.0, 0.01], [1.0, 1.5, 2.0], indexing="ij")
    path = tmp_path / "p.tsv"
    sol.write_profile(path, t, r)
    rows = read_profile(path)
    assert rows.shape == (6, 3)
    assert np.allclose(rows[:, 2], sol.evaluate(rows[:, 0], rows[:, 1]), rtol=0, atol=0)


def test_hodograph_maps_to_linear_equation():
    assert hodograph_1d().check.verdict.zero
    h = hodograph_1d("u")
    assert h.check.verdict.zero
    assert is_zero(h.linear_residual("exp(-t)*u"))


def test_hodograph_example_solution():
    h = hodograph_1d("u")
    rep = pde_residual_fd(lambda t, x: np.exp(t) * x, h.source, (0, 1), [(1, 2)], 0.05)
    inv = h.inverse_of("exp(-t)*u", (-10, 10))
    assert np.allclose(inv(np.array([0.5, 1.0]), np.array([1.0, 2.0])), np.exp([0.5, 1.0]) * [1, 2])
    assert 3.5 <= rep.ratio <= 4.5


def test_hodograph_rejects_non_monotone():
    inv = hodograph_1d("0").inverse_of("u^2 + 2*t", (-1, 1))
    with pytest.raises(ValueError):
        inv(0.5, 1.0)


def test_sampled_inversion_of_error_function_profile():
    h = hodograph_1d("0")
    w = lambda t, u: u + erf(u / (2 * np.sqrt(t)))  # noqa: E731
    f = invert_sampled(w, np.linspace(-3, 3, 2001))
    rep = pde_residual_fd(f, h.source, (0.5, 1.0), [(-1, 1)], 0.05)
    assert 3.5 <= rep.ratio <= 4.5


def test_radial_hodograph():
    rh = radial_hodograph()
    assert rh.check.verdict.zero
    assert is_zero(rh.linear_residual("exp(t)*sin(z)"))
    U = rh.solution_from("exp(t)*sin(z)", (1e-12, np.pi / 2))
    assert np.allclose(U(0.5, 1.0), np.arcsin(np.exp(-0.5)))
    rep = pde_residual_fd(U, radial_pde(-1), (0, 0.5), [(0.3, 0.7)], 0.05)
    assert 3.5 <= rep.ratio <= 4.5


def test_radial_hodograph_constant_level():
    U = radial_hodograph().solution_from("2 + z", (0, 1))
    assert np.allclose(U(0.3, np.sqrt(2.5)), 0.5)
