
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradlie.jet import JetSpace, VectorField
from gradlie.numerics import (
    GridField, PgmError, SolverError, edge_gradient, image_field, integrate_ode, parse_pgm,
    pde_residual_fd, perona_malik_filter, read_pgm, solve_pde_1d, solve_pde_2d, solve_radial,
    step_edge, to_bytes, transport_solution, write_pgm,
)
from gradlie.pde import PdeSpec
from gradlie.reduce import exact_solution

HEAT1 = PdeSpec(1, "1")
HEAT2 = PdeSpec(2, "1")


def heat1(t, x):
    return np.exp(-x**2 / (4 * t)) / np.sqrt(t)


def heat2(t, x, y):
    return np.exp(-(x**2 + y**2) / (4 * t)) / t


# ---------------------------------------------------------------- grid

def test_grid_is_immutable():
    g = GridField.sample(lambda t, x: x, 0.0, [(0, 1, 5)])
    with pytest.raises(ValueError):
        g.values[0] = 1.0


def test_grid_needs_three_nodes():
    with pytest.raises(ValueError):
        GridField(np.zeros(2), 1.0, 0.0)


def test_dirichlet_needs_boundary_function():
    with pytest.raises(ValueError):
        GridField(np.zeros(5), 1.0, 0.0, boundary="dirichlet")


# ---------------------------------------------------------------- ode

def test_dopri_exponential():
    tr = integrate_ode(lambda s, y: y, [1.0], (0, 1), tol=1e-9)
    assert tr.ok and abs(tr.y[-1][0] - np.e) <= 10 * 1e-9 * np.e


def test_dopri_hits_requested_abscissae():
    tr = integrate_ode(lambda s, y: [32 * y[0] ** 3], [0.1], (0, 0.1), s_eval=[0.05, 0.1])
    assert abs(tr.at(0.1)[0] - (100 - 64 * 0.1) ** -0.5) <= 1e-8


def test_dopri_reports_blow_up():
    tr = integrate_ode(lambda s, y: [y[0] ** 2], [1.0], (0, 2))
    assert not tr.ok and tr.status == "underflow"


@given(st.floats(-2, 2), st.floats(0.1, 2))
def test_dopri_linear_global_error(a, y0):
    tol = 1e-9
    tr = integrate_ode(lambda s, y: a * y, [y0], (0, 1), tol=tol)
    exact = y0 * np.exp(a)
    assert abs(tr.y[-1][0] - exact) <= 10 * tol * max(1.0, abs(exact)) * 10


# ---------------------------------------------------------------- residual oracle

def test_fd_oracle_heat_kernel():
    rep = pde_residual_fd(heat1, HEAT1, (1, 2), [(-2, 2)], 0.1)
    assert 3.5 <= rep.ratio <= 4.5


def test_fd_oracle_linear_candidate():
    rep = pde_residual_fd(lambda t, x: np.exp(t) * x, PdeSpec(1, "u_x^-2", "u"), (0, 1), [(1, 2)], 0.05)
    # differences in x are exact; what remains is the time truncation
    assert rep.max_residual < 1e-3 and 3.5 <= rep.ratio <= 4.5


def test_fd_oracle_excludes_domain_violations():
    with np.errstate(invalid="ignore"):
        rep = pde_residual_fd(lambda t, x: np.sqrt(x), HEAT1, (0, 1), [(-0.5, 1)], 0.1)
    assert rep.levels[0].excluded > 0


def test_fd_oracle_two_dimensional():
    rep = pde_residual_fd(heat2, HEAT2, (1, 1.5), [(-1, 1), (-1, 1)], 0.1)
    assert 3.5 <= rep.ratio <= 4.5


# ---------------------------------------------------------------- solvers

def test_heat_1d_converges_at_second_order():
    errs = []
    for n in (41, 81, 161):
        out = solve_pde_1d(HEAT1, GridField.sample(heat1, 1.0, [(-8, 8, n)]), 0.5)
        errs.append(np.max(np.abs(out.values - heat1(1.5, out.axes()[0]))))
    assert 3.5 <= errs[1] / errs[2] <= 4.5


def test_heat_2d_converges_at_second_order():
    errs = []
    for n in (41, 81):
        out = solve_pde_2d(HEAT2, GridField.sample(heat2, 1.0, [(-8, 8, n), (-8, 8, n)]), 0.5)
        X, Y = out.mesh()
        errs.append(np.max(np.abs(out.values - heat2(1.5, X, Y))))
    assert 3.5 <= errs[0] / errs[1] <= 4.5


@pytest.mark.parametrize("D", ["W^2", "exp(-W)", "(1 + W)^-1"])
def test_constant_data_unchanged(D):
    g = GridField(np.full((9, 9), 0.3), 0.1, 0.0)
    out = solve_pde_2d(PdeSpec(2, D), g, 0.1)
    assert np.array_equal(out.values, g.values)


def test_two_dimensional_agrees_with_radial():
    f0 = lambda r: np.exp(-r**2)  # noqa: E731
    rad = solve_radial(1, GridField.sample(lambda t, r: f0(r), 0.0, [(0, 3, 1201)]), 0.05)
    errs = []
    for n in (41, 81):
        g = GridField.sample(lambda t, x, y: f0(np.hypot(x, y)), 0.0, [(-2, 2, n), (-2, 2, n)])
        out = solve_pde_2d(PdeSpec(2, "W"), g, 0.05)
        X, Y = out.mesh()
        R = np.hypot(X, Y)
        m = (R > 0.2) & (R < 1.2)
        errs.append(np.max(np.abs(out.values[m] - np.interp(R[m], rad.axes()[0], rad.values))))
    assert errs[1] < errs[0] < 2e-3


def test_dirichlet_solve_of_hodograph_example():
    pde = PdeSpec(1, "u_x^-2", "u")
    exact = lambda t, x: np.exp(t) * x  # noqa: E731
    g = GridField.sample(exact, 0.0, [(1, 2, 21)], boundary="dirichlet", boundary_fn=exact)
    out = solve_pde_1d(pde, g, 0.2)
    assert np.max(np.abs(out.values - exact(0.2, out.axes()[0]))) < 1e-3


def test_divergence_form_conserves_mass():
    pde = PdeSpec(1, "(1 + u_x^2)^-1", form="divergence")
    g = GridField.sample(lambda t, x: 1 + 0.5 * np.cos(np.pi * x), 0.0, [(0, 1, 41)])
    out = solve_pde_1d(pde, g, 0.1)
    assert abs(out.mass() - g.mass()) <= 1e-12 * g.mass()


def test_gradient_clamp_is_reported():
    # the centred gradient vanishes at the symmetric extremum x = 1/2
    g = GridField.sample(lambda t, x: 1 + 0.1 * np.cos(2 * np.pi * x), 0.0, [(0, 1, 21)])
    out = solve_pde_1d(PdeSpec(1, "u_x^2"), g, 1e-3)
    assert out.meta["clamped"] > 0


def test_solver_rejects_opaque_coefficients():
    with pytest.raises(ValueError):
        solve_pde_1d(PdeSpec.opaque(1), GridField(np.zeros(5), 0.1, 0.0), 0.1)


def test_step_collapse_raises():
    g = GridField.sample(lambda t, x: x**3, 0.0, [(0, 1, 41)])
    with pytest.raises(SolverError):
        solve_pde_1d(PdeSpec(1, "u_x^-2"), g, 0.1, min_dt=1e-3)


# ---------------------------------------------------------------- images

def test_pgm_roundtrip(tmp_path):
    img = (step_edge(16, noise=0.05) * 255).clip(0, 255).astype(np.uint8)
    write_pgm(tmp_path / "a.pgm", img)
    assert np.array_equal(read_pgm(tmp_path / "a.pgm"), img)
    assert b"#" not in (tmp_path / "a.pgm").read_bytes()[:20]


def test_pgm_comments_tolerated():
    data = b"P5\n# a comment\n3 2\n# another\n255\n" + bytes(range(6))
    assert parse_pgm(data).tolist() == [[0, 1, 2], [3, 4, 5]]


@pytest.mark.parametrize("data,offset", [
    (b"P2\n3 2\n255\n", 0),
    (b"P5\n3 x\n255\n", 5),
    (b"P5\n3 2\n65535\n" + bytes(12), 7),
    (b"P5\n3 2\n255\n" + bytes(4), 15),
])
def test_pgm_errors_carry_byte_offset(data, offset):
    with pytest.raises(PgmError) as err:
        parse_pgm(data)
    assert err.value.offset == offset


@pytest.fixture(scope="module")
def edge_image():
    return image_field((step_edge(128) * 255).round().astype(np.uint8))


@pytest.mark.parametrize("model", ["exponential", "rational"])
def test_perona_malik_conservation_and_extrema(edge_image, model):
    _, stats = perona_malik_filter(edge_image, model, 0.01, 0.5)
    assert stats.mass_error <= 1e-10
    assert stats.maximum_principle


def test_perona_malik_preserves_edges_better_than_linear(edge_image):
    pm, _ = perona_malik_filter(edge_image, "rational", 0.01, 0.5)
    lin, _ = perona_malik_filter(edge_image, "linear", 0.01, 0.5)
    assert edge_gradient(pm) > edge_gradient(lin)


def test_perona_malik_constant_image_unchanged():
    img = np.full((64, 64), 77, dtype=np.uint8)
    out, _ = perona_malik_filter(image_field(img), "rational", 0.01, 0.5)
    assert np.array_equal(to_bytes(out), img)


def test_perona_malik_rejects_bad_input():
    with pytest.raises(ValueError):
        perona_malik_filter(image_field(np.zeros((8, 8), np.uint8)), "rational", 0)
    with pytest.raises(ValueError):
        perona_malik_filter(image_field(np.zeros((8, 8), np.uint8)), "cubic", 0.01)


# ---------------------------------------------------------------- transport

J1, J2 = JetSpace(), JetSpace.of_dimension(2)


@pytest.mark.parametrize("eps", [-0.1, 0.1])
def test_translation_transport(eps):
    sol = lambda t, x: np.exp(-t) * np.sin(x)  # noqa: E731
    rep = transport_solution(sol, VectorField.from_components(J1, x="1"), eps, HEAT1,
                             (0.1, 0.5), [(0.5, 1.5)], 0.05)
    assert rep.passed
    assert np.isclose(rep.evaluator(0.3, 1.0), sol(0.3, 1.0 - eps))


@pytest.mark.parametrize("eps", [-0.1, 0.1])
def test_scaling_transport_of_exact_solution(eps):
    ex = exact_solution("4-11-closed", k=2)
    X6 = VectorField.from_components(J2, t="2*t", x1="x1", x2="x2", u="u")
    rep = transport_solution(ex.planar, X6, eps, PdeSpec(2, "W^2"), (0.1, 0.3), [(1, 1.5), (1, 1.5)], 0.05)
    assert rep.passed and 3.5 <= rep.transported.ratio <= 4.5


def test_source_shift_on_numerical_solution():
    """``u + eps e^t`` stays a solution for a linear source: the solver
    commutes with adding the evolved constant."""
    pde = PdeSpec(1, "(1 + u_x^2)^-1", "u", form="divergence")
    X3 = VectorField.from_components(J1, u="exp(t)")
    assert transport_solution(lambda t, x: x, X3, 0.1, pde).invariance.passed
    init = GridField.sample(lambda t, x: 1 + 0.5 * np.cos(np.pi * x), 0.0, [(0, 1, 41)])
    eps = 0.1
    a = solve_pde_1d(pde, init, 0.1)
    b = solve_pde_1d(pde, init.replace(init.values + eps, 0.0), 0.1)
    c = solve_pde_1d(pde, init.replace(np.full(41, eps), 0.0), 0.1)
    assert np.allclose(b.values - a.values, c.values, atol=1e-13)
    assert np.allclose(c.values, eps * np.exp(0.1), atol=1e-4)


def test_transport_rejects_non_symmetry():
    X = VectorField.from_components(J1, u="u^2")
    rep = transport_solution(lambda t, x: x, X, 0.1, HEAT1)
    assert not rep.passed


def test_transport_needs_u_free_base_coefficients():
    X = VectorField.from_components(J1, x="u")
    with pytest.raises(ValueError):
        transport_solution(lambda t, x: x, X, 0.1, PdeSpec(1, "u_x^-2", "0"))
