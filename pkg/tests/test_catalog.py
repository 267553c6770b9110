import dataclasses

import pytest

from gradlie import catalog
from gradlie.catalog import (
    NEGATIVE_CONTROL_FLOOR, SAMPLE_SETS, LINEARIZABLE_SAMPLES, case, cases, perturb, verify_algebra_structure,
    verify_case, verify_extension_rejected, verify_linearizable,
)
from gradlie.pde import check_invariance

ROW_COUNTS = {"T1": 10, "T2": 9, "T3": 4}


@pytest.mark.parametrize("table", sorted(ROW_COUNTS))
def test_row_counts(table):
    assert len(cases(table)) == ROW_COUNTS[table]


@pytest.mark.parametrize("table", sorted(ROW_COUNTS))
def test_tables_pass(table, table_reports):
    failed = [r.case_id for r in table_reports(table) if not r.passed]
    assert not failed


@pytest.mark.parametrize("table", sorted(ROW_COUNTS))
def test_negative_controls_fail_with_witness(table, table_reports):
    for r in table_reports(table):
        assert r.control_residual > NEGATIVE_CONTROL_FLOOR, r.case_id


CONTINUOUS = ("k", "m", "lam")


@pytest.mark.parametrize("table", sorted(ROW_COUNTS))
def test_parameter_sample_coverage(table):
    """Continuous parameters get at least three values; sign parameters and
    gam take every value their sample set allows."""
    for c in cases(table):
        samples = c.parameter_samples()
        for p in c.params:
            seen = {s[p] for s in samples}
            if p in CONTINUOUS:
                assert len(seen) >= 3, (c.id, p)
            else:
                assert len(seen) == len(SAMPLE_SETS[p]), (c.id, p)


def test_sample_sets_are_versioned_constants():
    assert catalog.SAMPLE_SET_VERSION == 1
    assert len(SAMPLE_SETS["k"]) == 5 and len(SAMPLE_SETS["lam"]) == 3


def test_every_generator_is_perturbation_sensitive():
    c = case("T1.7")
    vals = c.parameter_samples()[0]
    pde = c.pde(vals)
    for name, X in c.fields(vals):
        assert check_invariance(pde, X).passed
        assert not check_invariance(pde, perturb(X, "u", 1)).passed, name


def test_source_reading_of_row_six():
    r = verify_case(case("T1.6"))
    assert r.passed
    printed = r.readings["Q = u (printed)"]
    assert not printed["passes_all_samples"]
    assert all(s["e1"] == "1" for s in printed["passing_samples"])


def test_corrupted_case_fails():
    c = case("T1.2")
    bad = dataclasses.replace(c, generators=(("X3", {"u": "exp(2*t)"}),))
    r = verify_case(bad)
    assert not r.passed and r.witness["generator"] == "X3"


@pytest.mark.parametrize("table", ["principal-1d", "principal-2d", "principal-noQ", "power-law-noQ"])
def test_principal_algebras(table):
    for c in cases(table):
        assert verify_case(c).passed


def test_power_law_extension_samples():
    (c,) = cases("power-law-noQ")
    assert {s["k"] for s in c.parameter_samples()} == {-3, catalog.F(1, 2), 2}


def test_extension_rejected_for_image_models():
    reps = verify_extension_rejected()
    assert {r.model for r in reps} == {"exponential", "rational"}
    assert all(r.extension_rejected and r.residual > 1e-3 for r in reps)


@pytest.mark.parametrize("Q", sorted(LINEARIZABLE_SAMPLES))
def test_linearizable_samples(Q):
    reps = verify_linearizable(Q, LINEARIZABLE_SAMPLES[Q])
    assert len(reps) == 3
    assert all(r.solves_linear and r.passed for r in reps)


def test_linearizable_rejects_non_solution():
    (r,) = verify_linearizable("0", ["u^2 + t"])
    assert not r.solves_linear and not r.passed


def test_algebra_structure_constants():
    rep = verify_algebra_structure(case("P0"))
    assert rep.passed
    assert rep.structure["[X1,X6]"] == {"X1": "2"}
    assert rep.structure["[X2,X4]"] == {"X3": "-1"}
    assert rep.structure["[X1,X5]"] == {}


@pytest.mark.parametrize("table", sorted(ROW_COUNTS))
def test_all_rows_close(table):
    for c in cases(table):
        assert verify_algebra_structure(c).passed, c.id


def test_reports_are_reproducible():
    a = verify_case(case("T3.2")).as_dict()
    b = verify_case(case("T3.2")).as_dict()
    assert a == b
