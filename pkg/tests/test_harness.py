import json
from fractions import Fraction

import pytest

from hahnkit.finite_field import FqContext
from hahnkit.harness import (
    EXPECTED_DIVERGENCE,
    PASS,
    SKIP,
    SampleSpec,
    check_alpha,
    check_collapse,
    check_eta,
    check_fehm,
    check_kochen,
    check_zeta_epsilon,
    run_all,
    run_suite,
)
from hahnkit.hahn import monomial, series
from hahnkit.sampling import edge_cases, generate
from hahnkit.solver import UPoly


def test_sampling_is_deterministic():
    a = generate(SampleSpec(q=3, count=25, seed=9))
    b = generate(SampleSpec(q=3, count=25, seed=9))
    assert a == b
    c = generate(SampleSpec(q=3, count=25, seed=10))
    assert a != c


def test_edge_cases_include_the_mandatory_points():
    F9 = FqContext(9)
    cases = edge_cases(F9)
    assert cases[0].is_exact_zero()
    assert cases[1] == series(F9, [(0, F9.one)])
    assert monomial(F9, 1) in cases
    assert monomial(F9, -1) in cases
    assert monomial(F9, Fraction(1, 3)) in cases
    assert monomial(F9, Fraction(-1, 3)) in cases
    # one unit-plus-t case per nonzero residue constant
    assert len(cases) == 7 + 8


def test_reports_are_reproducible():
    spec = SampleSpec(q=2, count=15, seed=5)
    r1 = check_fehm(spec).to_dict()
    r2 = check_fehm(spec).to_dict()
    assert json.dumps(r1) == json.dumps(r2)


def test_fehm_example_values():
    # q=2, y = t^-1: v(f(y)) = -2; q=3, y = t: unit with residue -1; y = 1: unit
    rep = check_fehm(SampleSpec(q=2, count=0, seed=1))
    by_input = {c.input: c for c in rep.cases if c.case_id.startswith("fehm-")}
    c = by_input["t^(-1)"]
    assert c.status == PASS and "v(f(y)) = -2" in c.got

    rep3 = check_fehm(SampleSpec(q=3, count=0, seed=1))
    by_input = {c.input: c for c in rep3.cases if not c.case_id.startswith("fehm-pair")}
    assert "residue = 2" in by_input["t"].got  # f(t) has residue f(0) = -1 = 2
    assert "v(f(y)) = 0" in by_input["1"].got


def test_zeta_suite_edge_verdicts():
    rep = check_zeta_epsilon(SampleSpec(q=2, count=0, seed=1))
    by_input = {c.input: c for c in rep.cases}
    assert by_input["0"].got == "ring: true, ideal: true"
    assert by_input["1"].got == "ring: true, ideal: false"
    assert by_input["t"].got == "ring: true, ideal: true"
    assert by_input["t^(-1/2)"].got == "ring: false, ideal: false"
    assert rep.ok


def test_alpha_suite_piecewise_and_surjectivity():
    rep = check_alpha(SampleSpec(q=3, count=10, seed=3), u=1)
    assert rep.ok
    surj = [c for c in rep.cases if c.case_id.startswith("alpha-surj")]
    assert len(surj) == 50
    assert all(c.witnesses.get("y") for c in surj)


def test_kochen_skips_characteristic_two():
    rep = check_kochen(SampleSpec(q=4, count=5, seed=3))
    assert [c.status for c in rep.cases] == [SKIP]
    assert rep.ok


def test_kochen_odd_characteristic_runs():
    rep = check_kochen(SampleSpec(q=3, count=5, seed=3))
    assert rep.ok
    assert any(c.case_id == "kochen-identity" and c.status == PASS for c in rep.cases)


def test_collapse_divergence_fixture_status():
    rep = check_collapse(SampleSpec(q=2, count=0, seed=3))
    fixture = [c for c in rep.cases if c.case_id == "collapse-divergence-fixture"]
    assert len(fixture) == 1
    assert fixture[0].status == EXPECTED_DIVERGENCE
    assert "input: True, merged output: False" in fixture[0].got
    assert rep.ok  # divergence is expected, not a failure


def test_eta_suite_constructive_decomposition():
    rep = check_eta(SampleSpec(q=2, count=10, seed=3))
    assert rep.ok
    positives = [c for c in rep.cases if "True" in c.expected]
    assert positives
    for c in positives:
        assert set(c.witnesses) == {"r", "s", "y", "z"}


def test_run_all_and_run_suite_dispatch():
    reports = run_all([2], count=3, seed=1, suites=["fehm", "kochen"])
    assert [r.suite for r in reports] == ["fehm", "kochen"]
    with pytest.raises(Exception):
        run_suite("nope", SampleSpec(q=2, count=1, seed=1))


def test_report_rows_schema():
    rep = check_fehm(SampleSpec(q=2, count=2, seed=1))
    rows = rep.rows()
    assert rows
    assert set(rows[0]) == {
        "suite",
        "q",
        "case_id",
        "status",
        "input",
        "expected",
        "got",
        "witnesses",
        "residuals",
        "note",
    }
