import math
from importlib import resources

import pytest

from klorth.verify import (
    ALL, MANDATORY, Category, IdentityCheck, Status, Tolerance, UnknownCheck, registry, run_check,
    run_suite,
)
from klorth.verify import checks_ortho


def scope_names():
    text = resources.files("klorth.verify").joinpath("scope.txt").read_text()
    return [line.split("\t")[0] for line in text.splitlines() if line and not line.startswith("#")]


def test_registry_matches_scope_list():
    reg = registry()
    scope = scope_names()
    assert len(scope) == len(set(scope))
    assert sorted(scope) == sorted(reg)


def test_every_check_has_points_and_finite_tolerance():
    for name, c in registry().items():
        assert c.grid(), name
        assert math.isfinite(c.tolerance.abs) and math.isfinite(c.tolerance.rel)
        assert c.tolerance.abs > 0 or c.tolerance.rel > 0 or name.startswith("l-rec")
        assert c.paper_ref


def test_candidates_have_variants():
    for name, c in registry().items():
        if c.category is Category.CANDIDATE:
            assert c.variants and len(c.variants) >= 2, name


def test_unknown_check():
    with pytest.raises(UnknownCheck) as info:
        run_check("no-such-check")
    assert "wilson-4gamma" in str(info.value)
    with pytest.raises(UnknownCheck):
        run_suite(["imk-identity", "nope"])


def test_wilson_4gamma():
    rs = run_check("wilson-4gamma")
    assert rs and all(r.status is Status.PASS and r.rel_err <= 1e-8 for r in rs)


@pytest.mark.parametrize("name", ["mu2-closed-form", "a1-closed-form", "p0-normalization", "eigen-B", "l-rec-2"])
def test_candidates_adjudicate_one_variant(name):
    rs = run_check(name)
    assert all(r.status is Status.ADJUDICATED for r in rs)
    assert len({r.variant for r in rs}) == 1
    tol = registry()[name].tolerance
    for r in rs:
        assert sum(1 for e in r.variant_errors.values() if e <= tol.rel) <= 1


def test_pass_iff_within_tolerance():
    for r in run_check("dk-deriv") + run_check("gen-func"):
        assert (r.status is Status.PASS) == (r.abs_err <= r.tol_abs or r.rel_err <= r.tol_rel)


def _strip(rs):
    return [(r.name, r.params, r.lhs_value, r.rhs_value, r.abs_err, r.rel_err, r.status, r.variant)
            for r in rs]


def test_deterministic():
    assert _strip(run_check("square-cosine")) == _strip(run_check("square-cosine"))


def test_subset_report():
    rep = run_suite(["imk-identity"])
    assert {r.name for r in rep.results} == {"imk-identity"}
    assert rep.summary["pass"] == len(rep.results) and rep.ok


def test_parallel_ordering_matches():
    names = ["gen-func", "mu0-closed", "imk-identity", "wilson-3gamma"]
    a = run_suite(names, workers=1)
    b = run_suite(names, workers=2)
    assert _strip(a.results) == _strip(b.results)
    keys = [(r.name, r.index) for r in a.results]
    assert keys == sorted(keys)


def test_overrides():
    rs = run_check("imk-identity", {"x": (1.0,), "tau": (0.5,)})
    assert len(rs) == 1 and rs[0].params == {"tau": 0.5, "x": 1.0}
    rs = run_check("imk-identity", {"tol_abs": 0.0, "tol_rel": 0.0, "x": (1.0,), "tau": (0.5,)})
    assert rs[0].tol_rel == 0.0


def test_failure_is_data():
    rs = run_check("imk-identity", {"x": (-1.0,), "tau": (0.5,)})
    assert rs[0].status is Status.FAIL and "DomainError" in rs[0].message


def test_extended_failures_do_not_gate():
    rep = run_suite(["lebedev-rep"], overrides={"lebedev-rep": {"tol_abs": 0.0, "tol_rel": 0.0}})
    assert rep.summary["fail"] > 0
    assert rep.ok


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(math.inf, 0.0)
    with pytest.raises(ValueError):
        Tolerance(-1.0, 0.0)


def test_identity_check_validation():
    with pytest.raises(ValueError):
        IdentityCheck("x", "", (), Tolerance(0, 1e-3), Category.MANDATORY)
    with pytest.raises(ValueError):
        IdentityCheck("x", "", (), Tolerance(0, 1e-3), Category.CANDIDATE, variants=(("a", len),))


def test_selection_constants():
    reg = registry()
    assert ALL == "all" and MANDATORY == "mandatory"
    mand = [n for n, c in reg.items() if c.category is not Category.EXTENDED]
    assert len(mand) < len(reg)


def test_connection_forms_cached_table():
    forms = checks_ortho._connection_forms(1.0, 2)
    assert set(forms) == set(checks_ortho._FORMS)
