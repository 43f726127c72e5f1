"""Acceptance criteria, one test per criterion.

Each test prints a PASS/FAIL line with one sub-line per item; the same lines
are repeated in the pytest terminal summary. Run on its own with
``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""

import csv
import io
import math
import sys
import time
from itertools import combinations

import numpy as np
import pytest

from klorth.cli import report_schema, run_captured
from klorth.moments import MomentRoute, moment_recurrence_residual, mu, mu_closed
from klorth.orthokl import WeightSpec, basis_for, inner_product, kernel_closed, three_term_residual
from klorth.ppoly import (
    double_factorial, gen_series_eval, l_rec_laguerre_residual, l_rec_shift_residual, l_table,
    p_alt_routes, p_chain,
)
from klorth.specfun import macdonald_real
from klorth.verify import Category, Status, registry, run_check, run_suite
from klorth.verify.rules import d1
from klorth.wilsongen import wilson_m0_closed, wilson_power_integral

XS = (0.5, 1.0, 2.0)
A3 = (0.6, 0.8, 1.0)


def within(r, tol_abs, tol_rel):
    return r.abs_err <= tol_abs or r.rel_err <= tol_rel


def worst(results, key="rel_err"):
    vals = [getattr(r, key) for r in results]
    return max(vals) if vals else float("nan")


def record(log, k, title, items):
    """Print and log one criterion; ``items`` are (label, ok, detail)."""
    ok = all(i[1] for i in items)
    head = f"criterion {k:2d}  {'PASS' if ok else 'FAIL'}  {title}"
    details = [f"    [{'ok' if i[1] else 'FAIL'}] {i[0]}: {i[2]}" for i in items]
    log.append(((k, head), details))
    print(head)
    for d in details:
        print(d)
    assert ok, "\n".join(d for d in details if "[FAIL]" in d)


def test_criterion_01_exact_arithmetic(acceptance_log):
    t0 = time.perf_counter()
    chains = p_chain(20)
    routes = [p_alt_routes(n) for n in range(21)]
    same = all(r[0].coeffs == chains[n].coeffs for n, r in enumerate(routes))
    deriv_zero = all(r[1].is_zero() for r in routes)
    table = l_table(13, 12)
    pattern = all(table[m, k] == 0 for m in range(1, 13) for k in range(m, 13))
    diag = all(table[n, n - 1] == -double_factorial(2 * n - 1) * math.factorial(n - 1) for n in range(1, 11))
    rec1 = [l_rec_laguerre_residual(table, m, k) for m in range(1, 13) for k in range(11)]
    rec2 = {(m, k): l_rec_shift_residual(table, m, k, "printed") for m in range(1, 13) for k in range(11)}
    bad2 = [mk for mk, v in rec2.items() if v != 0]
    fixed = [l_rec_shift_residual(table, m, k, "corrected") for m in range(2, 13) for k in range(11)]
    elapsed = time.perf_counter() - t0
    first = bad2[0] if bad2 else None
    record(acceptance_log, 1, "exact-arithmetic suite", [
        ("p_n by two routes identical, n <= 20", same, "identical" if same else "differ"),
        ("derivative identity residual exactly zero, n <= 20", deriv_zero, "zero polynomial"),
        ("l_{m,k} = 0 for k >= m", pattern, "m <= 12, k <= 12"),
        ("l_{n,n-1} = -(2n-1)!! (n-1)!, n <= 10", diag, "exact"),
        ("Laguerre three-term recurrence for l_{m,k} exact, m <= 12, k <= 10",
         all(v == 0 for v in rec1), f"{sum(v != 0 for v in rec1)} nonzero of {len(rec1)}"),
        ("row recurrence for l_{m,k} in its stated form exact, m <= 12, k <= 10", not bad2,
         f"{len(bad2)} of {len(rec2)} residuals nonzero, first at (m,k)={first} with "
         f"residual {rec2[first] if first else 0}; the re-derived form is exact for all "
         f"{len(fixed)} points with 2 <= m <= 12" if bad2 else "all zero"),
        ("runtime < 2 s", elapsed < 2.0, f"{elapsed:.2f} s"),
    ])


def test_criterion_02_generating_function(acceptance_log):
    ys = np.linspace(-0.2, 0.2, 9)
    errs = [abs(gen_series_eval(x, float(y), 12) - math.exp(-2 * x * math.sinh(y / 2) ** 2))
            for x in XS for y in ys]
    record(acceptance_log, 2, "generating function, partial sum N = 12", [
        ("|partial sum - exp(-2x sinh^2(y/2))| <= 1e-12, x in {0.5,1,2}, |y| <= 0.2",
         max(errs) <= 1e-12, f"max error {max(errs):.2e} over {len(errs)} points"),
    ])


def test_criterion_03_moments(acceptance_log):
    routes = list(MomentRoute)
    pair = 0.0
    for n in range(6):
        for x in XS:
            v = {r: mu(n, x, r) for r in routes}
            for a, b in combinations(routes, 2):
                pair = max(pair, abs(v[a] - v[b]) / abs(v[b]))
    c0 = max(abs(mu_closed(0, x) - mu(0, x)) / mu(0, x) for x in XS)
    c1 = max(abs(mu_closed(1, x) - mu(1, x)) / mu(1, x) for x in XS)
    # x mu_0'(x) by a five-point difference of the quadrature values, h = 1e-3
    dres = max(abs(x * d1(lambda z: mu(0, z), x, 1e-3) + 4 * mu(1, x)) / (4 * mu(1, x)) for x in XS)
    rec = max(moment_recurrence_residual(n, x) for n in (1, 2, 3) for x in XS)
    record(acceptance_log, 3, "moments", [
        ("three routes pairwise <= 1e-7 relative, n <= 5", pair <= 1e-7, f"max {pair:.2e}"),
        ("mu_0 = (pi/2) K_0(2x) <= 1e-9 relative", c0 <= 1e-9, f"max {c0:.2e}"),
        ("mu_1 = (pi x/4) K_1(2x) <= 1e-9 relative", c1 <= 1e-9, f"max {c1:.2e}"),
        ("x mu_0' = -4 mu_1 <= 1e-9 (five-point difference, h = 1e-3)", dres <= 1e-9, f"max {dres:.2e}"),
        ("moment recurrence residual <= 1e-6, n <= 3", rec <= 1e-6, f"max {rec:.2e}"),
    ])


def test_criterion_04_candidates(acceptance_log):
    items = []
    for name in ("mu2-closed-form", "a1-closed-form"):
        rs = run_check(name)
        xs = sorted(r.params["x"] for r in rs)
        one = all(r.status is Status.ADJUDICATED and sum(e <= 1e-6 for e in r.variant_errors.values()) == 1
                  for r in rs)
        names = sorted({r.variant for r in rs})
        errs = {v: max(r.variant_errors[v] for r in rs) for v in rs[0].variant_errors}
        items.append((f"{name}: exactly one variant within 1e-6 at x in {{0.5,1,2}}",
                      one and xs == list(XS) and len(names) == 1,
                      f"variant {names}; worst relative error per variant "
                      + ", ".join(f"{k}={v:.1e}" for k, v in errs.items())))
    record(acceptance_log, 4, "candidate adjudication", items)


def _eigen_b_printed():
    check = registry()["eigen-B"]
    recipe = dict(check.variants)["printed"]
    out = []
    for tau in (0.0, 0.5, 1.0, 2.0):
        for x in XS:
            lhs, rhs = recipe({"tau": tau, "x": x})[:2]
            err = abs(lhs - rhs)
            # tau = 0 makes both sides vanish; judged by the 1e-8 absolute floor
            ok = err <= 1e-8 if rhs == 0 else err <= 1e-5 * abs(rhs)
            out.append((tau, x, ok, err / abs(rhs) if rhs else err))
    return out


def test_criterion_05_kernel_identities(acceptance_log):
    imk = run_check("imk-identity")
    dk = run_check("dk-deriv")
    ea = run_check("eigen-A")
    # zero right-hand sides (tau = 0) use the documented absolute floor
    ea_ok = all(within(r, r.tol_abs if r.rhs_value == 0 else 0.0, 1e-5) for r in ea)
    eb = _eigen_b_printed()
    eb_bad = [(t, x, e) for t, x, ok, e in eb if not ok]
    eb_corr = run_check("eigen-B")
    record(acceptance_log, 5, "kernel identities and eigen-relations", [
        ("x Im K_{1+i tau} = tau K_{i tau} <= 1e-9 relative",
         all(within(r, 0.0 if r.rhs_value else 1e-14, 1e-9) for r in imk), f"max {worst(imk, 'abs_err'):.1e} abs"),
        ("d/dx K_{i tau} = -Re K_{1+i tau} <= 1e-6", all(within(r, 0.0, 1e-6) for r in dk),
         f"max {worst(dk):.1e} relative"),
        ("second-order eigen-relation <= 1e-5 relative (h = 1e-3)", ea_ok,
         f"max abs {worst(ea, 'abs_err'):.1e}"),
        ("integro-differential eigen-relation with eigenvalue tau^2 <= 1e-5 relative (h = 1e-3)", not eb_bad,
         f"{len(eb_bad)} of {len(eb)} points fail, worst relative error {max(e for *_, e in eb_bad):.2f}; "
         f"eigenvalue 4 tau^2 holds to {worst(eb_corr):.1e}" if eb_bad else "holds"),
    ])


def test_criterion_06_orthogonality(acceptance_log):
    spec = WeightSpec.kl(1.0)
    b = basis_for(spec, 5)
    dev = max(abs(inner_product(b.poly(n), b.poly(m), spec, "direct") - (n == m))
              for n in range(6) for m in range(n, 6))
    tt = max(three_term_residual(basis_for(WeightSpec.kl(x), 5), n) for x in XS for n in range(5))
    qo = run_check("quasi-orth")
    cn = run_check("connection")
    cn_sel = [r for r in cn if r.params["n"] <= 3]
    forms = sorted({r.params["form"] for r in cn_sel})
    record(acceptance_log, 6, "orthogonality", [
        ("|<P_n,P_m> - delta| <= 1e-6 by direct quadrature, x = 1, n,m <= 5", dev <= 1e-6, f"max {dev:.1e}"),
        ("three-term recurrence residual <= 1e-8 coefficientwise", tt <= 1e-8, f"max {tt:.1e}"),
        ("quasi-orthogonality <= 1e-6 scale", all(within(r, 0.0, 1e-6) for r in qo), f"max {worst(qo):.1e}"),
        ("connection identities (alpha/beta and B_n forms) <= 1e-5, n <= 3",
         all(within(r, r.tol_abs, 1e-5) for r in cn_sel) and {"beta", "B"} <= set(forms),
         f"{len(cn_sel)} points, {len(forms)} forms, max {worst(cn_sel):.1e}"),
    ])


def test_criterion_07_index_integrals(acceptance_log):
    ki = run_check("kernel-identity")
    origin = [r for r in ki if r.params == {"tau": 0.0, "y": 0.0}][0]
    ek = run_check("erdelyi-kober")
    lm = [r for r in run_check("lemma1") if r.params["n"] in (1, 2)]
    th = [r for r in run_check("thm1") if r.params["f"] in ("u", "u^2")]
    re_ = [r for r in th if r.params["part"] == "re"]
    im_ = [r for r in th if r.params["part"] == "im"]
    record(acceptance_log, 7, "closed-form index integrals", [
        ("cosh-kernel product integral <= 1e-6 relative on tau,y in {0,0.5,1,2}",
         all(within(r, 0.0, 1e-6) for r in ki) and len(ki) == 16, f"max {worst(ki):.1e}"),
        ("value pi^2/8 at the origin", abs(origin.lhs_value - math.pi ** 2 / 8) <= 1e-6 * math.pi ** 2 / 8
         and kernel_closed(0, 0) == math.pi ** 2 / 8, f"{origin.lhs_value!r}"),
        ("Erdelyi-Kober average <= 1e-7", all(within(r, r.tol_abs, 1e-7) for r in ek), f"max {worst(ek):.1e}"),
        ("index integral of mu_n' <= 1e-4, n = 1,2, tau in {1,2}",
         all(within(r, 0.0, 1e-4) for r in lm) and len(lm) == 4, f"max {worst(lm):.1e}"),
        ("integral equation, f = u and u^2, <= 1e-6", all(within(r, 0.0, 1e-6) for r in re_),
         f"max {worst(re_):.1e}"),
        ("imaginary residue <= 1e-8", all(r.abs_err <= 1e-8 for r in im_), f"max {worst(im_, 'abs_err'):.1e}"),
    ])


def test_criterion_08_wilson_integrals(acceptance_log):
    items = []
    for a, ref, label in (((1.0, 1.0, 1.0), 2 * math.pi, "m_0(1,1,1) = 2 pi"),
                          ((1.0, 1.0, 1.0, 1.0), math.pi / 3, "m_0(1,1,1,1) = pi/3"),
                          ((0.7, 0.9, 1.1, 1.3), wilson_m0_closed((0.7, 0.9, 1.1, 1.3)),
                           "m_0(0.7,0.9,1.1,1.3) = gamma-product closed form")):
        v = wilson_power_integral(a, 0).value
        e = abs(v - ref) / ref
        items.append((label + " <= 1e-8 relative", e <= 1e-8, f"{v!r}, error {e:.1e}"))
    items.append(("closed form reproduces 2 pi and pi/3",
                  math.isclose(wilson_m0_closed((1, 1, 1)), 2 * math.pi, rel_tol=1e-15)
                  and math.isclose(wilson_m0_closed((1, 1, 1, 1)), math.pi / 3, rel_tol=1e-15), "exact"))
    record(acceptance_log, 8, "Wilson integrals", items)


def _at(rs, a=A3):
    return [r for r in rs if tuple(r.params["a"]) == a]


def test_criterion_09_generalized_wilson(acceptance_log):
    wo = [r for r in _at(run_check("wilson-orth")) if max(r.params["nm"]) <= 4]
    cv = _at(run_check("c-vanish"))
    cf = _at(run_check("c-first"))
    hr = _at(run_check("H-ratio"))
    c10 = [r for r in cf if r.params["n"] == 1]
    cd = _at(run_check("c-dual-route"))
    cx = _at(run_check("c-next"))
    ci = _at(run_check("c-identity"))
    sp = [r for r in _at(run_check("s-parseval")) if r.params["k"] <= 2]
    record(acceptance_log, 9, "generalized Wilson family at a = (0.6, 0.8, 1.0)", [
        ("orthonormality <= 1e-6, n,m <= 4", all(r.abs_err <= 1e-6 for r in wo), f"max {worst(wo, 'abs_err'):.1e}"),
        ("c_{n,k} = 0 for k <= n-2, <= 1e-6 scale", all(within(r, 0.0, 1e-6) for r in cv), f"max {worst(cv):.1e}"),
        ("c_{n,n-1} formula <= 1e-5", all(within(r, 0.0, 1e-5) for r in cf), f"max {worst(cf):.1e}"),
        ("H-ratio <= 1e-5", all(within(r, 0.0, 1e-5) for r in hr), f"max {worst(hr):.1e}"),
        ("c_{1,0} f_1 = pi <= 1e-5", bool(c10) and all(within(r, 0.0, 1e-5) for r in c10),
         f"{c10[0].lhs_value!r} vs {c10[0].rhs_value!r}" if c10 else "missing"),
        ("dual-route c_{n,k} <= 1e-5", all(within(r, r.tol_abs, 1e-5) for r in cd), f"max {worst(cd):.1e}"),
        ("second-coefficient identity <= 1e-4 scale", all(within(r, 0.0, 1e-4) for r in cx), f"max {worst(cx):.1e}"),
        ("five-term c_{n,k} identity <= 1e-4 scale", all(within(r, 0.0, 1e-4) for r in ci), f"max {worst(ci):.1e}"),
        ("S-polynomial Parseval <= 1e-4, k <= 2", len(sp) == 3 and all(within(r, 0.0, 1e-4) for r in sp),
         f"max {worst(sp):.1e}"),
    ])


def test_criterion_10_convolution(acceptance_log):
    rs = [r for r in run_check("conv-power")
          if (r.params["a"], r.params["b"], r.params["x"]) in ((1.0, 1.0, 1.0), (0.75, 1.25, 2.0))]
    ref = 2 * macdonald_real(0.0, 1.0)
    record(acceptance_log, 10, "KL convolution of powers", [
        ("nested quadrature vs closed form <= 1e-5 at (1,1,1) and (0.75,1.25,2)",
         len(rs) == 2 and all(within(r, 0.0, 1e-5) for r in rs), f"max {worst(rs):.1e}"),
        ("(1,1,1) equals 2 K_0(1)", abs(rs[0].lhs_value - ref) <= 1e-5 * ref, f"{rs[0].lhs_value!r}"),
    ])


def test_criterion_11_extended(acceptance_log):
    reg = registry()
    ext = sorted(n for n, c in reg.items() if c.category is Category.EXTENDED)
    rep = run_suite(ext)
    tol_ok = all(reg[n].tolerance.rel == 1e-4 for n in ext)
    ran = {r.name for r in rep.results} == set(ext)
    # a forced failure of an EXTENDED check leaves the exit status at 0
    status, _ = run_captured(["verify", "--only", "lebedev-rep", "--tol", "lebedev-rep:0:0", "--quiet"])
    record(acceptance_log, 11, "EXTENDED checks", [
        ("run and report", ran and len(rep.results) > 0, f"{', '.join(ext)}: {rep.summary}"),
        ("tolerance 1e-4", tol_ok, "relative 1e-4 each"),
        ("do not gate the exit status", status == 0 and rep.ok, f"forced failure exit status {status}"),
    ])


def test_criterion_12_cli(acceptance_log, mandatory_report, tmp_path):
    import jsonschema

    doc = mandatory_report["doc"]
    try:
        jsonschema.validate(doc, report_schema())
        valid, why = True, "valid"
    except jsonschema.ValidationError as exc:
        valid, why = False, exc.message
    # criteria 1-10 through the report: recompute in process and compare
    names = ["l-rec-1", "l-rec-2", "gen-func", "mu-cross-route", "mu0-closed", "mu1-closed", "mu-recurrence",
             "mu2-closed-form", "a1-closed-form", "imk-identity", "dk-deriv", "eigen-A", "eigen-B",
             "ortho-P", "three-term", "quasi-orth", "connection", "kernel-identity", "erdelyi-kober",
             "lemma1", "thm1", "wilson-3gamma", "wilson-4gamma", "wilson-orth", "c-vanish", "c-first",
             "H-ratio", "c-dual-route", "c-next", "c-identity", "s-parseval", "conv-power"]
    recs = {}
    for rec in doc["results"]:
        recs.setdefault(rec["name"], []).append(rec)
    same = True
    missing = [n for n in names if n not in recs]
    for n in names:
        if n in missing:
            continue
        local = run_check(n)
        for r, j in zip(local, recs[n]):
            same &= (r.status.value == j["status"] and r.lhs_value == j["lhs"] and r.rhs_value == j["rhs"])
        same &= len(local) == len(recs[n])
    gating = [r for r in doc["results"] if r["status"] == "FAIL" and r["category"] != "EXTENDED"]
    # table moments CSV against library values
    out = tmp_path / "m.csv"
    st, _ = run_captured(["table", "moments", "--x", "1", "--n", "5", "--csv", str(out)])
    rows = list(csv.reader(io.StringIO(out.read_text())))
    routes = (MomentRoute.COSH, MomentRoute.LAPLACE, MomentRoute.DIRECT)
    bitwise = st == 0 and len(rows) == 7 and all(
        float(rows[k + 1][2 + i]) == mu(k, 1.0, r) for k in range(6) for i, r in enumerate(routes))
    record(acceptance_log, 12, "CLI contract", [
        ("verify --mandatory exits 0", mandatory_report["status"] == 0 and not gating,
         f"exit {mandatory_report['status']}, summary {doc['summary']}"),
        ("JSON report validates against the shipped schema", valid, why),
        ("report reproduces the checks behind criteria 1-10", not missing and same,
         f"{len(names)} checks compared bit-for-bit" if not missing else f"missing {missing}"),
        ("table moments CSV matches library values bit-for-bit", bitwise, f"{len(rows) - 1} rows x 3 routes"),
    ])


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
