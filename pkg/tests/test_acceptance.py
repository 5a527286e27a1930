"""Acceptance criteria, one test each.

Every test prints a ``PASS``/``FAIL`` line (also visible without ``-s``)
and then asserts.  Run the whole suite with::

    python3 -m pytest tests/test_acceptance.py -v

or directly with ``python3 tests/test_acceptance.py`` for just the verdict lines.
"""
import random
import sys
import warnings

import pytest

from hermpade.approximants import defect_diagnostics, hermite_pade, pade
from hermpade.numerics import Polynomial, get_context
from hermpade.row_analysis import (
    RateFitError,
    cluster_zeros,
    convergence_on_circle,
    denominator_rate,
    derivative_rates,
    inverse_diagnosis,
    sweep,
)
from hermpade.series import associated_system
from hermpade.system_poles import (
    algebraically_independent,
    enumerate_system_poles,
    predicted_theta,
    star_radii,
)
from hermpade.testbed import examples, random_rational_system, series_product_oracle, value

pytestmark = pytest.mark.acceptance

BITS = 512
CTX = get_context(BITS)
RATE_WINDOW = (30, 60)
LOG = []


def verdict(number, checks):
    """Print one line for a criterion and fail the test if any check failed."""
    ok = all(passed for _, passed, _ in checks)
    detail = "; ".join(f"{name}={'ok' if passed else 'NO'} ({info})" for name, passed, info in checks)
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    LOG.append(line)
    print(line)
    assert ok, line


def rate_check(name, fit, target, tol=0.05):
    try:
        est = fit()
    except RateFitError as exc:
        return (name, False, f"no fit: {exc}")
    return (name, abs(est.fitted_rate - target) <= tol, f"{est.fitted_rate:.4f} vs {target}±{tol}")


def settles_from(records, ok):
    start = None
    for r in records:
        if ok(r):
            start = r.n if start is None else start
        else:
            start = None
    return start


def catalog():
    return {ex.id: ex for ex in examples(CTX)}


def order_residual(Q, P, series_list, n, lam):
    worst = CTX.mpf(0)
    for s, p in zip(series_list, P):
        prod = series_product_oracle(Q.shift(lam), s, n)
        p = p.shift(lam)
        scale = max([abs(prod[i]) for i in range(n + 1)] + [CTX.mpf(1)])
        for i in range(n + 1):
            c = p.coeffs[i] if i < len(p.coeffs) else 0
            worst = max(worst, abs(prod[i] - c) / scale)
    return worst


# ---------------------------------------------------------------------------

def test_criterion_1_first_system_row():
    ex = catalog()["E1"]
    sw = sweep(ex.system, 2, 60)
    n0 = settles_from(sw.records, lambda r: r.null_dimension == 1 and r.deg_Q == 2)
    clusters = cluster_zeros(sw, 20)
    centers = sorted((complex(c.center) for c in clusters), key=lambda z: (z.real, z.imag))
    want = [0.5, 2.0]
    clusters_ok = (len(clusters) == 2 and all(c.multiplicity == 1 for c in clusters)
                   and all(abs(a - b) < 1e-6 for a, b in zip(centers, want))
                   and all(c.drift < 1e-6 for c in clusters))
    verdict(1, [
        ("unique_full_degree", n0 is not None and n0 <= RATE_WINDOW[0], f"from n0={n0}"),
        rate_check("rate_30_60", lambda: denominator_rate(sw, RATE_WINDOW), 0.5),
        ("clusters", clusters_ok, f"{[(round(c.real, 9), round(c.imag, 9)) for c in centers]}, "
                                  f"drift {max((c.drift for c in clusters), default=None)}"),
    ])


def test_criterion_2_second_system_row():
    ex = catalog()["E2"]
    sw = sweep(ex.system, 2, 60)
    target = Polynomial.from_roots([CTX.mpf(1), CTX.mpf(3)], CTX)
    limit_ok = sw.Q_limit.almost_equal(target, CTX.mpf(10) ** -40) and sw.records[-1].Q.almost_equal(target, 1e-12)
    clusters = cluster_zeros(sw, 20)
    near_two = [c for c in clusters if abs(c.center - 2) < 0.25]
    verdict(2, [
        ("limit_(z-1)(z-3)", limit_ok, f"source={sw.limit_source}"),
        ("no_cluster_near_2", not near_two, f"{len(clusters)} clusters"),
        rate_check("theta_hat", lambda: denominator_rate(sw, RATE_WINDOW), 0.5),
        rate_check("derivative_xi1_s0",
                   lambda: derivative_rates(sw, 1, 0, RATE_WINDOW).per_order[0], 0.5),
    ])


def test_criterion_3_scalar_row():
    ex = catalog()["E3"]
    sw = sweep(ex.system, 2, 60)
    verdict(3, [
        rate_check("denominator_rate", lambda: denominator_rate(sw, RATE_WINDOW), 0.5),
        rate_check("circle_0.75_256",
                   lambda: convergence_on_circle(sw, ex.system, 0, 0.75, 256, RATE_WINDOW), 0.75),
    ])


def test_criterion_4_pole_enumeration_matches_ground_truth():
    checks = []
    tol = CTX.mpf(10) ** -20
    for ex in examples(CTX):
        truth = ex.truth
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ps = enumerate_system_poles(ex.system)
        problems = []
        if len(ps.reports) != len(truth.poles):
            problems.append(f"{len(ps.reports)} poles")
        for rep, want in zip(ps.reports, truth.poles):
            if abs(rep.xi - CTX.convert(want.location)) > tol:
                problems.append(f"location {rep.xi}")
            if rep.tau != want.order:
                problems.append(f"order {rep.tau}")
            if tuple(rep.r) != tuple(value(CTX, r) for r in want.r):
                problems.append(f"radii {rep.r}")
        if len(ps.excluded) != len(truth.excluded) or any(
                abs(a - CTX.convert(b)) > tol for a, b in zip(ps.excluded, truth.excluded)):
            problems.append(f"excluded {ps.excluded}")
        if ps.complete != truth.complete:
            problems.append("complete flag")
        if truth.theta is not None:
            if abs(predicted_theta(ps) - value(CTX, truth.theta)) > tol:
                problems.append(f"theta {predicted_theta(ps)}")
            for k, (R, R_star) in enumerate(truth.star_radii):
                got = star_radii(ex.system, ps, k)
                if got != (value(CTX, R), value(CTX, R_star)):
                    problems.append(f"star radii {k}: {got}")
        checks.append((ex.id, not problems, ", ".join(problems) or "exact"))
    verdict(4, checks)


def test_criterion_5_oracle_equivalence():
    failures, worst = [], CTX.mpf(0)
    tol = CTX.zero_tolerance
    for seed in range(50):
        system = random_rational_system(random.Random(seed), CTX, max_d=3, max_m=2)
        series = [f.series() for f in system.components]
        for n in range(max(system.m), max(system.m) + 6):
            rec = hermite_pade(system, n)
            res = order_residual(rec.Q, rec.P, series, n, rec.lambda_n)
            worst = max(worst, res)
            if res > tol:
                failures.append(f"seed {seed} n {n} hermite-pade {float(res):.2e}")
        for k, f in enumerate(system.components):
            poles = sum(order for _, order in f.poles())
            for n in (2 * poles - 1, 2 * poles + 4):
                rec = pade(f, n, poles)
                prod = series_product_oracle(rec.Q.shift(rec.lambda_n), series[k], n + 20)
                num = rec.P[0].shift(rec.lambda_n)
                excess = max(abs(prod[i] - (num.coeffs[i] if i < len(num.coeffs) else 0))
                             for i in range(n + 21))
                if excess > tol * max(1, max(abs(prod[i]) for i in range(n + 21))):
                    failures.append(f"seed {seed} component {k} pade exactness n {n}")
    verdict(5, [("order_conditions_and_exactness", not failures,
                 f"worst relative residual {float(worst):.2e}, tolerance {float(tol):.1e}"
                 + (f", failures: {failures[:3]}" if failures else ""))])


def test_criterion_6_associated_system_identity():
    problems = []
    tol = CTX.mpf(10) ** -50
    for seed in range(100, 120):
        system = random_rational_system(random.Random(seed), CTX)
        assoc = associated_system(system)
        for n in range(system.total, system.total + 21):
            if n < max(system.m):
                continue
            a, b = hermite_pade(system, n), hermite_pade(assoc, n)
            if not a.Q.almost_equal(b.Q, tol):
                problems.append(f"seed {seed} n {n}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            pa, pb = enumerate_system_poles(system), enumerate_system_poles(assoc)
        same = (pa.complete == pb.complete and len(pa.reports) == len(pb.reports) and all(
            CTX.close(x.xi, y.xi) and x.tau == y.tau and x.r == y.r for x, y in zip(pa.reports, pb.reports)))
        if not same:
            problems.append(f"seed {seed} pole sets")
    verdict(6, [("denominators_and_pole_sets", not problems, ", ".join(problems[:5]) or "20 systems agree")])


def test_criterion_7_inverse_diagnostics():
    ex = catalog()["E3"]
    sw = sweep(ex.system, 2, 60)
    diag = defect_diagnostics(sw.records)
    report = inverse_diagnosis(sw, ex.system.components[0])
    in_band = lambda x: x is not None and 0.45 <= x <= 0.55  # noqa: E731
    verdict(7, [
        ("S", in_band(diag.S), f"{float(diag.S):.6f}" if diag.S is not None else "None"),
        ("G", in_band(diag.G), f"{float(diag.G):.6f}" if diag.G is not None else "None"),
        ("sufficient_condition", diag.sufficient_from is not None, f"holds from n={diag.sufficient_from}"),
        ("R0_consistent", bool(report.consistent) and report.conclusion == "0 < R_0(f) < inf",
         f"{report.conclusion}, truth {report.ground_truth_R0}"),
    ])


def test_criterion_8_dependence_detection():
    cat = catalog()
    dep, witness = algebraically_independent(cat["E5"].system)
    witness_ok = (not dep and witness is not None
                  and [p.coeffs[0] if p.coeffs else 0 for p in witness] == [1, -1])
    checks = [("E5_dependent_with_witness", witness_ok, "witness " + ", ".join(CTX.mp.nstr(p.coeffs[0].real, 6) if p.coeffs else "0" for p in witness or []))]
    for eid in ("E1", "E2", "E4"):
        ok, w = algebraically_independent(cat[eid].system)
        checks.append((f"{eid}_independent", ok and w is None, "independent" if ok else "dependent"))
    verdict(8, checks)


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    status = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            status = 1
    sys.exit(status)
