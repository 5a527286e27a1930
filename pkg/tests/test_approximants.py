import random
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hermpade.approximants import (
    ApproximantError,
    FromHermitePade,
    defect_diagnostics,
    hermite_pade,
    incomplete_pade,
    normalize_l1,
    pade,
    parse_coefficients,
    format_coefficients,
    record_from_json,
    record_to_json,
    records_to_csv,
)
from hermpade.numerics import Polynomial, get_context
from hermpade.series import CoefficientSeries, MeromorphicModel, SystemModel, associated_system
from hermpade.testbed import random_rational_system, series_product_oracle

CTX = get_context(512)
HALF = CTX.mpf("0.5")


def geometric():
    return MeromorphicModel.build([("1/2", ["-1/2"])], (), (), CTX)


def order_residual(record, series_list):
    """Largest |coefficient| of Q f_k - P_k over 0..n, relative to the scale of the data.

    The record stores both polynomials with the common factor z**lambda_n
    removed; the order condition is stated for the unreduced pair.
    """
    worst = CTX.mpf(0)
    lam = record.lambda_n
    for s, p in zip(series_list, record.P):
        p = p.shift(lam)
        prod = series_product_oracle(record.Q.shift(lam), s, record.n)
        scale = max([abs(prod[i]) for i in range(record.n + 1)] + [CTX.mpf(1)])
        for i in range(record.n + 1):
            c = p.coeffs[i] if i < len(p.coeffs) else 0
            worst = max(worst, abs(prod[i] - c) / scale)
    return worst


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_pade_of_geometric_series(n):
    rec = pade(geometric(), n, 1)
    assert rec.deg_Q == 1 and CTX.close(rec.Q.coeffs[0], -HALF)
    assert rec.null_dimension == 1 and rec.kind == "pade"


def test_polynomial_input_reduces_to_one():
    f = MeromorphicModel.build((), [1, 2, 3], (), CTX)
    rec = pade(f, 6, 1)
    assert rec.Q.degree == 0 and rec.Q.coeffs[0] == 1
    assert rec.P[0].almost_equal(Polynomial([1, 2, 3], CTX), CTX.zero_tolerance)


def test_first_system_converges_to_expected_denominator(catalog):
    rec = hermite_pade(catalog["E1"].system, 24)
    target = Polynomial.from_roots([HALF, CTX.mpf(2)], CTX)
    assert rec.deg_Q == 2 and rec.null_dimension == 1
    assert rec.Q.almost_equal(target, CTX.mpf(10) ** -5)


def test_scalar_example_denominator(catalog):
    f = catalog["E3"].system.components[0]
    for n in (5, 10, 20):
        rec = pade(f, n, 1)
        assert abs(rec.Q.coeffs[0] + HALF) < CTX.mpf(2) ** -n


def test_pade_of_rational_is_exact_past_threshold():
    # 1/((z-2)(z+3)) has numerator degree 0 and two poles
    f = MeromorphicModel.build([(2, ["1/5"]), (-3, ["-1/5"])], (), (), CTX)
    for n in (2, 3, 7):
        rec = pade(f, n, 2)
        assert order_residual(rec, [f.series()]) < CTX.zero_tolerance
        prod = series_product_oracle(rec.Q, f.series(), n + 15)
        assert all(abs(prod[i]) < CTX.zero_tolerance for i in range(1, n + 16))


def test_pade_degree_zero_is_taylor_section():
    rec = pade(geometric(), 4, 0)
    assert rec.Q.coeffs == (1,)
    assert [int(c.real) for c in rec.P[0].coeffs] == [1, 2, 4, 8, 16]


def test_pade_equals_hermite_pade_with_one_component():
    f = geometric() + MeromorphicModel.build([(3, [1])], (), (), CTX)
    a, b = pade(f, 9, 2), hermite_pade([f], 9, (2,))
    assert a.Q.coeffs == b.Q.coeffs and a.P[0].coeffs == b.P[0].coeffs


def test_precondition_errors(catalog):
    with pytest.raises(ValueError):
        hermite_pade(catalog["E1"].system, 0)
    with pytest.raises(ValueError):
        incomplete_pade(geometric(), 3, 1, 2)


def test_insufficient_coefficients():
    short = CoefficientSeries.from_list([1, 2, 4], CTX)
    with pytest.raises(IndexError):
        pade(short, 6, 1)


def test_zero_series_has_no_denominator():
    zero = CoefficientSeries.from_list([0] * 20, CTX)
    rec = pade(zero, 5, 1)
    assert rec.non_unique  # every vector solves the system; the minimal one is Q = 1
    assert rec.Q.degree == 0


def test_incomplete_with_full_defect_matches_pade(catalog):
    f = catalog["E3"].system.components[0]
    a = incomplete_pade(f, 10, 1, 1)
    b = pade(f, 10, 1)
    assert a.Q.almost_equal(b.Q, CTX.mpf(10) ** -100)


def test_hermite_pade_component_is_incomplete_approximant(catalog):
    system = catalog["E1"].system
    hp = hermite_pade(system, 15)
    for k in range(2):
        rec = incomplete_pade(system, 15, 2, 1, FromHermitePade(k, hp))
        assert rec.kind == "incomplete_pade" and rec.m == (2,) and rec.m_star == (1,)
        assert rec.Q.coeffs == hp.Q.coeffs
        assert rec.P[0].degree <= 15 - 1
        assert order_residual(rec, [system.components[k].series()]) < CTX.zero_tolerance


def test_tau_when_numerator_degree_does_not_bind():
    # polynomial f: q = 1, p = f with deg 2, so the first term n - m* - deg p is large
    f = MeromorphicModel.build((), [1, 1, 1], (), CTX)
    rec = incomplete_pade(f, 10, 2, 1)
    assert rec.lambda_n == 0 and rec.m_n == 0
    assert rec.tau_n == 2 - rec.lambda_n - rec.m_n


def test_normalize_l1_examples():
    nd = normalize_l1(Polynomial([-HALF, 1], CTX))
    assert [CTX.close(a, b) for a, b in zip(nd.moduli(), [CTX.mpf(1) / 3, CTX.mpf(2) / 3])] == [True, True]
    assert normalize_l1(Polynomial.monomial(2, CTX)).leading == 1
    p = Polynomial([1, 2, 3], CTX)
    for c in (CTX.mpc(-2, 5), CTX.mpf("0.001")):
        assert all(CTX.close(a, b) for a, b in zip(normalize_l1(p.scale(c)).lambda_coeffs,
                                                      normalize_l1(p).lambda_coeffs))


def test_defect_diagnostics_first_system(catalog):
    recs = [hermite_pade(catalog["E1"].system, n) for n in range(10, 30)]
    diag = defect_diagnostics(recs)
    assert CTX.close(diag.S, HALF, 1e-5) and CTX.close(diag.G, CTX.mpf(2), 1e-5)
    assert diag.S <= diag.G


def test_defect_diagnostics_skips_records_without_zeros(catalog):
    f = catalog["E3"].system.components[0]
    recs = [pade(f, n, 1) for n in range(3, 15)]
    blank = replace(recs[-1], Q=Polynomial.one(CTX), zeros=(), common_zeros=(), m_n=0)
    diag = defect_diagnostics(recs[:-1] + [blank], min_suffix=3)
    assert 14 not in [n for n, zs in diag.zeros.items() if zs]
    assert CTX.close(diag.S, HALF, 1e-3) and CTX.close(diag.G, HALF, 1e-3)


def test_sufficient_condition_when_defect_saturates(catalog):
    f = catalog["E3"].system.components[0]
    recs = [incomplete_pade(f, n, 1, 1) for n in range(3, 20)]
    assert all(r.m_n + r.tau_n == 1 for r in recs)
    assert defect_diagnostics(recs).sufficient_from == 4


def test_defect_diagnostics_empty():
    with pytest.raises(ValueError):
        defect_diagnostics([])


def test_record_round_trips(catalog):
    rec = hermite_pade(catalog["E1"].system, 12)
    back = record_from_json(record_to_json(rec))
    assert back.Q.coeffs == rec.Q.coeffs and [p.coeffs for p in back.P] == [p.coeffs for p in rec.P]
    assert (back.n, back.m, back.lambda_n, back.m_n, back.tau_n) == (rec.n, rec.m, rec.lambda_n, rec.m_n, rec.tau_n)
    assert parse_coefficients(format_coefficients(rec.Q), CTX).coeffs == rec.Q.coeffs
    header = records_to_csv([rec]).splitlines()[0]
    assert header == "n,deg_Q,lambda_n,m_n,tau_n,null_dimension,Q_coefficients"


# -- properties ---------------------------------------------------------------

seeds = st.integers(0, 10 ** 6)


@given(seeds, st.integers(0, 6))
def test_order_conditions_and_degree_caps(seed, extra):
    system = random_rational_system(random.Random(seed), CTX)
    n = max(system.m) + extra
    rec = hermite_pade(system, n)
    assert rec.Q.degree <= system.total
    assert all(p.degree <= n - mk for p, mk in zip(rec.P, system.m))
    assert rec.tau_n >= 0
    assert order_residual(rec, [c.series() for c in system.components]) < CTX.mpf(2) ** -200


@given(seeds, st.integers(0, 6))
def test_associated_system_gives_same_denominator(seed, extra):
    system = random_rational_system(random.Random(seed), CTX)
    n = system.total + extra
    a = hermite_pade(system, n)
    b = hermite_pade(associated_system(system), n)
    if a.null_dimension == 1:
        assert a.Q.almost_equal(b.Q, CTX.mpf(10) ** -50)


@given(seeds, st.integers(0, 4))
def test_permuted_equations_give_same_denominator(seed, extra):
    system = random_rational_system(random.Random(seed), CTX)
    rec = hermite_pade(system, system.total + extra)
    if rec.null_dimension != 1:
        return
    flipped = SystemModel(system.components[::-1], system.m[::-1], "flipped")
    assert rec.Q.almost_equal(hermite_pade(flipped, rec.n).Q, CTX.mpf(10) ** -50)


def test_numerically_zero_denominator_is_an_error():
    with pytest.raises(ApproximantError):
        from hermpade.approximants import _finish
        _finish("hermite_pade", 3, (1,), 1, (1,), [0, 0], [geometric().series()], [2], 1, CTX.mpf(1), CTX)
