"""Rates on the lacunary examples measured over a row that reaches the next gap.

The lacunary tail has no coefficients between indices 25 and 119, so for
30 <= n <= 60 the approximants of E1 and E3 already equal their limits and
every error in that window is roundoff.  Over n = 2..122 the row crosses
the coefficients at 24 and 120 and the predicted rates become measurable.
These tests record that evidence; they do not stand in for the acceptance
criteria, which keep their stated windows.
"""
import pytest

from hermpade.numerics import get_context
from hermpade.row_analysis import RateFitError, convergence_on_circle, denominator_rate, sweep
from hermpade.testbed import get_example

pytestmark = pytest.mark.slow

CTX = get_context(512)
FULL = (2, 122)


@pytest.fixture(scope="module")
def rows():
    return {eid: sweep(get_example(eid, CTX).system, *FULL) for eid in ("E1", "E3")}


@pytest.mark.parametrize("eid", ["E1", "E3"])
def test_inner_window_is_pure_roundoff(rows, eid):
    sw = rows[eid]
    for n in range(30, 61):
        rec = sw.record(n)
        assert sw.norms[n - FULL[0]] <= rec.noise_floor * 4
    with pytest.raises(RateFitError):
        denominator_rate(sw, (30, 60))


@pytest.mark.parametrize("eid", ["E1", "E3"])
def test_denominator_rate_over_full_row(rows, eid):
    est = denominator_rate(rows[eid], FULL)
    assert abs(est.fitted_rate - 0.5) <= 0.05


@pytest.mark.parametrize("precision", ["double", "mp"])
def test_circle_rate_over_full_row(rows, precision):
    ex = get_example("E3", CTX)
    est = convergence_on_circle(rows["E3"], ex.system, 0, 0.75, 256, FULL, precision=precision)
    assert abs(est.predicted - 0.75) < 1e-12
    assert abs(est.fitted_rate - 0.75) <= 0.05
