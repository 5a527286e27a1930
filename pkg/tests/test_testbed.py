import random

import pytest

from hermpade.numerics import Polynomial, get_context
from hermpade.series import MeromorphicModel, system_to_json
from hermpade.system_poles import enumerate_system_poles, predicted_theta
from hermpade.testbed import (
    examples,
    get_example,
    pole_count,
    random_rational_system,
    series_product_oracle,
    value,
)

CTX = get_context(512)


def test_catalog_ids():
    assert [ex.id for ex in examples(CTX)] == ["E1", "E2", "E3", "E4", "E5", "E6"]
    assert get_example("e3", CTX).system.m == (1,)
    with pytest.raises(KeyError):
        get_example("E7", CTX)


def test_ground_truth_theta_follows_from_radii():
    for ex in examples(CTX):
        t = ex.truth
        if t.theta is None:
            continue
        from_radii = max(abs(CTX.convert(p.location)) / min(value(CTX, r) for r in p.r) for p in t.poles)
        assert from_radii == value(CTX, t.theta)


def test_ground_truth_theta_is_reproducible(quiet):
    for ex in examples(CTX):
        if ex.truth.complete:
            assert predicted_theta(enumerate_system_poles(ex.system)) == value(CTX, ex.truth.theta)


def test_examples_export_as_schema_json():
    for ex in examples(CTX):
        doc = ex.to_json()
        assert doc["name"] == ex.id and doc["m"] == list(ex.system.m)
        assert doc["components"] == system_to_json(ex.system)["components"]


def test_oracle_identity():
    s = MeromorphicModel.build([(3, [1])], (), (), CTX).series()
    out = series_product_oracle(Polynomial.one(CTX), s, 10)
    assert [out[i] for i in range(11)] == [s[i] for i in range(11)]


def test_oracle_kills_geometric_series():
    s = MeromorphicModel.build([("1/2", ["-1/2"])], (), (), CTX).series()
    out = series_product_oracle(Polynomial([CTX.mpf("-0.5"), 1], CTX), s, 20)
    assert out[0] == CTX.mpf("-0.5") and all(out[i] == 0 for i in range(1, 21))


def test_oracle_shift():
    s = MeromorphicModel.build([(2, [1])], (), (), CTX).series()
    out = series_product_oracle(Polynomial.monomial(1, CTX), s, 10)
    assert out[0] == 0 and all(out[i] == s[i - 1] for i in range(1, 11))


def test_oracle_needs_coefficients():
    from hermpade.series import CoefficientSeries
    with pytest.raises(IndexError):
        series_product_oracle(Polynomial.one(CTX), CoefficientSeries.from_list([1, 2], CTX), 5)


def test_random_systems_respect_bounds():
    for seed in range(30):
        system = random_rational_system(random.Random(seed), CTX)
        assert 1 <= system.d <= 3 and all(1 <= mk <= 2 for mk in system.m)
        for f in system.components:
            assert 1 <= pole_count(f)
            assert all(0.3 <= abs(loc) <= 5 for loc, _ in f.poles())


def test_random_systems_are_reproducible():
    a = system_to_json(random_rational_system(random.Random(7), CTX))
    b = system_to_json(random_rational_system(random.Random(7), CTX))
    assert a == b


def test_shifted_pair_example_round_trips_through_associated_system():
    from hermpade.series import associated_system
    ex = get_example("E6", CTX)
    direct = enumerate_system_poles(ex.system)
    unrolled = enumerate_system_poles(associated_system(ex.system))
    assert [(r.xi, r.tau, r.r) for r in direct.reports] == [(r.xi, r.tau, r.r) for r in unrolled.reports]
    assert associated_system(ex.system).m == (1, 1)
