import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hermpade.numerics import Polynomial, get_context
from hermpade.series import (
    Atom,
    CoefficientSeries,
    InsufficientCoefficients,
    MeromorphicModel,
    SchemaError,
    SystemModel,
    associated_system,
    disk_radii_Rm,
    model_from_json,
    radius_R0,
    system_from_json,
    system_to_json,
    taylor_coefficients,
)
from hermpade.testbed import random_rational_system

CTX = get_context(512)


def model(poles, atoms=(), poly=()):
    return MeromorphicModel.build(poles, poly, atoms, CTX)


def test_geometric_series_coefficients():
    s = taylor_coefficients(model([("1/2", ["-1/2"])]), 40)
    assert all(s[n] == CTX.mpf(2) ** n for n in range(41))


def test_pole_at_two_coefficients():
    s = taylor_coefficients(model([(2, [1])]), 30)
    assert all(CTX.close(s[n], -CTX.mpf(2) ** (-n - 1)) for n in range(31))


def test_lacunary_coefficients():
    s = taylor_coefficients(model([], [(Atom.lacunary(), [1])]), 130)
    assert [int(s[n].real) for n in range(8)] == [0, 1, 1, 0, 0, 0, 1, 0]
    assert s[24] == 1 and s[120] == 1 and s[119] == 0


def test_double_pole_coefficients():
    # 1/(z-1)^2 = sum (n+1) z^n
    s = taylor_coefficients(model([(1, [0, 1])]), 12)
    assert [int(s[n].real) for n in range(13)] == list(range(1, 14))


def test_pole_at_origin_rejected():
    with pytest.raises(ValueError):
        model([(0, [1])])


def test_coefficient_series_cache_and_bounds():
    calls = []

    def producer(n):
        calls.append(n)
        return CTX.mpc(n)
    s = CoefficientSeries(producer, CTX)
    assert s.prefix(5) == [CTX.mpc(i) for i in range(5)]
    s[3]
    assert calls.count(3) == 1
    finite = CoefficientSeries.from_list([1, 2], CTX)
    with pytest.raises(InsufficientCoefficients):
        finite[5]


def test_radius_R0_examples(catalog):
    geo = CoefficientSeries(lambda n: CTX.mpf(2) ** n, CTX)
    assert abs(radius_R0(geo, window=32, n_max=200) - CTX.mpf("0.5")) < 1e-2
    f2 = catalog["E1"].system.components[1]
    assert radius_R0(f2) == CTX.mpf("0.5")
    assert radius_R0(model([], poly=[1, 2, 3])) == CTX.inf


def test_radius_R0_all_zero_fails():
    with pytest.raises(ValueError):
        radius_R0(CoefficientSeries(lambda n: CTX.mpc(0), CTX), window=16, n_max=64)


def test_disk_radii_examples():
    assert disk_radii_Rm(model([(1, [1]), (2, [1])]), 1) == 2
    assert disk_radii_Rm(model([("1/2", [1])], [(Atom.lacunary(), [1])]), 1) == 1
    assert disk_radii_Rm(model([(1, [1]), (3, [1])]), 2) == CTX.inf


def test_associated_system_examples():
    f = model([(1, [1])])
    assoc = associated_system(SystemModel((f,), (2,)))
    assert assoc.m == (1, 1) and assoc.d == 2
    zf = assoc.components[1]
    for n in range(10):  # z/(z-1) = -sum_{n>=1} z^n
        assert CTX.close(zf.taylor_coefficient(n), CTX.mpf(0 if n == 0 else -1))
    pair = SystemModel((f, model([(2, [1])])), (1, 1))
    same = associated_system(pair)
    assert same.m == (1, 1)
    for a, b in zip(same.components, pair.components):
        assert [a.taylor_coefficient(n) for n in range(8)] == [b.taylor_coefficient(n) for n in range(8)]
    three = associated_system(SystemModel((f, model([(2, [1])])), (2, 1)))
    assert three.d == 3 and three.m == (1, 1, 1)


def test_json_round_trip(catalog):
    for ex in catalog.values():
        text = json.dumps(system_to_json(ex.system))
        back = system_from_json(text, CTX)
        assert back.m == ex.system.m
        for a, b in zip(back.components, ex.system.components):
            assert all(a.taylor_coefficient(n) == b.taylor_coefficient(n) for n in range(30))


@pytest.mark.parametrize("bad", [
    "not json",
    {"m": [1]},
    {"m": [1], "components": [{"poles": [{"re": 0, "im": 0, "principal": [[1, 0]]}]}]},
    {"m": [1, 1], "components": [{"poles": []}]},
    {"m": [1], "components": [{"tail": {"kind": "bessel"}}]},
    {"m": [1], "components": [{"colour": "red"}]},
])
def test_schema_errors(bad):
    with pytest.raises(SchemaError):
        system_from_json(bad if isinstance(bad, str) else json.dumps(bad), CTX)


def test_power_series_atom_radius():
    atom = Atom.power_series("3/2")
    f = model([], [(atom, [1])])
    assert f.tail_radius() == CTX.mpf("1.5")
    assert disk_radii_Rm(f, 0) == CTX.mpf("1.5")
    with pytest.raises(ValueError):
        atom.evaluate(CTX.mpf(2), CTX)


# -- properties ---------------------------------------------------------------

@st.composite
def rational_models(draw):
    k = draw(st.integers(1, 3))
    poles, seen = [], set()
    for _ in range(k):
        loc = (draw(st.integers(-16, 16)), draw(st.integers(-16, 16)))
        if loc == (0, 0) or loc in seen:
            continue
        seen.add(loc)
        order = draw(st.integers(1, 2))
        cs = [draw(st.integers(-5, 5)) for _ in range(order - 1)] + [draw(st.integers(1, 5))]
        poles.append((CTX.mpc(loc[0] / 4, loc[1] / 4), cs))
    if not poles:
        poles = [(CTX.mpc(1), [1])]
    return model(poles)


@given(rational_models(), rational_models())
def test_sum_of_models_sums_coefficients(f, g):
    h = f + g
    for n in range(25):
        assert CTX.close(h.taylor_coefficient(n), f.taylor_coefficient(n) + g.taylor_coefficient(n))


@given(rational_models())
def test_rational_coefficients_satisfy_denominator_recurrence(f):
    q = Polynomial.from_roots([loc for loc, order in f.poles() for _ in range(order)], CTX)
    deg = q.degree
    for n in range(deg, deg + 20):
        acc = sum(q.coeffs[j] * f.taylor_coefficient(n - j) for j in range(deg + 1))
        assert abs(acc) <= CTX.zero_tolerance * 10 ** 6


@given(rational_models(), st.booleans())
def test_disk_radii_monotone_and_R0(f, lacunary):
    if lacunary:
        f = f + model([], [(Atom.lacunary(), [1])])
    radii = [disk_radii_Rm(f, m) for m in range(6)]
    assert all(a <= b for a, b in zip(radii, radii[1:]))
    assert radii[0] == radius_R0(f)


@given(st.integers(0, 10 ** 6))
def test_associated_system_preserves_disk_radii(seed):
    system = random_rational_system(random.Random(seed), CTX)
    assoc = associated_system(system)
    union = sum(system.components[1:], system.components[0])
    union_bar = sum(assoc.components[1:], assoc.components[0])
    assert sorted((abs(z), o) for z, o in union.poles()) == sorted((abs(z), o) for z, o in union_bar.poles())
    for m in range(4):
        assert disk_radii_Rm(union, m) == disk_radii_Rm(union_bar, m)
