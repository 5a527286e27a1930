"""
Named example systems with hand-derived ground truth, a random rational
system generator, and a brute-force series multiplication oracle.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .numerics import Polynomial, PrecisionContext, get_context
from .series import Atom, CoefficientSeries, MeromorphicModel, SystemModel, system_to_json


@dataclass(frozen=True)
class PoleTruth:
    location: str  # exact rational; every reference pole is real
    order: int
    r: tuple  # r_{xi,1..tau} as strings, "inf" allowed


@dataclass(frozen=True)
class GroundTruth:
    poles: tuple
    excluded: tuple = ()
    complete: bool = True
    theta: str | None = None
    star_radii: tuple = ()  # per component (R, R*) as strings
    R0: tuple = ()  # radius of convergence per component
    independent: bool = True
    witness: tuple | None = None  # multipliers as constant strings for m = (1, ..., 1)


@dataclass(frozen=True)
class NamedExample:
    id: str
    description: str
    system: SystemModel
    truth: GroundTruth
    notes: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = system_to_json(self.system)
        out["name"] = self.id
        return out


def value(ctx: PrecisionContext, text: str):
    """Parse a ground-truth number ("inf" or an exact rational)."""
    return ctx.inf if text == "inf" else ctx.mpf(text)


def examples(ctx: PrecisionContext | None = None) -> list[NamedExample]:
    """The six reference systems E1..E6."""
    ctx = ctx or get_context()
    build = lambda poles, atoms=(), name="": MeromorphicModel.build(poles, (), atoms, ctx, name)  # noqa: E731
    lac = Atom.lacunary()
    out = []

    # 1/(1-2z) = -(1/2)/(z-1/2)
    f1 = build([("1/2", ["-1/2"]), ("2", ["1"])], [(lac, [1])], "f1")
    f2 = build([("1/2", ["-1/2"])], [(lac, [1])], "f2")
    out.append(NamedExample(
        "E1", "1/(1-2z) + lacunary + 1/(z-2) and 1/(1-2z) + lacunary, m = (1, 1)",
        SystemModel((f1, f2), (1, 1), "E1"),
        GroundTruth(poles=(PoleTruth("1/2", 1, ("1",)), PoleTruth("2", 1, ("inf",))),
                    theta="1/2", star_radii=(("1", "1"), ("1", "1")), R0=("1/2", "1/2")),
        "z = 2 lies beyond the natural boundary of both components yet f1 - f2 = 1/(z-2).",
    ))

    g1 = build([("1", ["1"]), ("2", ["1"])], name="f1")
    g2 = build([("3", ["1"])], name="f2")
    out.append(NamedExample(
        "E2", "1/(z-1) + 1/(z-2) and 1/(z-3), m = (1, 1)",
        SystemModel((g1, g2), (1, 1), "E2"),
        GroundTruth(poles=(PoleTruth("1", 1, ("2",)), PoleTruth("3", 1, ("inf",))), excluded=("2",),
                    theta="1/2", star_radii=(("2", "2"), ("inf", "inf")), R0=("1", "3")),
        "Removing the pole at 1 also removes the pole at 2, so r_{1,1} = 2.",
    ))

    h = build([("1/2", ["1"])], [(lac, [1])], "f")
    out.append(NamedExample(
        "E3", "scalar 1/(z-1/2) + lacunary, m = 1",
        SystemModel((h,), (1,), "E3"),
        GroundTruth(poles=(PoleTruth("1/2", 1, ("1",)),), theta="1/2", star_radii=(("1", "1"),),
                    R0=("1/2",)),
        "R_1(f) = 1 from the natural boundary.",
    ))

    out.append(NamedExample(
        "E4", "1/(z-1) and 1/(z-2), m = (1, 1)",
        SystemModel((build([("1", ["1"])], name="f1"), build([("2", ["1"])], name="f2")), (1, 1), "E4"),
        GroundTruth(poles=(PoleTruth("1", 1, ("inf",)), PoleTruth("2", 1, ("inf",))), theta="0",
                    star_radii=(("inf", "inf"), ("inf", "inf")), R0=("1", "2")),
    ))

    g = [("1/2", ["1"]), ("3", ["1"])]
    out.append(NamedExample(
        "E5", "(g, g) with g = 1/(z-1/2) + 1/(z-3), m = (1, 1)",
        SystemModel((build(g, name="f1"), build(g, name="f2")), (1, 1), "E5"),
        GroundTruth(poles=(PoleTruth("1/2", 1, ("3",)),), excluded=("3",), complete=False, theta=None,
                    R0=("1/2", "1/2"), independent=False, witness=("1", "-1")),
        "Dependent: f1 - f2 = 0; only one system pole, so the enumeration is incomplete.",
    ))

    e6 = build([("1/2", ["1"]), ("-3/4", ["1"])], [(lac, [1])], "f")
    out.append(NamedExample(
        "E6", "scalar 1/(z-1/2) + 1/(z+3/4) + lacunary, m = 2 (checked through the associated pair (f, z f))",
        SystemModel((e6,), (2,), "E6"),
        GroundTruth(poles=(PoleTruth("1/2", 1, ("1",)), PoleTruth("-3/4", 1, ("1",))), theta="3/4",
                    star_radii=(("1", "1"),), R0=("1/2",)),
    ))
    return out


def get_example(example_id: str, ctx: PrecisionContext | None = None) -> NamedExample:
    for ex in examples(ctx):
        if ex.id.lower() == example_id.lower():
            return ex
    raise KeyError(f"unknown example {example_id!r}; known: E1..E6")


def series_product_oracle(q: Polynomial, series, up_to: int) -> CoefficientSeries:
    """Coefficients ``0..up_to`` of ``q * series`` by direct convolution.

    Kept deliberately naive (explicit double loop with ``fdot``) so it shares
    no code with the solvers it checks.
    """
    ctx = q.ctx
    mp = ctx.mp
    coeffs = list(q.coeffs)
    phi = [series[i] for i in range(up_to + 1)]
    out = []
    for i in range(up_to + 1):
        terms = [(coeffs[j], phi[i - j]) for j in range(min(i, len(coeffs) - 1) + 1)]
        out.append(mp.fdot(terms) if terms else ctx.mpc(0))
    return CoefficientSeries.from_list(out, ctx, "oracle")


# ---------------------------------------------------------------------------
# random rational systems
# ---------------------------------------------------------------------------

def _random_location(rng: random.Random, lo: float, hi: float) -> tuple:
    while True:
        re = Fraction(rng.randint(-40, 40), 8)
        im = Fraction(rng.randint(-40, 40), 8)
        mod2 = re * re + im * im
        if lo * lo <= mod2 <= hi * hi:
            return re, im


def random_rational_system(rng: random.Random, ctx: PrecisionContext | None = None, max_d: int = 3,
                           max_m: int = 2, max_poles: int = 3, min_modulus: float = 0.3,
                           max_modulus: float = 5.0) -> SystemModel:
    """A system of proper rational functions with exact rational data.

    Poles sit on the grid ``(Z + iZ)/8`` with ``min_modulus <= |z| <= max_modulus``;
    residues are small rationals; each pole is simple or double.
    """
    ctx = ctx or get_context()
    d = rng.randint(1, max_d)
    m = tuple(rng.randint(1, max_m) for _ in range(d))
    pool = []
    while len(pool) < max_poles + 2:
        loc = _random_location(rng, min_modulus, max_modulus)
        if loc not in pool:
            pool.append(loc)
    comps = []
    for k in range(d):
        chosen = rng.sample(pool, rng.randint(1, max_poles))
        poles = []
        for re, im in chosen:
            order = 1 if rng.random() < 0.75 else 2
            cs = [(Fraction(rng.randint(-9, 9), rng.randint(1, 4)), Fraction(rng.randint(-9, 9), 4))
                  for _ in range(order)]
            if cs[-1] == (0, 0):
                cs[-1] = (Fraction(1), Fraction(0))
            poles.append((ctx.mpc(str(re), str(im)), [ctx.mpc(str(a), str(b)) for a, b in cs]))
        comps.append(MeromorphicModel.build(poles, (), (), ctx, f"f{k + 1}"))
    return SystemModel(tuple(comps), m, "random")


def pole_count(model: MeromorphicModel) -> int:
    return sum(p.order for p in model.principal_parts)
