"""
Formal power expansions: black-box coefficient streams and structural models.

A :class:`MeromorphicModel` is a finite sum of principal parts
``sum_j c_j / (z - xi)**j`` plus an :class:`EntireTail`.  The tail is a
polynomial plus "atoms": transcendental building blocks with a finite radius
of analyticity, each multiplied by a polynomial.  Two atom kinds exist:

``lacunary_factorial``
    ``sum_{k>=1} z**(k!)`` (coefficient 1 at indices 1, 2, 6, 24, ...),
    natural boundary ``|z| = 1``.
``power_series``
    ``sum_{n>=0} (z/R)**n / (n+1)**2``, analytic in ``|z| < R`` with a
    non-polar singularity at ``z = R``.

Distinct atoms are treated as linearly independent over rational functions,
which makes cancellation of tails a finite linear question.
"""
from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _accel
from .numerics import Polynomial, PrecisionContext, get_context

LACUNARY = "lacunary_factorial"
POWER_SERIES = "power_series"
POLYNOMIAL = "polynomial"
ATOM_KINDS = (LACUNARY, POWER_SERIES)


class SchemaError(ValueError):
    """Malformed system description."""


class InsufficientCoefficients(IndexError):
    """A coefficient beyond the known prefix of a black-box series was requested."""


# ---------------------------------------------------------------------------
# coefficient streams
# ---------------------------------------------------------------------------

class CoefficientSeries:
    """Lazy, cached stream ``n -> phi_n`` of Taylor coefficients.

    The cache only grows; growth is serialized by a lock, while reads of an
    already cached prefix need no locking.
    """

    def __init__(self, producer: Callable[[int], object], ctx: PrecisionContext | None = None,
                 name: str = "series"):
        self.ctx = ctx or get_context()
        self._producer = producer
        self._cache: list = []
        self._lock = threading.Lock()
        self.name = name

    @classmethod
    def from_list(cls, coeffs: Sequence, ctx: PrecisionContext | None = None, name: str = "data"):
        """Series that only knows ``len(coeffs)`` coefficients."""
        ctx = ctx or get_context()
        data = [ctx.convert(c) for c in coeffs]

        def producer(n):
            if n >= len(data):
                raise InsufficientCoefficients(f"{name}: only {len(data)} coefficients known, asked for index {n}")
            return data[n]

        return cls(producer, ctx, name)

    def __getitem__(self, n: int):
        if n < 0:
            return self.ctx.mpc(0)
        if n < len(self._cache):
            return self._cache[n]
        with self._lock:
            while len(self._cache) <= n:
                self._cache.append(self.ctx.convert(self._producer(len(self._cache))))
        return self._cache[n]

    def prefix(self, count: int) -> list:
        if count > 0:
            self[count - 1]
        return list(self._cache[:count])

    def __add__(self, other: "CoefficientSeries") -> "CoefficientSeries":
        return CoefficientSeries(lambda n: self[n] + other[n], self.ctx, f"({self.name}+{other.name})")

    def scaled(self, c) -> "CoefficientSeries":
        c = self.ctx.convert(c)
        return CoefficientSeries(lambda n: c * self[n], self.ctx, self.name)

    def __repr__(self):
        return f"CoefficientSeries({self.name!r}, cached={len(self._cache)})"


# ---------------------------------------------------------------------------
# structural pieces
# ---------------------------------------------------------------------------

def _factorial_indices(limit: int) -> set:
    out, k, f = set(), 1, 1
    while f <= limit:
        out.add(f)
        k += 1
        f *= k
    return out


@dataclass(frozen=True)
class Atom:
    """Transcendental tail building block (see module docstring)."""

    kind: str
    radius_text: str = "1"

    def __post_init__(self):
        if self.kind not in ATOM_KINDS:
            raise SchemaError(f"unsupported tail kind {self.kind!r}")
        if self.kind == LACUNARY and self.radius_text != "1":
            raise SchemaError("lacunary_factorial tail has radius 1")

    @classmethod
    def lacunary(cls) -> "Atom":
        return cls(LACUNARY, "1")

    @classmethod
    def power_series(cls, radius) -> "Atom":
        return cls(POWER_SERIES, str(radius))

    def radius(self, ctx: PrecisionContext):
        return ctx.mpf(self.radius_text)

    def coefficient(self, n: int, ctx: PrecisionContext):
        if n < 0:
            return ctx.mpf(0)
        if self.kind == LACUNARY:
            return ctx.mpf(1) if n in _factorial_indices(n) else ctx.mpf(0)
        return self.radius(ctx) ** (-n) / (n + 1) ** 2

    def evaluate(self, z, ctx: PrecisionContext):
        mp = ctx.mp
        r = abs(z)
        if self.kind == LACUNARY:
            if r >= 1:
                raise ValueError("lacunary tail is not defined on or beyond |z| = 1")
            acc, k, f = ctx.mpc(0), 1, 1
            stop = ctx.eps / 1024
            while True:
                if r == 0 or r ** f < stop:
                    break
                acc += z ** f
                k += 1
                f *= k
            return acc
        R = self.radius(ctx)
        if r >= R:
            raise ValueError(f"power_series tail is not defined on or beyond |z| = {self.radius_text}")
        w = z / R
        term, acc, n = ctx.mpc(1), ctx.mpc(0), 0
        stop = ctx.eps / 1024
        aw = abs(w)
        while True:
            acc += term / (n + 1) ** 2
            n += 1
            term *= w
            if aw ** n / (n + 1) ** 2 < stop:
                return acc

    def evaluate_grid(self, z: np.ndarray, floor: float = 1e-18) -> np.ndarray:
        if self.kind == LACUNARY:
            return _accel.lacunary_grid(z, floor)
        return _accel.dilog_grid(z, float(self.radius_text if "/" not in self.radius_text
                                          else eval_fraction(self.radius_text)), floor)


def eval_fraction(text: str) -> float:
    from fractions import Fraction
    return float(Fraction(text))


@dataclass(frozen=True)
class PrincipalPart:
    """``sum_{j=1..tau} c_j / (z - location)**j`` with ``c_tau != 0``."""

    location: object
    coefficients: tuple

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("principal part needs at least one coefficient")
        if self.location == 0:
            raise SchemaError("pole at the origin: the expansion must be a Taylor series at 0")
        if self.coefficients[-1] == 0:
            raise ValueError("leading principal coefficient must be nonzero")

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def taylor_coefficient(self, n: int):
        # 1/(z-xi)^j = (-1)^j xi^-j sum_n C(n+j-1, j-1) (z/xi)^n
        xi = self.location
        inv = 1 / xi
        base = inv ** (n + 1)
        acc = 0
        for j, c in enumerate(self.coefficients, start=1):
            acc += c * (-1) ** j * math.comb(n + j - 1, j - 1) * base
            base *= inv
        return acc

    def evaluate(self, z):
        w = 1 / (z - self.location)
        acc, power = 0, 1
        for c in self.coefficients:
            power *= w
            acc += c * power
        return acc


@dataclass(frozen=True)
class EntireTail:
    """Polynomial part plus atoms, each atom carrying a polynomial multiplier."""

    polynomial: Polynomial
    atoms: tuple = ()  # ((Atom, Polynomial multiplier), ...), multipliers nonzero

    @property
    def kinds(self) -> tuple:
        out = [POLYNOMIAL] if not self.polynomial.is_zero() else []
        return tuple(out + [a.kind for a, _ in self.atoms])

    def analyticity_radius(self, ctx: PrecisionContext):
        radii = [a.radius(ctx) for a, _ in self.atoms]
        return min(radii) if radii else ctx.inf

    def coefficient(self, n: int, ctx: PrecisionContext):
        acc = self.polynomial[n]
        for atom, mult in self.atoms:
            for l, c in enumerate(mult.coeffs):
                if n - l < 0:
                    break
                a = atom.coefficient(n - l, ctx)
                if a:
                    acc += c * a
        return acc

    def evaluate(self, z, ctx: PrecisionContext):
        acc = self.polynomial(z)
        for atom, mult in self.atoms:
            acc += mult(z) * atom.evaluate(z, ctx)
        return acc


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------

def _poly_in_shift(b: Sequence, xi, ctx: PrecisionContext) -> Polynomial:
    """Expand ``sum_e b_e (z - xi)**e`` into monomials."""
    acc = Polynomial([], ctx)
    lin = Polynomial([-xi, 1], ctx)
    for c in reversed(list(b)):
        acc = acc * lin + c
    return acc


def _trim_principal(coeffs: list, scale, ctx: PrecisionContext) -> list:
    cut = ctx.zero_tolerance * scale
    while coeffs and abs(coeffs[-1]) <= cut:
        coeffs.pop()
    return coeffs


class MeromorphicModel:
    """Structural description of one function: principal parts plus an entire tail."""

    def __init__(self, principal_parts: Iterable[PrincipalPart] = (), tail: EntireTail | None = None,
                 ctx: PrecisionContext | None = None, name: str = ""):
        self.ctx = ctx or get_context()
        parts = sorted(principal_parts, key=lambda p: (abs(p.location), float(self.ctx.mp.arg(p.location))))
        for a, b in zip(parts, parts[1:]):
            if self.ctx.close(a.location, b.location):
                raise ValueError("pole locations must be pairwise distinct")
        self.principal_parts = tuple(parts)
        self.tail = tail or EntireTail(Polynomial([], self.ctx))
        self.name = name
        self._series: CoefficientSeries | None = None

    # constructors ----------------------------------------------------------

    @classmethod
    def build(cls, poles: Iterable = (), polynomial: Iterable = (), atoms: Iterable = (),
              ctx: PrecisionContext | None = None, name: str = "") -> "MeromorphicModel":
        """Convenience constructor.

        ``poles`` is an iterable of ``(location, [c_1, ..., c_tau])``; ``atoms``
        an iterable of ``(Atom, multiplier_coeffs)``.
        """
        ctx = ctx or get_context()
        parts = [PrincipalPart(ctx.convert(loc), tuple(ctx.convert(c) for c in cs)) for loc, cs in poles]
        atom_terms = []
        for atom, mult in atoms:
            mult = mult if isinstance(mult, Polynomial) else Polynomial(mult, ctx)
            if not mult.is_zero():
                atom_terms.append((atom, mult))
        tail = EntireTail(Polynomial(polynomial, ctx), tuple(atom_terms))
        return cls(parts, tail, ctx, name)

    @classmethod
    def pole(cls, location, residue=1, ctx=None) -> "MeromorphicModel":
        """``residue / (z - location)``."""
        return cls.build([(location, [residue])], ctx=ctx)

    # queries ---------------------------------------------------------------

    def __repr__(self):
        mp = self.ctx.mp
        poles = ", ".join(f"{mp.nstr(p.location, 6)}^{p.order}" for p in self.principal_parts)
        return f"MeromorphicModel({self.name or 'f'}: poles[{poles}] tail{self.tail.kinds})"

    def is_zero(self) -> bool:
        return not self.principal_parts and self.tail.polynomial.is_zero() and not self.tail.atoms

    def is_rational(self) -> bool:
        return not self.tail.atoms

    def poles(self) -> list[tuple]:
        """``[(location, order), ...]`` ordered by modulus."""
        return [(p.location, p.order) for p in self.principal_parts]

    def principal_at(self, location) -> PrincipalPart | None:
        for p in self.principal_parts:
            if self.ctx.close(p.location, location):
                return p
        return None

    def tail_radius(self):
        return self.tail.analyticity_radius(self.ctx)

    def taylor_coefficient(self, n: int):
        acc = self.tail.coefficient(n, self.ctx)
        for p in self.principal_parts:
            acc += p.taylor_coefficient(n)
        return self.ctx.convert(acc)

    def series(self) -> CoefficientSeries:
        if self._series is None:
            self._series = CoefficientSeries(self.taylor_coefficient, self.ctx, self.name or "model")
            self._series.model = self
        return self._series

    def evaluate(self, z):
        z = self.ctx.convert(z)
        acc = self.tail.evaluate(z, self.ctx)
        for p in self.principal_parts:
            acc += p.evaluate(z)
        return acc

    __call__ = evaluate

    def evaluate_grid(self, z: np.ndarray, floor: float = 1e-18) -> np.ndarray:
        """Double-precision evaluation on an array of points (numba kernels when available)."""
        z = np.asarray(z, dtype=np.complex128)
        out = _accel.horner_grid(self.tail.polynomial.to_complex(), z) if not self.tail.polynomial.is_zero() \
            else np.zeros(z.size, np.complex128)
        if self.principal_parts:
            tau = max(p.order for p in self.principal_parts)
            locs = np.array([complex(p.location) for p in self.principal_parts], dtype=np.complex128)
            orders = np.array([p.order for p in self.principal_parts], dtype=np.int64)
            cm = np.zeros((len(self.principal_parts), tau), dtype=np.complex128)
            for i, p in enumerate(self.principal_parts):
                cm[i, : p.order] = [complex(c) for c in p.coefficients]
            out = out + _accel.principal_grid(locs, orders, cm, z)
        for atom, mult in self.tail.atoms:
            out = out + _accel.horner_grid(mult.to_complex(), z) * atom.evaluate_grid(z, floor)
        return out

    # algebra -----------------------------------------------------------------

    def scale(self, c) -> "MeromorphicModel":
        return self.times_polynomial(Polynomial([c], self.ctx))

    def shift(self, j: int) -> "MeromorphicModel":
        """Exact ``z**j * f``."""
        return self.times_polynomial(Polynomial.monomial(j, self.ctx))

    def times_polynomial(self, p: Polynomial) -> "MeromorphicModel":
        """Exact ``p * f``: principal parts re-expanded at each pole, tail multiplied."""
        ctx = self.ctx
        if p.is_zero():
            return MeromorphicModel([], None, ctx)
        poly = self.tail.polynomial * p
        parts = []
        for part in self.principal_parts:
            a = p.taylor_at(part.location)
            tau = part.order
            prin = [ctx.mpc(0)] * tau
            regular = [ctx.mpc(0)] * max(len(a) - 1, 0)
            scale = max(abs(c) for c in part.coefficients) * max(abs(x) for x in a)
            for i, c in enumerate(part.coefficients, start=1):
                for l, al in enumerate(a):
                    e = l - i
                    if e < 0:
                        prin[-e - 1] += c * al
                    else:
                        regular[e] += c * al
            prin = _trim_principal(prin, scale, ctx)
            if prin:
                parts.append(PrincipalPart(part.location, tuple(prin)))
            if regular:
                poly = poly + _poly_in_shift(regular, part.location, ctx)
        atoms = tuple((atom, mult * p) for atom, mult in self.tail.atoms)
        atoms = tuple((a, m) for a, m in atoms if not m.is_zero())
        return MeromorphicModel(parts, EntireTail(poly, atoms), ctx, self.name)

    def __add__(self, other: "MeromorphicModel") -> "MeromorphicModel":
        return combine([self, other], [1, 1])

    def __sub__(self, other: "MeromorphicModel") -> "MeromorphicModel":
        return combine([self, other], [1, -1])


def combine(models: Sequence[MeromorphicModel], weights: Sequence) -> MeromorphicModel:
    """``sum_i w_i * models[i]`` with weights that may be scalars or polynomials."""
    if not models:
        raise ValueError("nothing to combine")
    ctx = models[0].ctx
    scaled = []
    for f, w in zip(models, weights):
        w = w if isinstance(w, Polynomial) else Polynomial([w], ctx)
        if not w.is_zero():
            scaled.append(f.times_polynomial(w))
    # merge principal parts by location
    buckets: list[list] = []  # [location, coeffs, scale]
    poly = Polynomial([], ctx)
    atom_mults: dict = {}
    for f in scaled:
        poly = poly + f.tail.polynomial
        for atom, mult in f.tail.atoms:
            atom_mults[atom] = atom_mults.get(atom, Polynomial([], ctx)) + mult
        for part in f.principal_parts:
            for b in buckets:
                if ctx.close(b[0], part.location):
                    break
            else:
                b = [part.location, [], ctx.mpf(0)]
                buckets.append(b)
            cs = b[1]
            while len(cs) < part.order:
                cs.append(ctx.mpc(0))
            for i, c in enumerate(part.coefficients):
                cs[i] += c
            b[2] = max(b[2], max(abs(c) for c in part.coefficients))
    parts = []
    for loc, cs, scale in buckets:
        cs = _trim_principal(cs, scale, ctx)
        if cs:
            parts.append(PrincipalPart(loc, tuple(cs)))
    atoms = tuple((a, m) for a, m in atom_mults.items() if not m.is_zero())
    return MeromorphicModel(parts, EntireTail(poly, atoms), ctx)


@dataclass(frozen=True)
class SystemModel:
    """A system ``f = (f_1, ..., f_d)`` with multi-index ``m``."""

    components: tuple
    m: tuple
    name: str = ""
    origin: tuple | None = field(default=None, compare=False)  # (k, j) per component when associated

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if not self.components:
            raise SchemaError("a system needs at least one component")
        if len(self.components) != len(self.m):
            raise SchemaError("multi-index length must match the number of components")
        if any(x < 1 for x in self.m):
            raise SchemaError("multi-index entries must be positive integers")

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def total(self) -> int:
        return sum(self.m)

    @property
    def ctx(self) -> PrecisionContext:
        return self.components[0].ctx

    def with_m(self, m) -> "SystemModel":
        return SystemModel(self.components, tuple(m), self.name)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def taylor_coefficients(model: MeromorphicModel, up_to: int) -> CoefficientSeries:
    """Exact Taylor coefficients of a structural model, prefilled through ``up_to``."""
    for p in model.principal_parts:
        if p.location == 0:
            raise SchemaError("pole at the origin")
    s = model.series()
    s.prefix(up_to + 1)
    return s


def radius_R0(obj, window: int = 32, n_max: int | None = None):
    """Radius of convergence at 0.

    Exact for a :class:`MeromorphicModel` (or a :class:`SystemModel`, taking
    the minimum over components).  For a black-box :class:`CoefficientSeries`
    the estimate ``1 / max |phi_n|**(1/n)`` over the trailing ``window``
    coefficients below ``n_max`` (default ``4 * window``) stands in for the
    limsup.
    """
    if isinstance(obj, SystemModel):
        return min(radius_R0(f) for f in obj.components)
    if isinstance(obj, MeromorphicModel):
        ctx = obj.ctx
        rs = [abs(p.location) for p in obj.principal_parts] + [obj.tail_radius()]
        return min(rs)
    if window < 8:
        raise ValueError("window must be at least 8")
    ctx = obj.ctx
    n_max = n_max or 4 * window
    best = ctx.mpf(0)
    for n in range(max(1, n_max - window), n_max):
        a = abs(obj[n])
        if a:
            best = max(best, a ** (ctx.mpf(1) / n))
    if best == 0:
        raise ValueError("all sampled coefficients are zero")
    return 1 / best


def singularity_moduli(model: MeromorphicModel) -> list[tuple]:
    """``[(modulus, pole_order_or_None), ...]`` sorted; ``None`` marks a non-polar singularity."""
    out = [(abs(p.location), p.order) for p in model.principal_parts]
    out += [(a.radius(model.ctx), None) for a, _ in model.tail.atoms]
    return sorted(out, key=lambda t: (t[0], t[1] is None))


def disk_radii_Rm(model: MeromorphicModel, m: int):
    """Radius of the largest disk about 0 where ``model`` has at most ``m`` poles.

    Poles count with multiplicity; the tail radius (a natural boundary or
    branch circle) caps the result.
    """
    ctx = model.ctx
    cap = model.tail_radius()
    count = 0
    poles = sorted(model.poles(), key=lambda t: abs(t[0]))
    i = 0
    while i < len(poles):
        rho = abs(poles[i][0])
        if rho >= cap:
            break
        # every pole on this circle enters at once
        same = 0
        while i < len(poles) and ctx.close(abs(poles[i][0]), rho):
            same += poles[i][1]
            i += 1
        count += same
        if count > m:
            return rho
    return cap


def associated_system(system: SystemModel) -> SystemModel:
    """``(f_1, ..., z**(m_1-1) f_1, f_2, ...)`` with multi-index all ones."""
    comps, origin = [], []
    for k, (f, mk) in enumerate(zip(system.components, system.m)):
        for j in range(mk):
            g = f.shift(j)
            g.name = f"z^{j}*{f.name or f'f{k + 1}'}" if j else (f.name or f"f{k + 1}")
            comps.append(g)
            origin.append((k, j))
    return SystemModel(tuple(comps), (1,) * len(comps), system.name, tuple(origin))


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------

SCHEMA_DOC = """\
{
  "name": "optional label",
  "m": [m_1, ..., m_d],                       positive integers
  "components": [                              one object per f_k
    {
      "poles": [                               principal parts, any number
        {"re": R, "im": I,                     location xi != 0
         "principal": [[re, im], ...]}         c_1..c_tau of sum c_j/(z-xi)^j
      ],
      "tail": [                                object or list of objects
        {"kind": "polynomial", "coefficients": [[re, im], ...]},
        {"kind": "lacunary_factorial", "multiplier": [[re, im], ...]},
        {"kind": "power_series", "radius": R, "multiplier": [[re, im], ...]}
      ]
    }
  ]
}
Numbers may be JSON numbers or decimal strings; strings like "1/3" are exact
fractions.  "multiplier" is a polynomial (ascending) multiplying the atom and
defaults to [[1, 0]].
"""


def _num(ctx, x, what):
    try:
        return ctx.convert(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad number for {what}: {x!r}") from exc


def model_from_json(obj: dict, ctx: PrecisionContext | None = None) -> MeromorphicModel:
    ctx = ctx or get_context()
    if not isinstance(obj, dict):
        raise SchemaError("component must be an object")
    unknown = set(obj) - {"poles", "tail", "name"}
    if unknown:
        raise SchemaError(f"unknown component keys {sorted(unknown)}")
    poles = []
    for p in obj.get("poles", []):
        if not isinstance(p, dict) or "principal" not in p:
            raise SchemaError("each pole needs re/im and a principal list")
        loc = ctx.mpc(_num(ctx, p.get("re", 0), "re").real, _num(ctx, p.get("im", 0), "im").real)
        if loc == 0:
            raise SchemaError("pole at the origin is not allowed")
        cs = [_num(ctx, c, "principal coefficient") for c in p["principal"]]
        if not cs or cs[-1] == 0:
            raise SchemaError("principal part needs a nonzero leading coefficient")
        poles.append((loc, cs))
    tails = obj.get("tail", [])
    if isinstance(tails, dict):
        tails = [tails]
    poly = Polynomial([], ctx)
    atoms = []
    for t in tails:
        if not isinstance(t, dict) or "kind" not in t:
            raise SchemaError("tail entries need a kind")
        kind = t["kind"]
        mult = Polynomial([_num(ctx, c, "multiplier") for c in t.get("multiplier", [[1, 0]])], ctx)
        if kind == POLYNOMIAL:
            poly = poly + Polynomial([_num(ctx, c, "coefficient") for c in t.get("coefficients", [])], ctx)
        elif kind == LACUNARY:
            atoms.append((Atom.lacunary(), mult))
        elif kind == POWER_SERIES:
            if "radius" not in t:
                raise SchemaError("power_series tail needs a radius")
            radius = str(t["radius"])
            if not ctx.mpf(radius) > 0:
                raise SchemaError("power_series radius must be positive")
            atoms.append((Atom.power_series(radius), mult))
        else:
            raise SchemaError(f"unsupported tail kind {kind!r}")
    model = MeromorphicModel.build(poles, poly.coeffs, atoms, ctx, obj.get("name", ""))
    if model.is_zero():
        raise SchemaError("component is identically zero")
    return model


def system_from_json(obj, ctx: PrecisionContext | None = None, m=None) -> SystemModel:
    """Parse the documented JSON description (a dict or a JSON string)."""
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "components" not in obj:
        raise SchemaError("system description needs a 'components' list")
    comps = [model_from_json(c, ctx) for c in obj["components"]]
    for k, c in enumerate(comps):
        c.name = c.name or f"f{k + 1}"
    m = m if m is not None else obj.get("m")
    if m is None:
        raise SchemaError("system description needs a multi-index 'm'")
    if not isinstance(m, (list, tuple)) or not all(isinstance(x, int) for x in m):
        raise SchemaError("'m' must be a list of integers")
    return SystemModel(tuple(comps), tuple(m), obj.get("name", ""))


def model_to_json(model: MeromorphicModel) -> dict:
    ctx = model.ctx
    out = {"poles": [{"re": ctx.to_str(p.location.real), "im": ctx.to_str(p.location.imag),
                      "principal": [ctx.complex_to_pair(c) for c in p.coefficients]}
                     for p in model.principal_parts]}
    tail = []
    if not model.tail.polynomial.is_zero():
        tail.append({"kind": POLYNOMIAL,
                     "coefficients": [ctx.complex_to_pair(c) for c in model.tail.polynomial.coeffs]})
    for atom, mult in model.tail.atoms:
        entry = {"kind": atom.kind, "multiplier": [ctx.complex_to_pair(c) for c in mult.coeffs]}
        if atom.kind == POWER_SERIES:
            entry["radius"] = atom.radius_text
        tail.append(entry)
    out["tail"] = tail
    if model.name:
        out["name"] = model.name
    return out


def system_to_json(system: SystemModel) -> dict:
    out = {"m": list(system.m), "components": [model_to_json(f) for f in system.components]}
    if system.name:
        out["name"] = system.name
    return out
