"""
System poles of a structural system and their characteristic radii.

Everything is phrased on the associated system ``(z**j f_k)`` with
multi-index all ones, where a polynomial combination ``sum p_k f_k`` with
``deg p_k < m_k`` becomes a constant vector ``c`` of length ``|m|``.  Each
singular feature of the components (a principal coefficient at some pole,
or a coefficient of the polynomial multiplying an atom) is then a linear
functional of ``c``.  Killing features is a homogeneous linear constraint,
and "a pole of exact order s at xi" is the inhomogeneous constraint that
the order-``s`` coefficient at ``xi`` equals one.  Feasibility of such a
system is decided by a rank test.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Sequence

from .numerics import Polynomial, PrecisionContext, null_space
from .series import Atom, MeromorphicModel, SystemModel, associated_system, combine


class NotASystemPole(ValueError):
    """No admissible combination isolates a pole of the requested order there."""


class IncompletePoleSet(ValueError):
    """The enumerated orders do not add up to ``|m|``."""


# ---------------------------------------------------------------------------
# features as linear functionals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Feature:
    """One singular coefficient of the combination, as a row vector over ``c``.

    For a pole feature ``location`` is set and ``order`` is the power of
    ``1/(z - location)``; for an atom feature ``atom`` is set and ``order`` is
    the degree in its polynomial multiplier.
    """

    modulus: object
    location: object
    atom: Atom | None
    order: int
    row: tuple

    @property
    def is_pole(self) -> bool:
        return self.atom is None


def _same(ctx, a, b) -> bool:
    return ctx.close(a, b)


def gather_features(assoc: SystemModel) -> list[Feature]:
    """All singular features of the associated system, sorted by modulus."""
    ctx = assoc.ctx
    M = assoc.d
    locations: list = []
    for f in assoc.components:
        for part in f.principal_parts:
            if not any(_same(ctx, part.location, x) for x in locations):
                locations.append(part.location)
    feats = []
    zero = ctx.mpc(0)
    for loc in locations:
        parts = [f.principal_at(loc) for f in assoc.components]
        top = max((p.order for p in parts if p is not None), default=0)
        for s in range(1, top + 1):
            row = tuple(p.coefficients[s - 1] if p is not None and p.order >= s else zero for p in parts)
            feats.append(Feature(abs(loc), loc, None, s, row))
    atoms: dict = {}
    for i, f in enumerate(assoc.components):
        for atom, mult in f.tail.atoms:
            atoms.setdefault(atom, {})[i] = mult
    for atom, mults in atoms.items():
        top = max(p.degree for p in mults.values())
        for l in range(top + 1):
            row = tuple(mults[i][l] if i in mults else zero for i in range(M))
            feats.append(Feature(atom.radius(ctx), None, atom, l, row))
    feats.sort(key=lambda ft: (ft.modulus, ft.atom is not None))
    return feats


def _unit_rows(rows, ctx):
    out = []
    for row in rows:
        norm = ctx.mp.sqrt(ctx.mp.fsum(abs(x) ** 2 for x in row))
        if norm > 0:
            out.append([x / norm for x in row])
    return out


def _kernel(rows, M, ctx) -> list:
    """Orthonormal basis of ``{c : row . c = 0 for every row}``."""
    rows = _unit_rows(rows, ctx)
    if not rows:
        return [[ctx.mpc(1 if i == j else 0) for i in range(M)] for j in range(M)]
    basis, _ = null_space(rows, ctx)
    return basis


def feasibility_tolerance(ctx: PrecisionContext):
    return ctx.mp.sqrt(ctx.zero_tolerance)


def _pinned_solution(kill_rows, pin_row, M, ctx):
    """A vector with every kill row vanishing and ``pin_row . c = 1``, or ``None``."""
    basis = _kernel(kill_rows, M, ctx)
    if not basis:
        return None
    mp = ctx.mp
    pin_norm = mp.sqrt(mp.fsum(abs(x) ** 2 for x in pin_row))
    if pin_norm == 0:
        return None
    proj = [mp.fsum(p * b for p, b in zip(pin_row, vec)) for vec in basis]
    size = mp.fsum(abs(x) ** 2 for x in proj)
    if mp.sqrt(size) <= feasibility_tolerance(ctx) * pin_norm:
        return None
    weights = [mp.conj(x) / size for x in proj]
    return [mp.fsum(w * vec[i] for w, vec in zip(weights, basis)) for i in range(M)]


# ---------------------------------------------------------------------------
# combination spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CombinationSpace:
    """Combinations allowed by a set of cancellation constraints.

    ``basis`` spans the homogeneous constraints; when a pole is pinned,
    ``particular`` is one combination meeting the pin and ``feasible`` tells
    whether any exists.
    """

    system: SystemModel
    associated: SystemModel
    basis: tuple
    particular: tuple | None
    feasible: bool
    constraints: tuple

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def combination(self, c: Sequence) -> MeromorphicModel:
        """The function ``sum_i c_i * (z**j f_k)`` for a coefficient vector ``c``."""
        return combine(self.associated.components, list(c))

    def polynomials(self, c: Sequence) -> list[Polynomial]:
        """Split ``c`` into the multipliers ``p_k`` of the original components."""
        ctx = self.system.ctx
        out = [[ctx.mpc(0)] * mk for mk in self.system.m]
        # an already-associated input is its own expansion: component i is (i, 0)
        origin = ([(i, 0) for i in range(self.system.d)] if self.associated is self.system
                  else self.associated.origin)
        for value, (k, j) in zip(c, origin):
            out[k][j] = value
        return [Polynomial(p, ctx) for p in out]

    def witness(self) -> MeromorphicModel | None:
        if self.particular is not None:
            return self.combination(self.particular)
        if self.basis:
            return self.combination(self.basis[0])
        return None


def _assoc(system: SystemModel) -> SystemModel:
    if system.origin is not None and all(x == 1 for x in system.m):
        return system
    return associated_system(system)


def _features_at(features, ctx, location):
    return [ft for ft in features if ft.is_pole and _same(ctx, ft.location, location)]


def residue_moments_quadrature(model: MeromorphicModel, center, radius, points: int = 64,
                               max_order: int = 1) -> list:
    """Principal coefficients at ``center`` by the trapezoid rule on ``|w - center| = radius``.

    ``c_j`` is the mean of ``g(w) (w - center)**j`` over the nodes.  The
    circle must enclose no other singularity.  Used to validate the exact
    principal-part algebra on black-box evaluators.
    """
    ctx = model.ctx
    mp = ctx.mp
    center = ctx.convert(center)
    radius = ctx.mpf(radius)
    out = [ctx.mpc(0)] * max_order
    for t in range(points):
        u = radius * mp.expjpi(ctx.mpf(2 * t) / points)
        val = model.evaluate(center + u)
        power = ctx.mpc(1)
        for j in range(max_order):
            power *= u
            out[j] += val * power
    return [x / points for x in out]


def _quadrature_rows(assoc, location, top, ctx, points):
    others = [abs(p.location - location) for f in assoc.components for p in f.principal_parts
              if not _same(ctx, p.location, location)]
    others += [f.tail_radius() - abs(location) for f in assoc.components]
    others.append(abs(location))
    radius = min(others) / 2
    cols = [residue_moments_quadrature(f, location, radius, points, top) for f in assoc.components]
    return [tuple(col[s - 1] for col in cols) for s in range(1, top + 1)]


def cancellation_system(system: SystemModel, targets: Sequence = (), keep=None,
                        method: str = "exact", points: int | None = None) -> CombinationSpace:
    """Combinations whose principal parts vanish at ``targets``.

    ``targets`` lists ``(location, max_order)`` pairs (``max_order=None`` kills
    the whole principal part) or :class:`Atom` instances (kill that tail).
    ``keep=(xi, s)`` additionally asks for a pole of exact order ``s`` at
    ``xi``: orders above ``s`` are killed and the order-``s`` coefficient is
    pinned to one.  An infeasible request returns ``feasible=False``.

    ``method="quadrature"`` recovers the principal coefficients numerically
    from contour sums instead of the closed form.  The contour radius is half
    the distance to the nearest other singularity, so the trapezoid error is
    about ``2**-points``; the default ``bits/2 + 64`` points keeps it below
    the rank threshold of the constraint solve.
    """
    assoc = _assoc(system)
    ctx = assoc.ctx
    M = assoc.d
    features = gather_features(assoc)
    zero_row = tuple(ctx.mpc(0) for _ in range(M))

    if points is None:
        points = ctx.bits // 2 + 64

    def pole_rows(location, orders):
        if method == "quadrature":
            top = max(orders) if orders else 0
            rows = _quadrature_rows(assoc, location, top, ctx, points) if top else []
            return {s: rows[s - 1] for s in orders}
        if method != "exact":
            raise ValueError(f"unknown method {method!r}")
        by_order = {ft.order: ft.row for ft in _features_at(features, ctx, location)}
        return {s: by_order.get(s, zero_row) for s in orders}

    kill, described = [], []
    for t in targets:
        if isinstance(t, Atom):
            rows = [ft.row for ft in features if ft.atom == t]
            kill.extend(rows)
            described.append(("atom", t.kind, t.radius_text))
            continue
        try:
            location, max_order = t
        except (TypeError, ValueError) as exc:
            raise ValueError(f"malformed target {t!r}") from exc
        location = ctx.convert(location)
        if location == 0:
            raise ValueError("targets must be nonzero locations")
        top = max((ft.order for ft in _features_at(features, ctx, location)), default=0)
        if max_order is not None:
            if max_order < 1:
                raise ValueError("max_order must be positive")
            top = min(top, max_order)
        kill.extend(pole_rows(location, list(range(1, top + 1))).values())
        described.append(("pole", location, max_order))
    pin = None
    if keep is not None:
        xi, s = keep
        xi = ctx.convert(xi)
        if xi == 0 or s < 1:
            raise ValueError("keep needs a nonzero location and a positive order")
        if any(d[0] == "pole" and _same(ctx, d[1], xi) for d in described):
            raise ValueError("keep location is also a target")
        top = max((ft.order for ft in _features_at(features, ctx, xi)), default=0)
        higher = list(range(s + 1, top + 1))
        rows = pole_rows(xi, higher + [s])
        kill.extend(rows[o] for o in higher)
        pin = rows[s]
        described.append(("keep", xi, s))
    basis = tuple(tuple(v) for v in _kernel(kill, M, ctx))
    particular = None
    feasible = bool(basis)
    if pin is not None:
        sol = _pinned_solution(kill, pin, M, ctx)
        feasible = sol is not None
        particular = tuple(sol) if sol is not None else None
    return CombinationSpace(system, assoc, basis, particular, feasible, tuple(described))


# ---------------------------------------------------------------------------
# definition tests and radii
# ---------------------------------------------------------------------------

class _Analysis:
    """Features of one system plus the feasibility questions asked about them."""

    def __init__(self, system: SystemModel):
        self.system = system
        self.assoc = _assoc(system)
        self.ctx = self.assoc.ctx
        self.M = self.assoc.d
        self.features = gather_features(self.assoc)

    def moduli(self) -> list:
        out = []
        for ft in self.features:
            if not any(self.ctx.close(ft.modulus, x) for x in out):
                out.append(ft.modulus)
        return sorted(out)

    def _inside(self, ft, rho) -> bool:
        return ft.modulus < rho or self.ctx.close(ft.modulus, rho)

    def pinned(self, xi, s, rho=None):
        """Solution for "pole of exact order s at xi, nothing else in the closed disk of radius rho"."""
        ctx = self.ctx
        rho = abs(xi) if rho is None else rho
        kill, pin = [], None
        for ft in self.features:
            at_xi = ft.is_pole and _same(ctx, ft.location, xi)
            if at_xi:
                if ft.order > s:
                    kill.append(ft.row)
                elif ft.order == s:
                    pin = ft.row
            elif self._inside(ft, rho):
                kill.append(ft.row)
        if pin is None:
            return None
        return _pinned_solution(kill, pin, self.M, ctx)

    def is_system_pole_of_order(self, xi, s) -> bool:
        return self.pinned(xi, s) is not None

    def order(self, xi) -> int:
        s = 0
        while s < self.M and self.is_system_pole_of_order(xi, s + 1):
            s += 1
        return s

    def r(self, xi, s):
        if not self.is_system_pole_of_order(xi, s):
            raise NotASystemPole(f"{self.ctx.mp.nstr(xi, 10)} is not a system pole of order {s}")
        base = abs(xi)
        for rho in self.moduli():
            if rho < base or self.ctx.close(rho, base):
                continue
            if self.pinned(xi, s, rho) is None:
                return rho
        return self.ctx.inf


def r_xi_s(system: SystemModel, xi, s: int):
    """Largest radius up to which a combination can carry only the pole of order ``s`` at ``xi``.

    Scans the distinct singularity moduli beyond ``|xi|`` and returns the
    first one at which the extra cancellations become infeasible (infinity
    when they never do).
    """
    ctx = system.ctx
    return _Analysis(system).r(ctx.convert(xi), s)


@dataclass(frozen=True)
class SystemPoleReport:
    xi: object
    tau: int
    r: tuple
    R_cum: tuple
    R_xi: object
    theta_contribution: object


@dataclass(frozen=True)
class SystemPoleSet:
    reports: tuple
    Q_limit: Polynomial
    complete: bool
    m_total: int
    excluded: tuple  # pole locations of components that are not system poles

    def locations(self) -> list:
        return [rep.xi for rep in self.reports]

    def report_at(self, xi) -> SystemPoleReport | None:
        ctx = self.Q_limit.ctx
        for rep in self.reports:
            if ctx.close(rep.xi, xi):
                return rep
        return None


def enumerate_system_poles(system: SystemModel, check_independence: bool = True) -> SystemPoleSet:
    """Walk the singularity circles outward and record every system pole with its radii.

    Candidates are the pole locations of the components, grouped by modulus;
    the walk stops once the orders found add up to ``|m|``.  A dependent
    system triggers a warning (its enumeration is usually incomplete).
    """
    if check_independence:
        independent, _ = algebraically_independent(system)
        if not independent:
            warnings.warn("system is not algebraically independent; enumeration may be incomplete",
                          stacklevel=2)
    an = _Analysis(system)
    ctx = an.ctx
    candidates = []
    for ft in an.features:
        if ft.is_pole and not any(_same(ctx, ft.location, c) for c in candidates):
            candidates.append(ft.location)
    candidates.sort(key=lambda z: (abs(z), float(ctx.mp.arg(z))))
    reports, excluded, found = [], [], 0
    for xi in candidates:
        if found >= an.M:
            break
        tau = an.order(xi)
        if tau == 0:
            excluded.append(xi)
            continue
        tau = min(tau, an.M - found)
        rs = tuple(an.r(xi, s) for s in range(1, tau + 1))
        cum, cur = [], ctx.inf
        for value in rs:
            cur = min(cur, value)
            cum.append(cur)
        R_xi = cum[-1]
        reports.append(SystemPoleReport(xi, tau, rs, tuple(cum), R_xi, abs(xi) / R_xi))
        found += tau
    Q = Polynomial.from_roots([rep.xi for rep in reports for _ in range(rep.tau)], ctx)
    return SystemPoleSet(tuple(reports), Q, found == an.M, an.M, tuple(excluded))


def predicted_theta(pole_set: SystemPoleSet):
    """``max |xi| / R_xi`` over the system poles."""
    if not pole_set.complete:
        raise IncompletePoleSet("orders of the enumerated system poles do not add up to |m|")
    ctx = pole_set.Q_limit.ctx
    return max((rep.theta_contribution for rep in pole_set.reports), default=ctx.mpf(0))


def algebraically_independent(system: SystemModel):
    """``(independent, witness)``.

    A combination ``sum p_k f_k`` is a polynomial exactly when every principal
    coefficient and every atom multiplier coefficient cancels.  The witness is
    ``None`` when independent, else the list of multipliers ``p_k`` of a
    nontrivial polynomial combination, scaled so the first nonzero leading
    entry is one.
    """
    an = _Analysis(system)
    ctx = an.ctx
    basis = _kernel([ft.row for ft in an.features], an.M, ctx)
    if not basis:
        return True, None
    vec = list(basis[0])
    pivot = next(x for x in vec if abs(x) > feasibility_tolerance(ctx))
    vec = [x / pivot for x in vec]
    vec = [ctx.mpc(0) if abs(x) <= ctx.zero_tolerance else x for x in vec]
    space = CombinationSpace(system, an.assoc, tuple(tuple(v) for v in basis), None, True, ())
    return False, space.polynomials(vec)


def star_radii(system: SystemModel, pole_set: SystemPoleSet, k: int):
    """``(R_{|m|,k}, R*_{|m|,k})`` for the zero-based component ``k``.

    The first radius is where ``f_k`` first meets a singularity that is not a
    system pole of at least the same order (or its tail boundary); the second
    also takes the minimum of ``R_{xi, order}`` over the poles of ``f_k``
    strictly inside that disk.
    """
    if not pole_set.complete:
        raise IncompletePoleSet("star radii need a complete pole set")
    f = system.components[k]
    ctx = f.ctx
    cap = f.tail_radius()
    R = cap
    inside = []
    for part in f.principal_parts:
        rho = abs(part.location)
        if rho >= cap or ctx.close(rho, cap):
            break
        rep = pole_set.report_at(part.location)
        if rep is None or part.order > rep.tau:
            R = rho
            break
        inside.append((rep, part.order))
    R_star = R
    for rep, order in inside:
        if ctx.close(abs(rep.xi), R) or abs(rep.xi) > R:
            continue
        R_star = min(R_star, rep.R_cum[order - 1])
    return R, R_star


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _fmt(ctx, x):
    return ctx.to_str(x)


def pole_set_to_json(pole_set: SystemPoleSet, system: SystemModel | None = None) -> dict:
    ctx = pole_set.Q_limit.ctx
    out = {
        "complete": pole_set.complete,
        "m_total": pole_set.m_total,
        "poles": [{
            "re": _fmt(ctx, rep.xi.real), "im": _fmt(ctx, rep.xi.imag), "order": rep.tau,
            "r": [_fmt(ctx, x) for x in rep.r],
            "R_cumulative": [_fmt(ctx, x) for x in rep.R_cum],
            "R_xi": _fmt(ctx, rep.R_xi),
            "theta_contribution": _fmt(ctx, rep.theta_contribution),
        } for rep in pole_set.reports],
        "excluded_poles": [ctx.complex_to_pair(z) for z in pole_set.excluded],
        "Q_limit": [ctx.complex_to_pair(c) for c in pole_set.Q_limit.coeffs],
        "theta": _fmt(ctx, predicted_theta(pole_set)) if pole_set.complete else None,
    }
    if system is not None:
        independent, witness = algebraically_independent(system)
        out["algebraically_independent"] = independent
        if witness is not None:
            out["dependence_witness"] = [[ctx.complex_to_pair(c) for c in p.coeffs] for p in witness]
        if pole_set.complete:
            radii = [star_radii(system, pole_set, k) for k in range(system.d)]
            out["star_radii"] = [{"component": k + 1, "R": _fmt(ctx, a), "R_star": _fmt(ctx, b)}
                                 for k, (a, b) in enumerate(radii)]
    return out


def pole_set_json_text(pole_set: SystemPoleSet, system: SystemModel | None = None) -> str:
    return json.dumps(pole_set_to_json(pole_set, system), indent=2)
