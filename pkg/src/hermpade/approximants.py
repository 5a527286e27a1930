"""
Hermite-Padé, Padé and incomplete Padé approximants of a row, with the defect
bookkeeping (common zero at the origin, reduced degree, slack) used by the
inverse-type diagnostics.

Every solver assembles a small homogeneous linear system whose unknowns are
the coefficients ``q_0..q_M`` of the denominator, solves it by SVD at the
working precision and derives the numerators by truncated multiplication.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from typing import Sequence

from .numerics import (
    Polynomial,
    PrecisionContext,
    get_context,
    null_space,
    root_clusters,
    valuation_at_zero,
)
from .series import CoefficientSeries, MeromorphicModel, SystemModel

CSV_COLUMNS = ("n", "deg_Q", "lambda_n", "m_n", "tau_n", "null_dimension", "Q_coefficients")

# guard factor folded into the per-record noise floor
NOISE_GUARD = 2 ** 16


class ApproximantError(ArithmeticError):
    """The defining linear system could not be solved meaningfully."""


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ApproximantRecord:
    """One solution of a row problem at index ``n``.

    ``Q`` is monic with the common zero at the origin removed (its order is
    ``lambda_n``) and ``P[k]`` are the matching numerators.  For a
    Hermite-Padé record each component is an incomplete Padé approximant of
    type ``(n, m_total, m_k)``; ``tau_components`` holds the slack of each and
    ``tau_n`` their minimum.
    """

    kind: str
    n: int
    m: tuple
    m_total: int
    m_star: tuple
    Q: Polynomial
    P: tuple
    null_dimension: int
    lambda_n: int
    m_n: int
    tau_n: int
    tau_components: tuple
    zeros: tuple  # ((root, multiplicity), ...)
    common_zeros: tuple
    condition: object
    noise_floor: object
    precision_bits: int
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def ctx(self) -> PrecisionContext:
        return self.Q.ctx

    @property
    def deg_Q(self) -> int:
        return self.Q.degree

    @property
    def non_unique(self) -> bool:
        return self.null_dimension > 1

    def zero_list(self) -> list:
        """Zeros of ``Q`` with repetition."""
        out = []
        for z, mult in self.zeros:
            out.extend([z] * mult)
        return out

    def reduced_zero_list(self) -> list:
        """Zeros of the reduced denominator (common roots with the numerators removed)."""
        remaining = []
        common = {i: mult for i, mult in self.common_zeros}
        for i, (z, mult) in enumerate(self.zeros):
            remaining.extend([z] * (mult - common.get(i, 0)))
        return remaining


@dataclass(frozen=True)
class NormalizedDenominator:
    """Denominator rescaled so its coefficient moduli sum to one.

    The phase is fixed by making the highest nonzero coefficient real positive,
    so the result does not depend on how the input was scaled.
    """

    lambda_coeffs: tuple
    leading: object

    def moduli(self) -> list:
        return [abs(c) for c in self.lambda_coeffs]


@dataclass(frozen=True)
class ZeroSetDiagnostics:
    """Zero moduli across a row plus the hypotheses that depend on them.

    ``S`` and ``G`` are ``None`` when no record in the trailing window has a
    zero (the sets in their definitions are empty).
    """

    zeros: dict  # n -> list of zeros of the reduced denominator
    S: object
    G: object
    per_n: tuple  # ((n, lambda_n, m_n, tau_n), ...)
    m_total: int
    m_star: int
    window: tuple
    lambda_jump_from: int | None
    total_jump_from: int | None
    sufficient_from: int | None

    @property
    def hypothesis_i(self) -> bool:
        return self.lambda_jump_from is not None and self.S is not None and self.S > 0

    @property
    def hypothesis_ii(self) -> bool:
        return self.total_jump_from is not None and self.G is not None

    def as_dict(self, ctx: PrecisionContext) -> dict:
        fmt = (lambda x: None if x is None else ctx.to_str(x))
        return {
            "S": fmt(self.S),
            "G": fmt(self.G),
            "window": list(self.window),
            "m_total": self.m_total,
            "m_star": self.m_star,
            "lambda_jump_holds_from": self.lambda_jump_from,
            "total_jump_holds_from": self.total_jump_from,
            "sufficient_condition_holds_from": self.sufficient_from,
            "hypothesis_i": self.hypothesis_i,
            "hypothesis_ii": self.hypothesis_ii,
            "per_n": [{"n": n, "lambda_n": a, "m_n": b, "tau_n": c} for n, a, b, c in self.per_n],
        }


# ---------------------------------------------------------------------------
# input normalization
# ---------------------------------------------------------------------------

def _series_of(obj, ctx) -> CoefficientSeries:
    if isinstance(obj, CoefficientSeries):
        return obj
    if isinstance(obj, MeromorphicModel):
        return obj.series()
    return CoefficientSeries.from_list(obj, ctx)


def _unpack(system, m, ctx):
    if isinstance(system, SystemModel):
        series = [f.series() for f in system.components]
        m = tuple(system.m) if m is None else tuple(m)
        ctx = ctx or system.ctx
    else:
        items = list(system) if isinstance(system, (list, tuple)) else [system]
        ctx = ctx or getattr(items[0], "ctx", None) or get_context()
        series = [_series_of(s, ctx) for s in items]
        if m is None:
            raise ValueError("a multi-index is required for coefficient input")
        m = (m,) if isinstance(m, int) else tuple(m)
    if len(series) != len(m):
        raise ValueError("multi-index length must match the number of series")
    if any(x < 0 for x in m):
        raise ValueError("multi-index entries must be nonnegative")
    return series, m, ctx


# ---------------------------------------------------------------------------
# linear algebra core
# ---------------------------------------------------------------------------

def denominator_system(series: Sequence[CoefficientSeries], defects: Sequence[int], n: int,
                       unknowns: int) -> list[list]:
    """Rows of the homogeneous system for ``q_0..q_{unknowns-1}``.

    For series ``k`` the coefficients of ``z**(n-defects[k]+1) .. z**n`` of
    ``q * f_k`` must vanish; entry ``(i, j)`` of that block is
    ``phi_{i-j, k}``.
    """
    rows = []
    for s, defect in zip(series, defects):
        for i in range(n - defect + 1, n + 1):
            rows.append([s[i - j] if i - j >= 0 else s.ctx.mpc(0) for j in range(unknowns)])
    return rows


def _equilibrate(rows, ctx):
    out = []
    for row in rows:
        scale = max((abs(x) for x in row), default=0)
        out.append([x / scale for x in row] if scale else row)
    return out


def _minimal_degree_vector(rows, unknowns, ctx):
    """Null vector with the fewest trailing nonzero entries (lowest degree)."""
    for deg in range(unknowns):
        sub = [row[: deg + 1] for row in rows]
        basis, _ = null_space(sub, ctx)
        if basis:
            return list(basis[0]) + [ctx.mpc(0)] * (unknowns - deg - 1)
    raise ApproximantError("no null vector found")


def _solve(rows, unknowns, ctx):
    """Return ``(vector, null_dimension, condition)`` for the equilibrated system."""
    if not rows:
        # no conditions: the constant denominator is the canonical choice
        return [ctx.mpc(1)] + [ctx.mpc(0)] * (unknowns - 1), unknowns, ctx.mpf(1)
    rows = _equilibrate(rows, ctx)
    basis, sv = null_space(rows, ctx)
    if not basis:
        raise ApproximantError("homogeneous system has only the trivial solution")
    dim = len(basis)
    nonzero = [s for s in sv if s > ctx.zero_tolerance * sv[0]] if sv and sv[0] else []
    condition = sv[0] / nonzero[-1] if nonzero else ctx.mpf(1)
    if dim == 1:
        return list(basis[0]), 1, condition
    return _minimal_degree_vector(rows, unknowns, ctx), dim, condition


def _truncated_product(q: Polynomial, s: CoefficientSeries, max_degree: int) -> Polynomial:
    ctx = q.ctx
    coeffs = []
    for i in range(max_degree + 1):
        acc = ctx.mpc(0)
        for j, c in enumerate(q.coeffs):
            if j > i:
                break
            acc += c * s[i - j]
        coeffs.append(acc)
    return Polynomial(coeffs, ctx)


def _zero_multiplicity(p: Polynomial, z, cap: int, tol) -> int:
    """How many of ``p, p', ...`` (at most ``cap``) vanish at ``z`` relative to their size."""
    if p.is_zero():
        return cap
    r = abs(z)
    count, d = 0, p
    while count < cap and not d.is_zero():
        scale = d.abs_eval(r)
        if abs(d(z)) > tol * scale:
            break
        count += 1
        d = d.derivative()
    return count


def common_factor_tolerance(ctx: PrecisionContext):
    """Relative threshold used when matching zeros of ``Q`` against the numerators."""
    return ctx.mp.sqrt(ctx.zero_tolerance)


def _finish(kind, n, m, m_total, m_star, vector, series, numerator_degrees, dim, condition, ctx,
            extra=None) -> ApproximantRecord:
    Q = Polynomial(vector, ctx)
    if Q.is_zero():
        raise ApproximantError(f"n={n}: denominator is numerically zero")
    P = [_truncated_product(Q, s, d) if d >= 0 else Polynomial([], ctx)
         for s, d in zip(series, numerator_degrees)]
    lam = valuation_at_zero(Q)
    for p in P:
        if not p.is_zero():
            lam = min(lam, valuation_at_zero(p))
    Q = Q.drop_low(lam)
    P = [p.drop_low(lam) for p in P]
    lead = Q.leading
    Q = Q.monic()
    P = [p.scale(1 / lead) for p in P]

    zeros = tuple(root_clusters(Q)) if Q.degree >= 1 else ()
    tol = common_factor_tolerance(ctx)
    common = []
    for i, (z, mult) in enumerate(zeros):
        shared = min(_zero_multiplicity(p, z, mult, tol) for p in P) if P else 0
        if shared:
            common.append((i, shared))
    n_common = sum(c for _, c in common)
    m_n = Q.degree - n_common
    taus = []
    for p, s_defect in zip(P, m_star):
        if p.is_zero():
            first = None  # deg(0) = -inf, so this term never binds
        else:
            first = n - s_defect - lam - (p.degree - n_common)
        second = m_total - lam - m_n
        taus.append(second if first is None else min(first, second))
    bits = ctx.bits
    noise = ctx.mpf(2) ** (-bits) * condition * max(n, 1) * NOISE_GUARD
    return ApproximantRecord(
        kind=kind, n=n, m=tuple(m), m_total=m_total, m_star=tuple(m_star), Q=Q, P=tuple(P),
        null_dimension=dim, lambda_n=lam, m_n=m_n, tau_n=min(taus), tau_components=tuple(taus),
        zeros=zeros, common_zeros=tuple(common), condition=condition, noise_floor=noise,
        precision_bits=bits, extra=extra or {},
    )


# ---------------------------------------------------------------------------
# public solvers
# ---------------------------------------------------------------------------

def hermite_pade(system, n: int, m=None, ctx: PrecisionContext | None = None) -> ApproximantRecord:
    """Type ``(n, m)`` Hermite-Padé approximant of a system.

    ``system`` is a :class:`SystemModel` (whose ``m`` is used unless given) or
    a list of coefficient series / models together with ``m``.
    """
    series, m, ctx = _unpack(system, m, ctx)
    if n < max(m):
        raise ValueError(f"n={n} must be at least max(m)={max(m)}")
    total = sum(m)
    rows = denominator_system(series, m, n, total + 1)
    vector, dim, condition = _solve(rows, total + 1, ctx)
    return _finish("hermite_pade", n, m, total, m, vector, series, [n - mk for mk in m], dim,
                   condition, ctx)


def pade(series, n: int, m: int, ctx: PrecisionContext | None = None) -> ApproximantRecord:
    """Classical Padé approximant ``[n-m / m]``; the d = 1 case of :func:`hermite_pade`."""
    if m == 0:
        (s,), _, ctx = _unpack([series], (0,), ctx)
        return _finish("pade", n, (0,), 0, (0,), [ctx.mpc(1)], [s], [n], 1, ctx.mpf(1), ctx)
    return replace(hermite_pade([series], n, (m,), ctx), kind="pade")


@dataclass(frozen=True)
class FromHermitePade:
    """Selection policy: reuse ``Q`` and ``P_k`` of a Hermite-Padé record.

    ``component`` is zero-based.  ``record`` may be omitted when the system
    is supplied to :func:`incomplete_pade`, which then solves it.
    """

    component: int
    record: ApproximantRecord | None = None


def incomplete_pade(series, n: int, m: int, m_star: int, selection="minimal_norm",
                    ctx: PrecisionContext | None = None) -> ApproximantRecord:
    """Incomplete Padé approximant of type ``(n, m, m_star)``.

    With ``selection="minimal_norm"`` the denominator is the least-squares
    smallest null vector normalized by ``q(0) = 1``; when every null vector
    vanishes at the origin the lowest-degree null vector is used instead.
    With a :class:`FromHermitePade` selection, ``series`` may be the full
    system and the record's ``Q``, ``P_k`` are reused.
    """
    if isinstance(selection, FromHermitePade):
        rec = selection.record
        if rec is None:
            rec = hermite_pade(series, n, None if isinstance(series, SystemModel) else m, ctx)
        k = selection.component
        if isinstance(series, SystemModel):
            s = series.components[k].series()
        elif isinstance(series, (list, tuple)):
            s = _series_of(series[k], rec.ctx)
        else:
            s = _series_of(series, rec.ctx)
        mk = rec.m[k]
        vec = list(rec.Q.shift(rec.lambda_n).coeffs)
        return _finish("incomplete_pade", rec.n, (rec.m_total,), rec.m_total, (mk,), vec, [s],
                       [rec.n - mk], rec.null_dimension, rec.condition, rec.ctx,
                       {"from_component": k})
    if selection != "minimal_norm":
        raise ValueError(f"unknown selection policy {selection!r}")
    (s,), _, ctx = _unpack([series], (m,), ctx)
    if not (n >= m >= m_star >= 1):
        raise ValueError("need n >= m >= m_star >= 1")
    rows = denominator_system([s], [m_star], n, m + 1)
    eq = _equilibrate(rows, ctx)
    basis, sv = null_space(eq, ctx)
    if not basis:
        raise ApproximantError("homogeneous system has only the trivial solution")
    nonzero = [x for x in sv if x > ctx.zero_tolerance * sv[0]] if sv and sv[0] else []
    condition = sv[0] / nonzero[-1] if nonzero else ctx.mpf(1)
    first = [b[0] for b in basis]
    weight = ctx.mp.fsum(abs(x) ** 2 for x in first)
    if weight > ctx.zero_tolerance:
        coef = [ctx.mp.conj(x) / weight for x in first]
        vector = [ctx.mp.fsum(coef[j] * basis[j][i] for j in range(len(basis))) for i in range(m + 1)]
    else:
        vector = _minimal_degree_vector(eq, m + 1, ctx)
    return _finish("incomplete_pade", n, (m,), m, (m_star,), vector, [s], [n - m_star], len(basis),
                   condition, ctx, {"selection": "minimal_norm"})


def normalize_l1(record_or_q) -> NormalizedDenominator:
    """Rescale the denominator so that its coefficient moduli sum to one."""
    Q = record_or_q.Q if isinstance(record_or_q, ApproximantRecord) else record_or_q
    if Q.is_zero():
        raise ValueError("zero denominator")
    ctx = Q.ctx
    mp = ctx.mp
    total = mp.fsum(abs(c) for c in Q.coeffs)
    lead = Q.leading
    phase = abs(lead) / lead
    coeffs = tuple(c * phase / total for c in Q.coeffs)
    index = record_or_q.m_total if isinstance(record_or_q, ApproximantRecord) else Q.degree
    leading = coeffs[index] if index < len(coeffs) else ctx.mpc(0)
    return NormalizedDenominator(coeffs, leading)


# ---------------------------------------------------------------------------
# diagnostics across a row
# ---------------------------------------------------------------------------

def _holds_from(ns: list, flags: list) -> int | None:
    """Smallest ``n`` from which every flag up to the end is true."""
    start = None
    for n, ok in zip(ns, flags):
        if ok:
            if start is None:
                start = n
        else:
            start = None
    return start


def defect_diagnostics(records: Sequence[ApproximantRecord], min_suffix: int | None = None,
                       component: int | None = None) -> ZeroSetDiagnostics:
    """``S``, ``G`` and the jump conditions over a row of records.

    ``S`` (``G``) is the largest (smallest) value of the minimum (maximum)
    zero modulus over suffixes ``n >= N`` that still contain at least
    ``min_suffix`` records with zeros (default: a quarter of the row, at
    least 5).  For Hermite-Padé records ``component`` picks which incomplete
    approximant supplies ``tau``; by default the minimum over components is
    used together with ``m_star = min(m_k)``.
    """
    if not records:
        raise ValueError("no records")
    records = sorted(records, key=lambda r: r.n)
    ctx = records[0].ctx
    m_total = records[0].m_total
    if component is None:
        m_star = min(records[0].m_star)
        taus = [r.tau_n for r in records]
    else:
        m_star = records[0].m_star[component]
        taus = [r.tau_components[component] for r in records]
    ns = [r.n for r in records]
    zeros = {r.n: r.reduced_zero_list() for r in records}
    with_zeros = [r for r in records if r.m_n >= 1 and zeros[r.n]]
    if min_suffix is None:
        min_suffix = max(5, len(records) // 4)
    S = G = None
    if with_zeros:
        usable = min(min_suffix, len(with_zeros))
        tail = with_zeros[-usable:]
        moduli = [abs(z) for r in tail for z in zeros[r.n]]
        S, G = min(moduli), max(moduli)
        window = (tail[0].n, tail[-1].n)
    else:
        window = (ns[0], ns[-1])
    lam = [r.lambda_n for r in records]
    tot = [r.m_n + r.lambda_n + t for r, t in zip(records, taus)]
    mt = [r.m_n + t for r, t in zip(records, taus)]
    pairs = list(range(1, len(records)))
    consecutive = [records[i].n == records[i - 1].n + 1 for i in pairs]
    lam_ok = [c and abs(lam[i] - lam[i - 1]) <= m_star - 1 for i, c in zip(pairs, consecutive)]
    tot_ok = [c and abs(tot[i] - tot[i - 1]) <= m_star - 1 for i, c in zip(pairs, consecutive)]
    suf_ok = [c and min(mt[i], mt[i - 1]) >= m_total - m_star + 1 for i, c in zip(pairs, consecutive)]
    later = ns[1:]
    return ZeroSetDiagnostics(
        zeros=zeros, S=S, G=G,
        per_n=tuple((r.n, r.lambda_n, r.m_n, t) for r, t in zip(records, taus)),
        m_total=m_total, m_star=m_star, window=window,
        lambda_jump_from=_holds_from(later, lam_ok),
        total_jump_from=_holds_from(later, tot_ok),
        sufficient_from=_holds_from(later, suf_ok),
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _poly_pairs(p: Polynomial) -> list:
    return [p.ctx.complex_to_pair(c) for c in p.coeffs]


def record_to_json(record: ApproximantRecord) -> dict:
    ctx = record.ctx
    return {
        "kind": record.kind,
        "n": record.n,
        "m": list(record.m),
        "m_total": record.m_total,
        "m_star": list(record.m_star),
        "precision_bits": record.precision_bits,
        "deg_Q": record.deg_Q,
        "null_dimension": record.null_dimension,
        "non_unique": record.non_unique,
        "lambda_n": record.lambda_n,
        "m_n": record.m_n,
        "tau_n": record.tau_n,
        "tau_components": list(record.tau_components),
        "Q": _poly_pairs(record.Q),
        "P": [_poly_pairs(p) for p in record.P],
        "zeros": [{"re": ctx.to_str(z.real), "im": ctx.to_str(z.imag), "multiplicity": k}
                  for z, k in record.zeros],
        "common_zeros": [list(c) for c in record.common_zeros],
        "condition": ctx.to_str(record.condition),
        "noise_floor": ctx.to_str(record.noise_floor),
    }


def record_from_json(obj: dict) -> ApproximantRecord:
    """Inverse of :func:`record_to_json` (exact at the recorded precision)."""
    ctx = get_context(int(obj["precision_bits"]))
    zeros = tuple((ctx.mpc(z["re"], z["im"]), int(z["multiplicity"])) for z in obj["zeros"])
    return ApproximantRecord(
        kind=obj["kind"], n=int(obj["n"]), m=tuple(obj["m"]), m_total=int(obj["m_total"]),
        m_star=tuple(obj["m_star"]), Q=polynomial_from_pairs(obj["Q"], ctx),
        P=tuple(polynomial_from_pairs(p, ctx) for p in obj["P"]),
        null_dimension=int(obj["null_dimension"]), lambda_n=int(obj["lambda_n"]), m_n=int(obj["m_n"]),
        tau_n=int(obj["tau_n"]), tau_components=tuple(obj["tau_components"]), zeros=zeros,
        common_zeros=tuple(tuple(c) for c in obj["common_zeros"]),
        condition=ctx.mpf(obj["condition"]), noise_floor=ctx.mpf(obj["noise_floor"]),
        precision_bits=ctx.bits,
    )


def polynomial_from_pairs(pairs, ctx: PrecisionContext) -> Polynomial:
    return Polynomial([ctx.convert(p) for p in pairs], ctx)


def format_coefficients(p: Polynomial) -> str:
    """``re,im;re,im;...`` in ascending degree (the CSV coefficient cell)."""
    return ";".join(f"{a},{b}" for a, b in _poly_pairs(p))


def parse_coefficients(cell: str, ctx: PrecisionContext) -> Polynomial:
    if not cell:
        return Polynomial([], ctx)
    return Polynomial([ctx.mpc(*item.split(",")) for item in cell.split(";")], ctx)


def records_to_csv(records: Sequence[ApproximantRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([r.n, r.deg_Q, r.lambda_n, r.m_n, r.tau_n, r.null_dimension,
                    format_coefficients(r.Q)])
    return buf.getvalue()


def records_to_json(records: Sequence[ApproximantRecord]) -> str:
    return json.dumps([record_to_json(r) for r in records], indent=2)
