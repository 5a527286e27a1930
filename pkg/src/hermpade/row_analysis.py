"""
Row sweeps and what can be read off them: limits and n-th root rates of the
denominators, zero tracks, derivative rates at a point, uniform convergence
on circles, and the inverse-type consistency report.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _accel
from .approximants import (
    ApproximantRecord,
    ZeroSetDiagnostics,
    defect_diagnostics,
    hermite_pade,
    normalize_l1,
    record_from_json,
    record_to_json,
)
from .numerics import Polynomial, coefficient_norm, get_context
from .series import MeromorphicModel, SystemModel, disk_radii_Rm, radius_R0, system_from_json, system_to_json
from .system_poles import enumerate_system_poles, star_radii

MIN_FIT_POINTS = 6
DOUBLE_EPS = 2.0 ** -52
DOUBLE_GUARD = 64.0


class SweepError(RuntimeError):
    """A solver failure inside a sweep, annotated with the offending ``n``."""

    def __init__(self, n, cause):
        super().__init__(f"n={n}: {cause}")
        self.n = n
        self.cause = cause


class RateFitError(ValueError):
    """Not enough usable values to fit a rate."""


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    records: tuple
    system: object
    m: tuple
    Q_limit: Polynomial | None
    limit_source: str
    normalization: str
    norms: tuple  # per record, distance to the limit (None without a limit)
    derivatives: dict = field(default_factory=dict)  # (label, j) -> per-record values

    @property
    def ns(self) -> list:
        return [r.n for r in self.records]

    @property
    def ctx(self):
        return self.records[0].ctx

    def record(self, n: int) -> ApproximantRecord:
        for r in self.records:
            if r.n == n:
                return r
        raise KeyError(n)


def _solve_payload(payload):
    system_json, bits, n = payload
    ctx = get_context(bits)
    system = system_from_json(system_json, ctx)
    return record_to_json(hermite_pade(system, n))


def _distance(a: Polynomial, b: Polynomial, normalization: str):
    if normalization == "l1":
        na = Polynomial(normalize_l1(a).lambda_coeffs, a.ctx)
        nb = Polynomial(normalize_l1(b).lambda_coeffs, b.ctx)
        return coefficient_norm(na - nb)
    return coefficient_norm(a - b)


def sweep(system, n_min: int, n_max: int, m=None, limit="system_poles", derivative_points: Sequence = (),
          normalization: str = "monic", jobs: int = 1) -> SweepResult:
    """Hermite-Padé records for ``n = n_min..n_max`` and their distance to a limit.

    ``limit`` is ``"system_poles"`` (the structural prediction, falling back to
    the final record when the enumeration is incomplete or unavailable),
    ``"final"``, a :class:`Polynomial`, or ``None``.  ``derivative_points`` is
    a list of ``(xi, max_order)`` at which ``Q_n^{(j)}(xi)`` is recorded.
    ``jobs > 1`` solves the records in worker processes (structural systems
    only); results are identical to the serial run.
    """
    if normalization not in ("monic", "l1"):
        raise ValueError("normalization must be 'monic' or 'l1'")
    if isinstance(system, SystemModel):
        m = tuple(system.m) if m is None else tuple(m)
        if m != tuple(system.m):
            system = system.with_m(m)
    elif m is None:
        raise ValueError("a multi-index is required for coefficient input")
    else:
        m = (m,) if isinstance(m, int) else tuple(m)
    if n_min < max(m):
        raise ValueError(f"n_min={n_min} must be at least max(m)={max(m)}")
    if n_max < n_min:
        raise ValueError("empty n range")
    ns = list(range(n_min, n_max + 1))
    records = []
    if jobs > 1 and isinstance(system, SystemModel):
        payload = system_to_json(system)
        bits = system.ctx.bits
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [(n, pool.submit(_solve_payload, (payload, bits, n))) for n in ns]
            for n, fut in futures:
                try:
                    records.append(record_from_json(fut.result()))
                except Exception as exc:  # annotate and re-raise
                    raise SweepError(n, exc) from exc
    else:
        for n in ns:
            try:
                records.append(hermite_pade(system, n, None if isinstance(system, SystemModel) else m))
            except Exception as exc:
                raise SweepError(n, exc) from exc
    ctx = records[0].ctx
    source = "none"
    Q_limit = None
    if isinstance(limit, Polynomial):
        Q_limit, source = limit, "user"
    elif limit == "system_poles":
        if isinstance(system, SystemModel):
            ps = enumerate_system_poles(system, check_independence=False)
            if ps.complete:
                Q_limit, source = ps.Q_limit, "system_poles"
        if Q_limit is None:
            Q_limit, source = records[-1].Q, "final"
    elif limit == "final":
        Q_limit, source = records[-1].Q, "final"
    elif limit is not None:
        raise ValueError(f"unknown limit option {limit!r}")
    norms = tuple(_distance(Q_limit, r.Q, normalization) if Q_limit is not None else None for r in records)
    derivs = {}
    for xi, top in derivative_points:
        xi = ctx.convert(xi)
        label = ctx.mp.nstr(xi, 12)
        for j in range(top + 1):
            derivs[(label, j)] = tuple(r.Q.derivative(j)(xi) for r in records)
    return SweepResult(tuple(records), system, m, Q_limit, source, normalization, norms, derivs)


# ---------------------------------------------------------------------------
# rate fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateEstimate:
    """Geometric rate ``theta`` fitted to ``value_n ~ C theta**n``.

    ``fitted_rate`` is the exponentiated least-squares slope of ``log value``
    against ``n``; ``limsup_proxy`` is the largest ``value**(1/n)`` in the
    window.  ``residual`` bounds how far the slope can move when the line is
    refitted on a sub- or super-window: twice the largest log deviation from
    the line over the window length, scaled to the rate.
    """

    fitted_rate: float
    window: tuple
    residual: float
    method: str
    limsup_proxy: float
    used: int
    excluded: tuple = ()
    predicted: float | None = None

    def as_dict(self) -> dict:
        return {
            "fitted_rate": repr(float(self.fitted_rate)),
            "window": list(self.window),
            "residual": repr(float(self.residual)),
            "method": self.method,
            "limsup_proxy": repr(float(self.limsup_proxy)),
            "used": self.used,
            "excluded": list(self.excluded),
            "predicted": None if self.predicted is None else repr(float(self.predicted)),
        }


def _log_abs(x) -> float:
    """Natural log of ``|x|`` for numbers far outside the double range."""
    if isinstance(x, (int, float, complex, np.floating, np.complexfloating)):
        return math.log(abs(x))
    mp = getattr(x, "context", None)
    if mp is not None:
        return float(mp.log(abs(x)))
    return math.log(abs(complex(x)))


def fit_geometric_rate(values: Sequence, ns: Sequence[int] | None = None, window: tuple | None = None,
                       floors=None, method: str = "least_squares_log") -> RateEstimate:
    """Fit ``theta`` to a sequence indexed by ``ns`` (default ``0, 1, ...``).

    Values that are zero or at most the matching entry of ``floors`` (a
    scalar or per-``n`` sequence) are excluded and listed in ``excluded``.
    """
    values = list(values)
    ns = list(range(len(values))) if ns is None else list(ns)
    if len(ns) != len(values):
        raise ValueError("values and ns must have the same length")
    if floors is None:
        floor_list = [0.0] * len(values)
    elif isinstance(floors, (list, tuple, np.ndarray)):
        floor_list = list(floors)
    else:
        floor_list = [floors] * len(values)
    lo, hi = (min(ns), max(ns)) if window is None else window
    pts, excluded = [], []
    for n, v, fl in zip(ns, values, floor_list):
        if n < lo or n > hi:
            continue
        if v is None or abs(v) == 0 or abs(v) <= fl:
            excluded.append(n)
            continue
        pts.append((n, _log_abs(v)))
    if not pts:
        raise RateFitError("all values are at the noise floor")
    if len(pts) < MIN_FIT_POINTS:
        raise RateFitError(f"only {len(pts)} usable values, need {MIN_FIT_POINTS}")
    x = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts], dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    length = max(x[-1] - x[0], 1.0)
    theta = math.exp(slope)
    residual = theta * 2.0 * float(np.max(np.abs(resid))) / length
    proxy = max(math.exp(lv / n) for n, lv in pts if n > 0) if any(n > 0 for n, _ in pts) else float("nan")
    return RateEstimate(theta, (int(x[0]), int(x[-1])), residual, method, proxy, len(pts), tuple(excluded))


def denominator_rate(sw: SweepResult, window: tuple | None = None) -> RateEstimate:
    """Rate of ``||Q_limit - Q_n||`` with each record's noise floor censored."""
    if sw.Q_limit is None:
        raise ValueError("sweep has no limit denominator")
    floors = [r.noise_floor * max(1, coefficient_norm(sw.Q_limit)) for r in sw.records]
    return fit_geometric_rate(sw.norms, sw.ns, window, floors)


# ---------------------------------------------------------------------------
# zero tracks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoleEstimateCluster:
    center: complex
    multiplicity: int
    members: tuple  # per track, the zeros over the window (tracks stacked)
    drift: float
    window: tuple


def cluster_zeros(sw: SweepResult, trailing_window: int = 20, merge_radius: float = 1e-6,
                  center_span: int = 5) -> list[PoleEstimateCluster]:
    """Follow the zeros of ``Q_n`` over the last ``trailing_window`` records.

    Consecutive zero sets are matched by minimal total distance; only tracks
    that persist through the whole window are kept.  Each track's center is
    the mean of its last ``center_span`` members, and tracks whose centers
    agree within ``merge_radius`` (relative) form one cluster whose
    multiplicity is the number of tracks.
    """
    recs = [r for r in sw.records if r.deg_Q >= 1][-trailing_window:]
    if not recs:
        return []
    sets = [np.array([complex(z) for z in r.zero_list()], dtype=np.complex128) for r in recs]
    tracks = [[z] for z in sets[0]]
    alive = list(range(len(tracks)))
    for cur in sets[1:]:
        prev = np.array([tracks[t][-1] for t in alive], dtype=np.complex128)
        if prev.size == 0 or cur.size == 0:
            alive = []
            break
        cost = np.abs(prev[:, None] - cur[None, :])
        rows, cols = linear_sum_assignment(cost)
        nxt = []
        for i, j in zip(rows, cols):
            tracks[alive[i]].append(cur[j])
            nxt.append(alive[i])
        alive = nxt
    full = [tracks[t] for t in alive if len(tracks[t]) == len(sets)]
    centers = [np.mean(tr[-center_span:]) for tr in full]
    groups: list[list[int]] = []
    for i, c in enumerate(centers):
        for g in groups:
            ref = centers[g[0]]
            if abs(c - ref) <= merge_radius * max(1.0, abs(ref)):
                g.append(i)
                break
        else:
            groups.append([i])
    out = []
    window = (recs[0].n, recs[-1].n)
    for g in groups:
        members = [z for i in g for z in full[i]]
        center = complex(np.mean([centers[i] for i in g]))
        drift = float(max(abs(z - center) for z in members))
        out.append(PoleEstimateCluster(center, len(g), tuple(members), drift, window))
    out.sort(key=lambda c: (abs(c.center), math.atan2(c.center.imag, c.center.real)))
    return out


# ---------------------------------------------------------------------------
# derivative rates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivativeRates:
    xi: object
    per_order: tuple  # RateEstimate per j = 0..s_bar
    rate: float
    predicted: float | None = None


def derivative_rates(sw: SweepResult, xi, s_bar: int, window: tuple | None = None,
                     predicted: float | None = None) -> DerivativeRates:
    """Rates of ``|Q_n^{(j)}(xi)|`` for ``j = 0..s_bar`` and their maximum."""
    ctx = sw.ctx
    xi = ctx.convert(xi)
    if xi == 0:
        raise ValueError("xi must be nonzero")
    r = abs(xi)
    per = []
    for j in range(s_bar + 1):
        vals = [rec.Q.derivative(j)(xi) for rec in sw.records]
        floors = [rec.noise_floor * max(1, rec.Q.derivative(j).abs_eval(r)) for rec in sw.records]
        per.append(fit_geometric_rate(vals, sw.ns, window, floors, method=f"derivative_{j}"))
    return DerivativeRates(xi, tuple(per), max(e.fitted_rate for e in per), predicted)


# ---------------------------------------------------------------------------
# uniform convergence on circles
# ---------------------------------------------------------------------------

def _circle_errors_double(model: MeromorphicModel, rec: ApproximantRecord, k: int, z: np.ndarray,
                          f_vals: np.ndarray):
    q = _accel.horner_grid(rec.Q.to_complex(), z)
    p = _accel.horner_grid(rec.P[k].to_complex(), z)
    err = float(np.max(np.abs(f_vals - p / q)))
    qmin = float(np.min(np.abs(q)))
    r = float(np.abs(z[0]))
    pr = float(rec.P[k].abs_eval(r))
    qr = float(rec.Q.abs_eval(r))
    scale = float(np.max(np.abs(f_vals))) + pr / qmin * (1.0 + qr / qmin)
    return err, DOUBLE_EPS * DOUBLE_GUARD * scale


def _circle_errors_mp(model: MeromorphicModel, rec: ApproximantRecord, k: int, points, f_vals):
    worst = 0
    for z, fz in zip(points, f_vals):
        worst = max(worst, abs(fz - rec.P[k](z) / rec.Q(z)))
    return worst, rec.noise_floor * 2 ** 8


def convergence_on_circle(sw: SweepResult, system: SystemModel, k: int, radius, samples: int = 256,
                          window: tuple | None = None, margin: float | None = None,
                          precision: str = "double") -> RateEstimate:
    """Rate of ``max |f_k - P_{n,k}/Q_n|`` on ``|z| = radius`` (``k`` zero-based).

    The circle must stay ``margin`` (default 5% of the radius) away from every
    pole of ``f_k`` and every system pole.  ``precision="double"`` samples with
    the compiled kernels; ``"mp"`` evaluates at the working precision.  The
    returned estimate carries ``predicted = radius / R*`` when the system
    pole enumeration is complete.
    """
    if samples < 16:
        raise ValueError("samples must be at least 16")
    model = system.components[k]
    ctx = model.ctx
    rho = ctx.mpf(radius)
    margin = float(rho) * 0.05 if margin is None else margin
    ps = enumerate_system_poles(system, check_independence=False)
    locations = [p.location for p in model.principal_parts] + ps.locations()
    for loc in locations:
        if abs(float(abs(loc)) - float(rho)) <= margin:
            raise ValueError(f"pole {ctx.mp.nstr(loc, 8)} lies within the margin of the circle")
    if rho >= model.tail_radius():
        raise ValueError("circle reaches the boundary of the tail")
    predicted = None
    if ps.complete:
        _, R_star = star_radii(system, ps, k)
        predicted = 0.0 if R_star == ctx.inf else float(rho / R_star)
    errs, floors = [], []
    if precision == "double":
        t = 2.0 * np.pi * np.arange(samples) / samples
        z = float(rho) * np.exp(1j * t)
        f_vals = model.evaluate_grid(z)
        for rec in sw.records:
            e, fl = _circle_errors_double(model, rec, k, z, f_vals)
            errs.append(e)
            floors.append(fl)
    elif precision == "mp":
        mp = ctx.mp
        points = [rho * mp.expjpi(ctx.mpf(2 * j) / samples) for j in range(samples)]
        f_vals = [model.evaluate(p) for p in points]
        for rec in sw.records:
            e, fl = _circle_errors_mp(model, rec, k, points, f_vals)
            errs.append(e)
            floors.append(fl)
    else:
        raise ValueError("precision must be 'double' or 'mp'")
    est = fit_geometric_rate(errs, sw.ns, window, floors, method=f"circle_{precision}")
    return RateEstimate(est.fitted_rate, est.window, est.residual, est.method, est.limsup_proxy, est.used,
                        est.excluded, predicted)


# ---------------------------------------------------------------------------
# inverse-type report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InverseDiagnosis:
    diagnostics: ZeroSetDiagnostics
    lower_bound_evidence: bool  # R_0(f) > 0 supported
    upper_bound_evidence: bool  # R_0(f) < infinity supported
    conclusion: str
    R0_estimate: object
    limit_rate: float | None
    branch: str | None
    ground_truth_R0: object
    consistent: bool | None
    notes: tuple
    bits: int = 512

    def as_dict(self) -> dict:
        ctx = get_context(self.bits)
        fmt = (lambda x: None if x is None else ctx.to_str(x))
        return {
            "conclusion": self.conclusion,
            "lower_bound_evidence": self.lower_bound_evidence,
            "upper_bound_evidence": self.upper_bound_evidence,
            "R0_estimate": fmt(self.R0_estimate),
            "limit_rate": None if self.limit_rate is None else repr(self.limit_rate),
            "dichotomy_branch": self.branch,
            "ground_truth_R0": fmt(self.ground_truth_R0),
            "consistent_with_ground_truth": self.consistent,
            "notes": list(self.notes),
            "diagnostics": self.diagnostics.as_dict(ctx),
        }


def _dichotomy_branch(model: MeromorphicModel, limit: Polynomial, m_star: int, match_tol: float):
    """Which alternative of the limit-denominator dichotomy the structural model realizes."""
    ctx = model.ctx
    R = disk_radii_Rm(model, m_star)
    inside = [(p.location, p.order) for p in model.principal_parts if abs(p.location) < R]
    zeros = [z for z, mult in _clusters(limit) for _ in range(mult)]
    unmatched_zeros = list(zeros)
    all_matched = True
    count = 0
    for loc, order in inside:
        count += order
        for _ in range(order):
            hit = next((z for z in unmatched_zeros if abs(z - loc) <= match_tol * max(1, abs(loc))), None)
            if hit is None:
                all_matched = False
            else:
                unmatched_zeros.remove(hit)
    if count == m_star and all_matched:
        return "poles_in_disk", R
    # radius of convergence of limit * f: poles not cancelled by zeros, and the tail
    remaining = list(zeros)
    radii = [model.tail_radius()]
    for p in model.principal_parts:
        left = p.order
        for _ in range(p.order):
            hit = next((z for z in remaining if abs(z - p.location) <= match_tol * max(1, abs(p.location))), None)
            if hit is not None:
                remaining.remove(hit)
                left -= 1
        if left > 0:
            radii.append(abs(p.location))
    if min(radii) > R:
        return "larger_radius", R
    return None, R


def _clusters(p: Polynomial):
    from .numerics import root_clusters
    return root_clusters(p) if p.degree >= 1 else []


def inverse_diagnosis(source, model: MeromorphicModel | None = None, limit: Polynomial | None = None,
                      window: tuple | None = None, match_tol: float = 1e-6) -> InverseDiagnosis:
    """Evidence about ``R_0(f)`` from the zeros of the denominators of a row.

    ``source`` is a :class:`SweepResult` or a list of records (Padé or
    incomplete Padé of a single series).  With a converging limit denominator
    the report also names the alternative of the limit dichotomy that the
    structural ``model`` (when given) realizes.  This is a consistency report,
    not a proof.
    """
    if isinstance(source, SweepResult):
        records = list(source.records)
        limit = limit if limit is not None else source.Q_limit
        norms = source.norms if source.Q_limit is not None and limit is source.Q_limit else None
    else:
        records = list(source)
        norms = None
    diag = defect_diagnostics(records)
    ctx = records[0].ctx
    notes = []
    lower = diag.hypothesis_i
    trailing = [r for r in records if diag.window[0] <= r.n <= diag.window[1]]
    has_zeros = any(r.m_n >= 1 for r in trailing)
    upper = diag.hypothesis_ii and has_zeros
    if lower and upper:
        conclusion = "0 < R_0(f) < inf"
    elif lower:
        conclusion = "R_0(f) > 0"
    elif upper:
        conclusion = "R_0(f) < inf"
    else:
        conclusion = "no evidence"
    if not has_zeros:
        notes.append("denominators have no zeros in the trailing window")
    rate = None
    if limit is not None:
        if norms is None:
            norms = [coefficient_norm(limit - r.Q) for r in records]
        floors = [r.noise_floor * max(1, coefficient_norm(limit)) for r in records]
        try:
            rate = fit_geometric_rate(norms, [r.n for r in records], window, floors).fitted_rate
        except RateFitError as exc:
            notes.append(f"limit rate not fitted: {exc}")
    R0_est = None
    if limit is not None and limit.degree >= 1 and diag.m_total == diag.m_star and rate is not None and rate < 1:
        R0_est = min(abs(z) for z, _ in _clusters(limit))
    branch = None
    truth = None
    consistent = None
    if model is not None:
        truth = radius_R0(model)
        if conclusion == "0 < R_0(f) < inf":
            consistent = 0 < truth < ctx.inf
        elif conclusion == "R_0(f) > 0":
            consistent = truth > 0
        elif conclusion == "R_0(f) < inf":
            consistent = truth < ctx.inf
        if R0_est is not None:
            close = abs(R0_est - truth) <= match_tol * max(1, truth)
            consistent = bool(consistent) and close if consistent is not None else close
        if limit is not None and rate is not None and rate < 1 and limit.degree == diag.m_total:
            branch, _ = _dichotomy_branch(model, limit, diag.m_star, match_tol)
            if branch is None:
                notes.append("neither alternative of the dichotomy matched the structural model")
    return InverseDiagnosis(diag, lower, upper, conclusion, R0_est, rate, branch, truth, consistent,
                            tuple(notes), bits=ctx.bits)


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

SWEEP_CSV_COLUMNS = ("n", "deg_Q", "lambda_n", "m_n", "tau_n", "null_dimension", "norm_to_limit", "zeros")


def sweep_to_csv(sw: SweepResult) -> str:
    """One row per ``n``: fixed columns, then one ``abs_dQ<j>_at_<xi>`` column per derivative series."""
    ctx = sw.ctx
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    dkeys = sorted(sw.derivatives)
    w.writerow(list(SWEEP_CSV_COLUMNS) + [f"abs_dQ{j}_at_{label}" for label, j in dkeys])
    for i, r in enumerate(sw.records):
        zeros = ";".join(f"{ctx.to_str(z.real)},{ctx.to_str(z.imag)}" for z in r.zero_list())
        norm = "" if sw.norms[i] is None else ctx.to_str(sw.norms[i])
        row = [r.n, r.deg_Q, r.lambda_n, r.m_n, r.tau_n, r.null_dimension, norm, zeros]
        row += [ctx.to_str(abs(sw.derivatives[key][i])) for key in dkeys]
        w.writerow(row)
    return buf.getvalue()


def sweep_to_json(sw: SweepResult) -> dict:
    ctx = sw.ctx
    return {
        "m": list(sw.m),
        "n_range": [sw.ns[0], sw.ns[-1]],
        "limit_source": sw.limit_source,
        "normalization": sw.normalization,
        "Q_limit": None if sw.Q_limit is None else [ctx.complex_to_pair(c) for c in sw.Q_limit.coeffs],
        "norms": [None if x is None else ctx.to_str(x) for x in sw.norms],
        "records": [record_to_json(r) for r in sw.records],
    }


def clusters_to_json(clusters: Sequence[PoleEstimateCluster]) -> list:
    return [{"center": [repr(c.center.real), repr(c.center.imag)], "multiplicity": c.multiplicity,
             "drift": repr(c.drift), "window": list(c.window)} for c in clusters]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)
