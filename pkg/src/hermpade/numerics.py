"""
Arbitrary-precision complex scalars and dense polynomial algebra.

Scalars are plain ``mpc``/``mpf`` values created by a private mpmath
context, so every number made under a :class:`PrecisionContext` carries its
precision.  Contexts are cached by bit count (see :func:`get_context`) and are
never mutated after construction, which makes them safe to share between
threads.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import mpmath
import numpy as np

DEFAULT_BITS = 512


class RootFindingError(ArithmeticError):
    """Simultaneous iteration did not settle within its step budget."""


class EvaluationError(ArithmeticError):
    """An evaluator failed at a sample point (e.g. a pole on the circle)."""

    def __init__(self, point, cause):
        super().__init__(f"evaluation failed at z={point}: {cause}")
        self.point = point
        self.cause = cause


class PrecisionContext:
    """Working precision plus the relative threshold used for "is zero" decisions.

    Parameters
    ----------
    significand_bits : int
        Binary precision of every scalar, at least 64.
    zero_tolerance : float or str, optional
        Relative threshold in (0, 1).  Defaults to ``2**(-significand_bits/2)``.
    """

    def __init__(self, significand_bits: int = DEFAULT_BITS, zero_tolerance=None):
        if int(significand_bits) != significand_bits or significand_bits < 64:
            raise ValueError("significand_bits must be an integer >= 64")
        self.bits = int(significand_bits)
        self.mp = mpmath.MPContext()
        self.mp.prec = self.bits
        if zero_tolerance is None:
            zero_tolerance = self.mp.mpf(2) ** (-(self.bits // 2))
        tol = self.mp.mpf(zero_tolerance)
        if not (0 < tol < 1):
            raise ValueError("zero_tolerance must lie in (0, 1)")
        self.zero_tolerance = tol
        self.eps = self.mp.mpf(2) ** (-self.bits)
        # decimal digits needed for a round trip through a string
        self.dps = int(math.ceil(self.bits * math.log10(2))) + 2

    def __repr__(self):
        return f"PrecisionContext(significand_bits={self.bits})"

    def __reduce__(self):
        return (get_context, (self.bits,))

    @property
    def inf(self):
        return self.mp.inf

    def mpf(self, x):
        return self.mp.mpf(_fraction_aware(x, self))

    def mpc(self, re, im=0):
        """Build a complex scalar from numbers, strings ("1/3" allowed) or mpmath values."""
        if isinstance(re, complex) and im == 0:
            return self.mp.mpc(re.real, re.imag)
        if hasattr(re, "_mpc_") and im == 0:
            return self.mp.make_mpc(re._mpc_)
        return self.mp.mpc(_fraction_aware(re, self), _fraction_aware(im, self))

    def convert(self, x):
        """Coerce ``x`` (number, string, pair, mpmath value) into this context's ``mpc``."""
        if isinstance(x, (list, tuple)) and len(x) == 2:
            return self.mpc(x[0], x[1])
        if isinstance(x, dict):
            return self.mpc(x.get("re", 0), x.get("im", 0))
        return self.mpc(x)

    def is_zero(self, x, scale=1) -> bool:
        return abs(x) <= self.zero_tolerance * abs(scale)

    def close(self, a, b, rel=None) -> bool:
        tol = self.zero_tolerance if rel is None else rel
        if self.mp.isinf(a) or self.mp.isinf(b):
            return a == b
        return abs(a - b) <= tol * max(1, abs(a), abs(b))

    def to_str(self, x) -> str:
        """Decimal string carrying enough digits to re-parse to the same value."""
        x = self.mp.mpf(x)
        if self.mp.isinf(x):
            return "inf" if x > 0 else "-inf"
        return mpmath.libmp.to_str(x._mpf_, self.dps)

    def complex_to_pair(self, z) -> list:
        z = self.mpc(z)
        return [self.to_str(z.real), self.to_str(z.imag)]


def _fraction_aware(x, ctx):
    if isinstance(x, Fraction):
        return ctx.mp.mpf(x.numerator) / x.denominator
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            frac = Fraction(s)
            return ctx.mp.mpf(frac.numerator) / frac.denominator
        return s
    if hasattr(x, "_mpf_"):
        return ctx.mp.make_mpf(x._mpf_)
    return x


@lru_cache(maxsize=None)
def get_context(bits: int = DEFAULT_BITS) -> PrecisionContext:
    """Shared, read-only context for a given precision."""
    return PrecisionContext(bits)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Polynomial:
    """Immutable dense complex polynomial, coefficients in ascending degree order.

    Trailing coefficients at or below ``zero_tolerance * max|coeff|`` are dropped,
    so ``degree`` is the index of the last significant coefficient.  The zero
    polynomial has no coefficients and degree ``-1``.
    """

    __slots__ = ("coeffs", "ctx")

    def __init__(self, coeffs: Iterable = (), ctx: PrecisionContext | None = None, trim: bool = True):
        ctx = ctx or get_context()
        cs = [ctx.convert(c) for c in coeffs]
        if trim and cs:
            top = max(abs(c) for c in cs)
            if top == 0:
                cs = []
            else:
                cut = ctx.zero_tolerance * top
                while cs and abs(cs[-1]) <= cut:
                    cs.pop()
        self.coeffs = tuple(cs)
        self.ctx = ctx

    # construction helpers -------------------------------------------------

    @classmethod
    def from_roots(cls, roots: Iterable, ctx: PrecisionContext | None = None) -> "Polynomial":
        """Monic polynomial with the given roots (repetition = multiplicity)."""
        ctx = ctx or get_context()
        cs = [ctx.mpc(1)]
        for r in roots:
            r = ctx.convert(r)
            nxt = [ctx.mpc(0)] * (len(cs) + 1)
            for i, c in enumerate(cs):
                nxt[i + 1] += c
                nxt[i] -= r * c
            cs = nxt
        return cls(cs, ctx)

    @classmethod
    def monomial(cls, k: int, ctx: PrecisionContext | None = None) -> "Polynomial":
        ctx = ctx or get_context()
        return cls([0] * k + [1], ctx)

    @classmethod
    def one(cls, ctx: PrecisionContext | None = None) -> "Polynomial":
        return cls([1], ctx)

    # basic queries ---------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.ctx.mpc(0)

    def __repr__(self):
        body = ", ".join(self.ctx.mp.nstr(c, 8) for c in self.coeffs)
        return f"Polynomial([{body}])"

    def __call__(self, z):
        acc = self.ctx.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def abs_eval(self, r):
        """``sum |c_k| r**k``: the scale against which evaluation roundoff is measured."""
        acc = self.ctx.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * r + abs(c)
        return acc

    # arithmetic --------------------------------------------------------------

    def _wrap(self, other):
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other], self.ctx)

    def __add__(self, other):
        other = self._wrap(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial([self[k] + other[k] for k in range(n)], self.ctx)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs], self.ctx, trim=False)

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = self.ctx.convert(other)
            return Polynomial([c * a for a in self.coeffs], self.ctx)
        if not self.coeffs or not other.coeffs:
            return Polynomial([], self.ctx)
        out = [self.ctx.mpc(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out, self.ctx)

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        return self * c

    def shift(self, k: int) -> "Polynomial":
        """Multiply by ``z**k``."""
        if not self.coeffs:
            return self
        return Polynomial([0] * k + list(self.coeffs), self.ctx, trim=False)

    def drop_low(self, k: int) -> "Polynomial":
        """Divide by ``z**k``, discarding the ``k`` lowest coefficients."""
        return Polynomial(self.coeffs[k:], self.ctx)

    def truncate(self, max_degree: int) -> "Polynomial":
        return Polynomial(self.coeffs[: max(max_degree + 1, 0)], self.ctx)

    def derivative(self, order: int = 1) -> "Polynomial":
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [k * cs[k] for k in range(1, len(cs))]
        return Polynomial(cs, self.ctx, trim=False)

    def monic(self) -> "Polynomial":
        lead = self.leading
        return Polynomial([c / lead for c in self.coeffs[:-1]] + [self.ctx.mpc(1)], self.ctx, trim=False)

    def deflate(self, root) -> "Polynomial":
        """Quotient of synthetic division by ``(z - root)``; the remainder is discarded."""
        n = self.degree
        if n < 1:
            raise ValueError("cannot deflate a constant")
        q = [self.ctx.mpc(0)] * n
        acc = self.coeffs[n]
        for k in range(n - 1, -1, -1):
            q[k] = acc
            acc = self.coeffs[k] + acc * root
        return Polynomial(q, self.ctx, trim=False)

    def taylor_at(self, a) -> list:
        """Coefficients of the expansion in powers of ``(z - a)``."""
        cs = list(self.coeffs)
        n = len(cs)
        # repeated synthetic division (Horner shift)
        for i in range(n):
            for k in range(n - 2, i - 1, -1):
                cs[k] = cs[k] + a * cs[k + 1]
        return cs

    def to_complex(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=np.complex128)

    def almost_equal(self, other: "Polynomial", tol) -> bool:
        return coefficient_norm(self - other) <= tol


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def coefficient_norm(p: Polynomial, kind: str = "linf"):
    """Norm of the coefficient vector; ``linf`` (default), ``l1`` or ``l2``."""
    ctx = p.ctx
    if not p.coeffs:
        return ctx.mpf(0)
    mags = [abs(c) for c in p.coeffs]
    if kind == "linf":
        return max(mags)
    if kind == "l1":
        return ctx.mp.fsum(mags)
    if kind == "l2":
        return ctx.mp.sqrt(ctx.mp.fsum(m * m for m in mags))
    raise ValueError(f"unknown norm {kind!r}")


def circle_points(radius, samples: int, ctx: PrecisionContext | None = None) -> list:
    ctx = ctx or get_context()
    r = ctx.mpf(radius)
    return [r * ctx.mp.expjpi(ctx.mpf(2 * j) / samples) for j in range(samples)]


def sup_norm_on_circle(f: Polynomial | Callable, radius, samples: int = 256,
                       ctx: PrecisionContext | None = None):
    """Max modulus of ``f`` over ``samples`` equispaced points of ``|z| = radius``.

    This is a lower approximation of the true sup norm.  A failure to evaluate
    at a sample point raises :class:`EvaluationError` carrying that point.
    """
    if samples < 16:
        raise ValueError("need at least 16 samples")
    if isinstance(f, Polynomial):
        ctx = ctx or f.ctx
    ctx = ctx or get_context()
    if not ctx.mpf(radius) > 0:
        raise ValueError("radius must be positive")
    best = ctx.mpf(0)
    for z in circle_points(radius, samples, ctx):
        try:
            v = abs(f(z))
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise EvaluationError(z, exc) from exc
        if not ctx.mp.isfinite(v):
            raise EvaluationError(z, "non-finite value")
        if v > best:
            best = v
    return best


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------

def valuation_at_zero(p: Polynomial) -> int:
    """Order of ``z = 0`` as a zero of ``p``."""
    if p.is_zero():
        raise ValueError("valuation of the zero polynomial is undefined")
    cut = p.ctx.zero_tolerance * coefficient_norm(p)
    for k, c in enumerate(p.coeffs):
        if abs(c) > cut:
            return k
    raise AssertionError("unreachable: a trimmed polynomial has a significant coefficient")


def residual_bound(p: Polynomial, z):
    """Roundoff-level bound on ``|p(z)|`` used as the root acceptance test."""
    return 16 * max(p.degree, 1) * p.ctx.eps * p.abs_eval(abs(z))


def _seeds(p: Polynomial) -> list:
    ctx = p.ctx
    n = p.degree
    top = coefficient_norm(p)
    c = np.array([complex(ctx.mpc(x / top)) for x in p.coeffs], dtype=np.complex128)
    seeds = []
    if np.all(np.isfinite(c)) and c[-1] != 0:
        try:
            seeds = list(np.roots(c[::-1]))
        except np.linalg.LinAlgError:
            seeds = []
    if len(seeds) != n or not np.all(np.isfinite(seeds)):
        # Cauchy bound circle with an offset angle
        bound = 1 + max(float(abs(ctx.mpc(x / p.leading))) for x in p.coeffs[:-1])
        seeds = [0.5 * bound * np.exp(2j * np.pi * (k + 0.25) / n) for k in range(n)]
    out = []
    for k, s in enumerate(seeds):
        s = complex(s)
        # separate coincident seeds, deterministic
        while any(abs(s - t) <= 1e-12 * (1 + abs(s)) for t in out):
            s += 1e-9 * (1 + abs(s)) * np.exp(1j * (0.7 + k))
        out.append(s)
    return [ctx.mpc(s) for s in out]


def _aberth(p: Polynomial, max_iter: int) -> list:
    ctx = p.ctx
    n = p.degree
    dp = p.derivative()
    z = _seeds(p)
    done = [False] * n
    for _ in range(max_iter):
        for i in range(n):
            if done[i]:
                continue
            zi = z[i]
            val = p(zi)
            if abs(val) <= residual_bound(p, zi):
                done[i] = True
                continue
            dval = dp(zi)
            if dval == 0:
                z[i] = zi * (1 + ctx.zero_tolerance) + ctx.zero_tolerance
                continue
            ratio = val / dval
            s = ctx.mpc(0)
            for j in range(n):
                if j != i:
                    diff = zi - z[j]
                    if diff != 0:
                        s += 1 / diff
            z[i] = zi - ratio / (1 - ratio * s)
        if all(done):
            return z
    raise RootFindingError(f"Aberth iteration did not converge in {max_iter} steps (degree {n})")


def cluster_radius(ctx: PrecisionContext):
    """Relative radius under which computed roots are treated as one multiple root."""
    return ctx.zero_tolerance ** ctx.mpf("0.125")


def _cluster(points: Sequence, ctx: PrecisionContext) -> list[list[int]]:
    rad = cluster_radius(ctx)
    parent = list(range(len(points)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            scale = max(1, abs(points[i]), abs(points[j]))
            if abs(points[i] - points[j]) <= rad * scale:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(points)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def _refine_multiple(p: Polynomial, center, mult: int):
    # a mult-fold root of p is a simple root of its (mult-1)-th derivative
    ctx = p.ctx
    q = p.derivative(mult - 1)
    dq = q.derivative()
    start = c = center
    limit = 4 * cluster_radius(ctx) * max(1, abs(center))
    for _ in range(200):
        dv = dq(c)
        if dv == 0:
            break
        step = q(c) / dv
        c = c - step
        if abs(c - start) > limit:
            return start
        if abs(step) <= 64 * ctx.eps * max(1, abs(c)):
            break
    return c


def root_clusters(p: Polynomial, max_iter: int | None = None) -> list[tuple]:
    """Distinct roots of ``p`` with estimated multiplicities, ``[(root, mult), ...]``.

    Roots are seeded from double-precision companion eigenvalues and polished
    by Aberth simultaneous iteration at working precision.  Roots closer than
    :func:`cluster_radius` (relative) are merged into one multiple root,
    whose location is then refined as a simple root of the matching
    derivative of ``p``.
    """
    if p.degree < 1:
        raise ValueError("root finding needs degree >= 1")
    ctx = p.ctx
    v = valuation_at_zero(p)
    out = []
    if v:
        out.append((ctx.mpc(0), v))
    rest = p.drop_low(v)
    if rest.degree >= 1:
        rest = rest.monic()
        found = _aberth(rest, max_iter or (4 * ctx.bits + 100))
        for group in _cluster(found, ctx):
            pts = [found[i] for i in group]
            center = ctx.mp.fsum(pts) / len(pts)
            if len(pts) > 1:
                center = _refine_multiple(rest, center, len(pts))
            out.append((center, len(pts)))
    return out


def roots(p: Polynomial, max_iter: int | None = None) -> list:
    """All ``degree`` roots of ``p``, repeated according to multiplicity."""
    out = []
    for r, k in root_clusters(p, max_iter):
        out.extend([r] * k)
    return out


# ---------------------------------------------------------------------------
# null spaces
# ---------------------------------------------------------------------------

def _as_rows(matrix, ctx: PrecisionContext) -> list[list]:
    if hasattr(matrix, "rows") and hasattr(matrix, "cols") and not isinstance(matrix, list):
        return [[ctx.convert(matrix[i, j]) for j in range(matrix.cols)] for i in range(matrix.rows)]
    return [[ctx.convert(x) for x in row] for row in matrix]


def null_space(matrix, ctx: PrecisionContext | None = None, tol=None):
    """Orthonormal numerical null space of a dense complex matrix.

    Returns ``(basis, singular_values)`` where ``basis`` lists null vectors
    ordered from the smallest singular direction outward.  A singular value
    counts as zero when it is at most ``tol * sigma_max`` (``tol`` defaults
    to the context's ``zero_tolerance``).
    """
    ctx = ctx or get_context()
    rows = _as_rows(matrix, ctx)
    if not rows or not rows[0]:
        raise ValueError("empty matrix")
    r, c = len(rows), len(rows[0])
    tol = ctx.zero_tolerance if tol is None else ctx.mpf(tol)
    mp = ctx.mp
    A = mp.matrix(rows)
    if all(x == 0 for row in rows for x in row):
        basis = [[mp.mpc(1 if i == j else 0) for i in range(c)] for j in range(c - 1, -1, -1)]
        return basis, [mp.mpf(0)] * min(r, c)
    _, S, V = mp.svd_c(A, full_matrices=True)
    sv = [S[i] for i in range(min(r, c))]
    smax = max(sv)
    # right singular directions, each tagged by its singular value (0 beyond rank)
    tagged = [(sv[i] if i < len(sv) else mp.mpf(0), i) for i in range(c)]
    small = [(s, i) for s, i in tagged if s <= tol * smax]
    small.sort(key=lambda t: (t[0], -t[1]))
    basis = [[ctx.mpc(mp.conj(V[i, j])) for j in range(c)] for _, i in small]
    return basis, sorted(sv, reverse=True)


def null_space_vector(matrix, ctx: PrecisionContext | None = None, tol=None):
    """Unit vector along the smallest singular direction, and the null dimension.

    The null dimension counts singular values at most ``tol * sigma_max``
    plus the ``cols - rows`` directions the matrix cannot constrain.
    """
    ctx = ctx or get_context()
    rows = _as_rows(matrix, ctx)
    if not rows or not rows[0]:
        raise ValueError("empty matrix")
    if len(rows) > len(rows[0]):
        raise ValueError("null_space_vector expects rows <= columns")
    basis, sv = null_space(rows, ctx, tol)
    if basis:
        return basis[0], len(basis)
    # full column rank is impossible for rows <= cols; kept for clarity
    raise AssertionError("rows <= cols always leaves a null direction")


def matvec(matrix, v):
    return [sum((a * b for a, b in zip(row, v)), 0) for row in matrix]


def vector_norm(v, ctx: PrecisionContext | None = None):
    ctx = ctx or get_context()
    return ctx.mp.sqrt(ctx.mp.fsum(abs(x) ** 2 for x in v))
