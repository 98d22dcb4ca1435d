"""Haar/Schauder bases (dyadic and q-adic) and coefficient transforms.

The level-m basis functions on a parent interval are built from the
orthonormal sign table gamma[l, d] (rows l = 1..q-1, children d = 0..q-1):
the step function takes value q**(m/2) * gamma[l, d] on child d, and the
tent function is its running integral.  For q = 2 the single row is (1, -1)
and everything reduces to the classical dyadic system.

Synthesis and analysis work on grid samples with pure integer indexing, so
values at a level-m grid point never receive contributions from levels >= m
(exact zeros, not small floats).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .partition import PartitionGrid, check_interval_budget, qadic_grid

# ---------------------------------------------------------------------------
# The sign table gamma and its derived quantities
# ---------------------------------------------------------------------------


def gamma(q: int, l: int, d: int) -> float:
    """Entry (l, d) of the child sign table.

    Positive sqrt(q / (l(l+1))) on children 0..l-1, the balancing negative
    value -sqrt(q l / (l+1)) on child l, zero beyond.  Rows have mean zero
    and are orthonormal under the uniform child weight 1/q.
    """
    if not 1 <= l <= q - 1:
        raise ValidationError(f"branch index l={l} out of range [1, {q - 1}]")
    if not 0 <= d <= q - 1:
        raise ValidationError(f"child index d={d} out of range [0, {q - 1}]")
    if d <= l - 1:
        return math.sqrt(q / (l * (l + 1)))
    if d == l:
        return -math.sqrt(q * l / (l + 1))
    return 0.0


def gamma_rows(q: int) -> np.ndarray:
    """Full (q-1, q) sign table; row index is l-1."""
    if q < 2:
        raise ValidationError(f"q must be >= 2, got {q}")
    out = np.zeros((q - 1, q), dtype=np.float64)
    for l in range(1, q):
        for d in range(q):
            out[l - 1, d] = gamma(q, l, d)
    return out


def gamma_cumulative(q: int) -> np.ndarray:
    """Prefix sums over children: CUM[l-1, d] = sum_{d' < d} gamma[l, d'].

    Shape (q-1, q+1); column q is the full row sum (zero up to rounding).
    """
    rows = gamma_rows(q)
    cum = np.zeros((q - 1, q + 1), dtype=np.float64)
    cum[:, 1:] = np.cumsum(rows, axis=1)
    return cum


@dataclass(frozen=True, eq=False)
class GammaMatrix:
    q: int
    rows: np.ndarray = field(default=None)

    def __post_init__(self):
        rows = gamma_rows(self.q) if self.rows is None else np.asarray(self.rows, float)
        object.__setattr__(self, "rows", rows)

    def deviations(self) -> tuple[float, float]:
        """(max |row mean|, max |(1/q) G G^T - I|) for invariant checks."""
        mean_dev = float(np.max(np.abs(self.rows.mean(axis=1))))
        gram = self.rows @ self.rows.T / self.q
        ortho_dev = float(np.max(np.abs(gram - np.eye(self.q - 1))))
        return mean_dev, ortho_dev


def eta(a, q: int, d: int) -> float:
    """Weighted child value sum_l a_l * gamma[l, d]."""
    return float(eta_all(a, q)[d])


def eta_all(a, q: int) -> np.ndarray:
    """All q child values of the branch combination defined by weights ``a``."""
    a = np.asarray(a, dtype=np.float64)
    if a.shape != (q - 1,):
        raise ValidationError(f"branch weights must have length q-1={q - 1}, got {a.shape}")
    if not np.any(a != 0.0):
        raise ValidationError("branch weights must not be all zero")
    return a @ gamma_rows(q)


# ---------------------------------------------------------------------------
# Pointwise basis evaluation (half-open child convention)
# ---------------------------------------------------------------------------


def _check_indices(q: int, m: int, k: int, l: int) -> None:
    if m < 0:
        raise ValidationError(f"level m must be >= 0, got {m}")
    if not 0 <= k < q ** m:
        raise ValidationError(f"position k={k} out of range [0, {q ** m}) at level {m}")
    if not 1 <= l <= q - 1:
        raise ValidationError(f"branch index l={l} out of range [1, {q - 1}]")


def haar_eval(q: int, m: int, k: int, l: int, t):
    """Step basis function at ``t``; children are half-open [left, right).

    Evaluation is honest pointwise float arithmetic: ``t`` is taken at face
    value, so for bases whose breakpoints are not binary floats the sample
    lands in the child containing the float, as it should.
    """
    _check_indices(q, m, k, l)
    t_arr = np.asarray(t, dtype=np.float64)
    u = t_arr * q ** (m + 1) - k * q
    inside = (u >= 0.0) & (u < q)
    d = np.clip(np.floor(u).astype(np.int64), 0, q - 1)
    vals = np.where(inside, q ** (0.5 * m) * gamma_rows(q)[l - 1][d], 0.0)
    return float(vals) if np.isscalar(t) else vals


def schauder_eval(q: int, m: int, k: int, l: int, t):
    """Tent basis function at ``t``: the running integral of the step basis.

    Closed-form piecewise-linear evaluation; zero outside the support and at
    both endpoints (the integrand has mean zero over the parent).
    """
    _check_indices(q, m, k, l)
    t_arr = np.asarray(t, dtype=np.float64)
    u = t_arr * q ** (m + 1) - k * q
    inside = (u > 0.0) & (u < q)
    d = np.clip(np.floor(u).astype(np.int64), 0, q - 1)
    frac = u - d
    cum = gamma_cumulative(q)[l - 1]
    g = gamma_rows(q)[l - 1]
    scale = q ** (0.5 * m) / q ** (m + 1)
    vals = np.where(inside, scale * (cum[d] + g[d] * frac), 0.0)
    return float(vals) if np.isscalar(t) else vals


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoefficientArray:
    """Ragged tent-coefficient array plus endpoint values.

    Level m holds an array of shape (2**m,) when q == 2 and (q**m, q-1) for
    q >= 3 (one coefficient per branch).  ``boundary`` carries (x(0), x(1)),
    which the expansions represent by an affine part.
    """

    q: int
    boundary: tuple
    levels: tuple

    def __post_init__(self):
        if self.q < 2:
            raise ValidationError(f"q must be >= 2, got {self.q}")
        b = (float(self.boundary[0]), float(self.boundary[1]))
        object.__setattr__(self, "boundary", b)
        if not all(np.isfinite(b)):
            raise ValidationError("boundary values must be finite")
        lv = []
        for m, arr in enumerate(self.levels):
            a = np.asarray(arr, dtype=np.float64)
            want = (self.q ** m,) if self.q == 2 else (self.q ** m, self.q - 1)
            if a.shape != want:
                raise ValidationError(f"level {m} must have shape {want}, got {a.shape}")
            if not np.all(np.isfinite(a)):
                raise ValidationError(f"level {m} contains non-finite coefficients")
            a.setflags(write=False)
            lv.append(a)
        object.__setattr__(self, "levels", tuple(lv))

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    def level_matrix(self, m: int) -> np.ndarray:
        """Level m as a (q**m, q-1) matrix regardless of q."""
        arr = self.levels[m]
        return arr.reshape(self.q ** m, 1) if self.q == 2 else arr

    def theta(self, m: int, k: int, l: int = 1) -> float:
        return float(self.level_matrix(m)[k, l - 1])

    def zeroed_from(self, n: int) -> "CoefficientArray":
        """Copy with all levels >= n replaced by zeros."""
        lv = [a if m < n else np.zeros_like(a) for m, a in enumerate(self.levels)]
        return CoefficientArray(q=self.q, boundary=self.boundary, levels=tuple(lv))


@dataclass(frozen=True, eq=False)
class SampledPath:
    """Values of a continuous path on one partition grid.

    ``values`` are stored raw; ``offset`` is an additive constant applied on
    materialization.  Increment-based quantities read the raw values, so a
    constant shift provably cannot change them -- this is what makes profiles
    of shifted paths literally identical, not merely close.
    """

    grid: PartitionGrid
    values: np.ndarray
    offset: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != self.grid.points.shape:
            raise ValidationError(
                f"values shape {v.shape} does not match grid with {self.grid.points.shape[0]} points"
            )
        if not np.all(np.isfinite(v)):
            raise ValidationError("path values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def q(self) -> int:
        return self.grid.q

    @property
    def level(self) -> int:
        return self.grid.level

    @property
    def samples(self) -> np.ndarray:
        """Materialized values (raw + offset)."""
        if self.offset == 0.0:
            return self.values
        return self.values + self.offset

    def increments(self) -> np.ndarray:
        """Consecutive differences; independent of ``offset`` by construction."""
        return np.diff(self.values)

    def restrict(self, level: int) -> "SampledPath":
        """Samples on the coarser level-``level`` subgrid of the same sequence."""
        stride = self.q ** (self.level - level)
        return SampledPath(
            grid=self.grid.restrict(level),
            values=self.values[::stride],
            offset=self.offset,
            meta={**self.meta, "restricted_from": self.level},
        )

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))


def qadic_path(values, q: int = 2, meta: dict | None = None, offset: float = 0.0) -> SampledPath:
    """Wrap raw values (length q**n + 1) as a path on the q-adic level-n grid."""
    values = np.asarray(values, dtype=np.float64)
    count = values.shape[0] - 1
    level = 0
    while q ** level < count:
        level += 1
    if q ** level != count:
        raise ValidationError(f"value count {count + 1} is not q**n + 1 for q={q}")
    return SampledPath(grid=qadic_grid(q, level), values=values, offset=offset, meta=meta or {})


# ---------------------------------------------------------------------------
# Synthesis: coefficients -> grid samples (exact integer indexing)
# ---------------------------------------------------------------------------


def synthesize(coeffs: CoefficientArray, n: int, meta: dict | None = None) -> SampledPath:
    """Evaluate the expansion at every level-``n`` grid point.

    Tent functions of level m >= n vanish at all level-n points, so only
    levels 0..n-1 contribute; coefficient levels beyond that are ignored.
    """
    if n < 1:
        raise ValidationError(f"target level must be >= 1, got {n}")
    q = coeffs.q
    check_interval_budget(q, n)
    grid = qadic_grid(q, n)
    j = np.arange(q ** n + 1, dtype=np.int64)
    x0, x1 = coeffs.boundary
    values = x0 + (x1 - x0) * grid.points

    cum = gamma_cumulative(q)[:, :q]   # (q-1, q)
    rows = gamma_rows(q)               # (q-1, q)
    for m in range(min(n, coeffs.num_levels)):
        theta = coeffs.level_matrix(m)
        width = q ** (n - m)
        child_w = q ** (n - m - 1)
        k = np.minimum(j // width, q ** m - 1)
        r = j - k * width
        d = np.minimum(r // child_w, q - 1)
        v = r - d * child_w
        pre = theta @ cum    # (q**m, q): accumulated area entering child d
        slope = theta @ rows  # (q**m, q): slope inside child d
        scale = q ** (0.5 * m) / q ** (m + 1)
        contrib = scale * (pre[k, d] + slope[k, d] * (v / child_w))
        contrib[-1] = 0.0   # tents vanish at t = 1 exactly
        values = values + contrib

    return SampledPath(
        grid=grid,
        values=values,
        meta={**(meta or {}), "source": "synthesize", "level": n,
              "coefficient_levels": coeffs.num_levels},
    )


# ---------------------------------------------------------------------------
# Analysis: grid samples -> coefficients
# ---------------------------------------------------------------------------


def _analysis_matrix(q: int) -> np.ndarray:
    """Maps interior-child detail values to branch coefficients.

    detail_d = q**(-m/2-1) * sum_l CUM[l, d] * theta_l for d = 1..q-1; the
    (q-1) x (q-1) system is invertible because the tent functions at one
    parent are linearly independent.  For q = 2 it is the scalar 1.
    """
    bmat = gamma_cumulative(q)[:, 1:q].T  # (q-1, q-1): row d-1, column l-1
    return np.linalg.inv(bmat)


def analyze(path: SampledPath, levels: int | None = None) -> CoefficientArray:
    """Recover coefficients of levels 0..n-1 from level-n grid samples.

    For q = 2 this reproduces the classical closed form
    2**(m/2) * (2 x(mid) - x(left) - x(right)); for q >= 3 the per-parent
    linear system is solved with a precomputed inverse.
    """
    if path.grid.generator != "q-adic":
        raise ValidationError("analysis requires samples on a q-adic grid")
    n = path.level
    if n < 1:
        raise ValidationError("analysis needs grid level >= 1")
    if levels is None:
        levels = n
    if not 1 <= levels <= n:
        raise ValidationError(f"levels must lie in [1, {n}], got {levels}")
    q = path.q
    vals = path.samples
    inv = _analysis_matrix(q)
    out = []
    for m in range(levels):
        stride = q ** (n - m)
        child = q ** (n - m - 1)
        parents = vals[::stride]
        children = vals[::child]
        interp_w = np.arange(1, q, dtype=np.float64) / q
        base = parents[:-1][:, None] + np.diff(parents)[:, None] * interp_w[None, :]
        interior = children.reshape(-1)[
            np.arange(q ** m)[:, None] * q + np.arange(1, q)[None, :]
        ]
        detail = interior - base
        theta = q ** (0.5 * m + 1) * detail @ inv.T
        out.append(theta[:, 0] if q == 2 else theta)
    return CoefficientArray(q=q, boundary=(float(vals[0]), float(vals[-1])), levels=tuple(out))


# ---------------------------------------------------------------------------
# Coefficient diagnostics
# ---------------------------------------------------------------------------


def xi(coeffs: CoefficientArray, p: float, m: int) -> float:
    """Level-m variation diagnostic q**(-mp/2) * sum |theta|^p.

    For q >= 3 this sums over branches as well; that generalization beyond
    uniform-magnitude arrays is this library's convention (for a
    uniform-magnitude array use its own level diagnostic, which drops the
    branch-weight factor).
    """
    if p <= 1:
        raise ValidationError(f"exponent p must be > 1, got {p}")
    arr = coeffs.level_matrix(m)
    return float(coeffs.q ** (-m * p / 2.0) * np.sum(np.abs(arr) ** p))


def xi_profile(coeffs: CoefficientArray, p: float) -> np.ndarray:
    return np.array([xi(coeffs, p, m) for m in range(coeffs.num_levels)])


def holder_bound(coeffs: CoefficientArray, alpha: float) -> float:
    """Finite-level truncation of sup_m q**(m(alpha - 1/2)) max_k |theta|.

    Boundedness of the full supremum characterizes alpha-Holder continuity;
    on a stored array only the truncated sup is available.
    """
    if not 0 < alpha < 1:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
    best = 0.0
    for m in range(coeffs.num_levels):
        level_max = float(np.max(np.abs(coeffs.levels[m])))
        best = max(best, coeffs.q ** (m * (alpha - 0.5)) * level_max)
    return best
