"""Reference paths with linear p-th variation and constructions on top.

The reference construction fixes one magnitude per level (default
c_m = q**(m(1/2 - 1/p)), which normalizes the level diagnostic to 1) and
spreads it over all positions, with free signs in the dyadic case and a
fixed branch-weight vector for q >= 3.  Scaled increments of such a path
are partial sums of a geometric series with sign/digit-dependent terms:

    q**(n/p) * (x((k+1)/q**n) - x(k/q**n)) = sum_{j=1..n} rho**j y_{n-j} w_j(k)

with rho = q**-(1-1/p), y_m the normalized magnitude, and w_j(k) either a
level sign (q = 2) or a digit-indexed branch value (q >= 3).  Because k ->
(w_1(k), ..., w_n(k)) enumerates all possibilities exactly once, level sums
equal expectations over independent uniform digits, and the limiting slope
of the variation is the p-th absolute moment of the full series.  That
moment is computed here by three independent routes: truncated exact
enumeration with a certified tail bound, stratified Monte Carlo, and a
cumulant-based closed form for even p.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._util import cumsum_stable, sum_stable
from .errors import BudgetError, ValidationError
from .partition import PartitionGrid, digits, digits_matrix, qadic_grid
from .schauder import (
    CoefficientArray,
    SampledPath,
    analyze,
    eta_all,
    synthesize,
)
from .variation import (
    VariationProfile,
    pvar_profile,
    stieltjes_against_profile,
    variation_index_estimate,
)

DEFAULT_ENUMERATION_BUDGET = 2 ** 26
SIGN_MATRIX_BUDGET = 2 ** 20


# ---------------------------------------------------------------------------
# Reference specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniformMagnitudeSpec:
    """Parameters of a uniform-magnitude reference path.

    c_rule "default" means c_m = q**(m(1/2 - 1/p)); an explicit sequence may
    be supplied for convergence studies.  ``signs`` applies only to q = 2
    ("plus", an integer seed, or explicit per-level +-1 arrays); for q >= 3
    the branch weights ``a`` (default all ones) play that role and signs must
    stay "plus".
    """

    q: int = 2
    p: float = 2.0
    levels: int = 16
    c_rule: object = "default"
    signs: object = "plus"
    a: tuple | None = None

    def __post_init__(self):
        if self.q < 2:
            raise ValidationError(f"q must be >= 2, got {self.q}")
        if self.p <= 1:
            raise ValidationError(f"p must be > 1, got {self.p}")
        if self.levels < 1:
            raise ValidationError(f"levels must be >= 1, got {self.levels}")
        if self.q == 2:
            if self.a is not None:
                raise ValidationError("branch weights apply only to q >= 3")
        else:
            a = tuple(float(v) for v in (self.a if self.a is not None else np.ones(self.q - 1)))
            if len(a) != self.q - 1:
                raise ValidationError(f"branch weights must have length {self.q - 1}")
            if not any(v != 0.0 for v in a):
                raise ValidationError("branch weights must not be all zero")
            object.__setattr__(self, "a", a)
            if self.signs != "plus":
                raise ValidationError("sign arrays apply only to q = 2")
        if isinstance(self.c_rule, str):
            if self.c_rule != "default":
                raise ValidationError(f"unknown c_rule {self.c_rule!r}")
        else:
            rule = tuple(float(v) for v in self.c_rule)
            if len(rule) < self.levels:
                raise ValidationError("explicit c_rule must cover all levels")
            if any(v < 0 for v in rule):
                raise ValidationError("magnitudes must be nonnegative")
            object.__setattr__(self, "c_rule", rule)
        if not (self.signs == "plus" or isinstance(self.signs, (int, np.integer))
                or isinstance(self.signs, (tuple, list))):
            raise ValidationError("signs must be 'plus', an integer seed, or explicit arrays")

    @property
    def rho(self) -> float:
        return self.q ** -(1.0 - 1.0 / self.p)

    def c(self, m: int) -> float:
        if self.c_rule == "default":
            return self.q ** (m * (0.5 - 1.0 / self.p))
        return self.c_rule[m]

    def y(self, m: int) -> float:
        """Normalized magnitude q**(m(1/p - 1/2)) c_m (exactly 1 by default)."""
        if self.c_rule == "default":
            return 1.0
        return self.q ** (m * (1.0 / self.p - 0.5)) * self.c(m)

    def xi_value(self, m: int) -> float:
        """Level diagnostic of the uniform construction: y_m**p."""
        return self.y(m) ** self.p

    def eta_values(self) -> np.ndarray:
        """The q per-child values driven by digits (signs +-1 when q = 2)."""
        if self.q == 2:
            return np.array([1.0, -1.0])
        return eta_all(self.a, self.q)

    def sign_arrays(self) -> list:
        """Per-level +-1 arrays (q = 2 only); deterministic in the seed."""
        if self.q != 2:
            raise ValidationError("sign arrays apply only to q = 2")
        if self.signs == "plus":
            return [np.ones(2 ** m, dtype=np.int8) for m in range(self.levels)]
        if isinstance(self.signs, (int, np.integer)):
            rng = np.random.default_rng(int(self.signs))
            return [
                (rng.integers(0, 2, size=2 ** m, dtype=np.int8) * 2 - 1).astype(np.int8)
                for m in range(self.levels)
            ]
        arrays = []
        for m, arr in enumerate(self.signs):
            a = np.asarray(arr, dtype=np.int8)
            if a.shape != (2 ** m,):
                raise ValidationError(f"sign array at level {m} must have length {2 ** m}")
            if not np.all(np.abs(a) == 1):
                raise ValidationError("sign entries must be +-1")
            arrays.append(a)
        if len(arrays) < self.levels:
            raise ValidationError("explicit signs must cover all levels")
        return arrays[: self.levels]

    def to_config(self) -> dict:
        signs = self.signs
        if isinstance(signs, (int, np.integer)):
            signs = {"seed": int(signs)}
        elif not isinstance(signs, str):
            signs = [list(map(int, np.asarray(s))) for s in signs]
        c_rule = self.c_rule if isinstance(self.c_rule, str) else list(self.c_rule)
        return {
            "q": int(self.q),
            "p": float(self.p),
            "levels": int(self.levels),
            "c_rule": c_rule,
            "signs": signs,
            "a": None if self.a is None else list(self.a),
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_config(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def build_reference(spec: UniformMagnitudeSpec) -> CoefficientArray:
    """Coefficient array of the reference path: c_m * sign (q=2) or c_m * a_l."""
    levels = []
    if spec.q == 2:
        for m, signs in enumerate(spec.sign_arrays()):
            levels.append(spec.c(m) * signs.astype(np.float64))
    else:
        a = np.asarray(spec.a, dtype=np.float64)
        for m in range(spec.levels):
            levels.append(np.tile(spec.c(m) * a, (spec.q ** m, 1)))
    return CoefficientArray(q=spec.q, boundary=(0.0, 0.0), levels=tuple(levels))


def reference_path(spec: UniformMagnitudeSpec, n: int) -> SampledPath:
    """Reference path sampled on the level-``n`` grid (requires n <= levels)."""
    if n > spec.levels:
        raise ValidationError(
            f"target level {n} exceeds the spec truncation level {spec.levels}"
        )
    path = synthesize(build_reference(spec), n)
    path.meta.update({"spec": spec.to_config(), "spec_digest": spec.digest(),
                      "truncation_level": spec.levels})
    return path


# ---------------------------------------------------------------------------
# The limiting variation constant: three independent oracles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VariationConstant:
    """An estimate of E|sum_j rho^j W_j|^p with its error accounting.

    ``error_bound`` is a deterministic bound (enumeration truncation or
    Monte Carlo digit truncation); ``stderr`` the statistical standard error
    (Monte Carlo only).
    """

    value: float
    method: str
    error_bound: float
    stderr: float | None = None
    details: dict = field(default_factory=dict)


def _series_weights(p: float, q: int, a) -> tuple[np.ndarray, float]:
    if q == 2:
        if a is not None:
            raise ValidationError("branch weights apply only to q >= 3")
        etas = np.array([1.0, -1.0])
    else:
        etas = eta_all(np.ones(q - 1) if a is None else np.asarray(a, float), q)
    rho = q ** -(1.0 - 1.0 / p)
    return etas, rho


def _truncation_bound(p: float, head_sup: float, tail_sup: float) -> float:
    """Bound on |E|Z|^p - E|Z_head|^p| for a mean-zero omitted tail.

    The linear term vanishes in expectation, so a second-order Taylor bound
    applies for p >= 2 and a Holder bound on the derivative for 1 < p < 2.
    The generic Lipschitz device p(2M)**(p-1) * tail_sup is kept as a cap.
    """
    if tail_sup == 0.0:
        return 0.0
    if p >= 2:
        smooth = 0.5 * p * (p - 1) * (head_sup + tail_sup) ** (p - 2) * tail_sup ** 2
    else:
        smooth = (2 ** (2 - p) / p) * tail_sup ** p
    total = head_sup + tail_sup
    lipschitz = p * (2 * total) ** (p - 1) * tail_sup
    return float(min(smooth, lipschitz))


def _sup_partial(rho: float, eta_sup: float, j_from: int, j_to) -> float:
    """sup of |sum_{j=j_from..j_to} rho^j W_j| with |W| <= eta_sup."""
    if j_to is None:
        return eta_sup * rho ** j_from / (1.0 - rho)
    if j_to < j_from:
        return 0.0
    return eta_sup * rho ** j_from * (1.0 - rho ** (j_to - j_from + 1)) / (1.0 - rho)


def _cross_sums(weights: list) -> np.ndarray:
    """All sums picking one entry from each weight set (iterated cross sum)."""
    sums = np.zeros(1, dtype=np.float64)
    for w in weights:
        sums = (sums[:, None] + w[None, :]).ravel()
    return sums


def _mean_abs_pow(a: np.ndarray, b: np.ndarray, p: float) -> float:
    """Mean of |a_i + b_j|^p over all pairs, blockwise to bound memory."""
    total = np.longdouble(0.0)
    block = max(1, (1 << 21) // max(1, b.size))
    for start in range(0, a.size, block):
        chunk = a[start:start + block, None] + b[None, :]
        np.abs(chunk, out=chunk)
        total += np.sum(chunk ** p, dtype=np.longdouble)
    return float(total / (np.longdouble(a.size) * np.longdouble(b.size)))


def _constant_exact(p, q, etas, rho, J, tol, budget) -> VariationConstant:
    eta_sup = float(np.max(np.abs(etas)))

    def bound_for(j):
        head = _sup_partial(rho, eta_sup, 1, j)
        tail = _sup_partial(rho, eta_sup, j + 1, None)
        return _truncation_bound(p, head, tail)

    if J is None:
        J = 1
        while bound_for(J) > tol:
            J += 1
            if q ** J > budget:
                raise BudgetError(
                    f"enumeration to tail bound {tol:g} needs more than budget "
                    f"{budget} digit strings (q={q}); best reachable bound is "
                    f"{bound_for(int(math.log(budget, q))):.3g}"
                )
    if q ** J > budget:
        raise BudgetError(f"q**J = {q ** J} exceeds enumeration budget {budget}")
    j_half = J // 2
    head = _cross_sums([rho ** j * etas for j in range(1, j_half + 1)])
    tail = _cross_sums([rho ** j * etas for j in range(j_half + 1, J + 1)])
    value = _mean_abs_pow(head, tail, p)
    return VariationConstant(
        value=value,
        method="exact-enumeration",
        error_bound=bound_for(J),
        details={"J": int(J), "terms": int(q) ** int(J)},
    )


def _constant_monte_carlo(p, q, etas, rho, N, seed, budget) -> VariationConstant:
    if N < 1:
        raise ValidationError("sample count must be positive")
    if N > budget * 64:
        raise BudgetError(f"N = {N} exceeds the sampling budget {budget * 64}")
    eta_sup = float(np.max(np.abs(etas)))
    # Strata = exact enumeration of the leading digits; the remaining digit
    # tail is sampled.  This is still an unbiased seeded estimator, with a
    # within-stratum spread smaller by roughly rho**J0.
    strata_cap = min(1024, max(1, N // 64))
    J0 = 0
    while q ** (J0 + 1) <= strata_cap:
        J0 += 1
    heads = _cross_sums([rho ** j * etas for j in range(1, J0 + 1)])
    S = heads.size
    # digits beyond J0 + Jt are dropped; pick Jt so the leftover is negligible
    Jt = 1
    while _truncation_bound(
        p,
        _sup_partial(rho, eta_sup, 1, J0 + Jt),
        _sup_partial(rho, eta_sup, J0 + Jt + 1, None),
    ) > 1e-10 and Jt < 512:
        Jt += 1
    counts = np.full(S, N // S, dtype=np.int64)
    counts[: N % S] += 1
    head_per_sample = np.repeat(heads, counts)
    rho_tail = rho ** np.arange(J0 + 1, J0 + Jt + 1, dtype=np.float64)
    rng = np.random.default_rng(seed)
    out = np.empty(N, dtype=np.float64)
    chunk = 1 << 16
    for start in range(0, N, chunk):
        stop = min(N, start + chunk)
        digs = rng.integers(0, q, size=(stop - start, Jt))
        z = head_per_sample[start:stop] + etas[digs] @ rho_tail
        out[start:stop] = np.abs(z) ** p
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    sums = np.add.reduceat(out, starts)
    sumsq = np.add.reduceat(out ** 2, starts)
    means = sums / counts
    # unbiased within-stratum variances (counts >= 2 by construction of S)
    variances = np.maximum(sumsq - counts * means ** 2, 0.0) / np.maximum(counts - 1, 1)
    value = float(np.mean(means))
    stderr = float(np.sqrt(np.sum(variances / counts)) / S)
    trunc = _truncation_bound(
        p,
        _sup_partial(rho, eta_sup, 1, J0 + Jt),
        _sup_partial(rho, eta_sup, J0 + Jt + 1, None),
    )
    return VariationConstant(
        value=value,
        method="monte-carlo",
        error_bound=trunc,
        stderr=stderr,
        details={"N": int(N), "seed": int(seed), "strata": int(S), "tail_digits": int(Jt)},
    )


def _constant_closed_form(p, q, etas, rho) -> VariationConstant:
    if not (float(p).is_integer() and int(p) % 2 == 0 and p >= 2):
        raise ValidationError(
            "closed-form moments require an even integer p; use exact or monte-carlo"
        )
    p = int(p)
    # raw moments of the per-digit value, exact up to float rounding
    mu = [float(np.mean(etas ** r)) for r in range(p + 1)]
    # cumulants of the per-digit value
    kappa = [0.0] * (p + 1)
    for n in range(1, p + 1):
        acc = mu[n]
        for k in range(1, n):
            acc -= math.comb(n - 1, k - 1) * kappa[k] * mu[n - k]
        kappa[n] = acc
    # cumulants add over the independent scaled terms: geometric factors
    big_k = [0.0] * (p + 1)
    for r in range(1, p + 1):
        big_k[r] = kappa[r] * rho ** r / (1.0 - rho ** r)
    # moments of the series from its cumulants
    mom = [1.0] + [0.0] * p
    for n in range(1, p + 1):
        mom[n] = sum(math.comb(n - 1, k - 1) * big_k[k] * mom[n - k] for k in range(1, n + 1))
    return VariationConstant(value=float(mom[p]), method="closed-form", error_bound=0.0,
                             details={"p": p})


def variation_constant(
    p: float,
    q: int = 2,
    a=None,
    method: str = "exact",
    J: int | None = None,
    N: int = 10 ** 6,
    seed: int = 0,
    tol: float = 1e-6,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> VariationConstant:
    """The limiting slope constant of the uniform-magnitude construction.

    methods: "exact" enumerates all q**J truncated digit strings, with J
    chosen so a certified truncation bound is below ``tol`` (the bound uses
    that the omitted tail has mean zero, which beats the raw Lipschitz
    estimate by an order of tail); "monte-carlo" (alias "mc") is a seeded
    stratified estimator with standard error; "closed-form" evaluates even
    moments through cumulants of the digit distribution.
    """
    if p <= 1:
        raise ValidationError(f"p must be > 1, got {p}")
    etas, rho = _series_weights(p, q, a)
    if method in ("exact", "exact-enumeration"):
        return _constant_exact(p, q, etas, rho, J, tol, budget)
    if method in ("mc", "monte-carlo"):
        return _constant_monte_carlo(p, q, etas, rho, N, seed, budget)
    if method in ("closed", "closed-form"):
        return _constant_closed_form(p, q, etas, rho)
    raise ValidationError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Increment decomposition and the sign/digit matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IncrementParts:
    """Series form of one scaled grid increment.

    ``value`` is sum_j rho^j y_{n-j} w_j with w_j the per-level weight:
    the effective sign for q = 2 (coefficient sign times step-function
    sign), or the branch value eta_{d_j} for q >= 3.
    """

    n: int
    k: int
    value: float
    digits: tuple
    weights: tuple


def increment_decomposition(spec: UniformMagnitudeSpec, n: int, k: int) -> IncrementParts:
    if not 1 <= n <= spec.levels:
        raise ValidationError(f"level n must lie in [1, {spec.levels}], got {n}")
    if not 0 <= k < spec.q ** n:
        raise ValidationError(f"index k={k} out of range at level {n}")
    dv = digits(k, n, spec.q)
    ds = np.array(dv.digits, dtype=np.int64)
    if spec.q == 2:
        signs = spec.sign_arrays()
        kappa = k >> np.arange(1, n + 1)
        sigma = np.array([signs[n - j][kappa[j - 1]] for j in range(1, n + 1)], dtype=np.float64)
        weights = sigma * (1.0 - 2.0 * ds)
    else:
        weights = spec.eta_values()[ds]
    js = np.arange(1, n + 1, dtype=np.float64)
    ys = np.array([spec.y(n - j) for j in range(1, n + 1)])
    value = sum_stable(spec.rho ** js * ys * weights)
    return IncrementParts(n=n, k=k, value=value, digits=dv.digits, weights=tuple(weights))


def scaled_increments(path: SampledPath, p: float) -> np.ndarray:
    """q**(n/p) times the grid increments of ``path``."""
    return path.q ** (path.level / p) * path.increments()


@dataclass(frozen=True)
class SignMatrixReport:
    n: int
    q: int
    bijection: bool
    distinct: int
    profile_path: float
    profile_expected: float
    gap: float


def sign_matrix(spec: UniformMagnitudeSpec, n: int, budget: int = SIGN_MATRIX_BUDGET) -> SignMatrixReport:
    """Exhaustively verify the weight-pattern bijection at level ``n``.

    Checks that k -> (w_1(k), ..., w_n(k)) hits every pattern exactly once,
    and that the level-n variation of the synthesized path equals the
    average of |sum_j rho^j y_{n-j} w_j|^p over all enumerated patterns.
    """
    if spec.q ** n > budget:
        raise BudgetError(f"sign matrix at level {n} needs {spec.q ** n} rows, budget {budget}")
    if not 1 <= n <= spec.levels:
        raise ValidationError(f"level n must lie in [1, {spec.levels}]")
    q = spec.q
    D = digits_matrix(n, q)          # (q**n, n), column j-1 holds d_j
    if q == 2:
        signs = spec.sign_arrays()
        kappas = np.arange(2 ** n)[:, None] >> np.arange(1, n + 1)[None, :]
        sigma = np.stack([signs[n - j][kappas[:, j - 1]] for j in range(1, n + 1)], axis=1)
        eps = sigma * (1 - 2 * D)
        bits = ((1 - eps) // 2).astype(np.int64)
        codes = bits @ (1 << np.arange(n, dtype=np.int64))
    else:
        codes = D @ (q ** np.arange(n, dtype=np.int64))
    order = np.sort(codes)
    bijection = bool(np.array_equal(order, np.arange(q ** n)))
    distinct = int(np.unique(codes).size)

    weights = [spec.rho ** j * spec.y(n - j) * spec.eta_values() for j in range(1, n + 1)]
    sums = _cross_sums(weights)
    expected = float(np.mean(np.abs(sums) ** spec.p, dtype=np.longdouble))
    path = reference_path(spec, n)
    observed = pvar_profile(path, spec.p, eval_indices=np.array([0, q ** n])).terminal
    return SignMatrixReport(
        n=n,
        q=q,
        bijection=bijection,
        distinct=distinct,
        profile_path=observed,
        profile_expected=expected,
        gap=abs(observed - expected),
    )


# ---------------------------------------------------------------------------
# Multiplicative transport and the prescribed-variation recipe
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TransportResult:
    y: SampledPath
    predicted: VariationProfile


def transport_multiply(
    g: SampledPath, x: SampledPath, x_profile: VariationProfile, p: float
) -> TransportResult:
    """Pointwise product y = g*x plus its predicted variation profile.

    The prediction integrates |g|^p against the increments of the supplied
    profile of x (left-point sums), which is the exact discrete counterpart
    of the transport identity for multipliers of vanishing variation.
    """
    if not g.grid.same_as(x.grid):
        raise ValidationError("g and x must share one grid")
    y = SampledPath(
        grid=x.grid,
        values=g.samples * x.samples,
        meta={"source": "transport_multiply"},
    )
    gp = SampledPath(grid=g.grid, values=np.abs(g.samples) ** p)
    pred = stieltjes_against_profile(gp, x_profile)
    predicted = VariationProfile(
        p=p,
        q=x_profile.q,
        level=x_profile.level,
        eval_indices=x_profile.eval_indices,
        eval_points=x_profile.eval_points,
        values=pred,
        grid_generator=x_profile.grid_generator,
        meta={"source": "transport_prediction"},
    )
    return TransportResult(y=y, predicted=predicted)


@dataclass(frozen=True, eq=False)
class RecipeResult:
    y: SampledPath
    g: SampledPath
    x: SampledPath
    constant: VariationConstant
    target: np.ndarray          # cumulative integral of the supplied density
    multiplier_trend: object    # TrendRow for the multiplier, or None


def recipe(
    hprime,
    spec: UniformMagnitudeSpec,
    n: int,
    constant: VariationConstant | None = None,
    check_multiplier: bool = True,
) -> RecipeResult:
    """Build y with prescribed variation t -> integral of ``hprime``.

    ``hprime`` is a callable or an array of q**n + 1 nonnegative samples.
    The multiplier g = (hprime / C)^(1/p) must itself have vanishing p-th
    variation for the construction to be exact in the limit; that hypothesis
    is not checkable from samples, so the coefficient-trend diagnostic is
    run on g and a warning is issued if it does not look vanishing.
    """
    if n > spec.levels:
        raise ValidationError(f"grid level {n} exceeds spec truncation {spec.levels}")
    grid = qadic_grid(spec.q, n)
    hp = np.asarray(hprime(grid.points) if callable(hprime) else hprime, dtype=np.float64)
    if hp.shape != grid.points.shape:
        raise ValidationError(f"hprime must provide {grid.points.size} samples")
    if np.any(hp < 0):
        raise ValidationError("hprime samples must be nonnegative")
    if constant is None:
        constant = variation_constant(spec.p, spec.q, spec.a, method="exact")
    g_vals = (hp / constant.value) ** (1.0 / spec.p)
    g = SampledPath(grid=grid, values=g_vals, meta={"source": "recipe-multiplier"})
    x = reference_path(spec, n)
    y = SampledPath(
        grid=grid,
        values=g_vals * x.values,
        meta={"source": "recipe", "spec_digest": spec.digest(), "level": n},
    )
    dt = np.diff(grid.points)
    target = np.concatenate(([0.0], cumsum_stable(0.5 * (hp[:-1] + hp[1:]) * dt)))
    trend = None
    if check_multiplier and n >= 4:
        trend = variation_index_estimate(analyze(g), [spec.p])[0]
        if trend.trend != "vanishing":
            warnings.warn(
                f"multiplier variation diagnostic is {trend.trend!r} "
                f"(slope {trend.slope:.3g}); the prescribed-variation identity "
                "assumes a vanishing-variation multiplier",
                stacklevel=2,
            )
    return RecipeResult(y=y, g=g, x=x, constant=constant, target=target,
                        multiplier_trend=trend)


def shifted_reference(x: SampledPath, shift: float) -> SampledPath:
    """Strictly positive shift x + shift with shift > sup |x|.

    The shift is stored as the path's offset, so increments (hence every
    variation profile) of the shifted path are computed from the same raw
    values and are literally identical to those of ``x``.
    """
    if shift <= x.sup_norm():
        raise ValidationError(
            f"shift {shift} must exceed the sup norm {x.sup_norm():.6g} strictly"
        )
    return SampledPath(
        grid=x.grid,
        values=x.values,
        offset=x.offset + shift,
        meta={**x.meta, "shifted_by": float(shift)},
    )


# ---------------------------------------------------------------------------
# Bernstein smoothing and coefficient splicing
# ---------------------------------------------------------------------------


def bernstein(z, degree: int, grid: PartitionGrid | None = None) -> SampledPath:
    """Degree-``degree`` Bernstein polynomial of ``z`` sampled on ``grid``.

    ``z`` may be a callable or a SampledPath (linearly interpolated at the
    nodes k/degree).  Evaluation folds convex combinations in place, which
    is numerically stable and reproduces constants bitwise.
    """
    if degree < 1:
        raise ValidationError(f"degree must be >= 1, got {degree}")
    if grid is None:
        grid = qadic_grid(2, 10)
    nodes = np.arange(degree + 1, dtype=np.float64) / degree
    if callable(z):
        zv = np.asarray(z(nodes), dtype=np.float64)
    else:
        zv = np.interp(nodes, z.grid.points, z.samples)
    t = grid.points
    b = np.repeat(zv[:, None], t.size, axis=1)
    for _ in range(degree):
        b = b[:-1] + t[None, :] * (b[1:] - b[:-1])
    return SampledPath(
        grid=grid,
        values=b[0],
        meta={"source": "bernstein", "degree": int(degree), "node_sup": float(np.max(np.abs(zv)))},
    )


def splice(x_coeffs: CoefficientArray, y_coeffs: CoefficientArray, n: int) -> CoefficientArray:
    """Boundary and levels < n from x, levels >= n from y.

    The result agrees with x at every level-n grid point because the finer
    tent functions vanish there; its level diagnostics at levels >= n are
    those of y because the coefficients coincide levelwise.
    """
    if x_coeffs.q != y_coeffs.q:
        raise ValidationError("cannot splice arrays with different q")
    if n < 0:
        raise ValidationError("crossover level must be >= 0")
    if x_coeffs.num_levels < n:
        raise ValidationError(f"x provides {x_coeffs.num_levels} levels, need {n}")
    if y_coeffs.num_levels < n:
        raise ValidationError(f"y provides {y_coeffs.num_levels} levels, need at least {n}")
    levels = tuple(x_coeffs.levels[:n]) + tuple(y_coeffs.levels[n:])
    return CoefficientArray(q=x_coeffs.q, boundary=x_coeffs.boundary, levels=levels)
