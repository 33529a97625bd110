"""Numerical verification of the supporting inequalities.

Every check evaluates one standalone inequality on a fixed, documented grid
and reports a BoundCheckResult.  Exact checks (closed-form or full
enumeration) must show zero violations in their declared regime;
Monte-Carlo checks report estimate +- 3 standard errors and never assert
beyond the error bar.  max_violation is the largest signed slack
(lhs - rhs, or relative slack where noted); negative means satisfied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats
from scipy.special import gammaln, logsumexp

from .dist import BayesNet, DenseDistribution, ProductDistribution, expand, \
    marginalize, product_of_marginals, to_dense
from .distances import hellinger, hellinger_arrays, tv_arrays
from .errors import RegimeViolation
from .instances import block_product_dense, conditional_tv_lower_bound, \
    farness_audit
from .rng import RngState

# Locked from a pilot sweep of the double binomial sum over
# n in {100, ..., 2000}, a = b and b = 3n/4, eps in {0.1, 0.25, 0.5}
# (scripts and values recorded in the test suite).
C_LOCK_DOUBLE_SUM = 0.20

_EXACT_TOL = 1e-12


@dataclass(frozen=True)
class BoundCheckResult:
    """Outcome of one inequality check over its grid."""

    name: str
    grid_points: int
    violations: int
    max_violation: float  # signed slack; negative = satisfied everywhere
    regime_note: str = ""

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "grid_points": self.grid_points,
            "violations": self.violations,
            "max_violation": self.max_violation,
            "regime_note": self.regime_note,
        }


class _Tally:
    def __init__(self):
        self.points = 0
        self.violations = 0
        self.worst = -math.inf

    def add(self, slack: float, tol: float = _EXACT_TOL):
        self.points += 1
        self.worst = max(self.worst, slack)
        if slack > tol:
            self.violations += 1

    def result(self, name: str, note: str = "") -> BoundCheckResult:
        worst = self.worst if self.points else 0.0
        return BoundCheckResult(name, self.points, self.violations,
                                worst, note)


# ---------------------------------------------------------------------------
# Binomial MGF bounds
# ---------------------------------------------------------------------------

def mgf_binomial_exact(m: int, p: float, t: float) -> float:
    """Exact E[e^{tX}], X ~ Bin(m, p), by term-wise summation."""
    k = np.arange(m + 1)
    return float(np.exp(logsumexp(stats.binom.logpmf(k, m, p) + t * k)))


def check_mgf_binomial() -> BoundCheckResult:
    """E[e^{tX}] <= e^{2tmp} for X ~ Bin(m,p), 0 <= t <= 1."""
    tally = _Tally()
    for m in (1, 5, 30, 100):
        for p in (0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0):
            for t in (0.0, 0.25, 0.5, 1.0):
                lhs = mgf_binomial_exact(m, p, t)
                rhs = math.exp(2.0 * t * m * p)
                tally.add(lhs / rhs - 1.0)
    return tally.result("binomial-mgf")


def mgf_sq_binomial_exact(m: int, p: float, t: float) -> float:
    """Exact E[e^{tX^2}], X ~ Bin(m, p)."""
    k = np.arange(m + 1)
    return float(np.exp(logsumexp(stats.binom.logpmf(k, m, p) + t * k * k)))


def check_mgf_sq_binomial() -> BoundCheckResult:
    """E[e^{tX^2}] <= exp(16tm^2p^2 + 2tmp) for 0 < tm <= 1/16.

    The grid includes the regime boundary tm = 1/16 and p = 1.
    """
    tally = _Tally()
    for m in (4, 16, 64, 256):
        for frac in (1.0, 0.5, 0.25):  # tm = frac/16
            t = frac / (16.0 * m)
            for p in (0.1, 0.3, 0.5, 0.7, 0.9, 1.0):
                lhs = mgf_sq_binomial_exact(m, p, t)
                rhs = math.exp(16.0 * t * m * m * p * p + 2.0 * t * m * p)
                tally.add(lhs / rhs - 1.0)
    return tally.result("binomial-square-mgf",
                        "boundary tm = 1/16 included")


def mgf_sq_capped_binomial_exact(m: int, p: float, cap: int,
                                 t: float) -> float:
    """Exact E[e^{t min(X,cap)^2}], X ~ Bin(m, p)."""
    k = np.arange(m + 1)
    kk = np.minimum(k, cap)
    return float(np.exp(logsumexp(stats.binom.logpmf(k, m, p) + t * kk * kk)))


def check_mgf_sq_capped_binomial() -> BoundCheckResult:
    """Capped version: same bound, regime 0 < t*cap <= 1/8, 0 < tmp <= 1/16."""
    tally = _Tally()
    for m in (16, 40, 64):
        for cap in (4, 8, 16):
            for p in (0.05, 0.1, 0.3):
                t_max = min(1.0 / (8.0 * cap), 1.0 / (16.0 * m * p))
                for t in (t_max, 0.5 * t_max):
                    lhs = mgf_sq_capped_binomial_exact(m, p, cap, t)
                    rhs = math.exp(16.0 * t * m * m * p * p
                                   + 2.0 * t * m * p)
                    tally.add(lhs / rhs - 1.0)
    return tally.result("capped-binomial-square-mgf")


def truncated_multinomial_mgf_mc(m: int, D: int, cap: int, t: float,
                                 trials: int, rng: RngState,
                                 ) -> tuple[float, float]:
    """Monte-Carlo estimate (mean, SE) of E[prod_i e^{t a_i 1[a_i > cap]}]
    for (a_1..a_D) ~ Multinomial(m, uniform)."""
    g = rng.generator()
    counts = g.multinomial(m, np.full(D, 1.0 / D), size=trials)
    excess = np.where(counts > cap, counts, 0).sum(axis=1)
    vals = np.exp(t * excess.astype(np.float64))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(trials))


def check_truncated_multinomial(trials: int = 100_000,
                                rng: RngState | None = None,
                                ) -> BoundCheckResult:
    """Truncated-multinomial MGF vs 1 + sqrt(D) e^{-cap ln(D)/80}.

    The stated bound only has force for astronomically large supports
    (log D > 100), which cannot be sampled; the assertion therefore runs in
    a relaxed regime (cap >= 40 D, m <= sqrt(D) cap, t <= 4) where the
    truncation event is rare and the bound is numerically meaningful.  An
    out-of-regime point is evaluated report-only.
    """
    rng = rng or RngState(0xB0)
    tally = _Tally()
    grid = [(64, 4, 160, 4.0), (300, 4, 160, 4.0), (600, 9, 360, 4.0)]
    for i, (m, D, cap, t) in enumerate(grid):
        est, se = truncated_multinomial_mgf_mc(
            m, D, cap, t, trials, rng.split("trunc", i))
        rhs = 1.0 + math.sqrt(D) * math.exp(-cap * math.log(D) / 80.0)
        tally.add((est - 3.0 * se) - rhs)
    # report-only point outside the declared regime
    est, se = truncated_multinomial_mgf_mc(60, 4, 20, 1.0, trials,
                                           rng.split("trunc", "report"))
    rhs = 1.0 + 2.0 * math.exp(-20.0 * math.log(4.0) / 80.0)
    note = ("relaxed regime (cap >= 40D); stated constants need log D > 100, "
            "not verifiable; out-of-regime report: "
            f"estimate {est:.4g} +- {3 * se:.2g} vs bound {rhs:.4g}")
    return tally.result("truncated-multinomial-mgf", note)


# ---------------------------------------------------------------------------
# Decoupling
# ---------------------------------------------------------------------------

def decoupling_sides_exact(n: int, p: float, t: float) -> tuple[float, float]:
    """Exact (LHS, RHS) of the decoupling inequality with F(x) = e^{2tx}.

    For i.i.d. Bernoulli(p) the quadratic forms depend only on the row sums
    S = sum X_i and T = sum Y_i, so LHS = E[e^{2t(S^2-S)}] and
    RHS = E[e^{8tST}] collapse to (n+1)- and (n+1)^2-term sums.
    """
    k = np.arange(n + 1)
    logw = stats.binom.logpmf(k, n, p)
    lhs = float(np.exp(logsumexp(logw + 2.0 * t * (k * k - k))))
    st = np.outer(k, k)
    rhs = float(np.exp(logsumexp(logw[:, None] + logw[None, :]
                                 + 8.0 * t * st)))
    return lhs, rhs


def decoupling_sides_enumerated(n: int, p: float, t: float,
                                ) -> tuple[float, float]:
    """Literal bitwise enumeration over (X, Y) in {0,1}^n x {0,1}^n.

    Oracle for decoupling_sides_exact; only sensible for n <= 8.
    """
    codes = np.arange(2 ** n)
    bits = ((codes[:, None] >> np.arange(n)) & 1).astype(np.float64)
    s = bits.sum(axis=1)
    w = p ** s * (1.0 - p) ** (n - s)
    off_diag = s * s - s  # sum_{i != j} X_i X_j
    lhs = float(w @ np.exp(2.0 * t * off_diag))
    cross = np.outer(s, s)  # sum_{i,j} X_i Y_j
    rhs = float((w[:, None] * w[None, :] * np.exp(8.0 * t * cross)).sum())
    return lhs, rhs


def decoupling_check(n: int, p: float, t: float) -> BoundCheckResult:
    """E[F(sum_{i!=j} X_i X_j)] <= E[F(4 sum_{i,j} X_i Y_j)], F = e^{2tx}."""
    if t > 1.0 / (8.0 * n):
        raise RegimeViolation(f"decoupling check needs t <= 1/(8n), got {t}")
    tally = _Tally()
    lhs, rhs = decoupling_sides_exact(n, p, t)
    tally.add(lhs / rhs - 1.0)
    return tally.result("decoupling")


def check_decoupling() -> BoundCheckResult:
    tally = _Tally()
    for n in (1, 2, 4, 6, 8, 12):
        for p in (0.0, 0.3, 0.5, 0.9, 1.0):
            for t in (1.0 / (8.0 * n), 1.0 / (16.0 * n)):
                lhs, rhs = decoupling_sides_exact(n, p, t)
                tally.add(lhs / rhs - 1.0)
    return tally.result("decoupling")


# ---------------------------------------------------------------------------
# Stochastic dominance
# ---------------------------------------------------------------------------

def _capped_binom_cdf(m: int, p: float, cap: int, x: np.ndarray) -> np.ndarray:
    """CDF of min(Bin(m,p), cap)."""
    return np.where(x >= cap, 1.0, stats.binom.cdf(x, m, p))


def dominance_checks(m: int, p: float, cap: int) -> BoundCheckResult:
    """Exact CDF comparisons for the dominance facts.

    Bin(m,p) >= min(Bin(m,p),cap) >= (Bin(m,p) | <= cap); min(.,cap)
    preserves dominance; Bin(n,p) <= Bin(m,p) for n = floor(m/2) <= m.
    X >= Y (first-order) iff CDF_X <= CDF_Y pointwise.
    """
    tally = _Tally()
    x = np.arange(m + 1)
    cdf_full = stats.binom.cdf(x, m, p)
    cdf_min = _capped_binom_cdf(m, p, cap, x)
    tail = stats.binom.cdf(min(cap, m), m, p)
    cdf_cond = (np.minimum(stats.binom.cdf(np.minimum(x, cap), m, p), tail)
                / tail if tail > 0.0 else np.ones_like(cdf_full))
    # Bin >= min(Bin, cap): CDF_full <= CDF_min everywhere
    tally.add(float((cdf_full - cdf_min).max()))
    # min(Bin, cap) >= (Bin | <= cap)
    tally.add(float((cdf_min - cdf_cond).max()))
    # Bin(n,p) <= Bin(m,p), n <= m
    nsmall = m // 2
    cdf_small = stats.binom.cdf(x, nsmall, p)
    tally.add(float((cdf_full - cdf_small).max()))
    # min preserves dominance: apply the cap to the dominated pair above
    cdf_small_cap = _capped_binom_cdf(nsmall, p, cap, x)
    tally.add(float((cdf_min - cdf_small_cap).max()))
    return tally.result("dominance")


def check_dominance() -> BoundCheckResult:
    tally = _Tally()
    for m in (8, 20, 50, 200):
        for p in (0.0, 0.1, 0.4, 0.8, 1.0):
            for cap in (0, 2, m // 3, m):
                r = dominance_checks(m, p, cap)
                tally.points += r.grid_points
                tally.violations += r.violations
                tally.worst = max(tally.worst, r.max_violation)
    return tally.result("dominance")


# ---------------------------------------------------------------------------
# Capped-process coupling
# ---------------------------------------------------------------------------

def _product_law_capped_process(a: int, b: int, p: float, cap: int) -> dict:
    """Exact law of Z_I * Z_{I^c} under the capped sampling process.

    Draw X' ~ Bern(p)^m with |I| = a, |I^c| = b.  If the total weight w is
    below the cap keep X' as is; otherwise keep a uniformly random
    cap-subset of the one-positions.  Conditioned on (w_I, w_Ic) with
    w = w_I + w_Ic >= cap, the count kept inside I is hypergeometric, so
    the joint law is an explicit triple sum.
    """
    law: dict = {}
    for wi in range(a + 1):
        pwi = stats.binom.pmf(wi, a, p)
        if pwi == 0.0:
            continue
        for wc in range(b + 1):
            pw = pwi * stats.binom.pmf(wc, b, p)
            if pw == 0.0:
                continue
            w = wi + wc
            if w < cap:
                key = wi * wc
                law[key] = law.get(key, 0.0) + pw
            else:
                hs = np.arange(max(0, cap - wc), min(cap, wi) + 1)
                ph = stats.hypergeom.pmf(hs, w, wi, cap)
                for h, q in zip(hs, ph):
                    key = int(h) * (cap - int(h))
                    law[key] = law.get(key, 0.0) + pw * float(q)
    return law


def _product_law_capped_binomials(a: int, b: int, p: float, cap: int) -> dict:
    """Exact law of Y_I * Y_{I^c}, independent capped Binomials."""
    ka = np.arange(a + 1)
    pa = stats.binom.pmf(ka, a, p)
    kb = np.arange(b + 1)
    pb = stats.binom.pmf(kb, b, p)
    law: dict = {}
    for i, wa in enumerate(ka):
        ya = min(int(wa), cap)
        for j, wb in enumerate(kb):
            yb = min(int(wb), cap)
            key = ya * yb
            law[key] = law.get(key, 0.0) + float(pa[i] * pb[j])
    return law


def _survival_dominance_gap(low: dict, high: dict) -> float:
    """max_x Pr[low > x] - Pr[high > x]; <= 0 iff low is dominated."""
    support = sorted(set(low) | set(high))
    gap = -math.inf
    s_low = sum(low.values())
    s_high = sum(high.values())
    for x in support:
        s_low -= low.get(x, 0.0)
        s_high -= high.get(x, 0.0)
        gap = max(gap, s_low - s_high)
    return gap


def coupling_product_dominance_mc(m: int, p: float, cap: int,
                                  partition: Sequence[int],
                                  trials: int = 0,
                                  rng: RngState | None = None,
                                  ) -> BoundCheckResult:
    """Z_I * Z_{I^c} is dominated by Y_I * Y_{I^c} (independent capped Binomials).

    Exact for m <= 16 via the Binomial x Binomial x Hypergeometric
    decomposition of the capped process; larger m falls back to Monte-Carlo
    with a 3-SE margin.
    """
    a = len(partition)
    b = m - a
    if not (0 < a < m):
        raise RegimeViolation("partition must be a proper nonempty subset")
    if m <= 16 or trials == 0:
        z_law = _product_law_capped_process(a, b, p, cap)
        y_law = _product_law_capped_binomials(a, b, p, cap)
        tally = _Tally()
        tally.add(_survival_dominance_gap(z_law, y_law))
        return tally.result("capped-coupling-product", "exact enumeration")
    g = (rng or RngState(0xC0)).generator()
    xi = g.random((trials, m)) < p
    w = xi.sum(axis=1)
    wi = xi[:, :a].sum(axis=1)
    if cap == 0:
        zi = np.zeros_like(wi)
        zc = np.zeros_like(wi)
    else:
        kept = np.minimum(w, cap)
        # rows with w = 0 are masked out below; pad them so the vectorized
        # hypergeometric call stays well-defined
        draws = g.hypergeometric(wi, np.where(w == 0, 1, w - wi),
                                 np.maximum(kept, 1))
        zi = np.where(w < cap, wi, np.where(kept == 0, 0, draws))
        zc = np.where(w < cap, w - wi, kept - zi)
    prod_z = (zi * zc).astype(np.float64)
    ya = np.minimum(g.binomial(a, p, trials), cap)
    yb = np.minimum(g.binomial(b, p, trials), cap)
    prod_y = (ya * yb).astype(np.float64)
    tally = _Tally()
    for x in np.unique(np.concatenate([prod_z, prod_y])):
        sz = (prod_z > x).mean()
        sy = (prod_y > x).mean()
        se = math.sqrt((sz * (1 - sz) + sy * (1 - sy)) / trials)
        tally.add(sz - sy - 3.0 * se)
    return tally.result("capped-coupling-product", "Monte-Carlo, 3-SE margin")


def check_coupling() -> BoundCheckResult:
    tally = _Tally()
    for m, p, cap, a in [(8, 0.5, 3, 4), (8, 0.3, 5, 2), (12, 0.2, 4, 6),
                         (16, 0.5, 6, 8), (16, 0.8, 10, 5), (10, 0.5, 10, 5)]:
        r = coupling_product_dominance_mc(m, p, cap, list(range(a)))
        tally.points += r.grid_points
        tally.violations += r.violations
        tally.worst = max(tally.worst, r.max_violation)
    return tally.result("capped-coupling-product", "exact enumeration")


# ---------------------------------------------------------------------------
# Hellinger subadditivity / localization and projection bound
# ---------------------------------------------------------------------------

def _local_marginal(dense: DenseDistribution, node: int,
                    parents: Sequence[int]) -> DenseDistribution:
    return marginalize(dense, sorted(set(parents) | {node}))


def subadditivity_check(P: BayesNet, Q: BayesNet) -> BoundCheckResult:
    """d_H^2(P,Q) <= sum_i d_H^2 of the (node, parents) joint marginals,
    plus localization: some node contributes >= d_H^2(P,Q)/n."""
    if P.order != Q.order or P.parents != Q.parents:
        raise RegimeViolation("nets must share (order, parents) structure")
    dp = to_dense(P)
    dq = to_dense(Q)
    total = hellinger(dp, dq) ** 2
    terms = []
    for i in range(P.n):
        mp = _local_marginal(dp, i, P.parents[i])
        mq = _local_marginal(dq, i, Q.parents[i])
        terms.append(hellinger(mp, mq) ** 2)
    tally = _Tally()
    tally.add(total - sum(terms), tol=1e-9)
    tally.add(total / P.n - max(terms), tol=1e-9)
    return tally.result("hellinger-subadditivity")


def _random_shared_pair(n: int, d: int, rng: RngState) -> tuple[BayesNet,
                                                                BayesNet]:
    g = rng.generator()
    parents = [tuple(int(v) for v in
                     np.sort(g.choice(i, size=min(i, g.integers(0, d + 1)),
                                      replace=False)))
               for i in range(n)]
    def tables():
        return tuple(g.uniform(0.05, 0.95, 2 ** len(ps)) for ps in parents)
    order = tuple(range(n))
    return (BayesNet(n, order, tuple(parents), tables()),
            BayesNet(n, order, tuple(parents), tables()))


def check_subadditivity(pairs: int = 500, n: int = 8, d: int = 2,
                        rng: RngState | None = None) -> BoundCheckResult:
    rng = rng or RngState(0x5AB)
    tally = _Tally()
    for i in range(pairs):
        P, Q = _random_shared_pair(n, d, rng.split("pair", i))
        r = subadditivity_check(P, Q)
        tally.points += r.grid_points
        tally.violations += r.violations
        tally.worst = max(tally.worst, r.max_violation)
    return tally.result("hellinger-subadditivity",
                        f"{pairs} random shared-structure pairs, n={n}")


def projection_lb_check(P: DenseDistribution, trials: int = 10_000,
                        rng: RngState | None = None) -> BoundCheckResult:
    """d_H(P, Q) >= d_H(P, prod-of-marginals)/(1 + sqrt(n)) for products Q.

    Checked for `trials` random products and for the coordinate-descent
    minimizer of the TV farness audit.
    """
    if P.n > 10:
        raise RegimeViolation(f"projection check supports n <= 10, got {P.n}")
    rng = rng or RngState(0x93)
    g = rng.generator()
    lb = hellinger(P, expand(product_of_marginals(P))) / (1.0 + math.sqrt(P.n))
    tally = _Tally()
    for _ in range(trials):
        q = expand(ProductDistribution(g.uniform(0.0, 1.0, P.n)))
        dh = hellinger_arrays(P.mass, q.mass)
        tally.add(lb - dh, tol=1e-9)
    cert = farness_audit(P, restarts=5, rng=rng.split("audit"))
    tally.add(lb - hellinger(P, expand(cert.minimizer)), tol=1e-9)
    return tally.result("projection-lower-bound")


# ---------------------------------------------------------------------------
# Two-block product bounds (factor 3 and conditional TV)
# ---------------------------------------------------------------------------

def check_factor3(trials: int = 10_000, n: int = 4,
                  rng: RngState | None = None) -> BoundCheckResult:
    """tv(P, Q1 x Q2) >= (1/3) tv(P, P_A x P_Ac) for random P, A, Q1, Q2."""
    rng = rng or RngState(0xFac)
    g = rng.generator()
    tally = _Tally()
    size = 2 ** n
    for _ in range(trials):
        mass = g.dirichlet(np.ones(size))
        P = DenseDistribution(n, mass)
        ka = int(g.integers(1, n))
        A = sorted(g.choice(n, size=ka, replace=False).tolist())
        Ac = sorted(set(range(n)) - set(A))
        ref = tv_arrays(mass, block_product_dense(P, A))
        q1 = g.dirichlet(np.ones(2 ** ka))
        q2 = g.dirichlet(np.ones(2 ** (n - ka)))
        codes = np.arange(size)
        codeA = np.zeros(size, dtype=np.int64)
        for j, i in enumerate(A):
            codeA |= ((codes >> i) & 1) << j
        codeAc = np.zeros(size, dtype=np.int64)
        for j, i in enumerate(Ac):
            codeAc |= ((codes >> i) & 1) << j
        prod = q1[codeA] * q2[codeAc]
        tally.add(ref / 3.0 - tv_arrays(mass, prod), tol=1e-9)
    return tally.result("two-block-factor-3")


def check_conditional_product_bound(trials: int = 10_000,
                                    rng: RngState | None = None,
                                    ) -> BoundCheckResult:
    """tv(P, P_1 x P_2) >= (1/2) tv(P(.|x_0=0), P(.|x_0=1)) for a uniform
    conditioning bit, over random bipartite P on {0,1}^2 x {0,1}^2."""
    rng = rng or RngState(0x46)
    g = rng.generator()
    tally = _Tally()
    n = 4
    for _ in range(trials):
        # uniform first block: each of the 4 block-1 assignments gets mass
        # 1/4, with an arbitrary conditional on block 2
        cond = g.dirichlet(np.ones(4), size=4)  # rows: block-1 assignment
        codes = np.arange(16)
        mass = 0.25 * cond[codes & 3, codes >> 2]
        P = DenseDistribution(n, mass)
        lhs = tv_arrays(mass, block_product_dense(P, [0, 1]))
        rhs = 0.5 * conditional_tv_lower_bound(P, 0)
        tally.add(rhs - lhs, tol=1e-9)
    return tally.result("conditional-product-lower-bound",
                        "one-half version (see docstring of "
                        "conditional_tv_lower_bound)")


# ---------------------------------------------------------------------------
# Double binomial sum and cycle products
# ---------------------------------------------------------------------------

def double_binomial_sum_exact(a: int, b: int, eps: float) -> float:
    """(1-d)^n 2^-n sum_{k1,k2} C(a,k1) C(b,k2) |z^{k1+k2} - z^{k1+b-k2}|
    with n = a+b, d = eps/sqrt(n), z = (1+d)/(1-d); log-space throughout."""
    n = a + b
    if n > 2000:
        raise RegimeViolation(f"double sum supports n <= 2000, got {n}")
    if b < n / 4:
        raise RegimeViolation(f"need b >= n/4, got a={a}, b={b}")
    delta = eps / math.sqrt(n)
    if not (0.0 < delta < 1.0):
        raise RegimeViolation(f"need 0 < eps/sqrt(n) < 1, got {delta}")
    logz = math.log1p(delta) - math.log1p(-delta)
    k1 = np.arange(a + 1)
    k2 = np.arange(b + 1)
    logc1 = gammaln(a + 1) - gammaln(k1 + 1) - gammaln(a - k1 + 1)
    logc2 = gammaln(b + 1) - gammaln(k2 + 1) - gammaln(b - k2 + 1)
    # |z^(k1+k2) - z^(k1+b-k2)| = z^(k1+min(k2,b-k2)) (z^|b-2k2| - 1)
    gap = np.abs(b - 2.0 * k2)
    nonzero = gap > 0
    log_abs = (np.add.outer(k1 * logz,
                            np.minimum(k2, b - k2) * logz)
               + np.log(np.expm1(np.where(nonzero, gap, 1.0) * logz))
               [None, :])
    keep = np.broadcast_to(nonzero, log_abs.shape)
    terms = (logc1[:, None] + logc2[None, :] + log_abs)[keep]
    total = logsumexp(terms) + n * math.log1p(-delta) - n * math.log(2.0)
    return float(np.exp(total))


def check_double_binomial_sum(c_lock: float = C_LOCK_DOUBLE_SUM,
                              ) -> BoundCheckResult:
    """Double binomial sum >= c_lock * eps over a fixed (n, split, eps) grid."""
    tally = _Tally()
    for n in (100, 200, 500, 1000, 2000):
        for split in (0.5, 0.25):  # b/n; both satisfy b >= n/4
            b = int(round(n * (1.0 - split)))
            a = n - b
            for eps in (0.1, 0.25, 0.5):
                val = double_binomial_sum_exact(a, b, eps)
                tally.add(c_lock * eps - val, tol=1e-12)
    return tally.result("double-binomial-sum",
                        f"lower-bound constant locked at {c_lock}")


def cycle_term_check(cycle_lengths: Sequence[int], parities: Sequence[int],
                     delta: float, n: int) -> BoundCheckResult:
    """prod over cycles (1 +- (-4 delta)^L) is at most e^{256 eps^5/n^{3/2}}
    times the same product restricted to the length-4 cycles."""
    if sum(cycle_lengths) > n:
        raise RegimeViolation("total cycle length must be <= n")
    if any(ln < 4 for ln in cycle_lengths):
        raise RegimeViolation("cycle lengths must be >= 4")
    if not (0.0 <= delta < 0.25):
        raise RegimeViolation("need delta < 1/4")
    eps = delta * math.sqrt(n)
    lhs = 1.0
    rhs = math.exp(256.0 * eps ** 5 / n ** 1.5)
    for ln, par in zip(cycle_lengths, parities):
        sign = 1.0 if par == 0 else -1.0
        lhs *= 1.0 + sign * (-4.0 * delta) ** ln
        if ln == 4:
            rhs *= 1.0 + sign * (4.0 * delta) ** 4
    tally = _Tally()
    tally.add(lhs - rhs)
    return tally.result("cycle-products")


def check_cycle_terms(multisets: int = 1000,
                      rng: RngState | None = None) -> BoundCheckResult:
    rng = rng or RngState(0xCC)
    g = rng.generator()
    tally = _Tally()
    for _ in range(multisets):
        n = int(g.integers(16, 400))
        delta = float(g.uniform(0.01, 0.24))
        lengths = []
        budget = n
        while budget >= 4 and g.random() < 0.8:
            ln = int(g.integers(4, min(budget, 12) + 1))
            lengths.append(ln)
            budget -= ln
        parities = g.integers(0, 2, size=len(lengths)).tolist()
        r = cycle_term_check(lengths, parities, delta, n)
        tally.points += r.grid_points
        tally.violations += r.violations
        tally.worst = max(tally.worst, r.max_violation)
    return tally.result("cycle-products", f"{multisets} random multisets")


# ---------------------------------------------------------------------------
# Suite runner
# ---------------------------------------------------------------------------

_EXACT_CHECKS: dict[str, Callable[[], BoundCheckResult]] = {
    "binomial-mgf": check_mgf_binomial,
    "binomial-square-mgf": check_mgf_sq_binomial,
    "capped-binomial-square-mgf": check_mgf_sq_capped_binomial,
    "decoupling": check_decoupling,
    "dominance": check_dominance,
    "capped-coupling-product": check_coupling,
    "double-binomial-sum": check_double_binomial_sum,
    "cycle-products": check_cycle_terms,
}

_MC_CHECKS: dict[str, Callable[[], BoundCheckResult]] = {
    "hellinger-subadditivity": check_subadditivity,
    "projection-lower-bound": lambda: _projection_default(),
    "two-block-factor-3": check_factor3,
    "conditional-product-lower-bound": check_conditional_product_bound,
    "truncated-multinomial-mgf": check_truncated_multinomial,
}


def _projection_default() -> BoundCheckResult:
    P = DenseDistribution(2, np.array([0.35, 0.15, 0.15, 0.35]))
    return projection_lb_check(P)


def run_suite(mode: str = "all") -> list:
    """Run the inequality checks; mode in {exact, mc, all}."""
    if mode not in ("exact", "mc", "all"):
        raise ValueError("mode must be one of exact, mc, all")
    checks: dict = {}
    if mode in ("exact", "all"):
        checks.update(_EXACT_CHECKS)
    if mode in ("mc", "all"):
        checks.update(_MC_CHECKS)
    return [fn() for fn in checks.values()]
