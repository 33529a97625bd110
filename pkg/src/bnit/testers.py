"""Statistical testers.

The stack, bottom to top:

- `learn_product_chi2`: coordinate-wise empirical-frequency product learner
  with marginals clamped to [1/(4m), 1 - 1/(4m)], so the learned reference is
  strictly positive.  When the source is a product distribution the output is
  chi-square-close (to eps^2) with constant probability.
- `identity_test_chi2_hellinger`: given a known strictly positive reference q
  over K cells and m samples, computes
      Z = sum_x ((N_x - m q_x)^2 - N_x) / q_x
  and accepts iff Z <= tau.  Z has expectation -m when the source equals q
  and roughly m^2 * chi2(P, q) otherwise, so the analytic threshold
  tau = (3/2) m^2 eps^2 sits in the gap between sources with chi2 <= eps^2
  and sources at Hellinger distance >= eps (which forces chi2 >= 2 eps^2).
- `hellinger_independence_test`: learn-then-verify on disjoint sample blocks,
  amplified by majority vote over r = 2*ceil(9*ln(1/fail_prob)) + 1
  independent verification rounds sharing one learned reference.
- `independence_test_degree_d`: draws one multiset of samples and runs the
  Hellinger tester on every (d+1)-subset of coordinates, in lexicographic
  order, accepting iff all subset tests accept.

Constants c_learn, c_test, c_amp fill in the unspecified constant factors of
the sample-count formulas; the defaults were fixed by Monte-Carlo calibration
so the empirical error rates meet the documented targets (they carry no
meaning beyond that).
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels
from .dist import BayesNet, DenseDistribution, ProductDistribution, expand, sample
from .errors import (
    InsufficientSamples,
    InvalidEpsilon,
    ReferenceNotPositive,
    RegimeViolation,
)
from .rng import RngState

# Calibrated constant factors for the sample-count formulas (see module
# docstring): m_learn = ceil(c_learn * 2k / eps^2),
# m_test = ceil(c_test * 2^(k/2) / eps^2),
# m_total = ceil(c_amp * 2^((d+1)/2) / eps'^2 * ln(1/delta)).
DEFAULT_C_LEARN = 4.0
DEFAULT_C_TEST = 2.0
DEFAULT_C_AMP = 40.0


@dataclass(frozen=True)
class TesterConfig:
    """Distance / failure targets plus the calibrated constant factors."""

    eps: float = 0.3
    fail_prob: float = 1.0 / 3.0
    c_learn: float = DEFAULT_C_LEARN
    c_test: float = DEFAULT_C_TEST
    c_amp: float = DEFAULT_C_AMP
    threshold_mode: str = "analytic"  # or "calibrated"
    poissonize: bool = False

    def __post_init__(self):
        if not (0.0 < self.eps <= 1.0):
            raise InvalidEpsilon(f"eps must lie in (0, 1], got {self.eps}")
        if not (0.0 < self.fail_prob < 1.0):
            raise ValueError("fail_prob must lie in (0, 1)")
        if min(self.c_learn, self.c_test, self.c_amp) <= 0.0:
            raise ValueError("constants must be positive")
        if self.threshold_mode not in ("analytic", "calibrated"):
            raise ValueError(f"unknown threshold_mode {self.threshold_mode!r}")


@dataclass(frozen=True)
class TestReport:
    """Verdict plus the statistic/threshold that produced it."""

    verdict: str  # "accept" or "reject"
    statistic: float
    threshold: float
    witness_subset: Optional[tuple] = None
    samples_used: int = 0

    @property
    def accepted(self) -> bool:
        return self.verdict == "accept"

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "witness_subset": (None if self.witness_subset is None
                               else [int(i) for i in self.witness_subset]),
            "samples_used": int(self.samples_used),
        }


@dataclass(frozen=True)
class IdentityStatistic:
    """The chi-square-style statistic and the counts it was computed from."""

    Z: float
    counts: np.ndarray = field(repr=False)
    m: int
    poissonized: bool = False


def _as_bit_matrix(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=np.uint8)
    if x.ndim != 2:
        raise ValueError("samples must be a (m, k) array of bits")
    return x


def required_learn_samples(k: int, eps: float, c_learn: float) -> int:
    return math.ceil(c_learn * 2 * k / eps ** 2)


def required_test_samples(support: int, eps: float, c_test: float) -> int:
    return math.ceil(c_test * math.sqrt(support) / eps ** 2)


def amplification_rounds(fail_prob: float) -> int:
    return 2 * math.ceil(9.0 * math.log(1.0 / fail_prob)) + 1


def learn_product_chi2(samples, eps: float,
                       config: TesterConfig | None = None) -> ProductDistribution:
    """Coordinate-wise empirical product, clamped away from 0 and 1."""
    config = config or TesterConfig(eps=eps)
    if not (0.0 < eps <= 1.0):
        raise InvalidEpsilon(f"eps must lie in (0, 1], got {eps}")
    x = _as_bit_matrix(samples)
    m, k = x.shape
    required = required_learn_samples(k, eps, config.c_learn)
    if m < required:
        raise InsufficientSamples(
            f"learner needs at least {required} samples, got {m}",
            required=required, available=m)
    clamp = 1.0 / (4.0 * m)
    p = np.clip(x.mean(axis=0), clamp, 1.0 - clamp)
    return ProductDistribution(p)


def _counts_from_codes(codes: np.ndarray, k: int) -> np.ndarray:
    return np.bincount(codes, minlength=2 ** k)


def identity_statistic(counts: np.ndarray, q: np.ndarray, m: int) -> float:
    """Z = sum_x ((N_x - m q_x)^2 - N_x) / q_x."""
    counts = counts.astype(np.float64)
    return float((((counts - m * q) ** 2 - counts) / q).sum())


def _resolve_threshold(support: int, eps: float, m: int,
                       config: TesterConfig) -> float:
    if config.threshold_mode == "analytic":
        return 1.5 * m * m * eps * eps
    return get_calibrated_threshold(support, eps, m)


def identity_test_chi2_hellinger(samples, q: DenseDistribution, eps: float,
                                 config: TesterConfig | None = None,
                                 rng: RngState | None = None) -> TestReport:
    """Accepts sources with chi2(P, q) <= eps^2, rejects d_H(P, q) >= eps."""
    config = config or TesterConfig(eps=eps)
    if not (0.0 < eps <= 1.0):
        raise InvalidEpsilon(f"eps must lie in (0, 1], got {eps}")
    if np.any(q.mass <= 0.0):
        raise ReferenceNotPositive(
            "identity test reference must be strictly positive")
    x = _as_bit_matrix(samples)
    if x.shape[1] != q.n:
        raise ReferenceNotPositive(
            f"samples over {x.shape[1]} bits vs reference over {q.n}")
    support = 2 ** q.n
    required = required_test_samples(support, eps, config.c_test)
    m = x.shape[0]
    if m < required:
        raise InsufficientSamples(
            f"identity test needs at least {required} samples, got {m}",
            required=required, available=m)
    codes = _kernels.encode_columns(x, np.arange(q.n, dtype=np.int64))
    if config.poissonize:
        if rng is None:
            raise ValueError("poissonized mode requires an RngState")
        m_eff = int(rng.generator().poisson(m))
        if m_eff > x.shape[0]:
            raise InsufficientSamples(
                f"poissonized draw {m_eff} exceeds available {x.shape[0]}",
                required=m_eff, available=x.shape[0])
        codes = codes[:m_eff]
        m = m_eff
    counts = _counts_from_codes(codes, q.n)
    Z = identity_statistic(counts, q.mass, m)
    tau = _resolve_threshold(support, eps, m, config)
    verdict = "accept" if Z <= tau else "reject"
    return TestReport(verdict=verdict, statistic=Z, threshold=tau,
                      samples_used=m)


def _hellinger_test_on_codes(codes: np.ndarray, k: int, eps: float,
                             fail_prob: float,
                             config: TesterConfig,
                             fit_budget: bool = False) -> TestReport:
    """Learn-then-verify on pre-encoded samples (codes over {0,1}^k)."""
    if k == 1:
        # Every distribution on a single bit is a product distribution.
        return TestReport("accept", 0.0, 0.0, samples_used=0)
    r = amplification_rounds(fail_prob)
    m1 = required_learn_samples(k, eps, config.c_learn)
    m2 = required_test_samples(2 ** k, eps, config.c_test)
    needed = m1 + r * m2
    avail = len(codes)
    if avail < needed:
        if not fit_budget:
            raise InsufficientSamples(
                f"independence test needs {needed} samples "
                f"(learn {m1} + {r} rounds x {m2}), got {avail}",
                required=needed, available=avail)
        # Shrink the learn/verify blocks proportionally to the budget,
        # keeping the round count (used by power sweeps probing m).
        scale = avail / needed
        m1 = max(8, int(m1 * scale))
        m2 = max(8, int((avail - m1) // r))
        if m1 + r * m2 > avail or m2 < 1:
            raise InsufficientSamples(
                f"budget {avail} too small even for shrunken blocks",
                required=m1 + r * max(m2, 1), available=avail)
    support = 2 ** k
    learn_counts = _counts_from_codes(codes[:m1], k)
    clamp = 1.0 / (4.0 * m1)
    bits = (np.arange(support)[:, None] >> np.arange(k)) & 1
    marginals = (learn_counts @ bits) / m1
    p_hat = ProductDistribution(np.clip(marginals, clamp, 1.0 - clamp))
    q = expand(p_hat)
    tau = _resolve_threshold(support, eps, m2, config)
    rejects = 0
    Z = 0.0
    for round_idx in range(r):
        lo = m1 + round_idx * m2
        counts = _counts_from_codes(codes[lo:lo + m2], k)
        Z = identity_statistic(counts, q.mass, m2)
        if Z > tau:
            rejects += 1
    verdict = "reject" if 2 * rejects > r else "accept"
    return TestReport(verdict=verdict, statistic=Z, threshold=tau,
                      samples_used=m1 + r * m2)


def hellinger_independence_test(samples, eps: float, fail_prob: float,
                                config: TesterConfig | None = None,
                                fit_budget: bool = False) -> TestReport:
    """Product vs Hellinger-eps-far-from-every-product, over {0,1}^k."""
    if not (0.0 < eps <= 1.0):
        raise InvalidEpsilon(f"eps must lie in (0, 1], got {eps}")
    if not (0.0 < fail_prob < 1.0):
        raise ValueError("fail_prob must lie in (0, 1)")
    config = config or TesterConfig(eps=eps, fail_prob=fail_prob)
    x = _as_bit_matrix(samples)
    k = x.shape[1]
    codes = _kernels.encode_columns(x, np.arange(k, dtype=np.int64))
    return _hellinger_test_on_codes(codes, k, eps, fail_prob, config,
                                    fit_budget=fit_budget)


def algorithm_parameters(n: int, d: int, eps: float,
                         config: TesterConfig) -> tuple[float, float, int]:
    """(delta, eps', m) for the degree-d tester, per the closed forms."""
    subsets = math.comb(n, d + 1)
    if subsets >= 2 ** 62:
        raise RegimeViolation(
            f"binom({n},{d + 1}) does not fit a 64-bit count")
    delta = 1.0 / (3.0 * subsets)
    eps_prime = eps / (math.sqrt(2.0 * n) * (1.0 + math.sqrt(d + 1)))
    m = math.ceil(config.c_amp * 2.0 ** ((d + 1) / 2.0) / eps_prime ** 2
                  * math.log(1.0 / delta))
    return delta, eps_prime, m


def independence_test_degree_d(source, n: int, d: int, eps: float,
                               config: TesterConfig | None = None,
                               rng: RngState | None = None,
                               m_override: int | None = None,
                               threads: int = 1) -> TestReport:
    """Test whether an unknown degree-d Bayes net source is a product.

    `source` is either a BayesNet (then `rng` is required), or a callable
    taking a sample count and returning a (count, n) uint8 array.

    Draws one multiset S of samples and runs the Hellinger independence
    tester on S restricted to every (d+1)-subset of coordinates, in
    lexicographic order; accepts iff all subset tests accept, short-circuits
    at the first rejection and records that subset as the witness.  With
    threads > 1 the subset tests run in parallel but the verdict and witness
    equal the sequential (lexicographically smallest) result.
    """
    config = config or TesterConfig(eps=eps)
    if not (0.0 < eps <= 1.0):
        raise InvalidEpsilon(f"eps must lie in (0, 1], got {eps}")
    if d < 0 or d + 1 > n:
        raise RegimeViolation(f"need 0 <= d <= n-1, got n={n}, d={d}")
    delta, eps_prime, m_formula = algorithm_parameters(n, d, eps, config)
    m = m_formula if m_override is None else int(m_override)
    fit_budget = m_override is not None
    if d == 0:
        # Size-1 subsets: every single-coordinate marginal is trivially a
        # product distribution, so the test accepts without drawing.
        return TestReport("accept", 0.0, 0.0, samples_used=0)
    if isinstance(source, BayesNet):
        if rng is None:
            raise ValueError("sampling a BayesNet requires an RngState")
        S = sample(source, rng, m)
    else:
        S = _as_bit_matrix(source(m))
    if S.shape != (m, n):
        raise ValueError(f"source produced shape {S.shape}, expected {(m, n)}")

    from itertools import combinations

    def run_subset(T: tuple) -> TestReport:
        codes = _kernels.encode_columns(S, np.array(T, dtype=np.int64))
        return _hellinger_test_on_codes(codes, d + 1, eps_prime, delta,
                                        config, fit_budget=fit_budget)

    subsets = combinations(range(n), d + 1)
    last = None
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for T, rep in zip(combinations(range(n), d + 1),
                              pool.map(run_subset, subsets, chunksize=4)):
                last = rep
                if not rep.accepted:
                    return replace(rep, witness_subset=tuple(T),
                                   samples_used=m)
    else:
        for T in subsets:
            rep = run_subset(T)
            last = rep
            if not rep.accepted:
                return replace(rep, witness_subset=tuple(T), samples_used=m)
    assert last is not None
    return replace(last, samples_used=m)


# ---------------------------------------------------------------------------
# Threshold calibration
# ---------------------------------------------------------------------------

def cache_dir() -> Path:
    env = os.environ.get("BNIT_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "bnit"


def _cache_path() -> Path:
    return cache_dir() / "thresholds.json"


def _cache_key(domain_size: int, eps: float, m: int) -> str:
    return f"{domain_size}:{eps!r}:{m}"


def _load_cache() -> dict:
    path = _cache_path()
    if path.exists():
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    return {}


def _store_cache(cache: dict):
    path = _cache_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        json.dump(cache, fh, indent=1, sort_keys=True)
    os.replace(tmp, path)


def _null_source(K: int, eps: float) -> np.ndarray:
    """pmf with chi2(p, uniform_K) == eps^2: alternating +-gamma/K bumps."""
    perturbed = K if K % 2 == 0 else K - 1
    gamma = min(eps * math.sqrt(K / perturbed), 1.0)
    p = np.full(K, 1.0 / K)
    signs = np.where(np.arange(perturbed) % 2 == 0, 1.0, -1.0)
    p[:perturbed] += gamma * signs / K
    return p


def _alt_source(K: int, eps: float) -> np.ndarray:
    """pmf at Hellinger distance eps from uniform_K, via a point-mass mixture.

    p = lam * e_0 + (1 - lam) * uniform; lam found by bisection.
    """
    def hell(lam: float) -> float:
        p0 = lam + (1.0 - lam) / K
        rest = (1.0 - lam) / K
        bc = math.sqrt(p0 / K) + (K - 1) * math.sqrt(rest / K)
        return math.sqrt(max(1.0 - bc, 0.0))

    if eps >= hell(1.0):
        raise InvalidEpsilon(
            f"eps={eps} unreachable for domain size {K} "
            f"(max Hellinger to uniform is {hell(1.0):.4f})")
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if hell(mid) < eps:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    p = np.full(K, (1.0 - lam) / K)
    p[0] += lam
    return p


def calibrate_threshold(domain_size: int, eps: float, m: int, trials: int,
                        rng: RngState) -> float:
    """Monte-Carlo threshold minimizing max(type-I, type-II) error.

    Simulates the worst null (chi2 to the uniform reference exactly eps^2)
    and a Hellinger-eps alternative, picks the midpoint threshold with the
    smallest max error, and persists it to the calibration cache.
    """
    if trials < 1000:
        raise ValueError("calibration needs at least 1000 trials")
    K = domain_size
    q = np.full(K, 1.0 / K)
    p_null = _null_source(K, eps)
    p_alt = _alt_source(K, eps)
    g = rng.generator()
    null_counts = g.multinomial(m, p_null, size=trials).astype(np.float64)
    alt_counts = g.multinomial(m, p_alt, size=trials).astype(np.float64)

    def stats(counts: np.ndarray) -> np.ndarray:
        return (((counts - m * q) ** 2 - counts) / q).sum(axis=1)

    z_null = np.sort(stats(null_counts))
    z_alt = stats(alt_counts)
    # Candidate thresholds: midpoints between consecutive pooled statistics.
    pooled = np.sort(np.concatenate([z_null, z_alt]))
    cands = np.concatenate([[pooled[0] - 1.0],
                            0.5 * (pooled[:-1] + pooled[1:]),
                            [pooled[-1] + 1.0]])
    type1 = 1.0 - np.searchsorted(z_null, cands, side="right") / trials
    z_alt_sorted = np.sort(z_alt)
    type2 = np.searchsorted(z_alt_sorted, cands, side="right") / trials
    worst = np.maximum(type1, type2)
    tau = float(cands[int(np.argmin(worst))])

    cache = _load_cache()
    cache[_cache_key(domain_size, eps, m)] = tau
    _store_cache(cache)
    return tau


def get_calibrated_threshold(domain_size: int, eps: float, m: int,
                             trials: int = 4000) -> float:
    """Cached threshold, calibrating on a fixed internal stream if missing."""
    cache = _load_cache()
    key = _cache_key(domain_size, eps, m)
    if key in cache:
        return float(cache[key])
    rng = RngState(0x5EED, stream=hash_stream_for(domain_size, eps, m))
    return calibrate_threshold(domain_size, eps, m, trials, rng)


def hash_stream_for(domain_size: int, eps: float, m: int) -> int:
    from .rng import derive_stream

    return derive_stream("calibration", domain_size, eps, m)
