"""Hard-instance generators and exact farness auditing.

Three families:

- mixture of trees: d-1 uniform "pointer" bits select one of D = 2^(d-1)
  tree components sharing a random perfect matching of the N = n-d+1 child
  coordinates; component l gives matched pair k covariance (-1)^mu[l,k] *
  delta with delta = eps/sqrt(n).  The pmf has the closed form
      2^-n * (1+4 delta)^c * (1-4 delta)^(K - c)
  where K = floor(N/2) and c counts the matched pairs whose agreement
  pattern in x matches the component's orientation bit.  When N is odd one
  child is left unpaired (an independent uniform bit); strict callers can
  demand evenness instead.
- mixture of products: d uniform pointer bits select one of 2^d product
  components with marginals 1/2 - z[l, i] * delta, delta = eps/sqrt(N),
  N = n - d, from i.i.d. uniform sign vectors z.
- two-weight half-support family: mass (1 +- C eps)/2^n on a random half of
  {0,1}^n and its complement, at exact TV distance C*eps/2 from uniform.

`farness_audit` certifies distance from every product distribution: a cheap
certified lower bound from the factor-3 two-block inequality
    min_{Q1,Q2} tv(P, Q1 x Q2) >= (1/3) tv(P, P_A x P_Ac)
maximized over bipartitions, plus a multi-start coordinate-descent estimate
of the true minimum of tv(P, Q) over products Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dist import (
    BayesNet,
    DenseDistribution,
    ProductDistribution,
    expand,
    marginalize,
    product_of_marginals,
    to_dense,
)
from .distances import tv, tv_arrays
from .errors import (
    OddChildCount,
    PreconditionUniform,
    RegimeViolation,
    TooLargeForDense,
)
from .rng import RngState

AUDIT_CAP = 14


# ---------------------------------------------------------------------------
# Mixture of trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MixtureOfTreesParams:
    """Matching, orientations, and correlation of a mixture-of-trees instance.

    Coordinates 0..d-2 are the pointer bits; coordinates d-1..n-1 are the N
    children.  `matching` pairs absolute child coordinates (a < b);
    `unpaired` is the single leftover child when N is odd, else None.
    """

    n: int
    d: int
    eps: float
    delta: float
    N: int
    D: int
    matching: tuple  # tuple of (a, b) absolute coordinate pairs
    mu: np.ndarray = field(repr=False)  # (D, K) orientation bits
    unpaired: Optional[int] = None

    @property
    def pairs(self) -> int:
        return len(self.matching)

    # Proof-side derived quantities, used by the bounds suite.
    @property
    def z0(self) -> float:
        return (1 + 4 * self.delta) / (1 - 4 * self.delta)

    @property
    def z1(self) -> float:
        return (1 + (4 * self.delta) ** 2) / (1 - (4 * self.delta) ** 2)

    @property
    def z2(self) -> float:
        return (1 + (4 * self.delta) ** 4) / (1 - (4 * self.delta) ** 4)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n, "d": self.d, "eps": self.eps, "delta": self.delta,
            "N": self.N, "D": self.D,
            "matching": [[int(a), int(b)] for a, b in self.matching],
            "mu": [[int(v) for v in row] for row in self.mu],
            "unpaired": None if self.unpaired is None else int(self.unpaired),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "MixtureOfTreesParams":
        return cls(
            n=int(d["n"]), d=int(d["d"]), eps=float(d["eps"]),
            delta=float(d["delta"]), N=int(d["N"]), D=int(d["D"]),
            matching=tuple((int(a), int(b)) for a, b in d["matching"]),
            mu=np.asarray(d["mu"], dtype=np.uint8),
            unpaired=None if d["unpaired"] is None else int(d["unpaired"]),
        )


def gen_mixture_of_trees(n: int, d: int, eps: float, rng: RngState,
                         require_even: bool = False,
                         ) -> tuple[MixtureOfTreesParams, BayesNet]:
    """Draw a random mixture-of-trees instance and its BayesNet export.

    The exported net has max in-degree exactly d: each matched pair's second
    element has parents = {its partner} union the pointer bits.  With
    require_even=True an odd child count N = n-d+1 is refused (OddChildCount)
    instead of leaving one child unpaired.
    """
    if d < 1:
        raise RegimeViolation(f"mixture of trees needs d >= 1, got {d}")
    if n < d + 1:
        raise RegimeViolation(f"need n >= d+1, got n={n}, d={d}")
    delta = eps / math.sqrt(n)
    if not (0.0 < delta < 0.25):
        raise RegimeViolation(
            f"need 0 < eps/sqrt(n) < 1/4, got delta={delta}")
    N = n - d + 1
    D = 2 ** (d - 1)
    if N % 2 == 1 and require_even:
        raise OddChildCount(
            f"child count N = n-d+1 = {N} is odd; "
            "pass require_even=False to leave one child unpaired")
    g = rng.generator()
    children = np.arange(d - 1, n)
    perm = g.permutation(N)
    K = N // 2
    matching = tuple(
        tuple(sorted((int(children[perm[2 * k]]),
                      int(children[perm[2 * k + 1]]))))
        for k in range(K))
    unpaired = int(children[perm[N - 1]]) if N % 2 == 1 else None
    mu = g.integers(0, 2, size=(D, K), dtype=np.uint8)
    params = MixtureOfTreesParams(n=n, d=d, eps=eps, delta=delta, N=N, D=D,
                                  matching=matching, mu=mu, unpaired=unpaired)
    return params, mixture_trees_net(params)


def mixture_trees_net(params: MixtureOfTreesParams) -> BayesNet:
    """BayesNet export of a mixture-of-trees instance (in-degree exactly d)."""
    n, d, delta = params.n, params.d, params.delta
    pointers = tuple(range(d - 1))
    parents: list = [() for _ in range(n)]
    cpt: list = [np.array([0.5]) for _ in range(n)]
    agree1 = (1.0 + 4.0 * delta) / 2.0  # Pr[x_b = x_a] under orientation 0
    for k, (a, b) in enumerate(params.matching):
        pars = pointers + (a,)
        parents[b] = pars
        table = np.empty(2 ** len(pars))
        for pi in range(2 ** len(pars)):
            ell = pi & (params.D - 1)  # pointer bits occupy the low bits
            xa = (pi >> (d - 1)) & 1
            agree = agree1 if params.mu[ell, k] == 0 else 1.0 - agree1
            table[pi] = agree if xa == 1 else 1.0 - agree
        cpt[b] = table
    return BayesNet(n=n, order=tuple(range(n)), parents=tuple(parents),
                    cpt=tuple(cpt))


def mixture_trees_pmf(params: MixtureOfTreesParams,
                      codes: np.ndarray) -> np.ndarray:
    """Closed-form pmf 2^-n (1+4d)^c (1-4d)^(K-c) at the given codes."""
    codes = np.asarray(codes, dtype=np.int64)
    d, D = params.d, params.D
    if d > 1:
        ell = codes & (D - 1)
    else:
        ell = np.zeros_like(codes)
    c = np.zeros(len(codes), dtype=np.int64)
    for k, (a, b) in enumerate(params.matching):
        agree = ((codes >> a) & 1) == ((codes >> b) & 1)
        c += agree == (params.mu[ell, k] == 0)
    K = params.pairs
    return (2.0 ** -params.n * (1.0 + 4.0 * params.delta) ** c
            * (1.0 - 4.0 * params.delta) ** (K - c))


def mixture_trees_dense(params: MixtureOfTreesParams) -> DenseDistribution:
    if params.n > 24:
        raise TooLargeForDense(f"n={params.n} too large for dense pmf")
    codes = np.arange(2 ** params.n, dtype=np.int64)
    return DenseDistribution(params.n, mixture_trees_pmf(params, codes))


# ---------------------------------------------------------------------------
# Mixture of products
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MixtureOfProductsParams:
    """Sign matrix of a mixture-of-products instance.

    Coordinates 0..d-1 are pointer bits; child coordinate d+i has marginal
    Pr[x = 1] = 1/2 - z[l, i] * delta under component l.
    """

    n: int
    d: int
    eps: float
    delta: float
    N: int
    z: np.ndarray = field(repr=False)  # (2^d, N) entries +-1

    def to_json_dict(self) -> dict:
        return {
            "n": self.n, "d": self.d, "eps": self.eps, "delta": self.delta,
            "N": self.N, "z": [[int(v) for v in row] for row in self.z],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "MixtureOfProductsParams":
        return cls(n=int(d["n"]), d=int(d["d"]), eps=float(d["eps"]),
                   delta=float(d["delta"]), N=int(d["N"]),
                   z=np.asarray(d["z"], dtype=np.int64))


def gen_mixture_of_products(n: int, d: int, eps: float, rng: RngState,
                            ) -> tuple[MixtureOfProductsParams, BayesNet]:
    if not (1 <= d <= n / 2):
        raise RegimeViolation(
            f"mixture of products needs 1 <= d <= n/2, got n={n}, d={d}")
    N = n - d
    delta = eps / math.sqrt(N)
    if not (0.0 < delta <= 0.5):
        raise RegimeViolation(f"need 0 < eps/sqrt(N) <= 1/2, got {delta}")
    g = rng.generator()
    z = np.where(g.integers(0, 2, size=(2 ** d, N)) == 0, 1, -1)
    params = MixtureOfProductsParams(n=n, d=d, eps=eps, delta=delta, N=N, z=z)
    return params, mixture_products_net(params)


def mixture_products_net(params: MixtureOfProductsParams) -> BayesNet:
    n, d, delta = params.n, params.d, params.delta
    pointers = tuple(range(d))
    parents: list = [() for _ in range(n)]
    cpt: list = [np.array([0.5]) for _ in range(n)]
    for i in range(params.N):
        node = d + i
        parents[node] = pointers
        cpt[node] = 0.5 - params.z[:, i].astype(np.float64) * delta
    return BayesNet(n=n, order=tuple(range(n)), parents=tuple(parents),
                    cpt=tuple(cpt))


def product_component(params: MixtureOfProductsParams,
                      ell: int) -> ProductDistribution:
    """The product distribution of component ell (over the N children)."""
    return ProductDistribution(0.5 - params.z[ell].astype(np.float64)
                               * params.delta)


# ---------------------------------------------------------------------------
# Two-weight half-support perturbation of uniform
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PaninskiParams:
    """Random half-support S and perturbation size C*eps."""

    n: int
    S: np.ndarray = field(repr=False)  # sorted codes of the heavy half
    C_eps: float = 0.0

    def to_json_dict(self) -> dict:
        return {"n": self.n, "S": [int(v) for v in self.S],
                "C_eps": self.C_eps}

    @classmethod
    def from_json_dict(cls, d: dict) -> "PaninskiParams":
        return cls(n=int(d["n"]), S=np.asarray(d["S"], dtype=np.int64),
                   C_eps=float(d["C_eps"]))


def gen_paninski(n: int, eps: float, rng: RngState, C: float = 2.0,
                 ) -> tuple[PaninskiParams, DenseDistribution]:
    """Mass (1 +- C eps)/2^n on a random half of the cube; TV to uniform = C eps/2."""
    if n > 24:
        raise TooLargeForDense(f"dense-only family supports n <= 24, got {n}")
    c_eps = C * eps
    if not (0.0 < c_eps <= 1.0):
        raise RegimeViolation(f"need 0 < C*eps <= 1, got {c_eps}")
    size = 2 ** n
    g = rng.generator()
    S = np.sort(g.permutation(size)[: size // 2])
    mass = np.full(size, (1.0 - c_eps) / size)
    mass[S] = (1.0 + c_eps) / size
    params = PaninskiParams(n=n, S=S, C_eps=c_eps)
    return params, DenseDistribution(n, mass)


# ---------------------------------------------------------------------------
# Farness auditing
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FarnessCertificate:
    """Distance-from-every-product audit of a dense distribution."""

    tv_to_prod_marginals: float
    certified_lower_bound: float
    empirical_min_tv: float
    minimizer: ProductDistribution

    def to_json_dict(self) -> dict:
        return {
            "tv_to_prod_marginals": self.tv_to_prod_marginals,
            "certified_lower_bound": self.certified_lower_bound,
            "empirical_min_tv": self.empirical_min_tv,
            "minimizer": [float(v) for v in self.minimizer.p],
        }


def block_product_dense(P: DenseDistribution, A: Sequence[int]) -> np.ndarray:
    """Dense pmf of P_A (x) P_Ac, aligned with P's coordinate positions."""
    A = sorted(A)
    Ac = sorted(set(range(P.n)) - set(A))
    mass_A = marginalize(P, A).mass
    mass_Ac = marginalize(P, Ac).mass
    codes = np.arange(2 ** P.n, dtype=np.int64)
    codeA = np.zeros_like(codes)
    for j, i in enumerate(A):
        codeA |= ((codes >> i) & 1) << j
    codeAc = np.zeros_like(codes)
    for j, i in enumerate(Ac):
        codeAc |= ((codes >> i) & 1) << j
    return mass_A[codeA] * mass_Ac[codeAc]


def _tv_to_product(P: DenseDistribution, p: np.ndarray) -> float:
    return tv_arrays(P.mass, expand(ProductDistribution(p)).mass)


def _golden_section(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Minimize a unimodal f on [lo, hi]; returns (argmin, min)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _coordinate_descent(P: DenseDistribution, start: np.ndarray,
                        tol: float = 1e-6, max_sweeps: int = 40,
                        ) -> tuple[np.ndarray, float]:
    n = P.n
    q = start.astype(np.float64).copy()
    best = _tv_to_product(P, q)
    masks = [((np.arange(2 ** n) >> i) & 1).astype(bool) for i in range(n)]
    for _ in range(max_sweeps):
        improved = False
        for i in range(n):
            # Factor out coordinate i: the dense pmf of q with q_i := 1/2 is
            # w/2 where w is the product of the other coordinates' factors.
            saved = q[i]
            q[i] = 0.5
            w = 2.0 * expand(ProductDistribution(q)).mass
            hi_mask = masks[i]
            m_hi, w_hi = P.mass[hi_mask], w[hi_mask]
            m_lo, w_lo = P.mass[~hi_mask], w[~hi_mask]

            def f(v: float) -> float:
                return 0.5 * (np.abs(m_hi - w_hi * v).sum()
                              + np.abs(m_lo - w_lo * (1.0 - v)).sum())

            x, fx = _golden_section(f, 0.0, 1.0, tol)
            if fx < best - 1e-12:
                best = fx
                q[i] = x
                improved = True
            else:
                q[i] = saved
        if not improved:
            break
    return q, best


def farness_audit(P: DenseDistribution,
                  bipartitions: Optional[Sequence[Sequence[int]]] = None,
                  restarts: int = 20,
                  rng: RngState | None = None,
                  tol: float = 1e-6) -> FarnessCertificate:
    """Certify and estimate the TV distance from every product distribution.

    `bipartitions` lists the first blocks A to try in the two-block
    certified bound; defaults to all single-coordinate-vs-rest splits.
    Callers auditing pointer-style mixtures should add the pointer/children
    split, which is the split whose marginal structure drives those
    instances' farness.
    """
    if P.n > AUDIT_CAP:
        raise TooLargeForDense(
            f"farness audit supports n <= {AUDIT_CAP}, got {P.n}")
    prod_marg = product_of_marginals(P)
    tv_pm = tv(P, expand(prod_marg))
    if bipartitions is None:
        bipartitions = [[i] for i in range(P.n)]
    certified = 0.0
    for A in bipartitions:
        A = sorted(A)
        if not A or len(A) >= P.n:
            continue
        certified = max(certified,
                        tv_arrays(P.mass, block_product_dense(P, A)) / 3.0)
    if restarts <= 0:
        # certified-bound-only audit: report the product of marginals as
        # the (trivial) upper-bound witness
        best_q, best_val = prod_marg.p, tv_pm
    else:
        starts = [prod_marg.p, np.full(P.n, 0.5)]
        g = (rng or RngState(0xA0D17)).generator()
        while len(starts) < restarts:
            starts.append(g.uniform(0.05, 0.95, P.n))
        best_q, best_val = None, math.inf
        for s in starts[:restarts]:
            q, val = _coordinate_descent(P, np.asarray(s), tol=tol)
            if val < best_val:
                best_q, best_val = q, val
    return FarnessCertificate(
        tv_to_prod_marginals=tv_pm,
        certified_lower_bound=certified,
        empirical_min_tv=best_val,
        minimizer=ProductDistribution(np.clip(best_q, 0.0, 1.0)),
    )


def conditional_tv_lower_bound(P: DenseDistribution, coordinate: int,
                               block: Optional[Sequence[int]] = None,
                               tol: float = 1e-9) -> float:
    """TV between the conditionals of P given the bit at `coordinate`.

    Requires the marginal of `block` (default: the single coordinate) to be
    uniform within tol.  The returned value t satisfies
        tv(P, P_block (x) P_rest) >= t / 2,
    the two-block product lower bound for a uniform conditioning bit (tight
    when the block is the single coordinate itself).
    """
    if block is None:
        block = [coordinate]
    block = sorted(block)
    if coordinate not in block:
        raise ValueError("block must contain the conditioning coordinate")
    marg = marginalize(P, block)
    if np.abs(marg.mass - 1.0 / len(marg.mass)).max() > tol:
        raise PreconditionUniform(
            f"marginal of block {block} is not uniform within {tol}")
    codes = np.arange(2 ** P.n, dtype=np.int64)
    bit = (codes >> coordinate) & 1
    p0 = P.mass[bit == 0]
    p1 = P.mass[bit == 1]
    s0, s1 = p0.sum(), p1.sum()
    if s0 <= 0.0 or s1 <= 0.0:
        raise PreconditionUniform(
            f"coordinate {coordinate} is degenerate under P")
    return tv_arrays(p0 / s0, p1 / s1)
