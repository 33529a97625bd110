"""Distributions over {0,1}^n: Bayes nets, dense pmfs, and products.

Conventions
-----------
Coordinates are 0-based.  An assignment x in {0,1}^n is encoded as the
integer  code(x) = sum_i x[i] * 2**i,  i.e. coordinate i maps to bit i.  This
encoding is fixed and used by all serialization and by every dense array in
the package: DenseDistribution.mass[code] is the probability of the
assignment with that code.

A BayesNet stores, for each node i, its parent list (each parent precedes i
in the topological order) and a table cpt[i] of length 2**len(parents[i])
giving Pr[X_i = 1 | parent assignment], where the parent assignment pi is
encoded with bit j = value of parents[i][j].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, TooLargeForDense
from .rng import RngState

DENSE_CAP = 24
_SAMPLE_CHUNK = 1 << 19


def encode(x) -> int:
    """Integer code of a single assignment (coordinate i -> bit i)."""
    code = 0
    for i, b in enumerate(x):
        code |= int(b) << i
    return code


def decode(code: int, n: int) -> np.ndarray:
    """Inverse of encode; returns a length-n uint8 array."""
    return np.array([(code >> i) & 1 for i in range(n)], dtype=np.uint8)


def codes_to_bits(codes: np.ndarray, n: int) -> np.ndarray:
    """Vectorized decode: (m,) int codes -> (m, n) uint8 assignments."""
    codes = np.asarray(codes, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n)) & 1).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class BayesNet:
    """DAG + conditional probability tables over binary variables."""

    n: int
    order: tuple
    parents: tuple
    cpt: tuple  # cpt[i]: np.ndarray of length 2**len(parents[i])

    def __post_init__(self):
        if sorted(self.order) != list(range(self.n)):
            raise ValueError("order must be a permutation of range(n)")
        pos = {node: t for t, node in enumerate(self.order)}
        if len(self.parents) != self.n or len(self.cpt) != self.n:
            raise DimensionMismatch(
                f"parents/cpt must have length n={self.n}")
        for i in range(self.n):
            for p in self.parents[i]:
                if not (0 <= p < self.n) or pos[p] >= pos[i]:
                    raise ValueError(
                        f"parent {p} of node {i} does not precede it")
            table = np.asarray(self.cpt[i], dtype=np.float64)
            if table.shape != (2 ** len(self.parents[i]),):
                raise ValueError(
                    f"cpt[{i}] must have 2**|parents| = "
                    f"{2 ** len(self.parents[i])} entries")
            if np.any(table < 0.0) or np.any(table > 1.0):
                raise ValueError(f"cpt[{i}] entries must lie in [0, 1]")

    @property
    def degree(self) -> int:
        """Max in-degree over nodes."""
        return max((len(p) for p in self.parents), default=0)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "order": [int(i) for i in self.order],
            "parents": [[int(p) for p in ps] for ps in self.parents],
            "cpt": [[float(v) for v in np.asarray(t)] for t in self.cpt],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "BayesNet":
        return cls(
            n=int(d["n"]),
            order=tuple(int(i) for i in d["order"]),
            parents=tuple(tuple(int(p) for p in ps) for ps in d["parents"]),
            cpt=tuple(np.asarray(t, dtype=np.float64) for t in d["cpt"]),
        )


def product_net(p) -> BayesNet:
    """Edge-free BayesNet with Pr[X_i = 1] = p[i]."""
    p = np.asarray(p, dtype=np.float64)
    n = len(p)
    return BayesNet(
        n=n,
        order=tuple(range(n)),
        parents=tuple(() for _ in range(n)),
        cpt=tuple(np.array([v]) for v in p),
    )


@dataclass(frozen=True, eq=False)
class DenseDistribution:
    """Explicit pmf over {0,1}^n, indexed by the integer assignment code."""

    n: int
    mass: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n > DENSE_CAP:
            raise TooLargeForDense(
                f"dense distributions support n <= {DENSE_CAP}, got {self.n}")
        mass = np.asarray(self.mass, dtype=np.float64)
        if mass.shape != (2 ** self.n,):
            raise DimensionMismatch(
                f"mass must have 2**n = {2 ** self.n} entries")
        if np.any(mass < -1e-12):
            raise ValueError("mass entries must be non-negative")
        total = float(mass.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"mass must sum to 1, got {total}")
        object.__setattr__(self, "mass", mass)

    @classmethod
    def uniform(cls, n: int) -> "DenseDistribution":
        return cls(n, np.full(2 ** n, 2.0 ** -n))

    def to_json_dict(self) -> dict:
        return {"n": self.n, "mass": [float(v) for v in self.mass]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "DenseDistribution":
        return cls(int(d["n"]), np.asarray(d["mass"], dtype=np.float64))


@dataclass(frozen=True, eq=False)
class ProductDistribution:
    """Fully independent coordinates; p[i] = Pr[X_i = 1]."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if np.any(p < 0.0) or np.any(p > 1.0):
            raise ValueError("marginals must lie in [0, 1]")
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return len(self.p)


def expand(prod: ProductDistribution) -> DenseDistribution:
    """Dense pmf of a product distribution (coordinate i -> bit i)."""
    arr = np.ones(1)
    for pi in prod.p:
        arr = np.concatenate([arr * (1.0 - pi), arr * pi])
    return DenseDistribution(prod.n, arr)


def eval_pmf(net: BayesNet, x) -> float:
    """Probability of a single assignment under the net."""
    x = np.asarray(x)
    if x.shape != (net.n,):
        raise DimensionMismatch(
            f"assignment has length {x.shape}, net has n={net.n}")
    prob = 1.0
    for i in net.order:
        pidx = 0
        for j, par in enumerate(net.parents[i]):
            pidx |= int(x[par]) << j
        p1 = float(np.asarray(net.cpt[i])[pidx])
        prob *= p1 if x[i] == 1 else 1.0 - p1
    return prob


def to_dense(net: BayesNet) -> DenseDistribution:
    """Enumerate the full pmf; brute-force oracle for n <= 24."""
    if net.n > DENSE_CAP:
        raise TooLargeForDense(
            f"to_dense supports n <= {DENSE_CAP}, got {net.n}")
    size = 2 ** net.n
    codes = np.arange(size, dtype=np.int64)
    mass = np.ones(size)
    for i in net.order:
        pidx = np.zeros(size, dtype=np.int64)
        for j, par in enumerate(net.parents[i]):
            pidx |= ((codes >> par) & 1) << j
        p1 = np.asarray(net.cpt[i], dtype=np.float64)[pidx]
        xi = (codes >> i) & 1
        mass *= np.where(xi == 1, p1, 1.0 - p1)
    return DenseDistribution(net.n, mass)


def _net_arrays(net: BayesNet):
    """Flatten order/parents/cpt into the contiguous arrays the kernels take."""
    order = np.asarray(net.order, dtype=np.int64)
    parent_off = np.zeros(net.n + 1, dtype=np.int64)
    for i in range(net.n):
        parent_off[i + 1] = parent_off[i] + len(net.parents[i])
    parent_flat = np.array(
        [p for ps in net.parents for p in ps], dtype=np.int64)
    cpt_off = np.zeros(net.n + 1, dtype=np.int64)
    for i in range(net.n):
        cpt_off[i + 1] = cpt_off[i] + 2 ** len(net.parents[i])
    cpt_flat = np.concatenate(
        [np.asarray(t, dtype=np.float64) for t in net.cpt])
    return order, parent_flat, parent_off, cpt_flat, cpt_off[:-1]


def sample(net: BayesNet, rng: RngState, m: int) -> np.ndarray:
    """Draw m assignments by ancestral sampling; returns (m, n) uint8.

    The sample stream is a pure function of (net, rng): uniforms are drawn
    once per (sample, node) from the rng's Philox stream and consumed
    identically by both kernel backends.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    order, parent_flat, parent_off, cpt_flat, cpt_off = _net_arrays(net)
    g = rng.generator()
    out = np.empty((m, net.n), dtype=np.uint8)
    for start in range(0, m, _SAMPLE_CHUNK):
        stop = min(start + _SAMPLE_CHUNK, m)
        u = g.random((stop - start, net.n))
        _kernels.ancestral_sample(order, parent_flat, parent_off, cpt_flat,
                                  cpt_off, u, out[start:stop])
    return out


def sample_dense(dist: DenseDistribution, rng: RngState, m: int) -> np.ndarray:
    """Draw m assignments from an explicit pmf; returns (m, n) uint8."""
    if m < 0:
        raise ValueError("m must be >= 0")
    g = rng.generator()
    codes = g.choice(len(dist.mass), size=m, p=dist.mass)
    return codes_to_bits(codes, dist.n)


def restrict(x, T) -> np.ndarray:
    """Keep only the coordinates in T (sorted ascending, distinct).

    Works on a single assignment (1-d) or a batch (2-d, rows = samples).
    """
    T = list(T)
    if any(b <= a for a, b in zip(T, T[1:])):
        raise ValueError("T must be sorted ascending with distinct entries")
    x = np.asarray(x)
    if x.ndim == 1:
        if T and (T[0] < 0 or T[-1] >= x.shape[0]):
            raise IndexError("restriction index out of range")
        return x[T]
    if T and (T[0] < 0 or T[-1] >= x.shape[1]):
        raise IndexError("restriction index out of range")
    return x[:, T]


def marginalize(P: DenseDistribution, T) -> DenseDistribution:
    """Marginal of P onto T; output bit j corresponds to coordinate T[j]."""
    T = list(T)
    if any(b <= a for a, b in zip(T, T[1:])):
        raise ValueError("T must be sorted ascending with distinct entries")
    keep = set(T)
    mass = P.mass
    # Sum out the dropped coordinates from highest bit to lowest so that
    # earlier bit positions stay valid while we go.
    for i in range(P.n - 1, -1, -1):
        if i in keep:
            continue
        mass = mass.reshape(-1, 2, 2 ** i).sum(axis=1).reshape(-1)
    return DenseDistribution(len(T), mass)


def product_of_marginals(P: DenseDistribution) -> ProductDistribution:
    """The product distribution with P's single-coordinate marginals."""
    p = np.empty(P.n)
    for i in range(P.n):
        p[i] = P.mass.reshape(-1, 2, 2 ** i)[:, 1, :].sum()
    return ProductDistribution(np.clip(p, 0.0, 1.0))
