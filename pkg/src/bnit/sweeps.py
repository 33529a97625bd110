"""Monte-Carlo power / scaling experiment harness with CSV output.

A manifest is a grid of (family, n, d, eps, m) cells plus a trial count and
a root seed.  Every trial derives its own counter-based RNG stream from
(root seed, cell, trial), so results are a pure function of the manifest:
thread count and execution order cannot change any number.  The only
non-reproducible column is mean_runtime_ms; `stable_timing=True` writes 0.0
there so re-runs are byte-identical.

CSV schema (fixed):
    family,n,d,eps,m,trials,reject_rate,mean_runtime_ms,seed
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .dist import BayesNet, product_net, sample_dense
from .errors import BnitError
from .instances import gen_mixture_of_products, gen_mixture_of_trees, \
    gen_paninski
from .rng import RngState
from .testers import TesterConfig, algorithm_parameters, \
    independence_test_degree_d

CSV_HEADER = "family,n,d,eps,m,trials,reject_rate,mean_runtime_ms,seed"

FAMILIES = ("product", "mixture_trees", "mixture_products", "paninski")

# Scaling-sweep constants: m = ceil(KAPPA_SCALING * n / eps^2) gives the
# degree-1 tester power ~0.8 on mixture-of-trees instances at n = 8,
# eps = SCALING_EPS (fixed by pilot: reject rates 0.74-0.83 across
# n in {8, 12, 16} over several root seeds, spread <= 0.08).
KAPPA_SCALING = 6.0
SCALING_EPS = 0.1


@dataclass(frozen=True)
class Cell:
    """One grid point; m=None means the tester's own sample formula."""

    family: str
    n: int
    d: int
    eps: float
    m: Optional[int] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise BnitError(f"unknown family {self.family!r}; "
                            f"choose from {', '.join(FAMILIES)}")


@dataclass(frozen=True)
class PowerCurveRow:
    family: str
    n: int
    d: int
    eps: float
    m: int
    trials: int
    reject_rate: Optional[float]  # None for a 0-trial cell
    mean_runtime_ms: float
    seed: int

    def csv_fields(self) -> list:
        rate = "NA" if self.reject_rate is None else f"{self.reject_rate:.6f}"
        return [self.family, str(self.n), str(self.d),
                format(self.eps, "g"), str(self.m), str(self.trials),
                rate, f"{self.mean_runtime_ms:.3f}", str(self.seed)]


@dataclass(frozen=True)
class ExperimentManifest:
    cells: tuple
    trials: int
    root_seed: int
    out: Optional[str] = None

    def __post_init__(self):
        if self.trials < 0:
            raise BnitError("trials must be >= 0")


def _trial_source(cell: Cell, inst_rng: RngState):
    """Fresh instance for one trial: a BayesNet or a sampling callable."""
    g = inst_rng.generator()
    if cell.family == "product":
        return product_net(g.uniform(0.05, 0.95, cell.n))
    if cell.family == "mixture_trees":
        _, net = gen_mixture_of_trees(cell.n, cell.d, cell.eps, inst_rng)
        return net
    if cell.family == "mixture_products":
        _, net = gen_mixture_of_products(cell.n, cell.d, cell.eps, inst_rng)
        return net
    # paninski: unstructured dense pmf, expose as a sampling callable
    _, dense = gen_paninski(cell.n, cell.eps, inst_rng)
    draw_rng = inst_rng.split("draw")
    return lambda m: sample_dense(dense, draw_rng, m)


def run_trial(cell: Cell, trial: int, root_seed: int,
              config: TesterConfig | None = None) -> tuple[bool, float, int]:
    """(rejected, runtime_seconds, m_used) for one seeded trial."""
    config = config or TesterConfig(eps=cell.eps)
    base = RngState(root_seed).split(cell.family, cell.n, cell.d,
                                     cell.eps, cell.m, trial)
    source = _trial_source(cell, base.split("instance"))
    t0 = time.perf_counter()
    report = independence_test_degree_d(
        source, cell.n, cell.d, cell.eps, config=config,
        rng=base.split("test"), m_override=cell.m)
    elapsed = time.perf_counter() - t0
    return (not report.accepted), elapsed, report.samples_used


def cell_sample_count(cell: Cell, config: TesterConfig | None = None) -> int:
    if cell.m is not None:
        return int(cell.m)
    config = config or TesterConfig(eps=cell.eps)
    return algorithm_parameters(cell.n, cell.d, cell.eps, config)[2]


def run_manifest(manifest: ExperimentManifest, threads: int = 1,
                 stable_timing: bool = False,
                 config_for: Callable[[Cell], TesterConfig] | None = None,
                 ) -> list:
    """Run all cells; returns rows in manifest cell order."""
    jobs = [(ci, t) for ci in range(len(manifest.cells))
            for t in range(manifest.trials)]

    def work(job: tuple) -> tuple:
        ci, t = job
        cell = manifest.cells[ci]
        config = config_for(cell) if config_for else None
        return (ci,) + run_trial(cell, t, manifest.root_seed, config)

    if threads > 1 and jobs:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(work, jobs))
    else:
        outcomes = [work(j) for j in jobs]

    rows = []
    for ci, cell in enumerate(manifest.cells):
        mine = [o for o in outcomes if o[0] == ci]
        if manifest.trials == 0:
            rate: Optional[float] = None
            mean_ms = 0.0
            m_used = cell_sample_count(
                cell, config_for(cell) if config_for else None)
        else:
            rate = sum(1 for o in mine if o[1]) / manifest.trials
            mean_ms = 1000.0 * sum(o[2] for o in mine) / manifest.trials
            m_used = mine[0][3]
        rows.append(PowerCurveRow(
            family=cell.family, n=cell.n, d=cell.d, eps=cell.eps,
            m=m_used, trials=manifest.trials, reject_rate=rate,
            mean_runtime_ms=0.0 if stable_timing else mean_ms,
            seed=manifest.root_seed))
    return rows


def rows_to_csv(rows: Sequence[PowerCurveRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for row in rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()


def write_csv(rows: Sequence[PowerCurveRow], path: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))


def scaling_manifest(root_seed: int, trials: int = 50,
                     ns: Sequence[int] = (8, 12, 16),
                     kappa: float = KAPPA_SCALING,
                     eps: float = SCALING_EPS) -> ExperimentManifest:
    """Degree-1 scaling sweep: m = ceil(kappa * n / eps^2) per n."""
    cells = tuple(
        Cell("mixture_trees", n, 1, eps, m=math.ceil(kappa * n / eps ** 2))
        for n in ns)
    return ExperimentManifest(cells=cells, trials=trials, root_seed=root_seed)
