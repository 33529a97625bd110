"""Independence testing for bounded-degree binary Bayes nets.

The package provides:

- distribution core: Bayes nets over {0,1}^n, dense pmfs, products,
  seeded ancestral sampling, marginalization, and the TV / Hellinger /
  chi-square distances (`bnit.dist`, `bnit.distances`);
- statistical testers: chi-square product learner, chi2-vs-Hellinger
  identity tester, Hellinger independence tester, and the degree-d
  Bayes-net independence tester with threshold calibration
  (`bnit.testers`);
- hard-instance generators (mixture of trees, mixture of products,
  two-weight half-support perturbations of uniform) and exact farness
  audits (`bnit.instances`);
- a numerical verification suite for the supporting inequalities
  (`bnit.bounds`);
- a Monte-Carlo power/scaling harness and CLI (`bnit.sweeps`, `bnit.cli`).
"""

from .dist import (
    BayesNet,
    DenseDistribution,
    ProductDistribution,
    eval_pmf,
    expand,
    marginalize,
    product_of_marginals,
    restrict,
    sample,
    to_dense,
)
from .distances import chi2, hellinger, tv
from .rng import RngState, derive_stream

__version__ = "0.1.0"

__all__ = [
    "BayesNet",
    "DenseDistribution",
    "ProductDistribution",
    "RngState",
    "chi2",
    "derive_stream",
    "eval_pmf",
    "expand",
    "hellinger",
    "marginalize",
    "product_of_marginals",
    "restrict",
    "sample",
    "to_dense",
    "tv",
]
