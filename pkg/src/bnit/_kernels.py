"""Kernel dispatch: compiled extension when available, numpy fallback otherwise.

The two implementations consume identical inputs (pre-drawn uniforms,
flattened CPT tables) and produce bit-identical outputs, so which backend is
active never affects results — only speed.  Set BNIT_PURE_PYTHON=1 to force
the fallback (used by the benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("BNIT_PURE_PYTHON") == "1":
    _core = None
else:
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:  # pragma: no cover - depends on build environment
        _core = None

HAVE_COMPILED = _core is not None


def backend_name() -> str:
    return "compiled" if HAVE_COMPILED else "fallback"


def _ancestral_sample_fallback(order, parent_flat, parent_off, cpt_flat,
                               cpt_off, u, out):
    m = u.shape[0]
    for i in order:
        lo, hi = parent_off[i], parent_off[i + 1]
        if hi == lo:
            pidx = np.zeros(m, dtype=np.int64)
        else:
            pars = parent_flat[lo:hi]
            weights = np.int64(1) << np.arange(hi - lo, dtype=np.int64)
            pidx = out[:, pars].astype(np.int64) @ weights
        p = cpt_flat[cpt_off[i] + pidx]
        out[:, i] = u[:, i] < p


def _encode_columns_fallback(x, cols, out):
    weights = np.int64(1) << np.arange(len(cols), dtype=np.int64)
    np.matmul(x[:, cols].astype(np.int64), weights, out=out)


def ancestral_sample(order, parent_flat, parent_off, cpt_flat, cpt_off, u, out):
    """Fill out[s, i] by ancestral sampling; u[s, i] is the uniform for node i."""
    if HAVE_COMPILED:
        _core.ancestral_sample(order, parent_flat, parent_off, cpt_flat,
                               cpt_off, u, out)
    else:
        _ancestral_sample_fallback(order, parent_flat, parent_off, cpt_flat,
                                   cpt_off, u, out)


def encode_columns(x: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Pack selected columns of a (m, n) 0/1 array into int64 codes.

    Bit j of the output equals x[:, cols[j]].
    """
    x = np.ascontiguousarray(x, dtype=np.uint8)
    cols = np.ascontiguousarray(cols, dtype=np.int64)
    out = np.empty(x.shape[0], dtype=np.int64)
    if HAVE_COMPILED:
        _core.encode_columns(x, cols, out)
    else:
        _encode_columns_fallback(x, cols, out)
    return out
