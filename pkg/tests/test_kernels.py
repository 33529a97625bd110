"""Tests for the compiled/pure-python kernel pair.

Both backends consume identical pre-drawn uniforms, so their outputs must
be bit-identical, not merely statistically close.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from bnit import _kernels
from bnit.dist import _net_arrays, product_net, sample
from bnit.rng import RngState


def random_net(n, seed, max_parents=2):
    from bnit.dist import BayesNet

    g = RngState(seed).generator()
    parents = tuple(
        tuple(np.sort(g.choice(i, size=min(i, max_parents),
                               replace=False)).tolist())
        if i > 0 else ()
        for i in range(n))
    cpt = tuple(g.uniform(0, 1, 2 ** len(ps)) for ps in parents)
    return BayesNet(n=n, order=tuple(range(n)), parents=parents, cpt=cpt)


class TestBackendEquivalence:
    def test_compiled_backend_active(self):
        """The build produces the compiled backend by default."""
        if os.environ.get("BNIT_PURE_PYTHON"):
            pytest.skip("pure-python mode forced via environment")
        assert _kernels.backend_name() == "compiled"

    def test_ancestral_sample_bit_identical(self):
        net = random_net(8, seed=11)
        arrays = _net_arrays(net)
        u = RngState(5).generator().random((4096, 8))
        out_main = np.empty((4096, 8), dtype=np.uint8)
        _kernels.ancestral_sample(*arrays, u, out_main)
        out_fb = np.empty((4096, 8), dtype=np.uint8)
        _kernels._ancestral_sample_fallback(*arrays, u, out_fb)
        np.testing.assert_array_equal(out_main, out_fb)

    def test_encode_columns_bit_identical(self):
        x = (RngState(6).generator().random((2048, 10)) < 0.5).astype(np.uint8)
        cols = np.array([1, 4, 7], dtype=np.int64)
        fb = np.empty(len(x), dtype=np.int64)
        _kernels._encode_columns_fallback(x, cols, fb)
        np.testing.assert_array_equal(_kernels.encode_columns(x, cols), fb)

    def test_encode_columns_convention(self):
        """Output bit j is the value at column cols[j]."""
        x = np.array([[1, 0, 1], [0, 1, 1]], dtype=np.uint8)
        codes = _kernels.encode_columns(x, np.array([0, 2], dtype=np.int64))
        np.testing.assert_array_equal(codes, [1 | (1 << 1), 0 | (1 << 1)])

    def test_env_var_forces_fallback(self):
        """BNIT_PURE_PYTHON=1 selects the fallback with identical samples."""
        script = (
            "import numpy as np\n"
            "from bnit import _kernels\n"
            "from bnit.dist import product_net, sample\n"
            "from bnit.rng import RngState\n"
            "print(_kernels.backend_name())\n"
            "x = sample(product_net([0.3, 0.7, 0.5]), RngState(1), 64)\n"
            "print(x.tobytes().hex())\n")
        env = dict(os.environ, BNIT_PURE_PYTHON="1")
        fb = subprocess.run([sys.executable, "-c", script], env=env,
                            capture_output=True, text=True, check=True)
        lines = fb.stdout.split()
        assert lines[0] == "fallback"
        here = sample(product_net([0.3, 0.7, 0.5]), RngState(1), 64)
        assert lines[1] == here.tobytes().hex()


class TestSamplingCorrectness:
    def test_cpt_threshold_semantics(self):
        """A bit is 1 exactly when its uniform is below the CPT entry."""
        net = product_net([0.25])
        arrays = _net_arrays(net)
        u = np.array([[0.1], [0.25], [0.3], [0.2499999]])
        out = np.empty((4, 1), dtype=np.uint8)
        _kernels.ancestral_sample(*arrays, u, out)
        np.testing.assert_array_equal(out.ravel(), [1, 0, 0, 1])

    def test_parent_dependence(self):
        """Child CPT row is selected by the sampled parent bits."""
        net = random_net(6, seed=3)
        x = sample(net, RngState(2), 50_000)
        # check conditional frequency of node 5 given its parents
        ps = net.parents[5]
        pidx = np.zeros(len(x), dtype=np.int64)
        for j, par in enumerate(ps):
            pidx |= x[:, par].astype(np.int64) << j
        for val in range(2 ** len(ps)):
            mask = pidx == val
            if mask.sum() < 500:
                continue
            freq = x[mask, 5].mean()
            assert freq == pytest.approx(float(net.cpt[5][val]), abs=0.02)
