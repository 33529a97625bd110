"""Tests for the distribution core: encoding, Bayes nets, dense pmfs."""

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bnit.dist import (
    BayesNet,
    DenseDistribution,
    ProductDistribution,
    codes_to_bits,
    decode,
    encode,
    eval_pmf,
    expand,
    marginalize,
    product_net,
    product_of_marginals,
    restrict,
    sample,
    sample_dense,
    to_dense,
)
from bnit.errors import DimensionMismatch, TooLargeForDense
from bnit.rng import RngState


def correlated_pair(delta=0.1):
    """Two uniform bits with covariance delta (agreement prob 1/2 + 2*delta)."""
    return BayesNet(
        n=2, order=(0, 1), parents=((), (0,)),
        cpt=(np.array([0.5]), np.array([0.5 - 2 * delta, 0.5 + 2 * delta])))


class TestEncoding:
    """code(x) = sum_i x[i] 2^i, coordinate i -> bit i."""

    def test_encode_examples(self):
        assert encode([0, 0, 0]) == 0
        assert encode([1, 0, 0]) == 1
        assert encode([0, 1, 0]) == 2
        assert encode([1, 1, 1]) == 7

    @given(st.lists(st.integers(0, 1), min_size=1, max_size=16))
    def test_decode_inverts_encode(self, bits):
        np.testing.assert_array_equal(
            decode(encode(bits), len(bits)), np.array(bits, dtype=np.uint8))

    def test_codes_to_bits_matches_decode(self):
        codes = np.arange(16)
        batch = codes_to_bits(codes, 4)
        for c in codes:
            np.testing.assert_array_equal(batch[c], decode(int(c), 4))


class TestBayesNet:
    """Structural validation and pmf evaluation."""

    def test_pair_pmf(self):
        net = correlated_pair()
        assert eval_pmf(net, [0, 0]) == pytest.approx(0.35)
        assert eval_pmf(net, [1, 0]) == pytest.approx(0.15)

    def test_to_dense_matches_eval_pmf(self):
        net = correlated_pair()
        dense = to_dense(net)
        np.testing.assert_allclose(dense.mass, [0.35, 0.15, 0.15, 0.35])

    def test_parent_must_precede(self):
        with pytest.raises(ValueError):
            BayesNet(n=2, order=(0, 1), parents=((1,), ()),
                     cpt=(np.array([0.5, 0.5]), np.array([0.5])))

    def test_cpt_length_checked(self):
        with pytest.raises(ValueError):
            BayesNet(n=2, order=(0, 1), parents=((), (0,)),
                     cpt=(np.array([0.5]), np.array([0.5])))

    def test_dimension_mismatch_on_eval(self):
        with pytest.raises(DimensionMismatch):
            eval_pmf(correlated_pair(), [0, 1, 0])

    def test_degree(self):
        assert correlated_pair().degree == 1
        assert product_net([0.5, 0.5, 0.5]).degree == 0

    def test_json_round_trip(self):
        net = correlated_pair()
        doc = json.loads(json.dumps(net.to_json_dict()))
        back = BayesNet.from_json_dict(doc)
        np.testing.assert_allclose(to_dense(back).mass, to_dense(net).mass)

    def test_nonuniform_order(self):
        """A net whose topological order differs from the index order."""
        net = BayesNet(n=2, order=(1, 0), parents=((1,), ()),
                       cpt=(np.array([0.2, 0.8]), np.array([0.5])))
        dense = to_dense(net)
        # Pr[x0=1, x1=0] = 0.5 * 0.2
        assert dense.mass[1] == pytest.approx(0.1)

    @settings(max_examples=50)
    @given(st.integers(2, 6), st.integers(0, 2 ** 31 - 1))
    def test_random_net_pmf_consistency(self, n, seed):
        """to_dense agrees with per-point eval_pmf on random nets."""
        g = RngState(seed).generator()
        parents = tuple(
            tuple(np.sort(g.choice(i, size=min(i, 2), replace=False)).tolist())
            if i > 0 and g.random() < 0.7 else ()
            for i in range(n))
        cpt = tuple(g.uniform(0, 1, 2 ** len(ps)) for ps in parents)
        net = BayesNet(n=n, order=tuple(range(n)), parents=parents, cpt=cpt)
        dense = to_dense(net)
        for code in range(2 ** n):
            assert dense.mass[code] == pytest.approx(
                eval_pmf(net, decode(code, n)), abs=1e-12)


class TestDenseDistribution:
    def test_must_sum_to_one(self):
        with pytest.raises(ValueError):
            DenseDistribution(1, np.array([0.6, 0.6]))

    def test_nonnegative(self):
        with pytest.raises(ValueError):
            DenseDistribution(1, np.array([1.2, -0.2]))

    def test_cap(self):
        with pytest.raises(TooLargeForDense):
            DenseDistribution(25, np.zeros(2))

    def test_uniform(self):
        u = DenseDistribution.uniform(3)
        np.testing.assert_allclose(u.mass, np.full(8, 0.125))


class TestProductDistribution:
    def test_expand_bit_convention(self):
        """Bit i of the dense index is coordinate i."""
        dense = expand(ProductDistribution(np.array([0.2, 0.9])))
        # Pr[x0=1, x1=0] = 0.2 * 0.1 at code 1
        np.testing.assert_allclose(dense.mass,
                                   [0.8 * 0.1, 0.2 * 0.1, 0.8 * 0.9,
                                    0.2 * 0.9])

    def test_marginals_out_of_range(self):
        with pytest.raises(ValueError):
            ProductDistribution(np.array([1.5]))

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=10))
    def test_expand_normalized(self, p):
        assert expand(ProductDistribution(np.array(p))).mass.sum() == \
            pytest.approx(1.0)


class TestMarginalization:
    def test_marginalize_example(self):
        dense = expand(ProductDistribution(np.array([0.2, 0.9])))
        m = marginalize(dense, [0])
        np.testing.assert_allclose(m.mass, [0.8, 0.2])
        m = marginalize(dense, [1])
        np.testing.assert_allclose(m.mass, [0.1, 0.9])

    def test_product_of_marginals(self):
        dense = to_dense(correlated_pair())
        pm = product_of_marginals(dense)
        np.testing.assert_allclose(pm.p, [0.5, 0.5])

    def test_marginalize_requires_sorted(self):
        dense = DenseDistribution.uniform(3)
        with pytest.raises(ValueError):
            marginalize(dense, [2, 0])

    @settings(max_examples=30)
    @given(st.integers(0, 2 ** 31 - 1))
    def test_marginalize_consistency(self, seed):
        """Marginalizing twice equals marginalizing once to the subset."""
        g = RngState(seed).generator()
        mass = g.dirichlet(np.ones(32))
        P = DenseDistribution(5, mass)
        via_two = marginalize(marginalize(P, [0, 2, 3]), [0, 2])
        direct = marginalize(P, [0, 3])
        np.testing.assert_allclose(via_two.mass, direct.mass, atol=1e-12)


class TestRestrict:
    def test_single_assignment(self):
        np.testing.assert_array_equal(restrict([1, 0, 1], [0, 2]), [1, 1])

    def test_batch(self):
        x = np.array([[1, 0, 1], [0, 1, 1]], dtype=np.uint8)
        np.testing.assert_array_equal(restrict(x, [1, 2]),
                                      [[0, 1], [1, 1]])

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError):
            restrict([1, 0, 1], [2, 0])

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            restrict([1, 0], [0, 5])


class TestSampling:
    def test_reproducible(self):
        net = correlated_pair()
        a = sample(net, RngState(3), 100)
        b = sample(net, RngState(3), 100)
        np.testing.assert_array_equal(a, b)

    def test_empirical_frequencies(self):
        net = correlated_pair()
        x = sample(net, RngState(3), 200_000)
        codes = x[:, 0].astype(int) | (x[:, 1].astype(int) << 1)
        freq = np.bincount(codes, minlength=4) / len(x)
        np.testing.assert_allclose(freq, [0.35, 0.15, 0.15, 0.35], atol=0.01)

    def test_sample_dense_frequencies(self):
        dense = to_dense(correlated_pair())
        x = sample_dense(dense, RngState(4), 200_000)
        codes = x[:, 0].astype(int) | (x[:, 1].astype(int) << 1)
        freq = np.bincount(codes, minlength=4) / len(x)
        np.testing.assert_allclose(freq, dense.mass, atol=0.01)

    def test_chunked_sampling_consistent(self):
        """Counts beyond one chunk produce the same prefix as a short draw.

        The sampler consumes one uniform per (sample, node) in a fixed
        layout, so a longer draw extends a shorter one.
        """
        net = product_net([0.3, 0.7])
        short = sample(net, RngState(9), 1000)
        long = sample(net, RngState(9), 5000)
        np.testing.assert_array_equal(short, long[:1000])
