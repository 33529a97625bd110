"""Tests for the inequality verification suite."""

import math

import numpy as np
import pytest

from bnit import bounds as B
from bnit.dist import BayesNet, DenseDistribution, expand, \
    ProductDistribution, product_net
from bnit.errors import RegimeViolation
from bnit.rng import RngState


class TestBinomialMgf:
    def test_trivial_points(self):
        assert B.mgf_binomial_exact(10, 0.3, 0.0) == pytest.approx(1.0)
        assert B.mgf_binomial_exact(10, 0.0, 0.5) == pytest.approx(1.0)

    def test_matches_closed_form(self):
        """Sum over k agrees with (1 - p + p e^t)^m."""
        for m, p, t in [(30, 0.3, 0.5), (100, 0.9, 1.0), (5, 0.5, 0.2)]:
            closed = (1 - p + p * math.exp(t)) ** m
            assert B.mgf_binomial_exact(m, p, t) == \
                pytest.approx(closed, rel=1e-12)

    def test_example_bound(self):
        assert B.mgf_binomial_exact(30, 0.3, 0.5) <= math.exp(9.0)

    def test_grid_clean(self):
        r = B.check_mgf_binomial()
        assert r.violations == 0


class TestBinomialSquareMgf:
    def test_deterministic_binomial(self):
        """p = 1 gives LHS e^{t m^2}, far below the bound."""
        m, t = 16, 1 / 256
        assert B.mgf_sq_binomial_exact(m, 1.0, t) == \
            pytest.approx(math.exp(t * m * m), rel=1e-12)

    def test_boundary_grid_clean(self):
        assert B.check_mgf_sq_binomial().violations == 0

    def test_cap_equal_m_reduces_to_uncapped(self):
        m, p, t = 20, 0.2, 1 / 400
        assert B.mgf_sq_capped_binomial_exact(m, p, m, t) == \
            pytest.approx(B.mgf_sq_binomial_exact(m, p, t), rel=1e-12)

    def test_cap_zero(self):
        assert B.mgf_sq_capped_binomial_exact(40, 0.3, 0, 0.001) == \
            pytest.approx(1.0)

    def test_capped_grid_clean(self):
        assert B.check_mgf_sq_capped_binomial().violations == 0


class TestTruncatedMultinomial:
    def test_cap_above_m_gives_one(self):
        est, se = B.truncated_multinomial_mgf_mc(64, 4, 160, 4.0, 2000,
                                                 RngState(1))
        assert est == pytest.approx(1.0)
        assert se == pytest.approx(0.0)

    def test_relaxed_regime_clean(self):
        r = B.check_truncated_multinomial(trials=20_000)
        assert r.violations == 0
        assert "relaxed" in r.regime_note


class TestDecoupling:
    def test_collapse_matches_literal_enumeration(self):
        """The Binomial collapse equals the 4^n bitwise enumeration."""
        for n, p in [(1, 0.5), (4, 0.3), (6, 0.5), (8, 0.9)]:
            t = 1 / (8 * n)
            lhs_c, rhs_c = B.decoupling_sides_exact(n, p, t)
            lhs_e, rhs_e = B.decoupling_sides_enumerated(n, p, t)
            assert lhs_c == pytest.approx(lhs_e, rel=1e-10)
            assert rhs_c == pytest.approx(rhs_e, rel=1e-10)

    def test_n1_trivial(self):
        lhs, rhs = B.decoupling_sides_exact(1, 0.5, 0.1)
        assert lhs == pytest.approx(1.0)
        assert rhs >= 1.0

    def test_regime_guard(self):
        with pytest.raises(RegimeViolation):
            B.decoupling_check(6, 0.5, 1.0)

    def test_grid_clean(self):
        assert B.check_decoupling().violations == 0


class TestDominance:
    def test_spec_example(self):
        """Bin(10, .4) is dominated by Bin(20, .4): CDFs ordered."""
        r = B.dominance_checks(20, 0.4, 7)
        assert r.violations == 0

    def test_cap_zero_point_mass(self):
        assert B.dominance_checks(10, 0.5, 0).violations == 0

    def test_grid_clean(self):
        assert B.check_dominance().violations == 0


class TestCoupling:
    def test_exact_enumeration_example(self):
        r = B.coupling_product_dominance_mc(8, 0.5, 3, list(range(4)))
        assert r.violations == 0

    def test_cap_at_least_m_distributions_coincide(self):
        """With cap >= m the capped process never truncates, so the
        product laws agree exactly and the gap is ~0."""
        a, b, p, cap = 3, 5, 0.4, 8
        z = B._product_law_capped_process(a, b, p, cap)
        y = B._product_law_capped_binomials(a, b, p, cap)
        support = set(z) | set(y)
        for v in support:
            assert z.get(v, 0.0) == pytest.approx(y.get(v, 0.0), abs=1e-12)

    def test_process_law_matches_simulation(self):
        """Direct simulation of the capped process agrees with the
        Binomial x Binomial x Hypergeometric decomposition."""
        m, a, p, cap = 8, 4, 0.5, 3
        law = B._product_law_capped_process(a, m - a, p, cap)
        g = RngState(55).generator()
        trials = 200_000
        x = g.random((trials, m)) < p
        w = x.sum(axis=1)
        wi = x[:, :a].sum(axis=1)
        prods = np.empty(trials)
        for i in range(trials):
            if w[i] < cap:
                zi, zc = wi[i], w[i] - wi[i]
            else:
                ones = np.flatnonzero(x[i])
                keep = g.choice(ones, size=cap, replace=False)
                zi = int((keep < a).sum())
                zc = cap - zi
            prods[i] = zi * zc
        for v, prob in law.items():
            emp = (prods == v).mean()
            se = math.sqrt(max(prob * (1 - prob), 1e-12) / trials)
            assert emp == pytest.approx(prob, abs=5 * se + 1e-4)

    def test_grid_clean(self):
        assert B.check_coupling().violations == 0


class TestSubadditivity:
    def test_identical_nets(self):
        net = product_net([0.3, 0.7])
        assert B.subadditivity_check(net, net).violations == 0

    def test_structure_mismatch(self):
        a = product_net([0.3, 0.7])
        b = BayesNet(n=2, order=(0, 1), parents=((), (0,)),
                     cpt=(np.array([0.3]), np.array([0.2, 0.8])))
        with pytest.raises(RegimeViolation):
            B.subadditivity_check(a, b)

    def test_random_pairs_clean(self):
        r = B.check_subadditivity(pairs=100)
        assert r.violations == 0


class TestProjectionBound:
    def test_product_trivial(self):
        P = expand(ProductDistribution(np.array([0.3, 0.6])))
        r = B.projection_lb_check(P, trials=200)
        assert r.violations == 0

    def test_correlated_pair(self):
        P = DenseDistribution(2, np.array([0.35, 0.15, 0.15, 0.35]))
        r = B.projection_lb_check(P, trials=2000)
        assert r.violations == 0


class TestTwoBlockBounds:
    def test_factor3_clean(self):
        assert B.check_factor3(trials=2000).violations == 0

    def test_conditional_clean(self):
        assert B.check_conditional_product_bound(trials=2000).violations == 0


class TestDoubleBinomialSum:
    def test_small_eps_small_value(self):
        v1 = B.double_binomial_sum_exact(50, 50, 0.01)
        v2 = B.double_binomial_sum_exact(50, 50, 0.5)
        assert 0 < v1 < v2

    def test_degenerate_a_zero(self):
        v = B.double_binomial_sum_exact(0, 100, 0.3)
        assert v > 0

    def test_log_space_matches_naive_at_n60(self):
        """Direct float evaluation at n = 60 cross-validates the log-space
        path within 1e-9 relative."""
        a, b, eps = 30, 30, 0.4
        n = a + b
        delta = eps / math.sqrt(n)
        z = (1 + delta) / (1 - delta)
        total = 0.0
        for k1 in range(a + 1):
            for k2 in range(b + 1):
                total += (math.comb(a, k1) * math.comb(b, k2)
                          * abs(z ** (k1 + k2) - z ** (k1 + b - k2)))
        naive = (1 - delta) ** n * 2.0 ** -n * total
        assert B.double_binomial_sum_exact(a, b, eps) == \
            pytest.approx(naive, rel=1e-9)

    def test_b_quarter_guard(self):
        with pytest.raises(RegimeViolation):
            B.double_binomial_sum_exact(90, 10, 0.3)

    def test_locked_constant_grid_clean(self):
        assert B.check_double_binomial_sum().violations == 0


class TestCycleTerms:
    def test_all_length_four(self):
        """Only length-4 cycles: both sides coincide up to the e^{...} >= 1
        factor."""
        r = B.cycle_term_check([4, 4, 4], [0, 1, 0], 0.05, 100)
        assert r.violations == 0
        assert r.max_violation <= 0.0

    def test_empty_cycle_set(self):
        r = B.cycle_term_check([], [], 0.05, 100)
        assert r.violations == 0

    def test_length_guard(self):
        with pytest.raises(RegimeViolation):
            B.cycle_term_check([3], [0], 0.05, 100)

    def test_random_multisets_clean(self):
        assert B.check_cycle_terms(multisets=300).violations == 0


class TestSuiteRunner:
    def test_exact_suite_all_pass(self):
        results = B.run_suite("exact")
        assert all(r.violations == 0 for r in results)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            B.run_suite("everything")

    def test_result_json_fields(self):
        r = B.check_mgf_binomial()
        doc = r.to_json_dict()
        assert set(doc) == {"name", "grid_points", "violations",
                            "max_violation", "regime_note"}
