"""Networks, path norms, Rademacher estimates, Fourier moment, 1D norm."""

import math

import numpy as np
import pytest

from widthlab.barron import (
    RELU,
    TANH,
    FourierData,
    PiecewiseLinear1D,
    TwoLayerNetwork,
    bv_norm_1d,
    canonical_network_1d,
    fourier_barron_bound,
    lipschitz_bound,
    mc_integration_gap,
    path_norm,
    rademacher_bound,
    rademacher_estimate,
    relu_net_integral_1d,
    sample_unit_path_norm_networks,
)


def random_relu_net(rng, d=1, width=6, averaged=True):
    return TwoLayerNetwork(rng.standard_normal(width) * 2,
                           rng.standard_normal((width, d)),
                           rng.uniform(-1, 1, width), RELU, averaged=averaged)


class TestPathNorm:
    def test_zero_network(self):
        net = TwoLayerNetwork(np.zeros(3), np.zeros((3, 2)), np.zeros(3))
        assert path_norm(net) == 0.0
        empty = TwoLayerNetwork(np.zeros(0), np.zeros((0, 2)), np.zeros(0))
        assert path_norm(empty) == 0.0

    def test_single_neuron_hand_value(self):
        # a=2, w=(1,0), b=-1, relu, averaged, q=1: 2*(1+1)/1 = 4
        net = TwoLayerNetwork([2.0], [[1.0, 0.0]], [-1.0], RELU, averaged=True)
        assert path_norm(net, q=1) == pytest.approx(4.0, rel=1e-15)

    def test_outer_homogeneity(self):
        rng = np.random.default_rng(0)
        net = random_relu_net(rng, d=3)
        assert path_norm(net.scale_outer(2.0)) == pytest.approx(2 * path_norm(net), rel=1e-12)
        assert path_norm(net.scale_outer(-3.0)) == pytest.approx(3 * path_norm(net), rel=1e-12)

    def test_relu_reparametrization_invariance(self):
        """(a, w, b) -> (a/lam, lam w, lam b) changes neither values nor norm."""
        rng = np.random.default_rng(1)
        net = random_relu_net(rng, d=2)
        lam = 3.7
        reparam = TwoLayerNetwork(net.outer / lam, net.inner * lam, net.bias * lam,
                                  RELU, averaged=True)
        X = rng.uniform(-1, 1, (64, 2))
        np.testing.assert_allclose(net.evaluate(X), reparam.evaluate(X), rtol=1e-12)
        assert path_norm(reparam) == pytest.approx(path_norm(net), rel=1e-12)

    def test_sigmoidal_offset_is_one(self):
        net = TwoLayerNetwork([2.0], [[1.0, 0.0]], [-5.0], TANH, averaged=True)
        # 2 * (1 + 1), the bias enters as a constant offset for bounded sigmoids
        assert path_norm(net) == pytest.approx(4.0)

    def test_lipschitz_bound_on_random_pairs(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            net = random_relu_net(rng, d=4, width=8)
            L = lipschitz_bound(net)
            X = rng.uniform(-1, 1, (50, 4))
            Y = rng.uniform(-1, 1, (50, 4))
            lhs = np.abs(net.evaluate(X) - net.evaluate(Y))
            rhs = L * np.max(np.abs(X - Y), axis=1)
            assert np.all(lhs <= rhs * (1 + 1e-9) + 1e-12)

    def test_concat_adds_values_and_norms(self):
        rng = np.random.default_rng(3)
        n1, n2 = random_relu_net(rng, d=2, width=3), random_relu_net(rng, d=2, width=5)
        cat = n1.concat(n2)
        X = rng.uniform(-1, 1, (32, 2))
        np.testing.assert_allclose(cat.evaluate(X), n1.evaluate(X) + n2.evaluate(X), rtol=1e-12)
        assert path_norm(cat) <= path_norm(n1) + path_norm(n2) + 1e-12
        assert path_norm(cat) == pytest.approx(path_norm(n1) + path_norm(n2), rel=1e-12)

    def test_relu_positive_homogeneity_numeric(self):
        z = np.random.default_rng(4).standard_normal(100)
        for lam in (0.5, 2.0, 7.0):
            np.testing.assert_allclose(RELU.apply(lam * z), lam * RELU.apply(z), rtol=1e-15)

    def test_wire_format_roundtrip(self):
        rng = np.random.default_rng(5)
        net = random_relu_net(rng, d=3, width=4)
        clone = TwoLayerNetwork.from_dict(net.to_dict())
        X = rng.uniform(-1, 1, (16, 3))
        np.testing.assert_allclose(net.evaluate(X), clone.evaluate(X), rtol=0, atol=0)


class TestRademacher:
    def test_bound_value(self):
        # 2 sqrt(2 ln 4 / 100), direct evaluation
        assert rademacher_bound(100, 2) == pytest.approx(2 * math.sqrt(2 * math.log(4) / 100),
                                                         rel=1e-15)
        assert rademacher_bound(100, 2) == pytest.approx(0.333022, rel=1e-5)

    def test_single_point_at_origin_sup_is_one(self):
        """With one sample at 0 the constant neuron attains the supremum 1."""
        est = rademacher_estimate(np.zeros((1, 1)), sign_draws=4, restarts=2, seed=0)
        assert np.all(est.draws >= 1.0 - 1e-6)
        assert np.all(est.draws <= 1.0 + 1e-12)

    def test_estimates_below_bound_for_every_draw(self):
        rng = np.random.default_rng(10)
        for d in (2, 5):
            X = rng.uniform(-1, 1, (128, d))
            est = rademacher_estimate(X, sign_draws=16, restarts=8, seed=1)
            assert est.violations == 0
            assert est.estimate <= est.bound

    def test_tanh_estimate_below_bound(self):
        rng = np.random.default_rng(11)
        X = rng.uniform(-1, 1, (64, 3))
        est = rademacher_estimate(X, activation=TANH, sign_draws=8, restarts=8, seed=2)
        assert est.violations == 0

    def test_rate_scaling_in_expectation(self):
        """Estimate decays roughly like 1/sqrt(n) over a seeded sweep."""
        means = []
        ns = [32, 128, 512]
        for n in ns:
            rng = np.random.default_rng(100 + n)
            X = rng.uniform(-1, 1, (n, 4))
            means.append(rademacher_estimate(X, sign_draws=12, restarts=8, seed=3).estimate)
        slope = np.polyfit(np.log(ns), np.log(means), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.2)


class TestFourierBound:
    def test_cosine_atoms(self):
        w0 = np.array([3.0, 4.0])
        f = FourierData(atoms=[(w0, 0.5), (-w0, 0.5)])
        assert fourier_barron_bound(f).value == pytest.approx(5.0, rel=1e-14)

    def test_constant_function(self):
        f = FourierData(atoms=[(np.zeros(2), 1.0)])
        assert fourier_barron_bound(f).value == 0.0

    def test_gaussian_density_1d(self):
        # |fhat|(xi) = exp(-xi^2/2)/sqrt(2 pi); first moment = sqrt(2/pi)
        f = FourierData(density=lambda xi: math.exp(-xi**2 / 2) / math.sqrt(2 * math.pi))
        out = fourier_barron_bound(f)
        assert not out.diverged
        assert out.value == pytest.approx(math.sqrt(2 / math.pi), abs=1e-8)

    def test_divergent_tail_flagged(self):
        f = FourierData(density=lambda xi: 1.0 / (1.0 + abs(xi)))
        out = fourier_barron_bound(f)
        assert out.diverged and out.value == math.inf

    def test_radial_density_matches_univariate_in_1d(self):
        g = lambda r: math.exp(-r)
        uni = fourier_barron_bound(FourierData(density=lambda x: math.exp(-abs(x))))
        rad = fourier_barron_bound(FourierData(density=g, density_kind="radial", dim=1))
        assert rad.value == pytest.approx(uni.value, rel=1e-10)


class TestBV1D:
    def test_single_kink(self):
        # relu(x - 1/2): f(0)=0, f'(0)=0, one unit slope jump
        net = TwoLayerNetwork([1.0], [[1.0]], [-0.5], RELU, averaged=False)
        f = PiecewiseLinear1D.from_network(net)
        assert bv_norm_1d(f) == pytest.approx(1.0, rel=1e-14)

    def test_linear_function(self):
        f = PiecewiseLinear1D(knots=[0.0, 1.0], values=[0.0, 2.0])
        assert bv_norm_1d(f) == pytest.approx(2.0, rel=1e-15)

    def test_shifted_ramp_pair_separation(self):
        """relu(x-a) - relu(x-b) has norm exactly 2 for 0 < a < b < 1."""
        rng = np.random.default_rng(6)
        for _ in range(20):
            a, b = np.sort(rng.uniform(0.05, 0.95, 2))
            if b - a < 1e-3:
                continue
            net = TwoLayerNetwork([1.0, -1.0], [[1.0], [1.0]], [-a, -b], RELU, averaged=False)
            f = PiecewiseLinear1D.from_network(net)
            assert bv_norm_1d(f) == pytest.approx(2.0, rel=1e-9)

    def test_from_network_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            net = random_relu_net(rng, d=1, width=7, averaged=False)
            f = PiecewiseLinear1D.from_network(net)
            xs = rng.uniform(0, 1, 300)
            np.testing.assert_allclose(f.evaluate(xs), net.evaluate(xs.reshape(-1, 1)),
                                       rtol=1e-10, atol=1e-12)

    def test_canonical_network_identity_and_cost(self):
        """The explicit representation reproduces f and its path norm sits in
        [bv, 2 bv]; any realizing network has path norm >= bv/2."""
        rng = np.random.default_rng(8)
        for _ in range(25):
            net = random_relu_net(rng, d=1, width=6, averaged=False)
            f = PiecewiseLinear1D.from_network(net)
            bv = bv_norm_1d(f)
            canon = canonical_network_1d(f)
            xs = rng.uniform(0, 1, 200)
            np.testing.assert_allclose(canon.evaluate(xs.reshape(-1, 1)), f.evaluate(xs),
                                       rtol=1e-9, atol=1e-10)
            pn = path_norm(canon)
            assert bv <= pn * (1 + 1e-12)
            assert pn <= 2 * bv * (1 + 1e-12)
            assert bv <= 2 * path_norm(net) * (1 + 1e-12)


class TestIntegrationGap:
    def test_zero_network_gap(self):
        net = TwoLayerNetwork(np.zeros(2), np.zeros((2, 1)), np.zeros(2))
        X = np.linspace(0, 1, 50).reshape(-1, 1)
        rep = mc_integration_gap([(net, 0.0)], X)
        assert rep.sup_gap == 0.0

    def test_single_neuron_grid_gap_small(self):
        """Midpoint-grid average of a 1D unit-ball neuron is within O(1/n) of
        the exact integral."""
        net = TwoLayerNetwork([1.0], [[0.7]], [-0.2], RELU, averaged=False)
        net = net.scale_outer(1.0 / 0.9)  # path norm (0.7+0.2)/0.9 = 1
        n = 200
        X = ((np.arange(n) + 0.5) / n).reshape(-1, 1)
        ref = relu_net_integral_1d(net)
        rep = mc_integration_gap([(net, ref)], X)
        assert rep.sup_gap <= 1.0 / n + 1e-6

    def test_gap_below_bound_for_sampled_ball(self):
        rng = np.random.default_rng(9)
        n = 400
        X = rng.uniform(0, 1, (n, 1))
        nets = sample_unit_path_norm_networks(1, 40, 5, rng)
        pairs = [(net, relu_net_integral_1d(net)) for net in nets]
        rep = mc_integration_gap(pairs, X)
        assert rep.sup_gap <= rep.bound
