import math

import numpy as np
import pytest

from netdep.dgp import (ABS_MOMENT_NORMAL, DEPENDENCY_GRAPH_RADIUS,
                        FormationSpec, LinearModelSpec,
                        dependency_weight_matrix, drop_edges, form_network,
                        project_vector_sample, simulate_dependency_graph,
                        simulate_linear, theta_gaussian_functional,
                        theta_linear_bound, theta_linear_sequence)
from netdep.graph import build_graph, fixture
from netdep.hac import Sample, ma_weight_matrix

from test_graph import random_graph


class TestLinearModel:
    def test_matches_weight_matrix_product(self):
        rng = np.random.default_rng(0)
        g = fixture("lattice", 4, 4)
        eps = rng.standard_normal(16)
        spec = LinearModelSpec(gamma=0.6)
        s = simulate_linear(g, spec, shocks=eps)
        W = ma_weight_matrix(g, 0.6, truncation=g.diameter())
        assert np.allclose(s.y[:, 0], W @ eps, atol=1e-12)

    def test_ring4_unit_shocks(self):
        # y_i = 1 + 2 * (gamma/2) + gamma^2 = 1.75 at gamma = 0.5
        g = fixture("ring", 4)
        s = simulate_linear(g, LinearModelSpec(0.5), shocks=np.ones(4))
        assert np.allclose(s.y[:, 0], 1.75, atol=1e-14)

    def test_gamma_zero_passthrough(self):
        g = fixture("ring", 6)
        eps = np.arange(6.0)
        s = simulate_linear(g, LinearModelSpec(0.0), shocks=eps)
        assert np.array_equal(s.y[:, 0], eps)

    def test_known_mean_zero(self):
        g = fixture("ring", 5)
        s = simulate_linear(g, LinearModelSpec(0.3), rng=0)
        assert s.known_mean is not None and s.known_mean[0] == 0.0

    def test_node_variance(self):
        # ring: Var(y_i) = 1 + 2 (gamma/2)^2 + ... = squared row norm of W
        g = fixture("ring", 8)
        spec = LinearModelSpec(0.5)
        W = ma_weight_matrix(g, 0.5, truncation=g.diameter())
        target = (W ** 2).sum(axis=1)
        rng = np.random.default_rng(1)
        reps = 40_000
        ys = np.stack([simulate_linear(g, spec, rng=rng).y[:, 0]
                       for _ in range(reps)])
        sd_err = target * math.sqrt(2.0 / reps)
        assert (np.abs(ys.var(axis=0) - target) < 4 * sd_err).all()

    def test_auto_truncation(self):
        g = fixture("ring", 10)  # diameter 5
        assert LinearModelSpec(0.0).auto_truncation(5) == 0
        assert LinearModelSpec(0.5).auto_truncation(5) == 5
        assert LinearModelSpec(0.5, truncation=3).auto_truncation(5) == 3
        assert LinearModelSpec(0.5).auto_truncation(100) == 40

    def test_invalid_gamma(self):
        with pytest.raises(ValueError):
            LinearModelSpec(1.0)
        with pytest.raises(ValueError):
            LinearModelSpec(-0.1)


class TestThetaLinear:
    def test_frozen_ring_value(self):
        # ring(10), gamma 0.5, s=3: shells of size 2 at m=4, size 1 at m=5
        g = fixture("ring", 10)
        expect = 2 * ABS_MOMENT_NORMAL * (0.5 ** 4 * 2 + 0.5 ** 5 * 1)
        assert theta_linear_bound(g, LinearModelSpec(0.5), 3) == \
            pytest.approx(expect, rel=1e-12)
        assert expect == pytest.approx(0.2493389253, abs=1e-9)

    def test_gamma_zero(self):
        g = fixture("ring", 6)
        assert theta_linear_bound(g, LinearModelSpec(0.0), 1) == 0.0

    def test_sequence_shape(self):
        g = fixture("ring", 12)
        th = theta_linear_sequence(g, LinearModelSpec(0.7))
        vals = [th(s) for s in range(g.diameter() + 2)]
        assert vals[0] == 1.0
        assert all(b <= a + 1e-15 for a, b in zip(vals[1:], vals[2:]))
        assert vals[-1] == 0.0

    def test_vanishes_at_diameter(self):
        g = fixture("star", 8)  # diameter 2
        assert theta_linear_bound(g, LinearModelSpec(0.9), 2) == 0.0


class TestFormation:
    def test_reproducible(self):
        spec = FormationSpec(n=200, lam=3.0, seed=7)
        a, b = form_network(spec), form_network(spec)
        assert np.array_equal(a.graph.edges, b.graph.edges)
        assert np.array_equal(a.positions, b.positions)

    def test_positions_in_unit_square(self):
        d = form_network(FormationSpec(n=300, lam=2.0, seed=1))
        assert (d.positions >= 0).all() and (d.positions <= 1).all()
        assert d.positions.shape == (300, 2)

    def test_average_degree_tracks_lambda(self):
        # boundary effects pull realized degree slightly below lambda
        rng = np.random.default_rng(3)
        degs = []
        for seed in range(20):
            d = form_network(FormationSpec(n=500, lam=3.0, seed=seed), rng=rng)
            degs.append(d.graph.degrees.mean())
        avg = np.mean(degs)
        assert 2.5 < avg < 3.1

    def test_pi_n_is_max_expected_degree(self):
        d = form_network(FormationSpec(n=100, lam=2.0, seed=5))
        assert d.pi_n == pytest.approx(d.expected_degrees.max())
        assert d.pi_n >= d.expected_degrees.mean()

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            FormationSpec(n=1, lam=1.0)
        with pytest.raises(ValueError):
            FormationSpec(n=10, lam=0.0)


class TestDependencyGraph:
    def test_weight_rows_path3(self):
        g = fixture("path", 3)
        W = dependency_weight_matrix(g)
        assert np.allclose(W[0], [1, 1, 0] / np.sqrt(2))
        assert np.allclose(W[1], [1, 1, 1] / np.sqrt(3))
        assert np.allclose(W[2], [0, 1, 1] / np.sqrt(2))

    def test_unit_variances(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            g = random_graph(rng, 12, 0.3)
            W = dependency_weight_matrix(g)
            assert np.allclose((W ** 2).sum(axis=1), 1.0, atol=1e-12)

    def test_path3_covariances(self):
        g = fixture("path", 3)
        W = dependency_weight_matrix(g)
        cov = W @ W.T
        assert cov[0, 1] == pytest.approx(2 / math.sqrt(6))
        assert cov[0, 2] == pytest.approx(0.5)  # share the middle shock

    def test_distance_three_uncorrelated(self):
        g = fixture("path", 5)
        cov = dependency_weight_matrix(g) @ dependency_weight_matrix(g).T
        d = g.distance_matrix()
        far = d >= DEPENDENCY_GRAPH_RADIUS + 1
        assert far.any()
        assert np.abs(cov[far]).max() == 0.0

    def test_simulate_matches_map(self):
        g = fixture("ring", 6)
        eps = np.arange(6.0)
        s = simulate_dependency_graph(g, shocks=eps)
        assert np.allclose(s.y[:, 0], dependency_weight_matrix(g) @ eps)
        assert s.known_mean[0] == 0.0


class TestThetaGaussianFunctional:
    def test_dependency_model_support(self):
        # radius-1 map of independent shocks: zero beyond distance 2
        g = fixture("path", 5)
        W = dependency_weight_matrix(g)
        th = theta_gaussian_functional(
            g, W, lambda d: 1.0 if d == 0 else 0.0)
        assert th(DEPENDENCY_GRAPH_RADIUS + 1) == 0.0
        assert th(1) == pytest.approx(2 / math.sqrt(6))
        assert th(0) == 1.0

    def test_identity_map_iid(self):
        g = fixture("ring", 8)
        th = theta_gaussian_functional(
            g, np.eye(8), lambda d: 1.0 if d == 0 else 0.0)
        assert th(1) == 0.0

    def test_shape_validation(self):
        g = fixture("ring", 4)
        with pytest.raises(ValueError):
            theta_gaussian_functional(g, np.eye(3), lambda d: 0.0)

    def test_sampled_pairs_large_graph(self):
        g = fixture("ring", 300)
        th = theta_gaussian_functional(
            g, np.eye(300), lambda d: 1.0 if d == 0 else 0.0,
            exact_limit=100, sample_pairs=5000)
        assert th(1) == 0.0


class TestProjection:
    def test_scalar_identity(self):
        g = fixture("ring", 5)
        s = simulate_linear(g, LinearModelSpec(0.4), rng=2)
        p = project_vector_sample(s, np.ones(1))
        assert np.array_equal(p.y, s.y)

    def test_basis_vector_selects_column(self):
        y = np.arange(8.0).reshape(4, 2)
        s = Sample(y=y, known_mean=np.zeros(2))
        p = project_vector_sample(s, np.array([0.0, 1.0]))
        assert np.array_equal(p.y[:, 0], y[:, 1])
        assert p.known_mean[0] == 0.0

    def test_norm_bound_enforced(self):
        s = Sample(y=np.ones((3, 2)))
        with pytest.raises(ValueError):
            project_vector_sample(s, np.array([1.0, 1.0]))

    def test_shape_mismatch(self):
        s = Sample(y=np.ones((3, 2)))
        with pytest.raises(ValueError):
            project_vector_sample(s, np.ones((4, 2)))


class TestDropEdges:
    def test_prob_zero_keeps_all(self):
        g = fixture("ring", 10)
        assert drop_edges(g, 0.0, rng=0).num_edges == 10

    def test_prob_one_removes_all(self):
        g = fixture("ring", 10)
        assert drop_edges(g, 1.0, rng=0).num_edges == 0

    def test_keep_fraction(self):
        g = fixture("complete", 40)  # 780 edges
        kept = drop_edges(g, 0.3, rng=1).num_edges
        assert abs(kept / 780 - 0.7) < 0.06

    def test_subgraph_distances_dominate(self):
        g = fixture("lattice", 5, 5)
        sub = drop_edges(g, 0.4, rng=2)
        assert (sub.distance_matrix() >= g.distance_matrix()).all()

    def test_invalid_prob(self):
        with pytest.raises(ValueError):
            drop_edges(fixture("ring", 4), 1.5)
