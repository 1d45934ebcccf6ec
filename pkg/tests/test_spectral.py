import numpy as np
import pytest

from saddlescape import (
    ConditionError,
    QuadraticProblem,
    apply_iteration_map,
    block_eigenvalues,
    classify_saddle_map,
    invert_iteration_map,
    param_conditions,
    polyak_params,
    random_problem,
    rng_from,
    toy_problem,
    unstable_eigenvector,
)


def companion_roots(lam, alpha, beta):
    """Eigenvalues of the 2x2 update block, via the dense eigensolver."""
    block = np.array([[1.0 + beta - alpha * lam, -beta], [1.0, 0.0]])
    return np.linalg.eigvals(block)


def draw_valid_params(rng):
    lambda1 = rng.uniform(0.1, 2.0)
    alpha = rng.uniform(0.05, 0.95) * 4.0 / lambda1
    lower = max(alpha * lambda1 / 2.0 - 1.0, 0.0)
    beta = lower + (1.0 - lower) * rng.uniform(0.05, 0.95)
    return lambda1, alpha, beta


class TestBlockEigenvalues:
    def test_zero_eigenvalue_gives_one_and_beta(self):
        pair = block_eigenvalues(0.0, 0.75, 0.985)
        assert pair.is_real
        assert abs(pair.mu_hi - 1.0) <= 1e-12
        assert abs(pair.mu_lo - 0.985) <= 1e-12

    def test_toy_negative_curvature_roots(self):
        delta = 0.02
        pair = block_eigenvalues(-delta, 3.0, 1.0 - 3.0 * delta)
        root = np.sqrt(3.0 * delta)
        assert pair.mu_hi.real == pytest.approx(1.0 + root, abs=1e-12)
        assert pair.mu_lo.real == pytest.approx(1.0 - root, abs=1e-12)
        assert pair.mu_hi.real == pytest.approx(1.2449489742783178, abs=1e-12)
        assert pair.mu_lo.real == pytest.approx(0.7550510257216822, abs=1e-12)

    def test_complex_pair_has_sqrt_beta_magnitude(self):
        pair = block_eigenvalues(1.0, 3.0, 0.985)
        assert not pair.is_real
        assert abs(pair.mu_hi) == pytest.approx(np.sqrt(0.985), rel=1e-12)
        assert abs(pair.mu_lo) == pytest.approx(np.sqrt(0.985), rel=1e-12)
        assert pair.mu_hi.imag >= 0.0

    def test_matches_dense_eigensolver(self):
        rng = rng_from(42)
        for _ in range(200):
            lambda1, alpha, beta = draw_valid_params(rng)
            lam = rng.uniform(-lambda1, lambda1)
            pair = block_eigenvalues(lam, alpha, beta)
            got = sorted([pair.mu_hi, pair.mu_lo], key=lambda z: (z.real, z.imag))
            want = sorted(companion_roots(lam, alpha, beta), key=lambda z: (z.real, z.imag))
            assert abs(got[0] - want[0]) <= 1e-10
            assert abs(got[1] - want[1]) <= 1e-10

    def test_root_identities(self):
        rng = rng_from(43)
        for _ in range(1000):
            lambda1, alpha, beta = draw_valid_params(rng)
            lam = rng.uniform(-lambda1, lambda1)
            pair = block_eigenvalues(lam, alpha, beta)
            assert abs(pair.mu_hi + pair.mu_lo - (1.0 + beta - alpha * lam)) <= 1e-12
            assert abs(pair.mu_hi * pair.mu_lo - beta) <= 1e-12

    def test_parameter_domains(self):
        with pytest.raises(ValueError):
            block_eigenvalues(0.5, -1.0, 0.5)
        with pytest.raises(ValueError):
            block_eigenvalues(0.5, 1.0, 1.0)


class TestParamConditions:
    def test_toy_parameters_pass(self):
        assert param_conditions(3.0, 0.985, 1.0)

    def test_alpha_too_large(self):
        check = param_conditions(5.0, 0.9, 1.0)
        assert not check
        assert any("alpha" in f for f in check.failures)

    def test_beta_boundary_excluded(self):
        check = param_conditions(3.0, 0.5, 1.0)
        assert not check
        assert any("beta" in f for f in check.failures)

    def test_lambda1_domain(self):
        with pytest.raises(ValueError):
            param_conditions(1.0, 0.5, 0.0)


class TestClassification:
    def test_toy_dimensions(self):
        result = classify_saddle_map(toy_problem(0.02), 0.75, 0.985)
        assert result.stable_dim == 3
        assert result.unstable_dim == 1
        assert result.labels == ("stable", "unstable")

    def test_positive_spectrum_is_contracting(self):
        alpha, beta = polyak_params(0.25, 1.0)
        prob = QuadraticProblem(np.array([1.0, 0.5, 0.25]))
        result = classify_saddle_map(prob, alpha, beta)
        assert result.unstable_dim == 0
        for pair in result.pairs:
            assert abs(pair.mu_hi) < 1.0 and abs(pair.mu_lo) < 1.0

    def test_random_problem_counts_negative_blocks(self):
        prob = random_problem(100, 5, 1e-2, seed=7)
        result = classify_saddle_map(prob, 1.0 / prob.lipschitz, 0.989)
        # independent count: dense eigensolver on each block
        unstable = 0
        for lam in prob.eigenvalues:
            roots = companion_roots(lam, 1.0 / prob.lipschitz, 0.989)
            unstable += int(np.sum(np.abs(roots) > 1.0))
        assert unstable == 5
        assert result.unstable_dim == 5
        assert result.stable_dim == 195

    def test_zero_eigenvalue_block_is_unit(self):
        prob = QuadraticProblem(np.array([1.0, 0.0, -0.5]))
        result = classify_saddle_map(prob, 0.5, 0.9)
        assert result.labels == ("stable", "unit", "unstable")
        mags = sorted([abs(result.pairs[1].mu_hi), abs(result.pairs[1].mu_lo)])
        assert mags == pytest.approx([0.9, 1.0], abs=1e-12)

    def test_condition_violation_names_inequality(self):
        with pytest.raises(ConditionError, match="alpha"):
            classify_saddle_map(toy_problem(0.02), 5.0, 0.9)

    def test_trichotomy_over_random_draws(self):
        rng = rng_from(44)
        for trial in range(1000):
            lambda1, alpha, beta = draw_valid_params(rng)
            kind = trial % 3
            if kind == 0:
                lam = rng.uniform(1e-6, lambda1)
                pair = block_eigenvalues(lam, alpha, beta)
                assert abs(pair.mu_hi) < 1.0 and abs(pair.mu_lo) < 1.0
            elif kind == 1:
                pair = block_eigenvalues(0.0, alpha, beta)
                assert abs(pair.mu_hi - 1.0) <= 1e-12
                assert abs(pair.mu_lo - beta) <= 1e-12
            else:
                lam = -rng.uniform(1e-6, 2.0)
                pair = block_eigenvalues(lam, alpha, beta)
                assert pair.is_real
                assert pair.mu_hi.real > 1.0
                assert 0.0 < pair.mu_lo.real < 1.0

    def test_json_report_shape(self):
        data = classify_saddle_map(toy_problem(0.1), 0.5, 0.9).to_json_dict()
        assert data["stable_dim"] == 3 and data["unstable_dim"] == 1
        assert [b["class"] for b in data["blocks"]] == ["stable", "unstable"]
        assert set(data["blocks"][0]) == {"lambda", "mu_hi", "mu_lo", "class"}
        assert set(data["blocks"][0]["mu_hi"]) == {"re", "im"}


class TestIterationMap:
    def test_fixed_point_at_critical_pair(self):
        prob = toy_problem(0.02)
        z1, z2 = apply_iteration_map(prob, 0.75, 0.985, np.zeros(2), np.zeros(2))
        assert np.array_equal(z1, np.zeros(2)) and np.array_equal(z2, np.zeros(2))

    def test_beta_zero_reduces_to_descent_step(self):
        prob = toy_problem(0.1)
        x = np.array([0.3, -0.4])
        first, second = apply_iteration_map(prob, 0.5, 0.0, x, np.array([9.0, 9.0]))
        assert np.allclose(first, x - 0.5 * prob.gradient(x), rtol=1e-15)
        assert np.array_equal(second, x)

    def test_toy_single_application(self):
        delta, alpha, beta, eps = 0.02, 0.75, 0.985, 0.01
        prob = toy_problem(delta)
        z = np.array([1.0, eps])
        first, second = apply_iteration_map(prob, alpha, beta, z, z)
        assert first[0] == pytest.approx(1.0 - alpha, rel=1e-15)
        assert first[1] == pytest.approx((1.0 + delta * alpha) * eps, rel=1e-15)
        assert np.array_equal(second, z)

    def test_heavy_ball_step_equals_map_exactly(self):
        from saddlescape import EqualStart, run_heavy_ball

        prob = random_problem(7, 2, 0.1, seed=5)
        x0 = rng_from(5, 2).standard_normal(7)
        trace = run_heavy_ball(prob, 0.4, 0.7, x0, EqualStart(), 30)
        for k in range(1, 30):
            mapped, _ = apply_iteration_map(prob, 0.4, 0.7, trace.points[k], trace.points[k - 1])
            assert np.array_equal(mapped, trace.points[k + 1])

    def test_roundtrip_on_random_points(self):
        prob = random_problem(8, 2, 0.1, seed=6).rotated(basis_seed=3)
        rng = rng_from(6, 5)
        for _ in range(100):
            z1 = rng.standard_normal(8)
            z2 = rng.standard_normal(8)
            y1, y2 = apply_iteration_map(prob, 0.5, 0.8, z1, z2)
            w1, w2 = invert_iteration_map(prob, 0.5, 0.8, y1, y2)
            assert np.linalg.norm(w1 - z1) <= 1e-10 * max(np.linalg.norm(z1), 1.0)
            assert np.linalg.norm(w2 - z2) <= 1e-10 * max(np.linalg.norm(z2), 1.0)

    def test_inverse_fixed_point_and_zero(self):
        prob = toy_problem(0.3)
        z1, z2 = invert_iteration_map(prob, 0.5, 0.8, np.zeros(2), np.zeros(2))
        assert np.array_equal(z1, np.zeros(2)) and np.array_equal(z2, np.zeros(2))

    def test_inverse_requires_positive_beta(self):
        prob = toy_problem(0.3)
        with pytest.raises(ValueError):
            invert_iteration_map(prob, 0.5, 0.0, np.zeros(2), np.zeros(2))

    def test_dimension_mismatch(self):
        prob = toy_problem(0.3)
        with pytest.raises(ValueError):
            apply_iteration_map(prob, 0.5, 0.8, np.zeros(3), np.zeros(2))


class TestUnstableEigenvectors:
    def apply_linear_map(self, prob, alpha, beta, w):
        n = prob.n
        first, second = apply_iteration_map(prob, alpha, beta, w[:n], w[n:])
        return np.concatenate([first, second])

    def test_residual_on_toy(self):
        delta, alpha, beta = 0.02, 0.75, 0.985
        prob = toy_problem(delta)
        w = unstable_eigenvector(-delta, alpha, beta, np.array([0.0, 1.0]))
        pair = block_eigenvalues(-delta, alpha, beta)
        image = self.apply_linear_map(prob, alpha, beta, w)
        assert np.linalg.norm(image - pair.mu_hi.real * w) <= 1e-10 * np.linalg.norm(w)

    def test_orthogonality_between_blocks(self):
        prob = QuadraticProblem(np.array([1.0, -0.3, -0.5]))
        result = classify_saddle_map(prob, 0.5, 0.9)
        vectors = result.unstable_eigenvectors
        assert vectors.shape == (2, 6)
        assert abs(vectors[0] @ vectors[1]) == 0.0

    def test_linearity_in_v(self):
        w_plus = unstable_eigenvector(-0.2, 0.5, 0.9, np.array([0.0, 1.0]))
        w_minus = unstable_eigenvector(-0.2, 0.5, 0.9, np.array([0.0, -1.0]))
        assert np.array_equal(w_minus, -w_plus)

    def test_lambda_domain(self):
        with pytest.raises(ValueError):
            unstable_eigenvector(0.1, 0.5, 0.9, np.array([1.0]))

    def test_rotated_problem_residuals(self):
        prob = random_problem(10, 3, 0.1, seed=12).rotated(basis_seed=9)
        alpha = 1.0 / prob.lipschitz
        beta = 0.9
        result = classify_saddle_map(prob, alpha, beta)
        for w, pair in zip(result.unstable_eigenvectors, result.pairs[-3:]):
            image = self.apply_linear_map(prob, alpha, beta, w)
            assert np.linalg.norm(image - pair.mu_hi.real * w) <= 1e-10 * np.linalg.norm(w)


class TestInvariantSubspaces:
    def test_powers_bounded_on_nonnegative_span_divergent_off_it(self):
        for seed in range(50):
            rng = rng_from(700, seed)
            prob = QuadraticProblem(np.array([1.0, 0.5, 0.0, -0.5]))
            alpha, beta = 1.0, 0.5
            stable_w = np.zeros(4)
            stable_w[:3] = rng.standard_normal(3)
            z = np.concatenate([stable_w, stable_w])
            start_norm = np.linalg.norm(z)
            for _ in range(300):
                z = np.concatenate(apply_iteration_map(prob, alpha, beta, z[:4], z[4:]))
            assert np.linalg.norm(z) <= 10.0 * max(start_norm, 1.0)

            mixed_w = stable_w.copy()
            mixed_w[3] = rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0])
            z = np.concatenate([mixed_w, mixed_w])
            for _ in range(300):
                z = np.concatenate(apply_iteration_map(prob, alpha, beta, z[:4], z[4:]))
            assert np.linalg.norm(z) > 1e6
