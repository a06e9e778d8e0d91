from math import pi

import numpy as np
import pytest

from rotavg import (
    AngleTriple,
    PowerMatrix,
    QuadratureSpec,
    euler_matrix,
    evaluate,
    invariance_probe,
    monte_carlo_average,
    quadrature_average,
    selection_rule,
)
from rotavg.propositions import canonical_representatives

IDENT3 = PowerMatrix(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
ZERO = PowerMatrix(((0, 0, 0), (0, 0, 0), (0, 0, 0)))
RANK9_NONZERO = PowerMatrix(((1, 1, 1), (1, 2, 0), (1, 0, 2)))

# regression anchor for the rank-9 exception: frozen from this quadrature
# oracle, and equal to 1/630 within roundoff
RANK9_QUAD = 0.0015873015873015873


class TestEulerMatrix:
    def test_zero_angles_give_identity(self):
        assert np.allclose(euler_matrix(AngleTriple(0.0, 0.0, 0.0)), np.eye(3), atol=1e-15)

    def test_quarter_turn_about_y(self):
        g = euler_matrix(AngleTriple(0.0, pi / 2, 0.0))
        expected = np.zeros((3, 3))
        expected[0, 2] = 1.0
        expected[1, 1] = 1.0
        expected[2, 0] = -1.0
        assert np.abs(g - expected).max() < 1e-15

    def test_orthogonality_on_random_sample(self):
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(10_000):
            angles = AngleTriple(
                rng.uniform(0, 2 * pi), rng.uniform(0, pi), rng.uniform(0, 2 * pi)
            )
            g = euler_matrix(angles)
            worst = max(worst, np.abs(g.T @ g - np.eye(3)).max())
            assert abs(np.linalg.det(g) - 1.0) < 1e-13
        assert worst <= 1e-14

    def test_angle_ranges_validated(self):
        with pytest.raises(ValueError):
            AngleTriple(-0.1, 0.0, 0.0)
        with pytest.raises(ValueError):
            AngleTriple(0.0, 3.5, 0.0)


class TestQuadrature:
    def test_empty_product(self):
        assert abs(quadrature_average(ZERO) - 1.0) <= 1e-12

    def test_identity_permutation(self):
        assert abs(quadrature_average(IDENT3) - 1 / 6) <= 1e-10

    def test_squared_cosine(self):
        chi = PowerMatrix(((2, 0, 0), (0, 0, 0), (0, 0, 0)))
        assert abs(quadrature_average(chi) - 1 / 3) <= 1e-12

    def test_rank9_exception_value(self):
        value = quadrature_average(RANK9_NONZERO)
        assert abs(value) > 1e-6
        assert abs(value - RANK9_QUAD) <= 1e-12
        refined = quadrature_average(RANK9_NONZERO, QuadratureSpec.for_rank(9).refined())
        assert abs(value - refined) <= 1e-12

    def test_refinement_stability_for_selection_passing(self):
        worst = 0.0
        for n in range(0, 7):
            for chi in canonical_representatives(n):
                if not selection_rule(chi):
                    continue
                spec = QuadratureSpec.for_rank(chi.rank)
                worst = max(
                    worst,
                    abs(quadrature_average(chi, spec) - quadrature_average(chi, spec.refined())),
                )
        assert worst <= 1e-12

    def test_agreement_with_exact_values(self):
        worst = 0.0
        for n in range(0, 5):
            for chi in canonical_representatives(n):
                worst = max(worst, abs(quadrature_average(chi) - float(evaluate(chi))))
        assert worst <= 1e-10

    def test_spec_needs_positive_point_counts(self):
        with pytest.raises(ValueError):
            QuadratureSpec(0, 4, 4)


class TestMonteCarlo:
    def test_empty_product_is_exact(self):
        mean, stderr = monte_carlo_average(ZERO, 1000, seed=1)
        assert mean == 1.0
        assert stderr == 0.0

    def test_squared_cosine_covers_exact_value(self):
        chi = PowerMatrix(((2, 0, 0), (0, 0, 0), (0, 0, 0)))
        mean, stderr = monte_carlo_average(chi, 1_000_000, seed=42)
        assert abs(mean - 1 / 3) <= 3 * stderr

    def test_selection_violating_mean_is_noise(self):
        chi = PowerMatrix(((1, 1, 0), (0, 0, 0), (0, 0, 0)))
        mean, stderr = monte_carlo_average(chi, 200_000, seed=3)
        assert abs(mean) <= 4 * stderr

    def test_deterministic_for_fixed_seed(self):
        chi = PowerMatrix(((0, 0, 0), (0, 0, 2), (0, 2, 0)))
        assert monte_carlo_average(chi, 100_000, seed=9) == monte_carlo_average(
            chi, 100_000, seed=9
        )

    def test_rejects_empty_sample(self):
        with pytest.raises(ValueError):
            monte_carlo_average(ZERO, 0, seed=1)


class TestInvarianceProbe:
    def test_identity_rotation_matches_plain_average(self):
        chi = PowerMatrix(((0, 0, 0), (0, 0, 2), (0, 2, 0)))
        assert invariance_probe(chi, np.eye(3), "left") == quadrature_average(chi)

    @pytest.mark.parametrize("side", ["left", "right"])
    def test_random_rotation_leaves_rank4_average(self, side):
        chi = PowerMatrix(((2, 0, 0), (0, 1, 1), (0, 1, 1)))
        h = euler_matrix(AngleTriple(0.3, 1.1, 2.0))
        assert abs(invariance_probe(chi, h, side) - quadrature_average(chi)) <= 1e-9

    def test_half_turn_kills_odd_parity_component(self):
        # one cosine factor: the average is 0 because conjugating by a half
        # turn about z flips its sign
        chi = PowerMatrix(((1, 0, 0), (0, 0, 0), (0, 0, 0)))
        h = np.diag([-1.0, -1.0, 1.0])
        assert abs(quadrature_average(chi)) <= 1e-12
        assert abs(invariance_probe(chi, h, "left")) <= 1e-12

    def test_rejects_non_rotation(self):
        chi = PowerMatrix(((2, 0, 0), (0, 0, 0), (0, 0, 0)))
        with pytest.raises(ValueError):
            invariance_probe(chi, np.diag([1.0, 1.0, -1.0]), "left")  # det -1
        with pytest.raises(ValueError):
            invariance_probe(chi, np.ones((3, 3)), "left")

    def test_rejects_unknown_side(self):
        with pytest.raises(ValueError):
            invariance_probe(ZERO, np.eye(3), "middle")
