from fractions import Fraction

import numpy as np
import pytest

from backends import get_backend
from cohomology import KostantComplex
from frame_algebra import AdaptedFrame
from graded_algebra import build_algebra
from qc_data import QCPointData, generate_consistent_data, rotate_data, rotate_tensor, scale_data, sp_n_rotation
from weyl import (alpha_ansatz, alpha_qc, codiff_K2_on_V, codiff_K2_on_V_closed_form, codiff_Kqc2_on_D,
                  codiff_Kqc2_on_D_closed_form, joint_alpha_beta_diagnostic, kulkarni_nomizu, l_identity_check,
                  l_tensor, rho_tensor, rho_tensor_via_box, solve_alpha_numeric, wqc2, wqc2_route_a, wqc2_route_b)


@pytest.fixture(scope="module", params=[1, 2], ids=["n1", "n2"])
def data(request):
    """Fixture to provide consistent exact qc data for n = 1 and n = 2."""
    return generate_consistent_data(request.param, 42)


class TestAlpha:
    """Test class for the Weyl connection correction α_qc."""

    def test_closed_form_solves_the_equation(self, data):
        """Test (∂*K^qc(2))(ξ) = 0."""
        for value in codiff_K2_on_V(alpha_qc(data), data):
            assert data.backend.all_zero(value)

    def test_numeric_solution_matches_closed_form(self, data):
        """Test that solving the linear system returns α_qc."""
        solution = solve_alpha_numeric(data)
        n = data.n
        assert solution.f == data.scal / (32 * n * (n + 2))
        assert solution.c == Fraction(1, 4)
        assert solution.c_determined == (not data.backend.all_zero(data.T0))
        assert solution.residual == 0
        for found, expected in zip(solution.alpha, alpha_qc(data)):
            assert data.backend.allclose(found, expected)

    @pytest.mark.parametrize("n", [1, 2])
    def test_numeric_solution_on_flat_data(self, n):
        """Test α = 0 with the closed-form c = 1/4 when T0 = 0 leaves c undetermined."""
        frame = AdaptedFrame(n)
        backend = frame.backend
        flat = QCPointData(n, frame, backend.zeros((frame.dim,) * 2), backend.zeros((frame.dim,) * 2), backend.zero,
                           backend.zeros((frame.dim,) * 4))
        solution = solve_alpha_numeric(flat)
        assert solution.f == 0
        assert solution.c == Fraction(1, 4)
        assert not solution.c_determined
        assert all(backend.all_zero(value) for value in solution.alpha)

    @pytest.mark.parametrize("f, c", [(0, 0), (1, 0), (0, 1), (Fraction(-2, 3), Fraction(5, 2))])
    def test_closed_form_of_codifferential(self, data, f, c):
        """Test the closed form of (∂*K^α(2))(ξ_r) against the cochain codifferential for any α in the ansatz."""
        alpha = alpha_ansatz(data, data.backend.scalar(f), data.backend.scalar(c))
        for closed, computed in zip(codiff_K2_on_V_closed_form(alpha, data), codiff_K2_on_V(alpha, data)):
            assert data.backend.allclose(closed, computed)

    def test_joint_system_contains_alpha_qc(self, data):
        """Test that (α_qc, 0) solves the joint α, β system."""
        joint = joint_alpha_beta_diagnostic(data)
        assert joint.contains_alpha_qc
        assert joint.solution_dimension == joint.unknowns - joint.rank


class TestRho:
    """Test class for ∂*K^qc(2) on D and the Rho-tensor."""

    def test_codifferential_on_d(self, data):
        """Test ∂*K^qc(2) = Ric + 2T0 + 6U = 2(n+2) T0 + 4(n+4) U + scal/4n g."""
        computed = codiff_Kqc2_on_D(data)
        first, second = codiff_Kqc2_on_D_closed_form(data)
        assert data.backend.allclose(computed, first)
        assert data.backend.allclose(computed, second)

    def test_rho_two_routes(self, data):
        """Test P = -□⁻¹(∂*K^qc(2)) = -L."""
        assert data.backend.allclose(rho_tensor_via_box(data), rho_tensor(data))

    def test_l_tensor_is_symmetric(self, data):
        L = l_tensor(data)
        assert data.backend.allclose(L, L.T)

    def test_l_identity(self, data):
        """Test the relation between the sp(1)-twists of L and T0."""
        assert l_identity_check(data)


class TestObstruction:
    """Test class for W^qc(2)."""

    def test_routes_agree(self, data):
        """Test that the closed form agrees with K^qc(2) + {P(u), v} - {P(v), u}."""
        result = wqc2(data)
        assert result.routes_agree
        assert data.backend.allclose(wqc2_route_a(data), wqc2_route_b(data))

    def test_antisymmetry(self, data):
        """Test W(u,v,w,z) = -W(v,u,w,z) = -W(u,v,z,w)."""
        assert wqc2(data).antisymmetric

    def test_linear_in_the_data(self, data):
        """Test W(3 data) = 3 W(data)."""
        scaled = wqc2_route_a(scale_data(data, 3))
        assert data.backend.allclose(scaled, wqc2_route_a(data) * 3)

    def test_frame_invariance(self, data):
        """Test that W transforms as a tensor under Sp(n) rotations of the frame."""
        rotation = sp_n_rotation(data.frame)
        rotated = wqc2_route_a(rotate_data(data, rotation))
        assert data.backend.allclose(rotated, rotate_tensor(wqc2_route_a(data), rotation))

    def test_float_agrees_with_exact(self):
        """Test that the float mode reproduces the exact tensor."""
        exact = generate_consistent_data(2, 3)
        floating = generate_consistent_data(2, 3, get_backend("float"))
        difference = np.array(wqc2_route_a(exact), dtype=float) - np.array(wqc2_route_a(floating), dtype=float)
        assert np.max(np.abs(difference)) < 1e-9


@pytest.fixture(scope="module")
def complex1():
    """Fixture to provide the exact Kostant complex for n = 1, shared by the data set sweep."""
    return KostantComplex(build_algebra(1))


class TestDatasetSweep:
    """Test class for the Weyl identities on 50 generated data sets for n = 1."""

    @pytest.mark.parametrize("seed", range(50))
    def test_identities(self, complex1, seed):
        """Test both W^qc(2) routes and P = -□⁻¹(∂*K^qc(2)) = -L on one data set."""
        data = generate_consistent_data(1, seed)
        result = wqc2(data)
        assert result.routes_agree
        assert result.antisymmetric
        assert data.backend.allclose(rho_tensor_via_box(data, complex1), -l_tensor(data))
        assert l_identity_check(data)


class TestKulkarniNomizu:
    """Test class for the Kulkarni-Nomizu product."""

    def test_symmetries(self):
        """Test the curvature symmetries of the product of two symmetric forms."""
        backend = get_backend("exact")
        rng = np.random.default_rng(0)
        a = backend.array([[backend.random_scalar(rng) for _ in range(4)] for _ in range(4)])
        b = backend.array([[backend.random_scalar(rng) for _ in range(4)] for _ in range(4)])
        product = kulkarni_nomizu(a + a.T, b + b.T)
        assert backend.allclose(product, -product.transpose(1, 0, 2, 3))
        assert backend.allclose(product, -product.transpose(0, 1, 3, 2))
        assert backend.allclose(product, product.transpose(2, 3, 0, 1))

    def test_value(self):
        """Test (g ⋆ g)(e_1, e_2, e_1, e_2) = 2."""
        backend = get_backend("exact")
        product = kulkarni_nomizu(backend.identity(4), backend.identity(4))
        assert product[0, 1, 0, 1] == 2
        assert product[0, 1, 1, 0] == -2
