import itertools
from fractions import Fraction

import numpy as np
import pytest

from backends import get_backend
from cohomology import (Cochain, CochainSpace, KostantComplex, act_on_cochain, cochain_to_form, codifferential,
                        differential, form_to_cochain, laplacian)
from errors import DegreeError, DimensionMismatchError
from frame_algebra import AdaptedFrame, part_three
from graded_algebra import build_algebra
from verification import random_cochain


@pytest.fixture(scope="module")
def complex1():
    """Fixture to provide the exact Kostant complex for n = 1."""
    return KostantComplex(build_algebra(1))


@pytest.fixture(scope="module")
def complex2():
    """Fixture to provide the exact Kostant complex for n = 2."""
    return KostantComplex(build_algebra(2))


@pytest.fixture(scope="module")
def float_complex2():
    """Fixture to provide the float Kostant complex for n = 2, used for the large C^2 blocks."""
    return KostantComplex(build_algebra(2, get_backend("float")))


@pytest.fixture
def rng():
    return np.random.default_rng(5)


class TestCochain:
    """Test class for the sparse cochain representation."""

    def test_alternating_evaluation(self, complex1):
        """Test φ(X, Y) = -φ(Y, X) and φ(X, X) = 0."""
        algebra = complex1.algebra
        phi = Cochain(algebra, 2, {(3, 4): {algebra.g0_index(0): Fraction(2)}})
        assert phi.evaluate((3, 4)) == {algebra.g0_index(0): 2}
        assert phi.evaluate((4, 3)) == {algebra.g0_index(0): -2}
        assert phi.evaluate((3, 3)) == {}

    def test_rejects_unsorted_arguments(self, complex1):
        """Test that argument tuples must be increasing."""
        with pytest.raises(DegreeError):
            Cochain(complex1.algebra, 2, {(4, 3): {0: 1}})

    def test_rejects_positive_arguments(self, complex1):
        """Test that arguments must lie in g-."""
        algebra = complex1.algebra
        with pytest.raises(DegreeError):
            Cochain(algebra, 1, {(algebra.g0_index(0),): {0: 1}})

    def test_rejects_wrong_arity(self, complex1):
        """Test that a 2-cochain cannot hold a single argument."""
        with pytest.raises(DimensionMismatchError):
            Cochain(complex1.algebra, 2, {(3,): {0: 1}})

    def test_zero_values_are_pruned(self, complex1):
        """Test that zero coefficients are not stored."""
        assert Cochain(complex1.algebra, 1, {(3,): {0: 0}}).is_zero()

    def test_homogeneity(self, complex1):
        """Test the homogeneity of e_a -> e^b (value degree 1, argument degree -1)."""
        algebra = complex1.algebra
        phi = Cochain(algebra, 1, {(algebra.d_index(0),): {algebra.dstar_index(1): 1}})
        assert phi.homogeneities() == {2}
        assert phi.component(2).matches(phi)
        assert phi.component(1).is_zero()


class TestOperators:
    """Test class for ∂, ∂* and □."""

    def test_differential_of_constant(self, complex1):
        """Test (∂φ)(X) = [X, φ] for a 0-cochain."""
        algebra = complex1.algebra
        k = algebra.g0_index(1)
        phi = Cochain(algebra, 0, {(): {k: algebra.backend.one}})
        d_phi = differential(phi)
        for j in algebra.negative_indices:
            assert d_phi.evaluate((j,)) == algebra.bracket_coordinates({j: algebra.backend.one}, {k: 1})

    @pytest.mark.parametrize("q, homogeneity", [(0, 1), (0, 2), (1, 1), (1, 2), (1, 3)])
    def test_differential_squares_to_zero(self, complex1, rng, q, homogeneity):
        """Test ∂∂ = 0."""
        phi = random_cochain(complex1, q, homogeneity, rng)
        assert differential(differential(phi)).is_zero()

    @pytest.mark.parametrize("homogeneity", [1, 2, 3])
    def test_codifferential_squares_to_zero(self, complex1, rng, homogeneity):
        """Test ∂*∂* = 0 on 2-cochains."""
        phi = random_cochain(complex1, 2, homogeneity, rng)
        assert codifferential(codifferential(phi)).is_zero()

    def test_codifferential_squares_to_zero_on_three_cochains(self, complex1, rng):
        """Test ∂*∂* = 0 on a 3-cochain."""
        phi = random_cochain(complex1, 3, 2, rng)
        assert codifferential(codifferential(phi)).is_zero()

    def test_codifferential_of_zero(self, complex1):
        """Test ∂*0 = 0."""
        assert codifferential(Cochain.zero(complex1.algebra, 2)).is_zero()

    def test_codifferential_of_0_cochain(self, complex1):
        """Test that ∂* is not defined on 0-cochains."""
        with pytest.raises(DegreeError):
            codifferential(Cochain.zero(complex1.algebra, 0))

    def test_laplacian_of_zero(self, complex1):
        """Test □0 = 0."""
        assert laplacian(Cochain.zero(complex1.algebra, 1)).is_zero()

    @pytest.mark.parametrize("q, homogeneity", [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3)])
    def test_laplacian_preserves_homogeneity(self, complex1, rng, q, homogeneity):
        """Test that □ maps C^q_l into C^q_l."""
        image = laplacian(random_cochain(complex1, q, homogeneity, rng))
        assert image.homogeneities() <= {homogeneity}

    def test_laplacian_is_g0_equivariant(self, complex1, rng):
        """Test □(A.φ) = A.(□φ) for random A in g0."""
        algebra = complex1.algebra
        a = {k: algebra.backend.random_scalar(rng) for k in algebra.indices(0)}
        phi = random_cochain(complex1, 1, 2, rng)
        assert laplacian(act_on_cochain(a, phi)).matches(act_on_cochain(a, laplacian(phi)))

    def test_action_rejects_non_g0(self, complex1):
        """Test that only g0 acts on cochains."""
        with pytest.raises(DegreeError):
            act_on_cochain({0: 1}, Cochain.zero(complex1.algebra, 1))

    def test_grading_element_acts_by_homogeneity(self, complex1, rng):
        """Test ε0.φ = l φ for φ in C^q_l."""
        algebra = complex1.algebra
        phi = random_cochain(complex1, 2, 3, rng)
        assert act_on_cochain({algebra.g0_index(0): algebra.backend.one}, phi).matches(phi.scale(3))


class TestCochainSpace:
    """Test class for the blocks C^q_l."""

    def test_total_dimension_of_c2(self, complex1):
        """Test dim C^2 = C(4n+3, 2) dim g = 441 for n = 1."""
        assert sum(complex1.space(2, l).dimension for l in range(0, 7)) == 441

    def test_c12_dimension(self, complex2):
        """Test dim C^1_2 = 3 dim g0 + (4n)^2."""
        assert complex2.space(1, 2).dimension == 3 * 14 + 64

    def test_vector_round_trip(self, complex1, rng):
        """Test that cochain and vector are inverse on a block."""
        space = complex1.space(2, 2)
        vector = [complex1.backend.random_scalar(rng) for _ in range(space.dimension)]
        assert space.vector(space.cochain(vector)) == vector

    def test_vector_outside_block(self, complex1, rng):
        """Test that a cochain of another homogeneity has no coordinates in the block."""
        phi = random_cochain(complex1, 1, 1, rng)
        with pytest.raises(DegreeError):
            complex1.space(1, 2).vector(phi)

    def test_form_round_trip(self, complex1, rng):
        """Test that bilinear forms survive the conversion to C^1_2."""
        frame = AdaptedFrame(1)
        form = frame.backend.array([[frame.backend.random_scalar(rng) for _ in range(4)] for _ in range(4)])
        phi = form_to_cochain(complex1.algebra, form)
        assert phi.homogeneities() == {2}
        assert frame.backend.allclose(cochain_to_form(phi), form)


class TestBoxSpectrum:
    """Test class for the eigenvalues of □ on symmetric forms."""

    @pytest.mark.parametrize("n, eigenvalues, dimensions", [
        (1, {"S2_0[-1]": 12, "S2_0[3]": 20, "Rg": 24}, {"S2_0[-1]": 9, "S2_0[3]": 0, "Rg": 1}),
        (2, {"S2_0[-1]": 16, "S2_0[3]": 24, "Rg": 32}, {"S2_0[-1]": 30, "S2_0[3]": 5, "Rg": 1}),
    ])
    def test_box_scalars(self, n, eigenvalues, dimensions):
        """Test □ = 4(n+2), 4(n+4), 8(n+2) on (S^2_0)[-1], (S^2_0)[3], Rg."""
        complex_ = KostantComplex(build_algebra(n))
        modules = complex_.box_spectrum_on_symmetric_forms(AdaptedFrame(n))
        by_name = {module.name: module for module in modules}
        for name, expected in eigenvalues.items():
            module = by_name[name]
            assert module.expected_eigenvalue == expected
            assert module.dimension == dimensions[name]
            assert module.passed
            if module.dimension:
                assert module.observed_eigenvalue == expected

    def test_empty_module_for_n1(self, complex1, caplog):
        """Test that the empty module at n = 1 is reported with a warning."""
        modules = complex1.box_spectrum_on_symmetric_forms(AdaptedFrame(1))
        empty = [module for module in modules if module.dimension == 0]
        assert [module.name for module in empty] == ["S2_0[3]"]
        assert "is empty" in caplog.text


class TestHarmonicSpaces:
    """Test class for harmonic spaces and the cohomology profile."""

    @pytest.mark.parametrize("n", [1, 2])
    def test_h1_2_vanishes(self, n):
        """Test ker □ = 0 on C^1_2."""
        assert KostantComplex(build_algebra(n)).harmonic_space(1, 2) == []

    def test_h2_profile_n1(self, complex1):
        """Test that H^2 lives in homogeneity one and two for n = 1."""
        profile = complex1.cohomology_profile(2)
        support = {block.homogeneity for block in profile if block.harmonic_dimension > 0}
        assert support == {1, 2}

    def test_h2_profile_n2(self, complex2):
        """Test that H^2 lives in homogeneity two only, on Λ^2 D* with values in g0, for n = 2."""
        profile = complex2.cohomology_profile(2)
        assert [block.homogeneity for block in profile] == [1, 2, 3, 4, 5, 6]
        support = {block.homogeneity for block in profile if block.harmonic_dimension > 0}
        assert support == {2}
        top = next(block for block in profile if block.homogeneity == 2)
        assert top.argument_types == ["DD"]
        assert top.value_degrees == [0]

    def test_h2_profile_n2_float(self, float_complex2):
        """Test that the float nullspace finds the same H^2 profile for n = 2."""
        profile = float_complex2.cohomology_profile(2, [1, 2, 3])
        dimensions = {block.homogeneity: block.harmonic_dimension for block in profile}
        assert dimensions[1] == 0
        assert dimensions[3] == 0
        assert dimensions[2] > 0

    def test_harmonic_cochains_are_closed_and_coclosed(self, complex1):
        """Test ∂φ = 0 and ∂*φ = 0 for harmonic φ."""
        for phi in complex1.harmonic_space(2, 1):
            assert differential(phi).is_zero()
            assert codifferential(phi).is_zero()


class TestInverseAndHodge:
    """Test class for □^-1 on C^1_2 and the Hodge split."""

    @pytest.mark.parametrize("n", [1, 2])
    def test_inverse_on_trace_part(self, n):
        """Test □^-1(c g) = c/(8(n+2)) g."""
        complex_ = KostantComplex(build_algebra(n))
        frame = AdaptedFrame(n)
        phi = form_to_cochain(complex_.algebra, frame.identity * 5)
        inverse = cochain_to_form(complex_.invert_box_on_C12(phi))
        assert frame.backend.allclose(inverse, frame.identity * Fraction(5, 8 * (n + 2)))

    def test_inverse_on_three_part(self, complex2, rng):
        """Test □^-1 = 1/(4(n+4)) on (S^2_0)[3] for n = 2."""
        frame = AdaptedFrame(2)
        a = frame.backend.array([[frame.backend.random_scalar(rng) for _ in range(8)] for _ in range(8)])
        symmetric = a + a.T
        symmetric = symmetric - frame.identity * (sum(symmetric[i, i] for i in range(8)) / 8)
        form = part_three(symmetric, frame)
        inverse = cochain_to_form(complex2.invert_box_on_C12(form_to_cochain(complex2.algebra, form)))
        assert frame.backend.allclose(inverse, form * Fraction(1, 24))

    def test_inverse_round_trip(self, complex1, rng):
        """Test □^-1(□ψ) = ψ."""
        psi = random_cochain(complex1, 1, 2, rng)
        assert complex1.invert_box_on_C12(laplacian(psi)).matches(psi)

    def test_hodge_split_of_exact_cochain(self, complex1, rng):
        """Test that φ = ∂β splits as (φ, 0)."""
        phi = differential(random_cochain(complex1, 0, 2, rng))
        d_part, c_part = complex1.hodge_split_C12(phi)
        assert d_part.matches(phi)
        assert c_part.is_zero()

    def test_hodge_split_of_coexact_cochain(self, complex1, rng):
        """Test that φ = ∂*ψ splits as (0, φ)."""
        phi = codifferential(random_cochain(complex1, 2, 2, rng))
        d_part, c_part = complex1.hodge_split_C12(phi)
        assert d_part.is_zero()
        assert c_part.matches(phi)

    def test_hodge_split_of_random_cochain(self, complex1, rng):
        """Test that the two parts of a random φ add up to φ."""
        phi = random_cochain(complex1, 1, 2, rng)
        d_part, c_part = complex1.hodge_split_C12(phi)
        assert (d_part + c_part).matches(phi)
