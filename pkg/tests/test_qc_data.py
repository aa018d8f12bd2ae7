import json
from dataclasses import replace
from fractions import Fraction

import pytest

from backends import get_backend
from errors import InvalidInputError, InvalidQCDataError
from qc_data import (decompose_ricci, from_json, generate_consistent_data, read_json, ricci_family, rotate_data,
                     scale_data, sp_n_rotation, tau_from_torsion, to_json, validate, write_json)


@pytest.fixture(scope="module")
def data1():
    """Fixture to provide consistent exact data for n = 1."""
    return generate_consistent_data(1, 7)


@pytest.fixture(scope="module")
def data2():
    """Fixture to provide consistent exact data for n = 2."""
    return generate_consistent_data(2, 7)


def _invariant(data) -> str:
    with pytest.raises(InvalidQCDataError) as error:
        validate(data)
    return error.value.invariant


class TestGenerator:
    """Test class for generate_consistent_data."""

    @pytest.mark.parametrize("n, seed", [(1, 0), (1, 1), (2, 0), (2, 3)])
    def test_generated_data_is_valid(self, n, seed):
        """Test that generated data passes every invariant."""
        validate(generate_consistent_data(n, seed))

    def test_float_data_is_valid(self):
        """Test that the float rendition of generated data is valid within tolerance."""
        data = generate_consistent_data(2, 11, get_backend("float"))
        assert data.backend.mode == "float"
        validate(data)

    def test_same_seed_same_data(self):
        """Test that the generator is deterministic."""
        first, second = generate_consistent_data(1, 5), generate_consistent_data(1, 5)
        assert first.backend.allclose(first.R, second.R)
        assert first.scal == second.scal

    def test_u_vanishes_for_n1(self, data1):
        """Test that U = 0 in dimension 7."""
        assert data1.backend.all_zero(data1.U)

    def test_data_is_not_trivial(self, data2):
        """Test that a random data set carries curvature and torsion."""
        assert not data2.backend.all_zero(data2.R)
        assert not data2.backend.all_zero(data2.T0) or not data2.backend.all_zero(data2.U)


class TestRicciFamily:
    """Test class for the Ricci contractions."""

    def test_decomposition_recovers_torsion(self, data2):
        """Test that T0, U and scal are read back from Ric."""
        t0, u, scal = decompose_ricci(ricci_family(data2).ric, data2.frame)
        assert data2.backend.allclose(t0, data2.T0)
        assert data2.backend.allclose(u, data2.U)
        assert scal == data2.scal

    def test_tau_identity(self, data1):
        """Test that τ_s follows from T0 and scal."""
        family = ricci_family(data1)
        for s in range(1, 4):
            expected = tau_from_torsion(data1.T0, data1.scal, s, data1.frame)
            assert data1.backend.allclose(family.tau[s - 1], expected)


class TestValidate:
    """Test class for validate, each test breaking one invariant."""

    def test_asymmetric_torsion(self, data1):
        """Test that a non-symmetric T0 is rejected."""
        t0 = data1.T0.copy()
        t0[0, 1] = t0[0, 1] + 1
        assert _invariant(replace(data1, T0=t0)) == "T0-symmetric"

    def test_torsion_with_trace(self, data1):
        """Test that T0 with a trace part is rejected."""
        assert _invariant(replace(data1, T0=data1.T0 + data1.frame.identity)) == "T0-trace-free"

    def test_u_outside_its_eigenspace(self, data1):
        """Test that U must lie in the 3-eigenspace of the Casimir, which is zero for n = 1."""
        u = data1.frame.zeros("End0")
        u[0, 0], u[1, 1] = Fraction(1), Fraction(-1)
        assert _invariant(replace(data1, U=u)) == "U-casimir"

    def test_curvature_not_antisymmetric(self, data1):
        """Test that R(e_1, e_2) != -R(e_2, e_1) is rejected."""
        R = data1.R.copy()
        R[0, 1] = R[0, 1] + data1.frame.I(1)
        assert _invariant(replace(data1, R=R)) == "R-antisymmetric"

    def test_curvature_with_trace(self, data1):
        """Test that R(u, v) must lie in sp(1) + sp(n)."""
        R = data1.R.copy()
        R[0, 1] = R[0, 1] + data1.frame.identity
        R[1, 0] = R[1, 0] - data1.frame.identity
        assert _invariant(replace(data1, R=R)) == "R-holonomy"

    def test_wrong_scalar_curvature(self, data2):
        """Test that scal must agree with the trace of Ric."""
        assert _invariant(replace(data2, scal=data2.scal + 1)) == "ricci-decomposition"

    def test_error_is_invalid_input(self, data1):
        """Test that invalid qc data is reported as invalid input."""
        with pytest.raises(InvalidInputError):
            validate(replace(data1, scal=data1.scal + 1))


class TestTransformations:
    """Test class for scaling and Sp(n) rotations of the data."""

    @pytest.mark.parametrize("n", [1, 2])
    def test_rotation_commutes_with_structures(self, n, data1, data2):
        """Test that the rotation is orthogonal and commutes with I_1, I_2, I_3."""
        data = data1 if n == 1 else data2
        frame = data.frame
        o = sp_n_rotation(frame)
        assert frame.backend.allclose(o.T @ o, frame.identity)
        for s in range(1, 4):
            assert frame.backend.allclose(o @ frame.I(s), frame.I(s) @ o)

    @pytest.mark.parametrize("n", [1, 2])
    def test_rotated_data_is_valid(self, n, data1, data2):
        """Test that rotated data stays consistent."""
        data = data1 if n == 1 else data2
        validate(rotate_data(data, sp_n_rotation(data.frame)))

    def test_scaled_data_is_valid(self, data2):
        """Test that scaled data stays consistent and scales linearly."""
        scaled = scale_data(data2, 3)
        validate(scaled)
        assert scaled.scal == 3 * data2.scal
        assert data2.backend.allclose(scaled.R, data2.R * 3)


class TestJson:
    """Test class for the JSON document of qc data."""

    def test_round_trip(self, data2):
        """Test that a document survives json serialization with exact values."""
        document = json.loads(json.dumps(to_json(data2)))
        restored = from_json(document)
        assert restored.n == 2
        assert restored.scal == data2.scal
        assert data2.backend.allclose(restored.R, data2.R)
        assert data2.backend.allclose(restored.T0, data2.T0)
        validate(restored)

    def test_exact_values_are_strings_or_ints(self, data1):
        """Test that non-integral fractions are written as p/q strings."""
        document = to_json(scale_data(data1, Fraction(1, 7)))
        flat = [v for row in document["T0"] for v in row]
        assert all(isinstance(v, (int, str)) for v in flat)

    def test_missing_key(self, data1):
        """Test that a document without R is rejected."""
        document = to_json(data1)
        del document["R"]
        with pytest.raises(InvalidInputError, match="missing R"):
            from_json(document)

    @pytest.mark.parametrize("n", [0, -1, "2"])
    def test_invalid_n(self, data1, n):
        """Test that n must be a positive integer."""
        document = to_json(data1)
        document["n"] = n
        with pytest.raises(InvalidInputError):
            from_json(document)

    def test_wrong_shape(self, data1):
        """Test that T0 must be 4n x 4n."""
        document = to_json(data1)
        document["T0"] = document["T0"][:2]
        with pytest.raises(InvalidInputError):
            from_json(document)

    def test_foreign_quaternionic_structure(self, data1):
        """Test that the triple I must be the one of the adapted frame."""
        document = to_json(data1)
        document["I"][0] = data1.backend.encode_array(-data1.frame.I(1))
        with pytest.raises(InvalidQCDataError) as error:
            from_json(document)
        assert error.value.invariant == "frame"

    def test_file_round_trip(self, data1, tmp_path):
        """Test write_json followed by read_json."""
        path = str(tmp_path / "data.json")
        write_json(data1, path)
        restored = read_json(path)
        assert data1.backend.allclose(restored.R, data1.R)

    def test_read_invalid_json(self, tmp_path):
        """Test that a file that is not JSON is rejected."""
        path = tmp_path / "broken.json"
        path.write_text("{ not json")
        with pytest.raises(InvalidInputError):
            read_json(str(path))
