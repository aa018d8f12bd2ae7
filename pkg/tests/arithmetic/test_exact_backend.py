from fractions import Fraction

import numpy as np
import pytest

from backends.exact_backend import ExactBackend
from errors import InconsistentSystemError, SingularSystemError


@pytest.fixture
def backend():
    """Fixture to provide a fresh exact backend for each test."""
    return ExactBackend()


def test_scalar_conversion(backend):
    """Test conversion of ints, floats, numpy integers and p/q strings to fractions."""
    assert backend.scalar(3) == Fraction(3)
    assert backend.scalar(0.5) == Fraction(1, 2)
    assert backend.scalar(np.int64(-2)) == Fraction(-2)
    assert backend.scalar("3/4") == Fraction(3, 4)
    assert isinstance(backend.scalar(1), Fraction)


def test_encode(backend):
    """Test that integers stay integers and other fractions become p/q strings."""
    assert backend.encode(Fraction(4, 2)) == 2
    assert backend.encode(Fraction(-1, 3)) == "-1/3"


def test_encode_decode_array(backend):
    """Test that an encoded array decodes to the same values."""
    values = backend.array([[Fraction(1, 2), 0], [3, Fraction(-7, 5)]])
    assert backend.allclose(backend.decode_array(backend.encode_array(values)), values)


def test_rank_and_nullspace(backend):
    """Test the kernel of a rank-one 2x3 matrix."""
    matrix = {0: {0: 1, 1: 2, 2: 3}, 1: {0: 2, 1: 4, 2: 6}}
    assert backend.rank(matrix, (2, 3)) == 1
    kernel = backend.nullspace(matrix, (2, 3))
    assert len(kernel) == 2
    for vector in kernel:
        assert vector[0] + 2 * vector[1] + 3 * vector[2] == 0


def test_nullspace_of_empty_matrix(backend):
    """Test that a matrix without nonzero entries has the full space as kernel."""
    assert len(backend.nullspace({}, (2, 3))) == 3


def test_solve(backend):
    """Test an exactly solvable 2x2 system."""
    matrix = {0: {0: 2, 1: 1}, 1: {0: 1, 1: 3}}
    assert backend.solve(matrix, (2, 2), [3, 5]) == [Fraction(4, 5), Fraction(7, 5)]


def test_solve_singular(backend):
    """Test that a rank-deficient system raises SingularSystemError."""
    matrix = {0: {0: 1, 1: 1}, 1: {0: 2, 1: 2}}
    with pytest.raises(SingularSystemError):
        backend.solve(matrix, (2, 2), [1, 2])


def test_solve_inconsistent(backend):
    """Test that an inconsistent system raises InconsistentSystemError."""
    matrix = {0: {0: 1, 1: 1}, 1: {0: 1, 1: 1}}
    with pytest.raises(InconsistentSystemError):
        backend.solve_particular(matrix, (2, 2), [1, 2])


def test_random_scalar_is_deterministic(backend):
    """Test that equal seeds give equal random scalars."""
    first = [backend.random_scalar(np.random.default_rng(7)) for _ in range(3)]
    second = [backend.random_scalar(np.random.default_rng(7)) for _ in range(3)]
    assert first == second
