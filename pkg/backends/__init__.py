"""
Arithmetic backends: exact rational and 64-bit float scalars with matching linear algebra.
"""
from .base import ArithmeticBackend
from .backend_factory import get_backend
