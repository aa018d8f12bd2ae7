from .exact_backend import ExactBackend
from .float_backend import FloatBackend


def get_backend(mode: str, tolerance: float = 1e-9):
    if mode == "exact":
        return ExactBackend(tolerance)
    elif mode == "float":
        return FloatBackend(tolerance)
    else:
        raise ValueError(f"Unsupported arithmetic mode: {mode}")
