"""
Pointwise qc data: the torsion forms T0 and U, the qc scalar curvature and the curvature
R(e_a, e_b) of the Biquard connection on D, all expressed in one adapted frame.
"""
from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from backends import ArithmeticBackend, get_backend
from errors import InvalidInputError, InvalidQCDataError, MalformedEndomorphismError
from frame_algebra import AdaptedFrame, end0_decompose, h_basis, part_minus_one, part_three
from quaternion import Quaternion, quat_mul

logger = logging.getLogger(__name__)

JSON_KEYS = ("n", "I", "T0", "U", "scal", "R")


@dataclass(frozen=True, eq=False)
class QCPointData:
    """
    R[a, b] is the endomorphism R(e_a, e_b) of D as a 4n x 4n matrix; T0 and U are bilinear
    forms stored as F[a, b] = F(e_a, e_b)
    """
    n: int
    frame: AdaptedFrame
    T0: np.ndarray
    U: np.ndarray
    scal: object
    R: np.ndarray

    @property
    def backend(self) -> ArithmeticBackend:
        return self.frame.backend

    def curvature_tensor(self) -> np.ndarray:
        """
        The (0,4) tensor R(u, v, w, z) = g(R(u, v) w, z)
        """
        return self.R.transpose(0, 1, 3, 2)


@dataclass(frozen=True)
class RicciFamily:
    ric: np.ndarray
    tau: tuple
    scal: object


# Contractions

def ricci_tensor(R: np.ndarray) -> np.ndarray:
    """
    Ric(u, v) = sum_a R(e_a, u, v, e_a)
    """
    return sum(R[a, :, a, :] for a in range(R.shape[0]))


def tau_form(R: np.ndarray, s: int, frame: AdaptedFrame) -> np.ndarray:
    """
    τ_s with 4n τ_s(u, v) = sum_a g(R(e_a, I_s e_a) u, v)
    """
    structure = frame.I(s)
    contracted = frame.zeros("End0")
    for a, b in itertools.product(range(frame.dim), repeat=2):
        if not frame.backend.is_zero(structure[b, a]):
            contracted = contracted + R[a, b] * structure[b, a]
    return contracted.T / frame.dim


def ricci_family(data: QCPointData) -> RicciFamily:
    ric = ricci_tensor(data.R)
    tau = tuple(tau_form(data.R, s, data.frame) for s in range(1, 4))
    return RicciFamily(ric, tau, sum(ric[a, a] for a in range(data.frame.dim)))


def decompose_ricci(ric: np.ndarray, frame: AdaptedFrame) -> tuple:
    """
    Split Ric = (2n+2) T0 + (4n+10) U + (scal/4n) g along the Casimir eigenspaces
    :return: (T0, U, scal) read off from the symmetric part of Ric
    """
    n = frame.n
    symmetric = (ric + ric.T) / 2
    scal = sum(symmetric[a, a] for a in range(frame.dim))
    trace_free = symmetric - frame.identity * (scal / frame.dim)
    t0 = part_minus_one(trace_free, frame) / (2 * n + 2)
    u = part_three(trace_free, frame) / (4 * n + 10)
    return t0, u, scal


def tau_from_torsion(t0: np.ndarray, scal, s: int, frame: AdaptedFrame) -> np.ndarray:
    """
    τ_s(u, v) = (n+2)/2n (T0(u, I_s v) - T0(I_s u, v)) + scal/(8n(n+2)) g(u, I_s v)
    """
    n = frame.n
    structure = frame.I(s)
    torsion_part = (t0 @ structure - structure.T @ t0) * frame.backend.scalar(Fraction(n + 2, 2 * n))
    return torsion_part + structure * (scal / (8 * n * (n + 2)))


def data_from_curvature(frame: AdaptedFrame, R: np.ndarray) -> QCPointData:
    """
    Build QCPointData whose torsion and scalar curvature are read off from Ric of R
    """
    t0, u, scal = decompose_ricci(ricci_tensor(R), frame)
    return QCPointData(frame.n, frame, t0, u, scal, R)


# Generator

def _constraints(R: np.ndarray, frame: AdaptedFrame) -> list:
    ric = ricci_tensor(R)
    values = [ric[u, v] - ric[v, u] for u, v in itertools.combinations(range(frame.dim), 2)]
    t0, u, scal = decompose_ricci(ric, frame)
    if frame.n == 1:
        values.extend(u.flat)
    for s in range(1, 4):
        values.extend((tau_form(R, s, frame) - tau_from_torsion(t0, scal, s, frame)).flat)
    return values


@lru_cache(maxsize=None)
def _curvature_kernel(n: int) -> tuple:
    """
    Basis of the curvature values R in Λ²D* x (sp(1) + sp(n)) whose Ricci tensor is symmetric,
    whose U vanishes for n = 1 and whose τ_s follow from T0 and scal; exact arithmetic
    """
    frame = AdaptedFrame(n, get_backend("exact"))
    pairs = list(itertools.combinations(range(frame.dim), 2))
    endomorphisms = h_basis(frame)
    columns = list(itertools.product(range(len(pairs)), range(len(endomorphisms))))
    matrix = {}
    for column, (p, k) in enumerate(columns):
        a, b = pairs[p]
        R = frame.backend.zeros((frame.dim,) * 4)
        R[a, b] = endomorphisms[k]
        R[b, a] = -endomorphisms[k]
        for row, value in enumerate(_constraints(R, frame)):
            if value != 0:
                matrix.setdefault(row, {})[column] = value
    rows = max(matrix) + 1 if matrix else 0
    kernel = frame.backend.nullspace(matrix, (rows, len(columns)))
    logger.debug(f"Curvature space for n={n}: {len(columns)} unknowns, kernel dimension {len(kernel)}")
    basis = []
    for vector in kernel:
        blocks = {}
        for column, value in enumerate(vector):
            if value != 0:
                blocks.setdefault(columns[column][0], []).append((columns[column][1], value))
        basis.append(blocks)
    return tuple(pairs), tuple(basis)


def generate_consistent_data(n: int, seed: int, backend: ArithmeticBackend | None = None) -> QCPointData:
    """
    Random QCPointData that passes validate: a random element of the constrained curvature
    space, with T0, U and scal read off from its Ricci tensor
    :param n: Quaternionic dimension
    :param seed: Seed of the numpy random generator
    :param backend: Arithmetic of the returned data, exact by default; values are drawn exactly
    """
    backend = backend if backend is not None else get_backend("exact")
    exact = AdaptedFrame(n, get_backend("exact"))
    pairs, basis = _curvature_kernel(n)
    endomorphisms = h_basis(exact)
    rng = np.random.default_rng(seed)
    R = exact.backend.zeros((exact.dim,) * 4)
    for blocks in basis:
        coefficient = Fraction(int(rng.integers(-3, 4)))
        if coefficient == 0:
            continue
        for p, terms in blocks.items():
            a, b = pairs[p]
            value = sum(endomorphisms[k] * (v * coefficient) for k, v in terms)
            R[a, b] = R[a, b] + value
            R[b, a] = R[b, a] - value
    frame = AdaptedFrame(n, backend)
    return data_from_curvature(frame, backend.array(R))


# Transformations

def scale_data(data: QCPointData, factor) -> QCPointData:
    factor = data.backend.scalar(factor)
    return replace(data, T0=data.T0 * factor, U=data.U * factor, scal=data.scal * factor, R=data.R * factor)


def sp_n_rotation(frame: AdaptedFrame) -> np.ndarray:
    """
    A rational element of Sp(n): right multiplication by the unit quaternion (1 + 2i + 2j + 4k)/5
    on every quaternionic block, followed for n >= 2 by a rotation mixing the first two blocks
    """
    backend = frame.backend
    unit = Quaternion(*(backend.scalar(Fraction(c, 5)) for c in (1, 2, 2, 4)))
    block = backend.zeros((4, 4))
    for j in range(4):
        image = quat_mul(Quaternion.unit(j, backend.one), unit)
        for i in range(4):
            block[i, j] = image.component(i)
    rotation = backend.zeros((frame.dim, frame.dim))
    for alpha in range(frame.n):
        rotation[4 * alpha:4 * alpha + 4, 4 * alpha:4 * alpha + 4] = block
    if frame.n >= 2:
        mixing = backend.identity(frame.dim)
        cos, sin = backend.scalar(Fraction(3, 5)), backend.scalar(Fraction(4, 5))
        for i in range(4):
            mixing[i, i], mixing[i, 4 + i] = cos, -sin
            mixing[4 + i, i], mixing[4 + i, 4 + i] = sin, cos
        rotation = mixing @ rotation
    return rotation


def rotate_tensor(t: np.ndarray, rotation: np.ndarray) -> np.ndarray:
    """
    Components of a covariant 4-tensor in the frame e'_a = O e_a
    """
    o = rotation
    result = np.tensordot(o, t, axes=([0], [0]))
    result = np.tensordot(o, result, axes=([0], [1])).transpose(1, 0, 2, 3)
    return o.T @ result @ o


def rotate_data(data: QCPointData, rotation: np.ndarray) -> QCPointData:
    """
    Express the data in the frame e'_a = O e_a for an orthogonal O commuting with every I_s
    """
    o = rotation
    return replace(data, T0=o.T @ data.T0 @ o, U=o.T @ data.U @ o, R=rotate_tensor(data.R, o))


# Validation

def _require(condition: bool, invariant: str, message: str):
    if not condition:
        raise InvalidQCDataError(invariant, message)


def validate(data: QCPointData):
    """
    Check every invariant of QCPointData
    :raises InvalidQCDataError: naming the first violated invariant
    """
    frame, backend = data.frame, data.backend
    dim = frame.dim
    _require(frame.n == data.n, "frame", f"Frame has n={frame.n}, data has n={data.n}")
    _require(data.T0.shape == (dim, dim) and data.U.shape == (dim, dim) and data.R.shape == (dim,) * 4,
             "shape", f"Tensors do not match the dimension 4n={dim}")
    for name, form, eigenvalue in (("T0", data.T0, -1), ("U", data.U, 3)):
        _require(backend.allclose(form, form.T), f"{name}-symmetric", f"{name} is not symmetric")
        _require(backend.is_zero(sum(form[a, a] for a in range(dim))), f"{name}-trace-free",
                 f"{name} is not trace-free")
        casimir_image = sum(frame.I(s).T @ form @ frame.I(s) for s in range(1, 4))
        _require(backend.allclose(casimir_image, form * eigenvalue), f"{name}-casimir",
                 f"{name} is not in the Casimir eigenspace {eigenvalue}")
    if data.n == 1:
        _require(backend.all_zero(data.U), "U-zero-for-n1", "U must vanish for n=1")
    for a, b in itertools.combinations_with_replacement(range(dim), 2):
        _require(backend.allclose(data.R[a, b], -data.R[b, a]), "R-antisymmetric",
                 f"R(e_{a + 1}, e_{b + 1}) != -R(e_{b + 1}, e_{a + 1})")
        try:
            q0, _, _ = end0_decompose(data.R[a, b], frame)
        except MalformedEndomorphismError as e:
            raise InvalidQCDataError("R-holonomy", f"R(e_{a + 1}, e_{b + 1}) is not in sp(1)+sp(n): {e}")
        _require(backend.is_zero(q0), "R-holonomy", f"R(e_{a + 1}, e_{b + 1}) has a trace part")
    family = ricci_family(data)
    expected = data.T0 * (2 * data.n + 2) + data.U * (4 * data.n + 10) + frame.identity * (data.scal / dim)
    _require(backend.allclose(family.ric, expected), "ricci-decomposition",
             "Ric != (2n+2) T0 + (4n+10) U + (scal/4n) g")
    for s in range(1, 4):
        _require(backend.allclose(family.tau[s - 1], tau_from_torsion(data.T0, data.scal, s, frame)),
                 "tau-identity", f"τ_{s} does not follow from T0 and scal")


# JSON

def to_json(data: QCPointData) -> dict:
    backend = data.backend
    return {
        "n": data.n,
        "I": [backend.encode_array(data.frame.I(s)) for s in range(1, 4)],
        "T0": backend.encode_array(data.T0),
        "U": backend.encode_array(data.U),
        "scal": backend.encode(data.scal),
        "R": backend.encode_array(data.R),
    }


def from_json(document: dict, backend: ArithmeticBackend | None = None) -> QCPointData:
    """
    Read QCPointData from its JSON document; the data is not validated here
    :raises InvalidInputError: if a key is missing or a value has the wrong shape
    :raises InvalidQCDataError: if the quaternionic triple is not the one of the adapted frame
    """
    backend = backend if backend is not None else get_backend("exact")
    missing = [key for key in JSON_KEYS if key not in document]
    if missing:
        raise InvalidInputError(f"QC data document is missing {', '.join(missing)}")
    n = document["n"]
    if not isinstance(n, int) or n < 1:
        raise InvalidInputError(f"Invalid n in QC data document: {n}")
    frame = AdaptedFrame(n, backend)
    dim = frame.dim
    try:
        triple = [backend.decode_array(m) for m in document["I"]]
        t0 = backend.decode_array(document["T0"])
        u = backend.decode_array(document["U"])
        scal = backend.scalar(document["scal"])
        R = backend.decode_array(document["R"])
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise InvalidInputError(f"Malformed value in QC data document: {e}")
    if len(triple) != 3 or any(m.shape != (dim, dim) for m in triple):
        raise InvalidInputError("I must hold three 4n x 4n matrices")
    if t0.shape != (dim, dim) or u.shape != (dim, dim) or R.shape != (dim,) * 4:
        raise InvalidInputError(f"Tensors do not match n={n}")
    for s in range(1, 4):
        _require(backend.allclose(triple[s - 1], frame.I(s)), "frame",
                 f"I_{s} is not the complex structure of the adapted frame")
    return QCPointData(n, frame, t0, u, scal, R)


def read_json(path: str, backend: ArithmeticBackend | None = None) -> QCPointData:
    try:
        with open(path) as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{path} is not valid JSON: {e}")
    return from_json(document, backend)


def write_json(data: QCPointData, path: str):
    with open(path, "w") as f:
        json.dump(to_json(data), f, sort_keys=True, indent=4)
