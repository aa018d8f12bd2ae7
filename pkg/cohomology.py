"""
Lie algebra cochains C^q(g-, g) with the differential, the Kostant codifferential and the
Kostant Laplacian, organized in blocks of fixed degree q and homogeneity l.

A q-cochain is stored sparsely on sorted q-tuples of g- basis indices, its values as sparse
coordinates against the basis of g. Operators act by pushing every stored value forward to
the argument tuples it contributes to, so no operator loops over all argument tuples.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from errors import DegreeError, DimensionMismatchError
from frame_algebra import part_minus_one, part_three
from graded_algebra import DEGREES, GradedAlgebra

logger = logging.getLogger(__name__)


def _permutation_sign(values) -> int:
    """
    Sign of the permutation sorting the given distinct values
    """
    sign = 1
    values = list(values)
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if values[i] > values[j]:
                sign = -sign
    return sign


class Cochain(object):
    """
    Alternating q-linear map g- x ... x g- -> g.
    values maps a strictly increasing tuple of g- indices to {basis index of g: coefficient}.
    """
    __slots__ = ("algebra", "q", "values")

    def __init__(self, algebra: GradedAlgebra, q: int, values: dict | None = None):
        if q < 0:
            raise DegreeError(f"Cochain degree must be >= 0, got {q}")
        self.algebra = algebra
        self.q = q
        self.values = {}
        negative = algebra.negative_indices
        backend = algebra.backend
        for key, value in (values or {}).items():
            key = tuple(key)
            if len(key) != q:
                raise DimensionMismatchError(f"Argument tuple {key} does not fit a {q}-cochain")
            if any(i not in negative for i in key) or list(key) != sorted(set(key)):
                raise DegreeError(f"Argument tuple {key} is not an increasing tuple of g- indices")
            cleaned = {k: v for k, v in value.items() if not backend.is_zero(v)}
            if cleaned:
                self.values[key] = cleaned

    @staticmethod
    def zero(algebra: GradedAlgebra, q: int) -> Cochain:
        return Cochain(algebra, q)

    @property
    def backend(self):
        return self.algebra.backend

    def is_zero(self) -> bool:
        return not self.values

    def evaluate(self, args) -> dict:
        """
        Evaluate on g- basis indices in any order
        :param args: Sequence of q basis indices of g-
        :return: Sparse coordinates of the value in g
        """
        args = tuple(args)
        if len(args) != self.q:
            raise DimensionMismatchError(f"A {self.q}-cochain takes {self.q} arguments, got {len(args)}")
        if len(set(args)) < len(args):
            return {}
        value = self.values.get(tuple(sorted(args)), {})
        if _permutation_sign(args) > 0:
            return dict(value)
        return {k: -v for k, v in value.items()}

    def homogeneities(self) -> set[int]:
        degrees = self.algebra.degrees_by_index
        result = set()
        for key, value in self.values.items():
            weight = sum(degrees[i] for i in key)
            result.update(degrees[k] - weight for k in value)
        return result

    def component(self, homogeneity: int) -> Cochain:
        degrees = self.algebra.degrees_by_index
        result = {}
        for key, value in self.values.items():
            weight = sum(degrees[i] for i in key)
            part = {k: v for k, v in value.items() if degrees[k] - weight == homogeneity}
            if part:
                result[key] = part
        return Cochain(self.algebra, self.q, result)

    def _combine(self, other: Cochain, factor) -> Cochain:
        if other.algebra is not self.algebra or other.q != self.q:
            raise DimensionMismatchError("Cochains belong to different spaces")
        result = {key: dict(value) for key, value in self.values.items()}
        for key, value in other.values.items():
            target = result.setdefault(key, {})
            for k, v in value.items():
                target[k] = target.get(k, 0) + v * factor
        return Cochain(self.algebra, self.q, result)

    def __add__(self, other: Cochain) -> Cochain:
        return self._combine(other, 1)

    def __sub__(self, other: Cochain) -> Cochain:
        return self._combine(other, -1)

    def __neg__(self) -> Cochain:
        return self.scale(-1)

    def scale(self, factor) -> Cochain:
        return Cochain(self.algebra, self.q,
                       {key: {k: v * factor for k, v in value.items()} for key, value in self.values.items()})

    def matches(self, other: Cochain) -> bool:
        """
        Equality up to the tolerance of the backend (exact equality in exact mode)
        """
        return (self - other).is_zero()

    def max_abs(self) -> float:
        return max((float(abs(v)) for value in self.values.values() for v in value.values()), default=0.0)

    def __repr__(self):
        return f"Cochain(q={self.q}, entries={sum(len(v) for v in self.values.values())})"


def _accumulate(result: dict, key: tuple, value: dict, factor):
    target = result.setdefault(key, {})
    for k, v in value.items():
        target[k] = target.get(k, 0) + v * factor


@dataclass(frozen=True)
class _BracketTables:
    # k -> [(a, b, c)] with a < b in g- and [e_a, e_b] = c e_k + ...
    lower: dict
    # (i, k) -> [(x, c)] with [e^i, e_x]_- = c e_k + ...
    dual_lowering: dict
    half: object


@lru_cache(maxsize=None)
def _tables(algebra: GradedAlgebra) -> _BracketTables:
    negative = list(algebra.negative_indices)
    lower = {}
    for a, b in itertools.combinations(negative, 2):
        for k, c in algebra.bracket_basis(a, b).items():
            lower.setdefault(k, []).append((a, b, c))
    dual_lowering = {}
    for i in negative:
        dual = algebra.dual_index(i)
        for x in negative:
            for k, c in algebra.bracket_basis(dual, x).items():
                if k in algebra.negative_indices:
                    dual_lowering.setdefault((i, k), []).append((x, c))
    return _BracketTables(lower, dual_lowering, algebra.backend.scalar(Fraction(1, 2)))


def _insert(key: tuple, index: int) -> tuple[tuple, int]:
    target = tuple(sorted(key + (index,)))
    return target, target.index(index)


def differential(phi: Cochain) -> Cochain:
    """
    Chevalley-Eilenberg differential of g- with values in g
        (∂φ)(X_0..X_q) = sum_i (-1)^i [X_i, φ(..^i..)] + sum_{i<j} (-1)^{i+j} φ([X_i, X_j], ..^i..^j..)
    """
    algebra = phi.algebra
    one = algebra.backend.one
    tables = _tables(algebra)
    result = {}
    for key, value in phi.values.items():
        for j in algebra.negative_indices:
            if j in key:
                continue
            target, position = _insert(key, j)
            _accumulate(result, target, algebra.bracket_coordinates({j: one}, value), (-1) ** position)
        for position_k, k in enumerate(key):
            rest = key[:position_k] + key[position_k + 1:]
            sign_k = (-1) ** position_k
            for a, b, c in tables.lower.get(k, ()):
                if a in rest or b in rest:
                    continue
                target = tuple(sorted(rest + (a, b)))
                i, j = target.index(a), target.index(b)
                _accumulate(result, target, value, c * ((-1) ** (i + j) * sign_k))
    return Cochain(algebra, phi.q + 1, result)


def codifferential(phi: Cochain) -> Cochain:
    """
    Kostant codifferential
        (∂*φ)(X_1..X_q) = sum_i [e^i, φ(e_i, X_1..X_q)]
                          - 1/2 sum_i sum_j (-1)^j φ([e^i, X_j]_-, e_i, X_1..^j..X_q)
    with e_i running over the basis of g- and e^i over its B-dual basis of p+
    :raises DegreeError: if φ is a 0-cochain
    """
    if phi.q == 0:
        raise DegreeError("The codifferential of a 0-cochain is not defined")
    algebra = phi.algebra
    one = algebra.backend.one
    tables = _tables(algebra)
    result = {}
    for key, value in phi.values.items():
        for position, i in enumerate(key):
            rest = key[:position] + key[position + 1:]
            bracket = algebra.bracket_coordinates({algebra.dual_index(i): one}, value)
            _accumulate(result, rest, bracket, (-1) ** position)
        if phi.q < 2:
            continue
        for k, i in itertools.permutations(key, 2):
            rest = tuple(x for x in key if x not in (k, i))
            sign = _permutation_sign((k, i) + rest)
            for x, c in tables.dual_lowering.get((i, k), ()):
                if x in rest:
                    continue
                target, position = _insert(rest, x)
                factor = -tables.half * c * ((-1) ** (position + 1) * sign)
                _accumulate(result, target, value, factor)
    return Cochain(algebra, phi.q - 1, result)


def laplacian(phi: Cochain) -> Cochain:
    """
    Kostant Laplacian □ = ∂*∂ + ∂∂*
    """
    result = codifferential(differential(phi))
    if phi.q > 0:
        result = result + differential(codifferential(phi))
    return result


def act_on_cochain(a: dict, phi: Cochain) -> Cochain:
    """
    Infinitesimal action of A in g0 on a cochain: (A.φ)(X..) = [A, φ(X..)] - sum_j φ(.., [A, X_j], ..)
    :param a: Sparse coordinates of an element of g0
    :raises DegreeError: if A has components outside of g0
    """
    algebra = phi.algebra
    if any(algebra.degrees_by_index[i] != 0 for i in a):
        raise DegreeError("Only elements of g0 act on cochains")
    one = algebra.backend.one
    # x -> [(y, c)] with [A, e_y] = c e_x + ...
    preimages = {}
    for y in algebra.negative_indices:
        for x, c in algebra.bracket_coordinates(a, {y: one}).items():
            preimages.setdefault(x, []).append((y, c))
    result = {}
    for key, value in phi.values.items():
        _accumulate(result, key, algebra.bracket_coordinates(a, value), 1)
        for position, x in enumerate(key):
            for y, c in preimages.get(x, ()):
                replaced = key[:position] + (y,) + key[position + 1:]
                if len(set(replaced)) < len(replaced):
                    continue
                _accumulate(result, tuple(sorted(replaced)), value, -c * _permutation_sign(replaced))
    return Cochain(algebra, phi.q, result)


# Symmetric and bilinear forms as cochains in C^1_2

def form_to_cochain(algebra: GradedAlgebra, form) -> Cochain:
    """
    The 1-cochain e_a -> sum_b F(e_a, e_b) e^b, zero on g-2
    """
    values = {}
    for a in range(4 * algebra.n):
        value = {algebra.dstar_index(b): form[a, b] for b in range(4 * algebra.n)}
        values[(algebra.d_index(a),)] = value
    return Cochain(algebra, 1, values)


def cochain_to_form(phi: Cochain):
    """
    Inverse of form_to_cochain on the D-part; the g-2 part is ignored
    """
    algebra = phi.algebra
    dim = 4 * algebra.n
    form = algebra.backend.zeros((dim, dim))
    for a in range(dim):
        value = phi.evaluate((algebra.d_index(a),))
        for b in range(dim):
            form[a, b] = value.get(algebra.dstar_index(b), algebra.backend.zero)
    return form


class CochainSpace(object):
    """
    The block C^q_l: q-cochains whose values on arguments of degrees i_1..i_q lie in
    g_{l + i_1 + ... + i_q}. The basis is indexed by pairs (argument tuple, basis index of g).
    """

    def __init__(self, algebra: GradedAlgebra, q: int, homogeneity: int):
        self.algebra = algebra
        self.q = q
        self.homogeneity = homogeneity
        degrees = algebra.degrees_by_index
        self.basis = []
        for key in itertools.combinations(algebra.negative_indices, q):
            degree = homogeneity + sum(degrees[i] for i in key)
            if degree in DEGREES:
                self.basis.extend((key, k) for k in algebra.indices(degree))
        self.position = {element: index for index, element in enumerate(self.basis)}

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def basis_cochain(self, index: int) -> Cochain:
        key, k = self.basis[index]
        return Cochain(self.algebra, self.q, {key: {k: self.algebra.backend.one}})

    def vector(self, phi: Cochain) -> list:
        """
        Coordinates of a cochain in this block
        :raises DegreeError: if φ has components outside of the block
        """
        if phi.q != self.q:
            raise DegreeError(f"A {phi.q}-cochain is not in C^{self.q}")
        result = [self.algebra.backend.zero] * self.dimension
        for key, value in phi.values.items():
            for k, v in value.items():
                index = self.position.get((key, k))
                if index is None:
                    raise DegreeError(f"Cochain has a component outside of C^{self.q}_{self.homogeneity}")
                result[index] = v
        return result

    def cochain(self, vector) -> Cochain:
        values = {}
        for (key, k), v in zip(self.basis, vector):
            values.setdefault(key, {})[k] = v
        return Cochain(self.algebra, self.q, values)

    def argument_types(self, phi: Cochain) -> set[str]:
        """
        Argument types (strings over V and D) carrying a nonzero value, for example {"DD"}
        """
        degrees = self.algebra.degrees_by_index
        return {"".join("V" if degrees[i] == -2 else "D" for i in key) for key in phi.values}


@dataclass
class CohomologyBlock:
    q: int
    homogeneity: int
    dimension: int
    harmonic_dimension: int
    argument_types: list = field(default_factory=list)
    value_degrees: list = field(default_factory=list)


@dataclass
class BoxModule:
    name: str
    expected_eigenvalue: int
    observed_eigenvalue: object
    dimension: int
    expected_dimension: int
    passed: bool


class KostantComplex(object):
    """
    Block-wise matrices of ∂, ∂* and □ for one algebra, cached per block
    """

    def __init__(self, algebra: GradedAlgebra):
        self.algebra = algebra
        self.backend = algebra.backend
        self.logger = logging.getLogger(__name__)
        self._spaces = {}
        self._boxes = {}

    def space(self, q: int, homogeneity: int) -> CochainSpace:
        if (q, homogeneity) not in self._spaces:
            self._spaces[(q, homogeneity)] = CochainSpace(self.algebra, q, homogeneity)
        return self._spaces[(q, homogeneity)]

    def operator_matrix(self, operator, source: CochainSpace, target: CochainSpace) -> tuple[dict, tuple]:
        """
        Materialize a linear operator between two blocks
        :param operator: Function Cochain -> Cochain
        :return: Sparse matrix {row: {column: value}} and its shape (target dim, source dim)
        """
        matrix = {}
        for column in range(source.dimension):
            image = target.vector(operator(source.basis_cochain(column)))
            for row, value in enumerate(image):
                if not self.backend.is_zero(value):
                    matrix.setdefault(row, {})[column] = value
        return matrix, (target.dimension, source.dimension)

    def differential_matrix(self, q: int, homogeneity: int) -> tuple[dict, tuple]:
        return self.operator_matrix(differential, self.space(q, homogeneity), self.space(q + 1, homogeneity))

    def codifferential_matrix(self, q: int, homogeneity: int) -> tuple[dict, tuple]:
        """
        ∂*: C^q_l -> C^{q-1}_l
        """
        return self.operator_matrix(codifferential, self.space(q, homogeneity), self.space(q - 1, homogeneity))

    def box_matrix(self, q: int, homogeneity: int) -> tuple[dict, tuple]:
        key = (q, homogeneity)
        if key not in self._boxes:
            space = self.space(q, homogeneity)
            self._boxes[key] = self.operator_matrix(laplacian, space, space)
            self.logger.debug(f"Assembled box on C^{q}_{homogeneity} for n={self.algebra.n}, "
                              f"dimension {space.dimension}")
        return self._boxes[key]

    def harmonic_space(self, q: int, homogeneity: int) -> list[Cochain]:
        """
        Basis of the kernel of □ on C^q_l
        """
        space = self.space(q, homogeneity)
        if space.dimension == 0:
            return []
        matrix, shape = self.box_matrix(q, homogeneity)
        return [space.cochain(vector) for vector in self.backend.nullspace(matrix, shape)]

    def invert_box_on_C12(self, phi: Cochain) -> Cochain:
        """
        Solve □ψ = φ on C^1_2
        :raises SingularSystemError: if □ is not invertible on C^1_2
        """
        space = self.space(1, 2)
        matrix, shape = self.box_matrix(1, 2)
        return space.cochain(self.backend.solve(matrix, shape, space.vector(phi)))

    def hodge_split_C12(self, phi: Cochain) -> tuple[Cochain, Cochain]:
        """
        Split φ in C^1_2 as ∂β + ∂*ψ with β in C^0_2 and ψ in C^2_2
        :return: (∂-image part, ∂*-image part)
        :raises InconsistentSystemError: if φ is not in Im ∂ + Im ∂*
        """
        source_d, source_c = self.space(0, 2), self.space(2, 2)
        target = self.space(1, 2)
        d_matrix, _ = self.differential_matrix(0, 2)
        c_matrix, _ = self.codifferential_matrix(2, 2)
        combined = {row: dict(entries) for row, entries in d_matrix.items()}
        for row, entries in c_matrix.items():
            combined.setdefault(row, {}).update({source_d.dimension + c: v for c, v in entries.items()})
        shape = (target.dimension, source_d.dimension + source_c.dimension)
        solution, _ = self.backend.solve_particular(combined, shape, target.vector(phi))
        beta = source_d.cochain(solution[:source_d.dimension])
        psi = source_c.cochain(solution[source_d.dimension:])
        return differential(beta), codifferential(psi)

    def cohomology_profile(self, q: int, homogeneities=None) -> list[CohomologyBlock]:
        """
        Dimension of the harmonic space per homogeneity of C^q, with the argument types and
        value degrees the harmonic cochains are supported on.
        :param homogeneities: Homogeneities to profile, the positive ones 1 ... 2q+2 by default
        """
        if homogeneities is None:
            homogeneities = range(1, 2 * q + 3)
        degrees = self.algebra.degrees_by_index
        profile = []
        for homogeneity in homogeneities:
            space = self.space(q, homogeneity)
            harmonic = self.harmonic_space(q, homogeneity)
            types, value_degrees = set(), set()
            for phi in harmonic:
                types |= space.argument_types(phi)
                value_degrees |= {degrees[k] for value in phi.values.values() for k in value}
            profile.append(CohomologyBlock(q, homogeneity, space.dimension, len(harmonic),
                                           sorted(types), sorted(value_degrees)))
            self.logger.debug(f"H^{q}_{homogeneity}: {len(harmonic)} (block dimension {space.dimension})")
        return profile

    def box_spectrum_on_symmetric_forms(self, frame) -> list[BoxModule]:
        """
        Eigenvalues of □ on the submodules R·g, (S^2_0)[-1] and (S^2_0)[3] of C^1_2
        :param frame: Adapted frame of the same n and backend
        """
        n, dim = self.algebra.n, frame.dim
        trace_free = []
        for a in range(dim):
            for b in range(a, dim):
                form = self.backend.zeros((dim, dim))
                form[a, b] = form[a, b] + 1
                form[b, a] = form[b, a] + 1
                form = form - frame.identity * (sum(form[i, i] for i in range(dim)) / dim)
                trace_free.append(form)
        candidates = {
            "Rg": ([frame.identity], 8 * (n + 2), 1),
            "S2_0[-1]": ([part_minus_one(f, frame) for f in trace_free], 4 * (n + 2), 6 * n * n + 3 * n),
            "S2_0[3]": ([part_three(f, frame) for f in trace_free], 4 * (n + 4), 2 * n * n - n - 1),
        }
        modules = []
        for name, (forms, expected, expected_dimension) in candidates.items():
            basis = self._independent_forms(forms)
            observed = None
            for form in basis:
                phi = form_to_cochain(self.algebra, form)
                eigenvalue = _eigenvalue(laplacian(phi), phi, self.backend)
                if observed is None:
                    observed = eigenvalue
                elif eigenvalue is None or not self.backend.is_zero(eigenvalue - observed):
                    observed = None
                    break
            if not basis:
                self.logger.warning(f"Module {name} is empty for n={n}, only its expected eigenvalue is reported")
                passed = expected_dimension == 0
            else:
                passed = (len(basis) == expected_dimension and observed is not None
                          and self.backend.is_zero(observed - expected))
            modules.append(BoxModule(name, expected, observed, len(basis), expected_dimension, passed))
        return modules

    def _independent_forms(self, forms: list) -> list:
        selected, rows = [], {}
        for form in forms:
            row = {i: v for i, v in enumerate(form.flat) if not self.backend.is_zero(v)}
            if not row:
                continue
            rows[len(selected)] = row
            shape = (len(selected) + 1, form.size)
            if self.backend.rank(rows, shape) == len(selected) + 1:
                selected.append(form)
            else:
                del rows[len(selected)]
        return selected


def _eigenvalue(image: Cochain, phi: Cochain, backend):
    """
    λ with image = λ φ, or None if the image is not a multiple of φ
    """
    for key, value in phi.values.items():
        for k, v in value.items():
            ratio = image.evaluate(key).get(k, backend.zero) / v
            return ratio if image.matches(phi.scale(ratio)) else None
    return None
