from __future__ import annotations

import itertools
import os
import time

import numpy as np

import config as config_module
import utils
from cohomology import (Cochain, KostantComplex, act_on_cochain, cochain_to_form, codifferential, differential,
                        form_to_cochain, laplacian)
from errors import ConfigurationError, InvalidQCDataError
from frame_algebra import (D, DSTAR, END0, V, VSTAR, AdaptedFrame, GradedTensor, algebraic_bracket,
                           codiff_trace_map, codiff_trace_map_by_brackets, transported_bracket)
from graded_algebra import (DEGREES, GradedAlgebra, bracket, grading_element, scale_representation_derivative,
                            trace_form)
from heisenberg import FLATNESS_TOLERANCE, flatness_pipeline, heisenberg_structure, validate_structure
from qc_data import (QCPointData, generate_consistent_data, read_json, rotate_data, rotate_tensor, scale_data,
                     sp_n_rotation, validate, write_json)
from report import Report
from weyl import (alpha_qc, codiff_K2_on_V, codiff_K2_on_V_closed_form, codiff_Kqc2_on_D,
                  codiff_Kqc2_on_D_closed_form, joint_alpha_beta_diagnostic, l_identity_check, l_tensor,
                  rho_tensor, rho_tensor_via_box, solve_alpha_numeric, wqc2)

TENSOR_KINDS = (V, D, END0, DSTAR, VSTAR)
RANDOM_TRIPLES = 200


def expected_dimension(n: int) -> int:
    return (n + 2) * (2 * n + 5)


def basis_tensors(frame: AdaptedFrame) -> list[GradedTensor]:
    """
    Basis of V + D + End0(D) + D* + V* as graded tensors, in the order of the algebra basis
    """
    result = []
    for kind in TENSOR_KINDS:
        if kind == END0:
            result.extend(GradedTensor(END0, e) for e in frame.g0_endomorphisms)
            continue
        size = 3 if kind in (V, VSTAR) else frame.dim
        for index in range(size):
            value = frame.zeros(kind)
            value[index] = frame.backend.one
            result.append(GradedTensor(kind, value))
    return result


def random_tensor(kind: str, frame: AdaptedFrame, rng: np.random.Generator) -> GradedTensor:
    backend = frame.backend
    if kind == END0:
        value = frame.zeros(END0)
        for endomorphism in frame.g0_endomorphisms:
            value = value + endomorphism * backend.random_scalar(rng)
        return GradedTensor(END0, value)
    size = 3 if kind in (V, VSTAR) else frame.dim
    return GradedTensor(kind, backend.array([backend.random_scalar(rng) for _ in range(size)]))


def random_cochain(complex_: KostantComplex, q: int, homogeneity: int, rng: np.random.Generator) -> Cochain:
    space = complex_.space(q, homogeneity)
    backend = complex_.backend
    return space.cochain([backend.random_scalar(rng) for _ in range(space.dimension)])


class Verifier(config_module.ConfigurationBasedObject):
    """
    Runs the verification suites of one command and collects their checks in a report
    """

    def __init__(self, config, environment='prod'):
        """
        Create a new verifier and supply the application configuration
        :param config: The configuration passed by the user (may contain a list in decreasing order of priority)
        :param environment: Runtime environment to use as optional suffix to configuration parameters
        """
        super().__init__(config, environment)
        self._complexes = {}

    def test(self) -> bool:
        """
        Check that the configured command can run
        :return: true if the run can start, else false
        """
        path = self.config['general']['input']
        if self.command == 'weyl' and path and not os.path.isfile(path):
            self.logger.error(f"Input file {path} does not exist")
            return False
        if self.command == 'cohomology' and self.n > 2:
            self.logger.error(f"The cohomology suite covers n = 1 and n = 2, got n={self.n}")
            return False
        return True

    def run(self) -> Report:
        """
        Run the configured command
        :return: The report of all checks
        """
        handlers = {
            'algebra': self.run_algebra,
            'cohomology': self.run_cohomology,
            'commutators': self.run_commutators,
            'weyl': self.run_weyl,
            'heisenberg': self.run_heisenberg,
            'selftest': self.run_selftest,
        }
        start = time.perf_counter()
        report = handlers[self.command]()
        self.logger.debug(f"Command {self.command} took {time.perf_counter() - start:.2f}s")
        self.logger.info(f"{len(report.checks)} checks, {len(report.failed_checks)} failed")
        return report

    def _report(self, command: str, **parameters) -> Report:
        return Report(command, self.backend, parameters, self.config['report']['schema'])

    def _rng(self, offset: int = 0) -> np.random.Generator:
        return np.random.default_rng(self.seed + offset)

    def _complex(self, n: int) -> KostantComplex:
        if n not in self._complexes:
            self._complexes[n] = KostantComplex(GradedAlgebra(n, self.backend))
        return self._complexes[n]

    # algebra

    def run_algebra(self, n: int | None = None) -> Report:
        n = n if n is not None else self.n
        report = self._report('algebra', n=n, seed=self.seed)
        algebra = self._complex(n).algebra
        backend = self.backend
        rng = self._rng()

        dimensions = {d: len(algebra.indices(d)) for d in DEGREES}
        expected = {-2: 3, -1: 4 * n, 0: 4 + n * (2 * n + 1), 1: 4 * n, 2: 3}
        report.add('dimension', 'matrix-form', algebra.dimension == expected_dimension(n) and dimensions == expected,
                   dimension=algebra.dimension, expected=expected_dimension(n), components=dimensions)
        report.add('membership', 'matrix-form', all(x.is_member() for x in algebra.basis))

        degrees = algebra.degrees_by_index

        epsilon = grading_element(n, backend.one)
        epsilon_index = {algebra.g0_index(0): backend.one}
        grading = True
        for i in range(algebra.dimension):
            image = algebra.bracket_coordinates(epsilon_index, {i: backend.one})
            expected_image = {i: backend.scalar(degrees[i])} if degrees[i] != 0 else {}
            grading = grading and image.keys() == expected_image.keys() and all(
                backend.is_zero(image[k] - expected_image[k]) for k in image)
        report.add('grading-element', 'grading-element-action', grading)

        additive = all(degrees[k] == degrees[i] + degrees[j]
                       for (i, j), value in algebra.structure_constants.items() for k in value)
        report.add('grading-additivity', 'bracket-grading', additive,
                   nonzero_brackets=len(algebra.structure_constants))

        if n == 1:
            triples = itertools.combinations(range(algebra.dimension), 3)
            sampled = False
        else:
            triples = [tuple(int(v) for v in rng.choice(algebra.dimension, 3, replace=False))
                       for _ in range(RANDOM_TRIPLES)]
            sampled = True
        failures = 0
        count = 0
        for i, j, k in triples:
            count += 1
            total = {}
            for x, y, z in ((i, j, k), (j, k, i), (k, i, j)):
                for index, value in algebra.bracket_coordinates({x: backend.one}, algebra.bracket_basis(y, z)).items():
                    total[index] = total.get(index, backend.zero) + value
            if not all(backend.is_zero(v) for v in total.values()):
                failures += 1
        report.add('jacobi', 'jacobi-identity', failures == 0, triples=count, sampled=sampled, failures=failures)

        pairing = algebra.pairing_matrix()
        size = len(pairing)
        perfect = all(backend.is_zero(pairing[i][j] - (1 if i == j else 0)) for i in range(size) for j in range(size))
        orthogonal = all(backend.is_zero(trace_form(algebra.element(i), algebra.element(j)))
                         for i in range(algebra.dimension) for j in range(algebra.dimension)
                         if degrees[i] + degrees[j] != 0)
        report.add('b-pairing', 'trace-form-duality', perfect and orthogonal, perfect=perfect, orthogonal=orthogonal)
        report.add('b-epsilon', 'trace-form-duality', backend.is_zero(trace_form(epsilon, epsilon) - 1))

        invariant = True
        for _ in range(RANDOM_TRIPLES // 10):
            x, y, z = (algebra.from_coordinates([backend.random_scalar(rng) for _ in range(algebra.dimension)])
                       for _ in range(3))
            value = trace_form(bracket(z, x), y) + trace_form(x, bracket(z, y))
            invariant = invariant and backend.is_zero(value)
        report.add('b-invariance', 'trace-form-invariance', invariant)

        scale = [scale_representation_derivative(algebra.element(i)) for i in algebra.indices(0)]
        report.add('scale-representation', 'scale-representation-derivative',
                   backend.is_zero(scale[0] - 1) and all(backend.is_zero(v) for v in scale[1:]))

        multiple = algebra.killing_multiple()
        report.add('killing-multiple', 'killing-trace-form-ratio', backend.is_zero(multiple - 8 * (n + 3)),
                   observed=multiple, expected=8 * (n + 3))
        return report

    # cohomology

    def run_cohomology(self, n: int | None = None) -> Report:
        n = n if n is not None else self.n
        if n > 2:
            raise ConfigurationError(f"The cohomology suite covers n = 1 and n = 2, got n={n}")
        report = self._report('cohomology', n=n, seed=self.seed)
        complex_ = self._complex(n)
        algebra = complex_.algebra
        backend = self.backend
        frame = AdaptedFrame(n, backend)
        rng = self._rng()

        modules = complex_.box_spectrum_on_symmetric_forms(frame)
        for module in modules:
            report.add(f'box-{module.name}', 'box-eigenvalues', module.passed,
                       expected=module.expected_eigenvalue, observed=module.observed_eigenvalue,
                       dimension=module.dimension, expected_dimension=module.expected_dimension)
        by_name = {module.name: module.expected_eigenvalue for module in modules}
        report.add_result('box_scalars', [by_name['S2_0[-1]'], by_name['S2_0[3]'], by_name['Rg']])

        harmonic = complex_.harmonic_space(1, 2)
        report.add('h1-2-vanishes', 'h1-2-vanishing', not harmonic, dimension=len(harmonic))

        homogeneities = utils.ensure_list(self.config['cohomology']['homogeneities']) or None
        for q in utils.ensure_list(self.config['cohomology']['degrees']):
            profile = complex_.cohomology_profile(q, homogeneities)
            report.add_result(f'profile_q{q}', [
                {"homogeneity": b.homogeneity, "dimension": b.dimension, "harmonic": b.harmonic_dimension,
                 "arguments": b.argument_types, "value_degrees": b.value_degrees} for b in profile])
            if q != 2:
                continue
            support = {b.homogeneity for b in profile if b.harmonic_dimension > 0}
            checked = {b.homogeneity for b in profile}
            expected = {1, 2} if n == 1 else {2}
            report.add('h2-homogeneity', 'h2-homogeneity-profile', support == (expected & checked),
                       support=support, expected=expected & checked)
            top = [b for b in profile if b.homogeneity == 2]
            if top and n > 1:
                report.add('h2-location', 'h2-homogeneity-profile',
                           top[0].argument_types == ['DD'] and top[0].value_degrees == [0],
                           arguments=top[0].argument_types, value_degrees=top[0].value_degrees)

        self._structural_checks(report, complex_, rng)

        c = backend.scalar(8 * (n + 2))
        trace_part = form_to_cochain(algebra, frame.identity * c)
        inverse = cochain_to_form(complex_.invert_box_on_C12(trace_part))
        report.add('box-inverse-trace', 'box-eigenvalues', backend.allclose(inverse, frame.identity))

        phi = random_cochain(complex_, 1, 2, rng)
        d_part, c_part = complex_.hodge_split_C12(phi)
        report.add('hodge-split', 'hodge-decomposition', (d_part + c_part).matches(phi))
        return report

    def _structural_checks(self, report: Report, complex_: KostantComplex, rng: np.random.Generator):
        algebra = complex_.algebra
        backend = self.backend

        zero_cochain = Cochain.zero(algebra, 0)
        for homogeneity in DEGREES:
            zero_cochain = zero_cochain + random_cochain(complex_, 0, homogeneity, rng)
        report.add('d-squared', 'complex-property', differential(differential(zero_cochain)).is_zero())

        one_cochain = random_cochain(complex_, 1, 2, rng)
        report.add('d-squared-c1', 'complex-property', differential(differential(one_cochain)).is_zero())

        two_cochain = random_cochain(complex_, 2, 2, rng)
        report.add('codifferential-squared', 'complex-property',
                   codifferential(codifferential(two_cochain)).is_zero())

        preserved = True
        for q, homogeneity in ((1, 1), (1, 2), (2, 2)):
            image = laplacian(random_cochain(complex_, q, homogeneity, rng))
            preserved = preserved and image.homogeneities() <= {homogeneity}
        report.add('box-homogeneity', 'box-homogeneity', preserved)

        a = {k: backend.random_scalar(rng) for k in algebra.indices(0)}
        phi = random_cochain(complex_, 1, 2, rng)
        left = act_on_cochain(a, laplacian(phi))
        right = laplacian(act_on_cochain(a, phi))
        report.add('box-equivariance', 'box-g0-equivariance', left.matches(right))

    # commutators

    def run_commutators(self, n: int | None = None) -> Report:
        n = n if n is not None else self.n
        samples = int(self.config['general']['samples'])
        report = self._report('commutators', n=n, seed=self.seed, samples=samples)
        frame = AdaptedFrame(n, self.backend)
        backend = self.backend
        rng = self._rng()

        if n == 1:
            tensors = basis_tensors(frame)
            pairs = itertools.product(tensors, repeat=2)
            sampled = False
        else:
            pairs = ((random_tensor(TENSOR_KINDS[rng.integers(5)], frame, rng),
                      random_tensor(TENSOR_KINDS[rng.integers(5)], frame, rng)) for _ in range(samples))
            sampled = True

        count, mismatches = 0, {}
        for a, b in pairs:
            count += 1
            if not algebraic_bracket(a, b, frame).matches(transported_bracket(a, b, frame), backend):
                key = f"{a.kind},{b.kind}"
                mismatches[key] = mismatches.get(key, 0) + 1
        report.add('bracket-table', 'bracket-table-oracle', not mismatches, pairs=count, sampled=sampled,
                   mismatches=mismatches)

        skew = True
        for kind_a, kind_b in itertools.combinations_with_replacement(TENSOR_KINDS, 2):
            a, b = random_tensor(kind_a, frame, rng), random_tensor(kind_b, frame, rng)
            skew = skew and algebraic_bracket(a, b, frame).matches(-algebraic_bracket(b, a, frame), backend)
        report.add('graded-skew-symmetry', 'bracket-table-oracle', skew)

        u, v = random_tensor(D, frame, rng), random_tensor(D, frame, rng)
        contact = backend.array([np.dot(frame.I(s) @ u.value, v.value) * -2 for s in range(1, 4)])
        report.add('contact-relation', 'contact-form-relation',
                   backend.allclose(algebraic_bracket(u, v, frame).value, contact))

        trace_map = True
        for _ in range(10):
            a = backend.array([[backend.random_scalar(rng) for _ in range(frame.dim)] for _ in range(frame.dim)])
            trace_map = trace_map and backend.allclose(codiff_trace_map(a, frame),
                                                       codiff_trace_map_by_brackets(a, frame))
        report.add('codiff-trace-map', 'codiff-trace', trace_map)
        report.add('codiff-trace-identity', 'codiff-trace',
                   backend.allclose(codiff_trace_map(frame.identity, frame), frame.identity * (4 * n)))
        return report

    # weyl

    def run_weyl(self, n: int | None = None) -> Report:
        n = n if n is not None else self.n
        path = self.config['general']['input']
        report = self._report('weyl', n=n, seed=self.seed, input=path)
        if path:
            data = read_json(path, self.backend)
            try:
                validate(data)
            except InvalidQCDataError as e:
                report.add('input-validation', 'qc-data-invariants', False, invariant=e.invariant, message=str(e))
                return report
            report.add('input-validation', 'qc-data-invariants', True)
        else:
            data = generate_consistent_data(n, self.seed, self.backend)

        result = self.weyl_checks(data, report)
        report.add_result('n', data.n)
        report.add_result('alpha_qc', alpha_qc(data))
        report.add_result('L', l_tensor(data))
        report.add_result('codiff_Kqc2', codiff_Kqc2_on_D(data))
        report.add_result('Wqc2_route_a', result.route_a)
        report.add_result('Wqc2_route_b', result.route_b)
        return report

    def weyl_sweep(self, n: int, datasets: int | None = None) -> Report:
        """
        Run the Weyl checks on generated data sets with consecutive seeds
        """
        datasets = datasets if datasets is not None else int(self.config['weyl']['datasets'])
        report = self._report('weyl', n=n, seed=self.seed, datasets=datasets)
        for offset in range(datasets):
            data = generate_consistent_data(n, self.seed + offset, self.backend)
            single = self._report('weyl')
            self.weyl_checks(data, single)
            report.extend(single, f"seed{self.seed + offset}")
        return report

    def weyl_checks(self, data: QCPointData, report: Report):
        """
        Every Weyl engine identity on one data set
        :return: The W^qc(2) result of the data
        """
        backend = data.backend
        n = data.n

        solution = solve_alpha_numeric(data)
        expected = alpha_qc(data)
        matches = all(backend.allclose(a, b) for a, b in zip(solution.alpha, expected))
        report.add('alpha-solve', 'weyl-correction', matches and backend.is_zero(solution.residual),
                   f=solution.f, c=solution.c, c_determined=solution.c_determined, residual=solution.residual)
        report.add('alpha-f', 'weyl-correction', backend.is_zero(solution.f - data.scal / (32 * n * (n + 2))))

        transported = codiff_K2_on_V(expected, data)
        closed = codiff_K2_on_V_closed_form(expected, data)
        report.add('codiff-K-on-V', 'codiff-on-reeb-fields',
                   all(backend.all_zero(t) for t in transported)
                   and all(backend.allclose(t, c) for t, c in zip(transported, closed)))

        joint = joint_alpha_beta_diagnostic(data)
        report.add('joint-alpha-beta', 'weyl-correction', joint.contains_alpha_qc,
                   unknowns=joint.unknowns, rank=joint.rank, solution_dimension=joint.solution_dimension)

        on_d = codiff_Kqc2_on_D(data)
        first, second = codiff_Kqc2_on_D_closed_form(data)
        report.add('codiff-Kqc-on-D', 'codiff-on-distribution',
                   backend.allclose(on_d, first) and backend.allclose(first, second))

        rho = rho_tensor(data)
        report.add('rho-two-routes', 'rho-tensor', backend.allclose(rho, rho_tensor_via_box(data, self._complex(n))),
                   max_abs=backend.max_abs(rho))

        result = wqc2(data)
        report.add('wqc2-routes', 'wqc2-obstruction', result.routes_agree,
                   difference=backend.max_abs(result.route_a - result.route_b))
        report.add('wqc2-antisymmetry', 'wqc2-obstruction', result.antisymmetric)
        report.add('l-identity', 'l-tensor-identity', l_identity_check(data))

        factor = backend.scalar(3)
        scaled = wqc2(scale_data(data, factor))
        report.add('wqc2-scaling', 'wqc2-obstruction', backend.allclose(scaled.route_a, result.route_a * factor))

        rotation = sp_n_rotation(data.frame)
        rotated = wqc2(rotate_data(data, rotation))
        report.add('wqc2-frame-invariance', 'wqc2-obstruction',
                   backend.allclose(rotated.route_a, rotate_tensor(result.route_a, rotation)))
        return result

    # heisenberg

    def run_heisenberg(self, n_values: list[int] | None = None) -> Report:
        n_values = n_values if n_values is not None else utils.ensure_list(self.config['heisenberg']['n_values'])
        report = self._report('heisenberg', n_values=n_values)
        export = self.config['heisenberg']['export']
        for n in n_values:
            structure = heisenberg_structure(n, self.backend)
            violated = validate_structure(structure)
            report.add(f'n{n}.structure', 'heisenberg-structure', not violated, violated=violated)
            flatness = flatness_pipeline(n, self.backend)
            for name, passed in flatness.conditions.items():
                report.add(f'n{n}.biquard-{name}', 'biquard-connection', passed)
            report.add(f'n{n}.homogeneity-one', 'homogeneity-one-curvature', flatness.homogeneity_one)
            report.add(f'n{n}.exported-data', 'qc-data-invariants', flatness.valid_data)
            report.add(f'n{n}.wqc2-routes', 'wqc2-obstruction', flatness.routes_agree)
            report.add(f'n{n}.wqc2-vanishes', 'flat-model', flatness.max_wqc2 <= FLATNESS_TOLERANCE,
                       max_abs=flatness.max_wqc2)
            if export:
                path = export if len(n_values) == 1 else utils.suffixed_path(export, f"_n{n}")
                write_json(flatness.data, path)
                self.logger.info(f"Exported flat model data for n={n} to {path}")
        return report

    # selftest

    def run_selftest(self) -> Report:
        """
        Algebra, cohomology, commutators and a Weyl sweep at n = 1, plus the flat model at n = 1, 2
        """
        report = self._report('selftest', seed=self.seed)
        report.extend(self.run_algebra(1), 'algebra')
        report.extend(self.run_cohomology(1), 'cohomology')
        report.extend(self.run_commutators(1), 'commutators')
        report.extend(self.weyl_sweep(1), 'weyl')
        report.extend(self.run_heisenberg([1, 2]), 'heisenberg')
        return report
