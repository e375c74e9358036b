# SPDX-License-Identifier: MIT-0

"""
Acceptance suite of the toolbox. Every check draws from its own numpy generator seeded by the
report seed and the check group, so a seed reproduces the report exactly.

"""

import logging
import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from wholepartial.calculus import helicity, ncalgebra, shells
from wholepartial.calculus.expr import EvaluationError, diff_explicit, evaluate_samples, is_zero, relative_residual
from wholepartial.calculus.onshell import (Chart, commutator_apply, commutator_coefficient_residual,
  convergence_order, fd_whole_partial, feynman_pcomm, momentum_commutator_apply, operator_jacobi_residual,
  whole_partial)
from wholepartial.calculus.sampling import OnShellSampler, momentum_sampler, random_expr

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

# Smooth test functions mixing the energy, the momenta and transcendental functions
BATTERY = (
  'E*p1',
  'E^2*p2',
  'exp(E)*sinh(p2)',
  'sinh(E)*p3',
  'E*p1*p2 + p3^2',
  'cosh(E)*exp(p1)',
  'sqrt(E^2 + p1^2)',
  'p1*p2/E',
  'E^3 - 2*E*p3',
  'exp(E*p1)',
)
ANSATZ_FUNCTIONS = ('E*p1', 'exp(E)*sinh(p2)', 'E^2*p3')
JACOBI_TRIPLES = (('p1', 'p2', 'E'), ('p3', 'E', 'm'))

FD_TRIALS = 100
CONVERGENCE_STEPS = (1e-3, 1e-4, 1e-5)
ROUNDOFF_FACTOR = 100
COMMUTATOR_TRIALS = 200
MOMENTUM_TRIALS = 50
KINEMATICS_TRIALS = 100
ANSATZ_TRIALS = 50
DIRAC_TRIALS = 50
FACTORIZATION_TRIALS = 200
DEFORMATION_TRIALS = 1000
KAPPAS = (0.1, 1.0, 10.0)
NEGATIVE_CONTROL_THRESHOLD = 1e-3
CONVERGENCE_TARGET = 2.0


@dataclass
class CheckResult:
  """
  Outcome of one check. With `comparison` max the residual must not exceed the tolerance, with
  min it must reach it (separation checks).

  """
  name: str
  passed: bool
  residual: float
  tolerance: float
  samples: int
  comparison: str = 'max'
  seed: int = 0
  wall_time: float = 0.0

  def to_document(self):
    return {
      'name': self.name,
      'status': 'pass' if self.passed else 'fail',
      'residual': _round(self.residual),
      'tolerance': self.tolerance,
      'comparison': self.comparison,
      'samples': self.samples,
      'seed': self.seed,
    }


@dataclass
class VerifyReport:
  seed: int
  checks: list = field(default_factory=list)

  @property
  def passed(self):
    return all(check.passed for check in self.checks)

  @property
  def failures(self):
    return [check for check in self.checks if not check.passed]

  def to_document(self):
    """
    Machine-readable report. Each check carries the report seed, which together with the check
    name reproduces its samples. Wall times only appear in the text report: the JSON report of
    a seed is byte-identical across runs.

    """
    return {
      'schema': 1,
      'command': 'verify',
      'seed': self.seed,
      'passed': self.passed,
      'checks': [check.to_document() for check in self.checks],
    }

  def to_text(self):
    lines = [f'Verification report (seed {self.seed})']
    for check in self.checks:
      status = 'PASS' if check.passed else 'FAIL'
      operator = '<=' if check.comparison == 'max' else '>='
      lines.append(f'  {status}  {check.name:<42} residual={check.residual:.12g} {operator} {check.tolerance:.3g}'
        f'  samples={check.samples}  time={check.wall_time:.3f}s')
    lines.append(f'{len(self.checks) - len(self.failures)}/{len(self.checks)} checks passed')
    return '\n'.join(lines)


def _round(value):
  value = float(value)
  if not np.isfinite(value):
    return str(value)
  return float(f'{value:.12g}')


def _check(name, residual, tolerance, samples, at_least=False):
  residual = float(residual)
  passed = residual >= tolerance if at_least else residual <= tolerance
  return CheckResult(name, bool(passed), residual, float(tolerance), int(samples), 'min' if at_least else 'max')


def _rng(seed, group):
  return np.random.default_rng([seed, zlib.crc32(group.encode())])


def _standard_chart(conventions, branch=1):
  return Chart.standard(branch, conventions.include_mass_gradient)


def _on_shell_sampler(conventions, chart, seed, group):
  base = momentum_sampler(int(_rng(seed, group).integers(2 ** 31)), conventions.momentum_range, conventions.mass_range)
  return OnShellSampler(chart, base)


def _random_kinematics(rng, conventions, n):
  low, high = conventions.momentum_range
  mass_low, mass_high = conventions.mass_range
  result = []
  for _ in range(n):
    p = rng.uniform(low, high, size=3) * rng.choice((-1.0, 1.0), size=3)
    m = rng.uniform(mass_low, mass_high)
    result.append(helicity.Kinematics(float(p[0]), float(p[1]), float(p[2]), float(m), conventions.right_handed_scalar))
  return result


# Whole-partial derivative against its finite-difference oracle

def check_whole_partial(conventions, seed):
  chart = _standard_chart(conventions)
  rng = _rng(seed, 'whole_partial')
  points = _on_shell_sampler(conventions, chart, seed, 'whole_partial.points').draw(FD_TRIALS)
  h = conventions.tolerances['FiniteDifferenceStep']
  variables = ('p1', 'p2', 'p3', 'm') if conventions.include_mass_gradient else ('p1', 'p2', 'p3')

  worst = 0.0
  orders = []
  samples = 0
  for n in range(FD_TRIALS):
    f = random_expr(rng, chart.variables, depth=2)
    v = str(rng.choice(variables))
    point = {name: float(points[name][n]) for name in chart.base}
    try:
      exact = chart.evaluate(whole_partial(chart, f, v), point)
      value = chart.evaluate(f, point)
      approximation = fd_whole_partial(chart, f, v, point, h)
      errors = [abs(fd_whole_partial(chart, f, v, point, step) - exact) for step in CONVERGENCE_STEPS]
    except EvaluationError as e:
      logger.debug(f'Skipping a singular oracle point - {e}')
      continue
    samples += 1
    worst = max(worst, float(relative_residual(approximation, exact)))
    order = convergence_order(CONVERGENCE_STEPS, errors, ROUNDOFF_FACTOR * np.finfo(float).eps * (1 + abs(value)))
    if order is not None:
      orders.append(order)

  order_residual = abs(float(np.median(orders)) - CONVERGENCE_TARGET) if orders else float('nan')
  return [
    _check('whole_partial.fd_oracle', worst, conventions.tolerances['FiniteDifference'], samples),
    _check('whole_partial.convergence_order', order_residual, conventions.tolerances['ConvergenceOrder'], len(orders)),
  ]


# Commutators of whole-partial derivatives

def check_commutators(conventions, seed):
  results = []
  tolerance = conventions.tolerances['Identity']
  for branch, label in ((1, 'plus'), (-1, 'minus')):
    chart = _standard_chart(conventions, branch)
    sampler = _on_shell_sampler(conventions, chart, seed, f'commutator.{label}')
    worst = 0.0
    for f in BATTERY:
      for axis in (1, 2, 3):
        worst = max(worst, commutator_coefficient_residual(chart, axis, f, sampler, COMMUTATOR_TRIALS))
    results.append(_check(f'commutator.closed_form_branch_{label}', worst, tolerance, COMMUTATOR_TRIALS * len(BATTERY) * 3))

  chart = _standard_chart(conventions)
  points = _on_shell_sampler(conventions, chart, seed, 'commutator.momentum').draw(MOMENTUM_TRIALS)
  rng = _rng(seed, 'commutator.magnetic')
  for k in (1, 2, 3):
    points[f'B{k}'] = rng.uniform(-1, 1, size=MOMENTUM_TRIALS)

  zero_worst = 0.0
  feynman_worst = 0.0
  for f in BATTERY:
    df_de = evaluate_samples(diff_explicit(f, 'E'), points)
    for i, j in ((1, 2), (1, 3), (2, 3)):
      commutator = evaluate_samples(commutator_apply(chart, f'p{i}', f'p{j}', f), points)
      scale = np.abs(evaluate_samples(whole_partial(chart, whole_partial(chart, f, f'p{j}'), f'p{i}'), points))
      zero_worst = max(zero_worst, float(np.nanmax(np.abs(commutator) / (1 + scale))))
      if not is_zero(momentum_commutator_apply(chart, i, j, f, 0)):
        zero_worst = float('inf')

      k = 6 - i - j
      sign = 1 if (i, j) in ((1, 2), (2, 3)) else -1
      direct = df_de / points['E'] ** 3 * (sign * 1j * points[f'B{k}'])
      computed = evaluate_samples(momentum_commutator_apply(chart, i, j, f, feynman_pcomm(i, j)), points)
      feynman_worst = max(feynman_worst, float(np.nanmax(relative_residual(computed, direct))))

  results.append(_check('commutator.momentum_zero', zero_worst, tolerance, MOMENTUM_TRIALS * len(BATTERY) * 3))
  results.append(_check('commutator.momentum_feynman', feynman_worst, conventions.tolerances['Field'],
    MOMENTUM_TRIALS * len(BATTERY) * 3))

  sampler = _on_shell_sampler(conventions, chart, seed, 'commutator.jacobi')
  jacobi_worst = 0.0
  for f in BATTERY[:2]:
    for triple in JACOBI_TRIPLES:
      if not conventions.include_mass_gradient and 'm' in triple:
        continue
      jacobi_worst = max(jacobi_worst, operator_jacobi_residual(chart, triple, f, sampler))
  results.append(_check('commutator.operator_jacobi', jacobi_worst, tolerance, 20 * 2 * len(JACOBI_TRIPLES)))
  return results


# Polarization vectors and fields

def check_polarization(conventions, seed):
  rng = _rng(seed, 'polarization')
  kinematics = _random_kinematics(rng, conventions, KINEMATICS_TRIALS)
  expected = {helicity.Helicity.PLUS: -1.0, helicity.Helicity.MINUS: -1.0, helicity.Helicity.LONGITUDINAL: -1.0,
    helicity.Helicity.TIMELIKE: 1.0}

  normalization = 0.0
  transversality = 0.0
  magnetic = 0.0
  agreement = 0.0
  for k in kinematics:
    for label, square in expected.items():
      eps = helicity.pol_vector(k, label)
      normalization = max(normalization, abs(eps.minkowski_square() - square))
      if label in (helicity.Helicity.PLUS, helicity.Helicity.MINUS):
        transversality = max(transversality, abs(helicity.transversality(k, eps)))
      if label is not helicity.Helicity.TIMELIKE:
        closed = helicity.fields_closed(k, label)
        agreement = max(agreement, helicity.fields_from_potential(k, eps, label).max_difference(closed))
    magnetic = max(magnetic, float(np.max(np.abs(helicity.fields_closed(k, helicity.Helicity.LONGITUDINAL).magnetic))))

  tolerance = conventions.tolerances['Field']
  return [
    _check('polarization.normalization', normalization, tolerance, KINEMATICS_TRIALS * 4),
    _check('polarization.transversality', transversality, tolerance, KINEMATICS_TRIALS * 2),
    _check('polarization.longitudinal_magnetic_zero', magnetic, 0.0, KINEMATICS_TRIALS),
    _check('polarization.potential_agreement', agreement, tolerance, KINEMATICS_TRIALS * 3),
  ]


def check_ansatz(conventions, seed):
  rng = _rng(seed, 'ansatz')
  chart = _standard_chart(conventions)
  parallel = 0.0
  spread = 0.0
  for k in _random_kinematics(rng, conventions, ANSATZ_TRIALS):
    for f in ANSATZ_FUNCTIONS:
      result = helicity.ansatz_commutator(chart, k, f, conventions.operator_factor, conventions.ansatz_tensor_component)
      parallel = max(parallel, result.parallel_residual)
      spread = max(spread, result.omega_spread)
  samples = ANSATZ_TRIALS * len(ANSATZ_FUNCTIONS)
  return [
    _check('ansatz.parallel', parallel, conventions.tolerances['Field'], samples),
    _check('ansatz.omega_axis_independence', spread, conventions.tolerances['Omega'], samples),
  ]


# Spinor operator and mass relation

def _dirac_point(rng, conventions, offset):
  mu = rng.uniform(0.5, 2.0)
  momentum = rng.uniform(0.1, 2.0, size=3) * rng.choice((-1.0, 1.0), size=3)
  p4 = rng.uniform(0.8, 1.2)
  a = shells.mass_term(mu, conventions.mass_term_reading)
  p0 = np.sqrt(a * a - (p4 - 1) ** 2 + float(np.sum(momentum ** 2)) + offset)
  return (float(p0), *(float(x) for x in momentum)), float(p4), float(mu)


def check_dirac(conventions, seed):
  rng = _rng(seed, 'dirac')
  gammas = shells.GammaSet.dirac()
  reading = conventions.mass_term_reading

  on_shell = 0.0
  for _ in range(DIRAC_TRIALS):
    p, p4, mu = _dirac_point(rng, conventions, 0.0)
    for variant in shells.VARIANTS:
      determinant, algebraic = shells.dirac_shell_residual(p, p4, mu, variant, gammas, reading)
      on_shell = max(on_shell, abs(determinant), abs(algebraic))

  off_shell = float('inf')
  for _ in range(DIRAC_TRIALS):
    p, p4, mu = _dirac_point(rng, conventions, rng.uniform(0.1, 1.0))
    for variant in shells.VARIANTS:
      determinant, _ = shells.dirac_shell_residual(p, p4, mu, variant, gammas, reading)
      off_shell = min(off_shell, abs(determinant))

  factorization = 0.0
  for _ in range(FACTORIZATION_TRIALS):
    p = tuple(float(x) for x in rng.uniform(-2.0, 2.0, size=4))
    p4 = float(rng.uniform(0.0, 2.0))
    mu = float(rng.uniform(-1.0, 1.0))
    for variant in shells.VARIANTS:
      determinant, algebraic = shells.dirac_shell_residual(p, p4, mu, variant, gammas, reading)
      factorization = max(factorization, float(relative_residual(determinant, algebraic ** 2)))

  mass = 0.0
  grid = np.linspace(-2.0, 2.0, 41)
  for mu in grid:
    relation = shells.mass_relation(float(mu))
    mass = max(mass, abs(relation.identity_residual), abs(np.sqrt(1 + relation.m ** 2) - relation.m4))

  return [
    _check('dirac.gamma_algebra', gammas.check(), conventions.tolerances['Identity'], 16 + 4 + 1),
    _check('dirac.determinant_on_shell', on_shell, conventions.tolerances['DeterminantOnShell'], DIRAC_TRIALS * 2),
    _check('dirac.determinant_off_shell', off_shell, conventions.tolerances['DeterminantOffShell'], DIRAC_TRIALS * 2,
      at_least=True),
    _check('dirac.determinant_factorization', factorization, conventions.tolerances['Factorization'],
      FACTORIZATION_TRIALS * 2),
    _check('dirac.mass_relation', mass, conventions.tolerances['MassRelation'], len(grid)),
  ]


# Coordinate algebras and deformed shells

def corrupted_kappa_algebra(kappa=1.0):
  """
  kappa-Minkowski constants with a doubled x2 bracket and an extra [x1, x2] = i t, which break
  the Jacobi identity.

  """
  generators = ncalgebra.KAPPA_GENERATORS
  structure = np.zeros((4, 4, 4))
  structure[1, 1, 0], structure[1, 0, 1] = 1 / kappa, -1 / kappa
  structure[2, 2, 0], structure[2, 0, 2] = 2 / kappa, -2 / kappa
  structure[0, 1, 2], structure[0, 2, 1] = 1.0, -1.0
  return ncalgebra.lie(structure, generators)


def check_algebra(conventions, seed):
  rng = _rng(seed, 'algebra')
  kappa = max(ncalgebra.jacobi_residual(ncalgebra.kappa_minkowski(k)) for k in KAPPAS)
  theta = rng.normal(size=(4, 4))
  canonical = ncalgebra.jacobi_residual(ncalgebra.canonical(theta - theta.T))
  control = ncalgebra.jacobi_residual(corrupted_kappa_algebra())
  tolerance = conventions.tolerances['Jacobi']
  return [
    _check('algebra.jacobi_kappa', kappa, tolerance, len(KAPPAS)),
    _check('algebra.jacobi_canonical', canonical, tolerance, 1),
    _check('algebra.jacobi_negative_control', control, NEGATIVE_CONTROL_THRESHOLD, 1, at_least=True),
  ]


def check_deformation(conventions, seed):
  rng = _rng(seed, 'deformation')
  planck_length = conventions.planck_length

  mismatches = 0
  for _ in range(DEFORMATION_TRIALS):
    energy = float(rng.uniform(-4.0, 4.0))
    p = tuple(float(x) for x in rng.uniform(-2.0, 2.0, size=3))
    m = float(rng.uniform(0.0, 2.0))
    standard = shells.standard_residual(energy, p, m)
    if shells.deformed_residual(energy, p, m, planck_length, 'none') != standard:
      mismatches += 1
    for choice in shells.deformation_choices()[1:]:
      if shells.deformed_residual(energy, p, m, planck_length, choice, 0.0) != standard:
        mismatches += 1

  # Points where the standard residual is exactly 0, so the residual is the deformation term
  exact_points = ((5.0, (4.0, 0.0, 0.0), 3.0), (13.0, (0.0, 12.0, 0.0), 5.0), (17.0, (0.0, 0.0, 15.0), 8.0),
    (-5.0, (0.0, 4.0, 0.0), 3.0))
  linearity = 0.0
  samples = 0
  for energy, p, m in exact_points:
    for choice in shells.deformation_choices()[1:]:
      unit = shells.deformed_residual(energy, p, m, planck_length, choice, 1.0)
      for alpha in (0.5, 2.0, 3.0):
        scaled = shells.deformed_residual(energy, p, m, planck_length, choice, alpha)
        linearity = max(linearity, abs(scaled - alpha * unit) / abs(alpha * unit))
        samples += 1

  return [
    _check('deformation.reduces_exactly', mismatches, 0.0, DEFORMATION_TRIALS * len(shells.deformation_choices())),
    _check('deformation.linear_in_alpha', linearity, conventions.tolerances['Identity'], samples),
  ]


CHECK_GROUPS = (check_whole_partial, check_commutators, check_polarization, check_ansatz, check_dirac, check_algebra,
  check_deformation)


def _rerun_check(conventions, seed):
  """
  Run the seeded oracle and polarization groups twice and count the results that differ.

  """
  differences = 0
  for group in (check_whole_partial, check_polarization):
    first = [(r.name, r.residual, r.samples) for r in group(conventions, seed)]
    second = [(r.name, r.residual, r.samples) for r in group(conventions, seed)]
    differences += sum(1 for a, b in zip(first, second) if a != b)
  return [_check('determinism.rerun', differences, 0.0, 2)]


def run_verify(conventions, seed=0):
  """
  Run every check and return a VerifyReport with the checks ordered by name.

  Args:
    conventions (Conventions): Tolerances and conventions
    seed (int): Seed of the report

  """
  logger.info(f'Running the verification suite with seed {seed}')
  report = VerifyReport(seed)
  for group in CHECK_GROUPS + (_rerun_check,):
    start = time.perf_counter()
    try:
      results = group(conventions, seed)
    except Exception as e:
      logger.error(f'The check group {group.__name__} failed - {e}')
      results = [CheckResult(f'{group.__name__}.error', False, float('nan'), 0.0, 0)]
    elapsed = time.perf_counter() - start
    for result in results:
      result.wall_time = elapsed
      result.seed = seed
      logger.debug(f'{result.name}: residual {result.residual:.3e}, passed {result.passed}')
    report.checks.extend(results)
  report.checks.sort(key=lambda check: check.name)
  return report
