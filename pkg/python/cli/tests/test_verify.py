# SPDX-License-Identifier: MIT-0

import math

import pytest

import wholepartial.cli.verify as verify
from wholepartial.calculus.conventions import Conventions
from wholepartial.calculus.ncalgebra import jacobi_residual

EXPECTED_CHECKS = {
  'algebra.jacobi_canonical',
  'algebra.jacobi_kappa',
  'algebra.jacobi_negative_control',
  'ansatz.omega_axis_independence',
  'ansatz.parallel',
  'commutator.closed_form_branch_minus',
  'commutator.closed_form_branch_plus',
  'commutator.momentum_feynman',
  'commutator.momentum_zero',
  'commutator.operator_jacobi',
  'deformation.linear_in_alpha',
  'deformation.reduces_exactly',
  'determinism.rerun',
  'dirac.determinant_factorization',
  'dirac.determinant_off_shell',
  'dirac.determinant_on_shell',
  'dirac.gamma_algebra',
  'dirac.mass_relation',
  'polarization.longitudinal_magnetic_zero',
  'polarization.normalization',
  'polarization.potential_agreement',
  'polarization.transversality',
  'whole_partial.convergence_order',
  'whole_partial.fd_oracle',
}


@pytest.fixture(scope='module')
def report():
  return verify.run_verify(Conventions(), seed=42)


def test_every_check_passes(report):
  assert [check.name for check in report.failures] == []
  assert report.passed


def test_checks_are_named_and_ordered(report):
  names = [check.name for check in report.checks]
  assert set(names) == EXPECTED_CHECKS
  assert names == sorted(names)


def test_report_document(report):
  document = report.to_document()
  assert document['schema'] == 1
  assert document['command'] == 'verify'
  assert document['passed'] is True
  for check in document['checks']:
    assert set(check) == {'name', 'status', 'residual', 'tolerance', 'comparison', 'samples', 'seed'}
    assert check['seed'] == 42
    assert check['status'] == 'pass'
  text = report.to_text()
  assert text.splitlines()[-1] == f'{len(EXPECTED_CHECKS)}/{len(EXPECTED_CHECKS)} checks passed'


def test_checks_record_seed_and_wall_time(report):
  assert all(check.seed == 42 for check in report.checks)
  assert all(check.wall_time > 0 for check in report.checks)
  assert all('time=' in line for line in report.to_text().splitlines()[1:-1])
  assert all('wall_time' not in check for check in report.to_document()['checks'])


def test_oracle_uses_most_samples(report):
  oracle = next(check for check in report.checks if check.name == 'whole_partial.fd_oracle')
  assert oracle.samples >= 90


def test_negative_control_is_separated():
  assert jacobi_residual(verify.corrupted_kappa_algebra()) == pytest.approx(3.0)
  control = next(check for check in verify.check_algebra(Conventions(), 0) if check.name == 'algebra.jacobi_negative_control')
  assert control.passed and control.comparison == 'min'


def test_separation_checks_compare_from_below():
  assert verify._check('x', 2.0, 1.0, 1, at_least=True).passed
  assert not verify._check('x', 0.5, 1.0, 1, at_least=True).passed
  assert not verify._check('x', 2.0, 1.0, 1).passed


def test_tolerance_override_fails_inexact_checks():
  conventions = Conventions().with_tolerance_override(1e-30)
  results = {check.name: check for check in verify.check_dirac(conventions, 0)}
  assert results['dirac.gamma_algebra'].passed
  assert results['dirac.determinant_off_shell'].passed
  assert not results['dirac.determinant_factorization'].passed


def test_failing_group_is_reported(monkeypatch):
  def broken(conventions, seed):
    raise ValueError('boom')

  monkeypatch.setattr(verify, 'CHECK_GROUPS', (verify.check_algebra, broken))
  monkeypatch.setattr(verify, '_rerun_check', lambda conventions, seed: [])
  report = verify.run_verify(Conventions(), seed=0)
  assert not report.passed
  assert [check.name for check in report.failures] == ['broken.error']
  assert math.isnan(report.failures[0].residual)
  document = next(check for check in report.to_document()['checks'] if check['name'] == 'broken.error')
  assert document['residual'] == 'nan'
