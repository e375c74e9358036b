# SPDX-License-Identifier: MIT-0

import pytest
import yaml

from wholepartial.calculus.conventions import DEFAULT_TOLERANCES, Conventions, ConventionsError, load_conventions


def test_defaults():
  conventions = load_conventions()
  assert conventions.tolerances == DEFAULT_TOLERANCES
  assert conventions.momentum_range == (0.1, 2.0)
  assert conventions.mass_range == (0.5, 2.0)
  assert conventions.include_mass_gradient is True
  assert conventions.operator_factor == 1j
  assert conventions.ansatz_tensor_component == 'i0'
  assert conventions.mass_term_reading == 'sinh_half'
  assert conventions.planck_length == 1.6e-35


def test_document_overrides(tmp_path):
  location = tmp_path / 'conventions.yaml'
  location.write_text(yaml.safe_dump({
    'Tolerances': {'Identity': 1e-8},
    'Sampler': {'MomentumRange': [0.2, 1.5]},
    'Chart': {'IncludeMassGradient': False},
    'Helicity': {'OperatorFactor': [0, -1], 'AnsatzTensorComponent': '0i'},
    'Dirac': {'MassTermReading': 'half_sinh'},
    'Deformation': {'PlanckLength': 1e-3},
  }))
  conventions = load_conventions(str(location))
  assert conventions.tolerances['Identity'] == 1e-8
  assert conventions.tolerances['Jacobi'] == 1e-12
  assert conventions.momentum_range == (0.2, 1.5)
  assert conventions.include_mass_gradient is False
  assert conventions.operator_factor == -1j
  assert conventions.ansatz_tensor_component == '0i'
  assert conventions.mass_term_reading == 'half_sinh'
  assert conventions.planck_length == 1e-3


@pytest.mark.parametrize('document, message', [
  ({'Tolerances': {'Unknown': 1}}, 'must be one of'),
  ({'Tolerances': {'Identity': 0}}, 'greater than 0'),
  ({'Sampler': {'MassRange': [2, 1]}}, 'increasing order'),
  ({'Helicity': {'OperatorFactor': [0, 0]}}, 'must not be zero'),
  ({'Dirac': {'MassTermReading': 'sinh'}}, 'MassTermReading'),
  ({'Chart': {'IncludeMassGradient': 'yes'}}, 'is not a bool'),
])
def test_invalid_documents(document, message):
  with pytest.raises(ConventionsError, match=message):
    Conventions(document)


def test_tolerance_override_keeps_the_step_and_the_order_window():
  conventions = Conventions().with_tolerance_override(1e-3)
  assert conventions.tolerances['Identity'] == 1e-3
  assert conventions.tolerances['Jacobi'] == 1e-3
  assert conventions.tolerances['FiniteDifferenceStep'] == 1e-5
  assert conventions.tolerances['ConvergenceOrder'] == 0.2
  assert conventions.tolerances['DeterminantOffShell'] == 1e-6
  assert Conventions().tolerances['Identity'] == 1e-9


def test_load_failure_is_reported(tmp_path):
  with pytest.raises(ConventionsError, match='Failed to load the conventions document'):
    load_conventions(str(tmp_path / 'missing.yaml'))
