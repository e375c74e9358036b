# SPDX-License-Identifier: MIT-0

import logging

import wholepartial.shared.validation as wpc_v
from wholepartial.calculus.sampling import DEFAULT_MASS_RANGE, DEFAULT_MOMENTUM_RANGE
from wholepartial.shared.util import load_file

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

DEFAULT_TOLERANCES = {
  'Identity': 1e-9,
  'FiniteDifference': 1e-6,
  'FiniteDifferenceStep': 1e-5,
  'Field': 1e-10,
  'Omega': 1e-9,
  'DeterminantOnShell': 1e-9,
  'DeterminantOffShell': 1e-6,
  'Factorization': 1e-9,
  'Jacobi': 1e-12,
  'MassRelation': 1e-12,
  'ConvergenceOrder': 0.2,
}

RIGHT_HANDED_SCALARS = ('p1+ip2', 'p1-ip2')
ANSATZ_TENSOR_COMPONENTS = ('i0', '0i')
MASS_TERM_READINGS = ('sinh_half', 'half_sinh')


class ConventionsError(Exception):
  pass


class Conventions:
  """
  Tolerances, sampler domains and the selectable sign and phase conventions.
  Built from an optional YAML or JSON document whose keys are all optional:

  Tolerances: dict                  Any key of `DEFAULT_TOLERANCES`, positive numbers
  Sampler:
    MomentumRange: [low, high]      Range of |p_i|. Default is [0.1, 2.0]
    MassRange: [low, high]          Range of m. Default is [0.5, 2.0]
  Chart:
    IncludeMassGradient: bool       Whether dE/dm = m/E enters the whole-partial sum over m
  Helicity:
    RightHandedScalar: str          `p1+ip2` (p_r = p1 + i p2, p_l = p1 - i p2) or the swap
                                    `p1-ip2`
    OperatorFactor: [re, im]        Factor c in x^mu = c * d/dp_mu. Default is i
    AnsatzTensorComponent: str      `i0` divides the commutator coefficient by F^{i0} (the
                                    longitudinal electric field), `0i` by F^{0i}
  Dirac:
    MassTermReading: str            `sinh_half` reads "2 sinh mu/2" as 2 sinh(mu/2),
                                    `half_sinh` as 2 sinh(mu)/2
  Deformation:
    PlanckLength: float             Default is 1.6e-35

  """

  def __init__(self, document=None):
    document = {} if document is None else document
    try:
      self._load(document)
    except AssertionError as e:
      raise ConventionsError(f'The conventions document is invalid - {e}')

  def _load(self, document):
    assert isinstance(document, dict), 'conventions is not a dict'

    self.tolerances = dict(DEFAULT_TOLERANCES)
    if wpc_v.check_dict_attribute_exists_and_type(document, 'Tolerances', dict, 'conventions', optional=True):
      for key, value in document['Tolerances'].items():
        path = f'conventions["Tolerances"]["{key}"]'
        wpc_v.check_choice(key, tuple(DEFAULT_TOLERANCES), path)
        self.tolerances[key] = wpc_v.check_number(value, path, positive=True, allow_zero=False)

    sampler = self._section(document, 'Sampler')
    self.momentum_range = DEFAULT_MOMENTUM_RANGE
    self.mass_range = DEFAULT_MASS_RANGE
    if 'MomentumRange' in sampler:
      self.momentum_range = wpc_v.check_range(sampler['MomentumRange'], 'conventions["Sampler"]["MomentumRange"]')
    if 'MassRange' in sampler:
      self.mass_range = wpc_v.check_range(sampler['MassRange'], 'conventions["Sampler"]["MassRange"]')

    chart = self._section(document, 'Chart')
    self.include_mass_gradient = True
    if wpc_v.check_dict_attribute_exists_and_type(chart, 'IncludeMassGradient', bool, 'conventions["Chart"]', optional=True):
      self.include_mass_gradient = chart['IncludeMassGradient']

    helicity = self._section(document, 'Helicity')
    self.right_handed_scalar = helicity.get('RightHandedScalar', 'p1+ip2')
    wpc_v.check_choice(self.right_handed_scalar, RIGHT_HANDED_SCALARS, 'conventions["Helicity"]["RightHandedScalar"]')
    self.operator_factor = 1j
    if 'OperatorFactor' in helicity:
      self.operator_factor = self._operator_factor(helicity['OperatorFactor'])
    self.ansatz_tensor_component = helicity.get('AnsatzTensorComponent', 'i0')
    wpc_v.check_choice(self.ansatz_tensor_component, ANSATZ_TENSOR_COMPONENTS, 'conventions["Helicity"]["AnsatzTensorComponent"]')

    dirac = self._section(document, 'Dirac')
    self.mass_term_reading = dirac.get('MassTermReading', 'sinh_half')
    wpc_v.check_choice(self.mass_term_reading, MASS_TERM_READINGS, 'conventions["Dirac"]["MassTermReading"]')

    deformation = self._section(document, 'Deformation')
    self.planck_length = 1.6e-35
    if 'PlanckLength' in deformation:
      self.planck_length = wpc_v.check_number(deformation['PlanckLength'], 'conventions["Deformation"]["PlanckLength"]', positive=True, allow_zero=False)

  @staticmethod
  def _section(document, name):
    if wpc_v.check_dict_attribute_exists_and_type(document, name, dict, 'conventions', optional=True):
      return document[name]
    return {}

  @staticmethod
  def _operator_factor(value):
    path = 'conventions["Helicity"]["OperatorFactor"]'
    assert isinstance(value, list) and len(value) == 2, f'{path} is not a [re, im] pair'
    factor = complex(wpc_v.check_number(value[0], f'{path}[0]'), wpc_v.check_number(value[1], f'{path}[1]'))
    assert factor != 0, f'{path} must not be zero'
    return factor

  def with_tolerance_override(self, tol):
    """
    Return a copy where every tolerance except the convergence-order window and the FD step is
    replaced by `tol`.

    """
    copy = Conventions.__new__(Conventions)
    copy.__dict__.update(self.__dict__)
    copy.tolerances = dict(self.tolerances)
    for key in copy.tolerances:
      if key not in ('ConvergenceOrder', 'FiniteDifferenceStep', 'DeterminantOffShell'):
        copy.tolerances[key] = tol
    return copy


def load_conventions(location=None, aws_region=None):
  """
  Load the conventions document at `location`, or return the defaults if no location is given.

  Args:
    location (str): Local path or `s3://bucket/key`
    aws_region (str): AWS region of the bucket

  """
  if not location:
    return Conventions()
  logger.debug(f'Loading the conventions document at "{location}"')
  try:
    document = load_file(location, aws_region, 'yaml')
  except Exception as e:
    raise ConventionsError(f'Failed to load the conventions document - {e}')
  return Conventions(document or {})
