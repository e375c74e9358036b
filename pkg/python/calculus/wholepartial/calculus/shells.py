# SPDX-License-Identifier: MIT-0

"""
Mass-shell residuals (standard, five-dimensional de Sitter, Planck-deformed) and the spinor
operator of the eight-component Dirac-like equations with its solvability checks.

Units are c = hbar = 1. Four-vectors are contravariant, p = (p0, p1, p2, p3), and the metric is
diag(+1, -1, -1, -1).

"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

import wholepartial.shared.validation as wpc_v
from wholepartial.shared.util import load_file

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

DEFAULT_PLANCK_LENGTH = 1.6e-35
SHELL_KINDS = ('standard', 'desitter', 'deformed')
VARIANTS = ('psi', 'psi_r')


class ShellError(Exception):
  pass


# Standard and de Sitter shells

def _momentum_squared(p):
  p1, p2, p3 = p
  return p1 * p1 + p2 * p2 + p3 * p3


def shell_energy(p, m, branch=1):
  """
  Return branch * sqrt(m^2 + |p|^2).

  Args:
    p (sequence): 3-momentum
    m (float): Mass, at least 0
    branch (int): +1 or -1

  """
  if m < 0:
    raise ShellError(f'The mass must be greater than or equal to 0, got {m}')
  if branch not in (1, -1):
    raise ShellError('The branch must be 1 or -1')
  return branch * math.sqrt(m * m + _momentum_squared(p))


def standard_residual(energy, p, m):
  return energy * energy - _momentum_squared(p) - m * m


def desitter_residual(p, mass_scale):
  """
  Return p0^2 - p1^2 - p2^2 - p3^2 - M^2 p4^2 + M^2, which vanishes on the de Sitter shell of
  radius 1/M.

  Args:
    p (sequence): Five components (p0, p1, p2, p3, p4)
    mass_scale (float): M, greater than 0

  """
  if not mass_scale > 0:
    raise ShellError(f'The de Sitter mass scale must be greater than 0, got {mass_scale}')
  p0, p1, p2, p3, p4 = p
  m2 = mass_scale * mass_scale
  return p0 * p0 - p1 * p1 - p2 * p2 - p3 * p3 - m2 * p4 * p4 + m2


def desitter_residual_from_length(p, length):
  if not length > 0:
    raise ShellError(f'The de Sitter radius must be greater than 0, got {length}')
  return desitter_residual(p, 1 / length)


def rotate_spatial(p, axis, angle):
  """
  Rotate components 1 to 3 of the four- or five-vector `p` by `angle` around the spatial axis
  `axis` (1, 2 or 3). Other components are unchanged.

  """
  if axis not in (1, 2, 3):
    raise ValueError(f'Axis must be 1, 2 or 3, got {axis}')
  c, s = math.cos(angle), math.sin(angle)
  i, j = [a for a in (0, 1, 2) if a != axis - 1]
  rotation = np.eye(3)
  rotation[i, i], rotation[i, j], rotation[j, i], rotation[j, j] = c, -s, s, c
  rotated = np.array(p, dtype=float)
  rotated[1:4] = rotation @ rotated[1:4]
  return rotated


# Deformed shell

def _linear_energy(energy, p_squared, m, planck_length, alpha):
  return alpha * planck_length * energy * p_squared


def _quadratic_energy(energy, p_squared, m, planck_length, alpha):
  return alpha * planck_length ** 2 * energy ** 2 * p_squared


DEFORMATIONS = {
  'linear-E': _linear_energy,
  'quadratic-E': _quadratic_energy,
}


def register_deformation(name, function):
  """
  Register a deformation term f(E, |p|^2, m, L_p, alpha) under `name`.

  """
  if name == 'none' or name in DEFORMATIONS:
    raise ShellError(f'The deformation "{name}" is already registered')
  if not callable(function):
    raise ShellError('The deformation must be callable')
  DEFORMATIONS[name] = function


def deformation_choices():
  return ('none',) + tuple(DEFORMATIONS)


def deformed_residual(energy, p, m, planck_length=DEFAULT_PLANCK_LENGTH, choice='none', alpha=1.0):
  """
  Return E^2 - |p|^2 - m^2 + f(E, p, m, L_p). With `choice` none the standard residual is
  returned unchanged.

  """
  if choice == 'none':
    return standard_residual(energy, p, m)
  try:
    deformation = DEFORMATIONS[choice]
  except KeyError:
    raise ShellError(f'Unknown deformation "{choice}", expected one of {", ".join(deformation_choices())}')
  if not planck_length > 0:
    raise ShellError(f'The Planck length must be greater than 0, got {planck_length}')
  return standard_residual(energy, p, m) + deformation(energy, _momentum_squared(p), m, planck_length, alpha)


@dataclass(frozen=True)
class ShellSpec:
  """
  A named shell. `params` holds `m` and `branch` for standard shells, `M` for de Sitter shells
  and `m`, `planck_length`, `choice` and `alpha` for deformed shells.

  """
  kind: str
  params: dict = field(default_factory=dict)

  @classmethod
  def standard(cls, m, branch=1):
    if m < 0:
      raise ShellError(f'The mass must be greater than or equal to 0, got {m}')
    if branch not in (1, -1):
      raise ShellError('The branch must be 1 or -1')
    return cls('standard', {'m': m, 'branch': branch})

  @classmethod
  def desitter(cls, mass_scale=None, length=None):
    if (mass_scale is None) == (length is None):
      raise ShellError('A de Sitter shell takes either a mass scale M or a radius, not both')
    if length is not None:
      if not length > 0:
        raise ShellError(f'The de Sitter radius must be greater than 0, got {length}')
      mass_scale = 1 / length
    if not mass_scale > 0:
      raise ShellError(f'The de Sitter mass scale must be greater than 0, got {mass_scale}')
    return cls('desitter', {'M': mass_scale})

  @classmethod
  def deformed(cls, m, planck_length=DEFAULT_PLANCK_LENGTH, choice='none', alpha=1.0):
    if m < 0:
      raise ShellError(f'The mass must be greater than or equal to 0, got {m}')
    if not planck_length > 0:
      raise ShellError(f'The Planck length must be greater than 0, got {planck_length}')
    if choice not in deformation_choices():
      raise ShellError(f'Unknown deformation "{choice}", expected one of {", ".join(deformation_choices())}')
    return cls('deformed', {'m': m, 'planck_length': planck_length, 'choice': choice, 'alpha': alpha})

  @property
  def length(self):
    if self.kind != 'desitter':
      raise ShellError('Only de Sitter shells have a radius')
    return 1 / self.params['M']

  def energy(self, p):
    if self.kind != 'standard':
      raise ShellError(f'A {self.kind} shell does not define a single energy')
    return shell_energy(p, self.params['m'], self.params['branch'])

  def residual(self, energy, p, p4=None):
    """
    Return the residual at energy (or p0) `energy` and 3-momentum `p`. De Sitter shells also
    need the fifth component `p4`.

    """
    if self.kind == 'standard':
      return standard_residual(energy, p, self.params['m'])
    if self.kind == 'desitter':
      if p4 is None:
        raise ShellError('A de Sitter residual needs the fifth component p4')
      return desitter_residual((energy, *p, p4), self.params['M'])
    return deformed_residual(energy, p, self.params['m'], self.params['planck_length'], self.params['choice'],
      self.params['alpha'])


PRESETS = {
  'standard': ShellSpec.standard(1.0),
  'standard-negative': ShellSpec.standard(1.0, branch=-1),
  'desitter-unit': ShellSpec.desitter(mass_scale=1.0),
  'planck-linear': ShellSpec.deformed(1.0, choice='linear-E'),
  'planck-quadratic': ShellSpec.deformed(1.0, choice='quadratic-E'),
}


def _spec_from_document(document, path):
  assert isinstance(document, dict), f'{path} is not a dict'
  wpc_v.check_dict_attribute_exists_and_type(document, 'kind', str, path)
  kind = wpc_v.check_choice(document['kind'], SHELL_KINDS, f'{path}["kind"]')

  def number(name, default=None, **kwargs):
    if name not in document:
      assert default is not None, f'{path}["{name}"] is missing'
      return default
    return wpc_v.check_number(document[name], f'{path}["{name}"]', **kwargs)

  if kind == 'standard':
    branch = document.get('branch', 1)
    assert branch in (1, -1) and not isinstance(branch, bool), f'{path}["branch"] must be 1 or -1'
    return ShellSpec.standard(number('m', positive=True), branch)
  if kind == 'desitter':
    assert ('M' in document) != ('length' in document), f'{path} must define exactly one of "M" and "length"'
    if 'M' in document:
      return ShellSpec.desitter(mass_scale=number('M', positive=True, allow_zero=False))
    return ShellSpec.desitter(length=number('length', positive=True, allow_zero=False))
  choice = document.get('choice', 'none')
  wpc_v.check_choice(choice, deformation_choices(), f'{path}["choice"]')
  return ShellSpec.deformed(number('m', positive=True), number('planck_length', DEFAULT_PLANCK_LENGTH, positive=True,
    allow_zero=False), choice, number('alpha', 1.0))


def load_presets(location=None, aws_region=None):
  """
  Return the built-in presets, extended (or overridden) by the presets of the document at
  `location`, shaped as `{"shells": {"name": {"kind": "standard", "m": 1, "branch": 1}}}`.

  """
  presets = dict(PRESETS)
  if not location:
    return presets
  logger.debug(f'Loading the shell presets at "{location}"')
  try:
    document = load_file(location, aws_region, 'yaml')
  except Exception as e:
    raise ShellError(f'Failed to load the shell presets - {e}')
  try:
    assert isinstance(document, dict), 'presets is not a dict'
    wpc_v.check_dict_attribute_exists_and_type(document, 'shells', dict, 'presets')
    for name, item in document['shells'].items():
      presets[name] = _spec_from_document(item, f'presets["shells"]["{name}"]')
  except AssertionError as e:
    raise ShellError(f'The shell presets document is invalid - {e}')
  return presets


# Spinor operator

@dataclass(frozen=True, eq=False)
class GammaSet:
  """
  Gamma matrices gamma^0..gamma^3 and gamma^5 in the Dirac representation:

    gamma^0 = diag(1, 1, -1, -1), gamma^i = [[0, sigma_i], [-sigma_i, 0]], gamma^5 = [[0, 1], [1, 0]]

  """
  gammas: np.ndarray
  gamma5: np.ndarray

  @classmethod
  def dirac(cls):
    identity = np.eye(2, dtype=complex)
    zero = np.zeros((2, 2), dtype=complex)
    sigma = (
      np.array([[0, 1], [1, 0]], dtype=complex),
      np.array([[0, -1j], [1j, 0]], dtype=complex),
      np.array([[1, 0], [0, -1]], dtype=complex),
    )
    gammas = [np.block([[identity, zero], [zero, -identity]])]
    gammas.extend(np.block([[zero, s], [-s, zero]]) for s in sigma)
    gamma5 = np.block([[zero, identity], [identity, zero]])
    return cls(np.array(gammas), gamma5)

  def slash(self, p):
    """
    Return p_mu gamma^mu for the contravariant four-vector `p`.

    """
    p0, p1, p2, p3 = p
    return p0 * self.gammas[0] - p1 * self.gammas[1] - p2 * self.gammas[2] - p3 * self.gammas[3]

  def check(self):
    """
    Return the largest deviation from {gamma^mu, gamma^nu} = 2 g^{mu nu}, {gamma^mu, gamma^5} = 0
    and (gamma^5)^2 = 1.

    """
    identity = np.eye(4)
    metric = (1, -1, -1, -1)
    worst = 0.0
    for mu in range(4):
      for nu in range(4):
        anticommutator = self.gammas[mu] @ self.gammas[nu] + self.gammas[nu] @ self.gammas[mu]
        expected = 2 * metric[mu] * identity if mu == nu else 0 * identity
        worst = max(worst, float(np.max(np.abs(anticommutator - expected))))
      anticommutator = self.gammas[mu] @ self.gamma5 + self.gamma5 @ self.gammas[mu]
      worst = max(worst, float(np.max(np.abs(anticommutator))))
    worst = max(worst, float(np.max(np.abs(self.gamma5 @ self.gamma5 - identity))))
    return worst

  def block_operator(self, p, p4, mu, mass_term_reading='sinh_half'):
    """
    Return the 8x8 block-diagonal operator acting on the pair (Psi, Psi^R).

    """
    operator = np.zeros((8, 8), dtype=complex)
    operator[:4, :4] = dirac_operator(p, p4, mu, 'psi', self, mass_term_reading)
    operator[4:, 4:] = dirac_operator(p, p4, mu, 'psi_r', self, mass_term_reading)
    return operator


def mass_term(mu, mass_term_reading='sinh_half'):
  """
  Return 2 sinh(mu/2), or sinh(mu) for the `half_sinh` reading.

  """
  if mass_term_reading == 'sinh_half':
    return 2 * math.sinh(mu / 2)
  if mass_term_reading == 'half_sinh':
    return math.sinh(mu)
  raise ShellError(f'Unknown mass term reading "{mass_term_reading}"')


def dirac_operator(p, p4, mu, variant='psi', gammas=None, mass_term_reading='sinh_half'):
  """
  Return a I - p_mu gamma^mu - s (p4 - 1) gamma^5 with a the mass term and s = +1 for Psi, -1 for
  Psi^R.

  Args:
    p (sequence): Contravariant four-momentum
    p4 (float): Fifth momentum component
    mu (float): Mass parameter
    variant (str): `psi` or `psi_r`
    gammas (GammaSet): Defaults to the Dirac representation

  """
  if variant not in VARIANTS:
    raise ShellError(f'Unknown variant "{variant}", expected psi or psi_r')
  gammas = gammas or GammaSet.dirac()
  sign = 1 if variant == 'psi' else -1
  a = mass_term(mu, mass_term_reading)
  return a * np.eye(4, dtype=complex) - gammas.slash(p) - sign * (p4 - 1) * gammas.gamma5


def algebraic_residual(p, p4, mu, mass_term_reading='sinh_half'):
  """
  Return a^2 - p.p - (p4 - 1)^2, which vanishes exactly when the spinor operator is singular.

  """
  p0, p1, p2, p3 = p
  a = mass_term(mu, mass_term_reading)
  return a * a - (p0 * p0 - p1 * p1 - p2 * p2 - p3 * p3) - (p4 - 1) ** 2


def dirac_shell_residual(p, p4, mu, variant='psi', gammas=None, mass_term_reading='sinh_half'):
  """
  Return the determinant of the spinor operator and the algebraic residual. The determinant
  equals the square of the algebraic residual.

  """
  determinant = complex(np.linalg.det(dirac_operator(p, p4, mu, variant, gammas, mass_term_reading)))
  return determinant, algebraic_residual(p, p4, mu, mass_term_reading)


@dataclass(frozen=True)
class DeformedMass:
  mu: float
  m: float
  m4: float

  @property
  def identity_residual(self):
    return self.m4 ** 2 - self.m ** 2 - 1


def mass_relation(mu):
  """
  Return m = sinh(mu) and m4 = cosh(mu), so that m4^2 - m^2 = 1 and m4 = sqrt(1 + m^2).

  """
  return DeformedMass(mu, math.sinh(mu), math.cosh(mu))
