# SPDX-License-Identifier: MIT-0

"""
Helicity-basis polarization vectors of a massive vector field, the electric and magnetic fields
derived from them and the longitudinal field tensor that weights the time-position commutator.

Index conventions:
  - Polarization vectors are stored with lower (covariant) indices, as in the closed forms.
  - The metric is diag(+1, -1, -1, -1). p^mu = (E, p1, p2, p3).
  - F^{mu nu} = -i (p^mu eps^nu - p^nu eps^mu), E^i = F^{i0}, B^i = -1/2 eps_ijk F^{jk}.

"""

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from wholepartial.calculus.expr import EvaluationError, diff_explicit, evaluate, mul
from wholepartial.calculus.onshell import commutator_apply

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
  LEVI_CIVITA[_i, _j, _k] = 1.0
  LEVI_CIVITA[_i, _k, _j] = -1.0


class KinematicsError(EvaluationError):
  pass


class Helicity(enum.Enum):
  PLUS = '+1'
  MINUS = '-1'
  LONGITUDINAL = '0'
  TIMELIKE = '0t'

  @classmethod
  def parse(cls, value):
    aliases = {'+1': cls.PLUS, '1': cls.PLUS, '+': cls.PLUS, '-1': cls.MINUS, '-': cls.MINUS,
      '0': cls.LONGITUDINAL, '0t': cls.TIMELIKE, '0_t': cls.TIMELIKE, 't': cls.TIMELIKE}
    if isinstance(value, cls):
      return value
    try:
      return aliases[str(value).strip()]
    except KeyError:
      raise ValueError(f'Unknown helicity "{value}", expected one of +1, -1, 0, 0t')


class Kinematics:
  """
  On-shell kinematics of a particle with real momentum (p1, p2, p3) and mass m > 0. The energy
  is the positive root.

  Args:
    p1, p2, p3 (float): Momentum components
    m (float): Mass
    right_handed_scalar (str): `p1+ip2` for p_r = p1 + i p2 and p_l = p1 - i p2, `p1-ip2` for
      the swapped assignment

  """

  def __init__(self, p1, p2, p3, m, right_handed_scalar='p1+ip2'):
    values = (p1, p2, p3, m)
    if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in values):
      raise KinematicsError('Momentum components and mass must be finite real numbers')
    if m <= 0:
      raise KinematicsError(f'The mass must be greater than 0, got {m}')
    if right_handed_scalar not in ('p1+ip2', 'p1-ip2'):
      raise ValueError(f'Unknown right-handed scalar convention "{right_handed_scalar}"')
    self.momentum = np.array([p1, p2, p3], dtype=float)
    self.m = float(m)
    self.right_handed_scalar = right_handed_scalar

  @property
  def p(self):
    return float(np.linalg.norm(self.momentum))

  @property
  def p_perp(self):
    return float(math.hypot(self.momentum[0], self.momentum[1]))

  @property
  def energy(self):
    return math.sqrt(self.m ** 2 + self.p ** 2)

  @property
  def p_r(self):
    p1, p2 = self.momentum[0], self.momentum[1]
    return complex(p1, p2) if self.right_handed_scalar == 'p1+ip2' else complex(p1, -p2)

  @property
  def p_l(self):
    return self.p_r.conjugate()

  @property
  def phase(self):
    """e^{i phi} = p_r / p_perp, undefined on the p3 axis."""
    self._require_off_axis()
    return self.p_r / self.p_perp

  @property
  def four_momentum(self):
    """Contravariant p^mu."""
    return np.array([self.energy, *self.momentum], dtype=complex)

  def point(self):
    """Bindings of the standard chart at these kinematics, E included."""
    p1, p2, p3 = (float(v) for v in self.momentum)
    return {'p1': p1, 'p2': p2, 'p3': p3, 'm': self.m, 'E': self.energy}

  def _require_off_axis(self):
    if self.p_perp == 0:
      raise KinematicsError('Transverse polarizations are singular on the p3 axis (p_perp = 0)')

  def _require_moving(self):
    if self.p == 0:
      raise KinematicsError('The longitudinal polarization is singular at p = 0')


@dataclass(frozen=True, eq=False)
class FourVector:
  components: np.ndarray
  covariant: bool = True

  def __post_init__(self):
    components = np.asarray(self.components, dtype=complex)
    if components.shape != (4,):
      raise ValueError('A four-vector has 4 components')
    if not np.all(np.isfinite(components)):
      raise KinematicsError('Non-finite four-vector component')
    object.__setattr__(self, 'components', components)

  def raised(self):
    """Contravariant components (the inverse of `lowered`)."""
    if not self.covariant:
      return self
    return FourVector(METRIC @ self.components, covariant=False)

  def lowered(self):
    if self.covariant:
      return self
    return FourVector(METRIC @ self.components, covariant=True)

  def minkowski_square(self):
    return minkowski_dot(self, self, conjugate=True).real

  def __getitem__(self, index):
    return self.components[index]


@dataclass(frozen=True, eq=False)
class FieldTriple:
  electric: np.ndarray
  magnetic: np.ndarray
  label: Helicity = None

  def __post_init__(self):
    for name in ('electric', 'magnetic'):
      value = np.asarray(getattr(self, name), dtype=complex)
      if value.shape != (3,) or not np.all(np.isfinite(value)):
        raise KinematicsError(f'The {name} field must be a finite 3-vector')
      object.__setattr__(self, name, value)

  def as_tensor(self):
    """
    Return the antisymmetric contravariant tensor F^{mu nu} with F^{i0} = E^i and
    F^{jk} = -eps_jkl B^l.

    """
    tensor = np.zeros((4, 4), dtype=complex)
    tensor[1:, 0] = self.electric
    tensor[0, 1:] = -self.electric
    tensor[1:, 1:] = -np.einsum('jkl,l->jk', LEVI_CIVITA, self.magnetic)
    return tensor

  def max_difference(self, other):
    return float(max(np.max(np.abs(self.electric - other.electric)), np.max(np.abs(self.magnetic - other.magnetic))))


def minkowski_dot(a, b, conjugate=False):
  """
  Return sum_mu g_mu_mu a_mu b_mu (with b conjugated if `conjugate`). Both vectors must carry
  their indices at the same position.

  """
  if a.covariant != b.covariant:
    raise ValueError('minkowski_dot expects two vectors with indices at the same position')
  other = np.conj(b.components) if conjugate else b.components
  return complex(np.sum(np.diag(METRIC) * a.components * other))


def transversality(k, eps):
  """
  Return p^mu eps_mu, the full contraction of the four-momentum with the polarization vector.

  """
  return complex(np.sum(k.four_momentum * eps.lowered().components))


def pol_vector(k, helicity):
  """
  Return the covariant polarization vector eps_mu(p, helicity).

  Args:
    k (Kinematics)
    helicity (Helicity or str)

  """
  helicity = Helicity.parse(helicity)
  p1, p2, p3 = k.momentum
  energy = k.energy

  if helicity in (Helicity.PLUS, Helicity.MINUS):
    k._require_off_axis()
    p, p_perp = k.p, k.p_perp
    if helicity is Helicity.PLUS:
      prefactor = k.phase / (math.sqrt(2) * p)
      spatial = [(p1 * p3 - 1j * p2 * p) / p_perp, (p2 * p3 + 1j * p1 * p) / p_perp, -p_perp]
    else:
      prefactor = k.phase.conjugate() / (math.sqrt(2) * p)
      spatial = [(-p1 * p3 - 1j * p2 * p) / p_perp, (-p2 * p3 + 1j * p1 * p) / p_perp, p_perp]
    return FourVector(prefactor * np.array([0, *spatial], dtype=complex))

  if helicity is Helicity.LONGITUDINAL:
    k._require_moving()
    p = k.p
    return FourVector(np.array([p, *(-energy / p * k.momentum)], dtype=complex) / k.m)

  return FourVector(np.array([energy, -p1, -p2, -p3], dtype=complex) / k.m)


def fields_closed(k, helicity):
  """
  Return the electric and magnetic fields of the mode `helicity` in closed form, with
  p~ = (p2, -p1, -i p). The timelike mode is pure gauge and has vanishing fields.

  """
  helicity = Helicity.parse(helicity)
  momentum = k.momentum.astype(complex)
  p, energy = k.p, k.energy
  sqrt2 = math.sqrt(2)

  if helicity in (Helicity.PLUS, Helicity.MINUS):
    k._require_off_axis()
    p3 = momentum[2]
    p_tilde = np.array([momentum[1], -momentum[0], -1j * p], dtype=complex)
    if helicity is Helicity.PLUS:
      p_l = k.p_l
      electric = -1j * energy * p3 / (sqrt2 * p * p_l) * momentum - energy / (sqrt2 * p_l) * p_tilde
      magnetic = -p3 / (sqrt2 * p_l) * momentum + 1j * p / (sqrt2 * p_l) * p_tilde
    else:
      p_r = k.p_r
      electric = 1j * energy * p3 / (sqrt2 * p * p_r) * momentum - energy / (sqrt2 * p_r) * np.conj(p_tilde)
      magnetic = -p3 / (sqrt2 * p_r) * momentum - 1j * p / (sqrt2 * p_r) * np.conj(p_tilde)
    return FieldTriple(electric, magnetic, helicity)

  if helicity is Helicity.LONGITUDINAL:
    return longitudinal_tensor(k)

  return FieldTriple(np.zeros(3), np.zeros(3), helicity)


def fields_from_potential(k, eps, label=None):
  """
  Derive the fields of the potential `eps` from F^{mu nu} = -i (p^mu eps^nu - p^nu eps^mu).

  Args:
    k (Kinematics)
    eps (FourVector): Polarization vector, either index position
    label (Helicity): Label of the returned triple

  """
  p_up = k.four_momentum
  eps_up = eps.raised().components
  tensor = -1j * (np.outer(p_up, eps_up) - np.outer(eps_up, p_up))
  electric = tensor[1:, 0]
  magnetic = -0.5 * np.einsum('ijk,jk->i', LEVI_CIVITA, tensor[1:, 1:])
  return FieldTriple(electric, magnetic, label)


def longitudinal_tensor(k):
  """
  Return the fields of the longitudinal mode, E = (i m / p) p and B = 0. Use `as_tensor()` for
  the 4x4 form.

  """
  k._require_moving()
  electric = 1j * k.m / k.p * k.momentum.astype(complex)
  return FieldTriple(electric, np.zeros(3), Helicity.LONGITUDINAL)


@dataclass
class AnsatzResult:
  """
  Coefficients of df/dE in [x^0, x^i] f keyed by (0, i), the weights omega_i extracted by
  dividing them by the longitudinal tensor (None when undefined on that axis) and the relative
  size of the cross product between the coefficient vector and the longitudinal electric field.

  """
  coefficients: dict
  omega: dict
  parallel_residual: float

  @property
  def omega_spread(self):
    """Largest relative difference between the weights of two axes, 0 with fewer than two."""
    values = [w for w in self.omega.values() if w is not None]
    if len(values) < 2:
      return 0.0
    scale = 1 + max(abs(w) for w in values)
    return float(max(abs(a - b) for a in values for b in values) / scale)


def ansatz_commutator(c, k, f, operator_factor=1j, tensor_component='i0'):
  """
  Evaluate [x^0, x^i] f with x^mu = operator_factor * D_{p_mu} on the standard chart `c` at the
  kinematics `k`, read off the coefficient of df/dE per axis and the weight omega_i that makes
  the commutator proportional to the longitudinal field tensor.

  Args:
    c (Chart): Standard chart
    k (Kinematics)
    f (Expr or str)
    operator_factor (complex): Factor of the position operator
    tensor_component (str): `i0` divides by F^{i0}, `0i` by F^{0i} = -F^{i0}

  """
  if tensor_component not in ('i0', '0i'):
    raise ValueError(f'Unknown tensor component "{tensor_component}"')
  point = c.on_shell(k.point())
  df_de = evaluate(diff_explicit(f, 'E'), point)
  longitudinal = longitudinal_tensor(k).as_tensor()

  coefficients = {}
  omega = {}
  for axis in (1, 2, 3):
    if df_de == 0:
      coefficients[(0, axis)] = 0j
      omega[axis] = None
      continue
    bracket = mul(operator_factor ** 2, commutator_apply(c, 'E', f'p{axis}', f))
    coefficient = evaluate(bracket, point) / df_de
    coefficients[(0, axis)] = coefficient
    component = longitudinal[axis, 0] if tensor_component == 'i0' else longitudinal[0, axis]
    omega[axis] = None if component == 0 else coefficient / component

  vector = np.array([coefficients[(0, axis)] for axis in (1, 2, 3)])
  field = longitudinal[1:, 0]
  cross = np.linalg.norm(np.cross(vector, field))
  parallel_residual = float(cross / (1 + np.linalg.norm(vector) * np.linalg.norm(field)))
  logger.debug(f'Ansatz coefficients {coefficients}, omega {omega}, parallel residual {parallel_residual:.3e}')
  return AnsatzResult(coefficients, omega, parallel_residual)
