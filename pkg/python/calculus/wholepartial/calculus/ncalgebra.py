# SPDX-License-Identifier: MIT-0

"""
Noncommutative coordinate algebras whose commutators close at degree at most one:

  canonical:  [x_mu, x_nu] = i theta_{mu nu}
  lie:        [x_mu, x_nu] = i C^beta_{mu nu} x_beta

Structure data is stored real and the factor i is applied when a commutator is evaluated.

"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np

import wholepartial.shared.validation as wpc_v
from wholepartial.shared.util import load_file

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

ALGEBRA_KINDS = ('canonical', 'lie')
KAPPA_GENERATORS = ('t', 'x1', 'x2', 'x3')


class AlgebraError(Exception):
  pass


class AlgebraElement:
  """
  Scalar plus a linear combination of generators, with complex coefficients.

  """

  def __init__(self, generators, scalar=0, coefficients=None):
    self.generators = tuple(generators)
    self.scalar = complex(scalar)
    if coefficients is None:
      coefficients = np.zeros(len(self.generators), dtype=complex)
    self.coefficients = np.array(coefficients, dtype=complex)
    if self.coefficients.shape != (len(self.generators),):
      raise AlgebraError('The coefficients do not match the generators')
    if not (np.isfinite(self.scalar) and np.all(np.isfinite(self.coefficients))):
      raise AlgebraError('Algebra element coefficients must be finite')

  def _check_compatible(self, other):
    if not isinstance(other, AlgebraElement) or other.generators != self.generators:
      raise AlgebraError('Cannot combine elements of different algebras')

  def __add__(self, other):
    self._check_compatible(other)
    return AlgebraElement(self.generators, self.scalar + other.scalar, self.coefficients + other.coefficients)

  def __sub__(self, other):
    return self + (-other)

  def __neg__(self):
    return AlgebraElement(self.generators, -self.scalar, -self.coefficients)

  def __mul__(self, factor):
    if not isinstance(factor, (int, float, complex, np.number)):
      return NotImplemented
    return AlgebraElement(self.generators, self.scalar * factor, self.coefficients * factor)

  __rmul__ = __mul__

  def coefficient(self, generator):
    try:
      return complex(self.coefficients[self.generators.index(generator)])
    except ValueError:
      raise AlgebraError(f'Unknown generator "{generator}"')

  def norm(self):
    return float(np.sqrt(abs(self.scalar) ** 2 + np.sum(np.abs(self.coefficients) ** 2)))

  def is_zero(self, tol=0.0):
    return self.norm() <= tol

  def to_text(self):
    terms = []
    if self.scalar != 0:
      terms.append(_format_coefficient(self.scalar))
    for name, value in zip(self.generators, self.coefficients):
      if value != 0:
        terms.append(f'{_format_coefficient(value)}*{name}')
    return ' + '.join(terms) if terms else '0'


def _format_coefficient(value):
  value = complex(value)
  if value.imag == 0:
    return f'{value.real:.12g}'
  if value.real == 0:
    return f'{value.imag:.12g}*i'
  return f'({value.real:.12g}{value.imag:+.12g}*i)'


@dataclass(frozen=True, eq=False)
class CoordAlgebra:
  """
  Args:
    kind (str): `canonical` or `lie`
    generators (tuple): Generator names
    theta (ndarray): Real antisymmetric n x n matrix of a canonical algebra
    structure (ndarray): Real n x n x n array C[beta, mu, nu] of a Lie algebra, antisymmetric in
      (mu, nu)

  """
  kind: str
  generators: tuple
  theta: np.ndarray = None
  structure: np.ndarray = None

  def __post_init__(self):
    if self.kind not in ALGEBRA_KINDS:
      raise AlgebraError(f'Unknown algebra kind "{self.kind}"')
    generators = tuple(self.generators)
    if len(generators) == 0 or len(set(generators)) != len(generators):
      raise AlgebraError('Generators must be a non-empty list of unique names')
    object.__setattr__(self, 'generators', generators)
    n = len(generators)
    if self.kind == 'canonical':
      theta = np.array(self.theta, dtype=float)
      if theta.shape != (n, n):
        raise AlgebraError(f'theta must be a {n}x{n} matrix')
      if not np.array_equal(theta, -theta.T):
        raise AlgebraError('theta must be antisymmetric')
      object.__setattr__(self, 'theta', theta)
    else:
      structure = np.array(self.structure, dtype=float)
      if structure.shape != (n, n, n):
        raise AlgebraError(f'The structure constants must have shape {n}x{n}x{n}')
      if not np.array_equal(structure, -structure.transpose(0, 2, 1)):
        raise AlgebraError('The structure constants must be antisymmetric in their lower indices')
      object.__setattr__(self, 'structure', structure)
    if not np.all(np.isfinite(self.theta if self.kind == 'canonical' else self.structure)):
      raise AlgebraError('Structure data must be finite')

  @property
  def dimension(self):
    return len(self.generators)

  def index(self, generator):
    try:
      return self.generators.index(generator)
    except ValueError:
      raise AlgebraError(f'Unknown generator "{generator}", the algebra has {", ".join(self.generators)}')

  def zero(self):
    return AlgebraElement(self.generators)

  def element(self, generator, factor=1):
    coefficients = np.zeros(self.dimension, dtype=complex)
    coefficients[self.index(generator)] = factor
    return AlgebraElement(self.generators, 0, coefficients)


def canonical(theta, generators=None):
  theta = np.asarray(theta, dtype=float)
  if generators is None:
    generators = tuple(f'x{i}' for i in range(theta.shape[0]))
  return CoordAlgebra('canonical', generators, theta=theta)


def lie(structure, generators):
  return CoordAlgebra('lie', generators, structure=structure)


def kappa_minkowski(kappa, generators=KAPPA_GENERATORS):
  """
  Return the kappa-Minkowski algebra [x_m, t] = (i/kappa) x_m, [x_m, x_l] = 0. The first generator
  is the time coordinate.

  """
  if kappa == 0:
    raise AlgebraError('kappa must not be 0')
  n = len(generators)
  structure = np.zeros((n, n, n))
  for m in range(1, n):
    structure[m, m, 0] = 1 / kappa
    structure[m, 0, m] = -1 / kappa
  return CoordAlgebra('lie', generators, structure=structure)


def commutator(a, mu, nu):
  """
  Return [x_mu, x_nu] as an AlgebraElement.

  """
  i_mu, i_nu = a.index(mu), a.index(nu)
  if a.kind == 'canonical':
    return AlgebraElement(a.generators, 1j * a.theta[i_mu, i_nu])
  return AlgebraElement(a.generators, 0, 1j * a.structure[:, i_mu, i_nu])


def bracket(a, x, y):
  """
  Return [x, y] for two elements by bilinear extension. Scalars are central.

  """
  x._check_compatible(y)
  if x.generators != a.generators:
    raise AlgebraError('The elements do not belong to the algebra')
  if a.kind == 'canonical':
    return AlgebraElement(a.generators, 1j * (x.coefficients @ a.theta @ y.coefficients))
  coefficients = 1j * np.einsum('bmn,m,n->b', a.structure, x.coefficients, y.coefficients)
  return AlgebraElement(a.generators, 0, coefficients)


def jacobi_residual(a):
  """
  Return the largest norm of [[x_mu, x_nu], x_rho] + [[x_nu, x_rho], x_mu] + [[x_rho, x_mu], x_nu]
  over all generator triples.

  """
  x = [a.element(g) for g in a.generators]
  residual = 0.0
  for mu, nu, rho in itertools.product(range(a.dimension), repeat=3):
    total = (bracket(a, bracket(a, x[mu], x[nu]), x[rho]) + bracket(a, bracket(a, x[nu], x[rho]), x[mu])
      + bracket(a, bracket(a, x[rho], x[mu]), x[nu]))
    residual = max(residual, total.norm())
  logger.debug(f'Jacobi residual of the {a.kind} algebra over {", ".join(a.generators)}: {residual:.3e}')
  return residual


def from_document(document):
  """
  Build an algebra from a decoded algebra document:

    {"kind": "lie", "generators": ["t", "x1"], "C": [{"out": "x1", "pair": ["x1", "t"], "val": 1.0}]}
    {"kind": "canonical", "generators": ["x0", "x1"], "theta": [[0, 1], [-1, 0]]}

  Each `C` entry also fills its antisymmetric partner.

  """
  try:
    assert isinstance(document, dict), 'algebra is not a dict'
    wpc_v.check_dict_attribute_exists_and_type(document, 'kind', str, 'algebra')
    kind = wpc_v.check_choice(document['kind'], ALGEBRA_KINDS, 'algebra["kind"]')
    wpc_v.check_dict_attribute_exists_and_type(document, 'generators', list, 'algebra')
    wpc_v.check_list_item_type(document['generators'], str, 'algebra["generators"]')
    generators = tuple(document['generators'])
    assert len(generators) > 0 and len(set(generators)) == len(generators), 'algebra["generators"] must be unique names'
    n = len(generators)

    if kind == 'canonical':
      theta = wpc_v.check_square_matrix(document.get('theta'), n, 'algebra["theta"]')
      return CoordAlgebra('canonical', generators, theta=np.array(theta))

    structure = np.zeros((n, n, n))
    given = np.zeros((n, n, n), dtype=bool)
    wpc_v.check_dict_attribute_exists_and_type(document, 'C', list, 'algebra')
    for i_item, item in wpc_v.enumerate_list_and_check_item_type(document['C'], dict, 'algebra["C"]'):
      path = f'algebra["C"][{i_item}]'
      wpc_v.check_dict_attribute_exists_and_type(item, 'out', str, path)
      wpc_v.check_dict_attribute_exists_and_type(item, 'pair', list, path)
      assert len(item['pair']) == 2, f'{path}["pair"] must name two generators'
      for name in (item['out'], *item['pair']):
        assert name in generators, f'{path} references the unknown generator "{name}"'
      value = wpc_v.check_number(item.get('val'), f'{path}["val"]')
      beta = generators.index(item['out'])
      mu, nu = (generators.index(name) for name in item['pair'])
      assert mu != nu or value == 0, f'{path} gives a non-zero bracket of a generator with itself'
      for lower, sign in (((mu, nu), 1), ((nu, mu), -1)):
        if given[(beta, *lower)]:
          assert structure[(beta, *lower)] == sign * value, f'{path} contradicts an earlier entry'
        structure[(beta, *lower)] = sign * value
        given[(beta, *lower)] = True
    return CoordAlgebra('lie', generators, structure=structure)
  except AssertionError as e:
    raise AlgebraError(f'The algebra document is invalid - {e}')


def load_algebra(location, aws_region=None):
  logger.debug(f'Loading the algebra at "{location}"')
  try:
    document = load_file(location, aws_region, 'yaml')
  except Exception as e:
    raise AlgebraError(f'Failed to load the algebra - {e}')
  return from_document(document)
