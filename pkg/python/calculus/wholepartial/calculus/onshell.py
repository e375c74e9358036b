# SPDX-License-Identifier: MIT-0

"""
Charts of base and derived variables and the whole-partial derivative built on them.

A derived variable `d` carries its defining expression in base symbols and its gradients
dd/db written in mixed form, i.e. possibly containing `d` itself (dE/dp1 is stored as
`p1/E`). The whole-partial derivative with respect to a base variable `b` is

  D_b f = df/db + sum_d df/dd * grad(d, b)

where every partial is explicit. With respect to a derived variable it is the explicit partial.
Gradients are never substituted, so D_E (p1/E) = -p1/E^2 is not zero.

"""

import logging
import re

import numpy as np

import wholepartial.shared.validation as wpc_v
from wholepartial.calculus.expr import (ONE, EvaluationError, SamplerExhaustedError, add, as_expr, diff_explicit,
  div, evaluate, evaluate_samples, free_symbols, is_zero, mul, parse, power, relative_residual, sub, subst)
from wholepartial.calculus.sampling import BoxSampler
from wholepartial.shared.util import load_file

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

SYMBOL_PATTERN = r'^[A-Za-z_][A-Za-z0-9_]*$'
CONSISTENCY_TOLERANCE = 1e-9


class ChartError(Exception):
  pass


class DerivedVariable:
  """
  A derived variable of a chart.

  Args:
    name (str): Symbol name
    definition (Expr or str): Defining expression in base symbols, before the branch sign
    branch (int): +1 or -1, multiplies the defining expression
    gradients (dict): Base variable name to the mixed-form gradient expression

  """

  def __init__(self, name, definition, branch=1, gradients=None):
    if branch not in (1, -1):
      raise ChartError(f'The branch of "{name}" must be 1 or -1')
    self.name = name
    self.branch = branch
    self.raw_definition = as_expr(definition)
    self.definition = self.raw_definition if branch == 1 else mul(-1, self.raw_definition)
    self.gradients = {base: as_expr(grad) for base, grad in (gradients or {}).items()}

  def gradient(self, base):
    return self.gradients.get(base)


class Chart:
  """
  Immutable set of base variables and derived variables. Only one level of derivation is
  supported: defining expressions reference base symbols only.

  """

  def __init__(self, base, derived=()):
    self.base = tuple(base)
    self.derived = tuple(derived)
    names = self.base + tuple(d.name for d in self.derived)
    if len(set(names)) != len(names):
      raise ChartError('Variable names must be unique across base and derived variables')
    for name in names:
      if not re.match(SYMBOL_PATTERN, name) or name == 'i':
        raise ChartError(f'"{name}" is not a valid variable name')
    for d in self.derived:
      unknown = free_symbols(d.definition) - set(self.base)
      if unknown:
        raise ChartError(f'The definition of "{d.name}" references non-base symbols: {", ".join(sorted(unknown))}')
      for b in d.gradients:
        if b not in self.base:
          raise ChartError(f'The gradient of "{d.name}" is given with respect to "{b}", which is not a base variable')
    self._derived_by_name = {d.name: d for d in self.derived}

  @classmethod
  def standard(cls, branch=1, include_mass_gradient=True):
    """
    Return the standard on-shell chart: base p1, p2, p3, m and E = branch * sqrt(m^2 + p^2)
    with gradients p_i/E (and m/E unless `include_mass_gradient` is False).

    """
    gradients = {f'p{i}': f'p{i}/E' for i in (1, 2, 3)}
    if include_mass_gradient:
      gradients['m'] = 'm/E'
    energy = DerivedVariable('E', 'sqrt(m^2+p1^2+p2^2+p3^2)', branch, gradients)
    return cls(('p1', 'p2', 'p3', 'm'), (energy,))

  @classmethod
  def from_document(cls, document):
    """
    Build a chart from a decoded chart document, for example:

      {"base": ["p1","p2","p3","m"],
       "derived": [{"name": "E", "def": "sqrt(m^2+p1^2+p2^2+p3^2)", "branch": 1,
                    "grad": {"p1": "p1/E", "p2": "p2/E", "p3": "p3/E", "m": "m/E"}}]}

    Expression syntax errors raise a ParseError, structural errors a ChartError.

    """
    try:
      assert isinstance(document, dict), 'chart is not a dict'
      wpc_v.check_dict_attribute_exists_and_type(document, 'base', list, 'chart')
      wpc_v.check_list_item_type(document['base'], str, 'chart["base"]')
      derived = []
      if wpc_v.check_dict_attribute_exists_and_type(document, 'derived', list, 'chart', optional=True):
        for i_item, item in wpc_v.enumerate_list_and_check_item_type(document['derived'], dict, 'chart["derived"]'):
          path = f'chart["derived"][{i_item}]'
          wpc_v.check_dict_attribute_exists_and_type(item, 'name', str, path)
          wpc_v.check_dict_attribute_exists_and_type(item, 'def', str, path)
          branch = 1
          if wpc_v.check_dict_attribute_exists_and_type(item, 'branch', int, path, optional=True):
            branch = item['branch']
            assert branch in (1, -1) and not isinstance(branch, bool), f'{path}["branch"] must be 1 or -1'
          gradients = {}
          if wpc_v.check_dict_attribute_exists_and_type(item, 'grad', dict, path, optional=True):
            for base, grad in wpc_v.enumerate_dict_and_check_item_type(item['grad'], str, f'{path}["grad"]'):
              gradients[base] = parse(grad)
          derived.append(DerivedVariable(item['name'], parse(item['def']), branch, gradients))
    except AssertionError as e:
      raise ChartError(f'The chart document is invalid - {e}')
    chart = cls(document['base'], derived)
    missing = chart.missing_gradients()
    if missing:
      pairs = ', '.join(f'"{name}" with respect to "{base}"' for name, base in missing)
      raise ChartError(f'The chart document is missing the gradients of {pairs}')
    return chart

  @property
  def variables(self):
    return self.base + tuple(d.name for d in self.derived)

  def is_base(self, name):
    return name in self.base

  def is_derived(self, name):
    return name in self._derived_by_name

  def derived_variable(self, name):
    try:
      return self._derived_by_name[name]
    except KeyError:
      raise ChartError(f'"{name}" is not a derived variable of the chart')

  def check_variable(self, name):
    if not (self.is_base(name) or self.is_derived(name)):
      raise ChartError(f'Unknown variable "{name}", the chart has {", ".join(self.variables)}')

  def missing_gradients(self):
    """
    Return the `(derived, base)` pairs whose defining expression depends on the base variable but
    have no gradient. Whole-partial sums treat a missing gradient as 0.

    """
    return [(d.name, b) for d in self.derived for b in self.base
      if d.gradient(b) is None and not is_zero(diff_explicit(d.definition, b))]

  def without_gradients(self, names):
    """
    Return a copy of the chart where gradients with respect to the base variables `names` are
    dropped, so these variables no longer drive the derived ones in whole-partial sums.

    """
    derived = []
    for d in self.derived:
      gradients = {b: g for b, g in d.gradients.items() if b not in names}
      derived.append(DerivedVariable(d.name, d.raw_definition, d.branch, gradients))
    return Chart(self.base, derived)

  def on_shell(self, point):
    """
    Complete `point` with the derived variables it does not bind, evaluated from their defining
    expressions. Values already bound to a derived symbol are kept.

    """
    bindings = dict(point)
    for d in self.derived:
      if d.name not in bindings:
        bindings[d.name] = evaluate(d.definition, point)
    return bindings

  def evaluate(self, e, point):
    """
    Evaluate `e` at the on-shell completion of `point`.

    """
    return evaluate(e, self.on_shell(point))

  def consistency_residual(self, sampler, trials=20):
    """
    Return the largest relative residual between the explicit derivative of each defining
    expression and its mixed-form gradient with the derived symbol substituted.

    Args:
      sampler: Sampler over the base variables
      trials (int): Number of sampled base points

    """
    points = sampler.draw(trials)
    worst = 0.0
    for d in self.derived:
      for b, grad in d.gradients.items():
        explicit = evaluate_samples(diff_explicit(d.definition, b), points)
        mixed = evaluate_samples(subst(grad, d.name, d.definition), points)
        valid = np.isfinite(explicit) & np.isfinite(mixed)
        if not np.any(valid):
          raise SamplerExhaustedError(f'No regular point to check the gradient of "{d.name}" with respect to "{b}"')
        residual = float(np.max(relative_residual(explicit[valid], mixed[valid])))
        logger.debug(f'Gradient of "{d.name}" with respect to "{b}": residual {residual:.3e}')
        worst = max(worst, residual)
    return worst


def load_chart(location, aws_region=None, seed=0):
  """
  Load a chart document (JSON or YAML) and check that its gradients are consistent with the
  defining expressions on positive base values in [0.1, 2].

  Args:
    location (str): Local path or `s3://bucket/key`
    aws_region (str): AWS region of the bucket
    seed (int): Seed of the consistency sampler

  """
  logger.debug(f'Loading the chart at "{location}"')
  try:
    document = load_file(location, aws_region, 'yaml')
  except Exception as e:
    raise ChartError(f'Failed to load the chart - {e}')
  chart = Chart.from_document(document)
  sampler = BoxSampler({b: (0.1, 2.0) for b in chart.base}, seed=seed)
  residual = chart.consistency_residual(sampler)
  if residual > CONSISTENCY_TOLERANCE:
    raise ChartError(f'The chart gradients are inconsistent with the defining expressions (residual {residual:.3e})')
  return chart


def whole_partial(c, f, v):
  """
  Return the whole-partial derivative of `f` with respect to the chart variable `v`.

  Args:
    c (Chart)
    f (Expr or str)
    v (str): Base or derived variable of `c`

  """
  c.check_variable(v)
  f = as_expr(f)
  if c.is_derived(v):
    return diff_explicit(f, v)
  terms = [diff_explicit(f, v)]
  for d in c.derived:
    grad = d.gradient(v)
    if grad is None:
      continue
    df_dd = diff_explicit(f, d.name)
    if not is_zero(df_dd):
      terms.append(mul(df_dd, grad))
  return add(*terms)


class DiffOp:
  """
  Ordered composition of whole-partial operators. `DiffOp(c, ['p1', 'E'])` is D_p1 D_E: the
  rightmost operator is applied first.

  """

  def __init__(self, chart, variables):
    for v in variables:
      chart.check_variable(v)
    self.chart = chart
    self.steps = tuple((v, 'base' if chart.is_base(v) else 'derived') for v in variables)

  @property
  def variables(self):
    return tuple(v for v, _ in self.steps)

  def compose(self, other):
    """
    Return self ∘ other, i.e. `other` is applied first.

    """
    if other.chart is not self.chart:
      raise ChartError('Cannot compose operators defined on different charts')
    return DiffOp(self.chart, self.variables + other.variables)

  def apply(self, f):
    f = as_expr(f)
    for v in reversed(self.variables):
      f = whole_partial(self.chart, f, v)
    return f


def commutator_apply(c, v1, v2, f):
  """
  Return [D_v1, D_v2] f = D_v1(D_v2 f) - D_v2(D_v1 f).

  """
  first = DiffOp(c, (v1, v2)).apply(f)
  second = DiffOp(c, (v2, v1)).apply(f)
  return sub(first, second)


def _energy_name(c):
  if c.is_derived('E'):
    return 'E'
  raise ChartError('The chart has no derived variable "E"')


def _axis_symbol(axis):
  if axis not in (1, 2, 3):
    raise ChartError(f'Axis must be 1, 2 or 3, got {axis}')
  return f'p{axis}'


def commutator_closed_form(c, axis, f):
  """
  Return (p_i/E^2) * df/dE, the closed form of [D_pi, D_E] f.

  """
  energy = _energy_name(c)
  p = _axis_symbol(axis)
  return mul(div(p, power(energy, 2)), diff_explicit(f, energy))


def commutator_coefficient_residual(c, axis, f, sampler, trials=200):
  """
  Return the largest relative residual between [D_pi, D_E] f and its closed form over `trials`
  on-shell samples. Singular samples are skipped.

  Args:
    c (Chart): Chart with a derived variable E
    axis (int): 1, 2 or 3
    f (Expr or str)
    sampler: On-shell sampler binding the chart variables

  """
  f = as_expr(f)
  lhs = commutator_apply(c, _axis_symbol(axis), _energy_name(c), f)
  rhs = commutator_closed_form(c, axis, f)
  if is_zero(lhs) and is_zero(rhs):
    return 0.0
  points = sampler.draw(trials)
  lhs_values = evaluate_samples(lhs, points)
  rhs_values = evaluate_samples(rhs, points)
  valid = np.isfinite(lhs_values) & np.isfinite(rhs_values)
  if not np.any(valid):
    raise SamplerExhaustedError(f'All {trials} sampled points are singular')
  residual = float(np.max(relative_residual(lhs_values[valid], rhs_values[valid])))
  logger.debug(f'Commutator along axis {axis}: residual {residual:.3e} over {int(np.sum(valid))} points')
  return residual


def momentum_commutator_apply(c, i, j, f, pcomm):
  """
  Return (1/E^3) * df/dE * pcomm, the commutator [D_pi, D_pj] f when the momenta themselves do
  not commute and [p_i, p_j] = pcomm.

  """
  _axis_symbol(i)
  _axis_symbol(j)
  energy = _energy_name(c)
  pcomm = as_expr(pcomm)
  df_de = diff_explicit(f, energy)
  if is_zero(df_de) or is_zero(pcomm):
    return as_expr(0)
  return mul(div(ONE, power(energy, 3)), df_de, pcomm)


def feynman_pcomm(i, j):
  """
  Return i * epsilon_ijk * B_k as an expression (hbar = 1).

  """
  _axis_symbol(i)
  _axis_symbol(j)
  if i == j:
    return as_expr(0)
  k = 6 - i - j
  sign = 1 if (i, j, k) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)) else -1
  return mul(sign, 1j, f'B{k}')


def fd_whole_partial(c, f, v, point, h=1e-5):
  """
  Central finite difference of `f` along the motion of `v`. Moving a base variable recomputes
  every derived variable from its definition, moving a derived variable shifts its slot only.

  Args:
    c (Chart)
    f (Expr or str)
    v (str): Chart variable
    point (dict): Binds every base variable (and optionally the derived slots)
    h (float): Step, greater than 0

  """
  if not h > 0:
    raise ValueError('The finite-difference step must be greater than 0')
  c.check_variable(v)
  f = as_expr(f)
  if c.is_base(v) and v not in point:
    raise EvaluationError(f'The point does not bind the base variable "{v}"')

  if c.is_base(v):
    base_point = {name: value for name, value in point.items() if not c.is_derived(name)}

    def at(shift):
      shifted = dict(base_point)
      shifted[v] = shifted[v] + shift
      return c.evaluate(f, shifted)
  else:
    bindings = c.on_shell(point)

    def at(shift):
      shifted = dict(bindings)
      shifted[v] = shifted[v] + shift
      return evaluate(f, shifted)

  return (at(h) - at(-h)) / (2 * h)


def fd_errors(c, f, v, point, steps):
  """
  Return the exact whole-partial value at `point` and the absolute errors of the finite
  difference for each step of `steps`.

  """
  exact = c.evaluate(whole_partial(c, f, v), point)
  errors = [abs(fd_whole_partial(c, f, v, point, h) - exact) for h in steps]
  return exact, errors


def convergence_order(steps, errors, noise=0.0):
  """
  Return the median of the log-log slopes between successive (step, error) pairs. A pair whose
  error at the finer step h is at most `noise / h` is dominated by rounding and is skipped.
  Returns None when no pair is usable.

  Args:
    steps (sequence): Decreasing steps
    errors (sequence): Absolute errors of the finite difference at each step
    noise (float): Rounding level of the function values, e.g. 100 * eps * (1 + |f|)

  """
  slopes = []
  for (h0, e0), (h1, e1) in zip(zip(steps, errors), zip(steps[1:], errors[1:])):
    if e0 <= 0 or e1 <= 0 or e1 <= noise / h1:
      continue
    slopes.append((np.log(e0) - np.log(e1)) / (np.log(h0) - np.log(h1)))
  if not slopes:
    return None
  return float(np.median(slopes))


def operator_jacobi_residual(c, variables, f, sampler, trials=20):
  """
  Evaluate the Jacobi combination [[D1, D2], D3] f + [[D2, D3], D1] f + [[D3, D1], D2] f
  on-shell and return its largest magnitude relative to the size of its terms.

  Args:
    c (Chart)
    variables (tuple): Three chart variables
    f (Expr or str)
    sampler: On-shell sampler

  """
  if len(variables) != 3:
    raise ChartError('The Jacobi combination takes three variables')
  for v in variables:
    c.check_variable(v)
  f = as_expr(f)

  def nested(x, y, z):
    return sub(commutator_apply(c, x, y, whole_partial(c, f, z)), whole_partial(c, commutator_apply(c, x, y, f), z))

  a, b, d = variables
  terms = [nested(a, b, d), nested(b, d, a), nested(d, a, b)]
  points = sampler.draw(trials)
  values = [evaluate_samples(t, points) for t in terms]
  total = values[0] + values[1] + values[2]
  scale = np.maximum.reduce([np.abs(v) for v in values])
  valid = np.isfinite(total) & np.isfinite(scale)
  if not np.any(valid):
    raise SamplerExhaustedError(f'All {trials} sampled points are singular')
  residual = float(np.max(np.abs(total[valid]) / (1 + scale[valid])))
  logger.debug(f'Operator Jacobi residual for {variables}: {residual:.3e}')
  return residual
