# SPDX-License-Identifier: MIT-0

"""
Seeded samplers of binding points and a generator of random smooth expressions. Every random
check of the toolbox draws from these so that a seed reproduces a run bit for bit.

"""

import logging
from fractions import Fraction

import numpy as np

from wholepartial.calculus.expr import (Add, Const, Div, Func, Mul, Neg, Pow, SamplerExhaustedError, Sym,
  evaluate_samples)

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

DEFAULT_MOMENTUM_RANGE = (0.1, 2.0)
DEFAULT_MASS_RANGE = (0.5, 2.0)

__all__ = ['BoxSampler', 'OnShellSampler', 'SamplerExhaustedError', 'random_expr', 'momentum_sampler']


class BoxSampler:
  """
  Draw symbol values uniformly from intervals. Symbols listed in `signed` get a random sign, so
  |value| is uniform in the interval.

  """

  def __init__(self, ranges, seed=0, signed=()):
    """
    Args:
      ranges (dict): Symbol name to a `(low, high)` interval
      seed (int): Seed of the numpy generator
      signed (iterable): Symbols whose sign is drawn at random

    """
    self._ranges = dict(ranges)
    self._signed = frozenset(signed)
    self.seed = seed
    self._rng = np.random.default_rng(seed)

  @property
  def symbols(self):
    return tuple(self._ranges)

  def draw(self, n):
    points = {}
    for name, (low, high) in self._ranges.items():
      values = self._rng.uniform(low, high, size=n)
      if name in self._signed:
        values = values * self._rng.choice((-1.0, 1.0), size=n)
      points[name] = values
    return points


def momentum_sampler(seed=0, momentum_range=DEFAULT_MOMENTUM_RANGE, mass_range=DEFAULT_MASS_RANGE):
  """
  Return a BoxSampler over p1, p2, p3 (|p_i| in `momentum_range`, random sign) and m.

  """
  ranges = {'p1': momentum_range, 'p2': momentum_range, 'p3': momentum_range, 'm': mass_range}
  return BoxSampler(ranges, seed=seed, signed=('p1', 'p2', 'p3'))


class OnShellSampler:
  """
  Draw base points from `base_sampler` and complete them with the derived variables of `chart`
  evaluated from their defining expressions. Points where a definition is singular are dropped
  and redrawn.

  """

  def __init__(self, chart, base_sampler, max_rounds=10):
    self._chart = chart
    self._base_sampler = base_sampler
    self._max_rounds = max_rounds

  def draw(self, n):
    collected = []
    remaining = n
    for _ in range(self._max_rounds):
      points = self._base_sampler.draw(remaining)
      valid = np.ones(remaining, dtype=bool)
      for derived in self._chart.derived:
        values = evaluate_samples(derived.definition, points)
        valid &= np.isfinite(values)
        points[derived.name] = values
      if np.any(valid):
        collected.append({name: values[valid] for name, values in points.items()})
      remaining -= int(np.sum(valid))
      if remaining == 0:
        break
    if remaining > 0:
      raise SamplerExhaustedError(f'Could not draw {n} on-shell points after {self._max_rounds} rounds')
    return {name: np.concatenate([c[name] for c in collected]) for name in collected[0]}


def random_expr(rng, symbols, depth=3):
  """
  Return a random smooth expression over `symbols`. Denominators are kept away from zero and
  function arguments are scaled down, so the values stay moderate on the sampler domains.

  Args:
    rng: numpy Generator
    symbols (sequence): Symbol names to draw leaves from
    depth (int): Maximum nesting depth

  """
  if depth <= 0 or rng.random() < 0.2:
    return _random_leaf(rng, symbols)

  kind = rng.choice(('add', 'sub', 'mul', 'div', 'pow', 'func', 'sqrt'))
  if kind == 'add':
    return Add((random_expr(rng, symbols, depth - 1), random_expr(rng, symbols, depth - 1)))
  if kind == 'sub':
    return Add((random_expr(rng, symbols, depth - 1), Neg(random_expr(rng, symbols, depth - 1))))
  if kind == 'mul':
    return Mul((random_expr(rng, symbols, depth - 1), random_expr(rng, symbols, depth - 1)))
  if kind == 'div':
    denominator = Add((Const(2), Pow(random_expr(rng, symbols, depth - 1), Fraction(2))))
    return Div(random_expr(rng, symbols, depth - 1), denominator)
  if kind == 'pow':
    return Pow(random_expr(rng, symbols, depth - 1), Fraction(2))
  if kind == 'func':
    name = str(rng.choice(('sinh', 'cosh', 'exp')))
    return Func(name, Mul((Const(0.5), _random_leaf(rng, symbols))))
  return Func('sqrt', Add((Const(1), Pow(random_expr(rng, symbols, depth - 1), Fraction(2)))))


def _random_leaf(rng, symbols):
  if rng.random() < 0.8:
    return Sym(str(rng.choice(list(symbols))))
  return Const(int(rng.integers(1, 4)))
