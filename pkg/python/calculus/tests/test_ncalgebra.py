# SPDX-License-Identifier: MIT-0

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import wholepartial.calculus.ncalgebra as ncalgebra
from wholepartial.calculus.ncalgebra import (AlgebraElement, AlgebraError, bracket, canonical, commutator,
  from_document, jacobi_residual, kappa_minkowski, lie, load_algebra)

coefficient = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
elements = st.lists(coefficient, min_size=4, max_size=4)


def corrupted_kappa(kappa=1.0):
  # Doubled [x2, t] plus [x1, x2] = i t
  structure = np.zeros((4, 4, 4))
  structure[1, 1, 0], structure[1, 0, 1] = 1 / kappa, -1 / kappa
  structure[2, 2, 0], structure[2, 0, 2] = 2 / kappa, -2 / kappa
  structure[0, 1, 2], structure[0, 2, 1] = 1.0, -1.0
  return lie(structure, ('t', 'x1', 'x2', 'x3'))


def test_kappa_minkowski_commutators():
  algebra = kappa_minkowski(2.0)
  assert commutator(algebra, 'x1', 't').coefficient('x1') == 0.5j
  assert commutator(algebra, 't', 'x3').coefficient('x3') == -0.5j
  assert commutator(algebra, 'x1', 't').coefficient('x2') == 0
  assert commutator(algebra, 'x1', 'x2').is_zero()
  assert commutator(algebra, 't', 't').is_zero()
  assert commutator(algebra, 'x1', 't').to_text() == '0.5*i*x1'


def test_kappa_must_not_vanish():
  with pytest.raises(AlgebraError):
    kappa_minkowski(0)


def test_commutative_limit():
  assert commutator(kappa_minkowski(1e12), 'x2', 't').norm() <= 1e-11


def test_canonical_commutators_are_central():
  algebra = canonical([[0, 1], [-1, 0]])
  assert algebra.generators == ('x0', 'x1')
  value = commutator(algebra, 'x0', 'x1')
  assert value.scalar == 1j
  assert np.array_equal(value.coefficients, np.zeros(2))
  assert commutator(algebra, 'x1', 'x0').scalar == -1j
  assert jacobi_residual(algebra) == 0.0


@settings(deadline=None)
@given(st.lists(st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=6, max_size=6))
def test_canonical_algebras_satisfy_jacobi(upper):
  theta = np.zeros((4, 4))
  theta[np.triu_indices(4, 1)] = upper
  assert jacobi_residual(canonical(theta - theta.T)) == 0.0


def test_jacobi_residual_evaluates_canonical_brackets(monkeypatch):
  calls = []
  exact = ncalgebra.bracket

  def non_central(a, x, y):
    calls.append(a.kind)
    return exact(a, x, y) + y

  monkeypatch.setattr(ncalgebra, 'bracket', non_central)
  assert jacobi_residual(canonical([[0, 1], [-1, 0]])) >= 3.0
  assert set(calls) == {'canonical'}
  assert len(calls) == 2 ** 3 * 6


def test_unknown_generator():
  with pytest.raises(AlgebraError, match='Unknown generator "y"'):
    commutator(kappa_minkowski(1.0), 'y', 't')


@pytest.mark.parametrize('kappa', [0.1, 1.0, 10.0, -3.0])
def test_kappa_minkowski_satisfies_jacobi(kappa):
  assert jacobi_residual(kappa_minkowski(kappa)) <= 1e-12


def test_corrupted_algebra_fails_jacobi():
  assert jacobi_residual(corrupted_kappa(1.0)) == pytest.approx(3.0)
  assert jacobi_residual(corrupted_kappa(2.0)) > 1e-3


def test_structure_must_be_antisymmetric():
  structure = np.zeros((2, 2, 2))
  structure[1, 1, 0] = 1.0
  with pytest.raises(AlgebraError, match='antisymmetric'):
    lie(structure, ('t', 'x'))
  with pytest.raises(AlgebraError, match='antisymmetric'):
    canonical([[0, 1], [1, 0]])
  with pytest.raises(AlgebraError, match='unique'):
    canonical([[0, 1], [-1, 0]], generators=('x', 'x'))


@settings(deadline=None)
@given(x=elements, y=elements, z=elements, alpha=coefficient, beta=coefficient)
def test_bracket_is_bilinear_and_antisymmetric(x, y, z, alpha, beta):
  algebra = kappa_minkowski(1.5)
  x, y, z = (AlgebraElement(algebra.generators, 0, v) for v in (x, y, z))
  combined = bracket(algebra, alpha * x + beta * y, z)
  expected = alpha * bracket(algebra, x, z) + beta * bracket(algebra, y, z)
  assert (combined - expected).norm() <= 1e-9 * (1 + expected.norm())
  assert (bracket(algebra, x, y) + bracket(algebra, y, x)).norm() <= 1e-9 * (1 + bracket(algebra, x, y).norm())


def test_bracket_of_generators_matches_the_commutator():
  algebra = kappa_minkowski(3.0)
  value = bracket(algebra, algebra.element('x2'), algebra.element('t'))
  assert (value - commutator(algebra, 'x2', 't')).is_zero()


def test_elements_of_different_algebras_do_not_mix():
  with pytest.raises(AlgebraError):
    kappa_minkowski(1.0).element('t') + canonical([[0, 1], [-1, 0]]).element('x0')


def test_lie_document():
  algebra = from_document({
    'kind': 'lie',
    'generators': ['t', 'x1'],
    'C': [{'out': 'x1', 'pair': ['x1', 't'], 'val': 0.5}],
  })
  assert commutator(algebra, 'x1', 't').coefficient('x1') == 0.5j
  assert commutator(algebra, 't', 'x1').coefficient('x1') == -0.5j


@pytest.mark.parametrize('document, message', [
  ({'kind': 'lie', 'generators': ['t'], 'C': [{'out': 'y', 'pair': ['t', 't'], 'val': 1}]}, 'unknown generator'),
  ({'kind': 'lie', 'generators': ['t', 'x'], 'C': [
    {'out': 'x', 'pair': ['x', 't'], 'val': 1},
    {'out': 'x', 'pair': ['t', 'x'], 'val': 1},
  ]}, 'contradicts'),
  ({'kind': 'lie', 'generators': ['t'], 'C': [{'out': 't', 'pair': ['t', 't'], 'val': 1}]}, 'with itself'),
  ({'kind': 'canonical', 'generators': ['x0', 'x1'], 'theta': [[0, 1], [1, 0]]}, 'antisymmetric'),
  ({'kind': 'moyal', 'generators': ['x0']}, 'must be one of'),
])
def test_invalid_documents(document, message):
  with pytest.raises(AlgebraError, match=message):
    from_document(document)


def test_load_algebra(tmp_path):
  location = tmp_path / 'kappa.json'
  location.write_text(json.dumps({
    'kind': 'lie',
    'generators': ['t', 'x1', 'x2', 'x3'],
    'C': [{'out': f'x{m}', 'pair': [f'x{m}', 't'], 'val': 1.0} for m in (1, 2, 3)],
  }))
  algebra = load_algebra(str(location))
  assert np.array_equal(algebra.structure, kappa_minkowski(1.0).structure)
  with pytest.raises(AlgebraError, match='Failed to load the algebra'):
    load_algebra(str(tmp_path / 'missing.json'))
