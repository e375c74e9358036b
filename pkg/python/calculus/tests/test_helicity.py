# SPDX-License-Identifier: MIT-0

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from wholepartial.calculus.helicity import (FourVector, Helicity, Kinematics, KinematicsError, ansatz_commutator,
  fields_closed, fields_from_potential, longitudinal_tensor, minkowski_dot, pol_vector, transversality)
from wholepartial.calculus.onshell import Chart

component = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)
mass = st.floats(min_value=0.5, max_value=2.0, allow_nan=False, allow_infinity=False)

NORMALIZATION = {Helicity.PLUS: -1.0, Helicity.MINUS: -1.0, Helicity.LONGITUDINAL: -1.0, Helicity.TIMELIKE: 1.0}


def test_helicity_aliases():
  assert Helicity.parse('+1') is Helicity.PLUS
  assert Helicity.parse('-') is Helicity.MINUS
  assert Helicity.parse('0') is Helicity.LONGITUDINAL
  assert Helicity.parse('0_t') is Helicity.TIMELIKE
  with pytest.raises(ValueError, match='Unknown helicity'):
    Helicity.parse('2')


def test_kinematics():
  k = Kinematics(3.0, 4.0, 0.0, 1.0)
  assert k.p == 5.0
  assert k.p_perp == 5.0
  assert k.energy == pytest.approx(math.sqrt(26))
  assert k.p_r == complex(3, 4) and k.p_l == complex(3, -4)
  assert k.phase == pytest.approx(complex(0.6, 0.8))
  assert Kinematics(3.0, 4.0, 0.0, 1.0, right_handed_scalar='p1-ip2').p_r == complex(3, -4)
  with pytest.raises(KinematicsError):
    Kinematics(1.0, 0.0, 0.0, 0.0)
  with pytest.raises(KinematicsError):
    Kinematics(math.nan, 0.0, 0.0, 1.0)


def test_longitudinal_polarization():
  eps = pol_vector(Kinematics(0.0, 0.0, 1.0, 1.0), '0')
  assert np.allclose(eps.components, [1, 0, 0, -math.sqrt(2)])
  assert eps.covariant


def test_timelike_polarization_near_rest():
  eps = pol_vector(Kinematics(0.0, 0.0, 1e-8, 1.0), '0t')
  assert np.allclose(eps.components, [1, 0, 0, 0], atol=1e-7)


def test_singular_kinematics():
  with pytest.raises(KinematicsError, match='p3 axis'):
    pol_vector(Kinematics(0.0, 0.0, 1.0, 1.0), '+1')
  with pytest.raises(KinematicsError, match='p = 0'):
    pol_vector(Kinematics(0.0, 0.0, 0.0, 1.0), '0')
  with pytest.raises(KinematicsError):
    fields_closed(Kinematics(0.0, 0.0, 2.0, 1.0), '-1')


@pytest.mark.parametrize('helicity', list(Helicity))
def test_normalization_off_axis(helicity):
  eps = pol_vector(Kinematics(1.0, 1.0, math.sqrt(2), 1.0), helicity)
  assert eps.minkowski_square() == pytest.approx(NORMALIZATION[helicity], abs=1e-12)


@settings(deadline=None)
@given(p1=component, p2=component, p3=component, m=mass)
def test_polarization_vectors_are_normalized_and_transverse(p1, p2, p3, m):
  assume(math.hypot(p1, p2) > 0.05)
  k = Kinematics(p1, p2, p3, m)
  for helicity in Helicity:
    eps = pol_vector(k, helicity)
    assert abs(eps.minkowski_square() - NORMALIZATION[helicity]) <= 1e-10
    if helicity is not Helicity.TIMELIKE:
      assert abs(transversality(k, eps)) <= 1e-10 * (1 + k.energy)


def test_transverse_modes_are_orthogonal():
  k = Kinematics(0.3, -0.7, 0.2, 1.1)
  plus, minus, zero = (pol_vector(k, h) for h in ('+1', '-1', '0'))
  assert abs(minkowski_dot(plus, minus, conjugate=True)) <= 1e-12
  assert abs(minkowski_dot(plus, zero, conjugate=True)) <= 1e-12


def test_index_position():
  eps = pol_vector(Kinematics(0.0, 0.0, 1.0, 1.0), '0')
  raised = eps.raised()
  assert not raised.covariant
  assert np.allclose(raised.components, [1, 0, 0, math.sqrt(2)])
  assert np.array_equal(raised.lowered().components, eps.components)
  with pytest.raises(ValueError):
    minkowski_dot(eps, raised)


def test_longitudinal_field():
  triple = fields_closed(Kinematics(0.0, 0.0, 2.0, 1.0), '0')
  assert np.allclose(triple.electric, [0, 0, 1j])
  assert np.array_equal(triple.magnetic, np.zeros(3))


def test_timelike_mode_is_pure_gauge():
  k = Kinematics(0.4, 0.5, -0.6, 1.2)
  assert fields_closed(k, '0t').max_difference(fields_from_potential(k, pol_vector(k, '0t'))) <= 1e-12
  gauge = fields_from_potential(k, FourVector(k.four_momentum, covariant=False))
  assert np.array_equal(gauge.electric, np.zeros(3)) and np.array_equal(gauge.magnetic, np.zeros(3))


@pytest.mark.parametrize('momentum, helicity', [
  ((1.0, 0.0, 1.0), '+1'),
  ((1.0, 1.0, math.sqrt(2)), '-1'),
  ((0.3, -0.7, 0.2), '+1'),
  ((-1.5, 0.2, -0.9), '-1'),
])
def test_closed_fields_match_the_potential(momentum, helicity):
  k = Kinematics(*momentum, 1.0)
  closed = fields_closed(k, helicity)
  derived = fields_from_potential(k, pol_vector(k, helicity))
  assert closed.max_difference(derived) <= 1e-10


@settings(deadline=None)
@given(p1=component, p2=component, p3=component, m=mass, swapped=st.booleans())
def test_fields_agree_for_every_mode(p1, p2, p3, m, swapped):
  assume(math.hypot(p1, p2) > 0.05)
  k = Kinematics(p1, p2, p3, m, right_handed_scalar='p1-ip2' if swapped else 'p1+ip2')
  for helicity in Helicity:
    closed = fields_closed(k, helicity)
    derived = fields_from_potential(k, pol_vector(k, helicity))
    assert closed.max_difference(derived) <= 1e-10 * (1 + k.energy)


def test_longitudinal_tensor_is_antisymmetric():
  tensor = longitudinal_tensor(Kinematics(0.0, 0.0, 1.0, 1.0)).as_tensor()
  assert tensor[3, 0] == 1j
  assert np.array_equal(tensor, -tensor.T)
  tensor = longitudinal_tensor(Kinematics(0.3, 0.1, -0.8, 1.4)).as_tensor()
  assert np.array_equal(tensor, -tensor.T)


def test_ansatz_along_one_axis():
  result = ansatz_commutator(Chart.standard(), Kinematics(1.0, 0.0, 0.0, 1.0), 'E*p1')
  assert result.coefficients[(0, 1)] == pytest.approx(0.5)
  assert result.coefficients[(0, 2)] == pytest.approx(0)
  assert result.omega[1] == pytest.approx(-0.5j)
  assert result.omega[2] is None and result.omega[3] is None
  assert result.parallel_residual <= 1e-12


def test_ansatz_weight_is_axis_independent():
  result = ansatz_commutator(Chart.standard(), Kinematics(1.0, 1.0, 1.0, 1.0), 'exp(E)*sinh(p2)')
  for axis in (1, 2, 3):
    assert result.omega[axis] == pytest.approx(-1j * math.sqrt(3) / 4)
  assert result.omega_spread <= 1e-9
  assert result.parallel_residual <= 1e-10


def test_ansatz_tensor_component_flips_the_weight():
  k = Kinematics(0.5, -0.4, 0.7, 1.3)
  i0 = ansatz_commutator(Chart.standard(), k, 'sinh(E)*p3')
  oi = ansatz_commutator(Chart.standard(), k, 'sinh(E)*p3', tensor_component='0i')
  for axis in (1, 2, 3):
    assert oi.omega[axis] == pytest.approx(-i0.omega[axis])
  with pytest.raises(ValueError):
    ansatz_commutator(Chart.standard(), k, 'E', tensor_component='00')


def test_ansatz_without_energy_dependence():
  result = ansatz_commutator(Chart.standard(), Kinematics(1.0, 1.0, 1.0, 1.0), 'p1^2')
  assert all(value == 0 for value in result.coefficients.values())
  assert all(value is None for value in result.omega.values())
  assert result.omega_spread == 0.0
