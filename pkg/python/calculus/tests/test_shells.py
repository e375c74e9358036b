# SPDX-License-Identifier: MIT-0

import math

import numpy as np
import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

import wholepartial.calculus.shells as shells
from wholepartial.calculus.shells import (GammaSet, ShellError, ShellSpec, algebraic_residual, deformation_choices,
  deformed_residual, desitter_residual, desitter_residual_from_length, dirac_operator, dirac_shell_residual,
  load_presets, mass_relation, mass_term, register_deformation, rotate_spatial, shell_energy, standard_residual)

component = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


def test_shell_energy():
  assert shell_energy((4.0, 0.0, 0.0), 3.0) == 5.0
  assert shell_energy((0.0, 0.0, 0.0), 2.0, branch=-1) == -2.0
  assert standard_residual(shell_energy((4.0, 0.0, 0.0), 3.0), (4.0, 0.0, 0.0), 3.0) == 0
  with pytest.raises(ShellError):
    shell_energy((0.0, 0.0, 0.0), -1.0)
  with pytest.raises(ShellError):
    shell_energy((0.0, 0.0, 0.0), 1.0, branch=2)


def test_desitter_residual():
  assert desitter_residual((0.0, 0.0, 0.0, 0.0, 1.0), 2.0) == 0
  assert desitter_residual((2.0, 0.0, 0.0, 0.0, math.sqrt(2)), 2.0) == pytest.approx(0, abs=1e-12)
  assert desitter_residual_from_length((1.0, 0.5, 0.2, 0.1, 0.3), 0.5) == desitter_residual((1.0, 0.5, 0.2, 0.1, 0.3), 2.0)
  with pytest.raises(ShellError):
    desitter_residual((0.0, 0.0, 0.0, 0.0, 1.0), 0.0)
  with pytest.raises(ShellError):
    desitter_residual_from_length((0.0, 0.0, 0.0, 0.0, 1.0), -1.0)


@settings(deadline=None)
@given(p1=component, p2=component, p3=component, angle=st.floats(min_value=0.0, max_value=2 * math.pi),
  axis=st.sampled_from([1, 2, 3]))
def test_desitter_shell_is_rotation_invariant(p1, p2, p3, angle, axis):
  p = (1.3, p1, p2, p3, 0.7)
  rotated = rotate_spatial(p, axis, angle)
  assert rotated[0] == 1.3 and rotated[4] == 0.7
  assert desitter_residual(rotated, 1.5) == pytest.approx(desitter_residual(p, 1.5), abs=1e-12)


def test_deformed_residual():
  assert deformed_residual(1.0, (1.0, 0.0, 0.0), 0.0, 1.6e-35, 'linear-E') == 1.6e-35
  assert deformed_residual(1.0, (1.0, 0.0, 0.0), 0.0, 1e-3, 'quadratic-E') == pytest.approx(1e-6)
  assert deformed_residual(2.0, (1.0, 0.5, 0.0), 1.0, choice='none') == standard_residual(2.0, (1.0, 0.5, 0.0), 1.0)
  assert deformed_residual(2.0, (1.0, 0.5, 0.0), 1.0, choice='linear-E', alpha=0.0) == standard_residual(2.0, (1.0, 0.5, 0.0), 1.0)
  with pytest.raises(ShellError, match='Unknown deformation'):
    deformed_residual(1.0, (1.0, 0.0, 0.0), 0.0, choice='cubic')
  with pytest.raises(ShellError):
    deformed_residual(1.0, (1.0, 0.0, 0.0), 0.0, planck_length=0.0, choice='linear-E')


def test_deformation_is_linear_in_alpha():
  # On the standard shell the residual is the deformation term alone
  energy, p, m = 5.0, (3.0, 4.0, 0.0), 0.0
  one = deformed_residual(energy, p, m, 1e-2, 'linear-E', alpha=1.0)
  assert deformed_residual(energy, p, m, 1e-2, 'linear-E', alpha=3.0) == pytest.approx(3 * one)


def test_register_deformation(monkeypatch):
  monkeypatch.setattr(shells, 'DEFORMATIONS', dict(shells.DEFORMATIONS))
  register_deformation('mass', lambda energy, p_squared, m, planck_length, alpha: alpha * planck_length * m)
  assert deformation_choices() == ('none', 'linear-E', 'quadratic-E', 'mass')
  assert deformed_residual(1.0, (0.0, 0.0, 0.0), 1.0, 0.5, 'mass') == 0.5
  with pytest.raises(ShellError, match='already registered'):
    register_deformation('linear-E', lambda *args: 0.0)
  with pytest.raises(ShellError, match='callable'):
    register_deformation('broken', 1.0)


def test_shell_specs():
  assert ShellSpec.desitter(length=0.5).params['M'] == 2.0
  assert ShellSpec.desitter(mass_scale=4.0).length == 0.25
  assert ShellSpec.standard(3.0).energy((4.0, 0.0, 0.0)) == 5.0
  assert ShellSpec.desitter(mass_scale=2.0).residual(0.0, (0.0, 0.0, 0.0), p4=1.0) == 0
  assert ShellSpec.deformed(0.0, 1.6e-35, 'linear-E').residual(1.0, (1.0, 0.0, 0.0)) == 1.6e-35
  with pytest.raises(ShellError, match='not both'):
    ShellSpec.desitter(mass_scale=1.0, length=1.0)
  with pytest.raises(ShellError, match='p4'):
    ShellSpec.desitter(mass_scale=1.0).residual(0.0, (0.0, 0.0, 0.0))
  with pytest.raises(ShellError):
    ShellSpec.desitter(mass_scale=1.0).energy((0.0, 0.0, 0.0))
  with pytest.raises(ShellError):
    ShellSpec.deformed(1.0, choice='cubic')


def test_builtin_presets():
  presets = load_presets()
  assert set(presets) == {'standard', 'standard-negative', 'desitter-unit', 'planck-linear', 'planck-quadratic'}
  assert presets['standard-negative'].energy((0.0, 0.0, 0.0)) == -1.0


def test_load_presets(tmp_path):
  location = tmp_path / 'presets.yaml'
  location.write_text(yaml.safe_dump({'shells': {
    'heavy': {'kind': 'standard', 'm': 3},
    'small-universe': {'kind': 'desitter', 'length': 0.5},
    'strong-gravity': {'kind': 'deformed', 'm': 0, 'planck_length': 0.1, 'choice': 'linear-E', 'alpha': 2},
  }}))
  presets = load_presets(str(location))
  assert presets['heavy'].energy((4.0, 0.0, 0.0)) == 5.0
  assert presets['small-universe'].params['M'] == 2.0
  assert presets['strong-gravity'].residual(1.0, (1.0, 0.0, 0.0)) == pytest.approx(0.2)
  assert 'standard' in presets


@pytest.mark.parametrize('shell, message', [
  ({'kind': 'flat'}, 'must be one of'),
  ({'kind': 'standard'}, r'\["m"\] is missing'),
  ({'kind': 'standard', 'm': 1, 'branch': 0}, 'must be 1 or -1'),
  ({'kind': 'desitter', 'M': 1, 'length': 1}, 'exactly one'),
  ({'kind': 'deformed', 'm': 1, 'choice': 'cubic'}, 'must be one of'),
])
def test_invalid_presets(tmp_path, shell, message):
  location = tmp_path / 'presets.yaml'
  location.write_text(yaml.safe_dump({'shells': {'broken': shell}}))
  with pytest.raises(ShellError, match=message):
    load_presets(str(location))


def test_gamma_algebra():
  gammas = GammaSet.dirac()
  assert gammas.check() == 0
  assert np.array_equal(gammas.slash((1.0, 0.0, 0.0, 0.0)), gammas.gammas[0])


def test_mass_term_readings():
  assert mass_term(0.5) == 2 * math.sinh(0.25)
  assert mass_term(0.5, 'half_sinh') == math.sinh(0.5)
  with pytest.raises(ShellError):
    mass_term(0.5, 'sinh')


def test_operator_at_rest_with_vanishing_mass():
  assert np.array_equal(dirac_operator((0.0, 0.0, 0.0, 0.0), 1.0, 0.0), np.zeros((4, 4)))
  with pytest.raises(ShellError, match='variant'):
    dirac_operator((0.0, 0.0, 0.0, 0.0), 1.0, 0.0, variant='psiR')


def test_operator_variants_differ_by_the_fifth_component_only():
  p, p4, mu = (0.7, 0.2, -0.4, 0.1), 1.3, 0.8
  total = dirac_operator(p, p4, mu, 'psi') + dirac_operator(p, p4, mu, 'psi_r')
  expected = 2 * (mass_term(mu) * np.eye(4) - GammaSet.dirac().slash(p))
  assert np.allclose(total, expected, atol=1e-14)
  block = GammaSet.dirac().block_operator(p, p4, mu)
  assert np.array_equal(block[:4, :4], dirac_operator(p, p4, mu, 'psi'))
  assert np.array_equal(block[4:, 4:], dirac_operator(p, p4, mu, 'psi_r'))
  assert np.array_equal(block[:4, 4:], np.zeros((4, 4)))


def test_determinant_vanishes_on_the_shell():
  mu = 0.5
  determinant, algebraic = dirac_shell_residual((2 * math.sinh(mu / 2), 0.0, 0.0, 0.0), 1.0, mu)
  assert abs(determinant) <= 1e-10
  assert algebraic == 0
  determinant, algebraic = dirac_shell_residual((1.0, 1.0, 0.0, 0.0), 1.0, 0.0)
  assert abs(determinant) <= 1e-12
  assert algebraic == 0


@settings(deadline=None)
@given(p=st.tuples(component, component, component, component), p4=st.floats(min_value=-1.0, max_value=3.0),
  mu=st.floats(min_value=-2.0, max_value=2.0), variant=st.sampled_from(['psi', 'psi_r']))
def test_determinant_factorizes(p, p4, mu, variant):
  determinant, algebraic = dirac_shell_residual(p, p4, mu, variant)
  assert abs(determinant - algebraic ** 2) <= 1e-9 * (1 + algebraic ** 2)
  other, _ = dirac_shell_residual(p, p4, mu, 'psi_r' if variant == 'psi' else 'psi')
  assert abs(determinant - other) <= 1e-9 * (1 + abs(determinant))


def test_algebraic_residual_reading():
  assert algebraic_residual((0.0, 0.0, 0.0, 0.0), 1.0, 1.0, 'half_sinh') == pytest.approx(math.sinh(1.0) ** 2)


@pytest.mark.parametrize('mu', [-3.0, -0.5, 0.0, 0.25, 1.0, 4.0])
def test_mass_relation(mu):
  relation = mass_relation(mu)
  assert abs(relation.identity_residual) <= 1e-12 * (1 + relation.m4 ** 2)
  assert relation.m4 == pytest.approx(math.sqrt(1 + relation.m ** 2), rel=1e-12)


def test_mass_relation_at_zero():
  relation = mass_relation(0.0)
  assert (relation.m, relation.m4) == (0.0, 1.0)
