# SPDX-License-Identifier: MIT-0

from pathlib import Path

import pytest

from wholepartial.calculus.conventions import load_conventions
from wholepartial.calculus.expr import parse, to_text
from wholepartial.calculus.ncalgebra import commutator, jacobi_residual, load_algebra
from wholepartial.calculus.onshell import load_chart, whole_partial
from wholepartial.calculus.shells import load_presets

SAMPLES = Path(__file__).resolve().parents[3] / 'doc' / 'examples'


def sample(name):
  return str(SAMPLES / name)


def test_sample_conventions():
  conventions = load_conventions(sample('conventions.yaml'))
  assert conventions.tolerances['FiniteDifference'] == 1e-7
  assert conventions.tolerances['Identity'] == 1e-9
  assert conventions.momentum_range == (0.2, 1.5)
  assert conventions.right_handed_scalar == 'p1-ip2'


def test_sample_standard_chart():
  chart = load_chart(sample('chart-standard.yaml'))
  assert to_text(whole_partial(chart, parse('E'), 'p1')) == 'p1/E'
  assert chart.evaluate(parse('E'), {'p1': 3.0, 'p2': 0.0, 'p3': 0.0, 'm': 4.0}) == pytest.approx(5.0)


def test_sample_massless_chart():
  chart = load_chart(sample('chart-massless-plane.yaml'))
  assert chart.base == ('p1', 'p2')
  assert chart.evaluate(parse('E'), {'p1': 3.0, 'p2': 4.0}) == pytest.approx(5.0)


def test_sample_algebras():
  kappa = load_algebra(sample('algebra-kappa.yaml'))
  assert jacobi_residual(kappa) == 0
  assert commutator(kappa, 'x1', 't').coefficient('x1') == 1j
  assert commutator(kappa, 't', 'x2').coefficient('x2') == -1j

  theta = load_algebra(sample('algebra-canonical.yaml'))
  assert commutator(theta, 'x2', 'x3').scalar == 0.5j
  assert commutator(theta, 'x1', 'x0').scalar == -1j


def test_sample_presets():
  presets = load_presets(sample('shell-presets.yaml'))
  assert presets['heavy'].energy((4.0, 0.0, 0.0)) == 5.0
  assert presets['small-universe'].params['M'] == 0.5
  assert presets['quantum-gravity'].params['choice'] == 'linear-E'
  assert 'standard' in presets
