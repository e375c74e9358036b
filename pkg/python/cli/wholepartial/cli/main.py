# SPDX-License-Identifier: MIT-0

import functools
import json
import logging
import re
import sys

import click

from wholepartial.calculus import helicity, ncalgebra, shells
from wholepartial.calculus.conventions import ConventionsError, load_conventions
from wholepartial.calculus.expr import (EvaluationError, ParseError, SamplerExhaustedError, as_expr, evaluate,
  free_symbols, parse, relative_residual, to_text)
from wholepartial.calculus.onshell import (Chart, ChartError, commutator_apply, commutator_closed_form,
  fd_whole_partial, load_chart, momentum_commutator_apply, whole_partial)
from wholepartial.cli.env import get_env
from wholepartial.cli.verify import run_verify
from wholepartial.shared.log import get_logger
from wholepartial.shared.util import write_file

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

EXIT_VERIFY_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_EVALUATION_ERROR = 3
EXIT_INTERNAL_ERROR = 4
SCHEMA_VERSION = 1
ASSIGNMENT_SPLIT = r',(?=[A-Za-z_][A-Za-z0-9_]*=)'
VECTOR_NAMES = {'p': ('p1', 'p2', 'p3'), 'B': ('B1', 'B2', 'B3')}


class Context:
  """
  Settings shared by every command: environment, conventions and output mode.

  """

  def __init__(self, config_file, json_output):
    self.env = get_env()
    self.conventions = load_conventions(config_file or self.env.config_file, self.env.region)
    self.json_output = json_output


def handle_errors(function):
  """
  Map the toolbox exceptions to the documented exit codes.

  """
  @functools.wraps(function)
  def wrapper(*args, **kwargs):
    try:
      return function(*args, **kwargs)
    except (EvaluationError, SamplerExhaustedError) as e:
      logger.error(f'Evaluation failed - {e}')
      click.echo(f'Error: {e}', err=True)
      sys.exit(EXIT_EVALUATION_ERROR)
    except click.exceptions.Exit:
      raise
    except (ParseError, ChartError, ConventionsError, ncalgebra.AlgebraError, shells.ShellError, ValueError) as e:
      logger.error(f'Invalid input - {e}')
      click.echo(f'Error: {e}', err=True)
      sys.exit(EXIT_INPUT_ERROR)
    except Exception as e:
      logger.exception(f'Internal error while running the command - {e}')
      click.echo(f'Internal error: {e}', err=True)
      sys.exit(EXIT_INTERNAL_ERROR)
  return wrapper


def parse_assignments(tokens):
  """
  Parse `name=value` assignments. Several assignments can share a token when separated by
  commas, and `p=x,y,z` (or `B=...`) expands to p1, p2, p3.

  Args:
    tokens (iterable): Strings such as `p=3,0,0`, `m=4` or `p=1,0,0,m=0`

  """
  point = {}
  for token in tokens:
    for assignment in re.split(ASSIGNMENT_SPLIT, token.strip()):
      if not assignment:
        continue
      if '=' not in assignment:
        raise ValueError(f'Expected name=value, got "{assignment}"')
      name, value = (part.strip() for part in assignment.split('=', 1))
      try:
        values = [float(v) for v in value.split(',')]
      except ValueError:
        raise ValueError(f'The value of "{name}" is not a number or a comma-separated vector')
      if len(values) == 1:
        point[name] = values[0]
      elif name in VECTOR_NAMES and len(values) == 3:
        point.update(zip(VECTOR_NAMES[name], values))
      else:
        raise ValueError(f'"{name}" cannot be assigned a vector of {len(values)} values')
  return point


def complete_point(chart, point):
  """
  Add the derived variables the point does not bind, when their definitions can be evaluated.

  """
  bindings = dict(point)
  for d in chart.derived:
    if d.name not in bindings and free_symbols(d.definition) <= set(point):
      bindings[d.name] = evaluate(d.definition, point)
  return bindings


def complex_pair(value):
  value = complex(value)
  return [float(f'{value.real:.12g}'), float(f'{value.imag:.12g}')]


def format_value(value):
  value = complex(value)
  if value.imag == 0:
    return f'{value.real:.12g}'
  if value.real == 0:
    return f'{value.imag:.12g}i'
  return f'{value.real:.12g}{value.imag:+.12g}i'


def emit(ctx, document, lines):
  if ctx.json_output:
    click.echo(json.dumps({'schema': SCHEMA_VERSION, **document}, sort_keys=True))
  else:
    click.echo('\n'.join(lines))


def get_chart(ctx, chart_file, branch):
  if chart_file:
    chart = load_chart(chart_file, ctx.env.region)
  else:
    chart = Chart.standard(branch)
  if not ctx.conventions.include_mass_gradient:
    chart = chart.without_gradients(('m',))
  return chart


def get_kinematics(ctx, point):
  for name in ('p1', 'p2', 'p3', 'm'):
    if name not in point:
      raise ValueError(f'The kinematics need p=x,y,z and m, "{name}" is missing')
  return helicity.Kinematics(point['p1'], point['p2'], point['p3'], point['m'], ctx.conventions.right_handed_scalar)


chart_option = click.option('--chart', 'chart_file', default=None, help='Chart document, local path or s3://bucket/key')
branch_option = click.option('--branch', type=click.Choice(['+1', '-1', '1']), default='+1',
  help='Energy branch of the standard chart')
at_option = click.option('--at', 'at', multiple=True, help='Evaluation point, e.g. p=3,0,0,m=4')


def _set_json_output(click_ctx, param, value):
  if value:
    click_ctx.find_object(Context).json_output = True


json_option = click.option('--json', is_flag=True, expose_value=False, callback=_set_json_output,
  help='Print a JSON document')


@click.group()
@click.option('--config', 'config_file', default=None, help='Conventions document (overrides WPC_CONFIG_FILE)')
@click.option('--json', 'json_output', is_flag=True, help='Print a JSON document')
@click.pass_context
@handle_errors
def cli(click_ctx, config_file, json_output):
  """Whole-partial derivative calculus toolbox."""
  click_ctx.obj = Context(config_file, json_output)


@cli.command()
@click.argument('expression')
@click.argument('assignments', nargs=-1)
@click.option('--var', 'variable', required=True, help='Variable of the derivative')
@chart_option
@branch_option
@at_option
@click.option('--step', type=float, default=None, help='Finite-difference step')
@json_option
@click.pass_obj
@handle_errors
def derive(ctx, expression, assignments, variable, chart_file, branch, at, step):
  """Whole-partial derivative of EXPRESSION, evaluated at the --at point if given."""
  chart = get_chart(ctx, chart_file, int(branch))
  f = parse(expression)
  result = whole_partial(chart, f, variable)
  document = {'command': 'derive', 'expression': to_text(f), 'variable': variable, 'result': to_text(result)}
  lines = [to_text(result)]

  point = parse_assignments(at + assignments)
  if point:
    value = evaluate(result, complete_point(chart, point))
    document['value'] = complex_pair(value)
    lines.append(f'value = {format_value(value)}')
    if chart.is_derived(variable) or variable in point:
      h = step or ctx.conventions.tolerances['FiniteDifferenceStep']
      fd = fd_whole_partial(chart, f, variable, point, h)
      agrees = bool(relative_residual(fd, value) <= ctx.conventions.tolerances['FiniteDifference'])
      document.update({'fd': complex_pair(fd), 'fd_agrees': agrees})
      lines.append(f'finite difference = {format_value(fd)} ({"agrees" if agrees else "DISAGREES"})')
  emit(ctx, document, lines)


@cli.command()
@click.argument('expression')
@click.argument('v1')
@click.argument('v2')
@click.argument('assignments', nargs=-1)
@chart_option
@branch_option
@at_option
@click.option('--pcomm', default=None, help='Expression of [p_i, p_j] when the momenta do not commute')
@json_option
@click.pass_obj
@handle_errors
def commute(ctx, expression, v1, v2, assignments, chart_file, branch, at, pcomm):
  """Commutator [D_V1, D_V2] applied to EXPRESSION."""
  chart = get_chart(ctx, chart_file, int(branch))
  f = parse(expression)
  document = {'command': 'commute', 'expression': to_text(f), 'v1': v1, 'v2': v2}
  closed_form = None

  if pcomm is not None:
    axes = [re.fullmatch(r'p([123])', v) for v in (v1, v2)]
    if not all(axes):
      raise ValueError('--pcomm needs two momentum variables p1, p2 or p3')
    result = momentum_commutator_apply(chart, int(axes[0].group(1)), int(axes[1].group(1)), f, as_expr(pcomm))
    document['pcomm'] = to_text(as_expr(pcomm))
  else:
    result = commutator_apply(chart, v1, v2, f)
    axis = re.fullmatch(r'p([123])', v1)
    if axis and v2 == 'E' and chart.is_derived('E'):
      closed_form = commutator_closed_form(chart, int(axis.group(1)), f)
      document['closed_form'] = to_text(closed_form)
  document['result'] = to_text(result)
  lines = [to_text(result)]
  if closed_form is not None:
    lines.append(f'closed form = {to_text(closed_form)}')

  point = parse_assignments(at + assignments)
  if point:
    bindings = complete_point(chart, point)
    value = evaluate(result, bindings)
    document['value'] = complex_pair(value)
    lines.append(f'value = {format_value(value)}')
    if closed_form is not None:
      residual = float(relative_residual(value, evaluate(closed_form, bindings)))
      document['residual'] = float(f'{residual:.12g}')
      lines.append(f'closed-form residual = {residual:.12g}')
  emit(ctx, document, lines)


@cli.command()
@click.argument('assignments', nargs=-1)
@at_option
@click.option('--helicity', 'helicity_label', default='+1', help='+1, -1, 0 or 0t')
@json_option
@click.pass_obj
@handle_errors
def polvec(ctx, assignments, at, helicity_label):
  """Polarization vector of the given helicity."""
  k = get_kinematics(ctx, parse_assignments(at + assignments))
  label = helicity.Helicity.parse(helicity_label)
  eps = helicity.pol_vector(k, label)
  square = eps.minkowski_square()
  transversality = helicity.transversality(k, eps)
  document = {'command': 'polvec', 'helicity': label.value, 'components': [complex_pair(c) for c in eps.components],
    'minkowski_square': float(f'{square:.12g}'), 'transversality': complex_pair(transversality)}
  lines = [f'eps_mu = ({", ".join(format_value(c) for c in eps.components)})', f'eps.eps* = {square:.12g}',
    f'p^mu eps_mu = {format_value(transversality)}']
  emit(ctx, document, lines)


@cli.command()
@click.argument('assignments', nargs=-1)
@at_option
@click.option('--helicity', 'helicity_label', default='+1', help='+1, -1, 0 or 0t')
@click.option('--source', type=click.Choice(['closed', 'potential']), default='closed')
@json_option
@click.pass_obj
@handle_errors
def fields(ctx, assignments, at, helicity_label, source):
  """Electric and magnetic fields of a helicity mode."""
  k = get_kinematics(ctx, parse_assignments(at + assignments))
  label = helicity.Helicity.parse(helicity_label)
  closed = helicity.fields_closed(k, label)
  potential = helicity.fields_from_potential(k, helicity.pol_vector(k, label), label)
  triple = closed if source == 'closed' else potential
  difference = closed.max_difference(potential)
  document = {'command': 'fields', 'helicity': label.value, 'source': source,
    'electric': [complex_pair(c) for c in triple.electric], 'magnetic': [complex_pair(c) for c in triple.magnetic],
    'closed_potential_difference': float(f'{difference:.12g}')}
  lines = [f'E = ({", ".join(format_value(c) for c in triple.electric)})',
    f'B = ({", ".join(format_value(c) for c in triple.magnetic)})',
    f'|closed - potential| = {difference:.12g}']
  emit(ctx, document, lines)


@cli.command()
@click.argument('expression')
@click.argument('assignments', nargs=-1)
@at_option
@json_option
@click.pass_obj
@handle_errors
def ansatz(ctx, expression, assignments, at):
  """Time-position commutator of EXPRESSION and its weight against the longitudinal field."""
  conventions = ctx.conventions
  k = get_kinematics(ctx, parse_assignments(at + assignments))
  chart = Chart.standard(1, conventions.include_mass_gradient)
  result = helicity.ansatz_commutator(chart, k, parse(expression), conventions.operator_factor,
    conventions.ansatz_tensor_component)
  document = {
    'command': 'ansatz',
    'expression': expression,
    'coefficients': {f'{mu}{nu}': complex_pair(v) for (mu, nu), v in result.coefficients.items()},
    'omega': {str(axis): None if w is None else complex_pair(w) for axis, w in result.omega.items()},
    'parallel_residual': float(f'{result.parallel_residual:.12g}'),
    'omega_spread': float(f'{result.omega_spread:.12g}'),
  }
  lines = [f'[x^{mu}, x^{nu}] coefficient = {format_value(v)}' for (mu, nu), v in result.coefficients.items()]
  lines += [f'omega_{axis} = {"absent" if w is None else format_value(w)}' for axis, w in result.omega.items()]
  lines.append(f'parallel residual = {result.parallel_residual:.12g}')
  emit(ctx, document, lines)


@cli.command()
@click.argument('assignments', nargs=-1)
@at_option
@click.option('--shell', 'shell_name', default='standard', help='Name of a shell preset')
@json_option
@click.pass_obj
@handle_errors
def shell(ctx, assignments, at, shell_name):
  """Residual of a shell preset at E (or p0), p and p4."""
  presets = shells.load_presets(ctx.env.shell_presets_file, ctx.env.region)
  if shell_name not in presets:
    raise shells.ShellError(f'Unknown shell "{shell_name}", the presets are {", ".join(sorted(presets))}')
  spec = presets[shell_name]
  point = parse_assignments(at + assignments)
  momentum = tuple(point.get(name, 0.0) for name in ('p1', 'p2', 'p3'))
  energy = point.get('E', point.get('p0'))
  if energy is None:
    energy = spec.energy(momentum)
  residual = spec.residual(energy, momentum, point.get('p4'))
  document = {'command': 'shell', 'shell': shell_name, 'kind': spec.kind, 'energy': float(f'{energy:.12g}'),
    'residual': float(f'{residual:.12g}')}
  emit(ctx, document, [f'energy = {energy:.12g}', f'residual = {residual:.12g}'])


@cli.command()
@click.argument('assignments', nargs=-1)
@at_option
@click.option('--variant', type=click.Choice(['psi', 'psiR']), default='psi')
@json_option
@click.pass_obj
@handle_errors
def dirac(ctx, assignments, at, variant):
  """Determinant and algebraic residual of the spinor operator at p0, p, p4 and mu."""
  point = parse_assignments(at + assignments)
  for name in ('p0', 'p1', 'p2', 'p3', 'p4', 'mu'):
    if name not in point:
      raise ValueError(f'The spinor operator needs p0, p=x,y,z, p4 and mu, "{name}" is missing')
  p = tuple(point[name] for name in ('p0', 'p1', 'p2', 'p3'))
  determinant, algebraic = shells.dirac_shell_residual(p, point['p4'], point['mu'],
    'psi' if variant == 'psi' else 'psi_r', mass_term_reading=ctx.conventions.mass_term_reading)
  document = {'command': 'dirac', 'variant': variant, 'determinant': complex_pair(determinant),
    'algebraic_residual': float(f'{algebraic:.12g}')}
  emit(ctx, document, [f'det = {format_value(determinant)}', f'algebraic residual = {algebraic:.12g}'])


@cli.command()
@click.option('--file', 'algebra_file', default=None, help='Algebra document, local path or s3://bucket/key')
@click.option('--kappa', type=float, default=None, help='Use the kappa-Minkowski algebra')
@click.option('--pair', nargs=2, default=None, help='Print only [MU, NU]')
@json_option
@click.pass_obj
@handle_errors
def algebra(ctx, algebra_file, kappa, pair):
  """Commutators and Jacobi residual of a coordinate algebra."""
  if (algebra_file is None) == (kappa is None):
    raise ValueError('Give exactly one of --file and --kappa')
  a = ncalgebra.load_algebra(algebra_file, ctx.env.region) if algebra_file else ncalgebra.kappa_minkowski(kappa)
  pairs = [tuple(pair)] if pair else [(mu, nu) for i, mu in enumerate(a.generators) for nu in a.generators[i + 1:]]
  commutators = {f'[{mu},{nu}]': ncalgebra.commutator(a, mu, nu) for mu, nu in pairs}
  residual = ncalgebra.jacobi_residual(a)
  document = {
    'command': 'algebra',
    'kind': a.kind,
    'generators': list(a.generators),
    'commutators': {key: {'scalar': complex_pair(e.scalar), 'coefficients': [complex_pair(c) for c in e.coefficients]}
      for key, e in commutators.items()},
    'jacobi_residual': float(f'{residual:.12g}'),
  }
  lines = [f'{key} = {e.to_text()}' for key, e in commutators.items()]
  lines.append(f'Jacobi residual = {residual:.12g}')
  emit(ctx, document, lines)


@cli.command()
@click.option('--seed', type=int, default=0, help='Seed of every sampler')
@click.option('--tol', type=float, default=None, help='Override every tolerance except the separation checks')
@click.option('--output', default=None, help='Also write the JSON report to a local path or s3://bucket/key')
@json_option
@click.pass_obj
@handle_errors
def verify(ctx, seed, tol, output):
  """Run the acceptance suite. Exits with 1 if a check fails."""
  conventions = ctx.conventions if tol is None else ctx.conventions.with_tolerance_override(tol)
  report = run_verify(conventions, seed)
  document = report.to_document()
  if output:
    try:
      write_file(document, output, ctx.env.region, 'json')
    except Exception as e:
      raise ValueError(f'Unable to write the report - {e}')
  if ctx.json_output:
    click.echo(json.dumps(document, sort_keys=True))
  else:
    click.echo(report.to_text())
  logger.info(f'Verification {"passed" if report.passed else "failed"}')
  if not report.passed:
    sys.exit(EXIT_VERIFY_FAILED)


def main():
  get_logger()
  cli()
