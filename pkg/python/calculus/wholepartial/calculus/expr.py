# SPDX-License-Identifier: MIT-0

"""
Immutable complex-valued expression trees: parser, printer, evaluation, substitution and
explicit differentiation.

Grammar accepted by `parse` (whitespace is insignificant):

  expr     := term (('+' | '-') term)*
  term     := unary (('*' | '/') unary)*
  unary    := ('-' | '+') unary | power
  power    := atom ['^' exponent]
  exponent := signed-int | '(' signed-int ['/' '2'] ')'
  atom     := number | 'i' | ident | func '(' expr ')' | '(' expr ')'
  func     := 'sqrt' | 'sinh' | 'cosh' | 'exp'

`i` is the imaginary unit. Momentum components are spelled `p1`, `p2`, `p3`; the aliases `px`,
`py`, `pz` are rewritten to them.

Equality of expressions is decided numerically (`equal_numeric`), the builders below only fold
constants, absorb 0 and 1 and flatten nested sums and products.

"""

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import singledispatch

import numpy as np

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

FUNCTIONS = ('sqrt', 'sinh', 'cosh', 'exp')
IMAGINARY_UNIT = 'i'
SYMBOL_ALIASES = {'px': 'p1', 'py': 'p2', 'pz': 'p3'}

# Imaginary parts below this bound are dropped in real-valued contexts
REAL_CONTEXT_TOLERANCE = 1e-10

PRECEDENCE_ADD = 1
PRECEDENCE_MUL = 2
PRECEDENCE_POW = 3
PRECEDENCE_ATOM = 4


class ParseError(Exception):

  def __init__(self, message, offset):
    super().__init__(f'{message} (byte offset {offset})')
    self.offset = offset


class EvaluationError(Exception):
  pass


class SingularityError(EvaluationError):
  pass


class SamplerExhaustedError(Exception):
  pass


class Expr:
  """
  Base class of all expression nodes. Nodes are frozen dataclasses, so expressions can be shared
  freely; the arithmetic operators go through the simplifying builders.

  """

  def __add__(self, other):
    return add(self, other)

  def __radd__(self, other):
    return add(other, self)

  def __sub__(self, other):
    return sub(self, other)

  def __rsub__(self, other):
    return sub(other, self)

  def __mul__(self, other):
    return mul(self, other)

  def __rmul__(self, other):
    return mul(other, self)

  def __truediv__(self, other):
    return div(self, other)

  def __rtruediv__(self, other):
    return div(other, self)

  def __neg__(self):
    return neg(self)

  def __pow__(self, exponent):
    return power(self, exponent)

  def __str__(self):
    return to_text(self)


@dataclass(frozen=True)
class Const(Expr):
  value: complex

  def __post_init__(self):
    value = complex(self.value)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
      raise ValueError(f'Constants must be finite, got {value}')
    object.__setattr__(self, 'value', value)


@dataclass(frozen=True)
class Sym(Expr):
  name: str


@dataclass(frozen=True)
class Add(Expr):
  terms: tuple


@dataclass(frozen=True)
class Mul(Expr):
  factors: tuple


@dataclass(frozen=True)
class Pow(Expr):
  base: Expr
  exponent: Fraction

  def __post_init__(self):
    exponent = Fraction(self.exponent)
    if exponent.denominator not in (1, 2):
      raise ValueError(f'Exponents must be integers or halves, got {exponent}')
    object.__setattr__(self, 'exponent', exponent)


@dataclass(frozen=True)
class Neg(Expr):
  arg: Expr


@dataclass(frozen=True)
class Div(Expr):
  num: Expr
  den: Expr


@dataclass(frozen=True)
class Func(Expr):
  name: str
  arg: Expr

  def __post_init__(self):
    if self.name not in FUNCTIONS:
      raise ValueError(f'Unknown function "{self.name}"')


ZERO = Const(0)
ONE = Const(1)
I = Const(1j)


def as_expr(value):
  """
  Return `value` as an Expr. Numbers become constants and strings are parsed.

  """
  if isinstance(value, Expr):
    return value
  if isinstance(value, str):
    return parse(value)
  if isinstance(value, (int, float, complex, np.number)) and not isinstance(value, bool):
    return Const(value)
  raise TypeError(f'Cannot convert {type(value).__name__} to an expression')


def is_zero(e):
  return isinstance(e, Const) and e.value == 0


def is_one(e):
  return isinstance(e, Const) and e.value == 1


def children(e):
  if isinstance(e, Add):
    return e.terms
  if isinstance(e, Mul):
    return e.factors
  if isinstance(e, Pow):
    return (e.base,)
  if isinstance(e, (Neg, Func)):
    return (e.arg,)
  if isinstance(e, Div):
    return (e.num, e.den)
  return ()


def free_symbols(e):
  """
  Return the frozenset of symbol names appearing in `e`.

  """
  names = set()
  stack = [as_expr(e)]
  while stack:
    node = stack.pop()
    if isinstance(node, Sym):
      names.add(node.name)
    stack.extend(children(node))
  return frozenset(names)


# Builders with light simplification

def add(*terms):
  flat = []
  constant = 0j
  for term in terms:
    term = as_expr(term)
    for item in (term.terms if isinstance(term, Add) else (term,)):
      if isinstance(item, Const):
        constant += item.value
      else:
        flat.append(item)
  if constant != 0 or not flat:
    flat.append(Const(constant))
  if len(flat) == 1:
    return flat[0]
  return Add(tuple(flat))


def sub(a, b):
  return add(a, neg(b))


def mul(*factors):
  flat = []
  constant = 1 + 0j
  for factor in factors:
    factor = as_expr(factor)
    # Pull signs out of the product
    while isinstance(factor, Neg):
      constant = -constant
      factor = factor.arg
    for item in (factor.factors if isinstance(factor, Mul) else (factor,)):
      if isinstance(item, Const):
        constant *= item.value
      else:
        flat.append(item)
  if constant == 0:
    return ZERO
  if not flat:
    return Const(constant)
  if constant == -1:
    return Neg(flat[0] if len(flat) == 1 else Mul(tuple(flat)))
  if constant != 1:
    flat.insert(0, Const(constant))
  if len(flat) == 1:
    return flat[0]
  return Mul(tuple(flat))


def neg(e):
  e = as_expr(e)
  if isinstance(e, Const):
    return Const(-e.value)
  if isinstance(e, Neg):
    return e.arg
  return Neg(e)


def div(a, b):
  a, b = as_expr(a), as_expr(b)
  if is_zero(b):
    return Div(a, b)
  if is_zero(a):
    return ZERO
  if is_one(b):
    return a
  if isinstance(a, Const) and isinstance(b, Const):
    return Const(a.value / b.value)
  return Div(a, b)


def power(base, exponent):
  base = as_expr(base)
  exponent = Fraction(exponent)
  if exponent == 0:
    return ONE
  if exponent == 1:
    return base
  if isinstance(base, Const) and exponent.denominator == 1 and (exponent > 0 or base.value != 0):
    return Const(base.value ** int(exponent))
  if isinstance(base, Pow) and base.exponent.denominator == 1 and exponent.denominator == 1:
    return power(base.base, base.exponent * exponent)
  return Pow(base, exponent)


def func(name, arg):
  arg = as_expr(arg)
  if is_zero(arg):
    if name in ('sqrt', 'sinh'):
      return ZERO
    if name in ('cosh', 'exp'):
      return ONE
  return Func(name, arg)


def sqrt(arg):
  return func('sqrt', arg)


# Parser

_TOKEN_PATTERN = re.compile(r'''
  (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
''', re.VERBOSE)


def _tokenize(text):
  tokens = []
  position = 0
  while position < len(text):
    match = _TOKEN_PATTERN.match(text, position)
    if match is None:
      raise ParseError(f'Unexpected character "{text[position]}"', _byte_offset(text, position))
    if match.lastgroup != 'ws':
      tokens.append((match.lastgroup, match.group(), position))
    position = match.end()
  tokens.append(('end', '', len(text)))
  return tokens


def _byte_offset(text, position):
  return len(text[:position].encode('utf-8'))


class _Parser:
  """
  Recursive descent parser over the token list produced by `_tokenize`.

  """

  def __init__(self, text):
    self._text = text
    self._tokens = _tokenize(text)
    self._index = 0

  def _peek(self):
    return self._tokens[self._index]

  def _next(self):
    token = self._tokens[self._index]
    self._index += 1
    return token

  def _error(self, message, token=None):
    token = token or self._peek()
    return ParseError(message, _byte_offset(self._text, token[2]))

  def _expect(self, text):
    token = self._next()
    if token[1] != text or token[0] == 'end':
      raise self._error(f'Expected "{text}"', token)
    return token

  def parse(self):
    e = self._expr()
    if self._peek()[0] != 'end':
      raise self._error(f'Unexpected "{self._peek()[1]}"')
    return e

  def _expr(self):
    terms = [self._term()]
    while self._peek()[1] in ('+', '-') and self._peek()[0] == 'op':
      op = self._next()[1]
      term = self._term()
      terms.append(term if op == '+' else Neg(term))
    return terms[0] if len(terms) == 1 else Add(tuple(terms))

  def _term(self):
    e = self._unary()
    factors = [e]
    while self._peek()[1] in ('*', '/') and self._peek()[0] == 'op':
      op = self._next()[1]
      right = self._unary()
      if op == '*':
        factors.append(right)
      else:
        left = factors[0] if len(factors) == 1 else Mul(tuple(factors))
        factors = [Div(left, right)]
    return factors[0] if len(factors) == 1 else Mul(tuple(factors))

  def _unary(self):
    token = self._peek()
    if token[0] == 'op' and token[1] == '-':
      self._next()
      return Neg(self._unary())
    if token[0] == 'op' and token[1] == '+':
      self._next()
      return self._unary()
    return self._power()

  def _power(self):
    base = self._atom()
    if self._peek()[0] == 'op' and self._peek()[1] == '^':
      self._next()
      return Pow(base, self._exponent())
    return base

  def _signed_int(self):
    sign = 1
    token = self._peek()
    if token[0] == 'op' and token[1] in ('+', '-'):
      self._next()
      sign = -1 if token[1] == '-' else 1
    token = self._next()
    if token[0] != 'number' or not token[1].isdigit():
      raise self._error('Expected an integer exponent', token)
    return sign * int(token[1])

  def _exponent(self):
    token = self._peek()
    if token[0] == 'op' and token[1] == '(':
      self._next()
      numerator = self._signed_int()
      denominator = 1
      if self._peek()[0] == 'op' and self._peek()[1] == '/':
        self._next()
        token = self._next()
        if token[1] != '2':
          raise self._error('Only integer and half-integer exponents are supported', token)
        denominator = 2
      self._expect(')')
      return Fraction(numerator, denominator)
    return Fraction(self._signed_int())

  def _atom(self):
    token = self._next()
    kind, text, _ = token
    if kind == 'number':
      try:
        return Const(float(text))
      except ValueError as e:
        raise self._error(f'Invalid number "{text}" - {e}', token)
    if kind == 'ident':
      if self._peek()[0] == 'op' and self._peek()[1] == '(':
        if text not in FUNCTIONS:
          raise self._error(f'Unknown function "{text}"', token)
        self._next()
        arg = self._expr()
        self._expect(')')
        return Func(text, arg)
      if text in FUNCTIONS:
        raise self._error(f'Expected "(" after function "{text}"')
      if text == IMAGINARY_UNIT:
        return I
      return Sym(SYMBOL_ALIASES.get(text, text))
    if kind == 'op' and text == '(':
      e = self._expr()
      self._expect(')')
      return e
    if kind == 'end':
      raise self._error('Unexpected end of expression', token)
    raise self._error(f'Unexpected "{text}"', token)


def parse(text):
  """
  Parse `text` into an Expr.

  Args:
    text (str): Expression following the module grammar

  """
  if isinstance(text, bytes):
    text = text.decode('utf-8')
  return _Parser(text).parse()


# Printer

def _format_real(x):
  if x == int(x) and abs(x) < 1e15:
    return str(int(x))
  return repr(x)


def _format_const(value):
  re_part, im_part = value.real, value.imag
  if im_part == 0:
    text = _format_real(re_part)
    return f'({text})' if re_part < 0 else text
  if re_part == 0:
    if im_part == 1:
      return IMAGINARY_UNIT
    if im_part == -1:
      return f'(-{IMAGINARY_UNIT})'
    return f'({_format_real(im_part)}*{IMAGINARY_UNIT})'
  sign = '-' if im_part < 0 else '+'
  return f'({_format_real(re_part)} {sign} {_format_real(abs(im_part))}*{IMAGINARY_UNIT})'


@singledispatch
def _to_text(e):
  raise TypeError(f'Cannot print a {type(e).__name__}')


def _wrap(e, minimum):
  text, precedence = _to_text(e)
  return f'({text})' if precedence < minimum else text


@_to_text.register(Const)
def _(e):
  return _format_const(e.value), PRECEDENCE_ATOM


@_to_text.register(Sym)
def _(e):
  return e.name, PRECEDENCE_ATOM


@_to_text.register(Func)
def _(e):
  return f'{e.name}({_to_text(e.arg)[0]})', PRECEDENCE_ATOM


@_to_text.register(Add)
def _(e):
  parts = []
  for i_term, term in enumerate(e.terms):
    if isinstance(term, Neg):
      parts.append(('-' if i_term == 0 else ' - ') + _wrap(term.arg, PRECEDENCE_MUL))
    else:
      parts.append(('' if i_term == 0 else ' + ') + _wrap(term, PRECEDENCE_MUL))
  return ''.join(parts), PRECEDENCE_ADD


@_to_text.register(Mul)
def _(e):
  return '*'.join(_wrap(factor, PRECEDENCE_POW) for factor in e.factors), PRECEDENCE_MUL


@_to_text.register(Div)
def _(e):
  return f'{_wrap(e.num, PRECEDENCE_MUL)}/{_wrap(e.den, PRECEDENCE_POW)}', PRECEDENCE_MUL


@_to_text.register(Neg)
def _(e):
  return f'-{_wrap(e.arg, PRECEDENCE_MUL)}', PRECEDENCE_MUL


@_to_text.register(Pow)
def _(e):
  base = _wrap(e.base, PRECEDENCE_ATOM)
  exponent = e.exponent
  if exponent.denominator == 2:
    return f'{base}^({exponent.numerator}/2)', PRECEDENCE_POW
  if exponent < 0:
    return f'{base}^({exponent.numerator})', PRECEDENCE_POW
  return f'{base}^{exponent.numerator}', PRECEDENCE_POW


def to_text(e):
  """
  Return the text form of `e`. `parse(to_text(e))` is numerically equal to `e`.

  """
  return _to_text(as_expr(e))[0]


# Evaluation

class _EvalContext:

  def __init__(self, bindings, strict, real):
    self.bindings = bindings
    self.strict = strict
    self.real = real


@singledispatch
def _evaluate(e, ctx):
  raise TypeError(f'Cannot evaluate a {type(e).__name__}')


@_evaluate.register(Const)
def _(e, ctx):
  return np.complex128(e.value)


@_evaluate.register(Sym)
def _(e, ctx):
  try:
    value = ctx.bindings[e.name]
  except KeyError:
    raise EvaluationError(f'Unbound symbol "{e.name}"')
  return np.asarray(value, dtype=complex)


@_evaluate.register(Add)
def _(e, ctx):
  total = _evaluate(e.terms[0], ctx)
  for term in e.terms[1:]:
    total = total + _evaluate(term, ctx)
  return total


@_evaluate.register(Mul)
def _(e, ctx):
  product = _evaluate(e.factors[0], ctx)
  for factor in e.factors[1:]:
    product = product * _evaluate(factor, ctx)
  return product


@_evaluate.register(Neg)
def _(e, ctx):
  return -_evaluate(e.arg, ctx)


@_evaluate.register(Div)
def _(e, ctx):
  num = _evaluate(e.num, ctx)
  den = _evaluate(e.den, ctx)
  if ctx.strict and np.any(den == 0):
    raise SingularityError(f'Division by zero in "{to_text(e)}"')
  return num / den


@_evaluate.register(Pow)
def _(e, ctx):
  base = _evaluate(e.base, ctx)
  exponent = e.exponent
  if exponent < 0 and ctx.strict and np.any(base == 0):
    raise SingularityError(f'Zero raised to a negative power in "{to_text(e)}"')
  if exponent.denominator == 2:
    _check_sqrt_argument(base, ctx)
    return np.sqrt(base) ** exponent.numerator
  return base ** int(exponent)


@_evaluate.register(Func)
def _(e, ctx):
  arg = _evaluate(e.arg, ctx)
  if e.name == 'sqrt':
    _check_sqrt_argument(arg, ctx)
    return np.sqrt(arg)
  return getattr(np, e.name)(arg)


def _check_sqrt_argument(arg, ctx):
  if ctx.real and np.any((arg.imag == 0) & (arg.real < 0)):
    raise EvaluationError('Square root of a negative real number in a real-valued context')


def _evaluate_root(e, bindings, strict, real):
  e = as_expr(e)
  ctx = _EvalContext(bindings, strict, real)
  with np.errstate(all='ignore'):
    return _evaluate(e, ctx)


def evaluate(e, bindings, real=False):
  """
  Evaluate `e` exactly and recursively. Binding values can be numbers or numpy arrays (all of the
  same shape), in which case the evaluation is done elementwise.

  Args:
    e (Expr or str): Expression
    bindings (dict): Symbol name to complex value (or array of values)
    real (bool): Real-valued context. Square roots of negative reals raise an EvaluationError and
      the imaginary part of the result must vanish within 1e-10

  """
  value = _evaluate_root(e, bindings, strict=True, real=real)
  if not np.all(np.isfinite(value)):
    raise SingularityError(f'Non-finite value while evaluating "{to_text(e)}"')
  if real:
    if np.any(np.abs(value.imag) > REAL_CONTEXT_TOLERANCE):
      raise EvaluationError(f'"{to_text(e)}" has a non-vanishing imaginary part in a real-valued context')
    value = value.real
    return float(value) if np.ndim(value) == 0 else value
  return complex(value) if np.ndim(value) == 0 else value


def evaluate_samples(e, bindings):
  """
  Evaluate `e` elementwise over arrays of bindings without raising on singular points: those
  points are returned as NaN. Unbound symbols still raise an EvaluationError.

  """
  value = np.asarray(_evaluate_root(e, bindings, strict=False, real=False), dtype=complex)
  # Constant expressions still get one value per sampled point
  shape = np.broadcast_shapes(*(np.shape(v) for v in bindings.values())) if bindings else ()
  value = np.broadcast_to(value, np.broadcast_shapes(shape, value.shape))
  return np.where(np.isfinite(value), value, np.nan)


# Differentiation

@singledispatch
def _differentiate(e, symbol):
  raise TypeError(f'Cannot differentiate a {type(e).__name__}')


@_differentiate.register(Const)
def _(e, symbol):
  return ZERO


@_differentiate.register(Sym)
def _(e, symbol):
  return ONE if e.name == symbol else ZERO


@_differentiate.register(Add)
def _(e, symbol):
  return add(*(_differentiate(term, symbol) for term in e.terms))


@_differentiate.register(Mul)
def _(e, symbol):
  terms = []
  for i_factor, factor in enumerate(e.factors):
    d_factor = _differentiate(factor, symbol)
    if is_zero(d_factor):
      continue
    terms.append(mul(*e.factors[:i_factor], d_factor, *e.factors[i_factor+1:]))
  return add(*terms)


@_differentiate.register(Neg)
def _(e, symbol):
  return neg(_differentiate(e.arg, symbol))


@_differentiate.register(Div)
def _(e, symbol):
  d_num = _differentiate(e.num, symbol)
  d_den = _differentiate(e.den, symbol)
  if is_zero(d_den):
    return div(d_num, e.den)
  return div(sub(mul(d_num, e.den), mul(e.num, d_den)), power(e.den, 2))


@_differentiate.register(Pow)
def _(e, symbol):
  d_base = _differentiate(e.base, symbol)
  if is_zero(d_base):
    return ZERO
  return mul(Const(float(e.exponent)), power(e.base, e.exponent - 1), d_base)


@_differentiate.register(Func)
def _(e, symbol):
  d_arg = _differentiate(e.arg, symbol)
  if is_zero(d_arg):
    return ZERO
  if e.name == 'sqrt':
    return div(d_arg, mul(2, e))
  if e.name == 'sinh':
    return mul(func('cosh', e.arg), d_arg)
  if e.name == 'cosh':
    return mul(func('sinh', e.arg), d_arg)
  return mul(e, d_arg)


def diff_explicit(e, symbol):
  """
  Return the explicit partial derivative of `e` with respect to `symbol`. Every other symbol is
  held constant, including symbols that a chart would treat as derived.

  Args:
    e (Expr or str)
    symbol (str): Symbol name. Unknown symbols give 0

  """
  return _differentiate(as_expr(e), symbol)


# Substitution

@singledispatch
def _substitute(e, symbol, replacement):
  raise TypeError(f'Cannot substitute in a {type(e).__name__}')


@_substitute.register(Const)
def _(e, symbol, replacement):
  return e


@_substitute.register(Sym)
def _(e, symbol, replacement):
  return replacement if e.name == symbol else e


@_substitute.register(Add)
def _(e, symbol, replacement):
  return add(*(_substitute(term, symbol, replacement) for term in e.terms))


@_substitute.register(Mul)
def _(e, symbol, replacement):
  return mul(*(_substitute(factor, symbol, replacement) for factor in e.factors))


@_substitute.register(Neg)
def _(e, symbol, replacement):
  return neg(_substitute(e.arg, symbol, replacement))


@_substitute.register(Div)
def _(e, symbol, replacement):
  return div(_substitute(e.num, symbol, replacement), _substitute(e.den, symbol, replacement))


@_substitute.register(Pow)
def _(e, symbol, replacement):
  return power(_substitute(e.base, symbol, replacement), e.exponent)


@_substitute.register(Func)
def _(e, symbol, replacement):
  return func(e.name, _substitute(e.arg, symbol, replacement))


def subst(e, symbol, replacement):
  """
  Replace every occurrence of the symbol `symbol` in `e` by `replacement`. The symbol namespace
  is flat, so there is no capture to worry about.

  """
  e = as_expr(e)
  if symbol not in free_symbols(e):
    return e
  return _substitute(e, symbol, as_expr(replacement))


# Numerical equality

def relative_residual(a, b):
  """
  Return |a - b| / (1 + max(|a|, |b|)), elementwise for arrays.

  """
  a = np.asarray(a, dtype=complex)
  b = np.asarray(b, dtype=complex)
  return np.abs(a - b) / (1 + np.maximum(np.abs(a), np.abs(b)))


def equal_numeric(a, b, sampler, tol=1e-9, trials=10):
  """
  Decide whether `a` and `b` are equal as functions by evaluating them at `trials` points drawn
  from `sampler`. Points where either side is singular are skipped.

  Args:
    a, b (Expr or str)
    sampler: Object with a `draw(n)` method returning a dict of arrays (see `sampling`)
    tol (float): Relative tolerance, |a-b| <= tol*(1+max(|a|,|b|))
    trials (int): Number of sampled points, at least 1

  """
  assert trials >= 1, 'trials must be greater than or equal to 1'
  bindings = sampler.draw(trials)
  values_a = evaluate_samples(a, bindings)
  values_b = evaluate_samples(b, bindings)
  valid = np.isfinite(values_a) & np.isfinite(values_b)
  if not np.any(valid):
    raise SamplerExhaustedError(f'All {trials} sampled points are singular')
  residual = relative_residual(values_a[valid], values_b[valid])
  logger.debug(f'equal_numeric: {int(np.sum(valid))} points, max residual {float(np.max(residual)):.3e}')
  return bool(np.all(residual <= tol))
