# SPDX-License-Identifier: MIT-0

"""
Assert-based validation of the documents read by the toolbox (charts, algebras, shell presets and
conventions). Every helper names the full path of the offending item so that the message tells
the user where to look, e.g. `chart["derived"][0]["grad"]`.

"""

import math


def check_dict_attribute_exists_and_type(parent_dict, attribute, expected_type, path, optional=False):
  """
  Check that `attribute` exists in `parent_dict` and that its value is of `expected_type`.

  Args:
    parent_dict (dict)
    attribute (str)
    expected_type (type or tuple of types)
    path (str): Full path of `parent_dict` for error messages
    optional (bool): If `True`, return `False` instead of failing when the attribute is missing

  """
  if optional is True and not attribute in parent_dict:
    return False
  assert attribute in parent_dict, f'{path}["{attribute}"] is missing'
  assert isinstance(parent_dict[attribute], expected_type), f'{path}["{attribute}"] is not a {_type_name(expected_type)}'
  return True


def enumerate_list_and_check_item_type(parent_list, expected_type, path):
  """
  Enumerator that goes through each item of `parent_list` and checks that it is of type
  `expected_type`.

  Args:
    parent_list (list)
    expected_type (type or tuple of types)
    path (str): Full path of `parent_list` for error messages

  """
  for i_item, item in enumerate(parent_list):
    assert isinstance(item, expected_type), f'{path}[{i_item}] is not a {_type_name(expected_type)}'
    yield i_item, item


def enumerate_dict_and_check_item_type(parent_dict, expected_type, path):
  """
  Enumerator that goes through each attribute of `parent_dict` and checks that it is of type
  `expected_type`.

  Args:
    parent_dict (dict)
    expected_type (type or tuple of types)
    path (str): Full path of `parent_dict` for error messages

  """
  for key, value in parent_dict.items():
    assert isinstance(value, expected_type), f'{path}["{key}"] is not a {_type_name(expected_type)}'
    yield key, value


def check_list_item_type(parent_list, expected_type, path):
  for i_item, item in enumerate(parent_list):
    assert isinstance(item, expected_type), f'{path}[{i_item}] is not a {_type_name(expected_type)}'


def check_number(value, path, positive=False, allow_zero=True):
  """
  Check that `value` is a finite real number (booleans are rejected) and return it as a float.

  Args:
    value: Value to check
    path (str): Full path of the value for error messages
    positive (bool): Require `value >= 0`, or `value > 0` if `allow_zero` is `False`
    allow_zero (bool)

  """
  assert isinstance(value, (int, float)) and not isinstance(value, bool), f'{path} is not a number'
  assert math.isfinite(value), f'{path} is not finite'
  if positive is True:
    if allow_zero is True:
      assert value >= 0, f'{path} must be greater than or equal to 0'
    else:
      assert value > 0, f'{path} must be greater than 0'
  return float(value)


def check_range(value, path):
  """
  Check that `value` is a two-number list `[low, high]` with `0 < low < high` and return it as a
  tuple of floats.

  """
  assert isinstance(value, list) and len(value) == 2, f'{path} is not a two-number list'
  low = check_number(value[0], f'{path}[0]', positive=True, allow_zero=False)
  high = check_number(value[1], f'{path}[1]', positive=True, allow_zero=False)
  assert low < high, f'{path} must be in increasing order'
  return low, high


def check_choice(value, choices, path):
  assert value in choices, f'{path} must be one of {", ".join(str(c) for c in choices)}'
  return value


def check_square_matrix(value, size, path):
  """
  Check that `value` is a list of `size` lists of `size` numbers and return it as a list of lists
  of floats.

  """
  assert isinstance(value, list) and len(value) == size, f'{path} is not a {size}x{size} matrix'
  rows = []
  for i_row, row in enumerate(value):
    assert isinstance(row, list) and len(row) == size, f'{path}[{i_row}] is not a list of {size} numbers'
    rows.append([check_number(item, f'{path}[{i_row}][{i_col}]') for i_col, item in enumerate(row)])
  return rows


def _type_name(expected_type):
  if isinstance(expected_type, tuple):
    return ' or '.join(t.__name__ for t in expected_type)
  return expected_type.__name__
