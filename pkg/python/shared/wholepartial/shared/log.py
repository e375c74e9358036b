# SPDX-License-Identifier: MIT-0

import logging
import sys

from wholepartial.shared.util import EnvVarList


def get_logger(default_level='WARNING'):
  """
  Create and return the `wholepartial` logger. Records go to stderr so that the JSON documents
  printed by the command line stay parseable on stdout.

  Args:
    default_level (str): Log level used when `WPC_LOG_LEVEL` is unset

  """
  try:
    env = EnvVarList()

    # Log level
    env.add('log_level', 'WPC_LOG_LEVEL', default=default_level)

    # Include in each record line the current date and time if set to `yes`
    env.add('log_time', 'WPC_LOG_RECORD_TIME', default='no')

    # Include in each record line the logger and function names if set to `yes`
    env.add('log_funcname', 'WPC_LOG_FUNCTION_NAME', default='no')

  except Exception as e:
    print(f'Failed to initialize the logger - {e}', file=sys.stderr)
    sys.exit(1)

  logger = logging.getLogger('wholepartial')
  logger.setLevel(logging.getLevelName(env.log_level.upper()))

  # Set the log format
  log_format = '%(levelname)s '
  if env.log_time.lower() == 'yes':
    log_format += '%(asctime)s '
  if env.log_funcname.lower() == 'yes':
    log_format += '%(name)s:%(funcName)s '
  log_format += '%(message)s'

  # Calling `get_logger` twice must not duplicate every record
  if not any(getattr(h, '_wholepartial', False) for h in logger.handlers):
    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler._wholepartial = True
    logger.addHandler(stream_handler)
  for handler in logger.handlers:
    if getattr(handler, '_wholepartial', False):
      handler.setFormatter(logging.Formatter(log_format))

  return logger
