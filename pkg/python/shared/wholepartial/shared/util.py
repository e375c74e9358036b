# SPDX-License-Identifier: MIT-0

import json
import logging
import os
import re

import boto3
import yaml

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

S3_LOCATION_PATTERN = r'^s3://([^/]+)/(.+)$'

# Content type to (decode bytes, encode value)
CODECS = {
  'bytes': (lambda b: b, lambda v: v),
  'str': (lambda b: b.decode(), lambda v: v.encode()),
  'json': (lambda b: json.loads(b.decode()), lambda v: json.dumps(v, indent=2, sort_keys=True).encode()),
  # JSON documents are valid YAML, so chart or algebra files may use either syntax
  'yaml': (lambda b: yaml.safe_load(b.decode()), lambda v: yaml.safe_dump(v, sort_keys=True).encode()),
}


def _s3_client(aws_region):
  return boto3.client('s3', region_name=aws_region or None)


def _codec(content_type):
  if content_type not in CODECS:
    raise ValueError(f'Unknown content type "{content_type}", expected one of {", ".join(CODECS)}')
  return CODECS[content_type]


def split_s3_location(location):
  """
  Return `(bucket, key)` if `location` is an `s3://bucket/key` URI, otherwise None.

  """
  match = re.match(S3_LOCATION_PATTERN, location)
  return (match.group(1), match.group(2)) if match else None


def load_file(location, aws_region=None, content_type='str'):
  """
  Read a document from Amazon S3 or from the local file system and decode it. Conventions,
  chart, algebra and shell preset documents are all read through this function.

  Args:
    location (str): Local path, or `s3://bucket/key`
    aws_region (str): AWS region of the bucket
    content_type (str): One of `bytes`, `str`, `json` or `yaml`

  """
  logger.debug(f'Loading "{location}" as {content_type}')
  try:
    decode, _ = _codec(content_type)
    s3_location = split_s3_location(location)
    if s3_location:
      bucket, key = s3_location
      raw = _s3_client(aws_region).get_object(Bucket=bucket, Key=key)['Body'].read()
    else:
      with open(location, 'rb') as f:
        raw = f.read()
    return decode(raw)
  except Exception as e:
    raise Exception(f'Failed to load {location} as {content_type} - {e}')


def write_file(content, location, aws_region=None, content_type='str'):
  """
  Encode `content` and write it to Amazon S3 or to the local file system.

  Args:
    content: Bytes, string, or a document for the `json` and `yaml` content types
    location (str): Local path, or `s3://bucket/key`
    aws_region (str): AWS region of the bucket
    content_type (str): One of `bytes`, `str`, `json` or `yaml`

  """
  logger.debug(f'Writing {content_type} content to "{location}"')
  try:
    _, encode = _codec(content_type)
    raw = encode(content)
    s3_location = split_s3_location(location)
    if s3_location:
      bucket, key = s3_location
      _s3_client(aws_region).put_object(Body=raw, Bucket=bucket, Key=key)
    else:
      with open(location, 'wb') as f:
        f.write(raw)
  except Exception as e:
    raise Exception(f'Failed to write {content_type} content to {location} - {e}')


class EnvVarList:
  """
  Environment variables exposed as attributes. Each `add` call reads one variable immediately.

  """

  def __init__(self):
    self._variables = {}

  def add(self, attr_name, var_name, cast=None, default=None):
    """
    Args:
      attr_name (str): Attribute that receives the value
      var_name (str): Name of the environment variable
      cast (callable, Optional): Conversion applied to the value
      default (Optional): Value used when the variable is unset. Without it an unset variable
        raises an exception

    """
    raw = os.environ.get(var_name, default)
    if raw is None:
      raise Exception(f'Missing value for environment variable {var_name}')
    try:
      value = raw if cast is None else cast(raw)
    except Exception as e:
      raise Exception(f'Unable to cast {var_name} with {getattr(cast, "__name__", cast)} - {e}')
    logger.debug(f'{var_name} = {value}')
    self._variables[attr_name] = var_name
    setattr(self, attr_name, value)

  def __repr__(self):
    names = ', '.join(f'{attr}={self._variables[attr]}' for attr in self._variables)
    return f'EnvVarList({names})'
