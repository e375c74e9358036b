# SPDX-License-Identifier: MIT-0

from wholepartial.shared.util import EnvVarList


def get_env():
  env = EnvVarList()

  # AWS region of the S3 buckets, only used for `s3://` locations
  env.add('region', 'AWS_REGION', default='')

  # Location of the conventions document (local path or `s3://bucket/key`). Defaults apply if
  # unset
  env.add('config_file', 'WPC_CONFIG_FILE', default='')

  # Location of a document with additional shell presets
  env.add('shell_presets_file', 'WPC_SHELL_PRESETS_FILE', default='')

  return env
