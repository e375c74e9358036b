# SPDX-License-Identifier: MIT-0

from setuptools import setup


setup(
  name='whole-partial-shared',
  version="1.0",
  packages=['wholepartial.shared'],
  install_requires=[
    'boto3',
    'pyyaml'
  ]
)
