# SPDX-License-Identifier: MIT-0

from setuptools import setup


setup(
  name='whole-partial-calculus',
  version="1.0",
  packages=['wholepartial.calculus'],
  install_requires=[
    'numpy',
    'pyyaml',
    'whole-partial-shared'
  ]
)
