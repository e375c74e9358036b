# SPDX-License-Identifier: MIT-0

from setuptools import setup


setup(
  name='whole-partial-cli',
  version="1.0",
  packages=['wholepartial.cli'],
  install_requires=[
    'click',
    'whole-partial-calculus',
    'whole-partial-shared'
  ],
  entry_points={
    'console_scripts': ['wholepartial=wholepartial.cli.main:main']
  }
)
