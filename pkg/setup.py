# SPDX-License-Identifier: MIT-0

# Root manifest aggregating the three distributions under python/ so the
# repository can be installed in one step.

from setuptools import setup


setup(
  name='whole-partial',
  version="1.0",
  packages=['wholepartial.shared', 'wholepartial.calculus', 'wholepartial.cli'],
  package_dir={
    'wholepartial.shared': 'python/shared/wholepartial/shared',
    'wholepartial.calculus': 'python/calculus/wholepartial/calculus',
    'wholepartial.cli': 'python/cli/wholepartial/cli'
  },
  install_requires=[
    'boto3',
    'click',
    'numpy',
    'pyyaml'
  ],
  entry_points={
    'console_scripts': ['wholepartial=wholepartial.cli.main:main']
  }
)
