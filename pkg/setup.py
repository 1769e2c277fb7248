from codecs import open
import os
import sys

try:
    from setuptools import setup
except ImportError:
    print("Installing atrc-lab requires setuptools.  Do 'pip install setuptools'.")
    sys.exit(1)

here = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(here, 'README.rst'), encoding='utf-8') as f:
    long_description = f.read()

setup(name='atrc-lab',
    version='1.0.0',
    description='Exact and Monte Carlo checks for the Ashkin-Teller random-cluster model',
    long_description=long_description,
    license='GPL',
    classifiers=[
        # How mature is this project? Common values are
        #   3 - Alpha
        #   4 - Beta
        #   5 - Production/Stable
        'Development Status :: 4 - Beta',

        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Scientific/Engineering :: Physics',

        'License :: OSI Approved :: GNU General Public License v3 or later (GPLv3+)',

        'Programming Language :: Python :: 3',
    ],
    keywords='ashkin-teller random-cluster percolation six-vertex markov-chain',
    packages=['atrclab', 'atrclab.test'],
    python_requires='>=3.8',
    install_requires=['numpy', 'scipy', 'networkx'],
    tests_require=['numpy', 'scipy', 'networkx'],
    test_suite="atrclab.test",
    entry_points={'console_scripts': ['atrc-lab=atrclab.cli:run']},
    zip_safe=False)
