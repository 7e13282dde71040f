#!/usr/bin/env python
""" Best approximation pairs between two convex sets: solvers, certificates, and a grid oracle """

from setuptools import setup, find_packages

setup(
    name='bestapprox',
    version='1.0.1',
    author='Mark Vartanyan',
    author_email='kolypto@gmail.com',

    license='BSD',
    description=__doc__,
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    keywords=['convex', 'optimization', 'best approximation', 'alternating projections'],

    packages=find_packages(exclude=('tests',)),
    package_data={'bestapprox': ['problems/*.json']},
    scripts=[],
    entry_points={
        'console_scripts': [
            'bestapprox = bestapprox.cli:main',
        ],
    },

    python_requires='>= 3.8',
    install_requires=[
        'numpy >= 1.17',
        'scipy >= 1.4',
        'funcy',
    ],
    extras_require={},
    include_package_data=True,
    test_suite='tests',

    platforms='any',
    classifiers=[
        # https://pypi.python.org/pypi?%3Aaction=list_classifiers
        'Programming Language :: Python :: 3',
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Operating System :: OS Independent',
    ],
)
