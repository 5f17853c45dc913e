#!/usr/bin/env python3
"""
Setup script for cubiclin
"""

from setuptools import setup, find_packages
import os

# Read the version from cubiclin/__init__.py
with open(os.path.join('cubiclin', '__init__.py'), 'r') as f:
    for line in f:
        if line.startswith('__version__'):
            version = line.split('=')[1].strip().strip('"\'')
            break
    else:
        version = '0.0.0'

# Read README for long description
try:
    with open('README.md', 'r') as f:
        long_description = f.read()
except FileNotFoundError:
    long_description = "Exact certificates for properness questions about cubic-linear maps."

setup(
    name="cubiclin",
    version=version,
    description="Exact certificates for properness questions about cubic-linear maps x + (Ax)^3",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={
        'cubiclin': ['profiles/*.ini', 'docs/*.md'],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.19.0',
        'sympy>=1.7',
    ],
    extras_require={
        'tests': ['pytest>=6.0'],
    },
    entry_points={
        'console_scripts': [
            'cubiclin=cubiclin.main:main',
        ],
    },
)
