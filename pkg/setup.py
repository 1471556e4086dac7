#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import re
from pathlib import Path

from setuptools import setup

# Read the version straight from __version__.py so it never drifts from
# pyproject.toml / the package's __version__.
_version_text = (Path(__file__).parent / "orbitlab" / "__version__.py").read_text(encoding="utf-8")
_version_match = re.search(
    r'^__version__\s*=\s*["\']([^"\']+)["\']', _version_text, re.MULTILINE
)
if not _version_match:
    raise RuntimeError("Unable to find __version__ in orbitlab/__version__.py")
VERSION = _version_match.group(1)

setup(
    name="orbitlab",
    version=VERSION,
    description="Exact and p-adic experiments in arithmetic dynamics",
    packages=["orbitlab", "orbitlab.core", "orbitlab.arith", "orbitlab.utils"],
    include_package_data=True,
    install_requires=[
        "rich>=13.4.2",
        "sympy>=1.12",
        "mpmath>=1.3.0",
        "tomli>=2.0.1; python_version<'3.11'",
    ],
    extras_require={"dev": ["pytest>=7.0"]},
    entry_points={
        "console_scripts": [
            "orbitlab=orbitlab.core.cli:main",
        ],
    },
    python_requires=">=3.9",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ],
    keywords="arithmetic dynamics, p-adic, number fields, Tate algebra",
)
