from __future__ import annotations

from setuptools import find_packages, setup

setup(
    version="0.1.0",
    packages=find_packages(exclude=["tests", "examples"]),
)
