"""
Setup configuration for noerlund
Installs the package (editable for testing) and the ``noerlund`` command
"""

from setuptools import setup, find_packages

setup(
    name="noerlund",
    version="1.0.0",
    packages=find_packages(exclude=["examples", "examples.*"]),
    python_requires=">=3.11",
    install_requires=[
        # Dependencies are managed in requirements.txt
    ],
    entry_points={
        "console_scripts": [
            "noerlund=noerlund.main:main",
        ],
    },
)
