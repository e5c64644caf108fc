from codecs import open
from os import path

from setuptools import find_packages
from setuptools import setup

here = path.abspath(path.dirname(__file__))

about = {}
with open(path.join(here, "src", "minsumkd", "__version__.py"), encoding="utf8") as fh:
    exec(fh.read(), about)

with open(path.join(here, "README.md"), "r", "utf-8") as f:
    readme = f.read()

setup(
    name="minsumkd",
    version=about["__version__"],
    description="Offset min-sum decoders trained by knowledge distillation, with a Monte-Carlo "
    "BER harness",
    long_description=readme,
    long_description_content_type="text/markdown",
    packages=find_packages("src"),
    package_dir={"": "src"},
    package_data={"minsumkd": ["data/*.alist"]},
    include_package_data=True,
    zip_safe=False,
    python_requires=">=3.9, <4",
    install_requires=[
        "chardet",
        "click>=8.0, <9",
        "click_plugins>=1.1.1",
        "colorama>=0.4.3",
        "matplotlib>=3.5",
        "numpy>=1.22",
        "pandas>=1.3",
        "scipy>=1.8",
    ],
    extras_require={
        "dev": [
            "flake8>=3.8.3",
            "pytest>=7.0",
            "pytest-cov>=3.0",
            "pytest-mock>=3.6",
            "tox>=3.17.1",
        ],
        "docs": [
            "sphinx>=4.4.0",
            "myst-parser>=0.17",
            "sphinx_rtd_theme>=1.0.0",
            "sphinx-click",
        ],
    },
    classifiers=[
        "Intended Audience :: Science/Research",
        "Natural Language :: English",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: Implementation :: CPython",
        "Topic :: Scientific/Engineering",
    ],
    entry_points={"console_scripts": ["minsumkd=minsumkd.main:cli"]},
)
