import pathlib

from setuptools import find_packages, setup

here = pathlib.Path(__file__).parent.resolve()

long_description = (here / "README.md").read_text(encoding="utf-8")

extras_typing = [
    "mypy >= 0.901",
    "pandas-stubs",
    "types-PyYAML",
]

setup(
    name="globtherm",
    description="Global Bayesian thermometry with scale-invariant priors",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3 :: Only",
        "Typing :: Typed",
    ],
    keywords="thermometry bayesian estimation fisher information",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    python_requires=">=3.8, <4",
    use_scm_version={"fallback_version": "0.1.0"},
    setup_requires=["setuptools_scm"],
    install_requires=[
        "attrs",
        "humanize",
        "numpy >= 1.20",
        "pandas",
        "pluggy",
        "pydantic >= 1.9, < 2",
        "scipy >= 1.6",
        "typing-extensions",
        "PyYAML >= 5.1",
        # CLI requirements
        "click >= 8.0.0, != 8.1.0, < 8.2",
        "rich >= 11.0.0",
    ],
    extras_require={
        "dev": [
            "black >= 22.1.0",
            "check-manifest",
            "flake8",
            "isort",
            "pre-commit",
        ]
        + extras_typing,
        "docs": [
            "furo",
            "sphinx",
        ],
        "test": [
            "pytest",
            "pytest-cov",
        ],
        "typing": extras_typing,
    },
    include_package_data=True,
    package_data={
        "globtherm": ["py.typed"],
    },
    entry_points="""
        [console_scripts]
        globtherm=globtherm.cli:cli
    """,
)
