from setuptools import setup, find_packages

setup(
    name="veilvote",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"veilvote.config": ["*.yaml"]},
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pandas>=2.1.0",
        "pydantic>=2.3.0",
        "pyyaml>=6.0.1",
        "click>=8.1.7",
        "tabulate>=0.9.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.4.2",
            "pytest-mock>=3.11.1",
            "black>=23.9.1",
            "flake8>=6.1.0",
            "mypy>=1.5.1",
            "isort>=5.12.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "veilvote=cli.main:cli",
        ],
    },
    python_requires=">=3.9",
    description="Differentially private federated learning by label voting, with a Renyi-DP accountant",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
    ],
)
