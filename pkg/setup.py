from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as f:
    long_description = f.read()

setup(
    name="tbill_qae",
    version="0.1.0",
    packages=find_packages(include=["tbill_qae", "tbill_qae.*"]),
    package_data={"tbill_qae": ["data/*.map"]},
    install_requires=[
        "numpy>=1.24.0",
        "networkx>=3.0",
        "matplotlib>=3.7.0",
        "pydantic>=2.6.0",
        "pydantic-settings>=2.0.0",
        "python-dotenv>=1.0.0",
        "orjson>=3.9.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.3.1",
            "pytest-cov>=4.0.0",
            "pytest-mock>=3.10.0",
            "hypothesis>=6.80.0",
            "scipy>=1.10.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "tbill-qae=tbill_qae.cli:main",
        ],
    },
    python_requires=">=3.10",
    description="T-Bill pricing with quantum amplitude estimation and two-qubit gate scaling analysis",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3.11",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
)
