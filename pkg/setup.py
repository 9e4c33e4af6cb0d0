from setuptools import setup, find_packages

setup(
    name="semiradius",
    version="0.1.0",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    install_requires=[
        "numpy>=1.26",
        "pandas>=2.2",
        "pydantic>=2.6",
        "PyYAML>=6.0",
        "tqdm>=4.66",
    ],
    entry_points={"console_scripts": ["semiradius=semiradius.cli:main"]},
)
