from setuptools import setup, find_packages

setup(
    name="sigma-yamabe-tool",
    version="0.1.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "numpy>=1.21.0",
        "scipy>=1.8.0",
        "pandas>=1.5.0",
        "pydantic>=2.0.0",
    ],
    entry_points={
        "console_scripts": [
            "sigma-yamabe=sigma_yamabe.main:main",
        ],
    },
    python_requires=">=3.9",
)
