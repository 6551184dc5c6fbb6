from setuptools import setup, find_packages

with open("README.md", "r") as fh:
    long_description = fh.read()

setup(name='srm_benchmark',
      version='0.1.0',
      install_requires=['numpy>=1.25', 'scipy>=1.10', 'pandas>=2.0'],
      extras_require={'test': ['pytest>=7', 'hypothesis>=6']},
      packages=find_packages(exclude=['tests']),
      entry_points={'console_scripts': ['srm-benchmark=srm_benchmark.harness.cli:main']},
      description="A package for learning-based sum-rate maximization with per-user rate requirements, with the baselines and the harness to compare power allocators against each other.",
      long_description=long_description,
      long_description_content_type="text/markdown",
      python_requires='>=3.9',
      classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
      ]
)
