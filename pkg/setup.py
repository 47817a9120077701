import setuptools

# python3 -m pip install --user --upgrade setuptools wheel
# python3 setup.py sdist bdist_wheel
# python3 -m pip install .

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="pirouette",
    version="0.1.0",
    description="Feedback motion prediction and safe path following for unicycle robots.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        'numpy>=1.16.2',
        'scipy>=1.6.0',
    ],
    entry_points={
        "console_scripts": ["pirouette = pirouette.cli:main"],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
)
