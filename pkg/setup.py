import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="NACS",
    version="0.1a",
    description=(
        "Numerical verification of nonautonomous Conley-Moser conditions "
        "for the Henon family."
    ),
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="",
    packages=setuptools.find_packages(exclude=["examples", "examples.*"]),
    install_requires=[
        "pandas>=1.5",
        "numpy",
        "scipy",
        "pyyaml",
        "psutil",
    ],
    entry_points={
        "console_scripts": [
            "horseshoe = NACS.src.Verify_It_So:verification_activation"
        ]
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: [Linux, Windows]",
    ],
    python_requires=">=3.8",
)
