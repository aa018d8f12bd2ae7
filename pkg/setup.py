from setuptools import setup

setup(
    name="qcweyl",
    version="0.1",
    packages=["backends"],
    py_modules=["quaternion", "graded_algebra", "cohomology", "frame_algebra", "qc_data", "weyl", "heisenberg",
                "verification", "report", "runner", "config", "utils", "errors"],
    include_package_data=True,
    install_requires=["toml", "Markdown", "numpy", "sympy"],
    entry_points={
        "console_scripts": ["qcweyl = runner:main"],
    },
)
