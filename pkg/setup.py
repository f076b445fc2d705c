import pathlib
from setuptools import setup

# The directory containing this file
HERE = pathlib.Path(__file__).parent

# The text of the README file
README = (HERE / "README.md").read_text()

setup(
    name="trig_wind",
    version="0.1.0",
    python_requires=">=3.8",
    description="Wind speed forecasting with generalized trigonometric seasonality, ARFIMA and APARCH",
    long_description=README,
    long_description_content_type="text/markdown",
    license="MIT",
    packages=["trig_wind", "trig_wind/aparch", "trig_wind/estimation"],
    include_package_data=True,
    setup_requires=[
        "wheel",
    ],
    install_requires=[
        "numdifftools",
        "numpy",
        "pandas>=2",
        "pydantic<2",
        "scipy",
        "tornado",
    ],
    entry_points={
        "console_scripts": ["trig-wind=trig_wind.cli:main"],
    },
)
