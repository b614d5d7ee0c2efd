from setuptools import setup, find_packages

setup(
    name="twitter_mood_forecast",
    version="1.0.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    package_data={"app": ["resources/*.txt", "resources/*.tsv"]},
    install_requires=[
        "python-dotenv==1.0.0",
        "pydantic==2.5.0",
        "numpy>=1.24",
        "scipy>=1.10",
        "pandas>=2.0",
        "matplotlib>=3.7",
    ],
    extras_require={
        "test": ["pytest>=7.4", "statsmodels>=0.14"],
    },
    entry_points={
        "console_scripts": ["moodcast=app.main:main"],
    },
    python_requires=">=3.9",
)
