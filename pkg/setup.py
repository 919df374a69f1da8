from setuptools import setup, find_packages

setup(
    name="sdt",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=["numpy", "scipy", "pandas", "tqdm"],
    entry_points={"console_scripts": ["sdt=sdt.main:main"]},
)
