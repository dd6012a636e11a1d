# matchstick/setup.py

from setuptools import setup, find_packages

setup(
    name='matchstick',
    version='1.0.0',
    description='Planar-map toolkit for matchstick graphs: validation, discharging audits, embedding and search.',
    packages=find_packages(exclude=['tests']),
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.8',
        'networkx>=2.8',
    ],
    entry_points={
        'console_scripts': [
            'matchstick=matchstick.cli:main',
        ],
    },
    classifiers=[
        'Programming Language :: Python :: 3',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
    ],
)
