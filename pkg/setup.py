
from setuptools import setup

setup(
    name='senbd_methods',
    version='0.1.0',
    description='Simulation, estimation and network analysis of discrete '
                'self-exciting negative binomial and Hawkes count processes',
    author='Aaron Snoswell',
    author_email='aaron.snoswell@uqconnect.edu.au',
    license='MIT',
    packages=[
        'senbd_methods',
        'senbd_methods.utils'
    ],
    install_requires=[
        'numpy',
        'scipy',
        'networkx',
        'pyyaml',
        'tqdm'
    ],
    extras_require={
        'test': ['pytest']
    },
    entry_points={
        'console_scripts': [
            'senbd_methods=senbd_methods.cli:main'
        ]
    },
    zip_safe=False
)
