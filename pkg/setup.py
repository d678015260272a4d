from setuptools import setup

setup(
    name='sg-alg',
    version='0.1.0',
    packages=['sgalg'],
    package_data={'sgalg': ['templates/*.j2']},
    install_requires=[
        'fastapi',
        'uvicorn',
        'python-multipart',
        'python-dotenv',
        'jinja2',
    ],
    entry_points={
        'console_scripts': ['sg-alg=sgalg.cli:main'],
    },
)
