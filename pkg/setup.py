"""Dummy Setup File for accessing setup.cfg"""
from setuptools import setup

if __name__ == '__main__':
    setup()
