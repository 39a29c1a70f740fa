# This file makes the directory a Python package
from .sample import Sample, Seed
from .distribution import DomainPoint, Dist, YatracosSet

__all__ = ['Sample', 'Seed', 'DomainPoint', 'Dist', 'YatracosSet']
