"""
Document loading for bodies, families and run configurations.
"""
from .spec_loader import SpecLoader

__all__ = ['SpecLoader']
