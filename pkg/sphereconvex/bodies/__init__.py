"""
Seeded body zoo.
"""
from .generators import cap_body, family_member, generate, iter_family

__all__ = ['cap_body', 'family_member', 'generate', 'iter_family']
