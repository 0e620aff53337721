"""Finite groups, subgroup lattices, and transfer systems on them."""
__version__ = "0.1.0"
