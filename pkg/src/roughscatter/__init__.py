"""Billiard scattering on rough two-dimensional convex bodies.

Subpackages: geometry (ray/conic primitives), hollows (billiard map through
one opening), measures (scattering measures on the angle square), synthesis
(reflector hollows realizing a prescribed direction pairing), body
(whole-body scattering and packing), transport (resistance and its
Monge-Kantorovich minimization), cli (command-line front end).
"""

__version__ = "0.1.0"

from .backend import USING_NUMBA

__all__ = ["USING_NUMBA", "__version__"]
