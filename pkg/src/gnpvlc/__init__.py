"""Secure visible-light communication with chiral gold-nanoparticle plates.

Polarization calculus, indoor channel geometry, GNP plate model, precoders,
polarizer-angle optimization and secrecy/SER evaluation.
"""

__version__ = "0.1.0"
