"""
wigner_cs: low-coherence sensing matrices from Wigner D-functions and spherical harmonics.
"""

__version__ = "0.1.0"
