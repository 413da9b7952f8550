"""Construction-A lattices over binary quasi-cyclic LDPC codes.

Builds the lattice generator in quasi-cyclic form (systematic or
partial-circulant), encodes the odd-coordinate translate with circulant
convolutions, decodes over the unconstrained AWGN channel with two SPA-based
decoders, and applies nested-lattice shaping with an exact integer
least-squares quantizer.
"""

__version__ = "0.1.0"

from ._backend import BACKEND

__all__ = ["BACKEND", "__version__"]
