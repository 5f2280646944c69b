"""Exact verification of a flag-algebra bound on triangle-free graphs and
spectral checks of the signless Laplacian bound it implies."""

__version__ = "0.1.0"
