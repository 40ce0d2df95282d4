"""Symmetry-classified random matrix ensembles: construction, Cartan structure, spectra."""

__version__ = "0.1.0"
