"""Numerical checks for random constructions on A2 buildings: finite fields,
projective planes, link spectra, perforation, local rings, density model."""

__version__ = "0.1.0"
