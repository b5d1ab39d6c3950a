"""Novikov-field series, wall crossing and scattering for Hirzebruch surface mirrors."""

__version__ = "0.1.0"
