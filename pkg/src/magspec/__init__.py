"""Spectral computations for magnetic Schrodinger operators on the unit disk.

The operator ``(i grad + A)^2 - V`` with a radial field blowing up at the
boundary splits into angular-momentum channels; this package discretises
each channel, sums the negative spectrum, and checks it against explicitly
constructed eigenvalue bounds.
"""
__version__ = "0.1.0"
