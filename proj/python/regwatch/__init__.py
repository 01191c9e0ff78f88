"""Pseudo-spectral periodic-box Navier-Stokes solver with alignment diagnostics.

Velocity fields are numpy arrays of shape (3, n, n, n), scalar fields
(n, n, n), C-contiguous with x fastest. See the function docstrings on the
compiled module for the operation surface.
"""

from ._regwatch import *  # noqa: F401,F403
