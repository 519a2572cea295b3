"""Numerical laboratory for the 1D nonlocal transport equation

    u_t = (Lambda^{-alpha} u) u_x - nu Lambda^beta u

with a pseudo-spectral solver, blowup/regularity diagnostics and a
certification engine for the fractional-operator identities behind it.
"""

__version__ = "0.1.0"
