"""gammalab: numerical and exact experiments around the Gamma function.

Modules
-------
gamma_core       evaluation of Gamma, log Gamma, digamma and functional-equation checks
level_curves     continuation of the curves |Gamma(x + iy)| = r
fiber_solver     winding-number counts and certified solutions of Gamma(z) = c
almost_integer   exact decision procedure for almost-integer-valued Puiseux polynomials
bialgebraic_lab  Gamma-images of varieties, numerical relation rank, decay probes
"""
__version__ = "0.1.0"
