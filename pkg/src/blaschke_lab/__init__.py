"""Numerical experiments on the Wiener/Hardy norm ratio of Blaschke powers.

Submodules
----------
phase
    Stationary-phase geometry ``q, phi, psi, F, r`` and their derivatives.
coeffs
    Taylor coefficients of ``b_lam**n / (1 - lam z)`` by three engines.
norms
    l1/l2 norms as certified intervals and sharpness sweeps.
asymptotics
    Leading-order coefficient asymptotics and oscillatory-integral oracles.
equidist
    Window solver, weighted sums and Weyl/van der Corput checks.
cli
    ``blaschke-lab`` command-line front end.
"""

__version__ = "0.1.0"
