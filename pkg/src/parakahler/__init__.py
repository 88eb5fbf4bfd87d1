"""Numerical para-Kaehler geometry on products of Lorentzian surfaces.

Modules
-------
paracomplex   split-complex arithmetic
surface       chart-based Lorentzian surfaces, curvature, Frenet curves
models        para-complex plane, de Sitter and anti de Sitter charts
product       the product structure ``(G^eps, J, Omega^eps)`` and its curvature
lagrangian    sampled Lagrangian immersions and their invariants
variation     second variation of area (normal and Hamiltonian)
adsgauss      bivectors of ``R^{2,2}`` and the tube Gauss map in AdS^3
cli           batch command-line front end
"""

__version__ = "0.1.0"
