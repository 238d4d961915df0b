"""Exact computational toolkit for generalized complex structures on flat
hyperkahler models: exterior/Clifford algebra over rational scalars, the
double tangent space T+T*, Courant calculus, and the twistor-family
verification suites.
"""

__version__ = "0.1.0"
