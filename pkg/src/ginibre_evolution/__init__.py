"""Real eigenvalues of matrix-valued Brownian motion: simulation, exact formulas and checks."""
__version__ = "0.1.0"
