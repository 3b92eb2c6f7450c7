"""Constant-curvature space forms: models, quotient groups, Clifford-Hopf geometry."""

__version__ = "0.1.0"
