"""Laplace eigenvalues of geodesic balls in constant-curvature spaces."""

__version__ = "0.1.0"
