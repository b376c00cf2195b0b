"""Near-extreme eigenvalue statistics of the Gaussian Unitary Ensemble.

Exact finite-N density of states near the largest eigenvalue and first-gap
PDF (orthogonal polynomials on a truncated Gaussian weight), their edge
scaling limits built from the Hastings-McLeod Painleve II transcendent and
the Painleve XXXIV Lax pair, and Monte Carlo validation via the
tridiagonal beta = 2 ensemble.
"""

__version__ = "0.1.0"
