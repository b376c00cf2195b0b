"""Exact finite-N statistics via orthogonal polynomials on (-inf, y].

Monic polynomials pi_k orthogonal for the weight e^(-lambda^2) truncated at
y are built by the Stieltjes procedure (inner products by adaptive
quadrature feeding the three-term recurrence).  The Hankel-moment route is
catastrophically ill-conditioned; Stieltjes keeps matrix sizes up to 12 at
double precision.  From the recurrence follow the wave functions psi_k, the
Christoffel-Darboux kernel, the CDF of the largest eigenvalue, and the
exact density of states / first-gap PDF.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import erfcx

# conditioning cap: matrix size N <= 12 (the kernel needs N+1 polynomials)
MAX_MATRIX_SIZE = 12
MAX_POLYNOMIALS = MAX_MATRIX_SIZE + 1

_GL_NODES = 160


def truncation_amplitude(y: float) -> float:
    """a(y) = e^(-y^2) / (sqrt(pi) (1 + erf y)), written through the
    scaled complementary error function for stability at negative y."""
    return 1.0 / (math.sqrt(math.pi) * erfcx(-y))


@dataclass(frozen=True)
class OrthoSystem:
    """Monic-OP data at truncation point y: norms h_k and recurrence
    coefficients S_k, R_k with
    lambda pi_k = pi_{k+1} + S_k pi_k + R_k pi_{k-1}, R_k = h_k/h_{k-1}."""

    y: float
    n: int
    h: np.ndarray
    s_coef: np.ndarray
    r_coef: np.ndarray  # r_coef[0] is unused (set to 0)


def _weight_quad(f, y: float) -> float:
    """int_{-inf}^{y} f(lambda) e^(-lambda^2) d lambda.

    The weight is negligible beyond 13 standard widths, so the lower limit
    is cut there analytically."""
    lo = min(-13.0, y - 2.0)
    with np.errstate(all="ignore"):
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            val, _ = quad(lambda lam: f(lam) * math.exp(-lam * lam), lo, y,
                          epsabs=1e-14, epsrel=1e-13, limit=300)
    return val


def _eval_monic(s_coef, r_coef, k: int, lam: float) -> float:
    """pi_k(lam) by the forward monic recurrence."""
    p_prev, p = 0.0, 1.0
    for j in range(k):
        p_prev, p = p, (lam - s_coef[j]) * p - r_coef[j] * p_prev
    return p


def build_ortho_system(y: float, n: int) -> OrthoSystem:
    """Stieltjes procedure for the first n monic polynomials."""
    if not 1 <= n <= MAX_POLYNOMIALS:
        raise ValueError(
            f"n must be in [1, {MAX_POLYNOMIALS}] (double-precision "
            "conditioning bound)")
    if not math.isfinite(y):
        raise ValueError("y must be finite")
    h = np.zeros(n)
    s = np.zeros(n)
    r = np.zeros(n)
    for k in range(n):
        pk = lambda lam: _eval_monic(s, r, k, lam)
        h[k] = _weight_quad(lambda lam: pk(lam) ** 2, y)
        if h[k] <= 0.0:
            raise RuntimeError(f"norm h_{k} came out non-positive at y={y}")
        s[k] = _weight_quad(lambda lam: lam * pk(lam) ** 2, y) / h[k]
        if k > 0:
            r[k] = h[k] / h[k - 1]
    return OrthoSystem(y=y, n=n, h=h, s_coef=s, r_coef=r)


def psi_k(sys: OrthoSystem, k: int, lam: float) -> float:
    """Normalized wave function pi_k(lam) e^(-lam^2/2) / sqrt(h_k)."""
    if not 0 <= k < sys.n:
        raise IndexError(f"k must be in [0, {sys.n})")
    pk = _eval_monic(sys.s_coef, sys.r_coef, k, lam)
    return pk * math.exp(-lam * lam / 2.0) / math.sqrt(sys.h[k])


def _psi_pair_and_prime(sys: OrthoSystem, lam: float):
    """(psi_{N-1}, psi_N, psi_{N-1}', psi_N') with N = sys.n - 1."""
    s, r = sys.s_coef, sys.r_coef
    p_prev, p = 0.0, 1.0
    d_prev, d = 0.0, 0.0
    for j in range(sys.n - 1):
        d_prev, d = d, p + (lam - s[j]) * d - r[j] * d_prev
        p_prev, p = p, (lam - s[j]) * p - r[j] * p_prev
    w = math.exp(-lam * lam / 2.0)
    hN1 = math.sqrt(sys.h[sys.n - 2])
    hN = math.sqrt(sys.h[sys.n - 1])
    psi_n1 = p_prev * w / hN1
    psi_n = p * w / hN
    dpsi_n1 = (d_prev - lam * p_prev) * w / hN1
    dpsi_n = (d - lam * p) * w / hN
    return psi_n1, psi_n, dpsi_n1, dpsi_n


def kernel(sys: OrthoSystem, lam1: float, lam2: float) -> float:
    """Christoffel-Darboux kernel K_N(lam1, lam2) with N = sys.n - 1
    (the system must carry one polynomial beyond the matrix size)."""
    if sys.n < 2:
        raise ValueError("kernel needs at least two polynomials")
    rN = math.sqrt(sys.r_coef[sys.n - 1])
    if abs(lam1 - lam2) < 1e-7:
        lam = 0.5 * (lam1 + lam2)
        p1, p, d1, d = _psi_pair_and_prime(sys, lam)
        return rN * (d * p1 - d1 * p)
    a1, b1, _, _ = _psi_pair_and_prime(sys, lam1)
    a2, b2, _, _ = _psi_pair_and_prime(sys, lam2)
    return rN * (b1 * a2 - a1 * b2) / (lam1 - lam2)


def _log_partition(n: int) -> float:
    """log Z_N with Z_N = 2^(-N^2/2) (2 pi)^(N/2) prod_{j=1}^{N} j!"""
    return (-n * n / 2.0 * math.log(2.0)
            + n / 2.0 * math.log(2.0 * math.pi)
            + sum(math.lgamma(j + 1) for j in range(1, n + 1)))


def _log_cdf_from_norms(h: np.ndarray, n: int) -> float:
    return (math.lgamma(n + 1) - _log_partition(n)
            + float(np.sum(np.log(h[:n]))))


def cdf_lambda_max(y: float, n: int) -> float:
    """P(lambda_max <= y) = (N!/Z_N) prod_{j=0}^{N-1} h_j(y)."""
    if not 1 <= n <= MAX_MATRIX_SIZE:
        raise ValueError(f"n must be in [1, {MAX_MATRIX_SIZE}]")
    sys = build_ortho_system(y, n)
    return min(math.exp(_log_cdf_from_norms(sys.h, n)), 1.0)


@functools.lru_cache(maxsize=32)
def _dos_nodes(n: int, left_extension: int = 0):
    """Gauss-Legendre nodes over the support of the lambda_max density,
    with a prebuilt OrthoSystem, CDF value and K_N(y, y) at each node.

    `left_extension` widens the window downward; the kernel factor
    K_N(y - r, y - r) at negative r pushes integrand mass below the
    lambda_max support by about |r|."""
    lo, hi = -9.0, 9.0
    f = lambda y: cdf_lambda_max(y, n)
    # bisection for F = 1e-13 and 1 - F = 1e-13
    def bisect(target):
        a, b = lo, hi
        for _ in range(60):
            m = 0.5 * (a + b)
            if f(m) < target:
                a = m
            else:
                b = m
        return 0.5 * (a + b)
    y_lo = bisect(1e-13) - left_extension
    y_hi = bisect(1.0 - 1e-13)
    x, w = np.polynomial.legendre.leggauss(_GL_NODES)
    y_nodes = 0.5 * (y_hi - y_lo) * x + 0.5 * (y_hi + y_lo)
    weights = 0.5 * (y_hi - y_lo) * w
    systems = []
    cdf_vals = np.empty(_GL_NODES)
    kyy = np.empty(_GL_NODES)
    for i, y in enumerate(y_nodes):
        sys = build_ortho_system(y, n + 1)
        systems.append(sys)
        cdf_vals[i] = math.exp(_log_cdf_from_norms(sys.h, n))
        kyy[i] = kernel(sys, y, y)
    return y_nodes, weights, tuple(systems), cdf_vals, kyy


def dos_exact(r: float, n: int) -> float:
    """Exact mean density of eigenvalues at distance r below the maximum:

    (1/(N-1)) int dy F_N(y) [ K_N(y,y) K_N(y-r, y-r) - K_N(y, y-r)^2 ]

    using F_N'(y) = F_N(y) K_N(y,y).  Negative r is the analytic
    continuation used by the gap identity.
    """
    if n < 2:
        raise ValueError("dos_exact needs n >= 2")
    if n > MAX_MATRIX_SIZE:
        raise ValueError(f"n must be <= {MAX_MATRIX_SIZE}")
    extension = int(math.ceil(max(0.0, -r) + 1.0))
    y_nodes, weights, systems, cdf_vals, kyy = _dos_nodes(n, extension)
    total = 0.0
    for i, sys in enumerate(systems):
        y = y_nodes[i]
        k_rr = kernel(sys, y - r, y - r)
        k_yr = kernel(sys, y, y - r)
        total += weights[i] * cdf_vals[i] * (kyy[i] * k_rr - k_yr * k_yr)
    return total / (n - 1)


def gap_pdf_exact(r: float, n: int) -> float:
    """PDF of the first gap d = lambda_1 - lambda_2 at matrix size n:
    p_gap(r) = (N - 1) * dos_exact(-r)."""
    if r < 0:
        raise ValueError("gap distance must be >= 0")
    return (n - 1) * dos_exact(-r, n)
