"""Airy functions and the soft-edge eigenvalue density."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.special


@dataclass(frozen=True)
class AiryValues:
    ai: float
    ai_prime: float
    bi: float


def airy(x: float) -> AiryValues:
    """Ai, Ai' and Bi at x."""
    ai, aip, bi, _ = scipy.special.airy(x)
    return AiryValues(ai=float(ai), ai_prime=float(aip), bi=float(bi))


def airy_wronskian(x: float) -> float:
    """Ai(x)Bi'(x) - Ai'(x)Bi(x), identically 1/pi."""
    ai, aip, bi, bip = scipy.special.airy(x)
    return float(ai * bip - aip * bi)


def ai_values(x: np.ndarray) -> np.ndarray:
    """Vectorized Ai."""
    return scipy.special.airy(x)[0]


def ai_prime_values(x: np.ndarray) -> np.ndarray:
    """Vectorized Ai'."""
    return scipy.special.airy(x)[1]


def edge_density(x) -> float:
    """Mean eigenvalue density at the soft edge in scaled variables:
    Ai'(x)^2 - x Ai(x)^2 (Airy kernel at coinciding points).

    Tends to sqrt(-x)/pi as x -> -inf and decays like
    exp(-(4/3) x^(3/2)) / (8 pi x) as x -> +inf.
    """
    ai, aip, _, _ = scipy.special.airy(x)
    val = aip**2 - x * ai**2
    return float(val) if np.ndim(x) == 0 else val
