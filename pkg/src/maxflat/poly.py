"""Complex polynomial helpers: construction from roots, evaluation, products, roots.

Coefficient vectors are one-dimensional numpy arrays in descending powers
(``p[0]`` multiplies the highest power of z).
"""

from __future__ import annotations

import numpy as np

# Leading coefficients smaller than this (relative to the largest coefficient
# magnitude) are treated as exact zeros before root-finding; derivative
# polynomials built from cancelling constraints can carry such residues.
LEADING_COEFF_TOL = 1e-14


def poly_from_roots(roots) -> np.ndarray:
    """Monic polynomial (descending powers) with the given root multiset."""
    roots = np.asarray(roots, dtype=complex)
    return np.poly(roots) if roots.size else np.ones(1, dtype=complex)


def strip_leading(p) -> np.ndarray:
    """Drop near-zero leading coefficients (relative to the largest one)."""
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    scale = np.max(np.abs(p))
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    keep = np.flatnonzero(np.abs(p) > LEADING_COEFF_TOL * scale)
    return p[keep[0]:]


def poly_roots(p) -> np.ndarray:
    """All complex roots (with multiplicity) via the companion matrix."""
    p = strip_leading(p)
    if p.size < 2:
        raise ValueError("polynomial of degree 0 has no roots")
    return np.roots(p)


def poly_mul(p, q) -> np.ndarray:
    """Coefficient convolution: product polynomial in descending powers."""
    return np.convolve(np.asarray(p, dtype=complex), np.asarray(q, dtype=complex))


def poly_eval(p, z):
    """Horner evaluation of ``p`` at scalar or array argument ``z``."""
    return np.polyval(np.asarray(p, dtype=complex), z)


def poly_derivative(p) -> np.ndarray:
    """Formal derivative, descending powers."""
    p = np.asarray(p, dtype=complex)
    n = p.size - 1
    if n < 1:
        return np.zeros(1, dtype=complex)
    return p[:-1] * np.arange(n, 0, -1)
