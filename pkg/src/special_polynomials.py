"""
Composant 2: SpecialPolynomials (Polynômes orthogonaux)
Jacobi (paramètres et argument complexes), Hermite, Laguerre généralisé
"""

import logging
import math

import numpy as np
from numpy.polynomial import polynomial as npoly

from src.errors import DegenerateParameterError, InvalidParameterError, PrecisionError

logger = logging.getLogger(__name__)

# Borne de précision en double pour |z| ≤ 10
MAX_DEGREE = 60


def _check_degree(n):
    if int(n) != n or n < 0:
        raise InvalidParameterError(f"Polynomial degree must be a nonnegative integer, got {n}")
    if n > MAX_DEGREE:
        raise PrecisionError(f"Degree n={n} above the supported bound {MAX_DEGREE}")
    return int(n)


def _is_degenerate(a, n):
    # (a+1)_k s'annule pour un k < n
    return any((a + 1 + k) == 0 for k in range(n))


def _hypergeometric_sum(n, a, b, w):
    """
    Σ_k [(-n)_k (n+a+b+1)_k / ((a+1)_k k!)] w^k, pondérée par (a+1)_n/n!

    Les termes sont formés par produits successifs.
    """
    prefactor = complex(1.0)
    for k in range(n):
        prefactor *= (a + 1 + k) / (k + 1)

    term = np.ones_like(w) * prefactor
    total = term.copy()
    for k in range(n):
        term = term * ((k - n) * (n + a + b + 1 + k) / ((a + 1 + k) * (k + 1))) * w
        total = total + term
    return total


def jacobi_eval(n, alpha, beta, z):
    """
    Polynôme de Jacobi P_n^(α,β)(z)

    Somme hypergéométrique terminée en w = (1 - z)/2. Si (α+1)_k s'annule,
    bascule sur la forme miroir (-1)^n P_n^(β,α)(-z).

    Args:
        n (int): Degré (≤ 60)
        alpha (complex): Paramètre α
        beta (complex): Paramètre β
        z (complex | ndarray): Argument

    Returns:
        complex | ndarray: P_n^(α,β)(z)
    """
    n = _check_degree(n)
    alpha = complex(alpha)
    beta = complex(beta)
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)

    if n == 0:
        result = np.ones_like(z)
    elif not _is_degenerate(alpha, n):
        result = _hypergeometric_sum(n, alpha, beta, (1.0 - z) / 2.0)
    elif not _is_degenerate(beta, n):
        logger.debug("Jacobi expansion degenerate for alpha=%s, using mirrored form", alpha)
        result = (-1) ** n * _hypergeometric_sum(n, beta, alpha, (1.0 + z) / 2.0)
    else:
        raise DegenerateParameterError(
            f"Both Jacobi expansions degenerate for n={n}, alpha={alpha}, beta={beta}"
        )

    return complex(result) if scalar else result


def hermite_eval(n, x):
    """
    Polynôme de Hermite (physiciens) H_n(x)

    H_{n+1} = 2x H_n - 2n H_{n-1}

    Args:
        n (int): Degré (≤ 60)
        x (float | ndarray): Argument

    Returns:
        float | ndarray: H_n(x)
    """
    n = _check_degree(n)
    scalar = np.ndim(x) == 0
    x = np.asarray(x)
    h_prev = np.ones_like(x, dtype=np.result_type(x, float))
    h = h_prev if n == 0 else 2.0 * x * h_prev
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    if scalar:
        return complex(h) if np.iscomplexobj(h) else float(h)
    return h


def laguerre_coefficients(n, alpha):
    """
    Coefficients en puissances croissantes de L_n^(α)

    c_k = (-1)^k (α+k+1)_{n-k} / ((n-k)! k!)
    """
    coeffs = np.empty(n + 1)
    for k in range(n + 1):
        poch = 1.0
        for j in range(n - k):
            poch *= alpha + k + 1 + j
        coeffs[k] = (-1) ** k * poch / (math.factorial(n - k) * math.factorial(k))
    return coeffs


def laguerre_eval(n, alpha, x):
    """
    Polynôme de Laguerre généralisé L_n^(α)(x)

    Args:
        n (int): Degré (≤ 60)
        alpha (float): Paramètre, α ∉ {-1, -2, ...}
        x (float | ndarray): Argument

    Returns:
        float | ndarray: L_n^(α)(x)
    """
    n = _check_degree(n)
    alpha = float(alpha)
    if alpha < 0 and alpha == int(alpha):
        raise InvalidParameterError(f"Laguerre parameter alpha must not be a negative integer, got {alpha}")
    scalar = np.ndim(x) == 0
    value = npoly.polyval(np.asarray(x, dtype=float), laguerre_coefficients(n, alpha))
    return float(value) if scalar else value
