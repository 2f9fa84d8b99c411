"""
Composant 6: OrderingMap (Ambiguïté d'ordonnancement)
Potentiel effectif du hamiltonien de von Roos à deux paramètres,
T = ¼(m^α P m^β P m^γ + m^γ P m^β P m^α), α + β + γ = -1
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.errors import InconsistentExtractionError, InvalidParameterError
from src.mass_catalog import mass_eval

logger = logging.getLogger(__name__)

DIFF_STEP = 1e-4
SPREAD_TOLERANCE = 1e-4
FLAG_THRESHOLD = 1e-4
CSV_HEADER = "x,veff_paper_minus_V,veff_oracle,veff_corrected_minus_V,flag"

# Fonctions tests, décalées pour être non nulles au point sondé (t = 0.5)
TEST_FUNCTIONS = (
    lambda t: np.exp(-t**2 / 4.0),
    lambda t: 1.0 / (1.0 + t**2),
    lambda t: np.cos(t / 3.0) + 2.0,
)


@dataclass(frozen=True)
class OrderingParams:
    """
    Paramètres d'ordonnancement (α, β, γ)

    Args:
        alpha (float): Exposant extérieur gauche
        beta (float): Exposant central
        gamma (float): Exposant extérieur droit
    """
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        total = self.alpha + self.beta + self.gamma
        if abs(total + 1.0) > 1e-12:
            raise InvalidParameterError(
                f"Ordering requires alpha + beta + gamma = -1, got {total}"
            )

    @classmethod
    def ben_daniel_duke(cls):
        return cls(0.0, -1.0, 0.0)

    def __str__(self):
        return f"(alpha={self.alpha}, beta={self.beta}, gamma={self.gamma})"


def veff_paper(ordering, profile, potential, x):
    """
    Potentiel effectif sous sa forme imprimée

    V_eff = V + ½m''/m² - [α(α+β+1) + β + 1]m'²/m³

    Args:
        ordering (OrderingParams): Ordonnancement
        profile (MassProfile): Profil de masse
        potential (callable): V(x)
        x (float | ndarray): Position(s)

    Returns:
        float | ndarray: V_eff(x)
    """
    m, dm, d2m = mass_eval(profile, x)
    a, b = ordering.alpha, ordering.beta
    bracket = a * (a + b + 1.0) + b + 1.0
    return potential(x) + 0.5 * d2m / m**2 - bracket * dm**2 / m**3


def veff_corrected(ordering, profile, potential, x):
    """
    V_eff = V + ¼(β+1)m''/m² + ½(αγ+α+γ)m'²/m³
    """
    m, dm, d2m = mass_eval(profile, x)
    a, b, c = ordering.alpha, ordering.beta, ordering.gamma
    return (
        potential(x)
        + 0.25 * (b + 1.0) * d2m / m**2
        + 0.5 * (a * c + a + c) * dm**2 / m**3
    )


def _d1(f, y, h):
    # différence centrée à 5 points
    return (-f(y + 2 * h) + 8.0 * f(y + h) - 8.0 * f(y - h) + f(y - 2 * h)) / (12.0 * h)


def _sandwich(mass, outer, middle, inner, psi, x, h):
    """-m^outer (m^middle (m^inner ψ)')' au point x"""
    def inner_fn(y):
        return mass(y) ** inner * psi(y)

    def middle_fn(y):
        return mass(y) ** middle * _d1(inner_fn, y, h)

    return -mass(x) ** outer * _d1(middle_fn, x, h)


def oracle_samples(ordering, profile, x, h=DIFF_STEP):
    """
    [(T_ord - T_BDD)ψ](x)/ψ(x) pour chaque fonction test

    Les deux opérateurs cinétiques sont appliqués par différences centrées
    imbriquées de pas h.

    Returns:
        ndarray: Une valeur par fonction test
    """
    x = float(x)
    # le stencil imbriqué doit rester dans le domaine
    mass_eval(profile, np.array([x - 4 * h, x + 4 * h]))

    def mass(y):
        return mass_eval(profile, y)[0]

    a, b, c = ordering.alpha, ordering.beta, ordering.gamma
    values = []
    for shape in TEST_FUNCTIONS:
        def psi(y, shape=shape):
            return shape(y - x + 0.5)

        ordered = 0.25 * (
            _sandwich(mass, a, b, c, psi, x, h) + _sandwich(mass, c, b, a, psi, x, h)
        )

        def flux(y):
            return _d1(psi, y, h) / mass(y)

        bdd = -0.5 * _d1(flux, x, h)
        values.append((ordered - bdd) / psi(x))
    return np.array(values, dtype=float)


def veff_oracle(ordering, profile, x, h=DIFF_STEP):
    """
    V_eff - V déterminé par développement de l'opérateur

    Args:
        ordering (OrderingParams): Ordonnancement
        profile (MassProfile): Profil de masse
        x (float): Position
        h (float): Pas des différences finies

    Returns:
        float: Moyenne sur les fonctions tests
    """
    samples = oracle_samples(ordering, profile, x, h)
    value = float(np.mean(samples))
    spread = float(np.ptp(samples))
    if spread > SPREAD_TOLERANCE * (1.0 + abs(value)):
        raise InconsistentExtractionError(
            f"Extracted term depends on the test function at x={x} (spread {spread:.3e}), "
            "the operator difference is not multiplicative"
        )
    return value


def ordering_report(ordering, profile, potential, xs):
    """
    Compare formes imprimée, oracle et corrigée sur un échantillon

    Returns:
        list: Lignes {x, veff_paper_minus_V, veff_oracle, veff_corrected_minus_V, flag}
    """
    rows = []
    for x in np.atleast_1d(np.asarray(xs, dtype=float)):
        x = float(x)
        v = potential(x)
        paper = veff_paper(ordering, profile, potential, x) - v
        oracle = veff_oracle(ordering, profile, x)
        corrected = veff_corrected(ordering, profile, potential, x) - v
        rows.append({
            "x": x,
            "veff_paper_minus_V": float(paper),
            "veff_oracle": oracle,
            "veff_corrected_minus_V": float(corrected),
            "flag": bool(abs(paper - oracle) > FLAG_THRESHOLD),
        })
    flagged = sum(row["flag"] for row in rows)
    if flagged:
        logger.warning("Printed V_eff disagrees with the operator oracle at %d/%d points for %s",
                       flagged, len(rows), ordering)
    return rows
