"""
Composant 4: SolvableFamilies (Catalogue des familles)
Potentiel V(x), énergies E_n et fonctions propres normalisées ψ_n(x)
pour un profil de masse quelconque
"""

import functools
import logging

import numpy as np
from scipy.integrate import quad

from src.errors import (
    InternalConsistencyError,
    InvalidParameterError,
    LevelError,
    NotApplicableError,
    NumericError,
)
from src.family_table import UNBOUNDED, FamilyId, FamilyParams, get_family
from src.mass_catalog import MuConvention, mass_eval, mu_eval, mu_image, mu_invert, vm_eval
from src.special_polynomials import MAX_DEGREE

logger = logging.getLogger(__name__)

# Seuils de troncature et de fixation de phase
SUPPORT_THRESHOLD = 1e-8
EDGE_THRESHOLD = 1e-8
IMAGINARY_TOLERANCE = 1e-8
PHASE_SAMPLES = 2001

__all__ = [
    "FamilyId",
    "FamilyParams",
    "SpectralSolution",
    "UNBOUNDED",
    "eigenfunction_eval",
    "energy",
    "expected_nodes",
    "family_domain",
    "oracle_index",
    "polynomial_params",
    "potential_eval",
    "solve_level",
    "validate_params",
    "x_domain_for",
]


def family_domain(family, params):
    """
    Domaine ouvert en μ de la famille

    Returns:
        tuple: (mu_lo, mu_hi) ; les extrémités finies sont singulières
    """
    return get_family(family).mu_domain(params)


def polynomial_params(family, params, n):
    """Paramètres (α, β), (α,) ou () du polynôme F pour le niveau n"""
    return get_family(family).poly_params(params, n)


def expected_nodes(family, n):
    """
    Nombre de zéros intérieurs attendus pour ψ_n

    Pour H_SQRT, g = k√μ ≥ 0 ne voit que la demi-droite positive de H_n.
    """
    if FamilyId(family) == FamilyId.H_SQRT:
        return n // 2
    return n


def oracle_index(family, n):
    """
    Rang de ψ_n dans le spectre de l'opérateur discrétisé (Dirichlet)

    Les niveaux pairs de H_SQRT (comportement μ^(1/4) en 0) ne sont pas
    atteints par les conditions de Dirichlet.
    """
    if FamilyId(family) == FamilyId.H_SQRT:
        if n % 2 == 0:
            raise NotApplicableError(
                f"H_SQRT level n={n} behaves as mu^(1/4) at the origin and is not a Dirichlet level"
            )
        return (n - 1) // 2
    return n


def _covered(profile, lo, hi):
    img_lo, img_hi = mu_image(profile)
    return img_lo <= lo and img_hi >= hi, (max(lo, img_lo), min(hi, img_hi))


def validate_params(family, params, profile=None):
    """
    Niveau lié maximal

    Applique les conditions de décroissance de f·F(g) aux bords du domaine.
    Si l'image de μ du profil ne couvre pas le domaine de la famille, ne
    garde que les niveaux dont |φ| au bord de l'image est < 1e-8 du maximum.

    Args:
        family (FamilyId): Famille
        params (FamilyParams): Paramètres
        profile (MassProfile): Profil optionnel (convention continue)

    Returns:
        int | float: niveau maximal ou UNBOUNDED
    """
    definition = get_family(family)
    max_level = definition.bound(params)

    if profile is None or profile.mu_convention != MuConvention.CONTINUOUS:
        return max_level

    lo, hi = definition.mu_domain(params)
    covered, (s_lo, s_hi) = _covered(profile, lo, hi)
    if covered:
        return max_level

    last = -1
    top = int(min(max_level, MAX_DEGREE))
    for n in range(top + 1):
        if not _edges_negligible(definition, params, n, s_lo, s_hi, lo, hi):
            break
        last = n
    logger.debug("%s truncated by mu image to level %d", definition.family.value, last)
    if last < 0:
        raise InvalidParameterError(
            f"No bound level of {definition.family.value} fits in the mu image ({s_lo}, {s_hi}) of {profile}"
        )
    return last


def _edges_negligible(definition, params, n, s_lo, s_hi, lo, hi):
    support = _mu_support(definition, params, n, s_lo, s_hi)
    inner = np.linspace(support[0], support[1], PHASE_SAMPLES + 2)[1:-1]
    peak = np.max(np.abs(definition.raw_phi(params, n, inner)))
    if peak == 0:
        return False
    # bords de l'image strictement intérieurs au domaine de la famille
    edges = []
    if np.isfinite(s_lo) and s_lo != lo:
        edges.append(s_lo + 1e-12 * max(1.0, abs(s_lo)))
    if np.isfinite(s_hi) and s_hi != hi:
        edges.append(s_hi - 1e-12 * max(1.0, abs(s_hi)))
    if not edges:
        return True
    edge_values = np.abs(definition.raw_phi(params, n, np.array(edges)))
    return bool(np.all(edge_values < EDGE_THRESHOLD * peak))


def _check_level(family, params, n):
    if int(n) != n or n < 0:
        raise LevelError(f"Level must be a nonnegative integer, got {n}")
    max_level = validate_params(family, params)
    if n > max_level or n > MAX_DEGREE:
        raise LevelError(f"Level n={n} is not bound for {FamilyId(family).value} (max {max_level})")
    return int(n)


def energy(family, params, n):
    """
    Énergie E_n (indépendante du profil de masse)

    Args:
        family (FamilyId): Famille
        params (FamilyParams): Paramètres
        n (int): Niveau

    Returns:
        float: E_n
    """
    n = _check_level(family, params, n)
    return float(get_family(family).energy(params, n))


def potential_eval(family, params, profile, x):
    """
    Potentiel V(x) = V_famille(μ(x)) + V_m(x)

    Args:
        family (FamilyId): Famille
        params (FamilyParams): Paramètres
        profile (MassProfile): Profil de masse
        x (float | ndarray): Position(s) strictement dans le domaine

    Returns:
        float | ndarray: V(x)
    """
    definition = get_family(family)
    scalar = np.ndim(x) == 0
    mu = np.asarray(mu_eval(profile, x))
    definition.check_mu(params, mu)
    value = definition.potential(params, mu) + np.asarray(vm_eval(profile, x))
    return float(value) if scalar else value


def _mu_support(definition, params, n, lo, hi):
    """
    Support numérique de φ en μ

    Les bornes finies sont gardées ; une borne infinie est repoussée jusqu'à
    ce que |φ| y tombe sous 1e-8 du maximum, puis resserrée au dernier
    échantillon significatif.
    """
    if np.isfinite(lo) and np.isfinite(hi):
        return (lo, hi)
    scale = definition.scale(params, n)
    if np.isfinite(lo):
        left, right = lo, lo + 8.0 * scale
    elif np.isfinite(hi):
        left, right = hi - 8.0 * scale, hi
    else:
        left, right = -4.0 * scale, 4.0 * scale

    for _ in range(80):
        samples = np.linspace(left, right, PHASE_SAMPLES + 2)[1:-1]
        values = np.abs(definition.raw_phi(params, n, samples))
        peak = values.max()
        if peak == 0:
            raise NumericError(f"{definition.family.value} n={n}: eigenfunction vanishes on ({left}, {right})")
        grow_left = not np.isfinite(lo) and values[0] > SUPPORT_THRESHOLD * peak
        grow_right = not np.isfinite(hi) and values[-1] > SUPPORT_THRESHOLD * peak
        if not (grow_left or grow_right):
            significant = np.nonzero(values > SUPPORT_THRESHOLD * peak)[0]
            step = samples[1] - samples[0]
            if not np.isfinite(lo):
                left = samples[max(significant[0] - 1, 0)] - step
            if not np.isfinite(hi):
                right = samples[min(significant[-1] + 1, samples.size - 1)] + step
            return (float(left), float(right))
        width = right - left
        if grow_left:
            left -= 0.5 * width
        if grow_right:
            right += 0.5 * width
    raise NumericError(f"{definition.family.value} n={n}: eigenfunction does not decay (not normalizable)")


class SpectralSolution:
    """
    Un niveau lié : énergie, norme, phase et évaluateur de ψ_n

    Immuable après construction.
    """

    def __init__(self, family, params, profile, n):
        """
        Args:
            family (FamilyId): Famille
            params (FamilyParams): Paramètres
            profile (MassProfile): Profil (convention continue)
            n (int): Niveau
        """
        if profile.mu_convention != MuConvention.CONTINUOUS:
            raise NotApplicableError("Eigenfunctions require mu_convention=continuous_zero_at_origin")
        family = FamilyId(family)
        definition = get_family(family)
        n = _check_level(family, params, n)
        max_level = validate_params(family, params, profile)
        if n > max_level:
            raise LevelError(f"Level n={n} does not fit in the mu image of {profile} (max {max_level})")

        lo, hi = definition.mu_domain(params)
        _, (s_lo, s_hi) = _covered(profile, lo, hi)
        support = _mu_support(definition, params, n, s_lo, s_hi)

        samples = np.linspace(support[0], support[1], PHASE_SAMPLES + 2)[1:-1]
        raw = definition.raw_phi(params, n, samples)
        magnitude = np.abs(raw)
        peak_index = int(np.argmax(magnitude))
        peak = magnitude[peak_index]
        phase = raw[peak_index] / peak

        rotated = raw / phase
        imaginary_residual = float(np.max(np.abs(rotated.imag)) / peak)
        if imaginary_residual > IMAGINARY_TOLERANCE:
            raise InternalConsistencyError(
                f"{family.value} n={n}: imaginary residual {imaginary_residual:.3e} after phase fixing"
            )

        significant = np.nonzero(magnitude > 1e-3 * peak)[0][0]
        sign = 1.0 if rotated.real[significant] > 0 else -1.0

        integrand = lambda t: float(np.abs(definition.raw_phi(params, n, np.array([t]))[0]) / peak) ** 2
        value, error = quad(integrand, support[0], support[1], points=[samples[peak_index]],
                            limit=400, epsabs=1e-10, epsrel=1e-10)
        norm = value * peak**2

        object.__setattr__(self, "family", family)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "profile", profile)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "E", float(definition.energy(params, n)))
        object.__setattr__(self, "norm", float(norm))
        object.__setattr__(self, "phase", complex(phase))
        object.__setattr__(self, "sign", sign)
        object.__setattr__(self, "imaginary_residual", imaginary_residual)
        object.__setattr__(self, "mu_support", support)
        object.__setattr__(self, "_definition", definition)
        object.__setattr__(self, "_factor", sign / (phase * np.sqrt(norm)))
        logger.debug("Solved %s n=%d: E=%.12g norm=%.6e support=%s", family.value, n, self.E, norm, support)

    def __setattr__(self, name, value):
        raise AttributeError("SpectralSolution is immutable")

    def phi(self, mu):
        """φ_n normalisée dans l'espace μ (∫φ² dμ = 1)"""
        scalar = np.ndim(mu) == 0
        mu = np.asarray(mu, dtype=float)
        self._definition.check_mu(self.params, mu)
        value = (self._definition.raw_phi(self.params, self.n, np.atleast_1d(mu)) * self._factor).real
        return float(value[0]) if scalar else value.reshape(mu.shape)

    def psi(self, x):
        """ψ_n(x) = m^(1/4)·φ_n(μ(x)), réelle et normalisée"""
        scalar = np.ndim(x) == 0
        mu = mu_eval(self.profile, x)
        m = mass_eval(self.profile, x)[0]
        value = np.asarray(m) ** 0.25 * self.phi(mu)
        return float(value) if scalar else value

    def __repr__(self):
        return f"SpectralSolution({self.family.value}, n={self.n}, E={self.E:.10g}, {self.profile})"


@functools.lru_cache(maxsize=256)
def solve_level(family, params, profile, n):
    """
    Construit (et met en cache) la solution du niveau n

    Returns:
        SpectralSolution
    """
    return SpectralSolution(family, params, profile, n)


def eigenfunction_eval(family, params, profile, n, x):
    """
    ψ_n(x) réelle, normalisée et de phase fixée

    Args:
        family (FamilyId): Famille
        params (FamilyParams): Paramètres
        profile (MassProfile): Profil de masse
        n (int): Niveau
        x (float | ndarray): Position(s)

    Returns:
        float | ndarray: ψ_n(x)
    """
    return solve_level(FamilyId(family), params, profile, int(n)).psi(x)


def x_domain_for(family, params, profile):
    """
    Domaine en x : domaine μ de la famille ramené par mu_invert

    Returns:
        tuple: (x_lo, x_hi), éventuellement infinis
    """
    lo, hi = family_domain(family, params)
    img_lo, img_hi = mu_image(profile)
    x_lo = mu_invert(profile, lo) if img_lo < lo else profile.x_domain[0]
    x_hi = mu_invert(profile, hi) if hi < img_hi else profile.x_domain[1]
    return (x_lo, x_hi)
