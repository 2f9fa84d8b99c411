"""
Composant 3: TransformCore (Méthode de transformation)
Cartes g(μ), fonctionnelle G, fonction f(x) et membre de droite de
l'équation énergie-potentiel évalué numériquement

ψ(x) = f(x)·F(g(x)) ramène l'équation de Schrödinger à masse variable sur
l'équation différentielle F'' + Q(g)F' + R(g)F = 0 d'un polynôme classique.
"""

import logging
from enum import Enum

import numpy as np

from src.errors import DomainError, SingularityError
from src.mass_catalog import mass_eval, mu_eval

logger = logging.getLogger(__name__)

# Garde autour des extrémités singulières (en μ)
SINGULAR_GUARD = 1e-6


class GMapKind(Enum):
    """Les 13 cartes g(μ)"""
    J1_ISINH = "J1_ISINH"        # g = i sinh(aμ)
    J1_COSH = "J1_COSH"          # g = cosh(aμ)
    J1_COS = "J1_COS"            # g = cos(aμ)
    J1_SIN = "J1_SIN"            # g = sin(aμ)
    J2_TANH = "J2_TANH"          # g = tanh(aμ)
    J2_COTH = "J2_COTH"          # g = coth(aμ)
    J2_ICOT = "J2_ICOT"          # g = -i cot(aμ)
    J2_ITAN = "J2_ITAN"          # g = -i tan(aμ)
    H_LINEAR = "H_LINEAR"        # g = √ω μ
    H_SQRT = "H_SQRT"            # g = √(4ω/(2n+1)) √μ
    L_QUADRATIC = "L_QUADRATIC"  # g = ω μ²
    L_EXP = "L_EXP"              # g = exp(-aμ)
    L_LINEAR = "L_LINEAR"        # g = 2ω μ, ω = a/(n+l+1)


JACOBI_CASE_1 = (GMapKind.J1_ISINH, GMapKind.J1_COSH, GMapKind.J1_COS, GMapKind.J1_SIN)
JACOBI_CASE_2 = (GMapKind.J2_TANH, GMapKind.J2_COTH, GMapKind.J2_ICOT, GMapKind.J2_ITAN)


class GMap:
    """
    Carte g(μ) et sa constante C

    Args:
        kind (GMapKind): Type de carte
        a (float): Échelle inverse (cartes de Jacobi, L_EXP) ou charge
            (L_LINEAR)
        omega (float): Fréquence (H_LINEAR, H_SQRT, L_QUADRATIC)
        l (float): Moment angulaire (L_LINEAR)
    """

    def __init__(self, kind, a=1.0, omega=1.0, l=0.0):
        self.kind = GMapKind(kind)
        self.a = float(a)
        self.omega = float(omega)
        self.l = float(l)

    def effective_omega(self, n):
        """ω utilisé par les cartes dépendant du niveau"""
        if self.kind == GMapKind.L_LINEAR:
            return self.a / (n + self.l + 1.0)
        return self.omega

    def constant(self, n=0):
        """
        Constante C de l'équation de définition

        Jacobi cas 1 : (dg/dμ)²/(1-g²) = C
        Jacobi cas 2 : (dg/dμ)²/(1-g²)² = C
        H_LINEAR, L_LINEAR : (dg/dμ)² = C
        H_SQRT : (dg/dμ)²·g² = C
        L_QUADRATIC : (dg/dμ)²/g = C
        L_EXP : (dg/dμ)²/g² = C
        """
        kind = self.kind
        a2 = self.a**2
        if kind in (GMapKind.J1_ISINH, GMapKind.J1_COSH, GMapKind.J2_ICOT, GMapKind.J2_ITAN):
            return -a2
        if kind in (GMapKind.J1_COS, GMapKind.J1_SIN, GMapKind.J2_TANH, GMapKind.J2_COTH, GMapKind.L_EXP):
            return a2
        if kind == GMapKind.H_LINEAR:
            return self.omega
        if kind == GMapKind.H_SQRT:
            return 4.0 * self.omega**2 / (2 * n + 1) ** 2
        if kind == GMapKind.L_QUADRATIC:
            return 4.0 * self.omega
        return 4.0 * self.effective_omega(n) ** 2

    def mu_domain(self):
        """Domaine ouvert en μ"""
        kind = self.kind
        if kind in (GMapKind.J1_ISINH, GMapKind.J2_TANH, GMapKind.H_LINEAR, GMapKind.L_EXP):
            return (-np.inf, np.inf)
        if kind in (GMapKind.J1_COS, GMapKind.J2_ICOT):
            return (0.0, np.pi / self.a)
        if kind in (GMapKind.J1_SIN, GMapKind.J2_ITAN):
            return (-0.5 * np.pi / self.a, 0.5 * np.pi / self.a)
        return (0.0, np.inf)

    def __repr__(self):
        return f"GMap({self.kind.value}, a={self.a}, omega={self.omega}, l={self.l})"


def g_derivs(gmap, mu, n=0):
    """
    Calcule g et ses trois premières dérivées par rapport à μ

    Args:
        gmap (GMap): Carte g
        mu (float | ndarray): Valeur(s) de μ dans le domaine ouvert
        n (int): Niveau (utilisé par H_SQRT et L_LINEAR)

    Returns:
        tuple: (g, dg, d2g, d3g), complexes
    """
    scalar = np.ndim(mu) == 0
    mu = np.asarray(mu, dtype=float)
    lo, hi = gmap.mu_domain()
    if not (np.all(mu > lo) and np.all(mu < hi)):
        raise DomainError(f"mu outside the domain ({lo}, {hi}) of {gmap.kind.value}")

    kind = gmap.kind
    a = gmap.a
    u = a * mu
    one = np.ones_like(mu)

    if kind == GMapKind.J1_ISINH:
        sh, ch = np.sinh(u), np.cosh(u)
        out = (1j * sh, 1j * a * ch, 1j * a**2 * sh, 1j * a**3 * ch)
    elif kind == GMapKind.J1_COSH:
        sh, ch = np.sinh(u), np.cosh(u)
        out = (ch, a * sh, a**2 * ch, a**3 * sh)
    elif kind == GMapKind.J1_COS:
        s, c = np.sin(u), np.cos(u)
        out = (c, -a * s, -a**2 * c, a**3 * s)
    elif kind == GMapKind.J1_SIN:
        s, c = np.sin(u), np.cos(u)
        out = (s, a * c, -a**2 * s, -a**3 * c)
    elif kind in (GMapKind.J2_TANH, GMapKind.J2_COTH):
        t = np.tanh(u) if kind == GMapKind.J2_TANH else 1.0 / np.tanh(u)
        w = 1.0 - t**2
        out = (t, a * w, -2.0 * a**2 * t * w, -2.0 * a**3 * w * (1.0 - 3.0 * t**2))
    elif kind == GMapKind.J2_ICOT:
        c = 1.0 / np.tan(u)
        w = 1.0 + c**2
        out = (-1j * c, 1j * a * w, -2j * a**2 * c * w, 2j * a**3 * w * (1.0 + 3.0 * c**2))
    elif kind == GMapKind.J2_ITAN:
        t = np.tan(u)
        w = 1.0 + t**2
        out = (-1j * t, -1j * a * w, -2j * a**2 * t * w, -2j * a**3 * w * (1.0 + 3.0 * t**2))
    elif kind == GMapKind.H_LINEAR:
        r = np.sqrt(gmap.omega)
        out = (r * mu, r * one, 0.0 * one, 0.0 * one)
    elif kind == GMapKind.H_SQRT:
        k = np.sqrt(4.0 * gmap.omega / (2 * n + 1))
        root = np.sqrt(mu)
        out = (k * root, 0.5 * k / root, -0.25 * k / (mu * root), 0.375 * k / (mu**2 * root))
    elif kind == GMapKind.L_QUADRATIC:
        w = gmap.omega
        out = (w * mu**2, 2.0 * w * mu, 2.0 * w * one, 0.0 * one)
    elif kind == GMapKind.L_EXP:
        g = np.exp(-u)
        out = (g, -a * g, a**2 * g, -a**3 * g)
    else:
        w = gmap.effective_omega(n)
        out = (2.0 * w * mu, 2.0 * w * one, 0.0 * one, 0.0 * one)

    out = tuple(np.asarray(v, dtype=complex) for v in out)
    if scalar:
        return tuple(complex(v) for v in out)
    return out


def big_g(z0, z1, z2):
    """
    Fonctionnelle G(z) = z''/z - (3/2)(z'/z)²

    Args:
        z0, z1, z2: z, z' et z'' (réels ou complexes, scalaires ou tableaux)

    Returns:
        G(z)
    """
    if np.any(np.asarray(z0) == 0):
        raise SingularityError("G(z) is singular where z = 0")
    ratio = z1 / z0
    return z2 / z0 - 1.5 * ratio**2


def polynomial_coefficients(basis, poly_params, n, g):
    """
    Coefficients Q(g), dQ/dg et R(g) de F'' + QF' + RF = 0

    Args:
        basis (str): "jacobi", "hermite" ou "laguerre"
        poly_params (tuple): (α, β) pour Jacobi, (α,) pour Laguerre, ()
        n (int): Degré
        g: Valeur(s) de g

    Returns:
        tuple: (Q, dQ, R)
    """
    if basis == "jacobi":
        alpha, beta = poly_params
        p = beta - alpha
        q = 2.0 + alpha + beta
        w = 1.0 - g**2
        Q = (p - q * g) / w
        dQ = (-q - q * g**2 + 2.0 * p * g) / w**2
        R = n * (n + alpha + beta + 1.0) / w
    elif basis == "hermite":
        Q = -2.0 * g
        dQ = -2.0 * np.ones_like(g)
        R = 2.0 * n * np.ones_like(g)
    else:
        (alpha,) = poly_params
        Q = (alpha + 1.0) / g - 1.0
        dQ = -(alpha + 1.0) / g**2
        R = n / g
    return Q, dQ, R


def f_transform(family, params, profile, n, x):
    """
    Fonction de transformation f(x) = √(m/g')·exp(½∫Q dg)

    Les intégrales de Q sont précalculées par famille : f = m^(1/4)·f_μ(μ).

    Args:
        family (FamilyId): Famille
        params (FamilyParams): Paramètres
        profile (MassProfile): Profil de masse
        n (int): Niveau
        x (float | ndarray): Position(s)

    Returns:
        complex | ndarray: f(x)
    """
    from src.family_table import get_family

    definition = get_family(family)
    scalar = np.ndim(x) == 0
    mu = mu_eval(profile, x)
    definition.check_mu(params, mu)
    m = mass_eval(profile, x)[0]
    value = np.asarray(m) ** 0.25 * np.exp(definition.log_f(params, n, np.asarray(mu)))
    value = np.asarray(value, dtype=complex)
    return complex(value) if scalar else value


def rhs_eq12(family, params, profile, n, x):
    """
    Membre de droite de l'équation énergie-potentiel

    E - V(x) = (g')²/(2m)·[R - ½ dQ/dg - ¼Q²] + (1/4m)·[G(g') - G(m)]

    Les dérivées en x de g sont obtenues par la règle de chaîne à partir
    des dérivées en μ et de μ' = √m.

    Args:
        family (FamilyId): Famille
        params (FamilyParams): Paramètres
        profile (MassProfile): Profil de masse
        n (int): Niveau
        x (float | ndarray): Position(s)

    Returns:
        float | ndarray: Valeur réelle du membre de droite
    """
    from src.family_table import get_family

    definition = get_family(family)
    scalar = np.ndim(x) == 0
    mu = np.asarray(mu_eval(profile, x))
    definition.check_mu(params, mu, guard=SINGULAR_GUARD)

    gmap = definition.gmap(params)
    g, dg, d2g, d3g = g_derivs(gmap, mu, n)
    m, dm, d2m = (np.asarray(v) for v in mass_eval(profile, x))

    mu1 = np.sqrt(m)
    mu2 = dm / (2.0 * mu1)
    mu3 = d2m / (2.0 * mu1) - dm**2 / (4.0 * m * mu1)
    g1 = mu1 * dg
    g2 = mu2 * dg + mu1**2 * d2g
    g3 = mu3 * dg + 3.0 * mu1 * mu2 * d2g + mu1**3 * d3g

    Q, dQ, R = polynomial_coefficients(definition.basis, definition.poly_params(params, n), n, g)
    value = g1**2 / (2.0 * m) * (R - 0.5 * dQ - 0.25 * Q**2)
    value = value + (big_g(g1, g2, g3) - big_g(m, dm, d2m)) / (4.0 * m)

    logger.debug("rhs %s n=%d: max |Im| = %.3e", definition.family.value, n,
                 float(np.max(np.abs(np.imag(value)))))
    value = np.real(value)
    return float(value) if scalar else value
