"""
Table des 13 familles exactement solubles

Pour chaque famille : carte g, base polynomiale, paramètres du polynôme,
énergie E_n, potentiel V(μ) sans V_m, log de la fonction réduite
f_μ = (dg/dμ)^(-1/2)·exp(½∫Q dg) (intégrale de Q faite à la main) et
conditions d'états liés.

Conventions : u = aμ ; ā = λ/(s-n) ou λ/(s+n) ; E_0 = 0 pour toutes les
familles.
"""

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from src.errors import DomainError, InvalidParameterError, SingularityError
from src.special_polynomials import MAX_DEGREE, hermite_eval, jacobi_eval, laguerre_eval
from src.transform_core import GMap, GMapKind, g_derivs

# Marqueur "nombre de niveaux non borné"
UNBOUNDED = float("inf")

LN2 = math.log(2.0)


class FamilyId(Enum):
    """Identifiants des familles"""
    J1_SCARF2 = "J1_SCARF2"
    J1_GPT = "J1_GPT"
    J1_TRIG_CSC = "J1_TRIG_CSC"
    J1_TRIG_SEC = "J1_TRIG_SEC"
    J2_ROSEN_MORSE = "J2_ROSEN_MORSE"
    J2_ECKART = "J2_ECKART"
    J2_COT = "J2_COT"
    J2_TAN = "J2_TAN"
    H_OSC = "H_OSC"
    H_SQRT = "H_SQRT"
    L_RADIAL_OSC = "L_RADIAL_OSC"
    L_MORSE = "L_MORSE"
    L_COULOMB = "L_COULOMB"


@dataclass(frozen=True)
class FamilyParams:
    """Paramètres partagés par les familles (seuls ceux utilisés sont lus)"""
    s: float = 0.0
    lam: float = 0.0
    a: float = 1.0
    omega: float = 1.0
    l: float = 0.0
    coulomb_charge: float = 1.0

    def to_dict(self):
        data = asdict(self)
        data["lambda"] = data.pop("lam")
        return data

    def digest(self):
        """Empreinte courte (12 hex) pour les rapports"""
        text = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


# --- Fonctions auxiliaires ---------------------------------------------------

def _log_cosh(u):
    au = np.abs(u)
    return au + np.log1p(np.exp(-2.0 * au)) - LN2


def _log_sinh(u):
    # u > 0
    return u + np.log(-np.expm1(-2.0 * u)) - LN2


def _sech(u):
    return np.exp(-_log_cosh(u))


def _csch(u):
    return np.exp(-_log_sinh(u))


def _n_below(s):
    """Plus grand entier n avec n < s"""
    return int(math.ceil(s)) - 1


def _require(condition, message):
    if not condition:
        raise InvalidParameterError(message)


def _require_positive_a(p):
    _require(p.a > 0, f"scale a must be positive, got {p.a}")


# --- Jacobi, cas 1 -----------------------------------------------------------

def _scarf_bound(p):
    _require_positive_a(p)
    _require(p.s > 0, f"J1_SCARF2 requires s > 0, got {p.s}")
    return _n_below(p.s)


def _scarf_potential(p, mu):
    u = p.a * mu
    a2 = p.a**2
    sech = _sech(u)
    return (0.5 * p.s**2 * a2 + 0.5 * a2 * (p.lam**2 - p.s**2 - p.s) * sech**2
            - 0.5 * a2 * p.lam * (2.0 * p.s + 1.0) * np.tanh(u) * sech)


def _scarf_log_f(p, n, mu):
    u = p.a * mu
    return -p.s * _log_cosh(u) + p.lam * np.arctan(np.sinh(u))


def _gpt_bound(p):
    _require_positive_a(p)
    _require(p.s > 0, f"J1_GPT requires s > 0, got {p.s}")
    _require(p.lam - p.s > 0.5, f"J1_GPT requires lambda - s > 1/2, got {p.lam - p.s}")
    return _n_below(p.s)


def _gpt_potential(p, mu):
    u = p.a * mu
    a2 = p.a**2
    csch = _csch(u)
    return (0.5 * p.s**2 * a2 + 0.5 * a2 * (p.lam**2 + p.s**2 + p.s) * csch**2
            - a2 * p.lam * (p.s + 0.5) * csch / np.tanh(u))


def _gpt_log_f(p, n, mu):
    u = p.a * mu
    return -p.s * _log_sinh(u) + p.lam * np.log(np.tanh(0.5 * u))


def _hyperbolic_energy(p, n):
    return 0.5 * p.s**2 * p.a**2 - 0.5 * p.a**2 * (p.s - n) ** 2


def _trig_bound(p):
    _require_positive_a(p)
    _require(p.s - p.lam > 0.5 and p.s + p.lam > 0.5,
             f"trigonometric case 1 requires s -/+ lambda > 1/2, got s={p.s}, lambda={p.lam}")
    return UNBOUNDED


def _trig_energy(p, n):
    return -0.5 * p.s**2 * p.a**2 + 0.5 * p.a**2 * (p.s + n) ** 2


def _csc_potential(p, mu):
    u = p.a * mu
    a2 = p.a**2
    csc = 1.0 / np.sin(u)
    cot = np.cos(u) * csc
    return (-0.5 * p.s**2 * a2 + 0.5 * a2 * (p.lam**2 + p.s**2 - p.s) * csc**2
            - 0.5 * a2 * p.lam * (2.0 * p.s - 1.0) * cot * csc)


def _csc_log_f(p, n, mu):
    u = p.a * mu
    return p.s * np.log(np.sin(u)) - p.lam * np.log(np.tan(0.5 * u))


def _sec_potential(p, mu):
    u = p.a * mu
    a2 = p.a**2
    sec = 1.0 / np.cos(u)
    tan = np.sin(u) * sec
    return (-0.5 * p.s**2 * a2 + 0.5 * a2 * (p.lam**2 + p.s**2 - p.s) * sec**2
            - 0.5 * a2 * p.lam * (2.0 * p.s - 1.0) * sec * tan)


def _sec_log_f(p, n, mu):
    u = p.a * mu
    sin = np.sin(u)
    return p.s * np.log(np.cos(u)) + 0.5 * p.lam * (np.log1p(sin) - np.log1p(-sin))


# --- Jacobi, cas 2 -----------------------------------------------------------

def _bar_a_minus(p, n):
    return p.lam / (p.s - n)


def _bar_a_plus(p, n):
    return p.lam / (p.s + n)


def _rm_bound(p):
    _require_positive_a(p)
    _require(p.s != 0, "J2_ROSEN_MORSE requires s != 0")
    level = -1
    while level + 1 <= MAX_DEGREE:
        k = level + 1
        if not (p.s - k > 0 and (p.s - k) ** 2 > abs(p.lam)):
            break
        level = k
    _require(level >= 0, f"J2_ROSEN_MORSE has no bound level for s={p.s}, lambda={p.lam}")
    return level


def _rm_offset(p):
    return 0.5 * p.a**2 * p.s**2 + p.lam**2 * p.a**2 / (2.0 * p.s**2)


def _rm_energy(p, n):
    return _rm_offset(p) - 0.5 * p.a**2 * ((p.s - n) ** 2 + _bar_a_minus(p, n) ** 2)


def _rm_potential(p, mu):
    u = p.a * mu
    a2 = p.a**2
    return _rm_offset(p) - 0.5 * a2 * p.s * (p.s + 1.0) * _sech(u) ** 2 - p.lam * a2 * np.tanh(u)


def _rm_log_f(p, n, mu):
    u = p.a * mu
    return (n - p.s) * _log_cosh(u) + _bar_a_minus(p, n) * u


def _eckart_bound(p):
    _require_positive_a(p)
    _require(p.s > 0.5, f"J2_ECKART requires s > 1/2, got {p.s}")
    _require(p.lam > 0, f"J2_ECKART requires lambda > 0, got {p.lam}")
    level = -1
    while level + 1 <= MAX_DEGREE and (p.s + level + 1) ** 2 < p.lam:
        level += 1
    _require(level >= 0, f"J2_ECKART has no bound level: s^2={p.s**2} >= lambda={p.lam}")
    return level


def _eckart_energy(p, n):
    return _rm_offset(p) - 0.5 * p.a**2 * ((p.s + n) ** 2 + _bar_a_plus(p, n) ** 2)


def _eckart_potential(p, mu):
    u = p.a * mu
    a2 = p.a**2
    return _rm_offset(p) + 0.5 * a2 * p.s * (p.s - 1.0) * _csch(u) ** 2 - p.lam * a2 / np.tanh(u)


def _eckart_log_f(p, n, mu):
    u = p.a * mu
    return (p.s + n) * _log_sinh(u) - _bar_a_plus(p, n) * u


def _trig2_bound(p):
    _require_positive_a(p)
    _require(p.s < -0.5, f"trigonometric case 2 requires s < -1/2, got {p.s}")
    return UNBOUNDED


def _trig2_offset(p):
    return -0.5 * p.a**2 * p.s**2 + p.lam**2 * p.a**2 / (2.0 * p.s**2)


def _trig2_energy(p, n):
    return _trig2_offset(p) + 0.5 * p.a**2 * (p.s - n) ** 2 - 0.5 * p.a**2 * _bar_a_minus(p, n) ** 2


def _cot_potential(p, mu):
    u = p.a * mu
    a2 = p.a**2
    return _trig2_offset(p) + 0.5 * a2 * p.s * (p.s + 1.0) / np.sin(u) ** 2 - p.lam * a2 / np.tan(u)


def _cot_log_f(p, n, mu):
    u = p.a * mu
    return (n - p.s) * np.log(np.sin(u)) + _bar_a_minus(p, n) * u


def _tan_potential(p, mu):
    u = p.a * mu
    a2 = p.a**2
    return _trig2_offset(p) + 0.5 * a2 * p.s * (p.s + 1.0) / np.cos(u) ** 2 - p.lam * a2 * np.tan(u)


def _tan_log_f(p, n, mu):
    u = p.a * mu
    return (n - p.s) * np.log(np.cos(u)) - _bar_a_minus(p, n) * u


# --- Hermite -----------------------------------------------------------------

def _omega_bound(p):
    _require(p.omega > 0, f"omega must be positive, got {p.omega}")
    return UNBOUNDED


def _osc_potential(p, mu):
    return -0.5 * p.omega + 0.5 * p.omega**2 * mu**2


def _osc_log_f(p, n, mu):
    return -0.5 * p.omega * mu**2


def _sqrt_energy(p, n):
    return 2.0 * p.omega**2 - 2.0 * p.omega**2 / (2 * n + 1) ** 2


def _sqrt_potential(p, mu):
    return 2.0 * p.omega**2 - p.omega / (2.0 * mu) - 3.0 / (32.0 * mu**2)


def _sqrt_log_f(p, n, mu):
    k2 = 4.0 * p.omega / (2 * n + 1)
    return 0.25 * np.log(mu) - 0.5 * k2 * mu


# --- Laguerre ----------------------------------------------------------------

def _radial_bound(p):
    _omega_bound(p)
    _require(p.l > -0.5, f"L_RADIAL_OSC requires l > -1/2, got {p.l}")
    return UNBOUNDED


def _radial_potential(p, mu):
    return (-(p.l + 1.5) * p.omega + 0.5 * p.omega**2 * mu**2
            + p.l * (p.l + 1.0) / (2.0 * mu**2))


def _radial_log_f(p, n, mu):
    return (p.l + 1.0) * np.log(mu) - 0.5 * p.omega * mu**2


def _morse_bound(p):
    _require_positive_a(p)
    _require(p.s > 0, f"L_MORSE requires s > 0 (s != 0, -1/2, ...), got {p.s}")
    return _n_below(p.s)


def _morse_potential(p, mu):
    u = p.a * mu
    a2 = p.a**2
    return 0.5 * a2 * p.s**2 + a2 / 8.0 * np.exp(-2.0 * u) - a2 / 4.0 * (2.0 * p.s + 1.0) * np.exp(-u)


def _morse_log_f(p, n, mu):
    u = p.a * mu
    return (n - p.s) * u - 0.5 * np.exp(-u)


def _coulomb_bound(p):
    _require(p.coulomb_charge > 0, f"L_COULOMB requires charge > 0, got {p.coulomb_charge}")
    _require(p.l > -0.5, f"L_COULOMB requires l > -1/2, got {p.l}")
    return UNBOUNDED


def _coulomb_energy(p, n):
    z2 = p.coulomb_charge**2
    return z2 / (2.0 * (p.l + 1.0) ** 2) - z2 / (2.0 * (n + p.l + 1.0) ** 2)


def _coulomb_potential(p, mu):
    z = p.coulomb_charge
    return z**2 / (2.0 * (p.l + 1.0) ** 2) - z / mu + p.l * (p.l + 1.0) / (2.0 * mu**2)


def _coulomb_log_f(p, n, mu):
    return (p.l + 1.0) * np.log(mu) - p.coulomb_charge * mu / (n + p.l + 1.0)


# --- Définitions -------------------------------------------------------------

class FamilyDefinition:
    """
    Entrée de la table : formules fermées d'une famille

    Args:
        family (FamilyId): Identifiant
        gmap_kind (GMapKind): Carte g
        basis (str): "jacobi", "hermite" ou "laguerre"
        poly_params (callable): (p, n) -> paramètres du polynôme
        energy (callable): (p, n) -> E_n
        potential (callable): (p, μ) -> V(μ) sans V_m
        log_f (callable): (p, n, μ) -> ln f_μ
        bound (callable): p -> niveau lié maximal (ou UNBOUNDED)
        scale (callable): (p, n) -> longueur caractéristique en μ
        note (str): Écart éventuel avec les formes imprimées
    """

    def __init__(self, family, gmap_kind, basis, poly_params, energy, potential,
                 log_f, bound, scale, note=""):
        self.family = family
        self.gmap_kind = gmap_kind
        self.basis = basis
        self.poly_params = poly_params
        self.energy = energy
        self.potential = potential
        self.log_f = log_f
        self.bound = bound
        self.scale = scale
        self.note = note

    def gmap(self, p):
        """Construit la carte g pour ces paramètres"""
        kind = self.gmap_kind
        if kind == GMapKind.L_LINEAR:
            return GMap(kind, a=p.coulomb_charge, l=p.l)
        if kind in (GMapKind.H_LINEAR, GMapKind.H_SQRT, GMapKind.L_QUADRATIC):
            return GMap(kind, omega=p.omega)
        return GMap(kind, a=p.a)

    def mu_domain(self, p):
        return self.gmap(p).mu_domain()

    def check_mu(self, p, mu, guard=0.0):
        """
        Vérifie que μ est dans le domaine ouvert de la famille

        Les extrémités finies sont singulières : un point à moins de `guard`
        d'une extrémité lève SingularityError, un point au-delà DomainError.
        """
        lo, hi = self.mu_domain(p)
        mu = np.asarray(mu, dtype=float)
        if np.any(~np.isfinite(mu)) or np.any(mu < lo) or np.any(mu > hi):
            raise DomainError(f"mu outside the {self.family.value} domain ({lo}, {hi})")
        near = np.zeros(mu.shape, dtype=bool)
        if np.isfinite(lo):
            near |= mu <= lo + guard
        if np.isfinite(hi):
            near |= mu >= hi - guard
        if np.any(near):
            raise SingularityError(f"mu at a singular end of the {self.family.value} domain ({lo}, {hi})")

    def in_domain(self, p, mu, guard=0.0):
        """Masque booléen des μ strictement intérieurs"""
        lo, hi = self.mu_domain(p)
        mu = np.asarray(mu, dtype=float)
        mask = np.isfinite(mu) & (mu > lo) & (mu < hi)
        if np.isfinite(lo):
            mask &= mu > lo + guard
        if np.isfinite(hi):
            mask &= mu < hi - guard
        return mask

    def polynomial(self, p, n, g):
        """F(g) dans la base de la famille"""
        params = self.poly_params(p, n)
        if self.basis == "jacobi":
            return jacobi_eval(n, params[0], params[1], g)
        if self.basis == "hermite":
            return hermite_eval(n, np.real(g))
        return laguerre_eval(n, params[0], np.real(g))

    def raw_phi(self, p, n, mu):
        """
        φ(μ) = f_μ(μ)·F(g(μ)), non normalisée et éventuellement complexe

        ψ(x) = m^(1/4)·φ(μ(x)) et ∫ψ² dx = ∫φ² dμ.
        """
        mu = np.asarray(mu, dtype=float)
        g = g_derivs(self.gmap(p), mu, n)[0]
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            value = np.exp(self.log_f(p, n, mu)) * self.polynomial(p, n, g)
        value = np.asarray(value, dtype=complex)
        return np.where(np.isfinite(value), value, 0.0)

    def __repr__(self):
        return f"FamilyDefinition({self.family.value}, g={self.gmap_kind.value}, basis={self.basis})"


def _inverse_a(p, n):
    return 1.0 / p.a


FAMILIES = {
    FamilyId.J1_SCARF2: FamilyDefinition(
        FamilyId.J1_SCARF2, GMapKind.J1_ISINH, "jacobi",
        lambda p, n: (-p.s - 0.5 + 1j * p.lam, -p.s - 0.5 - 1j * p.lam),
        _hyperbolic_energy, _scarf_potential, _scarf_log_f, _scarf_bound, _inverse_a,
        note="lambda sign of the printed alpha/beta swapped to match the printed potential",
    ),
    FamilyId.J1_GPT: FamilyDefinition(
        FamilyId.J1_GPT, GMapKind.J1_COSH, "jacobi",
        lambda p, n: (p.lam - p.s - 0.5, -p.lam - p.s - 0.5),
        _hyperbolic_energy, _gpt_potential, _gpt_log_f, _gpt_bound, _inverse_a,
        note="printed psi uses i*sinh as argument; built from g = cosh",
    ),
    FamilyId.J1_TRIG_CSC: FamilyDefinition(
        FamilyId.J1_TRIG_CSC, GMapKind.J1_COS, "jacobi",
        lambda p, n: (p.s - 0.5 - p.lam, p.s - 0.5 + p.lam),
        _trig_energy, _csc_potential, _csc_log_f, _trig_bound, _inverse_a,
        note="printed psi carries sinh^s; built with sin^s",
    ),
    FamilyId.J1_TRIG_SEC: FamilyDefinition(
        FamilyId.J1_TRIG_SEC, GMapKind.J1_SIN, "jacobi",
        lambda p, n: (p.s - 0.5 - p.lam, p.s - 0.5 + p.lam),
        _trig_energy, _sec_potential, _sec_log_f, _trig_bound, _inverse_a,
    ),
    FamilyId.J2_ROSEN_MORSE: FamilyDefinition(
        FamilyId.J2_ROSEN_MORSE, GMapKind.J2_TANH, "jacobi",
        lambda p, n: (p.s - n - _bar_a_minus(p, n), p.s - n + _bar_a_minus(p, n)),
        _rm_energy, _rm_potential, _rm_log_f, _rm_bound, _inverse_a,
        note="printed exponent s+n of cosh corrected to n-s; alpha/beta order swapped",
    ),
    FamilyId.J2_ECKART: FamilyDefinition(
        FamilyId.J2_ECKART, GMapKind.J2_COTH, "jacobi",
        lambda p, n: (-p.s - n + _bar_a_plus(p, n), -p.s - n - _bar_a_plus(p, n)),
        _eckart_energy, _eckart_potential, _eckart_log_f, _eckart_bound, _inverse_a,
        note="printed csc/cot read as csch/coth",
    ),
    FamilyId.J2_COT: FamilyDefinition(
        FamilyId.J2_COT, GMapKind.J2_ICOT, "jacobi",
        lambda p, n: (p.s - n + 1j * _bar_a_minus(p, n), p.s - n - 1j * _bar_a_minus(p, n)),
        _trig2_energy, _cot_potential, _cot_log_f, _trig2_bound, _inverse_a,
    ),
    FamilyId.J2_TAN: FamilyDefinition(
        FamilyId.J2_TAN, GMapKind.J2_ITAN, "jacobi",
        lambda p, n: (p.s - n + 1j * _bar_a_minus(p, n), p.s - n - 1j * _bar_a_minus(p, n)),
        _trig2_energy, _tan_potential, _tan_log_f, _trig2_bound, _inverse_a,
    ),
    FamilyId.H_OSC: FamilyDefinition(
        FamilyId.H_OSC, GMapKind.H_LINEAR, "hermite",
        lambda p, n: (),
        lambda p, n: n * p.omega, _osc_potential, _osc_log_f, _omega_bound,
        lambda p, n: 1.0 / math.sqrt(p.omega),
    ),
    FamilyId.H_SQRT: FamilyDefinition(
        FamilyId.H_SQRT, GMapKind.H_SQRT, "hermite",
        lambda p, n: (),
        _sqrt_energy, _sqrt_potential, _sqrt_log_f, _omega_bound,
        lambda p, n: (2 * n + 1) / (4.0 * p.omega),
        note="g >= 0 samples half of H_n: floor(n/2) nodes; odd n are the Dirichlet levels",
    ),
    FamilyId.L_RADIAL_OSC: FamilyDefinition(
        FamilyId.L_RADIAL_OSC, GMapKind.L_QUADRATIC, "laguerre",
        lambda p, n: (p.l + 0.5,),
        lambda p, n: 2.0 * n * p.omega, _radial_potential, _radial_log_f, _radial_bound,
        lambda p, n: 1.0 / math.sqrt(p.omega),
    ),
    FamilyId.L_MORSE: FamilyDefinition(
        FamilyId.L_MORSE, GMapKind.L_EXP, "laguerre",
        lambda p, n: (2.0 * p.s - 2.0 * n,),
        _hyperbolic_energy, _morse_potential, _morse_log_f, _morse_bound, _inverse_a,
        note="(2s+1) factor restored in the exp(-a mu) term; f uses exp(-exp(-a mu)/2)",
    ),
    FamilyId.L_COULOMB: FamilyDefinition(
        FamilyId.L_COULOMB, GMapKind.L_LINEAR, "laguerre",
        lambda p, n: (2.0 * p.l + 1.0,),
        _coulomb_energy, _coulomb_potential, _coulomb_log_f, _coulomb_bound,
        lambda p, n: (n + p.l + 1.0) / p.coulomb_charge,
    ),
}


def get_family(family):
    """Retourne la définition d'une famille (FamilyId ou nom)"""
    try:
        return FAMILIES[FamilyId(family)]
    except ValueError as exc:
        raise InvalidParameterError(f"Unknown family: {family}") from exc
