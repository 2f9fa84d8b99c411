"""
Composant 1: MassCatalog (Profils de masse)
Masses m(x), dérivées, fonction auxiliaire μ(x) et potentiel induit V_m
"""

import logging
from enum import Enum

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq
from scipy.special import expit, log_expit

from src.errors import (
    DegenerateError,
    DomainError,
    InvalidParameterError,
    InvalidProfileError,
    NotApplicableError,
    RangeError,
)

logger = logging.getLogger(__name__)

# plus petite tolérance relative acceptée par brentq
BRENT_RTOL = 4 * np.finfo(float).eps


class MassKind(Enum):
    """
    Types de profils de masse

    Les quatre exemples analytiques plus la masse constante et les tables.
    """
    CONSTANT = "constant"
    RATIONAL_SQUARE = "rational_square"      # m = ((b + x²)/(1 + x²))²
    EXP_ABS = "exp_abs"                      # m = exp(-b|x|)
    INVERSE_QUADRATIC = "inverse_quadratic"  # m = 1/(b + x²)
    TANH_SHIFT = "tanh_shift"                # m = 1 + tanh(bx)
    CUSTOM_TABLE = "custom_table"


class MuConvention(Enum):
    """Constante d'intégration de μ(x) = ∫√m dx"""
    PAPER = "paper"
    CONTINUOUS = "continuous_zero_at_origin"


# Profils dont V_m admet une forme fermée
CLOSED_FORM_KINDS = (
    MassKind.RATIONAL_SQUARE,
    MassKind.EXP_ABS,
    MassKind.INVERSE_QUADRATIC,
    MassKind.TANH_SHIFT,
)

TABLE_HEADER = "x,m"


class MassProfile:
    """
    Profil de masse immuable

    Le domaine est la droite réelle pour les profils analytiques, et
    l'intervalle ouvert (x_0, x_last) pour une table.
    """

    def __init__(self, kind, b=1.0, mu_convention=MuConvention.CONTINUOUS, table=None):
        """
        Args:
            kind (MassKind | str): Type de profil
            b (float): Paramètre de forme sans dimension
            mu_convention (MuConvention | str): Convention pour μ
            table (tuple): (xs, ms) pour CUSTOM_TABLE
        """
        kind = MassKind(kind)
        mu_convention = MuConvention(mu_convention)
        b = float(b)

        if not np.isfinite(b):
            raise InvalidParameterError(f"Shape parameter b must be finite, got {b}")
        if kind == MassKind.RATIONAL_SQUARE and b <= 0:
            raise InvalidParameterError(f"rational_square requires b > 0, got {b}")
        if kind == MassKind.EXP_ABS and b < 0:
            raise InvalidParameterError(f"exp_abs requires b >= 0, got {b}")
        if kind == MassKind.INVERSE_QUADRATIC and b <= 0:
            raise InvalidParameterError(f"inverse_quadratic requires b > 0, got {b}")

        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "mu_convention", mu_convention)
        object.__setattr__(self, "_spline", None)
        object.__setattr__(self, "_mu_anchor", 0.0)

        if kind == MassKind.CUSTOM_TABLE:
            if table is None:
                raise InvalidProfileError("custom_table requires a (x, m) table")
            xs, ms = (np.asarray(col, dtype=float) for col in table)
            _check_table(xs, ms)
            object.__setattr__(self, "table", (xs, ms))
            object.__setattr__(self, "x_domain", (float(xs[0]), float(xs[-1])))
            object.__setattr__(self, "_spline", CubicSpline(xs, ms))
            anchor = min(max(0.0, xs[0]), xs[-1])
            object.__setattr__(self, "_mu_anchor", float(anchor))
        else:
            object.__setattr__(self, "table", None)
            object.__setattr__(self, "x_domain", (-np.inf, np.inf))

    def __setattr__(self, name, value):
        raise AttributeError("MassProfile is immutable")

    def contains(self, x):
        """Vrai si tous les x sont strictement dans le domaine"""
        x = np.asarray(x, dtype=float)
        lo, hi = self.x_domain
        return bool(np.all(np.isfinite(x)) and np.all(x > lo) and np.all(x < hi))

    def __repr__(self):
        if self.kind == MassKind.CUSTOM_TABLE:
            return f"MassProfile(custom_table, {len(self.table[0])} rows, domain={self.x_domain})"
        return f"MassProfile({self.kind.value}, b={self.b}, mu={self.mu_convention.value})"


def _check_table(xs, ms):
    if xs.ndim != 1 or xs.shape != ms.shape or len(xs) < 4:
        raise InvalidProfileError("Mass table needs two columns with at least 4 rows")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ms))):
        raise InvalidProfileError("Mass table contains non-finite values")
    if np.any(np.diff(xs) <= 0):
        raise InvalidProfileError("Mass table x column must be strictly increasing")
    if np.any(ms <= 0):
        raise InvalidProfileError(f"Mass table has nonpositive mass (min {ms.min()})")


def load_mass_table(path, mu_convention=MuConvention.CONTINUOUS):
    """
    Charge une table de masse au format texte `x,m`

    Args:
        path (str): Chemin du fichier (en-tête `x,m` obligatoire)

    Returns:
        MassProfile: profil CUSTOM_TABLE interpolé par spline cubique
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().replace(" ", "")
    if header != TABLE_HEADER:
        raise InvalidProfileError(f"Mass table header must be '{TABLE_HEADER}', got '{header}'")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 2:
        raise InvalidProfileError(f"Mass table must have 2 columns, got {data.shape[1]}")
    logger.debug("Loaded mass table %s with %d rows", path, data.shape[0])
    return MassProfile(MassKind.CUSTOM_TABLE, mu_convention=mu_convention,
                       table=(data[:, 0], data[:, 1]))


def _out(value, scalar):
    return float(value) if scalar else value


def _prepare(profile, x):
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if not profile.contains(x):
        raise DomainError(f"x outside mass domain {profile.x_domain}: {x if scalar else 'array'}")
    return x, scalar


def _table_mass(profile, x):
    m = profile._spline(x)
    if np.any(m <= 0):
        raise InvalidProfileError(f"Interpolated mass is nonpositive near x={np.ravel(x)[np.argmin(np.ravel(m))]}")
    return m


def mass_eval(profile, x):
    """
    Évalue m(x), m'(x) et m''(x)

    Formes fermées pour les profils analytiques, différences centrées à
    5 points (pas h = max(1e-5, 1e-5|x|)) pour une table.

    Args:
        profile (MassProfile): Profil de masse
        x (float | ndarray): Position(s)

    Returns:
        tuple: (m, dm, d2m)
    """
    x, scalar = _prepare(profile, x)
    b = profile.b
    kind = profile.kind

    if kind == MassKind.CONSTANT:
        m = np.ones_like(x)
        dm = np.zeros_like(x)
        d2m = np.zeros_like(x)
    elif kind == MassKind.RATIONAL_SQUARE:
        q = 1.0 + x**2
        r = (b + x**2) / q
        dr = -2.0 * (b - 1.0) * x / q**2
        d2r = -2.0 * (b - 1.0) * (1.0 - 3.0 * x**2) / q**3
        m = r**2
        dm = 2.0 * r * dr
        d2m = 2.0 * dr**2 + 2.0 * r * d2r
    elif kind == MassKind.EXP_ABS:
        m = np.exp(-b * np.abs(x))
        # m'(0) := 0 (convention symétrique au point anguleux)
        dm = -b * np.sign(x) * m
        d2m = b**2 * m
    elif kind == MassKind.INVERSE_QUADRATIC:
        q = b + x**2
        m = 1.0 / q
        dm = -2.0 * x / q**2
        d2m = (6.0 * x**2 - 2.0 * b) / q**3
    elif kind == MassKind.TANH_SHIFT:
        # 1 + tanh(bx) = 2·expit(2bx), sans annulation pour bx très négatif
        up = expit(2.0 * b * x)
        down = expit(-2.0 * b * x)
        t = up - down
        sech2 = 4.0 * up * down
        m = 2.0 * up
        dm = b * sech2
        d2m = -2.0 * b**2 * sech2 * t
    else:
        h = np.maximum(1e-5, 1e-5 * np.abs(x))
        f = profile._spline
        m = _table_mass(profile, x)
        fp1, fm1 = f(x + h), f(x - h)
        fp2, fm2 = f(x + 2 * h), f(x - 2 * h)
        dm = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h)
        d2m = (-fp2 + 16.0 * fp1 - 30.0 * m + 16.0 * fm1 - fm2) / (12.0 * h**2)

    return _out(m, scalar), _out(dm, scalar), _out(d2m, scalar)


def _tanh_mu_paper(b, x):
    # (√2/b)·artanh(√((1 + tanh bx)/2)), réécrit pour rester fini quand bx → ±∞
    s = np.sqrt(expit(2.0 * b * x))
    return (np.sqrt(2.0) / b) * (np.log1p(s) - 0.5 * log_expit(-2.0 * b * x))


def _tanh_mu_origin(b):
    return (np.sqrt(2.0) / b) * np.arctanh(1.0 / np.sqrt(2.0))


def _table_mu(profile, x):
    flat = np.ravel(x)
    anchor = profile._mu_anchor
    f = lambda t: np.sqrt(profile._spline(t))
    nodes = np.unique(np.concatenate([flat, [anchor]]))
    steps = np.array([quad(f, a, c, epsabs=1e-10)[0] for a, c in zip(nodes[:-1], nodes[1:])])
    cumulative = np.concatenate([[0.0], np.cumsum(steps)])
    cumulative -= cumulative[np.searchsorted(nodes, anchor)]
    return cumulative[np.searchsorted(nodes, flat)].reshape(np.shape(x))


def mu_eval(profile, x):
    """
    Fonction auxiliaire μ(x) = ∫√m dx

    Args:
        profile (MassProfile): Profil de masse
        x (float | ndarray): Position(s)

    Returns:
        float | ndarray: μ(x) selon profile.mu_convention
    """
    x, scalar = _prepare(profile, x)
    b = profile.b
    kind = profile.kind
    paper = profile.mu_convention == MuConvention.PAPER

    if kind == MassKind.CONSTANT:
        mu = x.copy()
    elif kind == MassKind.RATIONAL_SQUARE:
        mu = x + (b - 1.0) * np.arctan(x)
    elif kind == MassKind.EXP_ABS:
        if b == 0:
            mu = x.copy()
        elif paper:
            mu = np.where(x >= 0, -(2.0 / b) * np.exp(-b * x / 2.0),
                          (2.0 / b) * np.exp(b * np.minimum(x, 0.0) / 2.0))
        else:
            mu = np.sign(x) * (2.0 / b) * (-np.expm1(-b * np.abs(x) / 2.0))
    elif kind == MassKind.INVERSE_QUADRATIC:
        # ln(x + √(b + x²)) = asinh(x/√b) + ln√b
        mu = np.arcsinh(x / np.sqrt(b))
        if paper:
            mu = mu + 0.5 * np.log(b)
    elif kind == MassKind.TANH_SHIFT:
        if b == 0:
            mu = x.copy()
        else:
            mu = _tanh_mu_paper(b, x)
            if not paper:
                mu = mu - _tanh_mu_origin(b)
    else:
        mu = _table_mu(profile, x)

    return _out(mu, scalar)


def mu_image(profile):
    """
    Image ouverte de μ sur le domaine (convention continue)

    Returns:
        tuple: (mu_lo, mu_hi), éventuellement infinis
    """
    _require_continuous(profile)
    b = profile.b
    kind = profile.kind
    if kind == MassKind.EXP_ABS and b > 0:
        return (-2.0 / b, 2.0 / b)
    if kind == MassKind.TANH_SHIFT and b != 0:
        mu0 = _tanh_mu_origin(b)
        return (-mu0, np.inf) if b > 0 else (-np.inf, -mu0)
    if kind == MassKind.CUSTOM_TABLE:
        lo, hi = profile.x_domain
        # bornes incluses dans le calcul, l'image reste ouverte
        values = _table_mu(profile, np.array([lo, hi]))
        return (float(values[0]), float(values[1]))
    return (-np.inf, np.inf)


def _require_continuous(profile):
    if profile.mu_convention != MuConvention.CONTINUOUS:
        raise NotApplicableError(
            f"Operation requires mu_convention=continuous_zero_at_origin, got {profile.mu_convention.value}"
        )


def mu_invert(profile, u):
    """
    Inverse de μ : trouve x tel que μ(x) = u

    Args:
        profile (MassProfile): Profil (convention continue)
        u (float): Valeur dans l'image de μ

    Returns:
        float: x avec |μ(x) - u| ≤ 1e-12·(1 + |u|)
    """
    _require_continuous(profile)
    u = float(u)
    lo, hi = mu_image(profile)
    if not (np.isfinite(u) and lo < u < hi):
        raise RangeError(f"u={u} outside the image of mu ({lo}, {hi})")

    b = profile.b
    kind = profile.kind
    if kind == MassKind.CONSTANT or (kind == MassKind.RATIONAL_SQUARE and b == 1.0):
        return u
    if kind in (MassKind.EXP_ABS, MassKind.TANH_SHIFT) and b == 0:
        return u
    if kind == MassKind.EXP_ABS:
        return float(-np.sign(u) * (2.0 / b) * np.log1p(-b * abs(u) / 2.0))
    if kind == MassKind.INVERSE_QUADRATIC:
        return float(np.sqrt(b) * np.sinh(u))

    return _bisect_mu(profile, u)


def _bisect_mu(profile, u):
    x_lo, x_hi = profile.x_domain
    g = lambda x: mu_eval(profile, x) - u

    if profile.kind == MassKind.CUSTOM_TABLE:
        left, right = x_lo, x_hi
        # les extrémités ouvertes sont évaluables par la spline
        f = lambda x: float(_table_mu(profile, np.array([x]))[0]) - u
        try:
            return float(brentq(f, left, right, xtol=1e-14, rtol=BRENT_RTOL, maxiter=200))
        except (ValueError, RuntimeError) as exc:
            raise RangeError(f"Could not bracket u={u} in custom table: {exc}") from exc

    left, right = -1.0, 1.0
    for _ in range(80):
        if g(left) < 0:
            break
        left *= 2.0
    for _ in range(80):
        if g(right) > 0:
            break
        right *= 2.0
    if not (g(left) < 0 < g(right)):
        raise RangeError(f"Could not bracket u={u} for {profile}")
    tol = 1e-12 * (1.0 + abs(u))
    try:
        x = brentq(g, left, right, xtol=1e-15 * max(1.0, abs(left), abs(right)),
                   rtol=BRENT_RTOL, maxiter=300)
    except (ValueError, RuntimeError) as exc:
        raise RangeError(f"Could not invert mu at u={u} for {profile}: {exc}") from exc
    if abs(g(x)) > tol:
        logger.debug("mu_invert residual %.3e above %.3e for u=%s", abs(g(x)), tol, u)
    return float(x)


def vm_eval(profile, x):
    """
    Potentiel induit par la masse

    V_m = (1/8m)·[m''/m - (7/4)(m'/m)²]

    Args:
        profile (MassProfile): Profil de masse
        x (float | ndarray): Position(s)

    Returns:
        float | ndarray: V_m(x)
    """
    m, dm, d2m = mass_eval(profile, x)
    vm = (d2m / m - 1.75 * (dm / m) ** 2) / (8.0 * m)
    if profile.kind == MassKind.EXP_ABS:
        # limite continue au point anguleux
        vm = np.where(np.asarray(x) == 0, -3.0 * profile.b**2 / 32.0, vm)
        if np.ndim(x) == 0:
            vm = float(vm)
    return vm


def vm_closed_eval(profile, x):
    """
    Formes fermées de V_m pour les quatre exemples analytiques

    Args:
        profile (MassProfile): Profil (rational_square, exp_abs,
            inverse_quadratic ou tanh_shift)
        x (float | ndarray): Position(s)

    Returns:
        float | ndarray: V_m(x)
    """
    if profile.kind not in CLOSED_FORM_KINDS:
        raise NotApplicableError(f"No closed-form V_m for {profile.kind.value}")
    x, scalar = _prepare(profile, x)
    b = profile.b

    if profile.kind == MassKind.RATIONAL_SQUARE:
        vm = (b - 1.0) * (3.0 * x**4 + 2.0 * (2.0 - b) * x**2 - b) / (2.0 * (b + x**2) ** 4)
    elif profile.kind == MassKind.EXP_ABS:
        vm = -(3.0 / 32.0) * b**2 * np.exp(b * np.abs(x))
    elif profile.kind == MassKind.INVERSE_QUADRATIC:
        vm = -(2.0 * b + x**2) / (8.0 * (b + x**2))
    else:
        vm = -(b**2 / 32.0) * (7.0 + np.tanh(b * x)) * np.exp(-2.0 * b * x)

    return _out(vm, scalar)


def vm_stationary_points(b):
    """
    Points stationnaires de V_m pour le profil rational_square

    x = 0 et x = ±√y avec y = b - 1 ± √((2b² - 2b + 3)/3) pour y > 0 :
    trois points si 0 < b < 1 ou 1 < b ≤ 4, cinq si b > 4.

    Args:
        b (float): Paramètre de forme

    Returns:
        list: Points triés par ordre croissant
    """
    b = float(b)
    if not np.isfinite(b) or b <= 0:
        raise InvalidParameterError(f"vm_stationary_points requires b > 0, got {b}")
    if b == 1.0:
        raise DegenerateError("b = 1 gives constant mass: V_m is identically zero")

    root = np.sqrt((2.0 * b**2 - 2.0 * b + 3.0) / 3.0)
    points = [0.0]
    for y in (b - 1.0 + root, b - 1.0 - root):
        if y > 1e-12:
            points.extend([-np.sqrt(y), np.sqrt(y)])
    return sorted(float(p) for p in points)
