"""
Composant 5: NumericOracle (Vérification par différences finies)
Discrétise H = -½ d/dx (1/m) d/dx + V sur une grille uniforme (forme flux,
1/m aux demi-points), résout le problème propre tridiagonal et compare aux
résultats analytiques
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from multiprocessing import Pool

import numpy as np
from numpy.linalg import LinAlgError
from scipy.linalg import eigh_tridiagonal

from src.errors import (
    GridPlacementError,
    InvalidInputError,
    NumericError,
    PDMError,
    SingularityError,
    DomainError,
)
from src.family_table import FamilyId, get_family
from src.mass_catalog import mass_eval, mu_image, mu_invert
from src.solvable_families import (
    _covered,
    energy,
    expected_nodes,
    oracle_index,
    potential_eval,
    solve_level,
)

logger = logging.getLogger(__name__)

MIN_POINTS = 16
NODE_THRESHOLD = 1e-12
# Fraction de l'intervalle exclue du résidu près d'une extrémité d'exposant non entier
SINGULAR_MARGIN = 0.02
EIGEN_TOLERANCE = 1e-12
# Raffinement automatique : N doublé jusqu'à ce résidu, sans dépasser MAX_POINTS
RESIDUAL_TARGET = 1e-4
MAX_POINTS = 65536
# Distance relative (à l'intervalle) où l'on lit t²·V près d'une extrémité
EXPONENT_OFFSET = 1e-6


@dataclass(frozen=True)
class GridSpec:
    """
    Grille uniforme à N points intérieurs, conditions de Dirichlet en
    x_lo et x_hi
    """
    x_lo: float
    x_hi: float
    N: int

    def __post_init__(self):
        if not (np.isfinite(self.x_lo) and np.isfinite(self.x_hi) and self.x_lo < self.x_hi):
            raise InvalidInputError(f"Grid requires finite x_lo < x_hi, got ({self.x_lo}, {self.x_hi})")
        if int(self.N) != self.N or self.N < MIN_POINTS:
            raise InvalidInputError(f"Grid requires N >= {MIN_POINTS} interior points, got {self.N}")

    @property
    def h(self):
        return (self.x_hi - self.x_lo) / (self.N + 1)

    def points(self):
        """Points intérieurs x_i = x_lo + i·h, i = 1..N"""
        return self.x_lo + self.h * np.arange(1, self.N + 1)

    def midpoints(self):
        """Demi-points x_{i+1/2}, i = 0..N"""
        return self.x_lo + self.h * (np.arange(self.N + 1) + 0.5)

    def refined(self):
        """Grille de pas h/2 sur le même intervalle"""
        return GridSpec(self.x_lo, self.x_hi, 2 * self.N + 1)

    def to_dict(self):
        return {"x_lo": self.x_lo, "x_hi": self.x_hi, "N": self.N, "h": self.h}


class TridiagonalOperator:
    """
    Hamiltonien discrétisé, symétrique par construction

    Args:
        diag (ndarray): N éléments diagonaux
        offdiag (ndarray): N-1 éléments hors diagonale
        grid (GridSpec): Grille associée
    """

    def __init__(self, diag, offdiag, grid):
        self.diag = np.asarray(diag, dtype=float)
        self.offdiag = np.asarray(offdiag, dtype=float)
        self.grid = grid
        self.h = grid.h

    def apply(self, psi):
        """Produit H·ψ"""
        psi = np.asarray(psi, dtype=float)
        out = self.diag * psi
        out[:-1] += self.offdiag * psi[1:]
        out[1:] += self.offdiag * psi[:-1]
        return out

    def __repr__(self):
        return f"TridiagonalOperator(N={len(self.diag)}, h={self.h:.3e})"


@dataclass(frozen=True)
class SingularEnd:
    """
    Extrémité singulière de la famille, sur le nœud de Dirichlet (ou entre
    lui et le premier point de la grille)

    Près du bord, V ≈ κ/(2·m₀·t²) avec t la distance au bord ; ψ s'y annule
    comme t^p, p(p-1) = κ, p > 1/2.
    """
    x: float
    inward: int
    mass: float
    exponent: float

    @property
    def integral(self):
        return self.exponent == round(self.exponent)


def end_exponent(profile, potential, x_end, inward, span):
    """
    Exposant p de ψ ~ t^p à une extrémité singulière, lu sur le potentiel

    κ = lim 2·m₀·t²·V(x_end + t), extrapolé de deux distances t et 2t.

    Args:
        profile (MassProfile): Profil de masse
        potential (callable): V(x) vectorisé
        x_end (float): Position du bord
        inward (int): +1 pour une borne inférieure, -1 pour une borne supérieure
        span (float): Longueur de l'intervalle

    Returns:
        SingularEnd
    """
    t = EXPONENT_OFFSET * span
    mass = float(np.asarray(mass_eval(profile, np.array([x_end]))[0])[0])
    v = np.asarray(potential(x_end + inward * np.array([t, 2.0 * t])), dtype=float)
    kappa = 2.0 * mass * (2.0 * t**2 * v[0] - 4.0 * t**2 * v[1])
    if kappa < -0.25 - 1e-6:
        raise NumericError(f"Singular end at x={x_end}: t²V limit {kappa:.6g} below -1/4, no Dirichlet level")
    exponent = 0.5 + math.sqrt(max(kappa + 0.25, 0.0))
    if abs(exponent - round(exponent)) < 1e-6:
        exponent = float(round(exponent))
    logger.debug("singular end x=%.12g: kappa=%.6g p=%.6g", x_end, kappa, exponent)
    return SingularEnd(float(x_end), int(inward), mass, exponent)


def _boundary_shift(grid, end):
    """
    Correction diagonale qui rend la ligne i exacte pour t^p

    δ_i = [(u_{i+1} - 2u_i + u_{i-1})/u_i - p(p-1)/s_i²]/(2·m₀·h²),
    u = s^p, s = t/h, nœud de Dirichlet u = 0. Limitée à la moitié de la
    grille la plus proche du bord.
    """
    x = grid.points()
    half = x.size // 2
    rows = np.arange(half + 1) if end.inward > 0 else np.arange(x.size - 1, x.size - half - 2, -1)
    s = end.inward * (x[rows] - end.x) / grid.h
    if np.any(s <= 0):
        raise GridPlacementError(f"Grid point lies beyond the singular end x={end.x}")
    p = end.exponent
    # rapports u_{i±1}/u_i
    away = (s[1:] / s[:-1]) ** p
    toward = np.concatenate(([0.0], (s[:-2] / s[1:-1]) ** p))
    shift = ((away - 2.0 + toward) - p * (p - 1.0) / s[:-1] ** 2) / (2.0 * end.mass * grid.h**2)
    return rows[:-1], shift


def discretize(profile, potential, grid, singular_ends=()):
    """
    Discrétise l'opérateur de BenDaniel-Duke

    (Hψ)_i = -½[(ψ_{i+1}-ψ_i)/m_{i+½} - (ψ_i-ψ_{i-1})/m_{i-½}]/h² + V_i ψ_i

    Près d'une extrémité singulière, la diagonale reçoit la correction qui
    rend l'opérateur exact pour le comportement t^p (voir _boundary_shift).
    Avec le nœud de Dirichlet sur le bord, elle est nulle pour p = 1, 2
    ou 3 et d'ordre h² pour les autres p entiers.

    Args:
        profile (MassProfile): Profil de masse
        potential (callable): V(x) vectorisé
        grid (GridSpec): Grille
        singular_ends (tuple): SingularEnd à corriger

    Returns:
        TridiagonalOperator
    """
    h = grid.h
    x = grid.points()
    try:
        m_half = np.asarray(mass_eval(profile, grid.midpoints())[0])
    except DomainError as exc:
        raise GridPlacementError(f"Grid midpoints leave the mass domain: {exc}") from exc
    if np.any(~np.isfinite(m_half)) or np.any(m_half <= 0):
        raise GridPlacementError("Mass is not positive and finite at every half-grid point")

    try:
        v = np.asarray(potential(x), dtype=float)
    except (SingularityError, DomainError) as exc:
        raise GridPlacementError(f"Potential is singular on the grid, shift it by h/2: {exc}") from exc
    if np.any(~np.isfinite(v)):
        bad = x[~np.isfinite(v)][0]
        raise GridPlacementError(f"Potential is not finite at grid point x={bad}, shift the grid by h/2")

    inv_m = 1.0 / m_half
    diag = (inv_m[:-1] + inv_m[1:]) / (2.0 * h**2) + v
    offdiag = -inv_m[1:-1] / (2.0 * h**2)
    for end in singular_ends:
        rows, shift = _boundary_shift(grid, end)
        diag[rows] += shift
    return TridiagonalOperator(diag, offdiag, grid)


def _orient(vector):
    """Premier lobe significatif positif"""
    magnitude = np.abs(vector)
    first = np.nonzero(magnitude > 1e-3 * magnitude.max())[0][0]
    return vector if vector[first] > 0 else -vector


def eigen_lowest(op, k):
    """
    Les k plus petites valeurs propres et vecteurs propres

    Bisection de Sturm puis itération inverse (LAPACK stebz/stein), vecteurs
    normalisés avec le poids h.

    Args:
        op (TridiagonalOperator): Opérateur
        k (int): Nombre de niveaux

    Returns:
        list: [(E, vecteur), ...] par énergie croissante
    """
    size = len(op.diag)
    if not 1 <= k <= size:
        raise InvalidInputError(f"Requested k={k} eigenpairs from an operator of size {size}")
    try:
        values, vectors = eigh_tridiagonal(
            op.diag, op.offdiag, select="i", select_range=(0, k - 1),
            lapack_driver="stebz", tol=EIGEN_TOLERANCE,
        )
    except (LinAlgError, ValueError) as exc:
        raise NumericError(f"Tridiagonal eigensolver failed for N={size}, k={k}: {exc}") from exc

    pairs = []
    for i in range(k):
        vec = _orient(vectors[:, i] / math.sqrt(op.h))
        pairs.append((float(values[i]), vec))
    return pairs


def residual_norm(op, psi_samples, E, mask=None):
    """
    Résidu relatif ‖Hψ - Eψ‖₂/‖ψ‖₂ sur la grille

    Args:
        op (TridiagonalOperator): Opérateur
        psi_samples (ndarray): ψ aux points de la grille
        E (float): Énergie
        mask (ndarray): Points retenus (par défaut tous)

    Returns:
        float: Résidu relatif
    """
    psi = np.asarray(psi_samples, dtype=float)
    if psi.shape != op.diag.shape:
        raise InvalidInputError(f"psi has {psi.size} samples, operator has {op.diag.size} points")
    if not np.any(psi):
        raise InvalidInputError("Residual of the zero vector is undefined")
    r = op.apply(psi) - E * psi
    if mask is not None:
        r = r[mask]
        psi = psi[mask]
    return float(np.linalg.norm(r) / np.linalg.norm(psi))


def node_count(psi_samples):
    """
    Nombre de changements de signe

    Les valeurs de module < 1e-12·max sont ignorées.
    """
    psi = np.asarray(psi_samples, dtype=float)
    if psi.size < 2:
        raise InvalidInputError("node_count needs at least 2 samples")
    significant = psi[np.abs(psi) > NODE_THRESHOLD * np.abs(psi).max()]
    signs = np.sign(significant)
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def orthogonality_matrix(vectors, h=1.0):
    """Matrice de Gram h·⟨v_i, v_j⟩"""
    if len(vectors) < 1:
        raise InvalidInputError("orthogonality_matrix needs at least one vector")
    stack = np.vstack([np.asarray(v, dtype=float) for v in vectors])
    if stack.shape[1] < 2:
        raise InvalidInputError("orthogonality_matrix needs at least 2 samples per vector")
    return h * stack @ stack.T


def convergence_order(residual_h, residual_half, ratio=2.0):
    """Ordre observé log(r_h / r_{h/2}) / log(ratio), ratio = h/h' (2 par défaut)"""
    if not (residual_h > 0 and residual_half > 0):
        raise InvalidInputError(f"Residuals must be positive, got ({residual_h}, {residual_half})")
    if not ratio > 1:
        raise InvalidInputError(f"Step ratio must exceed 1, got {ratio}")
    return math.log(residual_h / residual_half) / math.log(ratio)


@dataclass
class VerificationReport:
    """Comparaison analytique / numérique pour un niveau"""
    family: str
    params_digest: str
    n: int
    E_analytic: float = None
    E_numeric: float = None
    abs_err: float = None
    rel_err: float = None
    residual_norm: float = None
    residual_excluded: int = None
    nodes_expected: int = None
    nodes_found: int = None
    orthogonality_max: float = None
    grid: dict = field(default_factory=dict)
    convergence_order: float = None
    error: str = None

    @property
    def passed(self):
        """Accord analytique / numérique à max(1e-3·|E|, 1e-3)"""
        if self.error is not None or self.abs_err is None:
            return False
        return self.abs_err <= max(1e-3 * abs(self.E_analytic), 1e-3)

    def to_dict(self):
        return asdict(self)


def _singular_ends(family, params, profile):
    lo, hi = get_family(family).mu_domain(params)
    img_lo, img_hi = mu_image(profile)
    return (bool(np.isfinite(lo) and img_lo < lo), bool(np.isfinite(hi) and hi < img_hi))


def auto_grid(family, params, profile, levels, N=4000):
    """
    Grille par défaut couvrant le support numérique des niveaux demandés

    Les bornes infinies sont coupées là où |φ| < 1e-8 du maximum (ou juste à
    l'intérieur de l'image de μ). Une extrémité singulière porte le nœud de
    Dirichlet : le premier point intérieur est à h du bord et V n'est jamais
    évalué sur la singularité.

    Args:
        family (FamilyId): Famille
        params (FamilyParams): Paramètres
        profile (MassProfile): Profil de masse
        levels (list): Niveaux à couvrir
        N (int): Points intérieurs

    Returns:
        GridSpec
    """
    lo, hi = get_family(family).mu_domain(params)
    _, (s_lo, s_hi) = _covered(profile, lo, hi)
    mu_lo, mu_hi = np.inf, -np.inf
    for n in levels:
        support = solve_level(FamilyId(family), params, profile, int(n)).mu_support
        mu_lo = min(mu_lo, support[0])
        mu_hi = max(mu_hi, support[1])

    singular_lo, singular_hi = _singular_ends(family, params, profile)
    x_lo = _grid_end(profile, mu_lo, s_lo, singular_lo and mu_lo == lo, inward=+1)
    x_hi = _grid_end(profile, mu_hi, s_hi, singular_hi and mu_hi == hi, inward=-1)
    grid = GridSpec(float(x_lo), float(x_hi), int(N))
    logger.debug("auto grid for %s: %s", FamilyId(family).value, grid)
    return grid


def _grid_end(profile, mu_end, support_edge, singular, inward):
    if not singular and mu_end == support_edge:
        # bord de l'image de μ : légèrement à l'intérieur
        mu_end = mu_end + inward * 1e-9 * max(1.0, abs(mu_end))
    return mu_invert(profile, mu_end)


def grid_singular_ends(family, params, profile, grid, potential):
    """
    Extrémités singulières portées par un nœud de Dirichlet de la grille (ou
    situées entre ce nœud et le premier point intérieur)

    Returns:
        tuple: SingularEnd
    """
    lo, hi = get_family(family).mu_domain(params)
    x = grid.points()
    span = grid.x_hi - grid.x_lo
    ends = []
    for flag, edge, inward in zip(_singular_ends(family, params, profile), (lo, hi), (+1, -1)):
        if not flag:
            continue
        x_end = float(mu_invert(profile, edge))
        boundary, first = (grid.x_lo, x[0]) if inward > 0 else (grid.x_hi, x[-1])
        if inward * (x_end - boundary) >= -1e-9 * grid.h and inward * (first - x_end) > 0:
            ends.append(end_exponent(profile, potential, x_end, inward, span))
    return tuple(ends)


def _residual_mask(grid, ends):
    x = grid.points()
    span = grid.x_hi - grid.x_lo
    mask = np.ones(x.shape, dtype=bool)
    for end in ends:
        # t^p non polynomial : couche limite d'erreur de troncature O(h^(p-1))
        if not end.integral:
            mask &= end.inward * (x - end.x) > SINGULAR_MARGIN * span
    return mask


def _level_residual(family, params, profile, n, grid):
    potential = lambda x: potential_eval(family, params, profile, x)
    ends = grid_singular_ends(family, params, profile, grid, potential)
    op = discretize(profile, potential, grid, ends)
    psi = solve_level(family, params, profile, n).psi(grid.points())
    mask = _residual_mask(grid, ends)
    residual = residual_norm(op, psi, energy(family, params, n), mask)
    return op, psi, residual, int(mask.size - np.count_nonzero(mask))


def verify_level(family, params, profile, n, grid=None, N=4000, refine=True):
    """
    Vérifie un niveau contre le solveur par différences finies

    Sans grille imposée, N est doublé (2N+1) tant que le résidu dépasse
    1e-4 et que N reste sous MAX_POINTS. Avec `refine`, la grille h/2 donne
    l'ordre de convergence et E_numeric est extrapolé de Richardson
    (erreur en h²) à partir des deux grilles.

    Args:
        family (FamilyId): Famille
        params (FamilyParams): Paramètres
        profile (MassProfile): Profil de masse
        n (int): Niveau
        grid (GridSpec): Grille (par défaut auto_grid)
        N (int): Points intérieurs pour la grille automatique
        refine (bool): Calcule l'ordre de convergence sur la grille h/2

    Returns:
        VerificationReport
    """
    family = FamilyId(family)
    report = VerificationReport(family=family.value, params_digest=params.digest(), n=int(n))
    try:
        E = energy(family, params, n)
        report.E_analytic = E
        report.nodes_expected = expected_nodes(family, n)
        index = oracle_index(family, n)

        automatic = grid is None
        if automatic:
            grid = auto_grid(family, params, profile, [n], N)
        op, psi, residual, excluded = _level_residual(family, params, profile, n, grid)
        while automatic and residual > RESIDUAL_TARGET and 2 * grid.N + 1 <= MAX_POINTS:
            grid = auto_grid(family, params, profile, [n], 2 * grid.N + 1)
            op, psi, residual, excluded = _level_residual(family, params, profile, n, grid)
        if residual > RESIDUAL_TARGET:
            logger.info("%s n=%d: residual %.3e above %.0e at N=%d",
                        family.value, n, residual, RESIDUAL_TARGET, grid.N)

        report.grid = grid.to_dict()
        report.residual_norm = residual
        report.residual_excluded = excluded
        report.nodes_found = node_count(psi)

        E_numeric = eigen_lowest(op, index + 1)[index][0]
        if refine:
            fine = auto_grid(family, params, profile, [n], 2 * grid.N + 1) if automatic else grid.refined()
            op_fine, _, residual_fine, _ = _level_residual(family, params, profile, n, fine)
            ratio = grid.h / fine.h
            report.convergence_order = convergence_order(residual, residual_fine, ratio)
            E_fine = eigen_lowest(op_fine, index + 1)[index][0]
            E_numeric = (ratio**2 * E_fine - E_numeric) / (ratio**2 - 1.0)
        report.E_numeric = E_numeric
        report.abs_err = abs(E_numeric - E)
        report.rel_err = report.abs_err / max(1.0, abs(E))
    except PDMError as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        logger.warning("Verification of %s n=%s failed: %s", family.value, n, report.error)
    return report


def _verify_task(args):
    return verify_level(*args)


def verify_family(family, params, profile, levels, N=4000, grid=None, refine=True, workers=None):
    """
    Vérifie plusieurs niveaux

    Sans grille imposée, chaque niveau prend sa grille automatique ;
    l'orthogonalité est mesurée sur la grille commune des niveaux vérifiés.
    Les niveaux sont indépendants et peuvent être répartis sur `workers`
    processus ; les rapports restent dans l'ordre des niveaux.

    Returns:
        list: VerificationReport par niveau
    """
    family = FamilyId(family)
    levels = [int(n) for n in levels]

    tasks = [(family, params, profile, n, grid, N, refine) for n in levels]
    if workers and workers > 1 and len(tasks) > 1:
        with Pool(workers) as pool:
            reports = pool.map(_verify_task, tasks)
    else:
        reports = [_verify_task(task) for task in tasks]

    good = [r for r in reports if r.error is None]
    if len(good) > 1:
        common = grid or auto_grid(family, params, profile, [r.n for r in good], N)
        vectors = [solve_level(family, params, profile, r.n).psi(common.points()) for r in good]
        gram = orthogonality_matrix(vectors, common.h)
        off = np.abs(gram - np.diag(np.diag(gram)))
        worst = float(off.max())
        for r in good:
            r.orthogonality_max = worst
    return reports
