"""
Tests unitaires pour le composant NumericOracle
"""

import sys
import os

# Ajouter le dossier parent au path pour importer src
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.errors import GridPlacementError, InvalidInputError
from src.mass_catalog import MassKind, MassProfile
from src.numeric_oracle import (
    GridSpec,
    auto_grid,
    convergence_order,
    discretize,
    eigen_lowest,
    end_exponent,
    grid_singular_ends,
    node_count,
    orthogonality_matrix,
    residual_norm,
    verify_family,
    verify_level,
)
from src.solvable_families import FamilyId, FamilyParams, potential_eval
import numpy as np


CONSTANT = MassProfile(MassKind.CONSTANT)
RATIONAL = MassProfile(MassKind.RATIONAL_SQUARE, b=2.0)
RATIONAL_SMALL = MassProfile(MassKind.RATIONAL_SQUARE, b=0.5)
INVERSE = MassProfile(MassKind.INVERSE_QUADRATIC, b=2.0)
TANH = MassProfile(MassKind.TANH_SHIFT, b=0.5)


def _oscillator_operator(N, lo=-12.0, hi=12.0, profile=CONSTANT):
    params = FamilyParams(omega=1.0)
    grid = GridSpec(lo, hi, N)
    return discretize(profile, lambda x: potential_eval(FamilyId.H_OSC, params, profile, x), grid)


def test_grid_spec():
    """Test 1 : Grille uniforme"""
    print("\n" + "="*60)
    print("TEST 1 : GridSpec")
    print("="*60)

    grid = GridSpec(-1.0, 1.0, 99)
    assert abs(grid.h - 0.02) < 1e-15, f"h = (hi - lo)/(N + 1) attendu, obtenu {grid.h}"
    points = grid.points()
    assert len(points) == 99 and abs(points[0] + 0.98) < 1e-14 and abs(points[-1] - 0.98) < 1e-14, \
        "Points intérieurs incorrects"
    assert len(grid.midpoints()) == 100, "N + 1 demi-points attendus"
    assert grid.refined().N == 199 and abs(grid.refined().h - 0.01) < 1e-15, "Grille raffinée h/2"
    print(f"✓ {grid}")

    for bad in ((1.0, -1.0, 100), (-1.0, 1.0, 8), (-np.inf, 1.0, 100)):
        try:
            GridSpec(*bad)
            assert False, f"Grille {bad} devrait être rejetée"
        except InvalidInputError:
            pass
    print("✓ Grilles invalides rejetées")


def test_constant_mass_oscillator():
    """Test 2 : Oscillateur à masse constante, N = 4000 sur [-12, 12]"""
    print("\n" + "="*60)
    print("TEST 2 : Oscillateur harmonique")
    print("="*60)

    op = _oscillator_operator(4000)
    pairs = eigen_lowest(op, 6)
    for n, (E, vector) in enumerate(pairs):
        assert abs(E - n) < 5e-4, f"E_{n} = {E} au lieu de {n}"
        assert node_count(vector) == n, f"Vecteur {n} : {node_count(vector)} nœuds"
        assert abs(op.h * np.sum(vector**2) - 1.0) < 1e-10, "Normalisation h·Σv² = 1"
        print(f"✓ E_{n} = {E:.8f}, {n} nœuds")

    gram = orthogonality_matrix([v for _, v in pairs], op.h)
    assert np.allclose(gram, np.eye(6), atol=1e-10), "Vecteurs propres orthonormés attendus"
    print("✓ Vecteurs orthonormés")


def test_operator_structure():
    """Test 3 : Symétrie et produit matrice-vecteur"""
    print("\n" + "="*60)
    print("TEST 3 : Opérateur tridiagonal")
    print("="*60)

    op = _oscillator_operator(40, -3.0, 3.0, RATIONAL)
    dense = np.diag(op.diag) + np.diag(op.offdiag, 1) + np.diag(op.offdiag, -1)
    vector = np.sin(np.linspace(0, 3, 40))
    assert np.allclose(op.apply(vector), dense @ vector, atol=1e-12), "apply ≠ produit dense"
    assert np.all(op.offdiag < 0), "Hors-diagonale -1/(2h²m) négative"
    print("✓ apply cohérent avec la matrice symétrique")

    E, psi = eigen_lowest(op, 1)[0]
    assert residual_norm(op, psi, E) < 1e-9, "Vecteur propre exact : résidu nul"
    try:
        residual_norm(op, np.zeros(40), 1.0)
        assert False, "InvalidInputError attendue"
    except InvalidInputError:
        print("✓ Résidu du vecteur nul rejeté")
    try:
        eigen_lowest(op, 41)
        assert False, "InvalidInputError attendue"
    except InvalidInputError:
        print("✓ k > N rejeté")


def test_node_count_and_order():
    """Test 4 : Comptage de nœuds et ordre de convergence"""
    print("\n" + "="*60)
    print("TEST 4 : Nœuds et ordre")
    print("="*60)

    x = np.linspace(-5, 5, 1001)
    assert node_count(np.exp(-x**2)) == 0, "Gaussienne sans nœud"
    assert node_count(x * (x**2 - 1) * np.exp(-x**2)) == 3, "Trois nœuds attendus"
    # valeurs négligeables ignorées
    assert node_count(np.array([1.0, 1e-15, -1e-15, 0.5])) == 0, "Bruit ignoré"
    try:
        node_count(np.array([1.0]))
        assert False, "InvalidInputError attendue"
    except InvalidInputError:
        print("✓ Comptage de nœuds")

    assert abs(convergence_order(4e-6, 1e-6) - 2.0) < 1e-14, "Ordre 2 attendu"
    try:
        convergence_order(0.0, 1e-6)
        assert False, "InvalidInputError attendue"
    except InvalidInputError:
        print("✓ Ordre de convergence")


def test_eigenvalue_convergence():
    """Test 5 : Erreur sur E_n décroissante quand h diminue"""
    print("\n" + "="*60)
    print("TEST 5 : Convergence des valeurs propres")
    print("="*60)

    errors = []
    for N in (250, 500, 1000, 2000):
        E = eigen_lowest(_oscillator_operator(N), 4)[3][0]
        errors.append(abs(E - 3.0))
    assert all(b < a for a, b in zip(errors, errors[1:])), f"Erreurs non décroissantes {errors}"
    ratio = errors[-2] / errors[-1]
    assert 3.5 < ratio < 4.5, f"Convergence en h² attendue, rapport {ratio:.2f}"
    print(f"✓ |E_3 - 3| : {['%.2e' % e for e in errors]}")


def test_grid_placement():
    """Test 6 : Grille hors du domaine de la famille"""
    print("\n" + "="*60)
    print("TEST 6 : Placement de la grille")
    print("="*60)

    params = FamilyParams(s=3.0, lam=1.0)
    grid = GridSpec(-1.0, 1.0, 100)
    try:
        discretize(CONSTANT, lambda x: potential_eval(FamilyId.J1_TRIG_CSC, params, CONSTANT, x), grid)
        assert False, "GridPlacementError attendue"
    except GridPlacementError:
        print("✓ Potentiel hors domaine signalé")

    grid = auto_grid(FamilyId.J1_TRIG_CSC, params, INVERSE, [0, 1, 2], N=1000)
    x_end = np.sqrt(2.0) * np.sinh(np.pi)
    assert grid.x_lo == 0.0 and abs(grid.x_hi - x_end) < 1e-9, \
        f"Nœuds de Dirichlet sur les extrémités singulières attendus, obtenu ({grid.x_lo}, {grid.x_hi})"
    assert abs(grid.points()[0] - grid.h) < 1e-12, "Premier point à h du bord singulier"
    print(f"✓ Grille automatique ({grid.x_lo}, {grid.x_hi:.6f}), h = {grid.h:.3e}")

    grid = auto_grid(FamilyId.H_OSC, FamilyParams(omega=1.0), CONSTANT, [0], N=1000)
    assert 6.0 < grid.x_hi < 6.3 and abs(grid.x_lo + grid.x_hi) < 0.05, \
        f"Troncature à 1e-8 du maximum (±6.07) attendue, obtenu ({grid.x_lo}, {grid.x_hi})"
    print(f"✓ Oscillateur : domaine tronqué à ({grid.x_lo:.3f}, {grid.x_hi:.3f})")


def test_verify_levels_with_pdm():
    """Test 7 : Vérification analytique / numérique à masse variable"""
    print("\n" + "="*60)
    print("TEST 7 : Vérification PDM")
    print("="*60)

    cases = [
        (FamilyId.H_OSC, FamilyParams(omega=1.0), RATIONAL, range(4)),
        (FamilyId.J1_TRIG_CSC, FamilyParams(s=3.0, lam=1.0), INVERSE, range(3)),
        (FamilyId.J2_ROSEN_MORSE, FamilyParams(s=4.0, lam=1.0), RATIONAL_SMALL, range(3)),
        (FamilyId.J2_ECKART, FamilyParams(s=2.0, lam=12.0), TANH, range(2)),
        (FamilyId.J2_ECKART, FamilyParams(s=2.0, lam=30.0), CONSTANT, range(1)),
        (FamilyId.L_RADIAL_OSC, FamilyParams(omega=1.0, l=1.0), TANH, range(3)),
    ]
    for family, params, profile, levels in cases:
        for n in levels:
            report = verify_level(family, params, profile, n, N=8000)
            assert report.error is None, f"{family.value} n={n} : {report.error}"
            assert report.passed, f"{family.value} n={n} : |ΔE| = {report.abs_err:.2e}"
            assert report.residual_norm <= 1e-4, f"{family.value} n={n} : résidu {report.residual_norm:.2e}"
            assert report.convergence_order >= 1.8, f"{family.value} n={n} : ordre {report.convergence_order:.2f}"
            assert report.nodes_found == report.nodes_expected == n, f"{family.value} n={n} : nœuds"
        print(f"✓ {family.value:15s} ({profile.kind.value}) : niveaux {list(levels)} vérifiés")


def test_verify_family():
    """Test 8 : Vérification d'une famille, erreurs par niveau"""
    print("\n" + "="*60)
    print("TEST 8 : verify_family")
    print("="*60)

    params = FamilyParams(s=2.0, lam=12.0)
    reports = verify_family(FamilyId.J2_ECKART, params, TANH, [0, 1, 2], N=2000, refine=False)
    assert [r.n for r in reports] == [0, 1, 2], "Ordre des niveaux conservé"
    assert reports[0].error is None and reports[1].error is None, "Niveaux liés vérifiés"
    assert reports[2].error is not None and reports[2].error.startswith("LevelError"), \
        "Niveau non lié signalé dans son rapport"
    assert reports[0].orthogonality_max is not None and reports[0].orthogonality_max < 1e-6, \
        f"Orthogonalité {reports[0].orthogonality_max}"
    print(f"✓ Eckart : niveaux 0, 1 vérifiés, niveau 2 en erreur ({reports[2].error[:40]}...)")

    report = verify_level(FamilyId.H_SQRT, FamilyParams(omega=1.0), TANH, 2, N=1000)
    assert report.error is not None and report.error.startswith("NotApplicableError"), \
        "Niveau pair de H_SQRT hors Dirichlet"
    print("✓ H_SQRT pair signalé non applicable")

    serial = verify_family(FamilyId.H_OSC, FamilyParams(), RATIONAL, [0, 1], N=2000, refine=False)
    parallel = verify_family(FamilyId.H_OSC, FamilyParams(), RATIONAL, [0, 1], N=2000, refine=False, workers=2)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel], "Résultats parallèles différents"
    print("✓ Répartition sur processus déterministe")


def test_singular_end_correction():
    """Test 9 : Exposant au bord singulier et correction de la diagonale"""
    print("\n" + "="*60)
    print("TEST 9 : Correction au bord singulier")
    print("="*60)

    p = 0.75
    potential = lambda x: p * (p - 1.0) / (2.0 * np.asarray(x) ** 2)
    grid = GridSpec(0.0, 2.01, 200)
    assert abs(grid.h - 0.01) < 1e-15, f"h = 0.01 attendu, obtenu {grid.h}"

    end = end_exponent(CONSTANT, potential, 0.0, +1, grid.x_hi - grid.x_lo)
    assert abs(end.exponent - p) < 1e-6 and not end.integral, f"p = 3/4 attendu, obtenu {end.exponent}"
    print(f"✓ Exposant lu sur t²·V : p = {end.exponent:.8f}")

    u = grid.points() ** p
    corrected = discretize(CONSTANT, potential, grid, (end,)).apply(u)
    plain = discretize(CONSTANT, potential, grid).apply(u)
    assert np.max(np.abs(corrected[:100])) < 1e-8, "Lignes corrigées exactes pour t^p"
    assert abs(plain[0]) > 1.0, f"Sans correction, défaut O(h^(p-2)) en première ligne : {plain[0]}"
    print(f"✓ Défaut de la première ligne : {abs(plain[0]):.1f} → {abs(corrected[0]):.1e}")

    end = end_exponent(CONSTANT, lambda x: np.zeros_like(np.asarray(x, dtype=float)), 0.0, +1, 2.0)
    assert end.exponent == 1.0 and end.integral, "Bord régulier : p = 1"
    linear = discretize(CONSTANT, lambda x: 0.0 * x, grid, (end,)).apply(grid.points())
    assert np.max(np.abs(linear[:100])) < 1e-8, "p = 1 : ligne exacte pour t"
    print("✓ p = 1 : aucune correction nécessaire")

    params = FamilyParams(s=3.0, lam=1.0)
    grid = auto_grid(FamilyId.J1_TRIG_CSC, params, INVERSE, [0], N=1000)
    ends = grid_singular_ends(FamilyId.J1_TRIG_CSC, params, INVERSE, grid,
                              lambda x: potential_eval(FamilyId.J1_TRIG_CSC, params, INVERSE, x))
    assert [e.exponent for e in ends] == [2.0, 4.0], f"p = s ∓ λ attendus, obtenu {[e.exponent for e in ends]}"
    print("✓ J1_TRIG_CSC : p = 2 en 0, p = 4 en π")


def test_h_sqrt_dirichlet_levels():
    """Test 10 : Niveaux impairs de H_SQRT (ψ ~ μ^(3/4) à l'origine)"""
    print("\n" + "="*60)
    print("TEST 10 : H_SQRT impair")
    print("="*60)

    params = FamilyParams(omega=1.0)
    for profile, levels in ((CONSTANT, (1, 3)), (TANH, (1,))):
        for n in levels:
            report = verify_level(FamilyId.H_SQRT, params, profile, n, N=8000)
            assert report.error is None, f"n={n} : {report.error}"
            assert report.passed, f"n={n} ({profile.kind.value}) : |ΔE| = {report.abs_err:.2e}"
            assert report.residual_norm <= 1e-4, f"n={n} : résidu {report.residual_norm:.2e}"
            assert report.convergence_order >= 1.8, f"n={n} : ordre {report.convergence_order:.2f}"
            assert report.nodes_found == report.nodes_expected == n // 2, f"n={n} : nœuds"
            assert 0 < report.residual_excluded < report.grid["N"] // 10, \
                f"Couche limite exclue du résidu signalée : {report.residual_excluded}"
            print(f"✓ n={n} ({profile.kind.value}) : |ΔE| = {report.abs_err:.2e}, "
                  f"{report.residual_excluded} points exclus du résidu")


def test_all_families_against_oracle():
    """Test 11 : Chaque famille, masse constante et masse d'exemple"""
    print("\n" + "="*60)
    print("TEST 11 : Couverture des familles")
    print("="*60)

    cases = [
        (FamilyId.J1_SCARF2, FamilyParams(s=4.0, lam=1.0), RATIONAL),
        (FamilyId.J1_GPT, FamilyParams(s=4.0, lam=6.0), RATIONAL),
        (FamilyId.J1_TRIG_SEC, FamilyParams(s=3.0, lam=1.0), INVERSE),
        (FamilyId.J2_COT, FamilyParams(s=-2.0, lam=1.0), INVERSE),
        (FamilyId.J2_TAN, FamilyParams(s=-2.0, lam=1.0), INVERSE),
        (FamilyId.L_MORSE, FamilyParams(s=4.5), RATIONAL),
        (FamilyId.L_COULOMB, FamilyParams(coulomb_charge=1.0, l=1.0), TANH),
    ]
    for family, params, example in cases:
        for profile in (CONSTANT, example):
            reports = verify_family(family, params, profile, range(4), N=8000)
            for r in reports:
                assert r.error is None, f"{family.value} n={r.n} : {r.error}"
                assert r.passed, f"{family.value} n={r.n} ({profile.kind.value}) : |ΔE| = {r.abs_err:.2e}"
                assert r.residual_norm <= 1e-4, f"{family.value} n={r.n} : résidu {r.residual_norm:.2e}"
                assert r.convergence_order >= 1.8, f"{family.value} n={r.n} : ordre {r.convergence_order:.2f}"
                assert r.nodes_found == r.nodes_expected, f"{family.value} n={r.n} : nœuds"
                assert r.orthogonality_max <= 1e-6, f"{family.value} : orthogonalité {r.orthogonality_max:.2e}"
            print(f"✓ {family.value:15s} ({profile.kind.value}) : n = 0..3, "
                  f"N max = {max(r.grid['N'] for r in reports)}")


def run_all_tests():
    """Lance tous les tests"""
    print("\n" + "🧪"*30)
    print("LANCEMENT DES TESTS DU COMPOSANT NUMERICORACLE")
    print("🧪"*30)

    tests = [
        test_grid_spec,
        test_constant_mass_oscillator,
        test_operator_structure,
        test_node_count_and_order,
        test_eigenvalue_convergence,
        test_grid_placement,
        test_verify_levels_with_pdm,
        test_verify_family,
        test_singular_end_correction,
        test_h_sqrt_dirichlet_levels,
        test_all_families_against_oracle,
    ]

    passed = 0
    failed = 0

    for test in tests:
        try:
            test()
            passed += 1
        except AssertionError as e:
            print(f"\n❌ ÉCHEC : {test.__name__}")
            print(f"   Erreur : {e}")
            failed += 1
        except Exception as e:
            print(f"\n❌ ERREUR : {test.__name__}")
            print(f"   Exception : {e}")
            failed += 1

    print("\n" + "="*60)
    print(f"RÉSULTAT : {passed} tests réussis, {failed} tests échoués")
    print("="*60)

    if failed == 0:
        print("\n" + "🎉"*20)
        print("✅ TOUS LES TESTS PASSENT !")
        print("🎉"*20 + "\n")
    else:
        print("\n⚠️ Certains tests ont échoué. Vérifiez le code.\n")
        sys.exit(1)


if __name__ == "__main__":
    run_all_tests()
