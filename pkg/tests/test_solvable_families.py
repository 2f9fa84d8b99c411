"""
Tests unitaires pour le composant SolvableFamilies
"""

import sys
import os

# Ajouter le dossier parent au path pour importer src
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.errors import InvalidParameterError, LevelError, NotApplicableError
from src.mass_catalog import MassKind, MassProfile, MuConvention, mu_eval, mu_invert, vm_eval
from src.solvable_families import (
    UNBOUNDED,
    FamilyId,
    FamilyParams,
    eigenfunction_eval,
    energy,
    expected_nodes,
    family_domain,
    oracle_index,
    polynomial_params,
    potential_eval,
    solve_level,
    validate_params,
    x_domain_for,
)
import numpy as np
from scipy.integrate import quad


CONSTANT = MassProfile(MassKind.CONSTANT)
RATIONAL = MassProfile(MassKind.RATIONAL_SQUARE, b=2.0)
INVERSE = MassProfile(MassKind.INVERSE_QUADRATIC, b=2.0)
TANH = MassProfile(MassKind.TANH_SHIFT, b=0.5)


def test_constant_mass_textbook_forms():
    """Test 1 : Formes classiques à masse constante"""
    print("\n" + "="*60)
    print("TEST 1 : Masse constante")
    print("="*60)

    osc = FamilyParams(omega=1.0)
    x = np.linspace(-4, 4, 17)
    assert np.allclose(potential_eval(FamilyId.H_OSC, osc, CONSTANT, x), -0.5 + 0.5 * x**2, atol=1e-14), \
        "V = -ω/2 + ω²x²/2 attendu"
    for n in range(6):
        assert energy(FamilyId.H_OSC, osc, n) == n * 1.0, f"E_{n} = nω attendu"
    print("✓ Oscillateur : V = -1/2 + x²/2, E_n = n")

    psi0 = eigenfunction_eval(FamilyId.H_OSC, osc, CONSTANT, 0, x)
    assert np.allclose(psi0, np.pi**-0.25 * np.exp(-x**2 / 2), atol=1e-9), "ψ_0 gaussien attendu"
    psi1 = eigenfunction_eval(FamilyId.H_OSC, osc, CONSTANT, 1, x)
    # premier lobe (x < 0) positif
    expected = -np.sqrt(2.0) * np.pi**-0.25 * x * np.exp(-x**2 / 2)
    assert np.allclose(psi1, expected, atol=1e-9), "ψ_1 attendu (premier lobe positif)"
    print("✓ ψ_0 et ψ_1 normalisés avec la convention de signe")

    coulomb = FamilyParams(coulomb_charge=1.0, l=0.0)
    assert abs(energy(FamilyId.L_COULOMB, coulomb, 1) - 0.375) < 1e-15, "E_1 Coulomb = 3/8"
    print("✓ Coulomb : E_1 = 0.375")


def test_bound_levels():
    """Test 2 : Niveaux liés maximaux"""
    print("\n" + "="*60)
    print("TEST 2 : Niveaux liés")
    print("="*60)

    cases = [
        (FamilyId.J1_SCARF2, FamilyParams(s=3.0, lam=1.0), 2),
        (FamilyId.J1_GPT, FamilyParams(s=4.0, lam=6.0), 3),
        (FamilyId.J2_ROSEN_MORSE, FamilyParams(s=3.0, lam=0.0), 2),
        (FamilyId.J2_ECKART, FamilyParams(s=2.0, lam=12.0), 1),
        (FamilyId.L_MORSE, FamilyParams(s=2.5), 2),
        (FamilyId.H_OSC, FamilyParams(), UNBOUNDED),
        (FamilyId.J2_COT, FamilyParams(s=-2.0, lam=1.0), UNBOUNDED),
    ]
    for family, params, expected in cases:
        top = validate_params(family, params)
        assert top == expected, f"{family.value} : niveau max {top} au lieu de {expected}"
        print(f"✓ {family.value:15s} : niveau max {top}")

    assert energy(FamilyId.J2_ECKART, FamilyParams(s=2.0, lam=12.0), 1) == 7.5, "E_1 Eckart = 7.5"
    try:
        energy(FamilyId.J2_ECKART, FamilyParams(s=2.0, lam=12.0), 2)
        assert False, "LevelError attendue"
    except LevelError:
        print("✓ Niveau non lié rejeté")

    for family, params in ((FamilyId.J2_ECKART, FamilyParams(s=2.0, lam=3.0)),
                           (FamilyId.J2_COT, FamilyParams(s=1.0, lam=1.0)),
                           (FamilyId.J1_GPT, FamilyParams(s=2.0, lam=2.2))):
        try:
            validate_params(family, params)
            assert False, f"{family.value} {params} devrait être rejeté"
        except InvalidParameterError:
            pass
    print("✓ Paramètres sans état lié rejetés")


def test_normalization_and_orthogonality():
    """Test 3 : Normalisation et orthogonalité en x"""
    print("\n" + "="*60)
    print("TEST 3 : Normalisation et orthogonalité")
    print("="*60)

    cases = [
        (FamilyId.H_OSC, FamilyParams(omega=1.0), RATIONAL),
        (FamilyId.J1_TRIG_CSC, FamilyParams(s=3.0, lam=1.0), INVERSE),
        (FamilyId.L_COULOMB, FamilyParams(coulomb_charge=1.0, l=1.0), TANH),
    ]
    for family, params, profile in cases:
        sols = [solve_level(family, params, profile, n) for n in range(3)]
        lo = mu_invert(profile, min(s.mu_support[0] for s in sols))
        hi = mu_invert(profile, max(s.mu_support[1] for s in sols))
        for i, a in enumerate(sols):
            for j, b in enumerate(sols[: i + 1]):
                value = quad(lambda x: a.psi(x) * b.psi(x), lo, hi, limit=400, epsabs=1e-11)[0]
                target = 1.0 if i == j else 0.0
                assert abs(value - target) < 1e-6, f"{family.value} ⟨ψ_{i}, ψ_{j}⟩ = {value}"
        print(f"✓ {family.value:15s} ({profile.kind.value}) : ⟨ψ_i, ψ_j⟩ = δ_ij")


def test_complex_collapse():
    """Test 4 : Effondrement complexe -> réel"""
    print("\n" + "="*60)
    print("TEST 4 : Effondrement complexe")
    print("="*60)

    cases = [
        (FamilyId.J1_SCARF2, FamilyParams(s=4.0, lam=1.0), RATIONAL),
        (FamilyId.J2_COT, FamilyParams(s=-2.0, lam=1.0), INVERSE),
        (FamilyId.J2_TAN, FamilyParams(s=-2.0, lam=1.0), INVERSE),
    ]
    for family, params, profile in cases:
        for n in range(4):
            solution = solve_level(family, params, profile, n)
            assert solution.imaginary_residual <= 1e-10, \
                f"{family.value} n={n} : résidu imaginaire {solution.imaginary_residual:.2e}"
            assert np.isfinite(solution.norm) and solution.norm > 0, "Norme invalide"
        print(f"✓ {family.value:15s} : |Im ψ|/max|ψ| ≤ 1e-10 pour n ≤ 3")


def test_potential_includes_vm():
    """Test 5 : V(x) = V_famille(μ(x)) + V_m(x)"""
    print("\n" + "="*60)
    print("TEST 5 : Potentiel avec V_m")
    print("="*60)

    params = FamilyParams(omega=1.0)
    x = np.linspace(-3, 3, 13)
    mu = mu_eval(RATIONAL, x)
    expected = -0.5 + 0.5 * mu**2 + vm_eval(RATIONAL, x)
    assert np.allclose(potential_eval(FamilyId.H_OSC, params, RATIONAL, x), expected, atol=1e-14), \
        "Décomposition du potentiel incorrecte"
    print("✓ V = V_famille(μ) + V_m")

    paper = MassProfile(MassKind.INVERSE_QUADRATIC, b=2.0, mu_convention=MuConvention.PAPER)
    potential_eval(FamilyId.H_OSC, params, paper, 0.5)
    try:
        solve_level(FamilyId.H_OSC, params, paper, 0)
        assert False, "NotApplicableError attendue"
    except NotApplicableError:
        print("✓ Fonctions propres réservées à la convention continue")


def test_nodes_and_oracle_index():
    """Test 6 : Nœuds attendus et rang dans le spectre discret"""
    print("\n" + "="*60)
    print("TEST 6 : Nœuds")
    print("="*60)

    assert [expected_nodes(FamilyId.H_OSC, n) for n in range(4)] == [0, 1, 2, 3], "n nœuds attendus"
    assert [expected_nodes(FamilyId.H_SQRT, n) for n in range(6)] == [0, 0, 1, 1, 2, 2], "⌊n/2⌋ attendu"
    assert oracle_index(FamilyId.H_SQRT, 3) == 1 and oracle_index(FamilyId.H_SQRT, 5) == 2, "Rangs impairs"
    try:
        oracle_index(FamilyId.H_SQRT, 2)
        assert False, "NotApplicableError attendue"
    except NotApplicableError:
        print("✓ H_SQRT : niveaux pairs hors Dirichlet")

    x = np.linspace(-8, 8, 4001)
    for n in range(4):
        psi = eigenfunction_eval(FamilyId.H_OSC, FamilyParams(), RATIONAL, n, x)
        signs = np.sign(psi[np.abs(psi) > 1e-10])
        nodes = int(np.count_nonzero(signs[1:] != signs[:-1]))
        assert nodes == n, f"ψ_{n} a {nodes} nœuds"
    print("✓ ψ_n a n nœuds (oscillateur, rational_square)")


def test_domains_and_truncation():
    """Test 7 : Domaines en μ et en x, troncature par l'image de μ"""
    print("\n" + "="*60)
    print("TEST 7 : Domaines")
    print("="*60)

    assert family_domain(FamilyId.J1_TRIG_CSC, FamilyParams(s=3.0, lam=1.0)) == (0.0, np.pi), "(0, π/a)"
    lo, hi = x_domain_for(FamilyId.J1_TRIG_CSC, FamilyParams(s=3.0, lam=1.0), INVERSE)
    assert lo == 0.0 and abs(hi - np.sqrt(2.0) * np.sinh(np.pi)) < 1e-9, f"Domaine en x ({lo}, {hi})"
    print(f"✓ J1_TRIG_CSC / inverse_quadratic : x ∈ ({lo}, {hi:.6f})")

    alpha, beta = polynomial_params(FamilyId.J1_SCARF2, FamilyParams(s=3.0, lam=1.0), 0)
    assert alpha == np.conj(beta) and alpha.real == -3.5, "Paramètres conjugués attendus"
    print("✓ Paramètres polynomiaux de Scarf conjugués")

    # image bornée (-4, 4) : les niveaux hauts de l'oscillateur ne tiennent pas
    narrow = MassProfile(MassKind.EXP_ABS, b=0.5)
    top = validate_params(FamilyId.H_OSC, FamilyParams(omega=4.0), narrow)
    assert 0 <= top < 60, f"Troncature attendue, obtenu {top}"
    try:
        solve_level(FamilyId.H_OSC, FamilyParams(omega=4.0), narrow, top + 1)
        assert False, "LevelError attendue au-delà de la troncature"
    except LevelError:
        print(f"✓ exp_abs b=0.5 : oscillateur ω=4 tronqué au niveau {top}")


def run_all_tests():
    """Lance tous les tests"""
    print("\n" + "🧪"*30)
    print("LANCEMENT DES TESTS DU COMPOSANT SOLVABLEFAMILIES")
    print("🧪"*30)

    tests = [
        test_constant_mass_textbook_forms,
        test_bound_levels,
        test_normalization_and_orthogonality,
        test_complex_collapse,
        test_potential_includes_vm,
        test_nodes_and_oracle_index,
        test_domains_and_truncation,
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
