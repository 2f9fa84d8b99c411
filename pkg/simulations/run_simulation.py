"""
Script principal : données des figures V_m, vérification numérique et carte
d'ordonnancement écrites dans results/
"""

import sys
import os
import json
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.cli import EXIT_OK, main

import config


def _path(name):
    return os.path.join(config.RESULTS_DIR, name)


def _common():
    return ["--verbose"] if config.VERBOSE else []


def generate_figures():
    """Écrit les tables V_m des six figures"""
    print("\n" + "="*70)
    print(" "*24 + "DONNÉES DES FIGURES V_m")
    print("="*70)

    for figure_id in config.FIGURE_IDS:
        out = _path(f"{figure_id}.csv")
        main(["figure", "--id", figure_id, "--out", out] + _common())
        print(f"✓ {figure_id} → {out}")


def run_verification():
    """
    Vérifie chaque entrée de la suite contre le solveur par différences finies

    Returns:
        dict: Code de sortie par famille
    """
    print("\n" + "="*70)
    print(" "*22 + "VÉRIFICATION ANALYTIQUE / NUMÉRIQUE")
    print("="*70)

    status = {}
    for family, mass, b, params, levels in config.VERIFICATION_SUITE:
        out = _path(f"verify_{family}_{mass}.json")
        argv = ["verify", "--family", family, "--mass", mass, "--b", str(b),
                "--levels", levels, "--N", str(config.GRID_POINTS),
                "--workers", str(config.WORKERS), "--out", out]
        for key, value in params.items():
            argv += [f"--{key}", str(value)]
        code = main(argv + _common())
        status[family] = code

        with open(out, encoding="utf-8") as handle:
            reports = json.load(handle)
        mark = "✓" if code == EXIT_OK else "❌"
        print(f"\n{mark} {family} ({mass}, b={b})")
        for report in reports:
            if report["error"]:
                print(f"    n={report['n']} : {report['error']}")
            else:
                print(f"    n={report['n']} : E={report['E_analytic']:.6f}  "
                      f"|ΔE|={report['abs_err']:.2e}  ordre={report['convergence_order']:.2f}")
    return status


def run_ordering():
    """Carte V_eff imprimée / oracle / corrigée"""
    print("\n" + "="*70)
    print(" "*24 + "CARTE D'ORDONNANCEMENT")
    print("="*70)

    alpha, beta, gamma = config.ORDERING
    mass, b = config.ORDERING_MASS
    out = _path("ordering.csv")
    main(["ordering", "--alpha", str(alpha), "--beta", str(beta), "--gamma", str(gamma),
          "--mass", mass, "--b", str(b), f"--range={config.ORDERING_RANGE}",
          "--points", str(config.ORDERING_POINTS), "--out", out] + _common())
    print(f"✓ (α, β, γ) = {config.ORDERING} sur {mass} b={b} → {out}")


if __name__ == "__main__":
    os.makedirs(config.RESULTS_DIR, exist_ok=True)

    generate_figures()
    status = run_verification()
    run_ordering()

    failed = [family for family, code in status.items() if code != EXIT_OK]
    print("\n" + "="*70)
    if failed:
        print(f"⚠️ Vérification en échec : {', '.join(failed)}")
    else:
        print(" "*25 + "🎉 CAMPAGNE TERMINÉE 🎉")
    print("="*70)
    sys.exit(1 if failed else 0)
