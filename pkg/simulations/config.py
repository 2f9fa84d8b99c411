"""
Configuration de la campagne de simulation
"""

# FIGURES V_m
FIGURE_IDS = ["fig1a", "fig1b", "fig1c", "fig2", "fig3", "fig4"]

# SUITE DE VÉRIFICATION
# (famille, profil de masse, b, paramètres, niveaux)
VERIFICATION_SUITE = [
    ("H_OSC", "rational_square", 2.0, {"omega": 1.0}, "0..3"),
    ("J1_TRIG_CSC", "inverse_quadratic", 2.0, {"s": 3.0, "lambda": 1.0}, "0..2"),
    ("J2_ROSEN_MORSE", "rational_square", 0.5, {"s": 4.0, "lambda": 1.0}, "0..2"),
    ("J2_ECKART", "tanh_shift", 0.5, {"s": 2.0, "lambda": 12.0}, "0..1"),
    ("L_RADIAL_OSC", "tanh_shift", 0.5, {"omega": 1.0, "l": 1.0}, "0..2"),
    ("L_MORSE", "rational_square", 2.0, {"s": 4.5}, "0..2"),
]
GRID_POINTS = 4000  # Points intérieurs de la grille automatique

# CARTE D'ORDONNANCEMENT
ORDERING = (-0.5, 0.0, -0.5)  # (α, β, γ), Zhu-Kroemer
ORDERING_MASS = ("inverse_quadratic", 2.0)
ORDERING_RANGE = "-5:5"
ORDERING_POINTS = 201

# SORTIES
RESULTS_DIR = "../results"
WORKERS = 2  # Processus pour la vérification

# AFFICHAGE
VERBOSE = False  # Journalisation DEBUG
