"""
Hiérarchie d'exceptions du simulateur PDM

Toutes les erreurs héritent de PDMError (elle-même une ValueError), ce qui
permet aux appelants d'attraper une seule classe.
"""


class PDMError(ValueError):
    """Erreur de base du paquet"""


class DomainError(PDMError):
    """Point hors du domaine de validité (profil de masse, famille, carte g)"""


class InvalidProfileError(PDMError):
    """Profil de masse invalide (masse non positive, table mal formée)"""


class RangeError(PDMError):
    """Valeur hors de l'image de μ"""


class NotApplicableError(PDMError):
    """Opération non définie pour ce type de profil ou de famille"""


class DegenerateError(PDMError):
    """Cas dégénéré (ex. b = 1 : V_m identiquement nul)"""


class InvalidParameterError(PDMError):
    """Paramètres violant une contrainte stricte"""


class PrecisionError(PDMError):
    """Degré polynomial au-delà de la borne de précision"""


class DegenerateParameterError(PDMError):
    """Les deux développements hypergéométriques de Jacobi sont dégénérés"""


class SingularityError(PDMError):
    """Évaluation sur un point singulier"""


class LevelError(PDMError):
    """Niveau n hors de la plage des états liés"""


class NumericError(PDMError):
    """Échec du solveur numérique"""


class InvalidInputError(PDMError):
    """Entrée vide ou trop courte"""


class GridPlacementError(PDMError):
    """Potentiel non fini sur un point de grille"""


class InconsistentExtractionError(PDMError):
    """La différence d'opérateurs n'est pas multiplicative"""


class InternalConsistencyError(PDMError):
    """Partie imaginaire résiduelle trop grande après fixation de phase"""


class ConfigError(PDMError):
    """Configuration CLI invalide"""
