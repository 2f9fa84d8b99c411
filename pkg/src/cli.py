"""
Composant 7: CLI (Interface en ligne de commande)
Sous-commandes families, eval, verify, vm, figure, ordering
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, fields

import numpy as np

from src.errors import (
    ConfigError,
    DomainError,
    LevelError,
    NumericError,
    PDMError,
    SingularityError,
)
from src.family_table import FAMILIES, FamilyId, FamilyParams
from src.mass_catalog import (
    MassKind,
    MassProfile,
    MuConvention,
    load_mass_table,
    vm_closed_eval,
    vm_eval,
)
from src.numeric_oracle import GridSpec, auto_grid, verify_family
from src.ordering_map import CSV_HEADER, OrderingParams, ordering_report
from src.solvable_families import (
    eigenfunction_eval,
    family_domain,
    potential_eval,
    validate_params,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFICATION = 3
EXIT_NUMERIC = 4

FLOAT_FORMAT = "%.17g"
FIGURE_POINTS = 1001

# id -> (profil, triplet de b, plage en x)
FIGURES = {
    "fig1a": (MassKind.RATIONAL_SQUARE, (0.5, 0.6, 0.7), (-4.0, 4.0)),
    "fig1b": (MassKind.RATIONAL_SQUARE, (2.5, 3.0, 3.5), (-4.0, 4.0)),
    "fig1c": (MassKind.RATIONAL_SQUARE, (9.0, 10.0, 11.0), (-4.0, 4.0)),
    "fig2": (MassKind.EXP_ABS, (0.4, 0.7, 1.0), (-4.0, 4.0)),
    "fig3": (MassKind.INVERSE_QUADRATIC, (2.0, 4.0, 6.0), (-10.0, 10.0)),
    "fig4": (MassKind.TANH_SHIFT, (0.15, 0.2, 0.3), (-20.0, 20.0)),
}
FIGURE_HEADER = "x,Vm_b1,Vm_b2,Vm_b3"


@dataclass(frozen=True)
class RunConfig:
    """
    Configuration d'une exécution

    Les valeurs viennent de --config (JSON) puis des drapeaux, qui priment.
    Les objets de domaine sont construits et validés avant tout calcul.
    """
    command: str
    family: str = None
    mass: str = "constant"
    b: float = 1.0
    mass_table: str = None
    mu_convention: str = MuConvention.CONTINUOUS.value
    s: float = 0.0
    lam: float = 0.0
    a: float = 1.0
    omega: float = 1.0
    l: float = 0.0
    charge: float = 1.0
    levels: str = "0..3"
    grid: str = None
    N: int = 4000
    range: str = "-4:4"
    points: int = 1001
    id: str = None
    alpha: float = -0.5
    beta: float = 0.0
    gamma: float = -0.5
    out: str = None
    format: str = "json"
    workers: int = 1
    verbose: bool = False

    @classmethod
    def from_args(cls, args):
        """Fusionne le fichier --config et les drapeaux explicites"""
        known = {f.name for f in fields(cls)} - {"command"}
        values = {}
        if getattr(args, "config", None):
            values.update(_read_config_file(args.config, known))
        for name, value in vars(args).items():
            if name in known and value is not None:
                values[name] = value
        try:
            return cls(command=args.command, **values)
        except TypeError as exc:
            raise ConfigError(f"Invalid configuration: {exc}") from exc

    def profile(self):
        try:
            convention = MuConvention(self.mu_convention)
            if self.mass == MassKind.CUSTOM_TABLE.value:
                if not self.mass_table:
                    raise ConfigError("--mass custom_table requires --mass-table PATH")
                return load_mass_table(self.mass_table, convention)
            return MassProfile(MassKind(self.mass), b=self.b, mu_convention=convention)
        except PDMError:
            raise
        except (ValueError, OSError) as exc:
            raise ConfigError(f"Invalid mass profile: {exc}") from exc

    def family_id(self):
        if self.family is None:
            raise ConfigError(f"Command '{self.command}' requires --family")
        try:
            return FamilyId(self.family)
        except ValueError as exc:
            raise ConfigError(f"Unknown family: {self.family}") from exc

    def params(self):
        return FamilyParams(s=float(self.s), lam=float(self.lam), a=float(self.a),
                            omega=float(self.omega), l=float(self.l),
                            coulomb_charge=float(self.charge))

    def level_list(self):
        return parse_levels(self.levels)

    def grid_spec(self):
        if self.grid is None:
            return None
        lo, hi, n = _split(self.grid, 3, "grid", "lo:hi:N")
        return GridSpec(float(lo), float(hi), int(n))

    def x_range(self):
        lo, hi = _split(self.range, 2, "range", "lo:hi")
        lo, hi = float(lo), float(hi)
        if not lo < hi:
            raise ConfigError(f"--range requires lo < hi, got {self.range}")
        return lo, hi

    def ordering(self):
        return OrderingParams(float(self.alpha), float(self.beta), float(self.gamma))


def _read_config_file(path, known):
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"Cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    data = {("lam" if key == "lambda" else key): value for key, value in data.items()}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")
    return data


def _split(text, count, name, shape):
    parts = str(text).split(":")
    if len(parts) != count:
        raise ConfigError(f"--{name} expects {shape}, got {text!r}")
    try:
        [float(part) for part in parts]
    except ValueError as exc:
        raise ConfigError(f"--{name} expects numbers, got {text!r}") from exc
    return parts


def parse_levels(text):
    """'0..3' -> [0, 1, 2, 3] ; '2' -> [2] ; '0,2,5' -> [0, 2, 5]"""
    text = str(text).strip()
    try:
        if ".." in text:
            first, last = (int(part) for part in text.split(".."))
            levels = list(range(first, last + 1))
        else:
            levels = [int(part) for part in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"--levels expects 'n..m' or a comma list, got {text!r}") from exc
    if not levels or min(levels) < 0:
        raise ConfigError(f"--levels must name nonnegative levels, got {text!r}")
    return levels


def _write_table(path, header, rows, footer=""):
    data = np.asarray(rows, dtype=float).reshape(-1, header.count(",") + 1)
    target = path if path else sys.stdout
    np.savetxt(target, data, fmt=FLOAT_FORMAT, delimiter=",", header=header,
               footer=footer, comments="")


def run_families(config):
    """Liste les familles, leur base polynomiale et leur domaine par défaut"""
    lines = []
    for family, definition in FAMILIES.items():
        lo, hi = family_domain(family, config.params())
        line = f"{family.value:15s} {definition.basis:8s} {definition.gmap_kind.value:14s} mu in ({lo:g}, {hi:g})"
        if definition.note:
            line += f"  [{definition.note}]"
        lines.append(line)
    text = "\n".join(lines) + "\n"
    if config.out:
        with open(config.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def run_figure(figure_id, out=None):
    """
    Données V_m des figures pour les triplets de b des légendes

    Args:
        figure_id (str): fig1a, fig1b, fig1c, fig2, fig3 ou fig4
        out (str): Chemin du CSV (stdout si None)

    Returns:
        ndarray: Colonnes x, Vm_b1, Vm_b2, Vm_b3
    """
    if figure_id not in FIGURES:
        raise ConfigError(f"Unknown figure id {figure_id!r}, expected one of {sorted(FIGURES)}")
    kind, triple, (lo, hi) = FIGURES[figure_id]
    x = np.linspace(lo, hi, FIGURE_POINTS)
    columns = [x] + [vm_closed_eval(MassProfile(kind, b=b), x) for b in triple]
    table = np.column_stack(columns)
    _write_table(out, FIGURE_HEADER, table)
    return table


def run_figure_command(config):
    run_figure(config.id, config.out)
    return EXIT_OK


def run_vm(config):
    """V_m fermé (si disponible) et numérique sur une plage"""
    profile = config.profile()
    lo, hi = config.x_range()
    x = np.linspace(lo, hi, int(config.points))
    numeric = vm_eval(profile, x)
    if profile.kind in (MassKind.CONSTANT, MassKind.CUSTOM_TABLE):
        _write_table(config.out, "x,Vm", np.column_stack([x, numeric]))
    else:
        closed = vm_closed_eval(profile, x)
        _write_table(config.out, "x,Vm_closed,Vm_numeric", np.column_stack([x, closed, numeric]))
    return EXIT_OK


def _check_levels(family, params, profile, levels):
    top = validate_params(family, params, profile)
    beyond = [n for n in levels if n > top]
    if beyond:
        raise LevelError(f"Levels {beyond} exceed the highest bound level {top} of {family.value}")


def run_eval(config):
    """
    Échantillonne V, V_m et ψ_n sur la grille

    Les points singuliers sont omis et comptés dans une ligne finale.
    """
    family = config.family_id()
    params = config.params()
    profile = config.profile()
    levels = config.level_list()
    _check_levels(family, params, profile, levels)

    grid = config.grid_spec() or auto_grid(family, params, profile, levels, config.N)
    rows = []
    skipped = 0
    for x in grid.points():
        try:
            row = [x, potential_eval(family, params, profile, x), vm_eval(profile, x)]
            row += [eigenfunction_eval(family, params, profile, n, x) for n in levels]
        except (SingularityError, DomainError):
            skipped += 1
            continue
        if not np.all(np.isfinite(row)):
            skipped += 1
            continue
        rows.append(row)

    if skipped:
        logger.warning("Skipped %d singular grid points for %s", skipped, family.value)
    header = "x,V,Vm," + ",".join(f"psi{n}" for n in levels)
    footer = f"# skipped {skipped} singular rows" if skipped else ""
    _write_table(config.out, header, rows, footer)
    return EXIT_OK


VERIFY_CSV_FIELDS = (
    "family", "params_digest", "n", "E_analytic", "E_numeric", "abs_err", "rel_err",
    "residual_norm", "residual_excluded", "nodes_expected", "nodes_found", "orthogonality_max",
    "convergence_order", "grid_x_lo", "grid_x_hi", "grid_N", "error",
)


def _verify_csv_row(report):
    data = report.to_dict()
    grid = data.pop("grid") or {}
    data.update({f"grid_{key}": grid.get(key) for key in ("x_lo", "x_hi", "N")})
    return ",".join("" if data[key] is None else
                    (format(data[key], ".17g") if isinstance(data[key], float) else str(data[key]))
                    for key in VERIFY_CSV_FIELDS)


def run_verify(config):
    """
    Rapports de vérification par niveau (JSON ou CSV)

    Returns:
        int: 0 si tous les niveaux passent, 4 si une erreur numérique, 3 sinon
    """
    family = config.family_id()
    params = config.params()
    profile = config.profile()
    levels = config.level_list()
    validate_params(family, params, profile)

    reports = verify_family(family, params, profile, levels, N=int(config.N),
                            grid=config.grid_spec(), workers=int(config.workers))

    if config.format == "csv":
        text = ",".join(VERIFY_CSV_FIELDS) + "\n" + "".join(_verify_csv_row(r) + "\n" for r in reports)
    else:
        text = json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
    if config.out:
        with open(config.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)

    for report in reports:
        mark = "✓" if report.passed else "❌"
        logger.info("%s %s n=%d abs_err=%s", mark, report.family, report.n, report.abs_err)
    if any(r.error and r.error.startswith(NumericError.__name__) for r in reports):
        return EXIT_NUMERIC
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFICATION


def run_ordering(config):
    """Carte V_eff imprimée / oracle / corrigée avec V ≡ 0"""
    ordering = config.ordering()
    profile = config.profile()
    lo, hi = config.x_range()
    xs = np.linspace(lo, hi, int(config.points))
    rows = ordering_report(ordering, profile, lambda x: 0.0 * np.asarray(x, dtype=float), xs)
    table = [[r["x"], r["veff_paper_minus_V"], r["veff_oracle"], r["veff_corrected_minus_V"],
              float(r["flag"])] for r in rows]
    _write_table(config.out, CSV_HEADER, table)
    return EXIT_OK


def build_parser():
    """Construit le parseur argparse et ses sous-commandes"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Fichier JSON de configuration (les drapeaux priment)")
    common.add_argument("--out", help="Fichier de sortie (stdout par défaut)")
    common.add_argument("--verbose", action="store_true", default=None, help="Journalisation DEBUG")

    mass = argparse.ArgumentParser(add_help=False)
    mass.add_argument("--mass", choices=[k.value for k in MassKind])
    mass.add_argument("--b", type=float)
    mass.add_argument("--mass-table", dest="mass_table", help="CSV x,m pour custom_table")
    mass.add_argument("--mu-convention", dest="mu_convention", choices=[c.value for c in MuConvention])

    family = argparse.ArgumentParser(add_help=False)
    family.add_argument("--family", choices=[f.value for f in FamilyId])
    family.add_argument("--s", type=float)
    family.add_argument("--lambda", dest="lam", type=float)
    family.add_argument("--a", type=float)
    family.add_argument("--omega", type=float)
    family.add_argument("--l", type=float)
    family.add_argument("--charge", type=float)
    family.add_argument("--levels", help="Niveaux, ex. 0..3")
    family.add_argument("--grid", help="Grille lo:hi:N (automatique par défaut)")
    family.add_argument("--N", type=int, help="Points intérieurs de la grille automatique")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--range", help="Plage lo:hi")
    sampling.add_argument("--points", type=int)

    parser = argparse.ArgumentParser(prog="pdm", description="Familles exactement solubles à masse variable")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("families", parents=[common], help="Liste des familles")
    sub.add_parser("eval", parents=[common, mass, family], help="V, V_m et ψ_n sur une grille")
    verify = sub.add_parser("verify", parents=[common, mass, family], help="Vérification par différences finies")
    verify.add_argument("--format", choices=["json", "csv"])
    verify.add_argument("--workers", type=int)
    sub.add_parser("vm", parents=[common, mass, sampling], help="V_m fermé et numérique")
    figure = sub.add_parser("figure", parents=[common], help="Données des figures V_m")
    figure.add_argument("--id", choices=sorted(FIGURES))
    ordering = sub.add_parser("ordering", parents=[common, mass, sampling], help="Carte d'ordonnancement")
    ordering.add_argument("--alpha", type=float)
    ordering.add_argument("--beta", type=float)
    ordering.add_argument("--gamma", type=float)
    return parser


COMMANDS = {
    "families": run_families,
    "eval": run_eval,
    "verify": run_verify,
    "vm": run_vm,
    "figure": run_figure_command,
    "ordering": run_ordering,
}


def main(argv=None):
    """
    Point d'entrée

    Returns:
        int: 0 succès, 2 configuration invalide, 3 échec de vérification,
        4 erreur numérique
    """
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig.from_args(args)
        if config.verbose:
            logging.basicConfig(level=logging.DEBUG, format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[config.command](config)
    except NumericError as exc:
        print(f"❌ Numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PDMError as exc:
        print(f"❌ {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
