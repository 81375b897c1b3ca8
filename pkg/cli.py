"""
Isoset Toolkit - CLI
Invariantes, distancias, escaneo de duplicados e isotrees desde la terminal

Uso:
    python cli.py invariant lam4.json --k 12
    python cli.py dist lam4.json lam6.json --metric pdd --k 12
    python cli.py scan crystals/ --amd-threshold 0.01 --pdd-threshold 0.01
    python cli.py isotree s4.json --max-radius 1.5
    python cli.py bound z.json z101.json --alpha 2.02

Códigos de salida: 0 correcto, 1 error de entrada o de cálculo, 2 flags inválidos.
"""

import sys
import json
import logging
import argparse
from pathlib import Path
from typing import List, Optional

from utils.config import get_settings
from modules.errors import IsosetError
from modules.crystal_io import load_directory, read_crystal
from modules.lattice import cell_geometry
from modules.clusters import bridge_length, isotree, min_stable_radius, stable_radius_upper_bound
from modules.congruence import isoset, symmetry_group
from modules.metrics import amd_distance, isoset_distance, scaled_invariant_distance
from modules.pdd import amd, check_lower_bound, pdd, pdd_distance
from modules.scanner import scan
from modules.excel_report import generate_scan_excel

logger = logging.getLogger("isoset")

METRICS = ("amd", "pdd", "isoset", "scaled")


# =============================================================================
# ARGUMENTOS
# =============================================================================

def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{value}' no es un entero")
    if number < 1:
        raise argparse.ArgumentTypeError(f"se espera un entero ≥ 1, recibido {number}")
    return number


def _non_negative(value: str) -> float:
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{value}' no es un número")
    if number < 0:
        raise argparse.ArgumentTypeError(f"se espera un valor ≥ 0, recibido {number}")
    return number


def _alpha(value: str):
    return "auto" if value == "auto" else _non_negative(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isoset",
        description="Invariantes de isometría y métricas continuas para cristales periódicos",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="Más detalle en stderr (-v info, -vv debug)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariant", help="AMD, PDD e isoset de un cristal")
    p.add_argument("file", type=Path)
    p.add_argument("--k", type=_positive_int, default=None, help="Vecinos para AMD/PDD")
    p.add_argument("--alpha", type=_alpha, default="auto", help="Radio del isoset o 'auto' (mínimo estable)")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="csv imprime el PDD con una última fila AMD")

    p = sub.add_parser("dist", help="Distancia entre dos cristales")
    p.add_argument("file_a", type=Path)
    p.add_argument("file_b", type=Path)
    p.add_argument("--metric", choices=METRICS, default="pdd")
    p.add_argument("--k", type=_positive_int, default=None)
    p.add_argument("--delta", type=_non_negative, default=None, help="Holgura δ del factor η")

    p = sub.add_parser("scan", help="Pares casi duplicados en un directorio")
    p.add_argument("directory", type=Path)
    p.add_argument("--amd-threshold", type=_non_negative, default=None)
    p.add_argument("--pdd-threshold", type=_non_negative, default=None)
    p.add_argument("--k", type=_positive_int, default=None)
    p.add_argument("--delta", type=_non_negative, default=None)
    p.add_argument("--workers", type=_positive_int, default=None)
    p.add_argument("--output", type=Path, default=None, help="Fichero JSON (por defecto stdout)")
    p.add_argument("--csv", type=Path, default=None, help="Exportar pares a CSV")
    p.add_argument("--excel", type=Path, default=None, help="Exportar informe a Excel")
    p.add_argument("--no-progress", action="store_true")

    p = sub.add_parser("isotree", help="Isotree de un cristal en JSON")
    p.add_argument("file", type=Path)
    p.add_argument("--max-radius", type=_non_negative, default=None)

    p = sub.add_parser("bound", help="Comprueba EMD(PDD) ≤ EMD(isoset)")
    p.add_argument("file_a", type=Path)
    p.add_argument("file_b", type=Path)
    p.add_argument("--alpha", type=_non_negative, default=None)
    p.add_argument("--delta", type=_non_negative, default=None)

    return parser


# =============================================================================
# COMANDOS
# =============================================================================

def _emit(data: dict, path: Optional[Path] = None):
    text = json.dumps(data, indent=2, ensure_ascii=False)
    if path is None:
        print(text)
    else:
        path.write_text(text + "\n", encoding="utf-8")
        logger.info(f"[CLI] Escrito {path}")


def cmd_invariant(args) -> int:
    doc = read_crystal(args.file)
    pset = doc.to_periodic_set()
    matrix = pdd(pset, args.k)

    if args.format == "csv":
        sys.stdout.write(matrix.to_csv(include_amd=True))
        return 0

    bound = stable_radius_upper_bound(pset, bridge_length(pset))
    alpha = min_stable_radius(pset) if args.alpha == "auto" else args.alpha
    invariant = isoset(pset, alpha)
    orders = [symmetry_group(pset, i, alpha).order for i in range(pset.size)]

    _emit({
        "id": doc.id,
        "dim": pset.dim,
        "motif_size": pset.size,
        "volume": cell_geometry(pset).volume,
        "bridge_length": bound.beta,
        "stable_radius_upper_bound": bound.alpha_ub,
        "alpha": alpha,
        "amd": matrix.amd.tolist(),
        "pdd": matrix.to_json(),
        "isoset": invariant.to_json(),
        "class_count": len(invariant),
        "symmetry_orders": ["continuous" if o == float("inf") else int(o) for o in orders],
    })
    return 0


def cmd_dist(args) -> int:
    S = read_crystal(args.file_a).to_periodic_set()
    Q = read_crystal(args.file_b).to_periodic_set()

    result = {"metric": args.metric}
    if args.metric == "amd":
        k = args.k or get_settings().default_k
        result.update(k=k, value=amd_distance(amd(S, k), amd(Q, k)))
    elif args.metric == "pdd":
        k = args.k or get_settings().default_k
        result.update(k=k, value=pdd_distance(pdd(S, k), pdd(Q, k)))
    elif args.metric == "isoset":
        result.update(isoset_distance(S, Q, delta=args.delta).to_json())
    else:
        result.update(scaled_invariant_distance(S, Q, delta=args.delta).to_json())
    result.pop("flow", None)
    _emit(result)
    return 0


def cmd_scan(args) -> int:
    documents = load_directory(args.directory)
    crystals = [(doc.id, doc.to_periodic_set()) for doc in documents]
    report = scan(
        crystals,
        k=args.k,
        amd_threshold=args.amd_threshold,
        pdd_threshold=args.pdd_threshold,
        delta=args.delta,
        workers=args.workers,
        progress=not args.no_progress,
    )
    _emit(report.to_json(), args.output)

    if args.csv is not None:
        report.to_dataframe().to_csv(args.csv, index=False, lineterminator="\r\n")
        logger.info(f"[CLI] Escrito {args.csv}")
    if args.excel is not None:
        args.excel.write_bytes(generate_scan_excel(report, args.directory.name).getvalue())
        logger.info(f"[CLI] Escrito {args.excel}")
    return 0


def cmd_isotree(args) -> int:
    doc = read_crystal(args.file)
    tree = isotree(doc.to_periodic_set(), args.max_radius)
    data = {"id": doc.id}
    data.update(tree.to_json())
    _emit(data)
    return 0


def cmd_bound(args) -> int:
    S = read_crystal(args.file_a).to_periodic_set()
    Q = read_crystal(args.file_b).to_periodic_set()
    _emit(check_lower_bound(S, Q, delta=args.delta, alpha=args.alpha).to_json())
    return 0


COMMANDS = {
    "invariant": cmd_invariant,
    "dist": cmd_dist,
    "scan": cmd_scan,
    "isotree": cmd_isotree,
    "bound": cmd_bound,
}


def _configure_logging(verbose: int):
    level = get_settings().log_level.upper()
    if verbose == 1:
        level = "INFO"
    elif verbose > 1:
        level = "DEBUG"
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except IsosetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
