"""
Crystal I/O
Lectura y escritura de cristales: JSON nativo ("isoset-crystal/1") y un
subconjunto mínimo de CIF (celda + coordenadas fraccionarias)
"""

import json
import re
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from utils.validation import parse_number, reduce_fractional, sanitize_identifier
from .errors import InvalidCell, ParseError
from .lattice import Lattice, PeriodicSet, lattice_from_parameters

logger = logging.getLogger(__name__)

SCHEMA = "isoset-crystal/1"

CIF_TAGS: Dict[str, List[str]] = {
    "cell_lengths": ["_cell_length_a", "_cell_length_b", "_cell_length_c"],
    "cell_angles": ["_cell_angle_alpha", "_cell_angle_beta", "_cell_angle_gamma"],
    "fract": ["_atom_site_fract_x", "_atom_site_fract_y", "_atom_site_fract_z"],
    "label": ["_atom_site_label", "_atom_site_type_symbol"],
}

SUPPORTED_SUFFIXES = (".json", ".cif")


@dataclass
class CrystalDocument:
    """
    Cristal validado.

    La celda viene dada por parámetros (longitudes + ángulos en grados) o
    por una base explícita (lista de vectores). El motivo está en
    coordenadas fraccionarias reducidas a [0, 1).
    """
    id: str
    motif: List[List[float]]
    lengths: Optional[List[float]] = None
    angles: Optional[List[float]] = None
    basis: Optional[List[List[float]]] = None
    labels: Optional[List[str]] = None
    source_format: str = "json"

    @property
    def dim(self) -> int:
        if self.basis is not None:
            return len(self.basis)
        return len(self.lengths or [])

    def lattice(self) -> Lattice:
        if self.basis is not None:
            return Lattice(np.asarray(self.basis, dtype=float).T)
        return lattice_from_parameters(self.lengths, self.angles or [])

    def to_periodic_set(self) -> PeriodicSet:
        return PeriodicSet(self.lattice(), np.asarray(self.motif, dtype=float), self.labels)

    def to_json_dict(self) -> dict:
        data: dict = {"schema": SCHEMA, "id": self.id}
        if self.basis is not None:
            data["basis"] = self.basis
        else:
            data["cell"] = {"lengths": self.lengths, "angles": self.angles or []}
        data["motif"] = self.motif
        if self.labels is not None:
            data["labels"] = self.labels
        return data


# =============================================================================
# HELPERS
# =============================================================================

def _number(value, field_name: str, line: Optional[int] = None) -> float:
    parsed = parse_number(value)
    if parsed is None:
        raise ParseError(f"'{value}' no es un número válido", line=line, field=field_name)
    return parsed


def _reduce_motif(doc_id: str, motif: List[List[float]]) -> List[List[float]]:
    reduced = []
    for point in motif:
        row = []
        for value in point:
            r = reduce_fractional(value)
            if r != value:
                logger.warning(f"[CrystalIO] {doc_id}: coordenada fraccionaria {value} reducida a {r}")
            row.append(r)
        reduced.append(row)
    return reduced


def _validate(doc: CrystalDocument) -> CrystalDocument:
    """Comprueba dimensiones y construye la celda una vez"""
    n = doc.dim
    if not 1 <= n <= 3:
        raise ParseError(f"Dimensión {n} no soportada", field="cell")
    if not doc.motif:
        raise ParseError("El motivo está vacío", field="motif")
    for i, point in enumerate(doc.motif):
        if len(point) != n:
            raise ParseError(f"El punto {i} tiene {len(point)} coordenadas, se esperan {n}", field="motif")
    if doc.labels is not None and len(doc.labels) != len(doc.motif):
        raise ParseError(f"{len(doc.labels)} etiquetas para {len(doc.motif)} puntos", field="labels")
    if doc.basis is not None:
        try:
            doc.lattice()
        except ValueError as e:
            raise InvalidCell(str(e)) from e
    else:
        doc.lattice()
    doc.motif = _reduce_motif(doc.id, doc.motif)
    return doc


# =============================================================================
# JSON
# =============================================================================

def _parse_json(text: str, name: Optional[str]) -> CrystalDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"JSON inválido: {e.msg}", line=e.lineno) from e
    if not isinstance(data, dict):
        raise ParseError("Se esperaba un objeto JSON")

    schema = data.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ParseError(f"Esquema no soportado: {schema}", field="schema")

    doc_id = sanitize_identifier(data.get("id") or name)

    motif_raw = data.get("motif")
    if not isinstance(motif_raw, list) or not motif_raw:
        raise ParseError("Falta el motivo o está vacío", field="motif")
    motif = []
    for i, point in enumerate(motif_raw):
        point = point if isinstance(point, list) else [point]
        motif.append([_number(v, f"motif[{i}]") for v in point])

    lengths = angles = basis = None
    if "basis" in data:
        rows = data["basis"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ParseError("La base debe ser una lista de vectores", field="basis")
        basis = [[_number(v, f"basis[{i}]") for v in row] for i, row in enumerate(rows)]
    elif "cell" in data:
        cell = data["cell"]
        if not isinstance(cell, dict) or "lengths" not in cell:
            raise ParseError("La celda requiere 'lengths'", field="cell")
        lengths = [_number(v, "cell.lengths") for v in cell["lengths"]]
        angles = [_number(v, "cell.angles") for v in cell.get("angles", [])]
    else:
        raise ParseError("Falta 'cell' o 'basis'", field="cell")

    labels = data.get("labels")
    if labels is not None:
        labels = [str(label) for label in labels]

    return _validate(CrystalDocument(
        id=doc_id, motif=motif, lengths=lengths, angles=angles, basis=basis,
        labels=labels, source_format="json",
    ))


# =============================================================================
# CIF (SUBCONJUNTO)
# =============================================================================

# Una comilla solo abre/cierra cadena junto a espacio o borde de línea
_CIF_TOKEN_RE = re.compile(r"""'(.*?)'(?=\s|$)|"(.*?)"(?=\s|$)|(\S+)""")


def _tokens(line: str, line_no: int) -> List[str]:
    tokens = []
    for match in _CIF_TOKEN_RE.finditer(line):
        single, double, bare = match.groups()
        if bare is None:
            tokens.append(single if single is not None else double)
            continue
        if bare.startswith("#"):
            break
        if bare[0] in "'\"":
            raise ParseError(f"Línea CIF mal formada: comilla sin cerrar en {bare}", line=line_no)
        tokens.append(bare)
    return tokens


def _parse_cif(text: str, name: Optional[str]) -> CrystalDocument:
    values: Dict[str, tuple] = {}
    loops: List[tuple] = []
    block_id = None
    lines = text.splitlines()
    i = 0

    while i < len(lines):
        line_no = i + 1
        stripped = lines[i].strip()
        i += 1
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith(";"):
            # campo de texto multilínea: se ignora
            while i < len(lines) and not lines[i].startswith(";"):
                i += 1
            i += 1
            continue
        lowered = stripped.lower()
        if lowered.startswith("data_"):
            if block_id is not None:
                logger.warning(f"[CrystalIO] Varios bloques data_, se usa '{block_id}'")
                break
            block_id = stripped[5:]
            continue
        if lowered == "loop_":
            tags = []
            while i < len(lines) and lines[i].strip().startswith("_"):
                tags.append(lines[i].strip().split()[0].lower())
                i += 1
            tokens, start = [], i + 1
            while i < len(lines):
                row = lines[i].strip()
                low = row.lower()
                if row.startswith("_") or low == "loop_" or low.startswith("data_"):
                    break
                if row and not row.startswith("#"):
                    tokens.extend(_tokens(row, i + 1))
                i += 1
            if tags and len(tokens) % len(tags):
                raise ParseError(
                    f"El bucle tiene {len(tokens)} valores para {len(tags)} columnas",
                    line=start, field=tags[0],
                )
            loops.append((tags, tokens, start))
            continue
        if stripped.startswith("_"):
            parts = _tokens(stripped, line_no)
            tag = parts[0].lower()
            if len(parts) > 1:
                values[tag] = (parts[1], line_no)
            elif i < len(lines):
                nxt = _tokens(lines[i].strip(), i + 1)
                values[tag] = (nxt[0] if nxt else "", i + 1)
                i += 1

    def cell_value(tag: str) -> float:
        if tag not in values:
            raise ParseError("Falta el parámetro de celda", field=tag)
        raw, line = values[tag]
        if raw in ("?", "."):
            raise ParseError("Parámetro de celda desconocido", line=line, field=tag)
        return _number(raw, tag, line)

    lengths = [cell_value(t) for t in CIF_TAGS["cell_lengths"]]
    angles = [cell_value(t) for t in CIF_TAGS["cell_angles"]]

    site_loop = next((lp for lp in loops if all(t in lp[0] for t in CIF_TAGS["fract"])), None)
    if site_loop is None:
        raise ParseError("No hay bucle con _atom_site_fract_x/y/z", field="_atom_site_fract_x")
    tags, tokens, start = site_loop
    width = len(tags)
    columns = [tags.index(t) for t in CIF_TAGS["fract"]]
    label_column = next((tags.index(t) for t in CIF_TAGS["label"] if t in tags), None)

    motif, labels = [], []
    for r in range(len(tokens) // width):
        row = tokens[r * width:(r + 1) * width]
        motif.append([_number(row[c], tags[c], start + r) for c in columns])
        if label_column is not None:
            labels.append(row[label_column])

    doc_id = sanitize_identifier(block_id or name)
    return _validate(CrystalDocument(
        id=doc_id, motif=motif, lengths=lengths, angles=angles,
        labels=labels if label_column is not None else None, source_format="cif",
    ))


# =============================================================================
# API
# =============================================================================

def parse_crystal(text: str, name: Optional[str] = None, fmt: Optional[str] = None) -> CrystalDocument:
    """
    Parsea un cristal en JSON o CIF.

    Args:
        text: Contenido del fichero
        name: Identificador por defecto (p.ej. nombre del fichero)
        fmt: "json" o "cif" (por defecto se detecta)

    Returns:
        CrystalDocument validado

    Raises:
        ParseError: formato o campos inválidos (con línea/campo)
        InvalidCell: celda no positiva o ángulos fuera de rango
    """
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "cif"
    if fmt == "json":
        return _parse_json(text, name)
    if fmt == "cif":
        return _parse_cif(text, name)
    raise ParseError(f"Formato desconocido: {fmt}")


def serialize_crystal(doc: CrystalDocument) -> str:
    """JSON nativo; parse → serialize → parse conserva los bits del motivo"""
    return json.dumps(doc.to_json_dict(), indent=2, ensure_ascii=False)


def crystal_from_set(pset: PeriodicSet, doc_id: str) -> CrystalDocument:
    """Documento con base explícita a partir de un PeriodicSet"""
    return CrystalDocument(
        id=sanitize_identifier(doc_id),
        motif=pset.motif.tolist(),
        basis=pset.lattice.vectors.tolist(),
        labels=list(pset.labels) if pset.labels else None,
    )


def read_crystal(path: Union[str, Path]) -> CrystalDocument:
    """Lee un fichero .json o .cif"""
    path = Path(path)
    fmt = "cif" if path.suffix.lower() == ".cif" else "json"
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"{path.name}: no se puede leer ({e.strerror})") from e
    try:
        return parse_crystal(text, name=path.stem, fmt=fmt)
    except ParseError as e:
        raise ParseError(f"{path.name}: {e.detail}", line=e.line, field=e.field) from e


def write_crystal(doc: CrystalDocument, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(serialize_crystal(doc) + "\n", encoding="utf-8")
    return path


def load_directory(path: Union[str, Path]) -> List[CrystalDocument]:
    """
    Carga todos los *.json y *.cif de un directorio, en orden de nombre.

    Raises:
        ParseError: directorio inexistente o algún fichero inválido
    """
    directory = Path(path)
    if not directory.is_dir():
        raise ParseError(f"{directory} no es un directorio")
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() in SUPPORTED_SUFFIXES)
    documents = [read_crystal(p) for p in files]
    logger.info(f"[CrystalIO] {len(documents)} cristales cargados de {directory}")
    return documents
