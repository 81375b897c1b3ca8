"""
Tests de lectura/escritura de cristales
JSON nativo, subconjunto CIF, errores con línea/campo y directorios
"""

import json
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from modules.errors import InvalidCell, ParseError
from modules.crystal_io import (
    SCHEMA, crystal_from_set, load_directory, parse_crystal, read_crystal,
    serialize_crystal, write_crystal,
)
from modules.lattice import min_interpoint_distance
from tests.sample_sets import s2


LAM4_JSON = """{
  "schema": "isoset-crystal/1",
  "id": "lam4",
  "cell": {"lengths": [1.0, 1.0], "angles": [90.0]},
  "motif": [[0.0, 0.0]]
}"""

S2_JSON = json.dumps({
    "id": "s2",
    "basis": [[10.0, 0.0], [0.0, 10.0]],
    "motif": [[0.2, 0.2], [0.2, 0.8], [0.8, 0.2], [0.8, 0.8], [0.5, 0.5]],
})

NACL_CIF = """# sal común
data_nacl
_cell_length_a    5.640(2)
_cell_length_b    5.640(2)
_cell_length_c    5.640(2)
_cell_angle_alpha 90
_cell_angle_beta  90
_cell_angle_gamma 90
loop_
_atom_site_label
_atom_site_fract_x
_atom_site_fract_y
_atom_site_fract_z
Na1 0.0 0.0 0.0
Cl1 0.5 0.5 0.5
"""


# =============================================================================
# JSON
# =============================================================================

def test_parse_json_cell_parameters():
    doc = parse_crystal(LAM4_JSON)
    assert doc.id == "lam4"
    assert doc.dim == 2
    assert doc.source_format == "json"
    pset = doc.to_periodic_set()
    assert np.allclose(pset.lattice.basis, np.eye(2))
    assert min_interpoint_distance(pset) == pytest.approx(1.0)


def test_parse_json_explicit_basis():
    pset = parse_crystal(S2_JSON).to_periodic_set()
    assert pset.size == 5
    assert np.allclose(pset.cartesian_motif, s2().cartesian_motif)


def test_parse_json_id_defaults_to_name():
    text = '{"cell": {"lengths": [2.0]}, "motif": [[0.0], [0.5]]}'
    doc = parse_crystal(text, name="my crystal")
    assert doc.id == "my_crystal"
    assert doc.dim == 1


def test_fractional_coordinates_reduced():
    """1.5 se reduce a 0.5"""
    text = '{"id": "z", "cell": {"lengths": [1.0]}, "motif": [[1.5]]}'
    assert parse_crystal(text).motif == [[0.5]]


def test_json_roundtrip_preserves_bits():
    """parse → serialize → parse conserva el motivo bit a bit"""
    first = parse_crystal(S2_JSON)
    text = serialize_crystal(first)
    second = parse_crystal(text)
    assert second.motif == first.motif
    assert serialize_crystal(second) == text
    assert json.loads(text)["schema"] == SCHEMA


def test_crystal_from_set_roundtrip():
    pset = s2()
    doc = parse_crystal(serialize_crystal(crystal_from_set(pset, "s2")))
    assert np.allclose(doc.to_periodic_set().lattice.basis, pset.lattice.basis)
    assert np.array_equal(doc.to_periodic_set().motif, pset.motif)


def test_malformed_json_reports_line():
    text = '{\n  "id": "x",\n  "motif": oops\n}'
    with pytest.raises(ParseError) as excinfo:
        parse_crystal(text, fmt="json")
    assert excinfo.value.line == 3


@pytest.mark.parametrize("text,field", [
    ('{"cell": {"lengths": [1.0]}}', "motif"),
    ('{"motif": [[0.0]]}', "cell"),
    ('{"cell": {"lengths": [1.0, 1.0], "angles": [90]}, "motif": [[0.0]]}', "motif"),
    ('{"cell": {"lengths": ["abc"]}, "motif": [[0.0]]}', "cell.lengths"),
    ('{"schema": "other/2", "cell": {"lengths": [1.0]}, "motif": [[0.0]]}', "schema"),
])
def test_json_errors_report_field(text, field):
    with pytest.raises(ParseError) as excinfo:
        parse_crystal(text)
    assert excinfo.value.field == field


@pytest.mark.parametrize("cell", [
    {"lengths": [1.0, -2.0], "angles": [90.0]},
    {"lengths": [1.0, 1.0], "angles": [190.0]},
])
def test_invalid_cell(cell):
    text = json.dumps({"id": "bad", "cell": cell, "motif": [[0.0, 0.0]]})
    with pytest.raises(InvalidCell):
        parse_crystal(text)


# =============================================================================
# CIF
# =============================================================================

def test_parse_cif_subset():
    doc = parse_crystal(NACL_CIF, name="ignored")
    assert doc.id == "nacl"
    assert doc.source_format == "cif"
    assert doc.labels == ["Na1", "Cl1"]
    assert doc.lengths == pytest.approx([5.64, 5.64, 5.64])
    pset = doc.to_periodic_set()
    assert pset.dim == 3 and pset.size == 2
    assert min_interpoint_distance(pset) == pytest.approx(5.64 * np.sqrt(3.0) / 2.0)


def test_cif_bad_number_reports_line_and_tag():
    text = NACL_CIF.replace("_cell_length_b    5.640(2)", "_cell_length_b    abc")
    with pytest.raises(ParseError) as excinfo:
        parse_crystal(text, fmt="cif")
    assert excinfo.value.line == 4
    assert excinfo.value.field == "_cell_length_b"


def test_cif_unknown_value_rejected():
    text = NACL_CIF.replace("_cell_angle_beta  90", "_cell_angle_beta  ?")
    with pytest.raises(ParseError) as excinfo:
        parse_crystal(text)
    assert excinfo.value.field == "_cell_angle_beta"


def test_cif_without_sites():
    text = NACL_CIF.split("loop_")[0]
    with pytest.raises(ParseError) as excinfo:
        parse_crystal(text)
    assert excinfo.value.field == "_atom_site_fract_x"


def test_cif_primed_and_quoted_labels():
    """C1' es una etiqueta válida sin comillas; 'Cl 1' es una cadena con espacio"""
    text = NACL_CIF.replace("Na1 0.0", "C1' 0.0").replace("Cl1 0.5", "'Cl 1' 0.5")
    text = text.replace("_cell_angle_gamma 90", "_cell_angle_gamma 90  # ortogonal")
    doc = parse_crystal(text)
    assert doc.labels == ["C1'", "Cl 1"]
    assert doc.angles == pytest.approx([90.0, 90.0, 90.0])
    assert doc.motif == [[0.0, 0.0, 0.0], [0.5, 0.5, 0.5]]


def test_cif_unclosed_quote_reports_line():
    text = NACL_CIF.replace("Na1 0.0", "'Na 1 0.0")
    with pytest.raises(ParseError) as excinfo:
        parse_crystal(text)
    assert excinfo.value.line == 14


def test_cif_ragged_loop():
    text = NACL_CIF + "Xx1 0.25 0.25\n"
    with pytest.raises(ParseError):
        parse_crystal(text)


# =============================================================================
# FICHEROS
# =============================================================================

def test_write_and_read_crystal(tmp_path):
    path = write_crystal(parse_crystal(LAM4_JSON), tmp_path / "lam4.json")
    doc = read_crystal(path)
    assert doc.id == "lam4"


def test_read_crystal_prefixes_file_name(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"cell": {"lengths": [1.0]}}', encoding="utf-8")
    with pytest.raises(ParseError) as excinfo:
        read_crystal(path)
    assert "bad.json" in str(excinfo.value)
    assert excinfo.value.field == "motif"


def test_read_missing_file(tmp_path):
    with pytest.raises(ParseError):
        read_crystal(tmp_path / "missing.json")


def test_load_directory_sorted(tmp_path):
    (tmp_path / "b.json").write_text(LAM4_JSON, encoding="utf-8")
    (tmp_path / "a.cif").write_text(NACL_CIF, encoding="utf-8")
    (tmp_path / "notes.txt").write_text("ignorado", encoding="utf-8")
    documents = load_directory(tmp_path)
    assert [d.id for d in documents] == ["nacl", "lam4"]


def test_load_directory_requires_directory(tmp_path):
    with pytest.raises(ParseError):
        load_directory(tmp_path / "nope")
