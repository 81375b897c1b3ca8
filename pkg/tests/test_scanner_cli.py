"""
Tests del scanner de duplicados, el informe Excel y el CLI
"""

import json
import math
import os
import sys

import numpy as np
import pandas as pd
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from cli import main
from modules.crystal_io import crystal_from_set, load_directory, write_crystal
from modules.excel_report import generate_scan_excel, get_excel_filename
from modules.lattice import PeriodicSet, packing_radius
from modules.scanner import VERDICT_DISTINCT, VERDICT_ISOMETRIC, VERDICT_NEAR, amd_matrix, scan
from tests.sample_sets import (
    SQRT2, hexagonal_lattice, integer_lattice, perturbed, random_set, rotation_2d, square_lattice,
)


def _base_set() -> PeriodicSet:
    return PeriodicSet.from_cartesian([[1.0, 0.3], [0.0, 1.2]], [[0.0, 0.0], [0.45, 0.55]])


def _write(directory, name, pset):
    return write_crystal(crystal_from_set(pset, name), directory / f"{name}.json")


# =============================================================================
# SCANNER
# =============================================================================

def test_scan_rotated_copy_is_isometric():
    """S y S girado 30° se marcan como isométricos"""
    S = _base_set()
    report = scan([("s", S), ("s_rot", S.transformed(rotation_2d(math.pi / 6), [0.1, 0.2]))], k=8, workers=1)
    assert len(report.pairs) == 1
    pair = report.pairs[0]
    assert pair.verdict == VERDICT_ISOMETRIC
    assert pair.isoset_emd <= 1e-6
    assert report.stage_counts() == {"pairs": 1, "amd": 1, "pdd": 1, "isometric": 1}


def test_scan_small_perturbation_is_near_duplicate():
    """Perturbación ε = 0.001: casi duplicado con EMD ≤ 2εη"""
    rng = np.random.default_rng(10)
    S = _base_set()
    report = scan([("s", S), ("s_eps", perturbed(S, 0.001, rng))], k=8, workers=1)
    pair = report.pairs[0]
    assert pair.verdict == VERDICT_NEAR
    assert pair.isoset_emd <= 2.0 * 0.001 * pair.factor + 1e-9
    assert report.flagged() == [pair]


def test_scan_distinct_sets_stop_early():
    """Λ₄ y Λ₆ no pasan el filtro AMD"""
    report = scan([("lam4", square_lattice()), ("lam6", hexagonal_lattice())], k=12, workers=2)
    pair = report.pairs[0]
    assert pair.verdict == VERDICT_DISTINCT
    assert pair.pdd_emd is None and pair.isoset_emd is None
    assert pair.amd_linf > 0.1


def test_scan_pair_order_and_dimension_filter():
    crystals = [("a", square_lattice()), ("b", integer_lattice()), ("c", square_lattice(1.001))]
    report = scan(crystals, k=4, workers=3)
    assert [(p.id_a, p.id_b) for p in report.pairs] == [("a", "b"), ("a", "c"), ("b", "c")]
    assert report.pairs[0].verdict == VERDICT_DISTINCT
    assert report.pairs[1].verdict == VERDICT_NEAR


def test_scan_report_outputs():
    report = scan([("lam4", square_lattice()), ("lam6", hexagonal_lattice())], k=12, workers=1)
    data = report.to_json()
    assert data["schema"] == "isoset-scan/1"
    assert data["thresholds"]["amd"] == report.amd_threshold
    assert data["counts"][VERDICT_DISTINCT] == 1
    df = report.to_dataframe()
    assert list(df.columns) == ["id_a", "id_b", "amd_linf", "pdd_emd", "isoset_emd", "factor", "verdict"]


def test_scan_single_crystal():
    assert scan([("only", square_lattice())], k=4).pairs == []


def test_amd_matrix_symmetric():
    matrix = amd_matrix([("lam4", square_lattice()), ("lam6", hexagonal_lattice())], k=12)
    assert matrix.loc["lam4", "lam6"] == matrix.loc["lam6", "lam4"]
    assert matrix.loc["lam4", "lam4"] == 0.0
    assert matrix.loc["lam4", "lam6"] == pytest.approx(SQRT2 - 1.0, abs=1e-9)


def test_generate_scan_excel():
    S = _base_set()
    report = scan([("s", S), ("s_rot", S.transformed(rotation_2d(0.5)))], k=6, workers=1)
    sheets = pd.read_excel(generate_scan_excel(report, "demo"), sheet_name=None)
    assert "Resumen" in sheets and "AMD" in sheets
    assert "Duplicados" in sheets
    assert get_excel_filename("demo set").startswith("isoset_scan_")


def _scan_results_page():
    import streamlit as st
    from components.scan_panel import render_scan_results

    render_scan_results(st.session_state["scan_report"])


def test_scan_results_toggle_survives_rerun():
    """El informe guardado en session_state se vuelve a pintar al cambiar el toggle"""
    from streamlit.testing.v1 import AppTest

    crystals = [
        ("lam4", square_lattice()),
        ("lam4_rot", square_lattice().transformed(rotation_2d(0.3))),
        ("lam6", hexagonal_lattice()),
    ]
    at = AppTest.from_function(_scan_results_page, default_timeout=30)
    at.session_state["scan_report"] = scan(crystals, k=6, workers=1)
    at.run()
    assert not at.exception
    assert len(at.dataframe[0].value) == 1

    at.toggle(key="scan_only_flagged").set_value(False).run()
    assert not at.exception
    assert len(at.dataframe[0].value) == 3


# =============================================================================
# CLI
# =============================================================================

def test_cli_dist_pdd(tmp_path, capsys):
    """dist lam4 lam6 --metric pdd --k 12 → √2−1"""
    a = _write(tmp_path, "lam4", square_lattice())
    b = _write(tmp_path, "lam6", hexagonal_lattice())
    assert main(["dist", str(a), str(b), "--metric", "pdd", "--k", "12"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["metric"] == "pdd"
    assert data["value"] == pytest.approx(SQRT2 - 1.0, abs=1e-9)


def test_cli_dist_isoset_1d(tmp_path, capsys):
    a = _write(tmp_path, "z", integer_lattice())
    b = _write(tmp_path, "z101", integer_lattice(1.01))
    assert main(["dist", str(a), str(b), "--metric", "isoset"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["factor"] == 1.0
    assert "flow" not in data


def test_cli_invariant(tmp_path, capsys):
    path = _write(tmp_path, "lam4", square_lattice())
    assert main(["invariant", str(path), "--k", "4"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["alpha"] == pytest.approx(2.0)
    assert data["symmetry_orders"] == [8]
    assert data["amd"] == pytest.approx([1.0, 1.0, 1.0, 1.0])


def test_cli_invariant_csv(tmp_path, capsys):
    path = _write(tmp_path, "lam4", square_lattice())
    assert main(["invariant", str(path), "--k", "2", "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("weight,d1,d2")
    assert out.split("\r\n")[-2] == "AMD,1,1"


def test_cli_isotree_and_bound(tmp_path, capsys):
    z = _write(tmp_path, "z", integer_lattice())
    z101 = _write(tmp_path, "z101", integer_lattice(1.01))
    assert main(["isotree", str(z), "--max-radius", "2"]) == 0
    tree = json.loads(capsys.readouterr().out)
    assert tree["id"] == "z"
    assert tree["partitions"][0] == [[0]]

    assert main(["bound", str(z), str(z101), "--alpha", "2.02"]) == 0
    bound = json.loads(capsys.readouterr().out)
    assert bound["k"] == 2
    assert bound["holds"] is True


def test_cli_scan_deterministic(tmp_path):
    """Dos ejecuciones producen el mismo JSON"""
    crystals = tmp_path / "crystals"
    crystals.mkdir()
    S = _base_set()
    _write(crystals, "s", S)
    _write(crystals, "s_rot", S.transformed(rotation_2d(math.pi / 6)))
    _write(crystals, "lam6", hexagonal_lattice())

    outputs = []
    for run in range(2):
        out = tmp_path / f"scan_{run}.json"
        assert main(["scan", str(crystals), "--k", "8", "--no-progress", "--output", str(out)]) == 0
        outputs.append(out.read_text(encoding="utf-8"))
    assert outputs[0] == outputs[1]
    data = json.loads(outputs[0])
    assert data["crystals"] == ["lam6", "s", "s_rot"]
    assert data["counts"][VERDICT_ISOMETRIC] == 1


def test_scan_corpus_keeps_every_close_pair(tmp_path):
    """Corpus de 20 ficheros: las copias isométricas y las perturbaciones pequeñas pasan AMD y PDD"""
    rng = np.random.default_rng(2024)
    families = {}
    for f in range(4):
        base = random_set(rng, dim=2, max_motif=3)
        epsilon = 1e-3 * packing_radius(base)
        members = {
            "base": base,
            "rot": base.transformed(rotation_2d(rng.uniform(0.0, 2.0 * math.pi)), rng.normal(size=2)),
            "super": base.supercell([2, 1]),
            "eps_a": perturbed(base, epsilon, rng),
            "eps_b": perturbed(base, epsilon, rng),
        }
        for name, pset in members.items():
            _write(tmp_path, f"f{f}_{name}", pset)
            families[f"f{f}_{name}"] = f

    documents = load_directory(tmp_path)
    assert len(documents) == 20
    report = scan([(d.id, d.to_periodic_set()) for d in documents], k=8, workers=2)
    assert report.stage_counts()["pairs"] == 190

    exact = {"base", "rot", "super"}
    for pair in report.pairs:
        if pair.verdict == VERDICT_ISOMETRIC:
            assert pair.amd_linf < report.amd_threshold
            assert pair.pdd_emd < report.pdd_threshold
        if families[pair.id_a] != families[pair.id_b]:
            continue
        assert pair.isoset_emd is not None, f"{pair.id_a} / {pair.id_b} descartado por un filtro"
        kinds = {pair.id_a.split("_", 1)[1], pair.id_b.split("_", 1)[1]}
        if kinds <= exact:
            assert pair.verdict == VERDICT_ISOMETRIC
        else:
            assert pair.verdict in (VERDICT_ISOMETRIC, VERDICT_NEAR)



def test_cli_scan_exports(tmp_path):
    crystals = tmp_path / "crystals"
    crystals.mkdir()
    _write(crystals, "lam4", square_lattice())
    _write(crystals, "lam4b", square_lattice().transformed(rotation_2d(0.3)))
    csv_path, excel_path = tmp_path / "pairs.csv", tmp_path / "scan.xlsx"
    code = main(["scan", str(crystals), "--no-progress", "--output", str(tmp_path / "scan.json"),
                 "--csv", str(csv_path), "--excel", str(excel_path)])
    assert code == 0
    assert pd.read_csv(csv_path)["verdict"].tolist() == [VERDICT_ISOMETRIC]
    assert excel_path.stat().st_size > 0


def test_cli_exit_codes(tmp_path):
    """0 correcto, 1 error de entrada, 2 flags inválidos"""
    good = _write(tmp_path, "lam4", square_lattice())
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["dist", str(good), str(bad)]) == 1
    assert main(["dist", str(good), str(tmp_path / "missing.json")]) == 1
    assert main(["dist", str(good), str(good), "--k", "0"]) == 2
    assert main(["unknown"]) == 2
    assert main(["dist", str(good), str(good), "--metric", "amd", "--k", "3"]) == 0
