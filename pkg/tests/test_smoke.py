"""
Smoke tests para Isoset Toolkit
Verifica que todos los módulos cargan y las funciones básicas funcionan
"""
import os
import sys
from pathlib import Path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


def test_imports():
    """Test que todos los módulos se pueden importar"""
    errors = []

    # Modules
    try:
        from modules.lattice import Lattice, PeriodicSet, points_in_ball, cell_geometry
    except Exception as e:
        errors.append(f"lattice: {e}")

    try:
        from modules.clusters import alpha_cluster, bridge_length, min_stable_radius, isotree
    except Exception as e:
        errors.append(f"clusters: {e}")

    try:
        from modules.congruence import cluster_isometry, symmetry_group, isoset, isometric
    except Exception as e:
        errors.append(f"congruence: {e}")

    try:
        from modules.metrics import cluster_distance, isoset_distance, scaled_invariant_distance
    except Exception as e:
        errors.append(f"metrics: {e}")

    try:
        from modules.pdd import pdd, amd, pdd_distance, check_lower_bound
    except Exception as e:
        errors.append(f"pdd: {e}")

    try:
        from modules.crystal_io import parse_crystal, read_crystal, load_directory
    except Exception as e:
        errors.append(f"crystal_io: {e}")

    try:
        from modules.scanner import scan
        from modules.excel_report import generate_scan_excel
    except Exception as e:
        errors.append(f"scanner: {e}")

    # Utils
    try:
        from utils.validation import parse_number, safe_float, validate_cell_angles
        from utils.config import get_settings
        from utils.formatting import format_distance, format_weight
    except Exception as e:
        errors.append(f"utils: {e}")

    if errors:
        print("❌ Import errors:")
        for err in errors:
            print(f"  - {err}")
    assert not errors, "; ".join(errors)
    print("✅ All imports successful")


def test_validation_functions():
    """Test funciones de validación"""
    from utils.validation import (
        parse_number, safe_float, safe_int, safe_divide, clamp,
        validate_cell_lengths, validate_cell_angles, reduce_fractional,
        sanitize_filename, sanitize_identifier,
    )

    assert parse_number("1.2345(6)") == 1.2345, "Incertidumbre CIF"
    assert parse_number("1e-3") == 0.001
    assert parse_number("?") is None
    assert parse_number(float("nan")) is None
    assert safe_float("abc", 1.5) == 1.5
    assert safe_int("7.9") == 7
    assert safe_divide(1, 0, default=-1) == -1
    assert clamp(5, 0, 1) == 1
    assert validate_cell_lengths([1.0, 2.0]) == []
    assert len(validate_cell_lengths([0.0, "x"])) == 2
    assert validate_cell_angles([90.0]) == []
    assert len(validate_cell_angles([0.0, 180.0])) == 2
    assert reduce_fractional(1.25) == 0.25
    assert reduce_fractional(-0.0) == 0.0
    assert sanitize_filename('a<b>:c') == "abc"
    assert sanitize_identifier("  Na Cl  ") == "Na_Cl"
    assert sanitize_identifier(None) == "crystal"
    print("✅ Validation functions OK")


def test_config():
    """Test carga de configuración y overrides del entorno"""
    from utils.config import Settings, load_settings

    settings = load_settings(use_env=False)
    assert settings.tau_geom == 1e-9
    assert settings.default_k == 12
    assert settings.refine_rotations is False

    os.environ["ISOSET_SCAN_WORKERS"] = "8"
    try:
        assert load_settings().scan_workers == 8
    finally:
        del os.environ["ISOSET_SCAN_WORKERS"]

    missing = load_settings(path=Path(__file__).parent / "no_existe.yaml", use_env=False)
    assert missing == Settings()
    print("✅ Config OK")


def test_formatting():
    """Test formateo de distancias y pesos"""
    from fractions import Fraction
    from utils.formatting import format_distance, format_weight, format_order, format_approx, truncate_text

    assert format_distance(None) == "N/A"
    assert format_distance(float("inf")) == "∞"
    assert format_distance(0.41421356) == "0.414214"
    assert format_weight(Fraction(4, 5)) == "4/5"
    assert format_order(float("inf")) == "∞ (continuo)"
    assert format_order(12) == "12"
    assert "η" in format_approx(0.4, 2.0)
    assert truncate_text("abcdef", 4).endswith("...")
    print("✅ Formatting OK")


def test_square_lattice_pipeline():
    """Test de extremo a extremo sobre Λ₄"""
    import numpy as np
    from modules.lattice import PeriodicSet
    from modules.clusters import min_stable_radius
    from modules.congruence import isoset
    from modules.pdd import amd

    lattice = PeriodicSet.from_lattice(np.eye(2))
    alpha = min_stable_radius(lattice)
    assert abs(alpha - 2.0) < 1e-9
    assert len(isoset(lattice, alpha)) == 1
    assert np.allclose(amd(lattice, 4), 1.0)
    print("✅ Square lattice pipeline OK")


def run_all_tests():
    """Ejecuta todos los tests"""
    print("\n" + "="*50)
    print("🧪 ISOSET TOOLKIT - SMOKE TESTS")
    print("="*50 + "\n")

    tests = [
        ("Imports", test_imports),
        ("Validation Functions", test_validation_functions),
        ("Config", test_config),
        ("Formatting", test_formatting),
        ("Square Lattice Pipeline", test_square_lattice_pipeline),
    ]

    results = []
    for name, test in tests:
        try:
            test()
            results.append((name, True))
        except AssertionError as e:
            print(f"❌ {name}: {e}")
            results.append((name, False))

    print("\n" + "="*50)
    print("📊 RESULTADOS")
    print("="*50)

    passed = sum(1 for _, r in results if r)
    total = len(results)

    for name, result in results:
        status = "✅" if result else "❌"
        print(f"  {status} {name}")

    print(f"\n  Total: {passed}/{total} tests passed")
    print("="*50 + "\n")

    return passed == total


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
