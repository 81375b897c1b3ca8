"""
Tests de métricas
Hausdorff, distancia invariante por rotaciones, distancia de clusters,
EMD de isosets y métrica escalada
"""

import itertools
import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from modules.errors import DimensionMismatch, EmptyInput, InvalidRadius, RadiusMismatch, SizeMismatch
from modules.clusters import Cluster, alpha_cluster
from modules.lattice import packing_radius, random_orthogonal
from modules.metrics import (
    amd_distance, approximation_factor, bottleneck_distance_finite, cluster_distance,
    directed_hausdorff, directed_rotation_distance, hausdorff, isoset_distance, max_min_directed_distance,
    rotation_invariant_distance, sample_sphere, scaled_invariant_distance,
)
from tests.oracles import bottleneck_exhaustive, cluster_distance_sweep, symmetric_sweep
from tests.sample_sets import (
    CASES, SQRT2, SQRT3, hexagonal_lattice, integer_lattice, perturbed, random_set,
    rotation_2d, square_lattice,
)

ROOT2_MINUS_1 = SQRT2 - 1.0


def _lattice_clusters(alpha: float = 2.0):
    return alpha_cluster(square_lattice(), 0, alpha), alpha_cluster(hexagonal_lattice(), 0, alpha)


# =============================================================================
# HAUSDORFF
# =============================================================================

def test_directed_hausdorff_simple():
    C = [[0.0, 0.0], [3.0, 0.0]]
    D = [[0.0, 0.0]]
    assert directed_hausdorff(C, D) == pytest.approx(3.0)
    assert directed_hausdorff(D, C) == pytest.approx(0.0)
    assert hausdorff(C, D) == pytest.approx(3.0)


def test_hausdorff_errors():
    with pytest.raises(EmptyInput):
        directed_hausdorff(np.zeros((0, 2)), [[0.0, 0.0]])
    with pytest.raises(DimensionMismatch):
        directed_hausdorff([[0.0, 0.0]], [[0.0, 0.0, 0.0]])


def test_sample_sphere_norms():
    for dim in (1, 2, 3):
        samples = sample_sphere(2.0, dim, count=100)
        assert np.allclose(np.linalg.norm(samples, axis=1), 2.0)


def test_unrotated_hausdorff_with_boundary_samples():
    """C(Λ₄,0;2) y C(Λ₆,0;2) con la frontera muestreada: d_H = √(2−√3)"""
    square, hexagonal = _lattice_clusters()
    boundary = sample_sphere(2.0, 2)
    C = np.vstack([square.points, boundary])
    D = np.vstack([hexagonal.points, boundary])
    assert directed_hausdorff(C, D) == pytest.approx(math.sqrt(2.0 - SQRT3), abs=1e-3)


# =============================================================================
# DISTANCIA INVARIANTE POR ROTACIONES
# =============================================================================

def test_approximation_factor():
    assert approximation_factor(1, 0.0) == 1.0
    assert approximation_factor(2, 0.0) == 2.0
    assert approximation_factor(3, 0.1) == pytest.approx(4.4)


def test_rotation_invariant_distance_rotated_copy():
    rng = np.random.default_rng(4)
    points = alpha_cluster(random_set(rng, dim=3, max_motif=2), 0, 2.0).points
    moved = points @ random_orthogonal(3, rng).T
    result = rotation_invariant_distance(points, moved)
    assert result.value == pytest.approx(0.0, abs=1e-6)
    assert result.factor == approximation_factor(3)


def test_rotation_invariant_distance_upper_bound():
    """El valor es una cota superior del mínimo real"""
    square, hexagonal = _lattice_clusters(1.0)
    result = rotation_invariant_distance(square, hexagonal)
    assert result.value >= 0.0
    assert result.value <= hausdorff(square, hexagonal) + 1e-12


def _random_cluster(rng, dim: int = 2, alpha: float = 1.6) -> np.ndarray:
    return alpha_cluster(random_set(rng, dim=dim, max_motif=3), 0, alpha).points


def test_rotation_invariant_distance_envelope():
    """barrido denso − paso ≤ valor ≤ η · barrido en pares 2D aleatorios"""
    rng = np.random.default_rng(31)
    step = 1e-3
    for case in range(CASES):
        C = _random_cluster(rng)
        if case % 2:
            D = C @ rotation_2d(rng.uniform(0.0, 2.0 * math.pi)).T + rng.normal(scale=0.03, size=C.shape)
        else:
            D = _random_cluster(rng)
        oracle = symmetric_sweep(C, D, step)
        result = rotation_invariant_distance(C, D)
        reach = max(np.linalg.norm(C, axis=1).max(), np.linalg.norm(D, axis=1).max())
        assert result.value >= oracle - step * reach - 1e-9
        assert result.value <= result.factor * oracle + 1e-9


def test_directed_rotation_distance_returns_map():
    """El mapa devuelto es ortogonal y alcanza el valor; nunca supera la versión simétrica"""
    rng = np.random.default_rng(8)
    for dim in (2, 3):
        C = _random_cluster(rng, dim)
        moved = C @ random_orthogonal(dim, rng).T
        value, matrix = directed_rotation_distance(C, moved)
        assert value == pytest.approx(0.0, abs=1e-6)
        assert directed_hausdorff(C @ matrix.T, moved) <= 1e-6

        D = _random_cluster(rng, dim)
        value, matrix = directed_rotation_distance(C, D)
        assert np.allclose(matrix @ matrix.T, np.eye(dim), atol=1e-9)
        assert directed_hausdorff(C @ matrix.T, D) == pytest.approx(value, abs=1e-9)
        assert value <= rotation_invariant_distance(C, D).value + 1e-12


@pytest.mark.parametrize("dim", [2, 3])
def test_refine_never_increases_value(dim):
    """El ajuste local parte del mejor mapa candidato y solo acepta mejoras"""
    rng = np.random.default_rng(40 + dim)
    for _ in range(max(2, CASES // 2)):
        C, D = _random_cluster(rng, dim), _random_cluster(rng, dim)
        plain, _ = directed_rotation_distance(C, D, refine=False)
        refined, matrix = directed_rotation_distance(C, D, refine=True)
        assert refined <= plain + 1e-12
        assert np.allclose(matrix @ matrix.T, np.eye(dim), atol=1e-9)
        assert directed_hausdorff(C @ matrix.T, D) == pytest.approx(refined, abs=1e-9)

        symmetric_plain = rotation_invariant_distance(C, D, refine=False).value
        assert rotation_invariant_distance(C, D, refine=True).value <= symmetric_plain + 1e-12


# =============================================================================
# DISTANCIA DE CLUSTERS
# =============================================================================

def test_cluster_distance_square_vs_hexagonal():
    """√2−1 ≤ d_C ≤ η(√2−1) y el barrido denso da √2−1"""
    square, hexagonal = _lattice_clusters()
    result = cluster_distance(square, hexagonal)
    assert ROOT2_MINUS_1 - 1e-9 <= result.value <= result.factor * ROOT2_MINUS_1 + 1e-9
    assert result.lower <= ROOT2_MINUS_1 + 1e-9
    oracle = cluster_distance_sweep(square.points, hexagonal.points, 2.0, step=1e-4)
    assert oracle == pytest.approx(ROOT2_MINUS_1, abs=1e-3)


def test_max_min_rotational_subcluster():
    """{(0,1),(1,1),(−1,1),(0,2)} frente a C(Λ₆,0;2) con α = 2"""
    C = [[0.0, 1.0], [1.0, 1.0], [-1.0, 1.0], [0.0, 2.0]]
    _, hexagonal = _lattice_clusters()
    result = max_min_directed_distance(C, hexagonal, 2.0)
    assert result.value == pytest.approx(ROOT2_MINUS_1, abs=1e-9)
    slack, first = result.terms[0]
    assert slack == pytest.approx(1.0)
    assert first == pytest.approx(0.0, abs=1e-9), "El primer término es min{2−1, 0} = 0"


def test_max_min_same_cluster():
    square, _ = _lattice_clusters()
    assert max_min_directed_distance(square, square, 2.0).value == pytest.approx(0.0, abs=1e-12)


def test_max_min_radius_too_small():
    with pytest.raises(InvalidRadius):
        max_min_directed_distance([[0.0, 3.0]], [[0.0, 0.0]], 2.0)


@pytest.mark.parametrize("delta", [0.01, 0.05])
def test_cluster_distance_1d_lattices(delta):
    """[C(ℤ,0;2+2δ)] frente a [C((1+δ)ℤ,0;2+2δ)] → 2δ"""
    alpha = 2.0 + 2.0 * delta
    C = alpha_cluster(integer_lattice(), 0, alpha)
    D = alpha_cluster(integer_lattice(1.0 + delta), 0, alpha)
    assert cluster_distance(C, D).value == pytest.approx(2.0 * delta, abs=1e-9)


def test_cluster_distance_identity_and_radius_mismatch():
    square, _ = _lattice_clusters()
    assert cluster_distance(square, square).value == 0.0
    with pytest.raises(RadiusMismatch):
        cluster_distance(square, alpha_cluster(square_lattice(), 0, 1.0))
    with pytest.raises(RadiusMismatch):
        cluster_distance(square.points, square)


def test_cluster_distance_symmetric():
    rng = np.random.default_rng(15)
    pset = random_set(rng, dim=2, max_motif=3)
    other = perturbed(pset, 0.05, rng)
    C, D = alpha_cluster(pset, 0, 1.5), alpha_cluster(other, 0, 1.5)
    assert cluster_distance(C, D).value == pytest.approx(cluster_distance(D, C).value, abs=1e-9)


def test_cluster_distance_triangle_inequality():
    """Desigualdad triangular del barrido denso y envolvente η del valor calculado"""
    rng = np.random.default_rng(32)
    alpha, step = 1.5, 1e-3
    tol = 3.0 * step * alpha
    for _ in range(max(3, CASES // 2)):
        pset = random_set(rng, dim=2, max_motif=2)
        others = (perturbed(pset, 0.05, rng), random_set(rng, dim=2, max_motif=2))
        clusters = [alpha_cluster(s, 0, alpha) for s in (pset, *others)]
        oracle = {}
        for i, j in itertools.combinations(range(3), 2):
            oracle[i, j] = oracle[j, i] = cluster_distance_sweep(clusters[i].points, clusters[j].points, alpha, step)
            result = cluster_distance(clusters[i], clusters[j])
            assert oracle[i, j] - tol <= result.value <= result.factor * oracle[i, j] + tol
        for a, b, c in itertools.permutations(range(3)):
            assert oracle[a, c] <= oracle[a, b] + oracle[b, c] + tol


# =============================================================================
# EMD DE ISOSETS
# =============================================================================

@pytest.mark.parametrize("delta", [0.01, 0.05])
def test_isoset_distance_1d_lattices(delta):
    """EMD(I(ℤ;α), I((1+δ)ℤ;α)) = 2δ en α = 2+2δ"""
    result = isoset_distance(integer_lattice(), integer_lattice(1.0 + delta), alpha=2.0 + 2.0 * delta)
    assert result.value == pytest.approx(2.0 * delta, abs=1e-9)
    assert result.radius == pytest.approx(2.0 + 2.0 * delta)
    assert result.flow.entries[0].flow == 1


def test_isoset_distance_isometric_copies():
    """EMD ≤ 1e−6 para copias isométricas aleatorias"""
    rng = np.random.default_rng(77)
    for _ in range(CASES):
        pset = random_set(rng, dim=2, max_motif=3)
        moved = pset.transformed(random_orthogonal(2, rng), rng.normal(size=2))
        assert isoset_distance(pset, moved).value <= 1e-6


def test_isoset_distance_continuity():
    """EMD calculada ≤ η · 2ε para perturbaciones aleatorias con ε ≤ 0.4 · r"""
    rng = np.random.default_rng(23)
    for _ in range(CASES):
        pset = random_set(rng, dim=2, max_motif=4)
        epsilon = rng.uniform(0.05, 0.4) * packing_radius(pset)
        result = isoset_distance(pset, perturbed(pset, epsilon, rng), delta=0.0)
        assert result.value <= result.factor * 2.0 * epsilon + 1e-9
        assert result.lower <= 2.0 * epsilon + 1e-9


def test_isoset_distance_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        isoset_distance(integer_lattice(), square_lattice())


# =============================================================================
# MÉTRICA ESCALADA Y OTRAS
# =============================================================================

def test_scaled_distance_homothetic_lattices():
    """Λ₄ y 2Λ₄ solo difieren en el doble diámetro: |2√2 − 4√2|"""
    result = scaled_invariant_distance(square_lattice(), square_lattice(2.0))
    assert result.value == pytest.approx(2.0 * SQRT2, abs=1e-6)


def test_scaled_distance_rotation_invariant():
    lattice = hexagonal_lattice()
    rotated = lattice.transformed(rotation_2d(0.4))
    assert scaled_invariant_distance(lattice, rotated).value == pytest.approx(0.0, abs=1e-6)


def test_bottleneck_matches_exhaustive():
    rng = np.random.default_rng(3)
    for _ in range(CASES):
        size = int(rng.integers(1, 6))
        A, B = rng.normal(size=(size, 2)), rng.normal(size=(size, 2))
        assert bottleneck_distance_finite(A, B) == pytest.approx(bottleneck_exhaustive(A, B), abs=1e-12)


def test_bottleneck_size_mismatch():
    with pytest.raises(SizeMismatch):
        bottleneck_distance_finite([[0.0, 0.0]], [[0.0, 0.0], [1.0, 1.0]])


def test_amd_distance_linf():
    assert amd_distance([1.0, 2.0, 3.0], [1.5, 2.0, 2.0]) == pytest.approx(1.0)


def test_cluster_from_points_distance_uses_radius():
    C = Cluster.from_points([[0.0, 0.0], [1.0, 0.0]], radius=2.0)
    D = Cluster.from_points([[0.0, 0.0], [1.2, 0.0]], radius=2.0)
    assert cluster_distance(C, D).value == pytest.approx(0.2, abs=1e-9)
