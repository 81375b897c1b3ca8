"""
Metrics
Distancias de Hausdorff, distancia invariante por rotaciones, distancia
de clusters tolerante a la frontera, EMD sobre isosets y métrica escalada

Convención de aproximación: el valor devuelto es una cota superior de la
distancia real y la real es ≥ value / η, con η = (n² − n + 2)/2 · (1 + δ).
"""

import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist
from scipy.spatial.transform import Rotation

from utils.config import get_settings
from .clusters import Cluster
from .congruence import (
    IsometryClass, cluster_isometry, common_stable_radius, frame_maps, isoset,
    match_isosets,
)
from .emd import FlowPlan, emd
from .errors import (
    DimensionMismatch, EmptyInput, InvalidRadius, NeighborCountMismatch,
    RadiusMismatch, SizeMismatch,
)
from .lattice import PeriodicSet, cell_geometry

logger = logging.getLogger(__name__)


@dataclass
class ApproxValue:
    """Distancia aproximada con su factor garantizado η"""
    value: float
    factor: float = 1.0
    radius: Optional[float] = None
    flow: Optional[FlowPlan] = None
    terms: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def lower(self) -> float:
        """Cota inferior value / η de la distancia real"""
        return self.value / self.factor

    def to_json(self) -> dict:
        data = {"value": self.value, "factor": self.factor, "lower_bound": self.lower}
        if self.radius is not None:
            data["radius"] = self.radius
        if self.flow is not None:
            data["flow"] = self.flow.to_json()
        return data


def approximation_factor(dim: int, delta: Optional[float] = None) -> float:
    """η = (n² − n + 2)/2 · (1 + δ)"""
    delta = get_settings().delta if delta is None else delta
    return (dim * dim - dim + 2) / 2.0 * (1.0 + delta)


def _points(cluster) -> np.ndarray:
    if isinstance(cluster, IsometryClass):
        cluster = cluster.representative
    if isinstance(cluster, Cluster):
        points = cluster.points
    else:
        points = np.asarray(cluster, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
    if points.size == 0:
        raise EmptyInput("Conjunto de puntos vacío")
    return points


def _check_dims(a: np.ndarray, b: np.ndarray):
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"Puntos {a.shape[1]}D y {b.shape[1]}D")


# =============================================================================
# HAUSDORFF
# =============================================================================

def directed_hausdorff(C, D) -> float:
    """
    d_H(C, D) = max_{p∈C} min_{q∈D} |p − q|.

    Raises:
        EmptyInput: algún conjunto vacío
    """
    a, b = _points(C), _points(D)
    _check_dims(a, b)
    distances, _ = cKDTree(b).query(a)
    return float(np.max(distances))


def hausdorff(C, D) -> float:
    """Hausdorff simétrico"""
    return max(directed_hausdorff(C, D), directed_hausdorff(D, C))


def sample_sphere(radius: float, dim: int, count: int = 720) -> np.ndarray:
    """
    Muestras de la esfera ∂B̄(0; radius).

    1D: los dos extremos; 2D: ángulos equiespaciados; 3D: espiral de
    Fibonacci.
    """
    if dim == 1:
        return np.array([[-radius], [radius]])
    if dim == 2:
        angles = np.arange(count) * (2.0 * math.pi / count)
        return radius * np.column_stack([np.cos(angles), np.sin(angles)])
    golden = math.pi * (3.0 - math.sqrt(5.0))
    k = np.arange(count) + 0.5
    z = 1.0 - 2.0 * k / count
    r = np.sqrt(1.0 - z * z)
    theta = golden * k
    return radius * np.column_stack([r * np.cos(theta), r * np.sin(theta), z])


# =============================================================================
# DISTANCIA INVARIANTE POR ROTACIONES
# =============================================================================

def _rotation_2d(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _reflection_2d(axis_angle_doubled: float) -> np.ndarray:
    c, s = math.cos(axis_angle_doubled), math.sin(axis_angle_doubled)
    return np.array([[c, s], [s, -c]])


class _RotationSearch:
    """
    Minimiza d_H(f(P), D) (y opcionalmente la dirección inversa) sobre
    los mapas que llevan anclas extremas de P sobre puntos de D.
    """

    def __init__(self, d_points: np.ndarray, symmetric: bool = False):
        self.d_points = d_points
        self.d_tree = cKDTree(d_points)
        self.d_norms = np.linalg.norm(d_points, axis=1)
        self.symmetric = symmetric
        self.tol = get_settings().tau_geom

    def evaluate(self, mapped: np.ndarray, bound: float = math.inf) -> float:
        forward, _ = self.d_tree.query(mapped, distance_upper_bound=bound)
        value = float(np.max(forward))
        if self.symmetric and value < bound:
            backward, _ = cKDTree(mapped).query(self.d_points, distance_upper_bound=bound)
            value = max(value, float(np.max(backward)))
        return value

    def _ordered(self, norm: float, best: float) -> List[int]:
        gaps = np.abs(self.d_norms - norm)
        order = np.argsort(gaps, kind="stable")
        return [int(q) for q in order if gaps[q] <= best and self.d_norms[q] > self.tol]

    def candidates(self, points: np.ndarray, best_ref: List[float]):
        """Genera matrices candidatas; best_ref[0] poda por diferencia de normas"""
        dim = points.shape[1]
        norms = np.linalg.norm(points, axis=1)
        i1 = int(np.argmax(norms))
        p1 = points[i1]

        if dim == 1:
            yield np.eye(1)
            yield -np.eye(1)
            return

        if norms[i1] <= self.tol:
            yield np.eye(dim)
            return

        if dim == 2:
            base = math.atan2(p1[1], p1[0])
            for q in self._ordered(norms[i1], best_ref[0]):
                target = math.atan2(self.d_points[q, 1], self.d_points[q, 0])
                yield _rotation_2d(target - base)
                yield _reflection_2d(target + base)
            return

        residual = points - np.outer(points @ p1, p1) / (norms[i1] ** 2)
        perp = np.linalg.norm(residual, axis=1)
        i2 = int(np.argmax(perp))
        for q1 in self._ordered(norms[i1], best_ref[0]):
            target1 = self.d_points[q1]
            if perp[i2] <= self.tol:
                yield from frame_maps(p1[np.newaxis, :], target1[np.newaxis, :], dim)
                continue
            source = np.vstack([p1, points[i2]])
            for q2 in self._ordered(norms[i2], best_ref[0]):
                target2 = self.d_points[q2]
                if q2 == q1 or np.linalg.norm(np.cross(target1, target2)) <= self.tol * norms[i1]:
                    continue
                yield from frame_maps(source, np.vstack([target1, target2]), dim)

    def search(self, points: np.ndarray, stop_below: float = -1.0, refine: bool = False,
               warm: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray]:
        dim = points.shape[1]
        best_ref = [math.inf]
        best_matrix = np.eye(dim)
        if warm is not None:
            best_ref[0] = self.evaluate(points @ warm.T)
            best_matrix = warm
            if best_ref[0] <= stop_below:
                return best_ref[0], best_matrix

        for matrix in self.candidates(points, best_ref):
            value = self.evaluate(points @ matrix.T, best_ref[0])
            if value < best_ref[0]:
                best_ref[0] = value
                best_matrix = matrix
                if value <= stop_below:
                    break

        if not math.isfinite(best_ref[0]):
            best_matrix = np.eye(dim)
            best_ref[0] = self.evaluate(points)

        if refine and dim > 1 and best_ref[0] > stop_below:
            best_ref[0], best_matrix = self._refine(points, best_ref[0], best_matrix)
        return best_ref[0], best_matrix

    def _refine(self, points: np.ndarray, best: float, matrix: np.ndarray) -> Tuple[float, np.ndarray]:
        """Ajuste local Nelder-Mead del mejor mapa; nunca empeora"""
        dim = points.shape[1]

        def build(params: np.ndarray) -> np.ndarray:
            if dim == 2:
                return _rotation_2d(float(params[0])) @ matrix
            return Rotation.from_rotvec(params).as_matrix() @ matrix

        def objective(params: np.ndarray) -> float:
            return self.evaluate(points @ build(params).T)

        start = np.zeros(1 if dim == 2 else 3)
        result = minimize(objective, start, method="Nelder-Mead",
                          options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400})
        if result.fun < best:
            logger.debug(f"[Rotation] Refinado {best:.6g} → {result.fun:.6g}")
            return float(result.fun), build(result.x)
        return best, matrix


def directed_rotation_distance(C, D, stop_below: float = -1.0, refine: Optional[bool] = None,
                               warm: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray]:
    """
    min_f d_H(f(C), D) sobre los mapas candidatos (cota superior).

    Args:
        C, D: Clusters o listas de puntos centrados en el origen
        stop_below: Detiene la búsqueda en cuanto el valor baja de este umbral
        refine: Ajuste local del mejor mapa (por defecto según config)
        warm: Mapa inicial (p. ej. el mejor de un prefijo ya evaluado)

    Returns:
        (valor, matriz ortogonal f con d_H(f(C), D) = valor)
    """
    a, b = _points(C), _points(D)
    _check_dims(a, b)
    refine = get_settings().refine_rotations if refine is None else refine
    return _RotationSearch(b).search(a, stop_below=stop_below, refine=refine, warm=warm)


def rotation_invariant_distance(C, D, delta: Optional[float] = None, refine: Optional[bool] = None) -> ApproxValue:
    """
    d_R(C, D): Hausdorff simétrico minimizado sobre mapas ortogonales.

    Returns:
        ApproxValue con value ≥ d_R y value ≤ η · d_R
    """
    a, b = _points(C), _points(D)
    _check_dims(a, b)
    refine = get_settings().refine_rotations if refine is None else refine
    value, _ = _RotationSearch(b, symmetric=True).search(a, refine=refine)
    return ApproxValue(value=value, factor=approximation_factor(a.shape[1], delta))


# =============================================================================
# DISTANCIA DE CLUSTERS
# =============================================================================

def max_min_directed_distance(C, D, alpha: float, delta: Optional[float] = None,
                              refine: Optional[bool] = None) -> ApproxValue:
    """
    d_M(C, D) = max_i min{α − |p_i|, d_R({p_1..p_i}, D)} con |p_1| ≤ … ≤ |p_k|.

    Solo se evalúa el último índice de cada capa de igual norma. Los
    valores d_R de los prefijos se fuerzan no decrecientes.

    Args:
        C, D: Clusters centrados
        alpha: Radio α ≥ max |p_i|

    Returns:
        ApproxValue; `terms` guarda (α − |p_i|, d_R del prefijo) evaluados

    Raises:
        InvalidRadius: α menor que la norma máxima de C
    """
    a, b = _points(C), _points(D)
    _check_dims(a, b)
    tol = get_settings().tau_geom
    refine = get_settings().refine_rotations if refine is None else refine

    norms = np.linalg.norm(a, axis=1)
    order = np.argsort(norms, kind="stable")
    a, norms = a[order], norms[order]
    if norms[-1] > alpha + tol:
        raise InvalidRadius(f"α = {alpha} menor que la norma máxima {norms[-1]}")

    best = 0.0
    prefix_dr = 0.0
    warm = None
    terms: List[Tuple[float, float]] = []
    k = len(a)
    for i in range(k):
        if i + 1 < k and norms[i + 1] - norms[i] <= tol:
            continue
        slack = alpha - norms[i]
        if slack <= best:
            break
        dr, warm = directed_rotation_distance(a[: i + 1], b, stop_below=best, refine=refine, warm=warm)
        prefix_dr = max(prefix_dr, dr)
        terms.append((float(slack), float(prefix_dr)))
        best = max(best, min(slack, prefix_dr))

    return ApproxValue(value=float(best), factor=approximation_factor(a.shape[1], delta),
                       radius=float(alpha), terms=terms)


def _radius_of(item) -> Optional[float]:
    if isinstance(item, IsometryClass):
        return item.radius
    if isinstance(item, Cluster):
        return item.radius
    return None


def cluster_distance(sigma, xi, delta: Optional[float] = None, refine: Optional[bool] = None) -> ApproxValue:
    """
    d_C(σ, ξ) = max{d_M(C, D), d_M(D, C)}.

    Args:
        sigma, xi: IsometryClass o Cluster con el mismo radio α

    Raises:
        RadiusMismatch: radios distintos
    """
    r1, r2 = _radius_of(sigma), _radius_of(xi)
    if r1 is None or r2 is None:
        raise RadiusMismatch("cluster_distance requiere clusters con radio")
    if abs(r1 - r2) > get_settings().tau_geom * max(1.0, r1, r2):
        raise RadiusMismatch(f"Radios distintos: {r1} y {r2}")

    C = sigma.representative if isinstance(sigma, IsometryClass) else sigma
    D = xi.representative if isinstance(xi, IsometryClass) else xi
    factor = approximation_factor(C.dim, delta)

    if cluster_isometry(C, D) is not None:
        return ApproxValue(value=0.0, factor=factor, radius=r1)

    forward = max_min_directed_distance(C, D, r1, delta, refine)
    backward = max_min_directed_distance(D, C, r1, delta, refine)
    return ApproxValue(value=max(forward.value, backward.value), factor=factor, radius=r1)


# =============================================================================
# EMD SOBRE ISOSETS
# =============================================================================

def isoset_distance(S: PeriodicSet, Q: PeriodicSet, delta: Optional[float] = None,
                    alpha: Optional[float] = None, refine: Optional[bool] = None) -> ApproxValue:
    """
    EMD(I(S; α), I(Q; α)) con coste d_C entre clases.

    Args:
        S, Q: Conjuntos periódicos de la misma dimensión
        delta: Holgura δ del factor η
        alpha: Radio común (por defecto el máximo de las cotas α_ub)

    Returns:
        ApproxValue con el plan de flujo y el radio usado
    """
    if S.dim != Q.dim:
        raise DimensionMismatch(f"Conjuntos {S.dim}D y {Q.dim}D")
    alpha = common_stable_radius(S, Q) if alpha is None else float(alpha)
    factor = approximation_factor(S.dim, delta)

    iso_s, iso_q = isoset(S, alpha), isoset(Q, alpha)
    matched = match_isosets(iso_s, iso_q) or []
    zero_pairs = {(i, j) for i, j, _ in matched}

    cost = np.zeros((len(iso_s), len(iso_q)))
    for i, sigma in enumerate(iso_s.classes):
        for j, xi in enumerate(iso_q.classes):
            if (i, j) in zero_pairs:
                continue
            cost[i, j] = cluster_distance(sigma, xi, delta, refine).value

    plan = emd(iso_s.weights, iso_q.weights, cost)
    logger.info(f"[Isoset] EMD = {plan.cost:.6g} (α = {alpha:.6g}, η = {factor:g})")
    return ApproxValue(value=plan.cost, factor=factor, radius=alpha, flow=plan)


def double_diameter(pset: PeriodicSet) -> float:
    """Doble diámetro de la celda dada"""
    return 2.0 * cell_geometry(pset).diameter


def scaled_invariant_distance(S: PeriodicSet, Q: PeriodicSet, delta: Optional[float] = None,
                              refine: Optional[bool] = None) -> ApproxValue:
    """
    |d_S − d_Q| + EMD(I(S/d_S; 1), I(Q/d_Q; 1)).

    d_S es el doble diámetro de la celda dada, así que el valor depende
    de la presentación si las celdas no están reducidas.
    """
    if S.dim != Q.dim:
        raise DimensionMismatch(f"Conjuntos {S.dim}D y {Q.dim}D")
    d_s, d_q = double_diameter(S), double_diameter(Q)
    emd_term = isoset_distance(S.scaled(1.0 / d_s), Q.scaled(1.0 / d_q), delta, alpha=1.0, refine=refine)
    return ApproxValue(value=abs(d_s - d_q) + emd_term.value, factor=emd_term.factor,
                       radius=1.0, flow=emd_term.flow)


# =============================================================================
# OTRAS DISTANCIAS
# =============================================================================

def bottleneck_distance_finite(A, B) -> float:
    """
    min sobre biyecciones del desplazamiento máximo.

    Búsqueda binaria sobre las distancias candidatas con test de
    emparejamiento perfecto.

    Raises:
        SizeMismatch: |A| ≠ |B|
    """
    a, b = _points(A), _points(B)
    _check_dims(a, b)
    if len(a) != len(b):
        raise SizeMismatch(f"|A| = {len(a)} y |B| = {len(b)}")

    distances = cdist(a, b)
    candidates = np.unique(distances)

    def perfect(threshold: float) -> bool:
        blocked = (distances > threshold).astype(float)
        rows, cols = linear_sum_assignment(blocked)
        return blocked[rows, cols].sum() == 0

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if perfect(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def amd_distance(a, b) -> float:
    """L∞ entre vectores AMD"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise NeighborCountMismatch(f"AMD de longitudes {a.shape} y {b.shape}")
    return float(np.max(np.abs(a - b))) if a.size else 0.0
