"""
Congruence
Test de isometría entre clusters, grupos de simetría, α-particiones e isosets

El emparejador ancla puntos extremos del cluster (norma máxima y máxima
distancia perpendicular), enumera sus imágenes candidatas con normas y
productos escalares compatibles y verifica cada mapa ortogonal con un
kd-tree (fallback: asignación húngara).
"""

import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial import cKDTree

from utils.config import get_settings
from .clusters import Cluster, alpha_cluster, stable_radius_upper_bound
from .errors import DimensionMismatch
from .lattice import PeriodicSet

logger = logging.getLogger(__name__)


# =============================================================================
# MAPAS ORTOGONALES
# =============================================================================

@dataclass(frozen=True, eq=False)
class OrthogonalMap:
    """Mapa ortogonal x ↦ M·x que fija el origen"""
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.atleast_2d(np.asarray(self.matrix, dtype=float)).copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_reflection(self) -> bool:
        return bool(np.linalg.det(self.matrix) < 0)

    def apply(self, points: np.ndarray) -> np.ndarray:
        return np.atleast_2d(np.asarray(points, dtype=float)) @ self.matrix.T

    def compose(self, other: "OrthogonalMap") -> "OrthogonalMap":
        """self ∘ other"""
        return OrthogonalMap(self.matrix @ other.matrix)

    def inverse(self) -> "OrthogonalMap":
        return OrthogonalMap(self.matrix.T)

    def is_orthogonal(self, tol: float = 1e-9) -> bool:
        identity = np.eye(self.dim)
        return bool(np.allclose(self.matrix @ self.matrix.T, identity, atol=tol)
                    and abs(abs(np.linalg.det(self.matrix)) - 1.0) <= tol)

    def close_to(self, other: "OrthogonalMap", tol: float = 1e-6) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, atol=tol))


@dataclass
class SymmetryGroup:
    """
    Grupo Sym(S, p; α) de auto-isometrías del cluster.

    Si el cluster abarca un subespacio de dimensión ≤ n − 2 el grupo es
    continuo: `maps` queda vacío y `order` es math.inf.
    """
    maps: List[OrthogonalMap] = field(default_factory=list)
    continuous: bool = False

    @property
    def order(self) -> float:
        return math.inf if self.continuous else len(self.maps)

    def contains(self, candidate: OrthogonalMap, tol: float = 1e-6) -> bool:
        return any(candidate.close_to(g, tol) for g in self.maps)

    def is_closed(self, tol: float = 1e-6) -> bool:
        """Cerrado bajo composición e inverso"""
        if self.continuous:
            return True
        for f in self.maps:
            if not self.contains(f.inverse(), tol):
                return False
            for g in self.maps:
                if not self.contains(f.compose(g), tol):
                    return False
        return True


def iso_tolerance(radius: float) -> float:
    """τ_iso relativo al radio del cluster"""
    settings = get_settings()
    if radius <= 0:
        return settings.tau_geom
    return settings.tau_iso_relative * radius


# =============================================================================
# MARCOS Y ANCLAS
# =============================================================================

def anchor_indices(points: np.ndarray, tol: float) -> List[int]:
    """
    Índices de anclas: norma máxima y luego máxima distancia al
    subespacio generado por las anteriores. Solo cuentan las que
    aumentan el rango.
    """
    n = points.shape[1]
    anchors: List[int] = []
    basis = np.zeros((0, n))
    for _ in range(n):
        if basis.shape[0]:
            residual = points - (points @ basis.T) @ basis
        else:
            residual = points
        lengths = np.linalg.norm(residual, axis=1)
        idx = int(np.argmax(lengths))
        if lengths[idx] <= tol:
            break
        anchors.append(idx)
        basis = np.vstack([basis, residual[idx] / lengths[idx]])
    return anchors


def _orthonormal_frame(vectors: np.ndarray, dim: int) -> np.ndarray:
    """
    Gram-Schmidt de los vectores (filas) completado a una base
    ortonormal de ℝⁿ. Devuelve la matriz con el marco en columnas.
    """
    frame: List[np.ndarray] = []
    for v in vectors:
        w = v - sum((v @ e) * e for e in frame) if frame else v.copy()
        frame.append(w / np.linalg.norm(w))

    if dim == 2 and len(frame) == 1:
        e = frame[0]
        frame.append(np.array([-e[1], e[0]]))
    elif dim == 3 and len(frame) == 2:
        frame.append(np.cross(frame[0], frame[1]))
    else:
        for axis in np.eye(dim):
            if len(frame) == dim:
                break
            w = axis - sum((axis @ e) * e for e in frame) if frame else axis.copy()
            norm = np.linalg.norm(w)
            if norm > 1e-6:
                frame.append(w / norm)
    return np.column_stack(frame)


def frame_maps(source: np.ndarray, target: np.ndarray, dim: int) -> List[np.ndarray]:
    """
    Mapas ortogonales que llevan el marco de `source` al de `target`.

    Con rango completo el mapa es único; con rango r < n se devuelven
    las dos orientaciones sobre el último eje del complemento.
    """
    e = _orthonormal_frame(source, dim)
    f = _orthonormal_frame(target, dim)
    rank = source.shape[0]
    if rank == dim:
        return [f @ e.T]
    flip = np.eye(dim)
    flip[-1, -1] = -1.0
    return [f @ e.T, f @ flip @ e.T]


def _matches(mapped: np.ndarray, target: np.ndarray, tree: cKDTree, tol: float) -> bool:
    """Existe una biyección con desplazamientos ≤ tol"""
    distances, indices = tree.query(mapped)
    if np.any(distances > tol):
        return False
    if len(set(indices.tolist())) == len(indices):
        return True
    cost = np.linalg.norm(mapped[:, np.newaxis, :] - target[np.newaxis, :, :], axis=2)
    rows, cols = linear_sum_assignment(cost)
    return bool(np.max(cost[rows, cols]) <= tol)


def _candidate_maps(c_points: np.ndarray, d_points: np.ndarray, tol: float) -> Iterator[np.ndarray]:
    """Genera los mapas ortogonales que llevan C sobre D (verificados)"""
    dim = c_points.shape[1]
    anchors = anchor_indices(c_points, tol)
    tree = cKDTree(d_points)

    if not anchors:
        for matrix in frame_maps(np.zeros((0, dim)), np.zeros((0, dim)), dim):
            if _matches(c_points @ matrix.T, d_points, tree, tol):
                yield matrix
        return

    source = c_points[anchors]
    c_norms = np.linalg.norm(source, axis=1)
    d_norms = np.linalg.norm(d_points, axis=1)
    gram = source @ source.T
    gram_tol = 2.0 * tol * (float(np.max(c_norms)) + tol)

    options = [np.nonzero(np.abs(d_norms - c) <= tol)[0] for c in c_norms]

    def extend(chosen: List[int]) -> Iterator[List[int]]:
        level = len(chosen)
        if level == len(anchors):
            yield chosen
            return
        for q in options[level]:
            q = int(q)
            if q in chosen:
                continue
            ok = all(
                abs(float(d_points[q] @ d_points[p]) - gram[level, k]) <= gram_tol
                for k, p in enumerate(chosen)
            )
            if ok:
                yield from extend(chosen + [q])

    for chosen in extend([]):
        target = d_points[chosen]
        for matrix in frame_maps(source, target, dim):
            if _matches(c_points @ matrix.T, d_points, tree, tol):
                yield matrix


def _as_points(cluster) -> np.ndarray:
    if isinstance(cluster, Cluster):
        return cluster.points
    return np.atleast_2d(np.asarray(cluster, dtype=float))


def _cluster_radius(cluster) -> float:
    if isinstance(cluster, Cluster):
        return cluster.radius
    points = _as_points(cluster)
    return float(np.max(np.linalg.norm(points, axis=1))) if len(points) else 0.0


# =============================================================================
# ISOMETRÍA DE CLUSTERS Y GRUPOS DE SIMETRÍA
# =============================================================================

def cluster_isometry(C, D, tol: Optional[float] = None) -> Optional[OrthogonalMap]:
    """
    Busca un mapa ortogonal f con f(C) = D punto a punto (dentro de tol).

    Args:
        C, D: Clusters centrados en el origen
        tol: τ_iso (por defecto relativo al radio)

    Returns:
        OrthogonalMap o None si no son isométricos
    """
    c_points, d_points = _as_points(C), _as_points(D)
    if c_points.shape[1] != d_points.shape[1]:
        raise DimensionMismatch(f"Clusters {c_points.shape[1]}D y {d_points.shape[1]}D")
    if len(c_points) != len(d_points):
        return None
    if len(c_points) == 0:
        return OrthogonalMap(np.eye(c_points.shape[1]))

    tol = iso_tolerance(max(_cluster_radius(C), _cluster_radius(D))) if tol is None else tol
    c_norms = np.sort(np.linalg.norm(c_points, axis=1))
    d_norms = np.sort(np.linalg.norm(d_points, axis=1))
    if np.max(np.abs(c_norms - d_norms)) > tol:
        return None

    for matrix in _candidate_maps(c_points, d_points, tol):
        return OrthogonalMap(matrix)
    return None


def cluster_symmetries(cluster, tol: Optional[float] = None) -> SymmetryGroup:
    """Grupo de auto-isometrías de un cluster centrado"""
    points = _as_points(cluster)
    dim = points.shape[1]
    tol = iso_tolerance(_cluster_radius(cluster)) if tol is None else tol

    rank = len(anchor_indices(points, tol))
    if rank <= dim - 2:
        return SymmetryGroup(maps=[], continuous=True)

    maps: List[OrthogonalMap] = []
    for matrix in _candidate_maps(points, points, tol):
        candidate = OrthogonalMap(matrix)
        if not any(candidate.close_to(g) for g in maps):
            maps.append(candidate)
    return SymmetryGroup(maps=maps, continuous=False)


def symmetry_group(pset: PeriodicSet, motif_index: int, radius: float) -> SymmetryGroup:
    """
    Sym(S, p; α) del punto `motif_index`.

    Returns:
        SymmetryGroup finito, o continuo (order = inf) si el cluster
        abarca un subespacio de dimensión ≤ n − 2
    """
    return cluster_symmetries(alpha_cluster(pset, motif_index, radius))


# =============================================================================
# α-PARTICIONES E ISOSETS
# =============================================================================

def alpha_partition(pset: PeriodicSet, radius: float) -> Tuple[Tuple[int, ...], ...]:
    """
    Clases de α-equivalencia de los índices del motivo.

    Returns:
        Tupla de clases ordenadas por su menor índice
    """
    clusters = [alpha_cluster(pset, i, radius) for i in range(pset.size)]
    classes: List[List[int]] = []
    for i, cluster in enumerate(clusters):
        for members in classes:
            if cluster_isometry(clusters[members[0]], cluster) is not None:
                members.append(i)
                break
        else:
            classes.append([i])
    return tuple(tuple(members) for members in classes)


@dataclass
class IsometryClass:
    """Clase de isometría [C(S, p; α)] con peso k/m"""
    representative: Cluster
    weight: Fraction
    members: Tuple[int, ...]

    @property
    def radius(self) -> float:
        return self.representative.radius

    def canonical_points(self, decimals: int = 9) -> List[List[float]]:
        rounded = np.round(self.representative.points, decimals) + 0.0
        return sorted(rounded.tolist())


@dataclass
class Isoset:
    """Distribución ponderada de clases de isometría de α-clusters"""
    radius: float
    classes: List[IsometryClass]
    dim: int

    @property
    def weights(self) -> List[Fraction]:
        return [c.weight for c in self.classes]

    def __len__(self) -> int:
        return len(self.classes)

    def canonical_classes(self) -> List[IsometryClass]:
        return sorted(self.classes, key=lambda c: (c.representative.size, c.canonical_points()))

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "dim": self.dim,
            "classes": [
                {
                    "weight": f"{c.weight.numerator}/{c.weight.denominator}",
                    "weight_value": float(c.weight),
                    "size": c.representative.size,
                    "members": list(c.members),
                    "points": c.canonical_points(),
                }
                for c in self.canonical_classes()
            ],
        }


def isoset(pset: PeriodicSet, radius: float) -> Isoset:
    """
    Isoset I(S; α).

    Args:
        pset: Conjunto periódico
        radius: α ≥ 0 (normalmente un radio estable común)

    Returns:
        Isoset con pesos racionales que suman exactamente 1
    """
    partition = alpha_partition(pset, radius)
    classes = [
        IsometryClass(
            representative=alpha_cluster(pset, members[0], radius),
            weight=Fraction(len(members), pset.size),
            members=members,
        )
        for members in partition
    ]
    logger.debug(f"[Isoset] {len(classes)} clases en α = {radius:.6g}")
    return Isoset(radius=float(radius), classes=classes, dim=pset.dim)


def common_stable_radius(S: PeriodicSet, Q: PeriodicSet) -> float:
    """Radio estable común: máximo de las cotas superiores α_ub"""
    if S.dim != Q.dim:
        raise DimensionMismatch(f"Conjuntos {S.dim}D y {Q.dim}D")
    return max(stable_radius_upper_bound(S).alpha_ub, stable_radius_upper_bound(Q).alpha_ub)


def match_isosets(A: Isoset, B: Isoset) -> Optional[List[Tuple[int, int, OrthogonalMap]]]:
    """
    Biyección entre clases que respeta pesos e isometrías.

    Las clases de un mismo isoset no son isométricas entre sí, así que
    el emparejamiento voraz es exacto.
    """
    if len(A.classes) != len(B.classes):
        return None
    used = set()
    pairs = []
    for i, sigma in enumerate(A.classes):
        for j, xi in enumerate(B.classes):
            if j in used or sigma.weight != xi.weight:
                continue
            found = cluster_isometry(sigma.representative, xi.representative)
            if found is not None:
                used.add(j)
                pairs.append((i, j, found))
                break
        else:
            return None
    return pairs


@dataclass
class IsometryReport:
    """Resultado de comparar dos conjuntos por sus isosets"""
    isometric: bool
    radius: float
    pairs: List[Tuple[int, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"isometric": self.isometric, "radius": self.radius, "pairs": [list(p) for p in self.pairs]}


def isometry_report(S: PeriodicSet, Q: PeriodicSet, radius: Optional[float] = None) -> IsometryReport:
    """Decide la isometría y devuelve el radio común y las clases emparejadas"""
    radius = common_stable_radius(S, Q) if radius is None else radius
    matched = match_isosets(isoset(S, radius), isoset(Q, radius))
    if matched is None:
        return IsometryReport(isometric=False, radius=radius)
    return IsometryReport(isometric=True, radius=radius, pairs=[(i, j) for i, j, _ in matched])


def isometric(S: PeriodicSet, Q: PeriodicSet) -> bool:
    """
    S y Q son isométricos si sus isosets en un radio estable común
    admiten una biyección que respeta pesos.
    """
    return isometry_report(S, Q).isometric
