"""
Cluster Analysis
α-clusters, bridge length, radios estables e isotree de α-particiones
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from utils.config import get_settings
from .errors import InvalidMotifIndex, InvalidRadius
from .lattice import PeriodicSet, _enumerate_ball, cell_geometry, points_in_ball, sort_points

logger = logging.getLogger(__name__)


# =============================================================================
# α-CLUSTERS
# =============================================================================

@dataclass(frozen=True, eq=False)
class Cluster:
    """
    Conjunto de vectores q − p centrado en el origen.

    Los puntos se ordenan por (norma, componentes).
    """
    radius: float
    points: np.ndarray
    center: Optional[np.ndarray] = None
    motif_index: Optional[int] = None

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        points = sort_points(points) if len(points) else points
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @classmethod
    def from_points(cls, points, radius: Optional[float] = None) -> "Cluster":
        """Cluster arbitrario; el radio por defecto es la norma máxima"""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if radius is None:
            radius = float(np.max(np.linalg.norm(points, axis=1))) if len(points) else 0.0
        return cls(float(radius), points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.points, axis=1)

    def __len__(self) -> int:
        return self.size


def _check_index(pset: PeriodicSet, motif_index: int):
    if not 0 <= int(motif_index) < pset.size:
        raise InvalidMotifIndex(f"Índice {motif_index} fuera de rango [0, {pset.size})")


def alpha_cluster(pset: PeriodicSet, motif_index: int, radius: float) -> Cluster:
    """
    α-cluster C(S, p; α) del punto `motif_index` del motivo.

    Args:
        pset: Conjunto periódico
        motif_index: Índice i del punto p en el motivo
        radius: α ≥ 0

    Returns:
        Cluster con los vectores q − p, |q − p| ≤ α (incluye el vector cero)
    """
    _check_index(pset, motif_index)
    if radius < 0:
        raise InvalidRadius(f"Radio negativo: {radius}")
    center = pset.cartesian_motif[int(motif_index)]
    points = points_in_ball(pset, center, radius) - center
    # el centro exacto evita un vector cero con ruido
    points[np.linalg.norm(points, axis=1) <= get_settings().tau_geom] = 0.0
    return Cluster(float(radius), points, center=center.copy(), motif_index=int(motif_index))


def neighbor_distances(pset: PeriodicSet, radius: float) -> List[float]:
    """Distancias distintas (ordenadas) desde los puntos del motivo hasta radius"""
    tol = get_settings().tau_geom
    values = []
    for center in pset.cartesian_motif:
        points, _, _ = _enumerate_ball(pset, center, radius)
        values.extend(np.linalg.norm(points - center, axis=1).tolist())
    return _distinct(sorted(v for v in values if v > tol), tol)


def _distinct(values: Sequence[float], tol: float) -> List[float]:
    result: List[float] = []
    for v in values:
        if not result or v - result[-1] > tol:
            result.append(float(v))
    return result


# =============================================================================
# BRIDGE LENGTH
# =============================================================================

@dataclass(frozen=True)
class BridgeEdge:
    """Arista (i, 0) ~ (j, shift) del grafo periódico"""
    i: int
    j: int
    shift: Tuple[int, ...]
    distance: float


@dataclass
class BridgeResult:
    """Resultado del cálculo de β(S)"""
    beta: float
    witness_edges: List[BridgeEdge] = field(default_factory=list)


def _ext_gcd(a: int, b: int) -> Tuple[int, int, int]:
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


class _SublatticeBasis:
    """Forma escalonada entera (Hermite) del subretículo generado"""

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: List[Optional[List[int]]] = [None] * dim

    def add(self, vector: Sequence[int]) -> bool:
        """Añade un generador; devuelve True si el subretículo cambia"""
        vec = [int(x) for x in vector]
        changed = False
        for c in range(self.dim):
            if vec[c] == 0:
                continue
            row = self.rows[c]
            if row is None:
                if vec[c] < 0:
                    vec = [-x for x in vec]
                self.rows[c] = vec
                return True
            a, b = row[c], vec[c]
            if b % a == 0:
                q = b // a
                vec = [w - q * r for r, w in zip(row, vec)]
                continue
            g, x, y = _ext_gcd(a, b)
            new_row = [x * r + y * w for r, w in zip(row, vec)]
            vec = [(a // g) * w - (b // g) * r for r, w in zip(row, vec)]
            self.rows[c] = new_row
            changed = True
        return changed

    def determinant(self) -> int:
        if any(row is None for row in self.rows):
            return 0
        det = 1
        for c, row in enumerate(self.rows):
            det *= row[c]
        return abs(det)


class _PeriodicUnionFind:
    """
    Union-find sobre índices del motivo con desplazamientos de retículo.

    Para cada nodo x se guarda off[x] tal que (x, 0) ~ (parent, off[x]).
    Cada componente acumula las traslaciones de sus ciclos.
    """

    def __init__(self, size: int, dim: int):
        self.parent = list(range(size))
        self.offset = [np.zeros(dim, dtype=np.int64) for _ in range(size)]
        self.count = [1] * size
        self.generators = [_SublatticeBasis(dim) for _ in range(size)]
        self.components = size

    def find(self, x: int) -> Tuple[int, np.ndarray]:
        if self.parent[x] == x:
            return x, np.zeros_like(self.offset[x])
        root, parent_offset = self.find(self.parent[x])
        self.offset[x] = self.offset[x] + parent_offset
        self.parent[x] = root
        return root, self.offset[x].copy()

    def union(self, i: int, j: int, shift: np.ndarray) -> bool:
        """Une (i, 0) con (j, shift); True si la arista aporta conectividad"""
        ri, oi = self.find(i)
        rj, oj = self.find(j)
        if ri == rj:
            cycle = oj + shift - oi
            if not np.any(cycle):
                return False
            return self.generators[ri].add(cycle.tolist())

        if self.count[ri] < self.count[rj]:
            ri, rj = rj, ri
            oi, oj = oj, oi
            shift = -shift
        # (rj, 0) ~ (ri, oi − oj − shift)
        self.parent[rj] = ri
        self.offset[rj] = oi - oj - shift
        self.count[ri] += self.count[rj]
        for row in self.generators[rj].rows:
            if row is not None:
                self.generators[ri].add(row)
        self.components -= 1
        return True

    def is_connected(self) -> bool:
        if self.components != 1:
            return False
        root, _ = self.find(0)
        return self.generators[root].determinant() == 1


def _candidate_edges(pset: PeriodicSet, radius: float) -> List[BridgeEdge]:
    tol = get_settings().tau_geom
    edges = []
    for i, center in enumerate(pset.cartesian_motif):
        points, indices, shifts = _enumerate_ball(pset, center, radius)
        for point, j, shift in zip(points, indices, shifts):
            key = tuple(int(s) for s in shift)
            if j < i or (j == i and key <= tuple([0] * pset.dim)):
                continue
            distance = float(np.linalg.norm(point - center))
            if distance > tol:
                edges.append(BridgeEdge(i, int(j), key, distance))
    edges.sort(key=lambda e: (round(e.distance, 12), e.i, e.j, e.shift))
    return edges


def bridge_length(pset: PeriodicSet) -> BridgeResult:
    """
    Bridge length exacto β(S).

    Barre las aristas candidatas por distancia con un union-find periódico;
    S queda conectado cuando el grafo cociente es conexo y las traslaciones
    de los ciclos generan todo el retículo (|det HNF| = 1).

    Returns:
        BridgeResult con β y las aristas testigo
    """
    geometry = cell_geometry(pset)
    radius = max(geometry.max_edge, geometry.diameter / 2.0)

    for attempt in range(6):
        uf = _PeriodicUnionFind(pset.size, pset.dim)
        witnesses: List[BridgeEdge] = []
        for edge in _candidate_edges(pset, radius):
            if uf.union(edge.i, edge.j, np.asarray(edge.shift, dtype=np.int64)):
                witnesses.append(edge)
                if uf.is_connected():
                    logger.debug(f"[Bridge] β = {edge.distance:.6g} con {len(witnesses)} aristas")
                    return BridgeResult(beta=edge.distance, witness_edges=witnesses)
        logger.warning(f"[Bridge] Sin conexión con radio {radius:.6g}, duplicando")
        radius *= 2.0

    raise RuntimeError("No se pudo conectar el conjunto periódico")


# =============================================================================
# RADIOS ESTABLES
# =============================================================================

@dataclass(frozen=True)
class StableRadiusBound:
    """Cotas superiores: β(S) ≤ r y α(S) ≤ β(S) + r, con r = max{b, d/2}"""
    beta: float
    r: float
    alpha_ub: float
    lattice_bound: Optional[float] = None


def stable_radius_upper_bound(pset: PeriodicSet, bridge: Optional[BridgeResult] = None) -> StableRadiusBound:
    """
    α_ub = β(S) + max{b, d/2}.

    Para retículos (m = 1) se añade la cota 2b′ con b′ el vector más largo
    de la base dada.
    """
    geometry = cell_geometry(pset)
    bridge = bridge or bridge_length(pset)
    r = max(geometry.max_edge, geometry.diameter / 2.0)
    lattice_bound = 2.0 * geometry.max_edge if pset.size == 1 else None
    return StableRadiusBound(beta=bridge.beta, r=r, alpha_ub=bridge.beta + r, lattice_bound=lattice_bound)


def _radius_state(pset: PeriodicSet, radius: float) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[float, ...]]:
    """(α-partición, órdenes de Sym por punto) en un radio"""
    from .congruence import alpha_partition, symmetry_group

    partition = alpha_partition(pset, radius)
    orders = tuple(symmetry_group(pset, i, radius).order for i in range(pset.size))
    return partition, orders


def is_stable_radius(pset: PeriodicSet, radius: float, beta: Optional[float] = None) -> bool:
    """
    Comprueba las dos condiciones de radio estable:
    la partición y los grupos de simetría coinciden en α y α − β.
    """
    beta = bridge_length(pset).beta if beta is None else beta
    if radius < beta - get_settings().tau_geom:
        return False
    lower = max(radius - beta, 0.0)
    return _radius_state(pset, radius) == _radius_state(pset, lower)


def min_stable_radius(pset: PeriodicSet) -> float:
    """
    Mínimo radio estable α(S) con β = β(S).

    Solo hay cambios cuando α o α − β cruzan una distancia del conjunto,
    así que basta recorrer esos candidatos dentro de [β, α_ub].
    """
    tol = get_settings().tau_geom
    bound = stable_radius_upper_bound(pset)
    beta, alpha_ub = bound.beta, bound.alpha_ub

    distances = neighbor_distances(pset, alpha_ub)
    raw = [beta, alpha_ub] + distances + [d + beta for d in distances]
    candidates = _distinct(sorted(c for c in raw if beta - tol <= c <= alpha_ub + tol), tol)

    states: Dict[float, tuple] = {}

    def state(radius: float):
        key = round(radius, 9)
        if key not in states:
            states[key] = _radius_state(pset, max(radius, 0.0))
        return states[key]

    for candidate in candidates:
        if state(candidate) == state(candidate - beta):
            logger.debug(f"[StableRadius] α(S) = {candidate:.6g} (β = {beta:.6g})")
            return candidate

    logger.warning(f"[StableRadius] Ningún candidato estable, se usa α_ub = {alpha_ub:.6g}")
    return alpha_ub


# =============================================================================
# ISOTREE
# =============================================================================

@dataclass
class Isotree:
    """
    Árbol de α-particiones del motivo.

    Cada radio crítico guarda la partición (clases de índices) y el orden
    |Sym(S, p; α)| de cada punto (math.inf para el grupo continuo).
    """
    critical_radii: List[float]
    partitions: List[Tuple[Tuple[int, ...], ...]]
    symmetry_orders: List[Tuple[float, ...]]
    max_radius: float

    def partition_at(self, radius: float) -> Tuple[Tuple[int, ...], ...]:
        """Partición vigente en `radius`"""
        tol = get_settings().tau_geom
        idx = 0
        for k, r in enumerate(self.critical_radii):
            if r <= radius + tol:
                idx = k
        return self.partitions[idx]

    def class_counts(self) -> List[int]:
        return [len(p) for p in self.partitions]

    def to_json(self) -> dict:
        def order(value):
            return "continuous" if math.isinf(value) else int(value)

        return {
            "max_radius": self.max_radius,
            "critical_radii": list(self.critical_radii),
            "partitions": [[list(cls) for cls in p] for p in self.partitions],
            "symmetry_orders": [[order(v) for v in row] for row in self.symmetry_orders],
        }


def isotree(pset: PeriodicSet, max_radius: Optional[float] = None) -> Isotree:
    """
    Construye el isotree hasta `max_radius` (por defecto α_ub).

    Args:
        pset: Conjunto periódico
        max_radius: Radio máximo α_max ≥ 0

    Returns:
        Isotree con los radios donde cambia la partición o algún grupo
    """
    if max_radius is None:
        max_radius = stable_radius_upper_bound(pset).alpha_ub
    if max_radius < 0:
        raise InvalidRadius(f"Radio máximo negativo: {max_radius}")

    radii: List[float] = []
    partitions: List[Tuple[Tuple[int, ...], ...]] = []
    orders: List[Tuple[float, ...]] = []

    for radius in [0.0] + neighbor_distances(pset, max_radius):
        partition, sym_orders = _radius_state(pset, radius)
        if partitions and partition == partitions[-1] and sym_orders == orders[-1]:
            continue
        radii.append(radius)
        partitions.append(partition)
        orders.append(sym_orders)

    logger.info(f"[Isotree] {len(radii)} radios críticos hasta {max_radius:.6g}")
    return Isotree(critical_radii=radii, partitions=partitions, symmetry_orders=orders, max_radius=float(max_radius))
