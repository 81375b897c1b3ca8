"""
Pointwise Distance Distributions
PDD, AMD, su EMD con distancia L∞ y la cota inferior del isoset
"""

import io
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

from utils.config import get_settings
from .clusters import alpha_cluster
from .emd import FlowPlan, emd
from .errors import InvalidRadius, IsosetError, NeighborCountMismatch
from .lattice import PeriodicSet, _enumerate_ball, cell_geometry, packing_radius
from .metrics import ApproxValue, isoset_distance

logger = logging.getLogger(__name__)


# =============================================================================
# PDD / AMD
# =============================================================================

@dataclass
class PDDMatrix:
    """
    Filas ponderadas de las k distancias a los vecinos más cercanos.

    Filas en orden lexicográfico; filas iguales colapsadas con peso sumado.
    """
    k: int
    weights: List[Fraction]
    rows: np.ndarray

    @property
    def float_weights(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])

    @property
    def amd(self) -> np.ndarray:
        """Media ponderada de cada columna"""
        return self.float_weights @ self.rows

    def __len__(self) -> int:
        return len(self.weights)

    def to_dataframe(self) -> pd.DataFrame:
        df = pd.DataFrame(self.rows, columns=[f"d{i + 1}" for i in range(self.k)])
        df.insert(0, "weight", self.float_weights)
        return df

    def to_csv(self, path=None, include_amd: bool = False) -> Optional[str]:
        """
        CSV (RFC 4180): peso y k distancias por fila.

        Con include_amd se añade una última fila con "AMD" en la columna
        del peso y el vector AMD en las columnas de distancias.
        """
        buffer = io.StringIO()
        self.to_dataframe().to_csv(buffer, index=False, lineterminator="\r\n", float_format="%.12g")
        if include_amd:
            buffer.write(",".join(["AMD"] + [f"{value:.12g}" for value in self.amd]) + "\r\n")
        if path is None:
            return buffer.getvalue()
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(buffer.getvalue())
        return None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "rows": [
                {"weight": f"{w.numerator}/{w.denominator}", "distances": row.tolist()}
                for w, row in zip(self.weights, self.rows)
            ],
        }


def _neighbor_row(pset: PeriodicSet, center: np.ndarray, k: int, start: float) -> np.ndarray:
    """k distancias más cortas desde center (excluido el propio punto)"""
    tol = get_settings().tau_geom
    radius = start
    while True:
        points, _, _ = _enumerate_ball(pset, center, radius)
        distances = np.sort(np.linalg.norm(points - center, axis=1))
        distances = distances[distances > tol]
        if len(distances) >= k:
            return distances[:k]
        radius *= 2.0


def _collapse(rows: np.ndarray, m: int, tol: float) -> Tuple[List[Fraction], np.ndarray]:
    groups: List[List[int]] = []
    for i, row in enumerate(rows):
        for group in groups:
            if np.max(np.abs(rows[group[0]] - row)) <= tol:
                group.append(i)
                break
        else:
            groups.append([i])

    representatives = np.array([rows[g[0]] for g in groups])
    keys = [np.round(representatives[:, c], 9) for c in reversed(range(representatives.shape[1]))]
    order = np.lexsort(keys)
    weights = [Fraction(len(groups[i]), m) for i in order]
    return weights, representatives[order]


def pdd(pset: PeriodicSet, k: Optional[int] = None) -> PDDMatrix:
    """
    PDD(S; k).

    La búsqueda de vecinos empieza en (k·Vol/(m·Vₙ))^{1/n} + d y duplica
    el radio hasta encontrar k vecinos por punto del motivo.

    Args:
        pset: Conjunto periódico
        k: Número de vecinos ≥ 1 (por defecto config default_k)

    Returns:
        PDDMatrix con filas colapsadas y ordenadas
    """
    settings = get_settings()
    k = settings.default_k if k is None else int(k)
    if k < 1:
        raise IsosetError(f"k debe ser ≥ 1, recibido {k}")

    geometry = cell_geometry(pset)
    m, n = pset.size, pset.dim
    start = (k * geometry.volume / (m * geometry.unit_ball_volume)) ** (1.0 / n) + geometry.diameter

    rows = np.array([_neighbor_row(pset, center, k, start) for center in pset.cartesian_motif])
    weights, collapsed = _collapse(rows, m, settings.row_collapse_tol)
    return PDDMatrix(k=k, weights=weights, rows=collapsed)


def amd(pset: PeriodicSet, k: Optional[int] = None) -> np.ndarray:
    """AMD(S; k): medias ponderadas de las columnas del PDD"""
    return pdd(pset, k).amd


def pdd_emd(P: PDDMatrix, Q: PDDMatrix) -> FlowPlan:
    """Plan EMD entre dos PDD con distancia L∞ entre filas"""
    if P.k != Q.k:
        raise NeighborCountMismatch(f"PDD con k = {P.k} y k = {Q.k}")
    cost = cdist(P.rows, Q.rows, metric="chebyshev")
    return emd(P.weights, Q.weights, cost)


def pdd_distance(P: PDDMatrix, Q: PDDMatrix) -> float:
    """
    EMD(PDD(S; k), PDD(Q; k)).

    Raises:
        NeighborCountMismatch: k distintos
    """
    return pdd_emd(P, Q).cost


# =============================================================================
# COTA INFERIOR
# =============================================================================

@dataclass
class LowerBoundReport:
    """
    Comparación EMD(PDD) ≤ EMD(isoset).

    `holds` exige EMD(PDD) ≤ ε tanto en k_min como en k_max, con ε el
    valor calculado (cota superior de la EMD real); `certified` usa ε/η
    en k_min y es concluyente por sí solo. k_min y k_max son el menor y
    mayor número de vecinos en los (α−ε)-clusters.
    """
    applicable: bool
    epsilon: float
    factor: float
    alpha: float
    k_min: Optional[int] = None
    k_max: Optional[int] = None
    emd_pdd: Optional[float] = None
    emd_pdd_max: Optional[float] = None
    holds: Optional[bool] = None
    certified: Optional[bool] = None
    notes: List[str] = field(default_factory=list)

    @property
    def k(self) -> Optional[int]:
        return self.k_min

    def to_json(self) -> dict:
        return {
            "applicable": self.applicable,
            "epsilon": self.epsilon,
            "factor": self.factor,
            "alpha": self.alpha,
            "k": self.k_min,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "emd_pdd": self.emd_pdd,
            "emd_pdd_k_max": self.emd_pdd_max,
            "holds": self.holds,
            "certified": self.certified,
            "notes": list(self.notes),
        }


def _neighbor_counts(pset: PeriodicSet, radius: float) -> List[int]:
    return [alpha_cluster(pset, i, radius).size - 1 for i in range(pset.size)]


def check_lower_bound(S: PeriodicSet, Q: PeriodicSet, delta: Optional[float] = None,
                      alpha: Optional[float] = None, isoset_value: Optional[ApproxValue] = None) -> LowerBoundReport:
    """
    Verifica EMD(PDD(S; k), PDD(Q; k)) ≤ ε con ε = EMD de isosets.

    Solo aplica si ε es menor que la mitad de la distancia mínima entre
    puntos de S y de Q. k se toma de los (α−ε)-clusters: se evalúa en
    el mínimo y en el máximo, y `holds` exige ambos. `isoset_value` reutiliza
    una EMD de isosets ya calculada.
    """
    tol = 1e-9
    result = isoset_value or isoset_distance(S, Q, delta=delta, alpha=alpha)
    epsilon, factor, alpha = result.value, result.factor, result.radius

    report = LowerBoundReport(applicable=False, epsilon=epsilon, factor=factor, alpha=alpha)
    packing = min(packing_radius(S), packing_radius(Q))
    if epsilon >= packing:
        report.notes.append(f"ε = {epsilon:.6g} no es menor que el radio de empaquetamiento {packing:.6g}")
        return report
    inner = alpha - epsilon
    if inner < 0:
        raise InvalidRadius(f"α − ε negativo: {inner}")

    counts = _neighbor_counts(S, inner) + _neighbor_counts(Q, inner)
    k_min, k_max = min(counts), max(counts)
    report.applicable = True
    report.k_min, report.k_max = k_min, k_max

    if k_min < 1:
        report.notes.append("Los (α−ε)-clusters no tienen vecinos: cota trivial")
        report.emd_pdd = 0.0
    else:
        report.emd_pdd = pdd_distance(pdd(S, k_min), pdd(Q, k_min))
    report.emd_pdd_max = report.emd_pdd if k_max == k_min else pdd_distance(pdd(S, k_max), pdd(Q, k_max))

    report.holds = report.emd_pdd <= epsilon + tol and report.emd_pdd_max <= epsilon + tol
    report.certified = report.emd_pdd <= epsilon / factor + tol
    if report.emd_pdd_max > epsilon + tol:
        report.notes.append(f"Con k_max = {k_max} la EMD de PDD ({report.emd_pdd_max:.6g}) supera ε")

    logger.info(f"[LowerBound] ε = {epsilon:.6g}, k = {k_min}..{k_max}, EMD(PDD) = {report.emd_pdd:.6g}")
    return report
