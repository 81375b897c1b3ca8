"""
Duplicate Scanner
Búsqueda escalonada de pares casi duplicados en una colección de cristales

Etapas por par (orden canónico i < j):
    1. L∞ entre AMD < amd_threshold
    2. EMD entre PDD < pdd_threshold
    3. EMD entre isosets (confirmación)
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
import pandas as pd
from tqdm import tqdm

from utils.config import get_settings
from .lattice import PeriodicSet
from .metrics import amd_distance, isoset_distance
from .pdd import PDDMatrix, pdd, pdd_distance

logger = logging.getLogger(__name__)

VERDICT_DISTINCT = "distinct"
VERDICT_NEAR = "near-duplicate"
VERDICT_ISOMETRIC = "isometric"

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class ScanPair:
    """Resultado de un par; las etapas no alcanzadas quedan en None"""
    id_a: str
    id_b: str
    amd_linf: Optional[float]
    pdd_emd: Optional[float] = None
    isoset_emd: Optional[float] = None
    factor: Optional[float] = None
    verdict: str = VERDICT_DISTINCT

    def to_json(self) -> dict:
        return {
            "id_a": self.id_a,
            "id_b": self.id_b,
            "amd_linf": self.amd_linf,
            "pdd_emd": self.pdd_emd,
            "isoset_emd": self.isoset_emd,
            "factor": self.factor,
            "verdict": self.verdict,
        }


@dataclass
class ScanReport:
    """Informe del escaneo con los umbrales usados en la cabecera"""
    ids: List[str]
    k: int
    amd_threshold: float
    pdd_threshold: float
    isometric_threshold: float
    pairs: List[ScanPair] = field(default_factory=list)

    def counts(self) -> Dict[str, int]:
        result = {VERDICT_DISTINCT: 0, VERDICT_NEAR: 0, VERDICT_ISOMETRIC: 0}
        for pair in self.pairs:
            result[pair.verdict] += 1
        return result

    def stage_counts(self) -> Dict[str, int]:
        """Pares que superan cada filtro"""
        return {
            "pairs": len(self.pairs),
            "amd": sum(1 for p in self.pairs if p.pdd_emd is not None),
            "pdd": sum(1 for p in self.pairs if p.isoset_emd is not None),
            "isometric": self.counts()[VERDICT_ISOMETRIC],
        }

    def flagged(self) -> List[ScanPair]:
        return [p for p in self.pairs if p.verdict != VERDICT_DISTINCT]

    def to_json(self) -> dict:
        return {
            "schema": "isoset-scan/1",
            "thresholds": {
                "amd": self.amd_threshold,
                "pdd": self.pdd_threshold,
                "isometric": self.isometric_threshold,
            },
            "k": self.k,
            "crystals": list(self.ids),
            "counts": self.counts(),
            "pairs": [p.to_json() for p in self.pairs],
        }

    def to_dataframe(self) -> pd.DataFrame:
        columns = ["id_a", "id_b", "amd_linf", "pdd_emd", "isoset_emd", "factor", "verdict"]
        return pd.DataFrame([p.to_json() for p in self.pairs], columns=columns)


def _run(func: Callable[[T], R], items: Sequence[T], workers: int, desc: str, progress: bool) -> List[R]:
    """map en orden de entrada, con pool de hilos si workers > 1"""
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in tqdm(items, desc=desc, disable=not progress)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(tqdm(executor.map(func, items), total=len(items), desc=desc, disable=not progress))


def scan(
    crystals: Sequence[Tuple[str, PeriodicSet]],
    k: Optional[int] = None,
    amd_threshold: Optional[float] = None,
    pdd_threshold: Optional[float] = None,
    isometric_threshold: Optional[float] = None,
    delta: Optional[float] = None,
    workers: Optional[int] = None,
    progress: bool = False,
) -> ScanReport:
    """
    Escanea todos los pares de una colección.

    Un par es "isometric" si la EMD de isosets no supera
    isometric_threshold, "near-duplicate" si su cota inferior (valor/η)
    no supera pdd_threshold, y "distinct" en otro caso o si no pasa
    algún filtro. Como EMD(PDD) ≤ EMD(isoset) para pares cercanos, el
    filtro PDD no descarta pares realmente próximos.

    Args:
        crystals: Pares (id, PeriodicSet) en orden canónico
        k: Vecinos para AMD/PDD (por defecto config)
        amd_threshold, pdd_threshold, isometric_threshold: Umbrales (por defecto config)
        delta: Holgura del factor η
        workers: Hilos del pool (por defecto config scan_workers)
        progress: Barra de progreso tqdm

    Returns:
        ScanReport con los pares en orden (i, j), i < j
    """
    settings = get_settings()
    k = settings.default_k if k is None else int(k)
    t1 = settings.amd_threshold if amd_threshold is None else float(amd_threshold)
    t2 = settings.pdd_threshold if pdd_threshold is None else float(pdd_threshold)
    t_iso = settings.isometric_threshold if isometric_threshold is None else float(isometric_threshold)
    workers = settings.scan_workers if workers is None else max(1, int(workers))

    ids = [name for name, _ in crystals]
    sets = [pset for _, pset in crystals]
    report = ScanReport(ids=ids, k=k, amd_threshold=t1, pdd_threshold=t2, isometric_threshold=t_iso)
    if len(sets) < 2:
        logger.info("[Scan] Menos de dos cristales, nada que comparar")
        return report

    matrices: List[PDDMatrix] = _run(lambda s: pdd(s, k), sets, workers, "PDD", progress)
    amds = [m.amd for m in matrices]

    def compare(indices: Tuple[int, int]) -> ScanPair:
        i, j = indices
        pair = ScanPair(id_a=ids[i], id_b=ids[j], amd_linf=amd_distance(amds[i], amds[j]))
        if sets[i].dim != sets[j].dim or not pair.amd_linf < t1:
            return pair
        pair.pdd_emd = pdd_distance(matrices[i], matrices[j])
        if not pair.pdd_emd < t2:
            return pair
        value = isoset_distance(sets[i], sets[j], delta=delta)
        pair.isoset_emd, pair.factor = value.value, value.factor
        if value.value <= t_iso:
            pair.verdict = VERDICT_ISOMETRIC
        elif value.lower <= t2:
            pair.verdict = VERDICT_NEAR
        logger.debug(f"[Scan] {pair.id_a} vs {pair.id_b}: {pair.verdict} (EMD = {value.value:.6g})")
        return pair

    index_pairs = list(combinations(range(len(sets)), 2))
    report.pairs = _run(compare, index_pairs, workers, "Scan", progress)

    counts = report.counts()
    logger.info(
        f"[Scan] {len(index_pairs)} pares: {counts[VERDICT_ISOMETRIC]} isométricos, "
        f"{counts[VERDICT_NEAR]} casi duplicados"
    )
    return report


def amd_matrix(crystals: Sequence[Tuple[str, PeriodicSet]], k: Optional[int] = None) -> pd.DataFrame:
    """Matriz simétrica de distancias L∞ entre AMD, indexada por id"""
    ids = [name for name, _ in crystals]
    vectors = [pdd(s, k).amd for _, s in crystals]
    size = len(vectors)
    values = np.zeros((size, size))
    for i, j in combinations(range(size), 2):
        values[i, j] = values[j, i] = amd_distance(vectors[i], vectors[j])
    return pd.DataFrame(values, index=ids, columns=ids)
