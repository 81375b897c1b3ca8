"""
Earth Mover's Distance
Problema de transporte resuelto por caminos mínimos sucesivos (min-cost flow)

Los pesos se convierten a racionales y se escalan a enteros, así las
capacidades son exactas; los costes quedan en coma flotante.
"""

import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from .errors import InvalidDistribution, SizeMismatch

logger = logging.getLogger(__name__)

WEIGHT_TOL = 1e-9
MAX_DENOMINATOR = 1_000_000


@dataclass(frozen=True)
class FlowEntry:
    """Flujo f_ij entre la fuente i y el sumidero j"""
    i: int
    j: int
    flow: Fraction
    cost: float


@dataclass
class FlowPlan:
    """Plan de transporte óptimo"""
    entries: List[FlowEntry] = field(default_factory=list)
    cost: float = 0.0

    def matrix(self, rows: int, cols: int) -> np.ndarray:
        result = np.zeros((rows, cols))
        for e in self.entries:
            result[e.i, e.j] += float(e.flow)
        return result

    def to_json(self) -> dict:
        return {
            "cost": self.cost,
            "pairs": [
                {
                    "i": e.i,
                    "j": e.j,
                    "flow": float(e.flow),
                    "flow_exact": f"{e.flow.numerator}/{e.flow.denominator}",
                    "cost": e.cost,
                }
                for e in self.entries
            ],
        }


def _to_fractions(weights: Sequence, side: str) -> List[Fraction]:
    values = []
    for w in weights:
        value = w if isinstance(w, Fraction) else Fraction(float(w)).limit_denominator(MAX_DENOMINATOR)
        if value < 0:
            raise InvalidDistribution(f"Peso negativo en {side}: {w}")
        values.append(value)
    if not values:
        raise InvalidDistribution(f"Distribución {side} vacía")
    total = sum(float(w) for w in weights)
    if abs(total - 1.0) > WEIGHT_TOL:
        raise InvalidDistribution(f"Los pesos de {side} suman {total}, no 1")
    exact_total = sum(values)
    return [v / exact_total for v in values]


class _FlowNetwork:
    """Red residual en listas paralelas (to, cap, cost)"""

    def __init__(self, nodes: int):
        self.nodes = nodes
        self.adj: List[List[int]] = [[] for _ in range(nodes)]
        self.to: List[int] = []
        self.cap: List[int] = []
        self.cost: List[float] = []

    def add_arc(self, u: int, v: int, capacity: int, cost: float) -> int:
        arc = len(self.to)
        self.to += [v, u]
        self.cap += [capacity, 0]
        self.cost += [cost, -cost]
        self.adj[u].append(arc)
        self.adj[v].append(arc + 1)
        return arc

    def _shortest_path(self, source: int) -> Tuple[List[float], List[int]]:
        """Bellman-Ford en orden fijo de arcos"""
        dist = [math.inf] * self.nodes
        via = [-1] * self.nodes
        dist[source] = 0.0
        for _ in range(self.nodes - 1):
            updated = False
            for u in range(self.nodes):
                if dist[u] == math.inf:
                    continue
                for arc in self.adj[u]:
                    if self.cap[arc] <= 0:
                        continue
                    v = self.to[arc]
                    candidate = dist[u] + self.cost[arc]
                    if candidate < dist[v] - 1e-12:
                        dist[v] = candidate
                        via[v] = arc
                        updated = True
            if not updated:
                break
        return dist, via

    def min_cost_flow(self, source: int, sink: int, demand: int) -> int:
        """Envía `demand` unidades; devuelve las enviadas"""
        sent = 0
        while sent < demand:
            dist, via = self._shortest_path(source)
            if dist[sink] == math.inf:
                break
            push = demand - sent
            v = sink
            while v != source:
                arc = via[v]
                push = min(push, self.cap[arc])
                v = self.to[arc ^ 1]
            v = sink
            while v != source:
                arc = via[v]
                self.cap[arc] -= push
                self.cap[arc ^ 1] += push
                v = self.to[arc ^ 1]
            sent += push
        return sent


def emd(source_weights: Sequence, sink_weights: Sequence, cost_matrix) -> FlowPlan:
    """
    Plan de transporte óptimo entre dos distribuciones discretas.

    Args:
        source_weights: Pesos wᵢ ≥ 0 que suman 1
        sink_weights: Pesos vⱼ ≥ 0 que suman 1
        cost_matrix: Costes c_ij ≥ 0 (len(source) × len(sink))

    Returns:
        FlowPlan con flujos racionales exactos y coste total

    Raises:
        InvalidDistribution: pesos negativos o que no suman 1
        SizeMismatch: matriz de costes con forma incorrecta
    """
    w = _to_fractions(source_weights, "origen")
    v = _to_fractions(sink_weights, "destino")
    cost = np.atleast_2d(np.asarray(cost_matrix, dtype=float))
    if cost.shape != (len(w), len(v)):
        raise SizeMismatch(f"Matriz de costes {np.shape(cost_matrix)} para {len(w)}×{len(v)} pesos")
    if np.any(cost < 0) or not np.all(np.isfinite(cost)):
        raise InvalidDistribution("La matriz de costes debe ser finita y no negativa")

    scale = math.lcm(*(f.denominator for f in w + v))
    supplies = [int(f * scale) for f in w]
    demands = [int(f * scale) for f in v]

    a, b = len(w), len(v)
    source, sink = a + b, a + b + 1
    network = _FlowNetwork(a + b + 2)
    for i, s in enumerate(supplies):
        if s:
            network.add_arc(source, i, s, 0.0)
    transport = {}
    for i in range(a):
        if not supplies[i]:
            continue
        for j in range(b):
            if demands[j]:
                transport[(i, j)] = network.add_arc(i, a + j, scale, float(cost[i, j]))
    for j, d in enumerate(demands):
        if d:
            network.add_arc(a + j, sink, d, 0.0)

    sent = network.min_cost_flow(source, sink, scale)
    if sent != scale:
        raise InvalidDistribution(f"Flujo incompleto: {sent}/{scale}")

    entries = []
    total = 0.0
    for (i, j), arc in sorted(transport.items()):
        units = network.cap[arc ^ 1]
        if units:
            flow = Fraction(units, scale)
            entries.append(FlowEntry(i, j, flow, float(cost[i, j])))
            total += float(flow) * float(cost[i, j])

    logger.debug(f"[EMD] {a}×{b} resuelto, coste {total:.6g}")
    return FlowPlan(entries=entries, cost=total)
