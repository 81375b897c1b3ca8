"""
Periodic Core
Retículos, celdas unidad y conjuntos periódicos S = Λ + M en 1D-3D

Las coordenadas del motivo se guardan fraccionarias y toda la geometría
se calcula en cartesianas (doble precisión). La base es una matriz n×n
cuyas COLUMNAS son los vectores v₁…vₙ.
"""

import math
import logging
import itertools
from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gamma

from utils.config import get_settings
from utils.validation import validate_cell_angles, validate_cell_lengths
from .errors import (
    DimensionMismatch, InvalidCell, InvalidLattice, InvalidMotif,
    InvalidRadius,
)

logger = logging.getLogger(__name__)

MAX_DIM = 3


# =============================================================================
# RETÍCULO
# =============================================================================

@dataclass(frozen=True, eq=False)
class Lattice:
    """Retículo Λ generado por las columnas de `basis`"""
    basis: np.ndarray

    def __post_init__(self):
        basis = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
            raise InvalidLattice(f"La base debe ser cuadrada, recibida {basis.shape}")
        if not 1 <= basis.shape[0] <= MAX_DIM:
            raise InvalidLattice(f"Dimensión {basis.shape[0]} no soportada (1-{MAX_DIM})")
        if not np.all(np.isfinite(basis)):
            raise InvalidLattice("La base contiene valores no finitos")
        if abs(np.linalg.det(basis)) <= get_settings().tau_geom:
            raise InvalidLattice("Base singular (|det| ≈ 0)")
        basis = basis.copy()
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def vectors(self) -> np.ndarray:
        """Vectores de la base como filas"""
        return self.basis.T

    @property
    def volume(self) -> float:
        return float(abs(np.linalg.det(self.basis)))

    def to_cartesian(self, fractional: np.ndarray) -> np.ndarray:
        return np.asarray(fractional, dtype=float) @ self.basis.T

    def to_fractional(self, cartesian: np.ndarray) -> np.ndarray:
        cartesian = np.atleast_2d(np.asarray(cartesian, dtype=float))
        return np.linalg.solve(self.basis, cartesian.T).T


# =============================================================================
# CONJUNTO PERIÓDICO
# =============================================================================

@dataclass(frozen=True, eq=False)
class PeriodicSet:
    """
    Conjunto periódico S = Λ + M.

    Args:
        lattice: Retículo de traslaciones
        motif: Puntos del motivo en coordenadas fraccionarias (m×n),
            reducidos a [0, 1)
        labels: Etiquetas opacas por punto (no intervienen en la geometría)
    """
    lattice: Lattice
    motif: np.ndarray
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if not isinstance(self.lattice, Lattice):
            object.__setattr__(self, "lattice", Lattice(self.lattice))
        n = self.lattice.dim

        motif = np.asarray(self.motif, dtype=float)
        if motif.size == 0:
            raise InvalidMotif("El motivo está vacío")
        motif = motif.reshape(-1, n) if motif.ndim < 2 else motif
        if motif.shape[1] != n:
            raise DimensionMismatch(
                f"Motivo de dimensión {motif.shape[1]} con retículo de dimensión {n}"
            )
        if not np.all(np.isfinite(motif)):
            raise InvalidMotif("El motivo contiene coordenadas no finitas")

        motif = np.mod(motif, 1.0)
        motif[motif >= 1.0] = 0.0
        motif.setflags(write=False)
        object.__setattr__(self, "motif", motif)

        if self.labels is not None:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != motif.shape[0]:
                raise InvalidMotif(
                    f"{len(labels)} etiquetas para {motif.shape[0]} puntos del motivo"
                )
            object.__setattr__(self, "labels", labels)

        self._check_distinct()

    def _check_distinct(self):
        tol = get_settings().tau_geom
        m = self.size
        for i in range(m):
            for j in range(i + 1, m):
                diff = self.motif[i] - self.motif[j]
                diff -= np.round(diff)
                if np.linalg.norm(self.lattice.to_cartesian(diff)) <= tol:
                    raise InvalidMotif(f"Los puntos {i} y {j} del motivo coinciden")

    # -------------------------------------------------------------------------
    # Constructores
    # -------------------------------------------------------------------------

    @classmethod
    def from_cartesian(cls, basis, points, labels: Optional[Sequence[str]] = None) -> "PeriodicSet":
        """Construye el conjunto a partir de puntos cartesianos del motivo"""
        lattice = Lattice(basis)
        fractional = lattice.to_fractional(np.asarray(points, dtype=float).reshape(-1, lattice.dim))
        return cls(lattice, fractional, labels)

    @classmethod
    def from_lattice(cls, basis) -> "PeriodicSet":
        """Retículo como conjunto periódico con un único punto en el origen"""
        lattice = Lattice(basis)
        return cls(lattice, np.zeros((1, lattice.dim)))

    # -------------------------------------------------------------------------
    # Propiedades
    # -------------------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.lattice.dim

    @property
    def size(self) -> int:
        """Número m de puntos del motivo"""
        return self.motif.shape[0]

    @property
    def cartesian_motif(self) -> np.ndarray:
        return self.lattice.to_cartesian(self.motif)

    # -------------------------------------------------------------------------
    # Transformaciones
    # -------------------------------------------------------------------------

    def transformed(self, rotation: np.ndarray, translation: Optional[np.ndarray] = None) -> "PeriodicSet":
        """
        Copia isométrica x ↦ R·x + t.

        Args:
            rotation: Matriz ortogonal n×n
            translation: Vector de traslación (por defecto 0)

        Returns:
            Nuevo PeriodicSet con base R·B y el motivo desplazado
        """
        rotation = np.asarray(rotation, dtype=float)
        if rotation.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"Rotación {rotation.shape} para dimensión {self.dim}")
        basis = rotation @ self.lattice.basis
        points = self.cartesian_motif @ rotation.T
        if translation is not None:
            points = points + np.asarray(translation, dtype=float).reshape(1, self.dim)
        return PeriodicSet.from_cartesian(basis, points, self.labels)

    def scaled(self, factor: float) -> "PeriodicSet":
        """Copia homotética por `factor` > 0"""
        if factor <= 0:
            raise InvalidLattice(f"Factor de escala no positivo: {factor}")
        return PeriodicSet(Lattice(self.lattice.basis * factor), self.motif.copy(), self.labels)

    def supercell(self, multipliers: Sequence[int]) -> "PeriodicSet":
        """
        Mismo conjunto expresado con una celda ampliada k₁×…×kₙ.

        El motivo se replica, por lo que m crece en el producto de los
        multiplicadores.
        """
        multipliers = [int(k) for k in multipliers]
        if len(multipliers) != self.dim or any(k < 1 for k in multipliers):
            raise InvalidLattice(f"Multiplicadores inválidos: {multipliers}")

        basis = self.lattice.basis * np.asarray(multipliers, dtype=float)[np.newaxis, :]
        scale = np.asarray(multipliers, dtype=float)
        motif, labels = [], []
        for shift in itertools.product(*(range(k) for k in multipliers)):
            motif.append((self.motif + np.asarray(shift, dtype=float)) / scale)
            if self.labels is not None:
                labels.extend(self.labels)
        return PeriodicSet(Lattice(basis), np.vstack(motif), tuple(labels) if self.labels else None)


# =============================================================================
# GEOMETRÍA DE LA CELDA
# =============================================================================

def unit_ball_volume(n: int) -> float:
    """Vₙ = π^{n/2} / Γ(n/2 + 1)"""
    return float(math.pi ** (n / 2.0) / gamma(n / 2.0 + 1.0))


@dataclass(frozen=True)
class CellGeometry:
    """Constantes de la celda unidad"""
    dim: int
    max_edge: float
    diameter: float
    volume: float
    unit_ball_volume: float

    def nu(self, alpha: float) -> float:
        """Factor ν(α) = (α + d)ⁿ Vₙ / Vol, cota del número de celdas del α-cluster"""
        return (alpha + self.diameter) ** self.dim * self.unit_ball_volume / self.volume


def _diagonals(basis: np.ndarray) -> np.ndarray:
    n = basis.shape[0]
    signs = [list(s) + [1.0] for s in itertools.product((-1.0, 1.0), repeat=n - 1)]
    return np.asarray(signs) @ basis.T


def cell_geometry(pset) -> CellGeometry:
    """
    Calcula b, d, Vol y Vₙ de la celda dada.

    Args:
        pset: PeriodicSet o Lattice

    Returns:
        CellGeometry
    """
    lattice = pset.lattice if isinstance(pset, PeriodicSet) else pset
    if not isinstance(lattice, Lattice):
        lattice = Lattice(lattice)
    basis = lattice.basis
    return CellGeometry(
        dim=lattice.dim,
        max_edge=float(np.max(np.linalg.norm(basis, axis=0))),
        diameter=float(np.max(np.linalg.norm(_diagonals(basis), axis=1))),
        volume=lattice.volume,
        unit_ball_volume=unit_ball_volume(lattice.dim),
    )


def lattice_from_parameters(lengths: Sequence[float], angles: Sequence[float] = ()) -> Lattice:
    """
    Convierte parámetros de celda en una base.

    Convención cristalográfica: a sobre x, b en el plano xy, c completa
    la terna. Ángulos en grados: 2D usa (γ,), 3D usa (α, β, γ).

    Raises:
        InvalidCell: longitudes no positivas, ángulos fuera de (0°, 180°)
            o parámetros geométricamente imposibles
    """
    lengths = list(lengths)
    angles = list(angles)
    n = len(lengths)
    expected_angles = {1: 0, 2: 1, 3: 3}.get(n)
    if expected_angles is None:
        raise InvalidCell(f"Se esperan 1-3 longitudes, recibidas {n}")
    if len(angles) != expected_angles:
        raise InvalidCell(f"Celda {n}D requiere {expected_angles} ángulos, recibidos {len(angles)}")

    problems = validate_cell_lengths(lengths) + validate_cell_angles(angles)
    if problems:
        raise InvalidCell("; ".join(problems))

    lengths = [float(x) for x in lengths]
    radians = [math.radians(float(x)) for x in angles]

    if n == 1:
        return Lattice(np.array([[lengths[0]]]))

    if n == 2:
        a, b = lengths
        (gam,) = radians
        rows = [[a, 0.0], [b * math.cos(gam), b * math.sin(gam)]]
        return Lattice(np.array(rows).T)

    a, b, c = lengths
    alp, bet, gam = radians
    cos_a, cos_b, cos_g = math.cos(alp), math.cos(bet), math.cos(gam)
    sin_g = math.sin(gam)
    cy = (cos_a - cos_b * cos_g) / sin_g
    cz_sq = 1.0 - cos_b ** 2 - cy ** 2
    if cz_sq <= 0:
        raise InvalidCell("Los ángulos (α, β, γ) no definen una celda 3D válida")
    rows = [
        [a, 0.0, 0.0],
        [b * cos_g, b * sin_g, 0.0],
        [c * cos_b, c * cy, c * math.sqrt(cz_sq)],
    ]
    return Lattice(np.array(rows).T)


def lattice_parameters(lattice: Lattice) -> Tuple[List[float], List[float]]:
    """Inversa de lattice_from_parameters: (longitudes, ángulos en grados)"""
    vectors = lattice.vectors
    lengths = [float(np.linalg.norm(v)) for v in vectors]

    def angle(u, v):
        cos = float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
        return math.degrees(math.acos(max(-1.0, min(1.0, cos))))

    if lattice.dim == 1:
        return lengths, []
    if lattice.dim == 2:
        return lengths, [angle(vectors[0], vectors[1])]
    return lengths, [
        angle(vectors[1], vectors[2]),
        angle(vectors[0], vectors[2]),
        angle(vectors[0], vectors[1]),
    ]


# =============================================================================
# PUNTOS EN UNA BOLA
# =============================================================================

def _enumerate_ball(
    pset: PeriodicSet,
    center: np.ndarray,
    radius: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Recorre en anchura las celdas U+v que pueden cortar la bola cerrada.

    Returns:
        (puntos cartesianos k×n, índices de motivo k, traslaciones enteras k×n)
    """
    tol = get_settings().tau_geom
    lattice = pset.lattice
    n = pset.dim
    half_diameter = cell_geometry(lattice).diameter / 2.0
    reach = radius + half_diameter + tol

    motif_cart = pset.cartesian_motif
    start = tuple(int(x) for x in np.floor(lattice.to_fractional(center)[0]))
    neighbours = [s for s in itertools.product((-1, 0, 1), repeat=n) if any(s)]

    points, indices, shifts = [], [], []
    seen = {start}
    queue = deque([start])
    while queue:
        cell = queue.popleft()
        shift = np.asarray(cell, dtype=float)
        cell_center = lattice.to_cartesian(shift + 0.5)
        if np.linalg.norm(cell_center - center) > reach:
            continue

        candidates = motif_cart + lattice.to_cartesian(shift)
        distances = np.linalg.norm(candidates - center, axis=1)
        for idx in np.nonzero(distances <= radius + tol)[0]:
            points.append(candidates[idx])
            indices.append(int(idx))
            shifts.append(cell)

        for step in neighbours:
            nxt = tuple(c + s for c, s in zip(cell, step))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)

    if not points:
        return np.zeros((0, n)), np.zeros(0, dtype=int), np.zeros((0, n), dtype=int)
    return np.asarray(points), np.asarray(indices, dtype=int), np.asarray(shifts, dtype=int)


def _as_center(pset: PeriodicSet, center) -> np.ndarray:
    center = np.asarray(center, dtype=float).reshape(-1)
    if center.shape[0] != pset.dim:
        raise DimensionMismatch(f"Centro de dimensión {center.shape[0]} para conjunto {pset.dim}D")
    return center


def points_in_ball(pset: PeriodicSet, center, radius: float) -> np.ndarray:
    """
    Todos los puntos q ∈ S con |q − center| ≤ radius.

    Los puntos en la frontera (dentro de tau_geom) se incluyen.

    Args:
        pset: Conjunto periódico
        center: Punto cualquiera de ℝⁿ
        radius: Radio α ≥ 0

    Returns:
        Array k×n ordenado por distancia al centro y luego lexicográficamente

    Raises:
        InvalidRadius: radio negativo
    """
    if radius < 0 or not math.isfinite(radius):
        raise InvalidRadius(f"Radio inválido: {radius}")
    center = _as_center(pset, center)
    points, _, _ = _enumerate_ball(pset, center, float(radius))
    if len(points) == 0:
        return points
    return sort_points(points, center)


def sort_points(points: np.ndarray, origin: Optional[np.ndarray] = None) -> np.ndarray:
    """Ordena por (norma respecto a origin, componentes)"""
    origin = np.zeros(points.shape[1]) if origin is None else origin
    rel = points - origin
    norms = np.round(np.linalg.norm(rel, axis=1), 9)
    keys = [np.round(rel[:, c], 9) for c in reversed(range(points.shape[1]))]
    order = np.lexsort(keys + [norms])
    return points[order]


def min_interpoint_distance(pset: PeriodicSet) -> float:
    """
    Distancia mínima entre dos puntos distintos de S.

    El radio de empaquetamiento es la mitad de este valor.
    """
    tol = get_settings().tau_geom
    # p + v (v el vector de base más corto) está siempre a distancia ≤ b
    radius = cell_geometry(pset).max_edge
    best = math.inf
    for center in pset.cartesian_motif:
        points, _, _ = _enumerate_ball(pset, center, radius)
        distances = np.linalg.norm(points - center, axis=1)
        distances = distances[distances > tol]
        if distances.size:
            best = min(best, float(distances.min()))
    return best


def packing_radius(pset: PeriodicSet) -> float:
    return min_interpoint_distance(pset) / 2.0


def random_orthogonal(dim: int, rng: np.random.Generator, allow_reflection: bool = True) -> np.ndarray:
    """Matriz ortogonal aleatoria (QR de una gaussiana)"""
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    q = q * np.sign(np.diag(r))[np.newaxis, :]
    if not allow_reflection and np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q

