"""
Isoset Toolkit - Core Modules
Invariantes de isometría y métricas continuas para conjuntos periódicos
"""

from .errors import (
    IsosetError, InvalidLattice, InvalidMotif, InvalidRadius, InvalidMotifIndex,
    DimensionMismatch, EmptyInput, RadiusMismatch, InvalidDistribution,
    SizeMismatch, NeighborCountMismatch, InvalidCell, ParseError,
)
from .lattice import (
    Lattice, PeriodicSet, CellGeometry, cell_geometry, unit_ball_volume,
    lattice_from_parameters, lattice_parameters, points_in_ball,
    min_interpoint_distance, packing_radius, random_orthogonal,
)
from .clusters import (
    Cluster, alpha_cluster, neighbor_distances, BridgeResult, bridge_length,
    StableRadiusBound, stable_radius_upper_bound, is_stable_radius,
    min_stable_radius, Isotree, isotree,
)
from .congruence import (
    OrthogonalMap, SymmetryGroup, cluster_isometry, cluster_symmetries,
    symmetry_group, alpha_partition, IsometryClass, Isoset, isoset,
    common_stable_radius, IsometryReport, isometry_report, isometric,
)
from .emd import FlowPlan, emd
from .metrics import (
    ApproxValue, approximation_factor, directed_hausdorff, hausdorff,
    sample_sphere, directed_rotation_distance, rotation_invariant_distance,
    max_min_directed_distance, cluster_distance, isoset_distance,
    scaled_invariant_distance, bottleneck_distance_finite, amd_distance,
)
from .pdd import PDDMatrix, pdd, amd, pdd_distance, LowerBoundReport, check_lower_bound
from .crystal_io import (
    CrystalDocument, parse_crystal, serialize_crystal, crystal_from_set,
    read_crystal, write_crystal, load_directory,
)
from .scanner import ScanPair, ScanReport, scan, amd_matrix
from .excel_report import generate_scan_excel, get_excel_filename

__all__ = [
    # Errores
    'IsosetError', 'InvalidLattice', 'InvalidMotif', 'InvalidRadius', 'InvalidMotifIndex',
    'DimensionMismatch', 'EmptyInput', 'RadiusMismatch', 'InvalidDistribution',
    'SizeMismatch', 'NeighborCountMismatch', 'InvalidCell', 'ParseError',
    # Geometría periódica
    'Lattice', 'PeriodicSet', 'CellGeometry', 'cell_geometry', 'unit_ball_volume',
    'lattice_from_parameters', 'lattice_parameters', 'points_in_ball',
    'min_interpoint_distance', 'packing_radius', 'random_orthogonal',
    # Clusters
    'Cluster', 'alpha_cluster', 'neighbor_distances', 'BridgeResult', 'bridge_length',
    'StableRadiusBound', 'stable_radius_upper_bound', 'is_stable_radius',
    'min_stable_radius', 'Isotree', 'isotree',
    # Congruencia
    'OrthogonalMap', 'SymmetryGroup', 'cluster_isometry', 'cluster_symmetries',
    'symmetry_group', 'alpha_partition', 'IsometryClass', 'Isoset', 'isoset',
    'common_stable_radius', 'IsometryReport', 'isometry_report', 'isometric',
    # Métricas
    'FlowPlan', 'emd',
    'ApproxValue', 'approximation_factor', 'directed_hausdorff', 'hausdorff',
    'sample_sphere', 'directed_rotation_distance', 'rotation_invariant_distance',
    'max_min_directed_distance', 'cluster_distance', 'isoset_distance',
    'scaled_invariant_distance', 'bottleneck_distance_finite', 'amd_distance',
    # PDD
    'PDDMatrix', 'pdd', 'amd', 'pdd_distance', 'LowerBoundReport', 'check_lower_bound',
    # Entrada / salida
    'CrystalDocument', 'parse_crystal', 'serialize_crystal', 'crystal_from_set',
    'read_crystal', 'write_crystal', 'load_directory',
    'ScanPair', 'ScanReport', 'scan', 'amd_matrix',
    'generate_scan_excel', 'get_excel_filename',
]
