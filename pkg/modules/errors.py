"""
Errores del dominio
Jerarquía de excepciones tipadas para conjuntos periódicos e invariantes

Todas heredan de IsosetError (ValueError), así el CLI y el dashboard
pueden capturar un único tipo y mostrar un diagnóstico limpio.
"""

from typing import Optional


class IsosetError(ValueError):
    """Error base de la librería"""
    pass


# =============================================================================
# GEOMETRÍA PERIÓDICA
# =============================================================================

class InvalidLattice(IsosetError):
    """Base singular o dimensión no soportada"""
    pass


class InvalidMotif(IsosetError):
    """Motivo vacío o con puntos coincidentes"""
    pass


class InvalidRadius(IsosetError):
    """Radio negativo o menor que la norma máxima del cluster"""
    pass


class InvalidMotifIndex(IsosetError):
    """Índice de punto del motivo fuera de rango"""
    pass


class DimensionMismatch(IsosetError):
    """Objetos de dimensiones distintas"""
    pass


# =============================================================================
# MÉTRICAS
# =============================================================================

class EmptyInput(IsosetError):
    """Conjunto de puntos vacío"""
    pass


class RadiusMismatch(IsosetError):
    """Clases de isometría construidas con radios distintos"""
    pass


class InvalidDistribution(IsosetError):
    """Pesos negativos o que no suman 1"""
    pass


class SizeMismatch(IsosetError):
    """Listas de puntos de distinto tamaño"""
    pass


class NeighborCountMismatch(IsosetError):
    """Matrices PDD con distinto número de vecinos k"""
    pass


# =============================================================================
# ENTRADA / SALIDA
# =============================================================================

class InvalidCell(IsosetError):
    """Parámetros de celda no positivos o ángulos fuera de (0°, 180°)"""
    pass


class ParseError(IsosetError):
    """
    Error de parseo de un documento cristalino.

    Args:
        message: Descripción del problema
        line: Línea del fichero (1-based) si se conoce
        field: Campo o tag afectado si se conoce
    """

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.detail = message
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"línea {line}")
        if field:
            location.append(f"campo '{field}'")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")
