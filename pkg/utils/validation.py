"""
Validation & Sanitization Module
Funciones para validar y sanitizar datos de entrada
Números de CIF con incertidumbre, parámetros de celda, nombres de fichero
"""

import re
import math
from typing import Any, List, Optional, Sequence


# ============================================================================
# VALIDACIÓN Y COERCIÓN DE NÚMEROS
# ============================================================================

# "1.234(5)", "-0.5", "1e-9", ".25"
_NUMBER_RE = re.compile(r'^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?:\(\d+\))?\s*$')


def parse_number(value: Any) -> Optional[float]:
    """
    Parsea un número tal como aparece en CIF/JSON

    Acepta la notación de incertidumbre de CIF ("1.2345(6)" → 1.2345)
    y notación científica. Devuelve None si no es un número finito.

    Args:
        value: str, int o float

    Returns:
        Float o None
    """
    if value is None or isinstance(value, bool):
        return None

    if isinstance(value, (int, float)):
        value = float(value)
        return value if math.isfinite(value) else None

    match = _NUMBER_RE.match(str(value))
    if not match:
        return None
    try:
        parsed = float(match.group(1))
    except ValueError:
        return None
    return parsed if math.isfinite(parsed) else None


def safe_float(value: Any, default: float = 0.0) -> float:
    """parse_number con valor por defecto (campos de formulario, env vars)"""
    parsed = parse_number(value)
    return default if parsed is None else parsed


def safe_int(value: Any, default: int = 0) -> int:
    """Como safe_float, truncando hacia cero ("7.9" → 7)"""
    return int(safe_float(value, float(default)))


def safe_divide(numerator: Any, denominator: Any, default: float = 0.0) -> float:
    """
    Cociente que nunca lanza: denominador nulo o resultado no finito
    devuelven `default` (porcentajes de etapas del scanner)
    """
    den = safe_float(denominator)
    if den == 0:
        return default
    result = safe_float(numerator) / den
    return result if math.isfinite(result) else default


def clamp(value: Any, min_val: float, max_val: float, default: float = 0.0) -> float:
    """Lleva `value` al intervalo [min_val, max_val]; lo no numérico cuenta como `default`"""
    return min(max_val, max(min_val, safe_float(value, default)))


# ============================================================================
# VALIDACIÓN DE CELDAS Y COORDENADAS
# ============================================================================

def validate_cell_lengths(lengths: Sequence[Any]) -> List[str]:
    """
    Valida longitudes de celda

    Returns:
        Lista de errores (vacía si todo es correcto)
    """
    errors = []
    for i, value in enumerate(lengths):
        parsed = parse_number(value)
        if parsed is None:
            errors.append(f"longitud {i}: '{value}' no es un número")
        elif parsed <= 0:
            errors.append(f"longitud {i}: {parsed} debe ser > 0")
    return errors


def validate_cell_angles(angles: Sequence[Any]) -> List[str]:
    """
    Valida ángulos de celda en grados, abiertos en (0°, 180°)

    Returns:
        Lista de errores (vacía si todo es correcto)
    """
    errors = []
    for i, value in enumerate(angles):
        parsed = parse_number(value)
        if parsed is None:
            errors.append(f"ángulo {i}: '{value}' no es un número")
        elif not 0.0 < parsed < 180.0:
            errors.append(f"ángulo {i}: {parsed}° fuera de (0°, 180°)")
    return errors


def reduce_fractional(value: float) -> float:
    """
    Reduce una coordenada fraccionaria a [0, 1)

    Returns:
        value mod 1, con -0.0 y 1.0 normalizados a 0.0
    """
    reduced = value % 1.0
    if reduced >= 1.0 or reduced == 0.0:
        return 0.0
    return reduced


# ============================================================================
# SANITIZACIÓN DE STRINGS
# ============================================================================

_UNSAFE_FILENAME_RE = re.compile(r'[<>:"/\\|?*\x00-\x1f]')


def sanitize_filename(filename: Any, default: str = "export") -> str:
    """
    Nombre de fichero seguro para descargas y exportaciones

    Quita los caracteres reservados en Windows/Unix, cambia espacios por
    '_' y limita a 100 caracteres.
    """
    if filename is None:
        return default
    cleaned = _UNSAFE_FILENAME_RE.sub('', str(filename)).strip()
    cleaned = re.sub(r'\s+', '_', cleaned)[:100]
    return cleaned or default


def sanitize_identifier(text: Any, default: str = "crystal") -> str:
    """
    Normaliza un identificador de cristal (sin espacios ni caracteres de control)

    Returns:
        Identificador no vacío
    """
    if text is None:
        return default
    cleaned = "".join(c for c in str(text).strip() if c.isprintable())
    cleaned = re.sub(r'\s+', '_', cleaned)[:200]
    return cleaned or default
