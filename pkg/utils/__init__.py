"""
Isoset Toolkit - Utilities
Conversión segura, formateo y configuración
"""

from .validation import (
    parse_number, safe_float, safe_int, safe_divide, clamp,
    validate_cell_lengths, validate_cell_angles, reduce_fractional,
    sanitize_filename, sanitize_identifier,
)
from .formatting import format_distance, format_weight, format_order, format_approx, truncate_text
from .config import Settings, get_settings, load_settings

__all__ = [
    'parse_number', 'safe_float', 'safe_int', 'safe_divide', 'clamp',
    'validate_cell_lengths', 'validate_cell_angles', 'reduce_fractional',
    'sanitize_filename', 'sanitize_identifier',
    'format_distance', 'format_weight', 'format_order', 'format_approx', 'truncate_text',
    'Settings', 'get_settings', 'load_settings',
]
