"""
Módulo centralizado de funciones de formateo
Distancias, pesos racionales y órdenes de grupos para CLI, Excel y dashboard
"""

import math
from fractions import Fraction
from typing import Optional, Union


def format_distance(value: Union[int, float, None], decimals: int = 6) -> str:
    """
    Formatea una distancia

    Args:
        value: Distancia (None si la etapa no se calculó)
        decimals: Cifras significativas

    Returns:
        String formateado (ej: "0.414214") o "N/A"
    """
    if value is None:
        return "N/A"
    try:
        value = float(value)
    except (ValueError, TypeError):
        return "N/A"
    if math.isinf(value):
        return "∞"
    return f"{value:.{decimals}g}"


def format_weight(weight: Union[Fraction, float, None]) -> str:
    """Peso de una clase como fracción k/m"""
    if weight is None:
        return "N/A"
    if isinstance(weight, Fraction):
        return f"{weight.numerator}/{weight.denominator}"
    frac = Fraction(float(weight)).limit_denominator(1000)
    return f"{frac.numerator}/{frac.denominator}"


def format_order(order: Optional[float]) -> str:
    """Orden de un grupo de simetría; infinito para grupos continuos"""
    if order is None:
        return "N/A"
    if math.isinf(order):
        return "∞ (continuo)"
    return str(int(order))


def format_approx(value: Optional[float], factor: Optional[float]) -> str:
    """Valor con su factor garantizado (ej: "0.517638 (η = 2)")"""
    if value is None:
        return "N/A"
    if factor is None or factor == 1:
        return format_distance(value)
    return f"{format_distance(value)} (η = {factor:g})"


def truncate_text(text: str, max_length: int = 50, suffix: str = "...") -> str:
    """
    Trunca texto a una longitud máxima

    Args:
        text: Texto a truncar
        max_length: Longitud máxima
        suffix: Sufijo a añadir si se trunca

    Returns:
        Texto truncado
    """
    if not text:
        return ""
    text = str(text)
    if len(text) <= max_length:
        return text
    return text[:max_length - len(suffix)] + suffix
