"""
Isoset Toolkit - UI Components
Componentes visuales del dashboard
"""

from .isotree_chart import build_isotree_figure, render_isotree_chart
from .invariant_panel import render_pdd_table, render_isoset_table, render_distance_cards
from .scan_panel import render_scan_panel

__all__ = [
    'build_isotree_figure',
    'render_isotree_chart',
    'render_pdd_table',
    'render_isoset_table',
    'render_distance_cards',
    'render_scan_panel'
]
