"""
Isotree Chart Component
Gráfico escalonado de clases de isometría y simetrías frente al radio α
"""

import math
from typing import Optional

import plotly.graph_objects as go
from plotly.subplots import make_subplots
import streamlit as st

from modules.clusters import Isotree
from utils.formatting import format_order


def build_isotree_figure(tree: Isotree, title: Optional[str] = None, height: int = 420) -> go.Figure:
    """
    Construye la figura del isotree.

    Arriba: número de clases de la α-partición (escalón en cada radio
    crítico). Abajo: |Sym(S, p; α)| por punto del motivo; el grupo
    continuo se dibuja en el borde superior.

    Args:
        tree: Isotree calculado
        title: Título opcional
        height: Altura en pixels

    Returns:
        Figura de Plotly
    """
    radii = list(tree.critical_radii) + [tree.max_radius]
    counts = tree.class_counts()
    counts = counts + counts[-1:]

    fig = make_subplots(rows=2, cols=1, shared_xaxes=True, vertical_spacing=0.08,
                        row_heights=[0.6, 0.4])

    fig.add_trace(go.Scatter(
        x=radii,
        y=counts,
        mode='lines+markers',
        line=dict(color='#7C3AED', width=2, shape='hv'),
        name='Clases',
        hovertemplate='α = %{x:.4f}<br>Clases: %{y}<extra></extra>'
    ), row=1, col=1)

    finite = [o for row in tree.symmetry_orders for o in row if not math.isinf(o)]
    ceiling = (max(finite) if finite else 1) * 1.5
    size = len(tree.symmetry_orders[0]) if tree.symmetry_orders else 0
    for i in range(size):
        orders = [row[i] for row in tree.symmetry_orders]
        orders = orders + orders[-1:]
        fig.add_trace(go.Scatter(
            x=radii,
            y=[ceiling if math.isinf(o) else o for o in orders],
            mode='lines',
            line=dict(width=1.5, shape='hv'),
            name=f'Sym p{i}',
            hovertemplate='α = %{x:.4f}<br>|Sym| = %{y}<extra></extra>'
        ), row=2, col=1)

    fig.update_layout(
        title=title,
        height=height,
        hovermode='x unified',
        plot_bgcolor='white',
        paper_bgcolor='white',
        margin=dict(l=40, r=40, t=40 if title else 20, b=40),
        legend=dict(orientation="h", yanchor="bottom", y=1.02, xanchor="right", x=1),
    )
    fig.update_xaxes(showgrid=True, gridcolor='rgba(0,0,0,0.05)')
    fig.update_xaxes(title='α', row=2, col=1)
    fig.update_yaxes(title='Clases', row=1, col=1, rangemode='tozero')
    fig.update_yaxes(title='|Sym|', row=2, col=1, rangemode='tozero')
    return fig


def render_isotree_chart(tree: Isotree, crystal_id: str, height: int = 420) -> None:
    """Renderiza el isotree con métricas de cabecera"""
    if not tree.critical_radii:
        st.info("No hay radios críticos que mostrar")
        return

    col1, col2, col3, col4 = st.columns(4)
    with col1:
        st.metric("Radios críticos", len(tree.critical_radii))
    with col2:
        st.metric("Clases finales", tree.class_counts()[-1])
    with col3:
        st.metric("|Sym(p₀)| final", format_order(tree.symmetry_orders[-1][0]))
    with col4:
        st.metric("α máximo", f"{tree.max_radius:.4f}")

    st.plotly_chart(build_isotree_figure(tree, height=height), use_container_width=True,
                    key=f"isotree_{crystal_id}")
