"""
Invariant Panel Component
Tablas de PDD e isoset y tarjetas de distancias entre dos cristales
"""

from typing import Optional

import pandas as pd
import streamlit as st

from modules.congruence import Isoset
from modules.metrics import ApproxValue
from modules.pdd import LowerBoundReport, PDDMatrix
from utils.formatting import format_approx, format_distance, format_weight


def render_pdd_table(matrix: PDDMatrix, crystal_id: str) -> None:
    """
    Renderiza el PDD como tabla con descarga CSV

    Args:
        matrix: PDD calculado
        crystal_id: Identificador del cristal (claves de widgets)
    """
    st.markdown(f"##### PDD (k = {matrix.k})")
    df = matrix.to_dataframe()
    df.insert(0, "peso", [format_weight(w) for w in matrix.weights])
    st.dataframe(df.drop(columns=["weight"]), use_container_width=True, hide_index=True)
    st.download_button(
        "📥 PDD + AMD (CSV)",
        data=matrix.to_csv(include_amd=True),
        file_name=f"{crystal_id}_pdd_k{matrix.k}.csv",
        mime="text/csv",
        key=f"pdd_csv_{crystal_id}",
    )


def render_isoset_table(invariant: Isoset) -> None:
    """Una fila por clase de isometría: peso, tamaño del cluster y puntos del motivo"""
    st.markdown(f"##### Isoset (α = {invariant.radius:.4f})")
    rows = [
        {
            "peso": format_weight(cls.weight),
            "puntos en el cluster": cls.representative.size,
            "motivo": ", ".join(str(i) for i in cls.members),
        }
        for cls in invariant.canonical_classes()
    ]
    st.dataframe(pd.DataFrame(rows), use_container_width=True, hide_index=True)


def render_distance_cards(
    amd_value: float,
    pdd_value: float,
    isoset_value: Optional[ApproxValue] = None,
    bound: Optional[LowerBoundReport] = None,
) -> None:
    """Tarjetas con las distancias AMD, PDD e isoset"""
    col1, col2, col3 = st.columns(3)
    with col1:
        st.metric("AMD (L∞)", format_distance(amd_value))
    with col2:
        st.metric("EMD PDD", format_distance(pdd_value))
    with col3:
        if isoset_value is None:
            st.metric("EMD isoset", "N/A")
        else:
            st.metric("EMD isoset", format_distance(isoset_value.value),
                      help=f"Cota inferior {format_distance(isoset_value.lower)}; "
                           f"{format_approx(isoset_value.value, isoset_value.factor)}")

    if bound is not None:
        if not bound.applicable:
            st.caption("Cota inferior PDD no aplicable: " + "; ".join(bound.notes))
        elif bound.holds:
            st.success(f"✅ EMD(PDD; k = {bound.k_min}) ≤ EMD(isoset)")
        else:
            st.warning(f"⚠️ EMD(PDD; k = {bound.k_min}) supera la EMD de isosets calculada")
