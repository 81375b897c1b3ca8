"""
🔷 Isoset Toolkit
Compara cristales periódicos por sus invariantes de isometría

Dashboard de escritorio: dos cristales cara a cara o escaneo de un lote
"""

import streamlit as st

# Configuración de página (DEBE ser lo primero)
st.set_page_config(
    page_title="Isoset Toolkit",
    page_icon="🔷",
    layout="wide",
    initial_sidebar_state="expanded"
)

import logging

from modules.errors import IsosetError
from modules.crystal_io import CrystalDocument, parse_crystal
from modules.clusters import isotree, min_stable_radius
from modules.congruence import isoset
from modules.metrics import amd_distance, isoset_distance
from modules.pdd import check_lower_bound, pdd, pdd_distance

from components.isotree_chart import render_isotree_chart
from components.invariant_panel import render_distance_cards, render_isoset_table, render_pdd_table
from components.scan_panel import render_scan_panel

from utils.config import get_settings
from utils.validation import clamp

logger = logging.getLogger(__name__)


# ============================================
# UI Helper Functions
# ============================================

def section_header(title: str, icon: str, subtitle: str = "") -> None:
    """
    Renderiza un header de sección con estilo consistente

    Args:
        title: Título de la sección
        icon: Emoji o icono
        subtitle: Texto secundario opcional
    """
    st.markdown(f"### {icon} {title}")
    if subtitle:
        st.caption(subtitle)


def load_uploaded(uploaded) -> CrystalDocument:
    """Parsea un fichero subido; los errores se muestran y devuelven None"""
    if uploaded is None:
        return None
    name = uploaded.name.rsplit(".", 1)[0]
    fmt = "cif" if uploaded.name.lower().endswith(".cif") else "json"
    try:
        return parse_crystal(uploaded.getvalue().decode("utf-8"), name=name, fmt=fmt)
    except (IsosetError, UnicodeDecodeError) as e:
        st.error(f"❌ {uploaded.name}: {e}")
        return None


def render_crystal_column(doc: CrystalDocument, k: int) -> None:
    """PDD, isoset en el radio mínimo estable e isotree de un cristal"""
    pset = doc.to_periodic_set()
    st.markdown(f"#### {doc.id}")
    st.caption(f"{pset.dim}D · m = {pset.size} · formato {doc.source_format}")

    render_pdd_table(pdd(pset, k), doc.id)

    with st.spinner("Calculando radio estable..."):
        alpha = min_stable_radius(pset)
    render_isoset_table(isoset(pset, alpha))

    with st.expander("🌳 Isotree", expanded=False):
        render_isotree_chart(isotree(pset), doc.id)


def main():
    """Función principal de la aplicación"""
    settings = get_settings()

    with st.sidebar:
        st.markdown("## 🔷 Isoset Toolkit")

        st.markdown("#### 🎯 Modo")
        mode = st.radio(
            "Selecciona modo",
            options=["compare", "scanner"],
            format_func=lambda x: {
                "compare": "🔬 Comparar (2 cristales)",
                "scanner": "🚀 Scanner (lote)",
            }.get(x),
            label_visibility="collapsed",
            key="analysis_mode"
        )

        st.markdown("---")
        k = st.number_input("Vecinos k (PDD/AMD)", min_value=1, max_value=100,
                            value=int(clamp(settings.default_k, 1, 100)))
        compute_isoset = st.checkbox("Calcular EMD de isosets", value=True,
                                     help="Más lento: compara clusters con búsqueda de rotaciones")

        st.markdown("---")
        st.markdown(
            '<p style="font-size: 0.75rem; color: #9CA3AF; text-align: center;">'
            'Isoset Toolkit v1.0</p>',
            unsafe_allow_html=True
        )

    if mode == "scanner":
        uploaded_files = st.file_uploader(
            "📁 Sube los cristales",
            type=["json", "cif"],
            accept_multiple_files=True,
        )
        render_scan_panel(uploaded_files)
        return

    section_header("Comparar cristales", "🔬", "JSON (isoset-crystal/1) o CIF con celda y coordenadas fraccionarias")
    col_a, col_b = st.columns(2)
    with col_a:
        doc_a = load_uploaded(st.file_uploader("Cristal A", type=["json", "cif"], key="crystal_a"))
    with col_b:
        doc_b = load_uploaded(st.file_uploader("Cristal B", type=["json", "cif"], key="crystal_b"))

    if doc_a is None or doc_b is None:
        st.info("Sube dos cristales para compararlos")
        return

    try:
        S, Q = doc_a.to_periodic_set(), doc_b.to_periodic_set()
        pdd_s, pdd_q = pdd(S, int(k)), pdd(Q, int(k))
        amd_value = amd_distance(pdd_s.amd, pdd_q.amd)
        pdd_value = pdd_distance(pdd_s, pdd_q)

        isoset_value = bound = None
        if compute_isoset and S.dim == Q.dim:
            with st.spinner("Comparando isosets..."):
                isoset_value = isoset_distance(S, Q)
                bound = check_lower_bound(S, Q, isoset_value=isoset_value)

        section_header("Distancias", "📏")
        render_distance_cards(amd_value, pdd_value, isoset_value, bound)

        col_a, col_b = st.columns(2)
        with col_a:
            render_crystal_column(doc_a, int(k))
        with col_b:
            render_crystal_column(doc_b, int(k))
    except IsosetError as e:
        logger.warning(f"[App] {e}")
        st.error(f"❌ {e}")


if __name__ == "__main__":
    main()
