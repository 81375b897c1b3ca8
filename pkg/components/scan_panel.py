"""
Scan Panel Component
Escaneo de duplicados sobre ficheros subidos, con tabla y exportación
"""

from typing import List

import streamlit as st

from modules.crystal_io import parse_crystal
from modules.errors import IsosetError
from modules.excel_report import generate_scan_excel, get_excel_filename
from modules.scanner import VERDICT_DISTINCT, ScanReport, scan
from utils.config import get_settings
from utils.formatting import truncate_text
from utils.validation import clamp, safe_divide


VERDICT_ICONS = {
    "isometric": "🟣 isométrico",
    "near-duplicate": "🟡 casi duplicado",
    "distinct": "○ distinto",
}


def render_scan_panel(uploaded_files: List) -> None:
    """
    Renderiza el modo Scanner

    Args:
        uploaded_files: Ficheros .json / .cif de st.file_uploader
    """
    st.markdown("### 🚀 Scanner de duplicados")
    st.caption("AMD → PDD → isoset: solo los pares que superan cada filtro pasan a la etapa siguiente.")

    if not uploaded_files or len(uploaded_files) < 2:
        st.info("Sube al menos dos cristales (.json o .cif)")
        return

    crystals = []
    for uploaded in uploaded_files:
        name = uploaded.name.rsplit(".", 1)[0]
        fmt = "cif" if uploaded.name.lower().endswith(".cif") else "json"
        try:
            doc = parse_crystal(uploaded.getvalue().decode("utf-8"), name=name, fmt=fmt)
            crystals.append((doc.id, doc.to_periodic_set()))
        except (IsosetError, UnicodeDecodeError) as e:
            st.error(f"❌ {uploaded.name}: {e}")
            return

    settings = get_settings()
    col1, col2, col3 = st.columns(3)
    with col1:
        k = st.number_input("Vecinos k", min_value=1, max_value=100,
                            value=int(clamp(settings.default_k, 1, 100)))
    with col2:
        t1 = st.number_input("Umbral AMD", min_value=0.0, value=settings.amd_threshold, format="%.4f")
    with col3:
        t2 = st.number_input("Umbral PDD", min_value=0.0, value=settings.pdd_threshold, format="%.4f")

    # El informe sobrevive a los reruns (toggle, descarga) mientras no cambien las entradas
    scan_key = (tuple(doc_id for doc_id, _ in crystals), int(k), float(t1), float(t2))
    if st.session_state.get("scan_key") != scan_key:
        st.session_state.pop("scan_report", None)

    if st.button("🔍 Escanear", type="primary", use_container_width=True):
        with st.spinner(f"Comparando {len(crystals) * (len(crystals) - 1) // 2} pares..."):
            try:
                st.session_state["scan_report"] = scan(crystals, k=int(k), amd_threshold=t1, pdd_threshold=t2)
                st.session_state["scan_key"] = scan_key
            except IsosetError as e:
                st.error(f"Error en el escaneo: {e}")
                return

    report = st.session_state.get("scan_report")
    if report is None:
        return
    render_scan_results(report)


def render_scan_results(report: ScanReport) -> None:
    """Métricas por etapa, tabla de pares y descarga Excel de un informe ya calculado"""
    stages = report.stage_counts()
    c1, c2, c3, c4 = st.columns(4)
    c1.metric("Pares", stages["pairs"])
    c2.metric("Pasan AMD", stages["amd"],
              help=f"{safe_divide(100 * stages['amd'], stages['pairs']):.0f}% de los pares")
    c3.metric("Pasan PDD", stages["pdd"],
              help=f"{safe_divide(100 * stages['pdd'], stages['amd']):.0f}% de los que pasan AMD")
    c4.metric("Isométricos", stages["isometric"])

    df = report.to_dataframe()
    if st.toggle("Solo duplicados", value=True, key="scan_only_flagged"):
        df = df[df["verdict"] != VERDICT_DISTINCT]
    df = df.assign(
        id_a=df["id_a"].map(lambda s: truncate_text(s, 40)),
        id_b=df["id_b"].map(lambda s: truncate_text(s, 40)),
        verdict=df["verdict"].map(VERDICT_ICONS),
    )
    st.dataframe(df, use_container_width=True, hide_index=True)

    st.download_button(
        "📊 Descargar Excel",
        data=generate_scan_excel(report, "dashboard"),
        file_name=get_excel_filename("dashboard"),
        mime="application/vnd.openxmlformats-officedocument.spreadsheetml.sheet",
    )
