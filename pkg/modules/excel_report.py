"""
Excel Report Module
Exporta el informe de escaneo a Excel con una hoja por etapa
"""

import pandas as pd
from io import BytesIO
from datetime import datetime
from typing import Optional

from utils.formatting import truncate_text
from utils.validation import sanitize_filename
from .scanner import ScanReport, VERDICT_DISTINCT


def generate_scan_excel(report: ScanReport, title: Optional[str] = None) -> BytesIO:
    """
    Genera el Excel del escaneo.

    Hojas: Resumen, AMD (todos los pares), PDD (pares que pasan el filtro
    AMD), Isoset (pares confirmados) y Duplicados.

    Args:
        report: Resultado de scan()
        title: Nombre del conjunto de datos para el resumen

    Returns:
        BytesIO con el archivo Excel
    """
    output = BytesIO()
    pairs = report.to_dataframe()
    stages = report.stage_counts()
    counts = report.counts()

    with pd.ExcelWriter(output, engine='openpyxl') as writer:
        # ========== HOJA 1: RESUMEN ==========
        summary = pd.DataFrame({
            "Métrica": [
                "Conjunto",
                "Fecha",
                "Cristales",
                "Vecinos k",
                "Umbral AMD (T1)",
                "Umbral PDD (T2)",
                "Umbral isométrico",
                "Pares",
                "Pasan AMD",
                "Pasan PDD",
                "Casi duplicados",
                "Isométricos",
            ],
            "Valor": [
                _clean_text(title or "scan"),
                datetime.now().strftime("%Y-%m-%d %H:%M"),
                len(report.ids),
                report.k,
                report.amd_threshold,
                report.pdd_threshold,
                report.isometric_threshold,
                stages["pairs"],
                stages["amd"],
                stages["pdd"],
                counts["near-duplicate"],
                counts["isometric"],
            ],
        })
        summary.to_excel(writer, sheet_name="Resumen", index=False)

        # ========== HOJA 2: AMD ==========
        if not pairs.empty:
            pairs[["id_a", "id_b", "amd_linf", "verdict"]].to_excel(writer, sheet_name="AMD", index=False)

            # ========== HOJA 3: PDD ==========
            pdd_stage = pairs[pairs["pdd_emd"].notna()]
            if not pdd_stage.empty:
                pdd_stage[["id_a", "id_b", "amd_linf", "pdd_emd", "verdict"]].to_excel(
                    writer, sheet_name="PDD", index=False
                )

            # ========== HOJA 4: ISOSET ==========
            iso_stage = pairs[pairs["isoset_emd"].notna()]
            if not iso_stage.empty:
                iso_stage.to_excel(writer, sheet_name="Isoset", index=False)

            # ========== HOJA 5: DUPLICADOS ==========
            flagged = pairs[pairs["verdict"] != VERDICT_DISTINCT]
            if not flagged.empty:
                flagged.to_excel(writer, sheet_name="Duplicados", index=False)

    output.seek(0)
    return output


def _clean_text(text: str) -> str:
    """Limpia texto para Excel"""
    if not text:
        return ""
    text = str(text).replace('\n', ' ').replace('\r', ' ')
    return truncate_text(text, 500)


def get_excel_filename(title: str) -> str:
    """Genera nombre de archivo para el Excel"""
    safe_title = sanitize_filename(title, default="scan")[:30]
    date_str = datetime.now().strftime("%Y%m%d")
    return f"isoset_scan_{safe_title}_{date_str}.xlsx"
