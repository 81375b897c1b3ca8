"""
Configuración centralizada
Carga config/defaults.yaml y aplica overrides del entorno (.env)

Uso:
    from utils.config import get_settings
    settings = get_settings()
    settings.tau_geom
"""

import os
import logging
from dataclasses import dataclass, fields
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from .validation import safe_float, safe_int

logger = logging.getLogger(__name__)

CONFIG_PATH = Path(__file__).parent.parent / "config" / "defaults.yaml"
ENV_PREFIX = "ISOSET_"


@dataclass(frozen=True)
class Settings:
    """Parámetros globales de la librería"""
    tau_geom: float = 1e-9
    tau_iso_relative: float = 1e-6
    row_collapse_tol: float = 1e-9
    default_k: int = 12
    delta: float = 0.0
    refine_rotations: bool = False
    amd_threshold: float = 0.01
    pdd_threshold: float = 0.01
    isometric_threshold: float = 1e-6
    scan_workers: int = 4
    log_level: str = "WARNING"


def _coerce(value: Any, default: Any) -> Any:
    """Convierte un valor (YAML o env) al tipo del valor por defecto"""
    if isinstance(default, bool):
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "si", "sí", "on")
        return bool(value)
    if isinstance(default, int):
        return safe_int(value, default=default)
    if isinstance(default, float):
        return safe_float(value, default=default)
    return str(value)


def load_settings(path: Optional[Path] = None, use_env: bool = True) -> Settings:
    """
    Construye Settings desde YAML + entorno.

    Args:
        path: Fichero YAML (por defecto config/defaults.yaml)
        use_env: Si aplicar overrides ISOSET_* del entorno

    Returns:
        Settings inmutable
    """
    path = path or CONFIG_PATH
    raw: Dict[str, Any] = {}

    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
    except FileNotFoundError:
        logger.warning(f"[Config] {path} no encontrado, usando valores por defecto")
    except yaml.YAMLError as e:
        logger.warning(f"[Config] YAML inválido en {path}: {e}")

    if use_env:
        load_dotenv()

    defaults = Settings()
    values: Dict[str, Any] = {}
    for f in fields(Settings):
        default = getattr(defaults, f.name)
        value = raw.get(f.name, default)
        if use_env:
            env_value = os.getenv(ENV_PREFIX + f.name.upper())
            if env_value is not None:
                value = env_value
        values[f.name] = _coerce(value, default)

    return Settings(**values)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings cacheados del proceso"""
    return load_settings()
