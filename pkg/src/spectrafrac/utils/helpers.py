"""
Utility helper functions for spectrafrac
"""

import platform
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import psutil
import scipy


def get_platform_info() -> Dict[str, str]:
    return {
        "os": platform.system(),
        "platform": platform.platform(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "cpu_count": str(psutil.cpu_count(logical=True) or 1),
        "memory_total": str(psutil.virtual_memory().total),
    }


def available_cores() -> int:
    """Cores this process may use, falling back to the logical count."""
    try:
        return max(1, len(psutil.Process().cpu_affinity()))
    except (AttributeError, NotImplementedError, psutil.Error):
        return max(1, psutil.cpu_count(logical=True) or 1)


def resolve_jobs(jobs: Optional[int]) -> int:
    if jobs is None or jobs <= 0:
        return available_cores()
    return int(jobs)


def resolve_output_dir(output_dir: Optional[Path], base: str, command: str) -> Path:
    """Output directory for a run: the explicit one, or `<base>/<command>`."""
    path = Path(output_dir) if output_dir else Path(base) / command
    path.mkdir(parents=True, exist_ok=True)
    return path
