"""
Run history and run manifests for spectrafrac
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from .. import __version__
from ..utils.helpers import get_platform_info
from ..utils.io import PathLike, write_json

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


@dataclass
class RunEntry:
    """Single run record"""
    timestamp: str
    command: str
    arguments: str
    success: bool
    execution_time: float = 0.0
    output_dir: str = ""
    seed: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunEntry":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)


class RunHistory:
    """Manage the run log"""
    def __init__(self, config):
        self.config = config
        self.history_file = config.history_file
        self._ensure_history_file()

    def _ensure_history_file(self):
        if not self.history_file.exists():
            self.history_file.parent.mkdir(parents=True, exist_ok=True)
            self._save_history([])

    def _load_history(self) -> List[RunEntry]:
        try:
            with open(self.history_file, "r") as f:
                return [RunEntry.from_dict(entry) for entry in json.load(f)]
        except (FileNotFoundError, json.JSONDecodeError):
            return []

    def _save_history(self, entries: List[RunEntry]):
        try:
            with open(self.history_file, "w") as f:
                json.dump([entry.to_dict() for entry in entries], f, indent=2)
        except OSError as e:
            logger.warning(f"Could not save run history: {e}")

    def add_entry(
        self,
        command: str,
        arguments: str,
        success: bool,
        execution_time: float = 0.0,
        output_dir: str = "",
        seed: Optional[int] = None,
    ):
        if not self.config.history_enabled:
            return
        entry = RunEntry(
            timestamp=datetime.now().isoformat(),
            command=command,
            arguments=arguments,
            success=success,
            execution_time=execution_time,
            output_dir=output_dir,
            seed=seed,
        )
        entries = self._load_history()
        entries.append(entry)
        if len(entries) > self.config.max_history:
            entries = entries[-self.config.max_history:]
        self._save_history(entries)

    def get_recent_entries(self, limit: int = 10) -> List[RunEntry]:
        entries = self._load_history()
        return entries[-limit:] if entries else []

    def clear_history(self):
        self._save_history([])

    def get_stats(self) -> Dict[str, Any]:
        entries = self._load_history()
        if not entries:
            return {"total_runs": 0}
        total = len(entries)
        successful = sum(1 for entry in entries if entry.success)
        return {
            "total_runs": total,
            "successful_runs": successful,
            "success_rate": successful / total,
            "average_execution_time": sum(entry.execution_time for entry in entries) / total,
            "most_recent": entries[-1].timestamp,
        }


@dataclass
class RunManifest:
    """Parameter echo, version, timings and platform of one run"""
    command: str
    parameters: Dict[str, Any]
    timings: Dict[str, float] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    success: bool = True
    labels: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "timings": self.timings,
            "outputs": self.outputs,
            "success": self.success,
            "labels": self.labels,
            "version": __version__,
            "platform": get_platform_info(),
        }

    def write(self, output_dir: PathLike) -> Path:
        return write_json(Path(output_dir) / MANIFEST_NAME, self.to_dict())


def write_manifest(
    output_dir: PathLike,
    command: str,
    parameters: Mapping[str, Any],
    timings: Optional[Mapping[str, float]] = None,
    outputs: Optional[List[str]] = None,
    success: bool = True,
    labels: Optional[List[str]] = None,
) -> Path:
    manifest = RunManifest(
        command=command,
        parameters=dict(parameters),
        timings=dict(timings or {}),
        outputs=list(outputs or []),
        success=success,
        labels=list(labels or []),
    )
    return manifest.write(output_dir)
