"""
Core functionality for spectrafrac
"""

from .executor import TaskExecutor, TaskResult, TaskFailedError, task_seed
from .validator import ConfigValidator, ValidationResult
from .history import RunHistory, RunEntry, RunManifest, write_manifest

__all__ = [
    "TaskExecutor", "TaskResult", "TaskFailedError", "task_seed",
    "ConfigValidator", "ValidationResult",
    "RunHistory", "RunEntry", "RunManifest", "write_manifest",
]
