"""
Configuration and input validation for spectrafrac
"""

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, TypeVar

from pydantic import ValidationError

from ..exceptions import ConfigError, SpectraFracError
from ..utils.io import PathLike

T = TypeVar("T")


@dataclass
class ValidationResult:
    """Result of config validation"""
    is_valid: bool
    reason: Optional[str] = None
    suggestion: Optional[str] = None
    line: Optional[int] = None


def _key_line(text: str, loc: Sequence[Any]) -> int:
    """1-based line of the innermost named key of a pydantic error location, else 1."""
    for key in reversed([k for k in loc if isinstance(k, str)]):
        pattern = re.compile(r'"' + re.escape(key) + r'"\s*:')
        for number, line in enumerate(text.splitlines(), start=1):
            if pattern.search(line):
                return number
    return 1


def _describe(error: ValidationError) -> Dict[str, Any]:
    first = error.errors()[0]
    where = ".".join(str(k) for k in first.get("loc", ()))
    message = first.get("msg", "invalid value")
    return {"loc": first.get("loc", ()), "message": f"{where}: {message}" if where else message}


class ConfigValidator:
    """Load JSON config files into validated objects with line-anchored errors"""
    def __init__(self, config=None):
        self.config = config

    def read(self, path: PathLike) -> Dict[str, Any]:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config: {e.strerror}", str(path)) from e
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"malformed JSON: {e.msg}", str(path), e.lineno) from e
        if not isinstance(data, dict):
            raise ConfigError("top level must be a JSON object", str(path), 1)
        return data

    def load(self, path: PathLike, parser: Callable[[Dict[str, Any]], T]) -> T:
        """Parse `path` with `parser` (a pydantic constructor or a from_dict)."""
        path = Path(path)
        data = self.read(path)
        try:
            return parser(data)
        except ValidationError as e:
            info = _describe(e)
            raise ConfigError(info["message"], str(path), _key_line(path.read_text(), info["loc"])) from e
        except (SpectraFracError, ValueError, KeyError, TypeError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(str(e), str(path), 1) from e

    def validate(self, path: PathLike, parser: Callable[[Dict[str, Any]], Any]) -> ValidationResult:
        try:
            self.load(path, parser)
        except ConfigError as e:
            return ValidationResult(
                is_valid=False,
                reason=str(e),
                suggestion="Fix the field named in the message and re-run",
                line=e.line,
            )
        return ValidationResult(is_valid=True)
