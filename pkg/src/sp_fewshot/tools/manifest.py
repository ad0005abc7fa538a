#
# SP Few-Shot - Run Manifests
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Every CLI run writes manifest.json next to its outputs: the command name,
# every resolved option value (defaults and config-file values included), the
# resolved configs and the artifact paths. Replaying a manifest re-invokes the
# command with exactly those options.
#

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Union

from sp_fewshot import __version__
from sp_fewshot.common.errors import ParseError

MANIFEST_FORMAT = 1
MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    command: str
    params: dict[str, Any]
    seed: int = 0
    config: dict[str, Any] = field(default_factory=dict)
    artifacts: dict[str, str] = field(default_factory=dict)
    format: int = MANIFEST_FORMAT
    version: str = __version__

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": self.format,
            "version": self.version,
            "command": self.command,
            "seed": self.seed,
            "params": self.params,
            "config": self.config,
            "artifacts": self.artifacts,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunManifest":
        if data.get("format") != MANIFEST_FORMAT:
            raise ParseError(f"unsupported manifest format {data.get('format')!r}")
        try:
            return cls(
                command=data["command"],
                params=dict(data["params"]),
                seed=int(data.get("seed", 0)),
                config=dict(data.get("config", {})),
                artifacts=dict(data.get("artifacts", {})),
                format=data["format"],
                version=data.get("version", ""),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"malformed manifest: {e}") from e


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, Enum):
        return value.value
    return value


def write_manifest(path: Union[str, Path], manifest: RunManifest) -> Path:
    """Write to `path`, or to <path>/manifest.json unless path ends in .json."""
    path = Path(path)
    if path.suffix != ".json":
        path = path / MANIFEST_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    data = _jsonable(manifest.to_dict())
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def read_manifest(path: Union[str, Path]) -> RunManifest:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: {e.msg}", e.lineno) from e
    return RunManifest.from_dict(data)
