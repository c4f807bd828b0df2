"""
Artifact output directory with a hashed run manifest.
"""
import hashlib
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List

import pandas as pd

from config.experiment import BaseConfig, emit_config
from config.settings import settings
from data.io import PathLike, write_json, write_matrix_binary, write_matrix_csv
from utils.errors import InvalidData

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
CONFIG_NAME = "config.env"


def sha256_file(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """Config echo, version, wall time and content hashes of one run."""

    command: str
    config: Dict[str, Any]
    version: str = settings.VERSION
    wall_time_s: float = 0.0
    files: Dict[str, str] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config": self.config,
            "version": self.version,
            "wall_time_s": self.wall_time_s,
            "files": self.files,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "RunManifest":
        return cls(
            command=payload["command"],
            config=payload.get("config", {}),
            version=payload.get("version", ""),
            wall_time_s=float(payload.get("wall_time_s", 0.0)),
            files=dict(payload.get("files", {})),
            notes=list(payload.get("notes", [])),
        )

    def verify(self, output_dir: PathLike) -> List[str]:
        """Names of listed files whose current hash differs (or that are gone)."""
        output_path = Path(output_dir)
        stale = []
        for name, digest in self.files.items():
            path = output_path / name
            if not path.exists() or sha256_file(path) != digest:
                stale.append(name)
        return stale


class ArtifactWriter:
    """Writes artifacts into one directory and records their hashes."""

    def __init__(self, output_dir: PathLike, command: str, config: Dict[str, Any]):
        """
        Initialize the writer.

        Args:
            output_dir: Directory for artifacts (created if missing)
            command: Subcommand name recorded in the manifest
            config: Effective configuration, echoed in the manifest
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.manifest = RunManifest(command=command, config=config)
        self._started = time.perf_counter()

    @classmethod
    def for_config(cls, config: BaseConfig, emit: bool = False) -> "ArtifactWriter":
        """Writer for one run of `config`; with `emit` the effective config is written as config.env."""
        writer = cls(config.output_dir(), config.command, config.to_dict())
        if emit:
            writer.text(CONFIG_NAME, emit_config(config))
        return writer

    def _path(self, name: str) -> Path:
        if name == MANIFEST_NAME:
            raise InvalidData(f"{MANIFEST_NAME} is reserved for the run manifest")
        return self.output_dir / name

    def record(self, path: Path) -> Path:
        """Hash a file already written into the output directory."""
        self.manifest.files[path.name] = sha256_file(path)
        logger.debug("wrote %s", path)
        return path

    def json(self, name: str, payload: Any) -> Path:
        return self.record(write_json(self._path(name), payload))

    def matrix_csv(self, name: str, matrix) -> Path:
        return self.record(write_matrix_csv(self._path(name), matrix))

    def matrix_binary(self, name: str, matrix) -> Path:
        return self.record(write_matrix_binary(self._path(name), matrix))

    def dataframe(self, name: str, frame: pd.DataFrame, index: bool = True) -> Path:
        path = self._path(name)
        frame.to_csv(path, index=index, float_format="%.17g")
        return self.record(path)

    def text(self, name: str, content: str) -> Path:
        path = self._path(name)
        path.write_text(content)
        return self.record(path)

    def note(self, message: str) -> None:
        self.manifest.notes.append(message)
        logger.info(message)

    @property
    def written(self) -> List[str]:
        return sorted(self.manifest.files)

    def finish(self) -> RunManifest:
        """Stamp wall time and write manifest.json."""
        self.manifest.wall_time_s = round(time.perf_counter() - self._started, 3)
        write_json(self.output_dir / MANIFEST_NAME, self.manifest.to_dict())
        return self.manifest
