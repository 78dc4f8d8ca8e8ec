"""
Run manifest: resolved config, code version, phase timings and the list of
files a run wrote.
"""
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Union

import numpy as np

from default_config import DEFAULT_CONFIG
from models.reports import RunManifest
from models.scenario import ScenarioConfig
from utils.errors import DropletCtrlError
from utils.logging import get_logger

logger = get_logger(__name__)

MANIFEST_NAME = "manifest.json"


def _plain(value: Any) -> Any:
    """Numpy scalars and arrays as built-in types."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


class ManifestRecorder:
    """
    Collects what a run does and writes manifest.json once at the end.

    Outputs are stored relative to the output directory.
    """

    def __init__(self, command: str, config: ScenarioConfig, out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self.manifest = RunManifest(
            command=command,
            config=config.model_dump(mode="json"),
            code_version=DEFAULT_CONFIG["version"],
        )
        self._written = False

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.manifest.phases[name] = self.manifest.phases.get(name, 0.0) + elapsed
            logger.info("Phase finished", extra={"extra_fields": {"phase": name, "seconds": round(elapsed, 3)}})

    def add_output(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        try:
            name = str(path.resolve().relative_to(self.out_dir.resolve()))
        except ValueError:
            name = str(path)
        if name not in self.manifest.outputs:
            self.manifest.outputs.append(name)
        return path

    def finish(
        self,
        exit_code: int,
        summary: Optional[Dict[str, Any]] = None,
        error: Optional[Dict[str, Any]] = None,
    ) -> Path:
        """
        Write the manifest.

        Raises:
            DropletCtrlError: If called a second time
        """
        if self._written:
            raise DropletCtrlError("manifest already written")
        self.manifest.status = "ok" if exit_code == 0 else "failed"
        self.manifest.exit_code = exit_code
        self.manifest.summary.update(_plain(summary or {}))
        self.manifest.error = error
        path = self.out_dir / MANIFEST_NAME
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.manifest.model_dump_json(indent=2))
        self._written = True
        logger.info(
            "Manifest written",
            extra={"extra_fields": {"path": str(path), "outputs": len(self.manifest.outputs), "exit_code": exit_code}},
        )
        return path
