# src/cli/manifest.py
"""
Run manifests: what ran, with which configuration and seed, when, and the
sha256 digests of every file read or written.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def utc_now():
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int = None
    started: str = field(default_factory=utc_now)
    finished: str = None
    exit_code: int = None
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    def add_input(self, path):
        path = Path(path)
        if path.exists():
            self.inputs[str(path)] = file_digest(path)

    def add_output(self, path):
        path = Path(path)
        if path.exists():
            self.outputs[str(path)] = file_digest(path)

    def finish(self, exit_code):
        self.exit_code = exit_code
        self.finished = utc_now()

    def to_json(self):
        return asdict(self)

    def save(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_json(), indent=2, sort_keys=True, default=str))
        return path

    @classmethod
    def load(cls, path):
        return cls(**json.loads(Path(path).read_text()))
