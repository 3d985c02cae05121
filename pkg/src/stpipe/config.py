"""Flat ``key = value`` pipeline configuration and seed derivation.

Lines look like ``seed = 7`` or ``augment.del_rate = 0.1``; ``#`` starts a
comment. Stage keys are looked up as ``<stage>.<key>`` first, then as the
bare ``<key>``.
"""

import hashlib
import os
import tempfile
from typing import Dict, Optional

from .errors import StpipeError


class PipelineConfig(dict):
    @classmethod
    def parse(cls, text: str) -> "PipelineConfig":
        cfg = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            if not eq or not key.strip():
                raise StpipeError(f"config line {lineno}: expected key = value")
            cfg[key.strip()] = value.strip()
        return cfg

    @classmethod
    def load(cls, path: Optional[str]) -> "PipelineConfig":
        if not path:
            return cls()
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read())

    def lookup(self, stage: str, key: str) -> Optional[str]:
        for k in (f"{stage}.{key}", key):
            if k in self:
                return self[k]
        return None

    def section(self, prefix: str) -> Dict[str, str]:
        """Entries under ``prefix.`` with the prefix stripped, in file order."""
        p = prefix + "."
        return {k[len(p):]: v for k, v in self.items() if k.startswith(p)}


def derive_seed(seed: int, stage: str) -> int:
    """Per-stage seed: first 8 bytes of sha256("<stage>:<seed>")."""
    digest = hashlib.sha256(f"{stage}:{seed}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def atomic_write(path: str, data, binary: bool = False) -> None:
    """Write via a temp file in the target directory, then rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".stpipe-", dir=directory)
    try:
        with os.fdopen(fd, "wb" if binary else "w", **({} if binary else {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
