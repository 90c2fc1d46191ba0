"""Run manifests: what was executed, with which inputs and seed.

A manifest pins (command, parameters, seed, tool version, input digests);
two runs with identical manifests produce byte-identical result files.
Wall-clock time is recorded for reporting but is no part of that contract.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

from ._version import __version__

MANIFEST_SCHEMA = "blockseg.manifest/1"


def sha256_path(path: str | os.PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return "sha256:" + digest.hexdigest()


@dataclass(frozen=True)
class RunManifest:
    command: str
    parameters: dict
    seed: int | None
    input_digest: dict = field(default_factory=dict)
    tool_version: str = __version__
    runtime_ms: float | None = None

    def to_json(self) -> str:
        doc = {
            "schema": MANIFEST_SCHEMA,
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "input_digest": self.input_digest,
            "runtime_ms": self.runtime_ms,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        doc = json.loads(text)
        return cls(
            command=doc["command"],
            parameters=doc["parameters"],
            seed=doc["seed"],
            input_digest=doc.get("input_digest", {}),
            tool_version=doc.get("tool_version", __version__),
            runtime_ms=doc.get("runtime_ms"),
        )
