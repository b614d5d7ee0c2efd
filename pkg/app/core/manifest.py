# app/core/manifest.py
import hashlib
import json
import logging
import os
import platform
from importlib import metadata
from typing import Dict, Iterable, List

from pydantic import BaseModel

from app.core.config import settings

logger = logging.getLogger(__name__)

TRACKED_PACKAGES = ("numpy", "scipy", "pandas", "pydantic", "matplotlib", "python-dotenv")


class InputFile(BaseModel):
    path: str
    sha256: str
    bytes: int


class RunManifest(BaseModel):
    app_version: str
    command: str
    parameters: Dict[str, object]
    inputs: List[InputFile]
    outputs: List[str]
    versions: Dict[str, str]


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def package_versions() -> Dict[str, str]:
    versions = {"python": platform.python_version()}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "not-installed"
    return versions


def dump_json(payload, path: str) -> None:
    """Write JSON deterministically (sorted keys, fixed indent, trailing newline)"""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def write_manifest(out_dir: str, command: str, parameters: Dict[str, object],
                   inputs: Iterable[str], outputs: Iterable[str]) -> str:
    """Record inputs, hashes, parameters and versions of a run; written last"""
    os.makedirs(out_dir, exist_ok=True)
    input_files = [
        InputFile(path=path, sha256=file_sha256(path), bytes=os.path.getsize(path))
        for path in sorted(set(inputs))
        if path and os.path.isfile(path)
    ]
    manifest = RunManifest(
        app_version=settings.APP_VERSION,
        command=command,
        parameters=parameters,
        inputs=input_files,
        outputs=sorted(set(outputs)),
        versions=package_versions(),
    )
    path = os.path.join(out_dir, "manifest.json")
    dump_json(manifest.model_dump(), path)
    logger.info(f"🧾 Manifest written to {path} ({len(input_files)} inputs hashed)")
    return path
