from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Callable, Mapping

import orjson
from jsonschema import ValidationError

from ppi.errors import SchemaError
from ppi.models.reports import RunManifest
from ppi.storage.files import sha256_file
from ppi.validation.schema import validate_manifest_json

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def load_manifest(path: Path) -> RunManifest:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    try:
        data = orjson.loads(path.read_bytes())
    except FileNotFoundError as e:
        raise SchemaError("manifest not found", path=str(path)) from e
    except orjson.JSONDecodeError as e:
        raise SchemaError(f"manifest is not valid JSON: {e}", path=str(path)) from e
    try:
        validate_manifest_json(data)
    except ValidationError as e:
        raise SchemaError(f"manifest does not match schema: {e.message}", path=str(path)) from e
    return RunManifest.model_validate(data)


def changed_inputs(manifest: RunManifest) -> list[str]:
    """Recorded inputs whose current content no longer matches the stored digest."""
    changed = []
    for name, digest in manifest.inputs.items():
        p = Path(name)
        if not p.exists() or sha256_file(p) != digest:
            changed.append(name)
    return changed


def replay_manifest(
    path: Path,
    commands: Mapping[str, Callable[..., Any]],
    out_dir: Path | None = None,
) -> RunManifest:
    """Re-run the command a manifest records, with the same parameters."""
    manifest = load_manifest(path)
    try:
        command = commands[manifest.command]
    except KeyError:
        raise SchemaError(f"manifest names unknown command {manifest.command!r}", path=str(path)) from None
    changed = changed_inputs(manifest)
    if changed:
        logger.warning(f"Inputs changed since the recorded run: {', '.join(changed)}")
    params = dict(manifest.parameters)
    if out_dir is not None:
        params["out"] = str(out_dir)
    logger.info(f"Replaying {manifest.command} into {params.get('out', manifest.out_dir)}")
    command(**params)
    return manifest
