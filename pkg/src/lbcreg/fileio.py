"""Atomic file writes and schema-validated JSON emission.

Every JSON document the package writes is validated against one of the
schemas shipped in ``lbcreg/schemas`` before it reaches disk. Writes go
through a temp-file-then-rename so a crash never leaves a partial artifact.
All serialization is deterministic: sorted keys, no timestamps.
"""

from __future__ import annotations

import json
import os
import tempfile
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema


def atomic_write_text(path, text: str):
    """Write text to ``path`` via a temp file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    ref = resources.files("lbcreg").joinpath(f"schemas/{name}.schema.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def validate_document(doc: dict, schema: str):
    jsonschema.validate(instance=doc, schema=load_schema(schema))


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, doc: dict, schema: str | None = None):
    """Validate against the named schema (if any) and write atomically."""
    if schema is not None:
        validate_document(doc, schema)
    atomic_write_text(path, dump_json(doc))


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def format_float(x: float) -> str:
    """Decimal form with enough digits to round-trip a float64 exactly."""
    return format(float(x), ".17g")


def write_csv(path, header: list[str], rows):
    """Minimal deterministic CSV writer; floats use round-trip formatting."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, float):
                cells.append(format_float(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")
