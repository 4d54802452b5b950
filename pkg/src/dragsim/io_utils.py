"""Atomic file writers with embedded provenance.

Every output file carries the resolved configuration it was produced
from and a content hash of its data payload, and is written via a
temporary file + rename so partially written files never appear under
the final name.  No timestamps: identical runs produce identical bytes.
"""

import hashlib
import json
import os
import tempfile


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(value):
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return repr(float(value))


def write_csv(path, columns, rows, config=None):
    """CSV with '#'-prefixed provenance header (config + payload sha256)."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    payload = "\n".join(lines) + "\n"
    digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    header = []
    if config is not None:
        header.append("# config: " + canonical_json(config))
    header.append("# sha256: " + digest)
    _atomic_write(path, "\n".join(header) + "\n" + payload)


def read_csv(path):
    """Read a dragsim CSV back: (columns, rows of floats, config or None)."""
    config = None
    columns = None
    rows = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if line.startswith("# config: "):
                config = json.loads(line[len("# config: "):])
                continue
            if line.startswith("#") or not line:
                continue
            if columns is None:
                columns = line.split(",")
                continue
            rows.append([float(v) for v in line.split(",")])
    return columns, rows, config


def write_json(path, payload, config=None):
    """JSON report with the resolved config and a payload content hash."""
    body = {
        "data": payload,
        "sha256": hashlib.sha256(
            canonical_json(payload).encode("utf-8")).hexdigest(),
    }
    if config is not None:
        body["config"] = config
    _atomic_write(path, json.dumps(body, sort_keys=True, indent=2) + "\n")


def read_json(path):
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)
