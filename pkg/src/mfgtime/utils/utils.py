"""
General utilities: hashing, directory handling and JSON normalisation.
"""

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np


def ensure_dir(directory) -> str:
    """
    Ensures that a directory exists. Creates it if it doesn't exist.

    Args:
        directory (str | Path): Path to the directory to ensure.

    Returns:
        str: Absolute path of the ensured directory.
    """
    path = Path(directory)
    if not path.exists():
        path.mkdir(parents=True, exist_ok=True)
    return str(path.resolve())


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def file_sha256(path) -> str:
    """
    Computes the SHA-256 hex digest of a file's content.

    Args:
        path (str | Path): File to hash.

    Returns:
        str: Hex digest.
    """
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def to_builtin(value):
    """Recursively converts numpy scalars/arrays and tuples into JSON-friendly Python objects."""
    if isinstance(value, dict):
        return {str(key): to_builtin(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if np.isnan(value):
            return "nan"
        if np.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def dump_json(data, path) -> None:
    """Writes JSON with sorted keys so that identical content gives identical bytes."""
    with open(path, "w") as handle:
        json.dump(to_builtin(data), handle, indent=2, sort_keys=True)
        handle.write("\n")


def default_workers() -> int:
    return os.cpu_count() or 1


def parallel_map(function, items, workers=1):
    """
    Maps `function` over `items` on a thread pool. Results come back in
    input order; `workers` <= 1 runs inline.
    """
    items = list(items)
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(items) <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as executor:
        return list(executor.map(function, items))
