"""File formats: KCI v1 instance text, clustering JSON, report JSON.

Floats are serialized with repr, which round-trips every double exactly,
so parse(emit(instance)) == instance bit-for-bit.
"""

from __future__ import annotations

import dataclasses
import json
import os
import tempfile

import numpy as np

from .core import Clustering, Instance, validate_instance


class KciFormatError(ValueError):
    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


def emit_instance(instance: Instance) -> str:
    lines = [f"kci 1", f"mode {instance.mode}", f"n {instance.n}"]
    for row in instance.dist:
        lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def parse_instance(text: str, slack: float = 0.0) -> Instance:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "kci 1":
        raise KciFormatError(1, "expected header 'kci 1'")
    if len(lines) < 3:
        raise KciFormatError(len(lines), "truncated file")
    mode_parts = lines[1].split()
    if len(mode_parts) != 2 or mode_parts[0] != "mode" \
            or mode_parts[1] not in ("symmetric", "asymmetric"):
        raise KciFormatError(2, "expected 'mode symmetric' or 'mode asymmetric'")
    mode = mode_parts[1]
    n_parts = lines[2].split()
    if len(n_parts) != 2 or n_parts[0] != "n":
        raise KciFormatError(3, "expected 'n <int>'")
    try:
        n = int(n_parts[1])
    except ValueError:
        raise KciFormatError(3, f"bad point count {n_parts[1]!r}")
    if n < 1:
        raise KciFormatError(3, "n must be >= 1")
    if len(lines) < 3 + n:
        raise KciFormatError(len(lines), f"expected {n} distance rows")
    rows = []
    for i in range(n):
        parts = lines[3 + i].split()
        if len(parts) != n:
            raise KciFormatError(4 + i, f"expected {n} entries, got {len(parts)}")
        try:
            rows.append([float(x) for x in parts])
        except ValueError:
            raise KciFormatError(4 + i, "non-numeric distance entry")
    return validate_instance(np.asarray(rows), mode, slack=slack)


def clustering_to_dict(clustering: Clustering) -> dict:
    """Clusters sorted ascending, ordered by smallest member; centers aligned."""
    pairs = sorted(
        ((sorted(g), clustering.centers[i])
         for i, g in enumerate(clustering.clusters()) if g),
        key=lambda t: t[0][0])
    return {
        "k": clustering.k,
        "radius": clustering.radius,
        "centers": [c for _, c in pairs],
        "clusters": [g for g, _ in pairs],
    }


def emit_clustering(clustering: Clustering) -> str:
    return json.dumps(clustering_to_dict(clustering), indent=2) + "\n"


def parse_clustering(text: str) -> Clustering:
    data = json.loads(text)
    k = data["k"]
    centers = tuple(data["centers"])
    clusters = data["clusters"]
    n = sum(len(g) for g in clusters)
    assignment = [None] * n
    for i, g in enumerate(clusters):
        for p in g:
            assignment[p] = i
    for p, lab in enumerate(assignment):
        if lab is None:
            raise ValueError(f"point {p} missing from clusters")
    return Clustering(k=k, centers=centers, assignment=tuple(assignment),
                      radius=float(data["radius"]))


def to_jsonable(obj):
    """Recursively convert dataclasses/numpy/tuples for JSON reports."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, dict):
        return {str(key): to_jsonable(v) for key, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, float) and obj == float("inf"):
        return "inf"
    return obj


def write_atomic(path: str, text: str):
    """Write via temp file + rename so failures never leave partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
