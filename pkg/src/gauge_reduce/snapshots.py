"""Field snapshot container: one manifest plus flat little-endian arrays.

A snapshot is a directory with ``manifest.json`` and one ``.f64`` file per
stored array.  Arrays are written as raw little-endian 64-bit floats in
row-major order; complex data is stored as two real arrays with ``.re`` /
``.im`` name suffixes.  The manifest records the group model, grid
parameters, chart table, the atlas tag of the frame the data is expressed
in, and the shape and dtype of every array.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .atlas import Atlas, Chart
from .errors import StructureError
from .grid import BaseGrid
from .groups import get_group_model

__all__ = ["save_snapshot", "load_snapshot"]

_FORMAT = "gauge-reduce-snapshot/1"


def _write_array(path: Path, arr: np.ndarray) -> list[dict]:
    """Write one array (splitting complex); returns manifest entries."""
    entries = []
    arr = np.asarray(arr)
    parts = [("", arr)] if not np.iscomplexobj(arr) else [
        (".re", np.real(arr)), (".im", np.imag(arr)),
    ]
    for suffix, part in parts:
        fname = path.name + suffix + ".f64"
        data = np.ascontiguousarray(part, dtype="<f8")
        (path.parent / fname).write_bytes(data.tobytes())
        entries.append({"file": fname, "shape": list(part.shape), "suffix": suffix})
    return entries


def save_snapshot(
    directory: str | os.PathLike,
    atlas: Atlas,
    fields: dict[str, tuple[np.ndarray, ...]],
    atlas_tag: str | None = None,
) -> Path:
    """Save per-chart arrays under a manifest; returns the directory path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {
        "format": _FORMAT,
        "group": atlas.group.name,
        "grid": {"dim": atlas.grid.dim, "shape": list(atlas.grid.shape), "dx": atlas.grid.dx},
        "atlas_tag": atlas_tag or atlas.tag,
        "charts": [c.name for c in atlas.charts],
        "fields": {},
    }
    for name, per_chart in fields.items():
        if len(per_chart) != atlas.n_charts:
            raise StructureError(f"field {name!r} does not have one array per chart")
        chart_entries = []
        for i, arr in enumerate(per_chart):
            base = directory / f"{name}_{atlas.charts[i].name}"
            entries = _write_array(base, arr)
            chart_entries.append({
                "chart": atlas.charts[i].name,
                "complex": bool(np.iscomplexobj(arr)),
                "parts": entries,
            })
        manifest["fields"][name] = chart_entries
    masks = {c.name: np.flatnonzero(c.mask.ravel()).tolist() for c in atlas.charts}
    manifest["chart_nodes"] = masks
    tmp = directory / "manifest.json.tmp"
    tmp.write_text(json.dumps(manifest, indent=1, sort_keys=True))
    os.replace(tmp, directory / "manifest.json")
    return directory


def load_snapshot(directory: str | os.PathLike):
    """Load a snapshot; returns (grid, group, atlas_tag, chart names, fields)."""
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    if manifest.get("format") != _FORMAT:
        raise StructureError("not a field snapshot directory")
    grid = BaseGrid(
        dim=manifest["grid"]["dim"],
        shape=tuple(manifest["grid"]["shape"]),
        dx=manifest["grid"]["dx"],
    )
    group = get_group_model(manifest["group"])
    fields = {}
    for name, chart_entries in manifest["fields"].items():
        arrays = []
        for entry in chart_entries:
            parts = {}
            for p in entry["parts"]:
                raw = (directory / p["file"]).read_bytes()
                parts[p["suffix"]] = np.frombuffer(raw, dtype="<f8").reshape(p["shape"])
            if entry["complex"]:
                arrays.append(parts[".re"] + 1j * parts[".im"])
            else:
                arrays.append(parts[""])
        fields[name] = tuple(arrays)
    return grid, group, manifest["atlas_tag"], manifest["charts"], fields
