"""On-disk formats: DTEN tensors, binary PGM images, CSV tables.

DTEN v1 layout: magic bytes ``DTEN``, u32 little-endian rank, rank u32
extents, then row-major float64 little-endian values. The reader rejects
trailing bytes. All writers are atomic (write to a temp file in the target
directory, then rename).
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import FormatError
from .tensor import Tensor

MAGIC = b"DTEN"
_MAX_RANK = 16


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str | Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def save_dten(path: str | Path, t: Tensor | np.ndarray) -> None:
    arr = t.data if isinstance(t, Tensor) else np.asarray(t, dtype=np.float64)
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    header = MAGIC + struct.pack("<I", arr.ndim)
    header += struct.pack(f"<{arr.ndim}I", *arr.shape)
    payload = arr.astype("<f8", copy=False).tobytes(order="C")
    atomic_write_bytes(path, header + payload)


def load_dten(path: str | Path) -> Tensor:
    blob = Path(path).read_bytes()
    if len(blob) < 8:
        raise FormatError(f"{path}: truncated header", offset=len(blob))
    if blob[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic {blob[:4]!r}", offset=0)
    (rank,) = struct.unpack_from("<I", blob, 4)
    if rank > _MAX_RANK:
        raise FormatError(f"{path}: implausible rank {rank}", offset=4)
    offset = 8
    need = 4 * rank
    if len(blob) < offset + need:
        raise FormatError(f"{path}: truncated extent list", offset=len(blob))
    extents = struct.unpack_from(f"<{rank}I", blob, offset) if rank else ()
    offset += need
    for i, e in enumerate(extents):
        if e == 0:
            raise FormatError(f"{path}: extent {i} is zero", offset=8 + 4 * i)
    count = int(np.prod(extents, dtype=np.int64)) if rank else 1
    need = 8 * count
    if len(blob) < offset + need:
        raise FormatError(f"{path}: truncated payload, expected {count} values",
                          offset=len(blob))
    if len(blob) > offset + need:
        raise FormatError(f"{path}: trailing bytes after payload",
                          offset=offset + need)
    data = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
    return Tensor(data.reshape(extents).astype(np.float64))


def save_pgm(path: str | Path, image: Tensor | np.ndarray) -> None:
    """Write a 2D array as binary 8-bit PGM, min-max normalized."""
    arr = image.data if isinstance(image, Tensor) else np.asarray(image, dtype=np.float64)
    if arr.ndim != 2:
        raise FormatError(f"PGM output needs a 2D array, got shape {arr.shape}")
    lo, hi = float(arr.min()), float(arr.max())
    if hi > lo:
        scaled = (arr - lo) / (hi - lo) * 255.0
    else:
        scaled = np.zeros_like(arr)
    pixels = np.round(scaled).astype(np.uint8)
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
    atomic_write_bytes(path, header + pixels.tobytes(order="C"))


def fmt_value(v) -> str:
    """Deterministic CSV cell: integral floats print without a decimal part,
    everything else uses the shortest round-trip representation."""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if f.is_integer() and abs(f) < 1e15:
        return str(int(f))
    return repr(f)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    atomic_write_text(path, csv_text(header, rows))


# ---------------------------------------------------------------------------
# named-tensor directories (parameter checkpoints)


def save_tensor_dir(path: str | Path, tensors: Mapping[str, Tensor],
                    meta: Mapping | None = None) -> None:
    """Write a directory of DTEN files plus a manifest of names and shapes."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    manifest = {
        "format": "dten-dir-v1",
        "tensors": {name: list(t.shape) for name, t in tensors.items()},
    }
    if meta:
        manifest["meta"] = dict(meta)
    for name, t in tensors.items():
        save_dten(path / f"{name}.dten", t)
    atomic_write_text(path / "manifest.json",
                      json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def load_tensor_dir(path: str | Path) -> tuple[dict[str, Tensor], dict]:
    path = Path(path)
    manifest_path = path / "manifest.json"
    if not manifest_path.exists():
        raise FormatError(f"{path}: missing manifest.json")
    manifest = json.loads(manifest_path.read_text())
    if manifest.get("format") != "dten-dir-v1":
        raise FormatError(f"{path}: unknown manifest format {manifest.get('format')!r}")
    tensors: dict[str, Tensor] = {}
    for name, shape in manifest["tensors"].items():
        t = load_dten(path / f"{name}.dten")
        if list(t.shape) != list(shape):
            raise FormatError(
                f"{path}/{name}.dten: shape {list(t.shape)} does not match "
                f"manifest {list(shape)}")
        tensors[name] = t
    return tensors, manifest.get("meta", {})
