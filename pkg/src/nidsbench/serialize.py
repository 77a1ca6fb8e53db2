"""Versioned on-disk container for fitted encoders, reducers and classifiers.

A container is an uncompressed ``.npz`` archive.  Numeric state is stored as
row-major little-endian arrays (8-byte floats for real values) and a
``__meta__`` entry holds a UTF-8 JSON header::

    {"format": "nidsbench-model", "version": 1, "kind": ..., ...}

Loading never unpickles.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .classifiers import ClassifierSpec, TrainedModel
from .errors import SerializationError
from .ingest import EncoderSpec
from .reduction import ExtractionModel, SelectionModel

FORMAT = "nidsbench-model"
VERSION = 1


def _to_le(a):
    a = np.ascontiguousarray(a)
    if a.dtype.kind == "f":
        return a.astype("<f8")
    if a.dtype.kind in "iu":
        return a.astype("<i8")
    if a.dtype.kind == "b":
        return a.astype("u1")
    raise SerializationError(f"cannot store array of dtype {a.dtype}")


def _pack(obj):
    if isinstance(obj, EncoderSpec):
        meta = {
            "kind": "encoder",
            "dropped_columns": sorted(obj.dropped_columns),
            "numeric_columns": list(obj.numeric_columns),
            "onehot_maps": {k: list(v) for k, v in obj.onehot_maps.items()},
            "apply_minmax": obj.apply_minmax,
        }
        return meta, {"minmax_bounds": obj.minmax_bounds}
    if isinstance(obj, SelectionModel):
        meta = {
            "kind": "selection",
            "indices": list(obj.indices),
            "names": list(obj.names),
            "source_names": list(obj.source_names),
            "threshold": obj.threshold,
        }
        return meta, {}
    if isinstance(obj, ExtractionModel):
        meta = {"kind": "extraction", "source_names": list(obj.source_names)}
        return meta, {"projection": obj.projection, "mean": obj.mean, "eigenvalues": obj.eigenvalues}
    if isinstance(obj, TrainedModel):
        classes = obj.classes.tolist()
        meta = {
            "kind": "classifier",
            "spec": obj.spec.to_dict(),
            "classes": classes,
            "input_dim": obj.input_dim,
        }
        return meta, {f"state/{k}": v for k, v in obj.get_state().items()}
    raise SerializationError(f"cannot serialize {type(obj).__name__}")


def save(obj, path) -> Path:
    meta, arrays = _pack(obj)
    meta = {"format": FORMAT, "version": VERSION, **meta}
    payload = {k: _to_le(v) for k, v in arrays.items()}
    payload["__meta__"] = np.frombuffer(json.dumps(meta, sort_keys=True).encode("utf-8"), dtype=np.uint8)
    path = Path(path)
    with open(path, "wb") as fh:
        np.savez(fh, **payload)
    return path


def load(path):
    try:
        with np.load(Path(path), allow_pickle=False) as data:
            arrays = {k: data[k] for k in data.files}
    except (OSError, ValueError) as exc:
        raise SerializationError(f"{path}: not a model container ({exc})") from None
    if "__meta__" not in arrays:
        raise SerializationError(f"{path}: missing header")
    meta = json.loads(arrays.pop("__meta__").tobytes().decode("utf-8"))
    if meta.get("format") != FORMAT:
        raise SerializationError(f"{path}: unknown format {meta.get('format')!r}")
    if meta.get("version") != VERSION:
        raise SerializationError(f"{path}: unsupported version {meta.get('version')!r}")

    kind = meta["kind"]
    if kind == "encoder":
        return EncoderSpec(
            dropped_columns=frozenset(meta["dropped_columns"]),
            numeric_columns=tuple(meta["numeric_columns"]),
            onehot_maps={k: tuple(v) for k, v in meta["onehot_maps"].items()},
            minmax_bounds=arrays["minmax_bounds"],
            apply_minmax=meta["apply_minmax"],
        )
    if kind == "selection":
        return SelectionModel(
            indices=tuple(meta["indices"]),
            names=tuple(meta["names"]),
            source_names=tuple(meta["source_names"]),
            threshold=meta["threshold"],
        )
    if kind == "extraction":
        return ExtractionModel(
            arrays["projection"], arrays["mean"], arrays["eigenvalues"], tuple(meta["source_names"])
        )
    if kind == "classifier":
        spec = ClassifierSpec(**meta["spec"])
        state = {k.split("/", 1)[1]: v for k, v in arrays.items() if k.startswith("state/")}
        return TrainedModel.from_state(spec, np.asarray(meta["classes"]), meta["input_dim"], state)
    raise SerializationError(f"{path}: unknown kind {kind!r}")
