"""Flow-record CSV loading and the train-fitted numeric encoding.

The encoder is fitted on the training table only and then applied, unchanged,
to any other table with the same layout.  Nominal columns are one-hot encoded
with lexicographically ordered categories; min-max scaling is optional and is
used only on the extraction path.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np
import pandas as pd

from .errors import EmptyFile, MissingColumn, UnexpectedNominalColumn, UnparseableCell

logger = logging.getLogger(__name__)

NUMERIC = "numeric"
NOMINAL = "nominal"
LABEL_BINARY = "label-binary"
LABEL_CATEGORY = "label-category"
COLUMN_KINDS = (NUMERIC, NOMINAL, LABEL_BINARY, LABEL_CATEGORY)

#: Attack categories in the fixed alphabetical order used for class ids.
CLASSES = (
    "Analysis",
    "Backdoor",
    "DoS",
    "Exploits",
    "Fuzzers",
    "Generic",
    "Normal",
    "Reconnaissance",
    "Shellcode",
    "Worms",
)
_CLASS_ALIASES = {"Backdoors": "Backdoor"}

NULL_TOKENS = frozenset({"", "-"})
NULL_CATEGORY = "other"
ALWAYS_DROPPED = frozenset({"id", "attack_cat"})
NOMINAL_FEATURES = ("proto", "service", "state")

_UNSW_NUMERIC = (
    "dur", "spkts", "dpkts", "sbytes", "dbytes", "rate", "sttl", "dttl",
    "sload", "dload", "sloss", "dloss", "sinpkt", "dinpkt", "sjit", "djit",
    "swin", "stcpb", "dtcpb", "dwin", "tcprtt", "synack", "ackdat", "smean",
    "dmean", "trans_depth", "response_body_len", "ct_srv_src", "ct_state_ttl",
    "ct_dst_ltm", "ct_src_dport_ltm", "ct_dst_sport_ltm", "ct_dst_src_ltm",
    "is_ftp_login", "ct_ftp_cmd", "ct_flw_http_mthd", "ct_src_ltm",
    "ct_srv_dst", "is_sm_ips_ports",
)

#: Column layout of the official 10% UNSW-NB15 train/test CSV files.
UNSW_NB15_SCHEMA: tuple[tuple[str, str], ...] = (
    (("id", NUMERIC), ("dur", NUMERIC))
    + tuple((name, NOMINAL) for name in NOMINAL_FEATURES)
    + tuple((name, NUMERIC) for name in _UNSW_NUMERIC[1:])
    + (("attack_cat", LABEL_CATEGORY), ("label", LABEL_BINARY))
)


@dataclass(frozen=True)
class FeatureTable:
    """Raw flow records with a typed column layout.

    ``frame`` holds one row per record; numeric columns are float64, nominal
    and category-label columns are non-empty strings, the binary label is int.
    """

    frame: pd.DataFrame
    columns: tuple[tuple[str, str], ...]
    source: str = "<memory>"

    @classmethod
    def from_frame(cls, df: pd.DataFrame, schema: Sequence[tuple[str, str]], source: str = "<memory>"):
        schema = tuple((str(n), str(k)) for n, k in schema)
        for name, kind in schema:
            if kind not in COLUMN_KINDS:
                raise ValueError(f"unknown column kind {kind!r} for {name!r}")
            if name not in df.columns:
                raise MissingColumn(name)
        if len(df) == 0:
            raise EmptyFile(f"{source}: no data rows")

        out = {}
        for name, kind in schema:
            col = df[name]
            if kind == NUMERIC:
                out[name] = _parse_numeric(col, name)
            elif kind == NOMINAL:
                out[name] = _fill_nominal(col)
            elif kind == LABEL_BINARY:
                out[name] = _parse_binary(col, name)
            else:
                out[name] = _parse_category(col, name)
        frame = pd.DataFrame(out, index=pd.RangeIndex(len(df)))
        return cls(frame=frame, columns=schema, source=source)

    def __len__(self):
        return len(self.frame)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.columns)

    def kind(self, name: str) -> str:
        for n, k in self.columns:
            if n == name:
                return k
        raise MissingColumn(name)

    def columns_of(self, kind: str) -> tuple[str, ...]:
        return tuple(n for n, k in self.columns if k == kind)


def _parse_numeric(col: pd.Series, name: str) -> np.ndarray:
    if pd.api.types.is_numeric_dtype(col):
        values = col.to_numpy(dtype=np.float64)
    else:
        values = pd.to_numeric(col.astype(str).str.strip(), errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise UnparseableCell(row, name, col.iloc[row])
    return values


def _fill_nominal(col: pd.Series) -> np.ndarray:
    values = col.astype(object).where(col.notna(), "").astype(str).str.strip()
    return values.where(~values.isin(NULL_TOKENS), NULL_CATEGORY).to_numpy(dtype=object)


def _parse_binary(col: pd.Series, name: str) -> np.ndarray:
    values = pd.to_numeric(col.astype(str).str.strip(), errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.isin(values, (0.0, 1.0))
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise UnparseableCell(row, name, col.iloc[row])
    return values.astype(np.int64)


def _parse_category(col: pd.Series, name: str) -> np.ndarray:
    values = col.astype(str).str.strip().replace(_CLASS_ALIASES)
    bad = ~values.isin(CLASSES)
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise UnparseableCell(row, name, col.iloc[row])
    return values.to_numpy(dtype=object)


def load_csv(path, expected_schema: Sequence[tuple[str, str]] = UNSW_NB15_SCHEMA) -> FeatureTable:
    """Read a header-first CSV file and validate it against ``expected_schema``.

    Columns not named in the schema are ignored. Raises :class:`EmptyFile`
    when there are no data rows, :class:`MissingColumn` for an absent schema
    column and :class:`UnparseableCell` for a numeric or label cell that does
    not parse.
    """
    path = Path(path)
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise EmptyFile(f"{path}: empty file") from None
    df.columns = [c.strip() for c in df.columns]
    table = FeatureTable.from_frame(df, expected_schema, source=str(path))
    logger.info("loaded %d rows from %s", len(table), path)
    return table


@dataclass(frozen=True)
class EncoderSpec:
    """Fitted preprocessing: dropped columns, one-hot maps and min-max bounds."""

    dropped_columns: frozenset
    numeric_columns: tuple[str, ...]
    onehot_maps: Mapping[str, tuple[str, ...]]
    minmax_bounds: np.ndarray  # (D, 2): per output feature (min, max)
    apply_minmax: bool
    feature_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "onehot_maps", MappingProxyType(dict(self.onehot_maps)))
        bounds = np.array(self.minmax_bounds, dtype=np.float64, copy=True)
        bounds.setflags(write=False)
        object.__setattr__(self, "minmax_bounds", bounds)
        if not self.feature_names:
            names = list(self.numeric_columns)
            for col, cats in self.onehot_maps.items():
                names.extend(f"{col}_{c}" for c in cats)
            object.__setattr__(self, "feature_names", tuple(names))

    @property
    def n_features(self) -> int:
        return len(self.feature_names)


@dataclass(frozen=True)
class DesignMatrix:
    """Dense ``D x N`` feature matrix (features along rows) with its labels."""

    values: np.ndarray
    feature_names: tuple[str, ...]
    labels_binary: np.ndarray | None = None
    labels_multiclass: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("values must be a 2-D features x samples array")
        names = tuple(self.feature_names)
        if len(names) != values.shape[0]:
            raise ValueError(f"{len(names)} feature names for {values.shape[0]} rows")
        if len(set(names)) != len(names):
            raise ValueError("duplicate feature names")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_features(self) -> int:
        return self.values.shape[0]

    @property
    def n_samples(self) -> int:
        return self.values.shape[1]

    def samples(self) -> np.ndarray:
        """Samples-major ``N x D`` view."""
        return self.values.T

    def labels(self, task: str) -> np.ndarray:
        y = self.labels_binary if task == "binary" else self.labels_multiclass
        if y is None:
            raise MissingColumn("label" if task == "binary" else "attack_cat")
        return y

    def with_values(self, values: np.ndarray, feature_names: Sequence[str]) -> "DesignMatrix":
        return DesignMatrix(values, tuple(feature_names), self.labels_binary, self.labels_multiclass)


def fit_encoder(
    train: FeatureTable,
    apply_minmax: bool,
    expected_nominal: Sequence[str] = NOMINAL_FEATURES,
    drop: Sequence[str] = (),
) -> EncoderSpec:
    """Fit one-hot category lists (and min-max bounds) on a training table."""
    if len(train) == 0:
        raise EmptyFile(f"{train.source}: no data rows")
    dropped = frozenset(ALWAYS_DROPPED | set(drop))
    nominal = [n for n in train.columns_of(NOMINAL) if n not in dropped]
    for name in nominal:
        if name not in expected_nominal:
            raise UnexpectedNominalColumn(name)
    for name in expected_nominal:
        if name not in nominal:
            raise MissingColumn(name)
    numeric = tuple(n for n in train.columns_of(NUMERIC) if n not in dropped)

    onehot = {}
    for name in nominal:
        onehot[name] = tuple(sorted(set(_fill_nominal(train.frame[name]))))

    spec = EncoderSpec(
        dropped_columns=dropped,
        numeric_columns=numeric,
        onehot_maps=onehot,
        minmax_bounds=np.zeros((0, 2)),
        apply_minmax=False,
    )
    raw = _encode(spec, train)
    bounds = np.column_stack([raw.min(axis=1), raw.max(axis=1)]) if apply_minmax else np.zeros((0, 2))
    return EncoderSpec(
        dropped_columns=dropped,
        numeric_columns=numeric,
        onehot_maps=onehot,
        minmax_bounds=bounds,
        apply_minmax=apply_minmax,
    )


def _encode(spec: EncoderSpec, table: FeatureTable) -> np.ndarray:
    frame = table.frame
    n = len(frame)
    out = np.zeros((spec.n_features, n), dtype=np.float64)
    row = 0
    for name in spec.numeric_columns:
        if name not in frame.columns:
            raise MissingColumn(name)
        out[row] = _parse_numeric(frame[name], name)
        row += 1
    cols = np.arange(n)
    for name, cats in spec.onehot_maps.items():
        if name not in frame.columns:
            raise MissingColumn(name)
        codes = pd.Categorical(_fill_nominal(frame[name]), categories=list(cats)).codes
        seen = codes >= 0  # unseen categories get code -1 and stay all-zero
        out[row + codes[seen], cols[seen]] = 1.0
        row += len(cats)
    return out


def apply_encoder(spec: EncoderSpec, table: FeatureTable) -> DesignMatrix:
    """Encode ``table`` into a :class:`DesignMatrix` using a fitted spec."""
    values = _encode(spec, table)
    if spec.apply_minmax:
        lo = spec.minmax_bounds[:, 0:1]
        span = spec.minmax_bounds[:, 1:2] - lo
        constant = span[:, 0] <= 0
        safe = np.where(span > 0, span, 1.0)
        values -= lo
        values /= safe
        values[constant] = 0.0
        np.clip(values, 0.0, 1.0, out=values)

    frame = table.frame
    y_bin = frame["label"].to_numpy(dtype=np.int64) if "label" in frame.columns else None
    y_multi = None
    if "attack_cat" in frame.columns:
        index = {c: i for i, c in enumerate(CLASSES)}
        y_multi = np.fromiter((index[c] for c in frame["attack_cat"]), dtype=np.int64, count=len(frame))
    return DesignMatrix(values, spec.feature_names, y_bin, y_multi)
