"""Experiment runner: one configured run, the full grid, tables and the comparison summary."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import statistics
import threading
import time
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import classifiers, reduction, serialize
from .classifiers import KINDS, ClassifierSpec
from .errors import ConfigError, InsufficientCoverage, MixedTaskReports, NidsBenchError, NoReports
from .ingest import CLASSES, apply_encoder, fit_encoder, load_csv
from .metrics import EvalReport, compose_timing, evaluate

logger = logging.getLogger(__name__)

TASKS = ("binary", "multiclass")
METHODS = ("selection", "extraction", "none")
BINARY_CLASSES = ("Normal", "Abnormal")
GRID_K = (4, 8, 16)

#: Held around every timed fit/predict so that timed passes never overlap.
TIMING_LOCK = threading.Lock()


@dataclass(frozen=True)
class ReducerConfig:
    method: str = "none"
    k: int | None = None
    threshold: float | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown reducer {self.method!r}; expected one of {METHODS}")
        if self.method == "selection":
            if (self.k is None) == (self.threshold is None):
                raise ConfigError("selection needs exactly one of k or threshold")
        elif self.method == "extraction":
            if self.k is None or self.threshold is not None:
                raise ConfigError("extraction needs k and no threshold")
        elif self.k is not None or self.threshold is not None:
            raise ConfigError("reducer 'none' takes no k or threshold")
        if self.k is not None and int(self.k) < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")

    @property
    def key(self) -> str:
        if self.method == "none":
            return "none"
        if self.threshold is not None:
            return f"{self.method}-t{self.threshold!r}"
        return f"{self.method}-k{self.k}"


@dataclass(frozen=True)
class RunConfig:
    train_path: Path
    test_path: Path
    task: str = "binary"
    reducer: ReducerConfig = field(default_factory=ReducerConfig)
    classifier: str = "decision_tree"
    hyperparams: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: Path | None = None
    repeat: int = 3
    averaging: str = "weighted"
    absolute_correlation: bool = False

    def __post_init__(self):
        object.__setattr__(self, "train_path", Path(self.train_path))
        object.__setattr__(self, "test_path", Path(self.test_path))
        if self.output_dir is not None:
            object.__setattr__(self, "output_dir", Path(self.output_dir))
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if int(self.repeat) < 1:
            raise ConfigError(f"repeat must be >= 1, got {self.repeat}")
        if self.averaging not in ("weighted", "macro"):
            raise ConfigError(f"unknown averaging {self.averaging!r}")
        try:
            self.classifier_spec()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def classifier_spec(self) -> ClassifierSpec:
        return ClassifierSpec(self.classifier, dict(self.hyperparams), self.seed)

    def to_dict(self) -> dict[str, Any]:
        return {
            "train": str(self.train_path),
            "test": str(self.test_path),
            "task": self.task,
            "reducer": self.reducer.method,
            "k": self.reducer.k,
            "threshold": self.reducer.threshold,
            "classifier": self.classifier_spec().to_dict(),
            "seed": self.seed,
            "repeat": self.repeat,
            "averaging": self.averaging,
            "absolute_correlation": self.absolute_correlation,
            "out": None if self.output_dir is None else str(self.output_dir),
        }


_CONFIG_KEYS = {
    "train", "test", "task", "reducer", "k", "threshold", "classifier", "seed",
    "repeat", "out", "averaging", "absolute_correlation",
}


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS and not key.startswith("hp."):
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _scalar(text: str):
    low = text.lower()
    if low in ("none", "null", ""):
        return None
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def config_from_values(values: dict[str, Any]) -> RunConfig:
    """Build a :class:`RunConfig` from flat string (or already typed) values."""

    def get(key, default=None):
        v = values.get(key)
        return default if v is None else v

    try:
        train, test = values["train"], values["test"]
    except KeyError as exc:
        raise ConfigError(f"missing required setting {exc.args[0]!r}") from None
    k = get("k")
    threshold = get("threshold")
    reducer = ReducerConfig(
        method=str(get("reducer", "none")),
        k=None if k is None else int(k),
        threshold=None if threshold is None else float(threshold),
    )
    hyper = {key[3:]: _scalar(str(v)) if isinstance(v, str) else v for key, v in values.items() if key.startswith("hp.")}
    absolute = get("absolute_correlation", False)
    if isinstance(absolute, str):
        absolute = absolute.lower() == "true"
    return RunConfig(
        train_path=train,
        test_path=test,
        task=str(get("task", "binary")),
        reducer=reducer,
        classifier=str(get("classifier", "decision_tree")),
        hyperparams=hyper,
        seed=int(get("seed", 0)),
        output_dir=get("out"),
        repeat=int(get("repeat", 3)),
        averaging=str(get("averaging", "weighted")),
        absolute_correlation=bool(absolute),
    )


def load_config(path, overrides: dict[str, Any] | None = None) -> RunConfig:
    values = parse_config_text(Path(path).read_text(encoding="utf-8"))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return config_from_values(values)


def file_checksum(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def fingerprint(cfg: RunConfig, checksums: dict[str, str]) -> str:
    """Hash of everything that determines the metric fields of a run."""
    payload = {k: v for k, v in cfg.to_dict().items() if k not in ("train", "test", "out", "repeat")}
    payload["datasets"] = checksums
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _median(values):
    return float(statistics.median(values))


class Cache:
    """In-memory reuse of loaded tables, encodings and fitted reducers.

    Reducer fits are keyed by training-file checksum and reducer settings, so
    every classifier sharing a reducer is charged the same reducer fit time.
    When ``artifact_dir`` is set, fitted encoders and reducers are also
    written there as model containers.
    """

    def __init__(self, artifact_dir=None):
        self.artifact_dir = None if artifact_dir is None else Path(artifact_dir)
        self._tables = {}
        self._checksums = {}
        self._encoded = {}
        self._reducers = {}
        self._lock = threading.Lock()

    def checksum(self, path: Path) -> str:
        key = str(Path(path).resolve())
        if key not in self._checksums:
            self._checksums[key] = file_checksum(path)
        return self._checksums[key]

    def table(self, path: Path):
        key = self.checksum(path)
        if key not in self._tables:
            self._tables[key] = load_csv(path)
        return self._tables[key]

    def encoded(self, cfg: RunConfig):
        apply_minmax = cfg.reducer.method == "extraction"
        key = (self.checksum(cfg.train_path), self.checksum(cfg.test_path), apply_minmax)
        if key not in self._encoded:
            train = self.table(cfg.train_path)
            spec = fit_encoder(train, apply_minmax=apply_minmax)
            self._encoded[key] = (spec, apply_encoder(spec, train), apply_encoder(spec, self.table(cfg.test_path)))
            self._save(spec, f"encoder-{key[0][:12]}-{'minmax' if apply_minmax else 'raw'}")
        return self._encoded[key]

    def reducer(self, cfg: RunConfig, x_train):
        """Fitted reducer, the reduced training matrix and the median fit time."""
        key = (self.checksum(cfg.train_path), cfg.reducer.key, cfg.absolute_correlation)
        if key not in self._reducers:
            if cfg.reducer.method == "none":
                self._reducers[key] = (None, x_train, 0.0)
            else:
                times = []
                for _ in range(cfg.repeat):
                    with TIMING_LOCK:
                        start = time.perf_counter()
                        model = fit_reducer(cfg.reducer, x_train, cfg.absolute_correlation)
                        u_train = reduction.transform(model, x_train)
                        times.append(time.perf_counter() - start)
                self._reducers[key] = (model, u_train, _median(times))
                suffix = "-abs" if cfg.absolute_correlation else ""
                self._save(model, f"{cfg.reducer.key}{suffix}-{key[0][:12]}")
        return self._reducers[key]

    def _save(self, obj, name):
        if self.artifact_dir is None:
            return
        self.artifact_dir.mkdir(parents=True, exist_ok=True)
        with self._lock:
            serialize.save(obj, self.artifact_dir / f"{name}.npz")


def fit_reducer(cfg: ReducerConfig, x_train, absolute_correlation=False):
    if cfg.method == "selection":
        stats = reduction.correlation_matrix(x_train, absolute=absolute_correlation)
        return reduction.select_features(stats, threshold=cfg.threshold, top_k=cfg.k)
    if cfg.method == "extraction":
        return reduction.pca_fit(x_train, cfg.k)
    raise ConfigError("reducer 'none' has nothing to fit")


def _class_names(task):
    return BINARY_CLASSES if task == "binary" else CLASSES


def run_experiment(cfg: RunConfig, cache: Cache | None = None) -> EvalReport:
    """Encode, reduce, fit, predict and score one configuration.

    Every timed component is the median of ``cfg.repeat`` passes; the metric
    fields come from the first pass. With ``cfg.output_dir`` set the report is
    written to ``<out>/runs/<fingerprint>.jsonl``.
    """
    cache = cache or Cache(None if cfg.output_dir is None else cfg.output_dir / "artifacts")
    try:
        checksums = {"train": cache.checksum(cfg.train_path), "test": cache.checksum(cfg.test_path)}
        _, x_train, x_test = cache.encoded(cfg)
        model, u_train, fit_reducer_s = cache.reducer(cfg, x_train)
        names = _class_names(cfg.task)
        y_train = x_train.labels(cfg.task)
        y_test = x_test.labels(cfg.task)
        spec = cfg.classifier_spec()

        transform_s, fit_s, predict_s = [], [], []
        y_pred = None
        for _ in range(cfg.repeat):
            with TIMING_LOCK:
                start = time.perf_counter()
                u_test = x_test if model is None else reduction.transform(model, x_test)
                transform_s.append(time.perf_counter() - start)
                trained, t_fit = classifiers.fit(spec, u_train, y_train)
                pred, t_pred = classifiers.predict(trained, u_test)
            fit_s.append(t_fit)
            predict_s.append(t_pred)
            if y_pred is None:
                y_pred = pred
    except NidsBenchError as exc:
        exc.run_context = {"task": cfg.task, "reducer": cfg.reducer.key, "classifier": cfg.classifier}
        raise

    timing = compose_timing(
        fit_reducer=fit_reducer_s,
        fit_model=_median(fit_s),
        transform_reducer=0.0 if model is None else _median(transform_s),
        predict_model=_median(predict_s),
        n_test=len(y_test),
    )
    k = None if model is None else model.k
    config = cfg.to_dict()
    config["datasets"] = checksums
    config["predict_batching"] = f"one batch of {len(y_test)} samples; per-sample time = total / N"
    report = evaluate(
        np.asarray(names, dtype=object)[y_test],
        np.asarray(names, dtype=object)[y_pred],
        names,
        timing,
        averaging=cfg.averaging,
        task=cfg.task,
        method=cfg.reducer.method,
        k=k,
        classifier=cfg.classifier,
        fingerprint=fingerprint(cfg, checksums),
        config=config,
    )
    if cfg.output_dir is not None:
        write_report(report, cfg.output_dir)
    return report


def write_report(report: EvalReport, output_dir) -> Path:
    runs = Path(output_dir) / "runs"
    runs.mkdir(parents=True, exist_ok=True)
    path = runs / f"{report.task}-{report.method}-{report.k}-{report.classifier}-{report.fingerprint[:12]}.jsonl"
    path.write_text(json.dumps(report.to_dict(), sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_reports(paths: Iterable) -> list[EvalReport]:
    """Load reports from JSON-lines files or directories containing them."""
    reports = []
    for p in paths:
        p = Path(p)
        files = sorted(p.rglob("*.jsonl")) if p.is_dir() else [p]
        for f in files:
            for line in f.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    reports.append(EvalReport.from_dict(json.loads(line)))
    return reports


def grid_reducers(ks: Sequence[int] = GRID_K) -> list[ReducerConfig]:
    return [ReducerConfig(m, k=k) for m in ("selection", "extraction") for k in ks]


def run_grid(
    base: RunConfig,
    tasks: Sequence[str],
    reducers: Sequence[ReducerConfig],
    classifier_kinds: Sequence[str],
    cache: Cache | None = None,
    failures: list | None = None,
) -> list[EvalReport]:
    """Run the cartesian product tasks x reducers x classifiers.

    Encodings and reducer fits are shared across cells.  A failing cell is
    logged, appended to ``failures`` (and to ``<out>/errors.jsonl``) and the
    grid continues.
    """
    if not tasks or not reducers or not classifier_kinds:
        raise ConfigError("tasks, reducers and classifiers must be non-empty")
    cache = cache or Cache(None if base.output_dir is None else base.output_dir / "artifacts")
    reports = []
    for task, red, kind in product(tasks, reducers, classifier_kinds):
        hyper = base.hyperparams if kind == base.classifier else {}
        cfg = replace(base, task=task, reducer=red, classifier=kind, hyperparams=hyper)
        try:
            reports.append(run_experiment(cfg, cache))
        except Exception as exc:  # noqa: BLE001 - a failing cell must not stop the grid
            logger.exception("grid cell %s/%s/%s failed", task, red.key, kind)
            record = {"task": task, "reducer": red.key, "classifier": kind,
                      "error": type(exc).__name__, "message": str(exc)}
            if failures is not None:
                failures.append(record)
            if base.output_dir is not None:
                base.output_dir.mkdir(parents=True, exist_ok=True)
                with open(base.output_dir / "errors.jsonl", "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(record) + "\n")
    return reports


# ----------------------------------------------------------------------------
# tables

_SIDES = ("extraction", "selection")
_METRIC_COLS = ("P", "R", "F1", "training (s)", "inference (us)")


def _fmt(v):
    return "" if v is None or (isinstance(v, float) and np.isnan(v)) else f"{v:.2f}"


def _index(reports):
    cells = {}
    for r in reports:
        if r.method == "none":
            continue
        key = (r.task, r.k, r.method, r.classifier)
        if key in cells:
            raise MixedTaskReports(f"two reports for the same table cell {key}")
        cells[key] = r
    return cells


def _comparison_rows(cells, task, k):
    kinds = [c for c in KINDS if any((task, k, m, c) in cells for m in _SIDES)]
    header = ["classifier"] + [f"{m} {col}" for m in _SIDES for col in _METRIC_COLS]
    rows = []
    for kind in kinds:
        row = [kind]
        for m in _SIDES:
            r = cells.get((task, k, m, kind))
            if r is None:
                row += [""] * len(_METRIC_COLS)
            else:
                row += [_fmt(v) for v in (r.precision, r.recall, r.f1, r.timing.training_time,
                                          r.timing.inference_time_per_sample)]
        rows.append(row)
    return header, rows


def best_classifier(reports: Sequence[EvalReport], task: str, method: str) -> str:
    """Classifier with the highest mean F1 over the K values it was run at."""
    scores = {}
    for r in reports:
        if r.task == task and r.method == method:
            scores.setdefault(r.classifier, []).append(r.f1)
    if not scores:
        raise NoReports(f"no {method} reports for {task}")
    return max(sorted(scores), key=lambda c: (np.mean(scores[c]), -KINDS.index(c)))


def _per_class_rows(cells, reports, task, method):
    kind = best_classifier(reports, task, method)
    ks = sorted({k for (t, k, m, c) in cells if t == task and m == method and c == kind})
    classes = None
    for k in ks:
        r = cells[(task, k, method, kind)]
        if classes is not None and tuple(r.classes) != classes:
            raise MixedTaskReports(f"inconsistent class lists within task {task!r}")
        classes = tuple(r.classes)
    header = ["class"] + [f"K={k}" for k in ks]
    rows = []
    for i, name in enumerate(classes):
        rows.append([name] + [_fmt(cells[(task, k, method, kind)].per_class_accuracy[i]) for k in ks])
    rows.append(["Average"] + [_fmt(cells[(task, k, method, kind)].recall) for k in ks])
    return kind, header, rows


def _render(header, rows, fmt):
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "markdown":
        lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
        lines += ["| " + " | ".join(row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")


def parse_table(text: str, fmt: str) -> tuple[list[str], list[list[str]]]:
    """Inverse of the table rendering: header and rows as strings."""
    if fmt == "csv":
        table = list(csv.reader(io.StringIO(text)))
        return table[0], table[1:]
    if fmt == "markdown":
        lines = [ln.strip() for ln in text.strip().splitlines()]
        cells = [[c.strip() for c in ln.strip("|").split("|")] for ln in lines]
        return cells[0], cells[2:]
    raise ValueError(f"unknown table format {fmt!r}")


def emit_tables(reports: Sequence[EvalReport], fmt: str = "markdown", out_dir=None) -> dict[str, str]:
    """Render method-comparison tables per (task, K) and per-class accuracy tables.

    Returns ``{table name: text}``; with ``out_dir`` each table is also written
    to ``<out_dir>/<name>.csv`` or ``.md``.
    """
    if not reports:
        raise NoReports("no reports to tabulate")
    cells = _index(reports)
    if not cells:
        raise NoReports("no selection or extraction reports to tabulate")
    tables = {}
    for task, k in sorted({(t, k) for (t, k, _, _) in cells}, key=lambda tk: (TASKS.index(tk[0]), tk[1])):
        header, rows = _comparison_rows(cells, task, k)
        tables[f"{task}_k{k}"] = _render(header, rows, fmt)
    for task in [t for t in TASKS if any(key[0] == t for key in cells)]:
        for method in _SIDES:
            if not any(key[0] == task and key[2] == method for key in cells):
                continue
            kind, header, rows = _per_class_rows(cells, reports, task, method)
            tables[f"per_class_{task}_{method}_{kind}"] = _render(header, rows, fmt)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        ext = "csv" if fmt == "csv" else "md"
        for name, text in tables.items():
            (out_dir / f"{name}.{ext}").write_text(text, encoding="utf-8")
    return tables


# ----------------------------------------------------------------------------
# comparison summary

TIE_TOL = 1e-9


def _winner(a_name, a, b_name, b, higher_is_better=True):
    if abs(a - b) <= TIE_TOL:
        return "tie"
    better_a = a > b if higher_is_better else a < b
    return a_name if better_a else b_name


@dataclass(frozen=True)
class ComparisonSummary:
    """Data-derived comparison between selection and extraction.

    ``per_k`` maps ``(task, K)`` to the best method/classifier and the F1
    winner; ``flags`` maps each task to method-level findings.
    """

    per_k: dict
    flags: dict

    def to_dict(self):
        return {
            "per_k": {f"{t}/{k}": v for (t, k), v in sorted(self.per_k.items())},
            "flags": self.flags,
        }


def compare_runs(reports: Sequence[EvalReport]) -> ComparisonSummary:
    cells = _index(reports)
    per_k = {}
    flags = {}
    tasks = [t for t in TASKS if any(key[0] == t for key in cells)]
    if not tasks:
        raise InsufficientCoverage("no selection/extraction reports")
    for task in tasks:
        ks = sorted(
            k for k in {key[1] for key in cells if key[0] == task}
            if all(any(key[:3] == (task, k, m) for key in cells) for m in _SIDES)
        )
        if len(ks) < 2:
            raise InsufficientCoverage(f"{task}: need both methods at two or more K values, have {ks}")

        best = {m: {} for m in _SIDES}
        for k in ks:
            for m in _SIDES:
                cands = [r for key, r in cells.items() if key[:3] == (task, k, m)]
                top = max(cands, key=lambda r: (r.f1, -KINDS.index(r.classifier)))
                best[m][k] = top
            ext, sel = best["extraction"][k], best["selection"][k]
            overall = sel if sel.f1 > ext.f1 else ext
            per_k[(task, k)] = {
                "best_method": overall.method if abs(sel.f1 - ext.f1) > TIE_TOL else "tie",
                "best_classifier": overall.classifier,
                "best_f1": overall.f1,
                "f1_winner": _winner("extraction", ext.f1, "selection", sel.f1),
                "best_f1_by_method": {m: best[m][k].f1 for m in _SIDES},
                "best_classifier_by_method": {m: best[m][k].classifier for m in _SIDES},
            }

        def median_of(m, attr):
            vals = [getattr(r.timing, attr) for key, r in cells.items()
                    if key[0] == task and key[2] == m and key[1] in ks]
            return _median(vals)

        f1_range = {m: max(best[m][k].f1 for k in ks) - min(best[m][k].f1 for k in ks) for m in _SIDES}
        small, large = ks[0], ks[1:]
        large_winners = {per_k[(task, k)]["f1_winner"] for k in large}

        # pairwise inference comparison at equal (classifier, K)
        pairs = [(cells[(task, k, "selection", c)], cells[(task, k, "extraction", c)])
                 for k in ks for c in KINDS
                 if (task, k, "selection", c) in cells and (task, k, "extraction", c) in cells]
        flags[task] = {
            "higher_accuracy_small_k": per_k[(task, small)]["f1_winner"],
            "higher_accuracy_large_k": large_winners.pop() if len(large_winners) == 1 else "mixed",
            "lower_training_time": _winner(
                "extraction", median_of("extraction", "training_time"),
                "selection", median_of("selection", "training_time"), higher_is_better=False),
            "lower_inference_time": _winner(
                "extraction", median_of("extraction", "inference_time_per_sample"),
                "selection", median_of("selection", "inference_time_per_sample"), higher_is_better=False),
            "selection_faster_inference_pairs": f"{sum(s.timing.inference_time_per_sample < e.timing.inference_time_per_sample for s, e in pairs)}/{len(pairs)}",
            "f1_range": f1_range,
            "less_sensitive_to_k": _winner("extraction", f1_range["extraction"], "selection",
                                           f1_range["selection"], higher_is_better=False),
            "best_classifier": {m: best_classifier(reports, task, m) for m in _SIDES},
            "degrades_when_k_large": {m: best[m][ks[-1]].f1 < best[m][ks[-2]].f1 - TIE_TOL for m in _SIDES},
            "improves_with_k": {
                m: all(best[m][a].f1 <= best[m][b].f1 + TIE_TOL for a, b in zip(ks, ks[1:])) for m in _SIDES
            },
            "k_values": ks,
        }
    return ComparisonSummary(per_k, flags)
