"""Run the whole grid and summarise it.

Two tasks, two reducers at K = 4, 8, 16 and five classifiers give sixty
runs. Reports land in a runs/ directory as JSON lines. The tables and the
comparison summary are built from those files, the same way the
`nidsbench report` and `nidsbench compare` commands build them.
"""

import json
import sys
import tempfile
from pathlib import Path

from nidsbench import bench
from nidsbench.bench import Cache, RunConfig
from nidsbench.classifiers import KINDS

from _paths import input_paths

train_path, test_path = input_paths()
out = Path(sys.argv[3]) if len(sys.argv) > 3 else Path(tempfile.mkdtemp(prefix="nidsbench-"))

# one timed pass per cell keeps the demo quick; the CLI default is three
base = RunConfig(train_path, test_path, repeat=1, output_dir=out)
failures = []
reports = bench.run_grid(base, bench.TASKS, bench.grid_reducers(), KINDS, Cache(out / "artifacts"), failures)
print(f"{len(reports)} runs written to {out / 'runs'}, {len(failures)} failures")

tables = bench.emit_tables(bench.read_reports([out / "runs"]), "markdown", out / "tables")
print(tables["binary_k8"])
name = next(n for n in tables if n.startswith("per_class_multiclass_selection"))
print(name)
print(tables[name])

summary = bench.compare_runs(reports)
for task, flags in summary.flags.items():
    print(task, json.dumps({k: flags[k] for k in ("higher_accuracy_small_k", "higher_accuracy_large_k",
                                                  "lower_inference_time", "less_sensitive_to_k")}))
