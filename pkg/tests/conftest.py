import os
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from nidsbench import reduction
from nidsbench.ingest import apply_encoder, fit_encoder, load_csv

DATA = Path(__file__).parent / "data"
FIXTURE_CSV = DATA / "unsw_fixture.csv"

TRAIN_NAME = "UNSW_NB15_training-set.csv"
TEST_NAME = "UNSW_NB15_testing-set.csv"


@pytest.fixture(scope="session")
def fixture_csv():
    return FIXTURE_CSV


@pytest.fixture(scope="session")
def fixture_table():
    return load_csv(FIXTURE_CSV)


@pytest.fixture(scope="session")
def split_csvs(tmp_path_factory):
    """Fixture rows split into train (even rows) and test (odd rows) files."""
    df = pd.read_csv(FIXTURE_CSV, dtype=str, keep_default_na=False)
    out = tmp_path_factory.mktemp("split")
    train, test = out / "train.csv", out / "test.csv"
    df.iloc[0::2].to_csv(train, index=False)
    df.iloc[1::2].to_csv(test, index=False)
    return train, test


@pytest.fixture(scope="session")
def small_problem(fixture_table):
    """Binary fixture problem: min-max encoded, top-8 features, samples-major arrays."""
    spec = fit_encoder(fixture_table, apply_minmax=True)
    dm = apply_encoder(spec, fixture_table)
    model = reduction.select_features(reduction.correlation_matrix(dm), top_k=8)
    x = reduction.apply_selection(model, dm).samples()
    y = dm.labels("binary")
    return x[0::2], y[0::2], x[1::2], y[1::2]


@pytest.fixture(scope="session")
def real_data():
    """Paths of the official 10% split, or skip when they are not available."""
    root = os.environ.get("NIDSBENCH_DATA_DIR")
    if not root:
        pytest.skip("NIDSBENCH_DATA_DIR is not set; the UNSW-NB15 CSVs are not available")
    train, test = Path(root) / TRAIN_NAME, Path(root) / TEST_NAME
    missing = [p.name for p in (train, test) if not p.is_file()]
    if missing:
        pytest.skip(f"missing in {root}: {', '.join(missing)}")
    return train, test


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ---------------------------------------------------------------------------
# one line per acceptance criterion at the end of the run

_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.module.__name__.rsplit(".", 1)[-1] != "test_acceptance":
        return
    label = (item.function.__doc__ or item.name).strip().splitlines()[0]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        detail = ""
        if report.skipped and isinstance(report.longrepr, tuple):
            detail = f" ({report.longrepr[2]})"
        _ACCEPTANCE.append(f"{status}  {label}{detail}")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE:
        terminalreporter.write_line(line)
