"""Shared input lookup for the demo scripts.

Pass a training and a test CSV on the command line to use real data.
Otherwise the small fixture shipped with the tests is split in two: even
rows for training and odd rows for testing.
"""

import sys
import tempfile
from pathlib import Path

import pandas as pd

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "data" / "unsw_fixture.csv"


def input_paths():
    if len(sys.argv) >= 3:
        return Path(sys.argv[1]), Path(sys.argv[2])
    df = pd.read_csv(FIXTURE, dtype=str, keep_default_na=False)
    out = Path(tempfile.mkdtemp(prefix="nidsbench-fixture-"))
    df.iloc[0::2].to_csv(out / "train.csv", index=False)
    df.iloc[1::2].to_csv(out / "test.csv", index=False)
    return out / "train.csv", out / "test.csv"
