"""Turn raw flow records into a numeric design matrix.

Nominal columns (proto, service, state) are one-hot encoded with their
categories in sorted order, empty or '-' cells become 'other', and id and
attack_cat are dropped from the features. Min-max scaling is optional
because only the PCA path uses it.
"""

import numpy as np

from nidsbench.ingest import apply_encoder, fit_encoder, load_csv

from _paths import input_paths

train_path, test_path = input_paths()
train = load_csv(train_path)
print(f"{len(train)} records, {len(train.names)} columns")

raw = fit_encoder(train, apply_minmax=False)
scaled = fit_encoder(train, apply_minmax=True)
print(f"encoded width D = {raw.n_features}")
for col, cats in raw.onehot_maps.items():
    print(f"  {col}: {len(cats)} categories, first few {cats[:4]}")

dm = apply_encoder(scaled, load_csv(test_path))
print(f"test matrix {dm.values.shape} (features x samples)")
print(f"scaled range [{dm.values.min():.2f}, {dm.values.max():.2f}]")

# the same spec always gives the same bytes
again = apply_encoder(scaled, load_csv(test_path))
print("deterministic:", np.array_equal(dm.values, again.values))
