"""Project min-max scaled records onto their leading principal components.

The covariance uses 1/N, the eigenproblem is solved in-repo by cyclic
Jacobi rotations, and every component is sign-fixed so its largest entry
is positive. Transforming subtracts the training mean and multiplies by
the K x D projection.
"""

import numpy as np

from nidsbench import reduction
from nidsbench.ingest import apply_encoder, fit_encoder, load_csv
from nidsbench.linalg import eigh_symmetric

from _paths import input_paths

train_path, test_path = input_paths()
train = load_csv(train_path)
spec = fit_encoder(train, apply_minmax=True)
x = apply_encoder(spec, train)

mean, cov = reduction.covariance(x)
vals, vecs = eigh_symmetric(cov)
total = vals.sum()
print(f"trace {np.trace(cov):.6f} vs eigenvalue sum {total:.6f}")
for k in (4, 8, 16):
    print(f"K={k:<2} explains {100 * vals[:k].sum() / total:5.1f}% of the variance")

model = reduction.pca_fit(x, 8)
u = reduction.pca_transform(model, apply_encoder(spec, load_csv(test_path)))
print(f"projected test matrix {u.values.shape}, names {u.feature_names[:3]}...")

top = np.argsort(-np.abs(model.projection[:, 0]))[:5]
print("largest loadings of pc_1:", ", ".join(f"{x.feature_names[i]} {model.projection[i, 0]:+.3f}" for i in top))
