"""Train the five classifiers on both reduced representations.

Each fit and predict call is timed on its own. The per-sample inference
time adds the reducer transform to the prediction and divides by the number
of test records.
"""

import time

from nidsbench import classifiers, reduction
from nidsbench.classifiers import KINDS, ClassifierSpec
from nidsbench.ingest import apply_encoder, fit_encoder, load_csv
from nidsbench.metrics import compose_timing, evaluate

from _paths import input_paths

K = 8
train_path, test_path = input_paths()
train, test = load_csv(train_path), load_csv(test_path)

for method in ("selection", "extraction"):
    spec = fit_encoder(train, apply_minmax=method == "extraction")
    x_train, x_test = apply_encoder(spec, train), apply_encoder(spec, test)

    start = time.perf_counter()
    if method == "selection":
        model = reduction.select_features(reduction.correlation_matrix(x_train), top_k=K)
    else:
        model = reduction.pca_fit(x_train, K)
    u_train = reduction.transform(model, x_train)
    fit_reducer = time.perf_counter() - start

    start = time.perf_counter()
    u_test = reduction.transform(model, x_test)
    transform_s = time.perf_counter() - start

    print(f"\n{method}, K={K}")
    for kind in KINDS:
        trained, fit_s = classifiers.fit(ClassifierSpec(kind), u_train, x_train.labels("binary"))
        pred, pred_s = classifiers.predict(trained, u_test)
        timing = compose_timing(fit_reducer, fit_s, transform_s, pred_s, x_test.n_samples)
        r = evaluate(x_test.labels("binary"), pred, (0, 1), timing,
                     task="binary", method=method, k=K, classifier=kind)
        print(f"  {kind:<14} P {r.precision:6.2f}  R {r.recall:6.2f}  F1 {r.f1:6.2f}"
              f"  train {timing.training_time:7.3f}s  infer {timing.inference_time_per_sample:8.2f}us")
