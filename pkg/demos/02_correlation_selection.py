"""Rank features by their average correlation with all the others.

Each feature gets the mean of its row of the correlation matrix (the
diagonal 1 included). Selection keeps the highest averages, either the
top K or everything above a threshold. Picking rows needs no arithmetic,
which is why this path is cheap at inference time.
"""

from nidsbench import reduction
from nidsbench.ingest import apply_encoder, fit_encoder, load_csv

from _paths import input_paths

train_path, _ = input_paths()
train = load_csv(train_path)
dm = apply_encoder(fit_encoder(train, apply_minmax=False), train)

stats = reduction.correlation_matrix(dm)
print("top features by average correlation:")
for i in stats.ranking()[:10]:
    print(f"  {stats.feature_names[i]:<20} {stats.averages[i]: .4f}")
if stats.degenerate:
    print("constant features (correlation 0 with the rest):", ", ".join(stats.degenerate))

for k in (4, 8, 16):
    model = reduction.select_features(stats, top_k=k)
    print(f"K={k:<2} -> {', '.join(model.names)}")

cut = stats.averages[stats.ranking()[8]]
model = reduction.select_features(stats, threshold=cut)
print(f"threshold {cut:.4f} keeps {model.k} features")

# absolute averaging is available for comparison
abs_stats = reduction.correlation_matrix(dm, absolute=True)
print("top 8 with |c|:", ", ".join(reduction.select_features(abs_stats, top_k=8).names))
