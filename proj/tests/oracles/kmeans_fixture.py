"""Reference KMeans partition for the two-orthogonal-blob refinement case.

Writes `label x0 x1 ...` rows where label is the scikit-learn KMeans(k=2,
k-means++) assignment, canonicalized so the first point has label 0. Also
prints the pairwise-mean cosine (tightness) of the merged cluster.
"""
import itertools
import numpy as np
from sklearn.cluster import KMeans

rng = np.random.default_rng(21)
dim = 8
pts = []
for a in (0, 1):
    c = np.zeros(dim)
    c[a] = 1.0
    b = c + rng.normal(0, 0.02, size=(10, dim))
    pts.append(b / np.linalg.norm(b, axis=1, keepdims=True))
X = np.vstack(pts).astype(np.float32)

assignments = set()
for seed in range(10):
    lab = KMeans(n_clusters=2, init="k-means++", n_init=1, random_state=seed).fit_predict(X.astype(np.float64))
    if lab[0] != 0:
        lab = 1 - lab
    assignments.add(tuple(lab))
assert len(assignments) == 1, assignments
lab = next(iter(assignments))

Xd = X.astype(np.float64)
cos = [Xd[i] @ Xd[j] for i, j in itertools.combinations(range(len(Xd)), 2)]
print("tightness", np.mean(cos))
print("labels", lab)
with open("tests/data/kmeans_two_blobs.txt", "w") as f:
    f.write(f"{len(X)} {dim}\n")
    for l, row in zip(lab, X):
        f.write(str(l) + " " + " ".join(repr(float(v)) for v in row) + "\n")
