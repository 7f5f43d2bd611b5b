"""Regenerates tests/data/optics_oracle.json from scikit-learn's OPTICS.

Distances are computed here with plain float arithmetic in the same
order as the C++ euclidean distance, and handed to sklearn as a
precomputed matrix, so both sides see bit-identical inputs.
"""
import json
import math
import random
import sys

import numpy as np
import sklearn
from sklearn.cluster import OPTICS


def dist_matrix(points):
    n = len(points)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s = 0.0
            for a, b in zip(points[i], points[j]):
                s += (a - b) * (a - b)
            d[i, j] = math.sqrt(s)
    return d


def blobs(rng, centers, per, spread):
    pts = []
    for cx, cy in centers:
        for _ in range(per):
            pts.append([cx + rng.gauss(0, spread), cy + rng.gauss(0, spread)])
    return pts


def cases():
    rng = random.Random(7)
    ring = [[0.1 * math.cos(2 * math.pi * k / 10), 0.1 * math.sin(2 * math.pi * k / 10)]
            for k in range(10)]
    yield "two_rings", ring + [[100 + x, y] for x, y in ring], 2
    yield "two_blobs", blobs(rng, [(0, 0), (10, 10)], 10, 0.3), 2
    yield "three_blobs_uneven", blobs(rng, [(0, 0), (5, 0), (0, 6)], 15, 0.6)[:38], 2
    yield "uniform_40", [[rng.random(), rng.random()] for _ in range(40)], 2
    yield "uniform_60_ms4", [[rng.uniform(0, 3), rng.uniform(0, 3)] for _ in range(60)], 4
    pts = blobs(rng, [(0, 0), (3, 3), (8, 1), (2, 9)], 12, 0.4)
    pts += [pts[0][:], pts[5][:], pts[20][:]]
    yield "blobs_with_duplicates", pts, 2
    yield "grid_ties", [[float(i % 5), float(i // 5)] for i in range(25)], 2
    yield "nested", blobs(rng, [(0, 0), (0.8, 0)], 8, 0.05) + blobs(rng, [(6, 6)], 20, 1.0), 3
    yield "line", [[0.5 * i * (1 + 0.1 * (i % 3)), 0.0] for i in range(30)], 2


def main(out):
    data = {"sklearn_version": sklearn.__version__, "cases": []}
    for name, pts, ms in cases():
        d = dist_matrix(pts)
        model = OPTICS(min_samples=ms, metric="precomputed", xi=0.05).fit(d)
        data["cases"].append({
            "name": name,
            "min_samples": ms,
            "points": pts,
            "labels": model.labels_.tolist(),
            "ordering": model.ordering_.tolist(),
            "reachability": [None if math.isinf(x) else x for x in model.reachability_.tolist()],
            "core_distances": [None if math.isinf(x) else x for x in model.core_distances_.tolist()],
        })
    with open(out, "w") as f:
        json.dump(data, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/optics_oracle.json")
