"""Deterministic instance generators: graph metrics, seeded random spaces,
the coordinate-projection counterexample family, and dyadic interval chains."""

from __future__ import annotations

import itertools

import numpy as np

from .correspondences import AdmissiblePseudometric
from .errors import ParameterError
from .gluing import Chain
from .precompact import Collection
from .spaces import LabeledMetricSpace, LabelSet


def _floyd_warshall(weights: np.ndarray) -> np.ndarray:
    n = weights.shape[0]
    dist = weights.copy()
    for k in range(n):
        np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :], out=dist)
    if not np.all(np.isfinite(dist)):
        raise ParameterError("graph is not connected")
    return dist


def _graph_edges(kind: str, size) -> tuple[int, list[tuple[int, int]], list[int]]:
    """Returns (point count, edge list, degree-one node indices)."""
    if kind == "path":
        n = int(size)
        edges = [(i, i + 1) for i in range(n - 1)]
    elif kind == "cycle":
        n = int(size)
        if n < 3:
            raise ParameterError("cycle needs at least 3 points")
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif kind == "star":
        n = int(size)
        if n < 2:
            raise ParameterError("star needs at least 2 points")
        edges = [(0, i) for i in range(1, n)]
    elif kind == "tree":
        depth = int(size)
        n = 2 ** (depth + 1) - 1
        edges = [((i - 1) // 2, i) for i in range(1, n)]
    elif kind == "grid":
        rows, cols = (int(size[0]), int(size[1])) if not isinstance(size, int) else (size, size)
        n = rows * cols
        edges = []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    edges.append((v, v + 1))
                if r + 1 < rows:
                    edges.append((v, v + cols))
    else:
        raise ParameterError(f"unknown graph kind {kind!r}")
    if n < 1:
        raise ParameterError("need at least one point")
    degree = [0] * n
    for a, b in edges:
        degree[a] += 1
        degree[b] += 1
    leaves = [i for i in range(n) if degree[i] == 1]
    return n, edges, leaves


def gen_graph_space(
    kind: str,
    size,
    weight: float = 1.0,
    boundary="endpoints",
) -> LabeledMetricSpace:
    """Shortest-path metric of a standard graph with a boundary labeling.

    ``boundary`` is "endpoints" (ids A/B at the natural extremes), "leaves"
    (each degree-one node labeled by its point name), or an explicit list of
    point names (each its own label id).
    """
    n, edges, leaves = _graph_edges(kind, size)
    weights = np.full((n, n), np.inf)
    np.fill_diagonal(weights, 0.0)
    for a, b in edges:
        weights[a, b] = weights[b, a] = float(weight)
    dist = _floyd_warshall(weights)
    points = tuple(f"v{i}" for i in range(n))

    if boundary == "endpoints":
        if kind == "path" and n > 1:
            labels = {"A": 0, "B": n - 1}
        elif kind == "grid":
            labels = {"A": 0, "B": n - 1}
        else:
            labels = {"A": 0}
    elif boundary == "leaves":
        labels = {points[i]: i for i in leaves}
    elif isinstance(boundary, (list, tuple)):
        index = {p: i for i, p in enumerate(points)}
        labels = {}
        for name in boundary:
            if name not in index:
                raise ParameterError(f"boundary point {name!r} does not exist")
            labels[name] = index[name]
    else:
        raise ParameterError(f"unknown boundary rule {boundary!r}")
    return LabeledMetricSpace(points, dist, labels, LabelSet(tuple(sorted(labels))))


def scale_space(space: LabeledMetricSpace, factor: float) -> LabeledMetricSpace:
    if factor <= 0:
        raise ParameterError("scale factor must be positive")
    return LabeledMetricSpace(
        space.points, np.asarray(space.dist) * factor, space.labels, space.label_set
    )


def gen_random_space(
    n: int,
    method: str = "euclidean",
    param: float = 2,
    seed: int = 0,
    n_labels: int | None = None,
    label_ids=None,
) -> LabeledMetricSpace:
    """Seeded random space: "euclidean" draws n points in [0,1]^k (param = k),
    "random-graph" a connected weighted graph (param = edge probability).
    Distances are rounded to 12 decimals; output is a pure function of the
    arguments."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if method == "euclidean":
        k = int(param)
        pts = rng.random((n, k))
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff * diff).sum(axis=-1))
    elif method == "random-graph":
        p = float(param)
        weights = np.full((n, n), np.inf)
        np.fill_diagonal(weights, 0.0)
        present = rng.random((n, n)) < p
        w = rng.uniform(0.5, 1.5, (n, n))
        fallback = rng.uniform(0.5, 1.5, n)
        for i in range(n):
            for j in range(i + 1, n):
                if present[i, j]:
                    weights[i, j] = weights[j, i] = w[i, j]
        for i in range(1, n):
            if not np.isfinite(weights[i, : i]).any():
                weights[i - 1, i] = weights[i, i - 1] = fallback[i]
        dist = _floyd_warshall(weights)
    else:
        raise ParameterError(f"unknown method {method!r}")
    dist = np.round(dist, 12)
    np.fill_diagonal(dist, 0.0)

    if label_ids is None:
        m = n_labels if n_labels is not None else int(rng.integers(1, min(3, n) + 1))
        label_ids = tuple(f"l{t}" for t in range(m))
    targets = rng.integers(0, n, len(label_ids))
    labels = {l: int(t) for l, t in zip(label_ids, targets)}
    points = tuple(f"p{i}" for i in range(n))
    return LabeledMetricSpace(points, dist, labels, LabelSet(tuple(sorted(label_ids))))


def gen_projection_family(k: int) -> Collection:
    """Finite surrogate of the coordinate-projection family: the label set is
    {0,1}^k with weighted Hamming metric (weight 2^-i on coordinate i), every
    space is the unit two-point space, and the n-th labeling reads off the
    n-th coordinate. The family's modulus jumps to 1 at scale 2^-k while each
    single member is flat below its own coordinate scale."""
    if not 1 <= k <= 10:
        raise ParameterError("k must be between 1 and 10")
    ids = tuple("".join(bits) for bits in itertools.product("01", repeat=k))
    bits = np.array([[int(c) for c in l] for l in ids], dtype=float)
    weights = np.array([2.0 ** -(i + 1) for i in range(k)])
    metric = np.zeros((len(ids), len(ids)))
    for i in range(k):
        col = bits[:, i]
        metric += weights[i] * np.abs(col[:, None] - col[None, :])
    label_set = LabelSet(ids, metric)
    dist = np.array([[0.0, 1.0], [1.0, 0.0]])
    items = []
    for coord in range(k):
        labels = {l: int(bits[j, coord]) for j, l in enumerate(ids)}
        items.append(LabeledMetricSpace(("0", "1"), dist, labels, label_set))
    return Collection(tuple(items))


def gen_dyadic_space(level: int) -> LabeledMetricSpace:
    """(2^level + 1)-point grid on [0,1] with endpoints labeled A and B."""
    if level < 0:
        raise ParameterError("level must be >= 0")
    n = 2**level + 1
    coords = np.arange(n) / 2.0**level
    dist = np.abs(coords[:, None] - coords[None, :])
    points = tuple(f"v{i}" for i in range(n))
    return LabeledMetricSpace(points, dist, {"A": 0, "B": n - 1}, LabelSet(("A", "B")))


def gen_dyadic_chain(levels) -> Chain:
    """Chain of dyadic grids linked by the interval metric; the link between
    levels m and m+1 is admissible at 2^-(m+1) (half the coarse gap)."""
    levels = list(levels)
    spaces = [gen_dyadic_space(m) for m in levels]
    links = []
    for s, t, m in zip(spaces, spaces[1:], levels):
        ca = np.arange(s.n) / (s.n - 1.0)
        cb = np.arange(t.n) / (t.n - 1.0)
        cross = np.abs(ca[:, None] - cb[None, :])
        links.append(AdmissiblePseudometric(s, t, cross, 2.0 ** -(m + 1)))
    return Chain(tuple(spaces), tuple(links))
