from __future__ import annotations

import numpy as np
import pytest

from lgh.generators import gen_graph_space
from lgh.spaces import LabeledMetricSpace, LabelSet


@pytest.fixture
def p5():
    return gen_graph_space("path", 5)


@pytest.fixture
def c4():
    return gen_graph_space("cycle", 4, boundary=["v0"])


@pytest.fixture
def two_point_pair():
    """2-point spaces at distances 1 and 2 with both points labeled."""
    label_set = LabelSet(("l1", "l2"))
    x = LabeledMetricSpace(
        ("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]), {"l1": 0, "l2": 1}, label_set
    )
    y = LabeledMetricSpace(
        ("c", "d"), np.array([[0.0, 2.0], [2.0, 0.0]]), {"l1": 0, "l2": 1}, label_set
    )
    return x, y


def random_space(rng, n, label_ids, scale=1.0):
    """Euclidean-style random labeled space drawn from an existing rng stream."""
    pts = rng.random((n, 2)) * scale
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.round(np.sqrt((diff * diff).sum(axis=-1)), 12)
    np.fill_diagonal(dist, 0.0)
    labels = {l: int(rng.integers(0, n)) for l in label_ids}
    return LabeledMetricSpace(
        tuple(f"p{i}" for i in range(n)), dist, labels, LabelSet(tuple(label_ids))
    )


def random_pair(rng, max_n=4, max_labels=3):
    """Pair of random spaces over one shared label set."""
    m = int(rng.integers(0, max_labels + 1))
    ids = tuple(f"l{t}" for t in range(m))
    nx = int(rng.integers(1, max_n + 1))
    ny = int(rng.integers(1, max_n + 1))
    return random_space(rng, nx, ids), random_space(rng, ny, ids)
