from __future__ import annotations

import numpy as np
import pytest

from lgh.approximation import (
    ApproximationWitness,
    approximation_implies_lgh,
    build_approximation_witness,
    check_approximation,
    net_convergence_check,
)
from lgh.correspondences import lgh_exact
from lgh.errors import ParameterError, PreconditionError
from lgh.generators import gen_dyadic_space, gen_graph_space, scale_space
from lgh.isometry import PointMap, correspondence_to_map
from lgh.spaces import greedy_labeled_net, with_labels

from conftest import random_pair


def full_witness(space):
    """Everything paired with itself."""
    idx = tuple(range(space.n))
    return ApproximationWitness(idx, idx, dict(space.labels), dict(space.labels))


def test_check_identity_witness(p5):
    w = full_witness(p5)
    verdict = check_approximation(p5, p5, w, 0.5, 0.5, strong=True)
    assert verdict.ok
    assert verdict.strong_ok
    assert verdict.distortion == 0.0


def test_check_scaled_path_witness():
    p5 = gen_graph_space("path", 5)
    stretched = scale_space(p5, 1.1)
    w = ApproximationWitness(
        (0, 2, 4), (0, 2, 4), {"A": 0, "B": 4}, {"A": 0, "B": 4}
    )
    verdict = check_approximation(p5, stretched, w, 1.5, 0.5)
    assert verdict.ok
    assert verdict.distortion == pytest.approx(0.4, abs=1e-12)
    tight = check_approximation(p5, stretched, w, 1.5, 0.3)
    assert not tight.ok
    assert not tight.distortion_ok


def test_check_monotone_in_eps_delta():
    rng = np.random.default_rng(13)
    for _ in range(10):
        x, y = random_pair(rng, max_n=4, max_labels=2)
        w = ApproximationWitness(
            tuple(range(x.n)),
            tuple(int(rng.integers(0, y.n)) for _ in range(x.n)),
            dict(x.labels),
            dict(y.labels),
        )
        # make the y list cover all of Y so the witness has a chance
        ys = list(w.y_indices)
        for j in range(y.n):
            if j not in ys:
                ys[int(rng.integers(0, len(ys)))] = j
        if set(ys) != set(range(y.n)) or len(ys) != x.n:
            continue
        w = ApproximationWitness(w.x_indices, tuple(ys), w.alpha0, w.beta0)
        eps, delta = 1.0, 1.0
        base = check_approximation(x, y, w, eps, delta)
        bigger = check_approximation(x, y, w, 2 * eps, 3 * delta)
        if base.ok:
            assert bigger.ok


def test_witness_validation(p5):
    w = ApproximationWitness((0, 99), (0, 1), dict(p5.labels), dict(p5.labels))
    with pytest.raises(ParameterError):
        check_approximation(p5, p5, w, 1.0, 1.0)


def test_implies_lgh_identity(p5):
    w = full_witness(p5)
    report = approximation_implies_lgh(p5, p5, w, 1.0, 1.0, cap=25)
    assert report.exact and report.ok
    assert report.value == 0.0


def test_implies_lgh_scaled_path():
    p5 = gen_graph_space("path", 5)
    stretched = scale_space(p5, 1.1)
    w = ApproximationWitness((0, 2, 4), (0, 2, 4), {"A": 0, "B": 4}, {"A": 0, "B": 4})
    report = approximation_implies_lgh(p5, stretched, w, 1.5, 0.5, cap=25)
    assert report.exact and report.ok
    assert report.value == pytest.approx(0.2, abs=1e-9)
    assert report.value < 2 * 1.5 + 0.25


def test_implies_lgh_requires_valid_witness(p5):
    stretched = scale_space(p5, 3.0)
    w = full_witness(p5)
    with pytest.raises(PreconditionError):
        approximation_implies_lgh(p5, stretched, w, 0.1, 0.1, cap=25)


def test_implies_lgh_above_cap_uses_heuristic():
    a = gen_dyadic_space(3)
    w = full_witness(a)
    report = approximation_implies_lgh(a, a, w, 1.0, 1.0, cap=20)
    assert not report.exact
    assert report.ok  # heuristic finds 0 on identical spaces


def test_implies_lgh_random_witnesses():
    rng = np.random.default_rng(37)
    done = 0
    while done < 25:
        x, y = random_pair(rng, max_n=4, max_labels=2)
        eps = float(rng.uniform(0.5, 2.0)) + max(x.diameter(), y.diameter())
        net_x = greedy_labeled_net(x, eps)
        net_y = greedy_labeled_net(y, eps)
        n = max(len(net_x.net), len(net_y.net))
        xs = (list(net_x.net) * n)[:n]
        ys = (list(net_y.net) * n)[:n]
        w = ApproximationWitness(tuple(xs), tuple(ys), net_x.relabel, net_y.relabel)
        verdict = check_approximation(x, y, w, eps, 8 * eps)
        if not verdict.ok:
            continue
        report = approximation_implies_lgh(x, y, w, eps, 8 * eps, cap=20)
        assert report.ok
        done += 1


def test_build_witness_identity(p5):
    f = PointMap(p5, p5, (0, 1, 2, 3, 4))
    for eps in (0.5, 1.0, 3.0):
        w = build_approximation_witness(p5, p5, f, eps)
        verdict = check_approximation(p5, p5, w, 6 * eps, 6 * eps, strong=True)
        assert verdict.ok, verdict.failures


def test_build_witness_scaled_pair():
    p5 = gen_graph_space("path", 5)
    stretched = scale_space(p5, 1.1)
    res = lgh_exact(p5, stretched, cap=25)
    assert res.value == pytest.approx(0.2, abs=1e-9)
    eps = 0.25
    f = correspondence_to_map(res.correspondence)
    w = build_approximation_witness(p5, stretched, f, eps)
    verdict = check_approximation(p5, stretched, w, 6 * eps, 6 * eps, strong=True)
    assert verdict.ok, verdict.failures


def test_build_witness_random_pairs():
    rng = np.random.default_rng(61)
    done = 0
    while done < 25:
        x, y = random_pair(rng)
        res = lgh_exact(x, y)
        eps = res.value + float(rng.uniform(0.05, 0.5))
        f = correspondence_to_map(res.correspondence)
        # f is a (2t + slack)-isometry, hence a (2 eps, L)-isometry
        w = build_approximation_witness(x, y, f, eps)
        verdict = check_approximation(x, y, w, 6 * eps, 6 * eps, strong=True)
        assert verdict.ok, verdict.failures
        done += 1


def test_build_witness_precondition(p5):
    f = PointMap(p5, p5, (0, 0, 0, 0, 0))
    with pytest.raises(PreconditionError):
        build_approximation_witness(p5, p5, f, 0.5)


def test_net_convergence_dyadic():
    limit = gen_dyadic_space(4)
    # fixed three-point labeled nets {0, 1/2, 1} inside every level
    seq = []
    for level in (2, 3, 4):
        space = gen_dyadic_space(level)
        half = (space.n - 1) // 2
        s = (0, half, space.n - 1)
        seq.append((space, s, {"A": 0, "B": space.n - 1}))
    lim_half = (limit.n - 1) // 2
    limit_net = (0, lim_half, limit.n - 1)
    report = net_convergence_check(
        seq, (limit, limit_net, {"A": 0, "B": limit.n - 1}), eps=0.6
    )
    assert report.ok
    assert report.distances[-1] == 0.0


def test_net_convergence_constant(p5):
    entry = (p5, (0, 2, 4), {"A": 0, "B": 4})
    report = net_convergence_check([entry, entry], (p5, (0, 2, 4), {"A": 0, "B": 4}), eps=1.5)
    assert report.ok
    assert report.distances == (0.0, 0.0)


def test_net_convergence_drifting_labels():
    p5 = gen_graph_space("path", 5)
    seq = []
    for k in range(3):
        drifted = with_labels(p5, {"A": k, "B": 4}, p5.label_set)
        seq.append((drifted, (0, 2, 4), {"A": 0, "B": 4}))
    report = net_convergence_check(seq, (p5, (0, 2, 4), {"A": 0, "B": 4}), eps=1.5)
    # label A drifts two steps from its net image at k=2: the net clause fails there
    assert not report.nets_ok[2]
