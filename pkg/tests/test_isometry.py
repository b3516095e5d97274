from __future__ import annotations

import numpy as np
import pytest

from lgh.correspondences import Correspondence, distortion, lgh_exact
from lgh.errors import PreconditionError, SizeCapError
from lgh.generators import gen_dyadic_space, gen_graph_space, gen_projection_family, scale_space
from lgh.isometry import (
    PointMap,
    check_eps_l_isometry,
    convergence_witness,
    correspondence_to_map,
    displacement_upper_bound,
    find_l_isometry,
    map_distortion,
    map_to_correspondence,
    min_isometry_displacement,
)
from lgh.spaces import LabeledMetricSpace, LabelSet, with_labels

from conftest import random_pair, random_space


def test_find_identity(p5):
    result = find_l_isometry(p5, p5)
    assert result is not None
    assert result.mapping == (0, 1, 2, 3, 4)


def test_find_c4_rotation(c4):
    rotated = with_labels(c4, {"v0": 1}, c4.label_set)
    result = find_l_isometry(c4, rotated)
    assert result is not None
    assert result.mapping[0] == 1
    assert map_distortion(result) == 0.0


def test_find_none_conflicting_labels(p5):
    # both labels at point 0 forces 0->0 and 4->0, impossible for a bijection
    both_at_zero = with_labels(p5, {"A": 0, "B": 0}, p5.label_set)
    assert find_l_isometry(p5, both_at_zero) is None


def test_find_none_size_mismatch(p5):
    p4 = gen_graph_space("path", 4)
    assert find_l_isometry(p5, with_labels(p4, p4.labels, p5.label_set)) is None


def test_find_cap():
    a = gen_dyadic_space(4)
    with pytest.raises(SizeCapError):
        find_l_isometry(a, a, cap=10)


def test_find_relabeled_permutation():
    rng = np.random.default_rng(2)
    for _ in range(10):
        x = random_space(rng, 5, ("l0", "l1"))
        perm = rng.permutation(5)
        y = LabeledMetricSpace(
            tuple(f"q{i}" for i in range(5)),
            x.dist[np.ix_(np.argsort(perm), np.argsort(perm))],
            {l: int(perm[i]) for l, i in x.labels.items()},
            x.label_set,
        )
        found = find_l_isometry(x, y)
        assert found is not None
        assert map_distortion(found) <= 1e-9


def test_zero_distance_iff_isometric():
    rng = np.random.default_rng(19)
    for _ in range(20):
        x, y = random_pair(rng, max_n=4)
        value = lgh_exact(x, y).value
        found = find_l_isometry(x, y) is not None
        assert (value <= 1e-9) == found


def test_check_eps_identity(p5):
    f = PointMap(p5, p5, (0, 1, 2, 3, 4))
    verdict = check_eps_l_isometry(f, 0.1)
    assert verdict.ok
    assert verdict.dis == 0.0


def test_check_eps_monotone_scaled():
    p5 = gen_graph_space("path", 5)
    doubled = scale_space(p5, 2.0)
    f = PointMap(p5, doubled, (0, 1, 2, 3, 4))
    assert map_distortion(f) == 4.0
    assert not check_eps_l_isometry(f, 4.0).ok
    assert check_eps_l_isometry(f, 4.0 + 1e-6).dis_ok
    # image misses nothing but label displacement is 0, distortion dominates
    verdict = check_eps_l_isometry(f, 5.0)
    assert verdict.ok


def test_check_eps_constant_map_fails_net(p5):
    f = PointMap(p5, p5, (0, 0, 0, 0, 0))
    verdict = check_eps_l_isometry(f, 1.0)
    assert not verdict.net_ok
    assert verdict.covering_radius == 4.0


def test_correspondence_to_map_bijection_graph(p5):
    rel = Correspondence(p5, p5, tuple((i, i) for i in range(5)))
    f = correspondence_to_map(rel)
    assert f.mapping == (0, 1, 2, 3, 4)


def test_correspondence_to_map_two_point(two_point_pair):
    x, y = two_point_pair
    res = lgh_exact(x, y)
    f = correspondence_to_map(res.correspondence)
    assert f.mapping == (0, 1)
    assert map_distortion(f) == 1.0


def test_correspondence_to_map_bounds_distortion():
    rng = np.random.default_rng(29)
    for _ in range(20):
        x, y = random_pair(rng)
        res = lgh_exact(x, y)
        f = correspondence_to_map(res.correspondence)
        assert map_distortion(f) <= res.distortion + 1e-12
        # Thm 3.5 route: the map is a (2t + slack)-isometry
        assert check_eps_l_isometry(f, res.distortion + 1e-6).ok


def test_map_to_correspondence_identity(p5):
    f = PointMap(p5, p5, (0, 1, 2, 3, 4))
    rel = map_to_correspondence(f, 0.5)
    assert set(rel.pairs) == {(i, i) for i in range(5)}
    assert distortion(rel) < 1.5


def test_map_to_correspondence_requires_isometry(p5):
    f = PointMap(p5, p5, (0, 0, 0, 0, 0))
    with pytest.raises(PreconditionError):
        map_to_correspondence(f, 1.0)


def test_map_to_correspondence_gives_lgh_bound():
    p5 = gen_graph_space("path", 5)
    stretched = scale_space(p5, 1.1)
    f = PointMap(p5, stretched, (0, 1, 2, 3, 4))
    verdict = check_eps_l_isometry(f, 0.6)
    assert verdict.ok
    rel = map_to_correspondence(f, 0.6)
    assert distortion(rel) < 3 * 0.6 + 1e-9
    assert lgh_exact(p5, stretched, cap=25).value <= 1.5 * 0.6 + 1e-9


def test_displacement_upper_bound_c4(c4):
    rotated = with_labels(c4, {"v0": 1}, c4.label_set)
    identity = PointMap(c4, rotated, (0, 1, 2, 3))
    bound = displacement_upper_bound(identity)
    # the identity isometry displaces the label by one edge, yet lgh is 0:
    # the one-isometry displacement formula is only an upper bound
    assert bound == 1.0
    assert lgh_exact(c4, rotated).value == 0.0
    best = min_isometry_displacement(c4, rotated)
    assert best is not None and best[0] == 0.0


def test_convergence_witness_dyadic():
    limit = gen_dyadic_space(5)
    steps = []
    eps = []
    for level in (2, 3, 4):
        coarse = gen_dyadic_space(level)
        stride = 2 ** (5 - level)
        f = PointMap(coarse, limit, tuple(i * stride for i in range(coarse.n)))
        steps.append((coarse, f))
        eps.append(2.0**-level + 1e-9)
    report = convergence_witness(steps, eps)
    assert report.all_ok
    assert report.nonincreasing


def test_convergence_witness_constant(p5):
    f = PointMap(p5, p5, (0, 1, 2, 3, 4))
    report = convergence_witness([(p5, f), (p5, f)], [0.5, 0.5])
    assert report.all_ok
    assert report.measured == (0.0, 0.0)


def test_convergence_witness_drifting_labels_fail():
    # the projection family members stay 1 apart in label displacement
    family = gen_projection_family(2)
    x0, x1 = family.items
    ident = PointMap(x0, x1, (0, 1))
    report = convergence_witness([(x0, ident)], [0.5])
    assert not report.all_ok
    assert not report.verdicts[0].label_ok
