"""Exact L-isometry search and approximate (eps,L)-isometry machinery."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correspondences import Correspondence
from .errors import ParameterError, PreconditionError, SizeCapError
from .spaces import DEFAULT_TOL, LabeledMetricSpace

ISOMETRY_CAP = 10


@dataclass(frozen=True)
class PointMap:
    """Total map from X-indices to Y-indices."""

    x_space: LabeledMetricSpace
    y_space: LabeledMetricSpace
    mapping: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(int(v) for v in self.mapping))

    def validate(self) -> list[str]:
        out = []
        if len(self.mapping) != self.x_space.n:
            out.append("mapping not total on X")
        for i, j in enumerate(self.mapping):
            if not 0 <= j < self.y_space.n:
                out.append(f"f({i}) = {j} out of range")
        return out

    def require_valid(self):
        bad = self.validate()
        if bad:
            raise ParameterError("invalid point map: " + "; ".join(bad))
        return self

    def __call__(self, i: int) -> int:
        return self.mapping[i]


def map_distortion(f: PointMap) -> float:
    """Distortion of the graph of f."""
    idx = np.array(f.mapping, dtype=int)
    dy = f.y_space.dist[np.ix_(idx, idx)]
    return float(np.abs(f.x_space.dist - dy).max())


def _isometry_candidates(dx, dy, tol):
    """cands[i] = y-indices whose sorted distance row matches x_i's within tol."""
    sx = np.sort(dx, axis=1)
    sy = np.sort(dy, axis=1)
    diff = np.abs(sx[:, None, :] - sy[None, :, :]).max(axis=-1)
    return [set(np.nonzero(diff[i] <= tol)[0].tolist()) for i in range(len(dx))]


def _isometry_search(dx, dy, forced: dict[int, int], tol: float):
    """Yield all distance-preserving bijections extending ``forced``.

    Backtracking over distance-profile-compatible assignments, most
    constrained point first, candidate y-indices in increasing order.
    """
    n = len(dx)
    cands = _isometry_candidates(dx, dy, tol)
    for i, j in forced.items():
        if j not in cands[i]:
            return
    if len(set(forced.values())) != len(forced):
        return

    assign = dict(forced)
    used = set(forced.values())

    def consistent(i, j):
        for i2, j2 in assign.items():
            if abs(dx[i][i2] - dy[j][j2]) > tol:
                return False
        return True

    for i, j in forced.items():
        others = {k: v for k, v in assign.items() if k != i}
        for i2, j2 in others.items():
            if abs(dx[i][i2] - dy[j][j2]) > tol:
                return

    def rec():
        if len(assign) == n:
            yield tuple(assign[i] for i in range(n))
            return
        free = [i for i in range(n) if i not in assign]
        i = min(free, key=lambda k: (len(cands[k] - used), k))
        for j in sorted(cands[i] - used):
            if consistent(i, j):
                assign[i] = j
                used.add(j)
                yield from rec()
                del assign[i]
                used.discard(j)

    yield from rec()


def find_l_isometry(
    x: LabeledMetricSpace,
    y: LabeledMetricSpace,
    cap: int = ISOMETRY_CAP,
    tol: float = DEFAULT_TOL,
) -> PointMap | None:
    """Distance-preserving bijection h with h(alpha(l)) = beta(l) for all l,
    or None. Label constraints are propagated before the backtracking."""
    if set(x.label_set.ids) != set(y.label_set.ids):
        raise ParameterError("spaces do not share a label set")
    if x.n != y.n:
        return None
    if x.n > cap:
        raise SizeCapError(f"isometry search refused for n={x.n} > cap {cap}")
    forced: dict[int, int] = {}
    for l in x.label_set.ids:
        a, b = x.labels[l], y.labels[l]
        if forced.get(a, b) != b:
            return None  # non-injective alpha with conflicting beta targets
        forced[a] = b
    if len(set(forced.values())) != len(forced):
        return None
    dx = tuple(map(tuple, x.dist))
    dy = tuple(map(tuple, y.dist))
    for mapping in _isometry_search(dx, dy, forced, tol):
        return PointMap(x, y, mapping)
    return None


def min_isometry_displacement(
    x: LabeledMetricSpace,
    y: LabeledMetricSpace,
    cap: int = ISOMETRY_CAP,
    tol: float = DEFAULT_TOL,
) -> tuple[float, PointMap] | None:
    """Experimental report: smallest label displacement over all unlabeled
    isometries X -> Y, or None when the spaces are not isometric. Not an LGH
    invariant; see displacement_upper_bound."""
    if x.n != y.n:
        return None
    if x.n > cap:
        raise SizeCapError(f"isometry enumeration refused for n={x.n} > cap {cap}")
    dx = tuple(map(tuple, x.dist))
    dy = tuple(map(tuple, y.dist))
    best = None
    for mapping in _isometry_search(dx, dy, {}, tol):
        f = PointMap(x, y, mapping)
        disp = label_displacement(f)
        if best is None or disp < best[0]:
            best = (disp, f)
    return best


def label_displacement(f: PointMap) -> float:
    """sup over labels of d_Y(f(alpha(l)), beta(l)); 0 for empty label sets."""
    worst = 0.0
    for l in f.x_space.label_set.ids:
        worst = max(
            worst,
            float(f.y_space.dist[f.mapping[f.x_space.labels[l]], f.y_space.labels[l]]),
        )
    return worst


def displacement_upper_bound(h: PointMap, tol: float = DEFAULT_TOL) -> float:
    """Upper bound lgh <= sup_l d_Y(h(alpha(l)), beta(l)) for an isometry h.

    The matching pseudometric d(x,y) = d_Y(h(x),y) is admissible at that sup.
    Requires h to be a distance-preserving bijection within tol.
    """
    h.require_valid()
    if len(set(h.mapping)) != h.x_space.n or h.x_space.n != h.y_space.n:
        raise PreconditionError("h is not a bijection")
    if map_distortion(h) > tol:
        raise PreconditionError("h is not an isometry within tolerance")
    return label_displacement(h)


@dataclass(frozen=True)
class EpsIsometryVerdict:
    dis_ok: bool
    label_ok: bool
    net_ok: bool
    dis: float
    label_sup: float
    covering_radius: float

    @property
    def ok(self) -> bool:
        return self.dis_ok and self.label_ok and self.net_ok

    def failures(self) -> tuple[str, ...]:
        out = []
        if not self.dis_ok:
            out.append(f"distortion {self.dis:.6g} >= eps")
        if not self.label_ok:
            out.append(f"label displacement {self.label_sup:.6g} >= eps")
        if not self.net_ok:
            out.append(f"image covering radius {self.covering_radius:.6g} >= eps")
        return tuple(out)


def check_eps_l_isometry(f: PointMap, eps: float) -> EpsIsometryVerdict:
    """Three-clause check: dis f < eps, label displacement < eps, f(X) an
    eps-net in Y. Returns measured values alongside the booleans."""
    if eps <= 0:
        raise ParameterError("eps must be positive")
    f.require_valid()
    dis = map_distortion(f)
    label_sup = label_displacement(f)
    idx = np.array(f.mapping, dtype=int)
    radius = float(f.y_space.dist[idx, :].min(axis=0).max())
    return EpsIsometryVerdict(
        dis < eps, label_sup < eps, radius < eps, dis, label_sup, radius
    )


def correspondence_to_map(rel: Correspondence) -> PointMap:
    """Select f(x) as the least y with (x,y) in R, preferring beta(l) at
    labeled points (least such target when alpha is non-injective)."""
    rel.require_valid()
    x, y = rel.x_space, rel.y_space
    pref: dict[int, int] = {}
    for l in sorted(x.label_set.ids):
        a, b = x.labels[l], y.labels[l]
        pref[a] = min(pref.get(a, b), b)
    choice: dict[int, int] = {}
    for i, j in rel.pairs:
        if i in pref:
            choice[i] = pref[i]
        elif i not in choice or j < choice[i]:
            choice[i] = j
    return PointMap(x, y, tuple(choice[i] for i in range(x.n)))


def map_to_correspondence(f: PointMap, eps: float) -> Correspondence:
    """R = {(x,y) : d_Y(f(x),y) < eps} for an (eps,L)-isometry f; the result
    has distortion < 3*eps."""
    verdict = check_eps_l_isometry(f, eps)
    if not verdict.ok:
        raise PreconditionError(
            "f is not an (eps,L)-isometry: " + "; ".join(verdict.failures())
        )
    idx = np.array(f.mapping, dtype=int)
    close = f.y_space.dist[idx, :] < eps
    pairs = tuple(zip(*map(lambda a: a.tolist(), np.nonzero(close))))
    return Correspondence(f.x_space, f.y_space, pairs).require_valid()


@dataclass(frozen=True)
class ConvergenceReport:
    verdicts: tuple[EpsIsometryVerdict, ...]
    measured: tuple[float, ...]
    all_ok: bool
    nonincreasing: bool


def convergence_witness(
    steps: list[tuple[LabeledMetricSpace, PointMap]], eps_seq
) -> ConvergenceReport:
    """Per-step (eps_n, L)-isometry checks for maps f_n : X_n -> X plus a
    monotonicity report of the measured epsilons."""
    eps_seq = list(eps_seq)
    if len(eps_seq) != len(steps):
        raise ParameterError("one eps per step required")
    verdicts = []
    measured = []
    for (space, f), eps in zip(steps, eps_seq):
        if f.x_space is not space and f.x_space.points != space.points:
            raise ParameterError("map domain does not match the listed space")
        v = check_eps_l_isometry(f, eps)
        verdicts.append(v)
        measured.append(max(v.dis, v.label_sup, v.covering_radius))
    nonincreasing = all(
        measured[i + 1] <= measured[i] + DEFAULT_TOL for i in range(len(measured) - 1)
    )
    return ConvergenceReport(
        tuple(verdicts), tuple(measured), all(v.ok for v in verdicts), nonincreasing
    )


def zero_distance_iff_isometric(
    x: LabeledMetricSpace,
    y: LabeledMetricSpace,
    lgh_value: float,
    tol: float = DEFAULT_TOL,
    cap: int = ISOMETRY_CAP,
) -> bool:
    """Cross-check of the zero-distance characterization on a computed value."""
    found = find_l_isometry(x, y, cap=cap, tol=tol) is not None
    return (lgh_value <= tol) == found
