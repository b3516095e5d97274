"""Finite labeled metric spaces: validation, quotients, nets, covering numbers.

A labeled metric space is a finite point set with a distance matrix plus a
(total, possibly non-injective) map from a finite label set into the points.
The label image plays the role of a geometric boundary.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, QuotientError, SizeCapError, SpaceValidationError

DEFAULT_TOL = 1e-9
# Strict "< eps" targets are realized as "<= eps*(1 - NET_MARGIN)" when a
# construction has to *deliver* a strictly-better-than-eps certificate.
NET_MARGIN = 1e-6

EXACT_COVER_CAP = 16


def _freeze(mat: np.ndarray) -> np.ndarray:
    out = np.array(mat, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class LabelSet:
    """Finite ordered set of label identifiers, optionally metrized."""

    ids: tuple[str, ...]
    label_metric: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        if self.label_metric is not None:
            object.__setattr__(self, "label_metric", _freeze(self.label_metric))

    def __len__(self) -> int:
        return len(self.ids)

    def index(self, label: str) -> int:
        return self.ids.index(label)

    def validate(self, tol: float = DEFAULT_TOL) -> list[str]:
        violations = []
        if len(set(self.ids)) != len(self.ids):
            violations.append("duplicate label ids")
        for i in self.ids:
            if not isinstance(i, str) or not i:
                violations.append(f"label id {i!r} is not a nonempty string")
        if self.label_metric is not None:
            violations += matrix_violations(
                self.label_metric, len(self.ids), tol, pseudo=True, prefix="label_metric "
            )
        return violations


EMPTY_LABELS = LabelSet(())


def matrix_violations(dist, n: int, tol: float, pseudo: bool, prefix: str = "") -> list[str]:
    """Check metric (or pseudometric) axioms of a candidate distance matrix.

    Violation strings name the offending pair or triple; "triangle (i,k,j)"
    means d(i,j) > d(i,k) + d(k,j).
    """
    out = []
    dist = np.asarray(dist, dtype=float)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        return [prefix + "matrix not square"]
    if dist.shape[0] != n:
        return [prefix + f"matrix size {dist.shape[0]} != point count {n}"]
    if not np.all(np.isfinite(dist)):
        out.append(prefix + "non-finite entry")
        return out
    for i, j in zip(*np.nonzero(dist < -tol)):
        out.append(prefix + f"negative ({i},{j})")
    for i in np.nonzero(np.abs(np.diag(dist)) > tol)[0]:
        out.append(prefix + f"diagonal ({i})")
    asym = np.abs(dist - dist.T) > tol
    for i, j in zip(*np.nonzero(np.triu(asym, 1))):
        out.append(prefix + f"asymmetric ({i},{j})")
    if not pseudo:
        zero = (dist <= tol) & ~np.eye(n, dtype=bool)
        for i, j in zip(*np.nonzero(np.triu(zero, 1))):
            out.append(prefix + f"zero-distance ({i},{j})")
    # d(i,j) <= d(i,k) + d(k,j) for all triples, one k-slice at a time.
    seen = set()
    for k in range(n):
        bad = dist > dist[:, k : k + 1] + dist[k : k + 1, :] + tol
        for i, j in zip(*np.nonzero(bad)):
            if i == j or i == k or j == k:
                continue
            a, b = (i, j) if i < j else (j, i)
            if (a, k, b) not in seen:
                seen.add((a, k, b))
                out.append(prefix + f"triangle ({a},{k},{b})")
    return out


@dataclass(frozen=True)
class LabeledMetricSpace:
    """Finite metric space with a labeling into its points.

    ``labels`` maps label ids to point indices; it is total on ``label_set``
    and may be non-injective and non-surjective. Instances are treated as
    immutable after construction.
    """

    points: tuple[str, ...]
    dist: np.ndarray
    labels: dict[str, int]
    label_set: LabelSet = field(default=EMPTY_LABELS)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "dist", _freeze(self.dist))
        object.__setattr__(self, "labels", dict(self.labels))
        if self.label_set is EMPTY_LABELS and self.labels:
            object.__setattr__(self, "label_set", LabelSet(tuple(sorted(self.labels))))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def label_ids(self) -> tuple[str, ...]:
        return self.label_set.ids

    def label_point(self, label: str) -> int:
        return self.labels[label]

    def label_image(self) -> tuple[int, ...]:
        """Point indices hit by the labeling, in label-set order."""
        return tuple(self.labels[l] for l in self.label_set.ids)

    def diameter(self) -> float:
        return float(self.dist.max()) if self.n else 0.0

    def validate(self, tol: float = DEFAULT_TOL, pseudo: bool = False) -> list[str]:
        out = []
        if self.n < 1:
            out.append("empty point set")
        if len(set(self.points)) != len(self.points):
            out.append("duplicate point names")
        out += self.label_set.validate(tol)
        out += matrix_violations(self.dist, self.n, tol, pseudo=pseudo)
        for l in self.label_set.ids:
            if l not in self.labels:
                out.append(f"label {l} -> missing")
            else:
                idx = self.labels[l]
                if not isinstance(idx, (int, np.integer)) or not 0 <= idx < self.n:
                    out.append(f"label {l} -> out-of-range {idx}")
        for l in self.labels:
            if l not in self.label_set.ids:
                out.append(f"label {l} not in label set")
        return out

    def require_valid(self, tol: float = DEFAULT_TOL):
        violations = self.validate(tol)
        if violations:
            raise SpaceValidationError(violations)
        return self


@dataclass(frozen=True)
class PseudoSpace(LabeledMetricSpace):
    """Same layout as LabeledMetricSpace but zero distances between distinct
    points are allowed."""

    def validate(self, tol: float = DEFAULT_TOL, pseudo: bool = True) -> list[str]:
        return super().validate(tol, pseudo=True)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]


def validate_space(space: LabeledMetricSpace, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Full invariant check; the report names every offending pair/triple."""
    violations = space.validate(tol)
    return ValidationReport(not violations, tuple(violations))


def restrict_space(
    space: LabeledMetricSpace, indices, labels: dict[str, int] | None = None
) -> LabeledMetricSpace:
    """Subspace on ``indices`` (original point indices, order kept).

    ``labels`` maps label ids to original point indices that must appear in
    ``indices``; by default the original labeling is kept, which requires the
    label image to be contained in ``indices``.
    """
    indices = list(indices)
    pos = {orig: k for k, orig in enumerate(indices)}
    if labels is None:
        labels = space.labels
    sub_labels = {}
    for l in space.label_set.ids:
        orig = labels[l]
        if orig not in pos:
            raise ParameterError(f"label {l} points outside the subset")
        sub_labels[l] = pos[orig]
    return LabeledMetricSpace(
        points=tuple(space.points[i] for i in indices),
        dist=space.dist[np.ix_(indices, indices)],
        labels=sub_labels,
        label_set=space.label_set,
    )


def with_labels(space: LabeledMetricSpace, labels: dict[str, int], label_set: LabelSet):
    """Same metric space, different labeling."""
    return LabeledMetricSpace(space.points, space.dist, labels, label_set)


def strip_labels(space: LabeledMetricSpace) -> LabeledMetricSpace:
    return LabeledMetricSpace(space.points, space.dist, {}, EMPTY_LABELS)


def quotient_pseudometric(p: LabeledMetricSpace, tol: float = DEFAULT_TOL) -> LabeledMetricSpace:
    """Merge points at mutual distance <= tol; the result is a metric space.

    Classes are the transitive closure of the <=tol relation; the class
    representative is its lowest point index. Raises QuotientError when
    members of one class disagree about distances to a third class by more
    than the merge slack (the sign that tol is too large).
    """
    n = p.n
    dist = np.asarray(p.dist, dtype=float)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    classes: dict[int, list[int]] = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    reps = sorted(classes)
    rep_pos = {r: k for k, r in enumerate(reps)}

    m = len(reps)
    out = np.zeros((m, m))
    for a in range(m):
        for b in range(a + 1, m):
            block = dist[np.ix_(classes[reps[a]], classes[reps[b]])]
            lo, hi = float(block.min()), float(block.max())
            if hi - lo > 2 * tol + tol:
                raise QuotientError(
                    f"classes {reps[a]} and {reps[b]} disagree by {hi - lo:.3e}; "
                    "merge tolerance too large"
                )
            out[a, b] = out[b, a] = dist[reps[a], reps[b]]

    labels = {l: rep_pos[find(i)] for l, i in p.labels.items()}
    result = LabeledMetricSpace(
        points=tuple(p.points[r] for r in reps),
        dist=out,
        labels=labels,
        label_set=p.label_set,
    )
    violations = result.validate(tol)
    if violations:
        raise QuotientError("quotient is not metric: " + "; ".join(violations))
    return result


def diameter(space: LabeledMetricSpace) -> float:
    return space.diameter()


def _greedy_net_indices(dist: np.ndarray, target: float) -> tuple[list[int], float]:
    """Farthest-point insertion from index 0 until covering radius <= target.

    Ties break to the lowest index. Returns (net indices in insertion order,
    achieved covering radius).
    """
    n = dist.shape[0]
    chosen = [0]
    to_net = dist[0].copy()
    while True:
        far = int(np.argmax(to_net))  # argmax returns the lowest maximizer
        radius = float(to_net[far])
        if radius <= target or len(chosen) == n:
            return chosen, radius
        chosen.append(far)
        np.minimum(to_net, dist[far], out=to_net)


@dataclass(frozen=True)
class CoveringResult:
    count: int
    witness: tuple[int, ...]
    radius: float


def covering_number(
    space: LabeledMetricSpace,
    eps: float,
    mode: str = "greedy",
    exact_cap: int = EXACT_COVER_CAP,
) -> CoveringResult:
    """Size of an eps-net (every point within eps of the witness set).

    ``greedy`` uses farthest-point insertion from index 0; ``exact`` finds a
    minimum-cardinality net by exhaustive subset search (refused above
    ``exact_cap`` points).
    """
    if eps <= 0:
        raise ParameterError("eps must be positive")
    dist = space.dist
    n = space.n
    if mode == "greedy":
        chosen, radius = _greedy_net_indices(dist, eps)
        return CoveringResult(len(chosen), tuple(chosen), radius)
    if mode == "exact":
        if n > exact_cap:
            raise SizeCapError(
                f"exact covering refused for n={n} > cap {exact_cap}; use greedy mode"
            )
        for size in range(1, n + 1):
            for subset in itertools.combinations(range(n), size):
                radius = float(dist[:, subset].min(axis=1).max())
                if radius <= eps:
                    return CoveringResult(size, subset, radius)
        raise AssertionError("unreachable: the full point set always covers")
    raise ParameterError(f"unknown covering mode {mode!r}")


@dataclass(frozen=True)
class LabeledNet:
    """An eps-net together with a relabeling into it."""

    net: tuple[int, ...]
    relabel: dict[str, int]
    radius: float
    displacement: float


def greedy_labeled_net(
    space: LabeledMetricSpace, eps: float, margin: float = NET_MARGIN
) -> LabeledNet:
    """Labeled eps-net: net with covering radius < eps and a relabeling whose
    displacement from the original labels is < eps.

    The greedy run targets radius <= eps*(1-margin) so strictness survives
    floating point. Labels snap to themselves when in the net, otherwise to
    the nearest net point (lowest index tie-break).
    """
    if eps <= 0:
        raise ParameterError("eps must be positive")
    chosen, radius = _greedy_net_indices(space.dist, eps * (1.0 - margin))
    in_net = set(chosen)
    relabel = {}
    worst = 0.0
    for l in space.label_set.ids:
        a = space.labels[l]
        if a in in_net:
            relabel[l] = a
        else:
            d_to_net = space.dist[a, chosen]
            k = int(np.argmin(d_to_net))
            # lowest point index among equally-near net points
            best = float(d_to_net[k])
            cands = [chosen[t] for t in range(len(chosen)) if d_to_net[t] == best]
            relabel[l] = min(cands)
            worst = max(worst, best)
    return LabeledNet(tuple(chosen), relabel, radius, worst)


@dataclass(frozen=True)
class LabeledNetCheck:
    ok: bool
    covering_ok: bool
    displacement_ok: bool
    radius: float
    displacement: float
    failures: tuple[str, ...]


def check_labeled_net(
    space: LabeledMetricSpace, net, relabel: dict[str, int], eps: float
) -> LabeledNetCheck:
    """Independent checker: covering radius and label displacement strictly < eps."""
    net = list(net)
    failures = []
    if not net:
        return LabeledNetCheck(False, False, False, np.inf, np.inf, ("empty net",))
    radius = float(space.dist[:, net].min(axis=1).max())
    covering_ok = radius < eps
    if not covering_ok:
        failures.append(f"covering radius {radius:.6g} >= eps")
    worst = 0.0
    net_set = set(net)
    for l in space.label_set.ids:
        if l not in relabel:
            failures.append(f"relabeling misses {l}")
            return LabeledNetCheck(False, covering_ok, False, radius, np.inf, tuple(failures))
        if relabel[l] not in net_set:
            failures.append(f"relabel {l} -> point outside net")
            return LabeledNetCheck(False, covering_ok, False, radius, np.inf, tuple(failures))
        worst = max(worst, float(space.dist[space.labels[l], relabel[l]]))
    displacement_ok = worst < eps
    if not displacement_ok:
        failures.append(f"label displacement {worst:.6g} >= eps")
    ok = covering_ok and displacement_ok
    return LabeledNetCheck(ok, covering_ok, displacement_ok, radius, worst, tuple(failures))
