"""(eps,delta)-approximations between labeled spaces, their distance bounds,
and the finite-net convergence criterion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correspondences import (
    Correspondence,
    distortion,
    lgh_exact,
    lgh_upper_bound_heuristic,
    EXACT_CAP,
)
from .errors import ParameterError, PreconditionError, SizeCapError
from .isometry import PointMap, check_eps_l_isometry
from .spaces import (
    DEFAULT_TOL,
    LabeledMetricSpace,
    LabeledNetCheck,
    check_labeled_net,
    greedy_labeled_net,
    restrict_space,
)


@dataclass(frozen=True)
class ApproximationWitness:
    """Paired finite nets: parallel index lists (x_i, y_i) plus relabelings
    into each list. alpha0/beta0 map label ids to point indices of the
    ambient spaces; their images must sit inside the respective lists."""

    x_indices: tuple[int, ...]
    y_indices: tuple[int, ...]
    alpha0: dict[str, int]
    beta0: dict[str, int]

    def __post_init__(self):
        object.__setattr__(self, "x_indices", tuple(int(i) for i in self.x_indices))
        object.__setattr__(self, "y_indices", tuple(int(i) for i in self.y_indices))
        object.__setattr__(self, "alpha0", dict(self.alpha0))
        object.__setattr__(self, "beta0", dict(self.beta0))

    def validate(self, x: LabeledMetricSpace, y: LabeledMetricSpace) -> list[str]:
        out = []
        if not self.x_indices or len(self.x_indices) != len(self.y_indices):
            out.append("index lists empty or of unequal length")
            return out
        for i in self.x_indices:
            if not 0 <= i < x.n:
                out.append(f"x index {i} out of range")
        for j in self.y_indices:
            if not 0 <= j < y.n:
                out.append(f"y index {j} out of range")
        xs, ys = set(self.x_indices), set(self.y_indices)
        for l in x.label_set.ids:
            if l not in self.alpha0 or l not in self.beta0:
                out.append(f"relabelings miss {l}")
            else:
                if self.alpha0[l] not in xs:
                    out.append(f"alpha0({l}) outside the x list")
                if self.beta0[l] not in ys:
                    out.append(f"beta0({l}) outside the y list")
        return out


@dataclass(frozen=True)
class ApproximationVerdict:
    ok: bool
    x_net: LabeledNetCheck
    y_net: LabeledNetCheck
    distortion_ok: bool
    strong_ok: bool | None
    distortion: float
    failures: tuple[str, ...]


def _witness_correspondence(
    x: LabeledMetricSpace, y: LabeledMetricSpace, w: ApproximationWitness
) -> tuple[Correspondence, LabeledMetricSpace, LabeledMetricSpace]:
    """The pairing-plus-label-pairs correspondence between the two finite
    subspaces carried by the witness."""
    x0 = restrict_space(x, w.x_indices, w.alpha0)
    y0 = restrict_space(y, w.y_indices, w.beta0)
    n = len(w.x_indices)
    pairs = [(k, k) for k in range(n)]
    pairs += [(x0.labels[l], y0.labels[l]) for l in x.label_set.ids]
    # restrict_space maps the first occurrence of a duplicated original index
    # to its slot, so diagonal pairs plus label pairs is exactly the witness
    # relation up to point identity
    return Correspondence(x0, y0, tuple(pairs)), x0, y0


def check_approximation(
    x: LabeledMetricSpace,
    y: LabeledMetricSpace,
    w: ApproximationWitness,
    eps: float,
    delta: float,
    strong: bool = False,
) -> ApproximationVerdict:
    """Verify the two net conditions, the distortion bound on the paired
    correspondence, and (optionally) the strong label/index coherence clause."""
    if eps <= 0 or delta <= 0:
        raise ParameterError("eps and delta must be positive")
    bad = w.validate(x, y)
    if bad:
        raise ParameterError("invalid witness: " + "; ".join(bad))
    failures = []
    x_net = check_labeled_net(x, w.x_indices, w.alpha0, eps)
    if not x_net.ok:
        failures += [f"x side: {m}" for m in x_net.failures]
    y_net = check_labeled_net(y, w.y_indices, w.beta0, eps)
    if not y_net.ok:
        failures += [f"y side: {m}" for m in y_net.failures]

    rel, _, _ = _witness_correspondence(x, y, w)
    dis = distortion(rel)
    distortion_ok = dis < delta
    if not distortion_ok:
        failures.append(f"distortion {dis:.6g} >= delta {delta:.6g}")

    strong_ok = None
    if strong:
        strong_ok = True
        for l in x.label_set.ids:
            for xi, yi in zip(w.x_indices, w.y_indices):
                if (xi == w.alpha0[l]) != (yi == w.beta0[l]):
                    strong_ok = False
                    failures.append(f"strong clause fails at label {l}, pair ({xi},{yi})")
                    break
            if strong_ok is False:
                break

    ok = x_net.ok and y_net.ok and distortion_ok and (strong_ok is not False)
    return ApproximationVerdict(ok, x_net, y_net, distortion_ok, strong_ok, dis, tuple(failures))


@dataclass(frozen=True)
class ApproximationBoundReport:
    bound: float
    value: float
    exact: bool
    ok: bool | None


def approximation_implies_lgh(
    x: LabeledMetricSpace,
    y: LabeledMetricSpace,
    w: ApproximationWitness,
    eps: float,
    delta: float,
    cap: int = EXACT_CAP,
    tol: float = DEFAULT_TOL,
) -> ApproximationBoundReport:
    """For a passing (eps,delta) witness, lgh < 2*eps + delta/2.

    Above the exact cap only the heuristic upper bound is compared, and the
    verdict stays None when that bound is inconclusive.
    """
    verdict = check_approximation(x, y, w, eps, delta)
    if not verdict.ok:
        raise PreconditionError("witness fails check_approximation: " + "; ".join(verdict.failures))
    bound = 2.0 * eps + 0.5 * delta
    try:
        value = lgh_exact(x, y, cap=cap).value
        return ApproximationBoundReport(bound, value, True, value < bound + tol)
    except SizeCapError:
        upper = lgh_upper_bound_heuristic(x, y).value
        ok = True if upper < bound + tol else None
        return ApproximationBoundReport(bound, upper, False, ok)


def build_approximation_witness(
    x: LabeledMetricSpace,
    y: LabeledMetricSpace,
    f: PointMap,
    eps: float,
    tol: float = DEFAULT_TOL,
) -> ApproximationWitness:
    """Construct a strong (6*eps, 6*eps) witness from a (2*eps,L)-isometry f.

    X0 is a greedy eps/2-net with labels snapped to nearest net points;
    y_i = f(x_i) and beta0 = f o alpha0. Net points whose f-images collide
    are merged into the first-kept (label-preferred) representative so the
    label/index coherence clause is well defined; representatives share the
    collapsed image, which keeps every displacement bound strictly under
    6*eps.
    """
    if eps <= 0:
        raise ParameterError("eps must be positive")
    verdict = check_eps_l_isometry(f, 2.0 * eps)
    if not verdict.ok:
        raise PreconditionError(
            "f is not a (2*eps,L)-isometry: " + "; ".join(verdict.failures())
        )
    net = greedy_labeled_net(x, 0.5 * eps)
    alpha0 = dict(net.relabel)

    groups: dict[int, list[int]] = {}
    for xi in net.net:
        groups.setdefault(f.mapping[xi], []).append(xi)
    labeled = set(alpha0.values())
    keep: dict[int, int] = {}
    for img, members in groups.items():
        tagged = [m for m in members if m in labeled]
        keep[img] = min(tagged) if tagged else min(members)
    rep = {m: keep[f.mapping[m]] for m in net.net}

    x_list = [xi for xi in net.net if rep[xi] == xi]
    y_list = [f.mapping[xi] for xi in x_list]
    alpha0 = {l: rep[v] for l, v in alpha0.items()}
    beta0 = {l: f.mapping[v] for l, v in alpha0.items()}
    return ApproximationWitness(tuple(x_list), tuple(y_list), alpha0, beta0)


@dataclass(frozen=True)
class NetConvergenceReport:
    nets_ok: tuple[bool, ...]
    limit_net_ok: bool
    distances: tuple[float, ...]
    final_ok: bool
    nonincreasing: bool

    @property
    def ok(self) -> bool:
        return all(self.nets_ok) and self.limit_net_ok and self.final_ok


def net_convergence_check(
    sequence: list[tuple[LabeledMetricSpace, tuple, dict]],
    limit: tuple[LabeledMetricSpace, tuple, dict],
    eps: float,
    cap: int = EXACT_CAP,
    tol: float = DEFAULT_TOL,
) -> NetConvergenceReport:
    """Each (S_n, beta_n) must be a labeled eps-net in its space, (S, beta)
    one in the limit space, and the LGH distances of the finite nets to the
    limit net must end below eps/3."""
    lx, ls, lbeta = limit
    limit_ok = check_labeled_net(lx, ls, lbeta, eps).ok
    limit_sub = restrict_space(lx, ls, lbeta)
    nets_ok = []
    distances = []
    for space, s, beta in sequence:
        nets_ok.append(check_labeled_net(space, s, beta, eps).ok)
        sub = restrict_space(space, s, beta)
        distances.append(lgh_exact(sub, limit_sub, cap=cap).value)
    final_ok = bool(distances) and distances[-1] < eps / 3.0
    nonincreasing = all(
        distances[i + 1] <= distances[i] + tol for i in range(len(distances) - 1)
    )
    return NetConvergenceReport(
        tuple(nets_ok), limit_ok, tuple(distances), final_ok, nonincreasing
    )
