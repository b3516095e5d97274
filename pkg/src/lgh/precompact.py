"""Precompactness diagnostics: uniform total boundedness, label
equicontinuity moduli, and a finite convergent-subsequence probe."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correspondences import EXACT_CAP, lgh_exact, lgh_upper_bound_heuristic
from .errors import ParameterError
from .spaces import DEFAULT_TOL, LabeledMetricSpace, covering_number


@dataclass(frozen=True)
class Collection:
    """Labeled spaces over one shared label set."""

    items: tuple[LabeledMetricSpace, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    def validate(self) -> list[str]:
        if not self.items:
            return ["empty collection"]
        ids = set(self.items[0].label_set.ids)
        out = []
        for k, s in enumerate(self.items[1:], start=1):
            if set(s.label_set.ids) != ids:
                out.append(f"item {k} has a different label set")
        return out

    def require_valid(self):
        bad = self.validate()
        if bad:
            raise ParameterError("invalid collection: " + "; ".join(bad))
        return self


@dataclass(frozen=True)
class UtbReport:
    diam_max: float
    n_eps: dict[float, int]


def utb_report(collection: Collection, eps_list, mode: str = "greedy") -> UtbReport:
    """Common diameter bound and, per eps, the largest eps-net size any
    member needs."""
    collection.require_valid()
    diam_max = max(s.diameter() for s in collection.items)
    n_eps = {}
    for eps in eps_list:
        n_eps[float(eps)] = max(
            covering_number(s, eps, mode=mode).count for s in collection.items
        )
    return UtbReport(diam_max, n_eps)


def equicontinuity_modulus(collection: Collection, delta: float) -> float:
    """omega(delta): worst label displacement d_X(alpha(l), alpha(l')) over all
    members and label pairs with d_L(l,l') <= delta."""
    collection.require_valid()
    if delta <= 0:
        raise ParameterError("delta must be positive")
    label_metric = collection.items[0].label_set.label_metric
    if label_metric is None:
        raise ParameterError("equicontinuity modulus needs a metrized label set")
    mask = np.asarray(label_metric) <= delta
    worst = 0.0
    for s in collection.items:
        img = np.array(s.label_image(), dtype=int)
        pairdist = s.dist[np.ix_(img, img)]
        if mask.any():
            worst = max(worst, float(pairdist[mask].max()))
    return worst


@dataclass(frozen=True)
class ProbeReport:
    ok: bool
    clusters: tuple[tuple[int, ...], ...]
    subsequence: tuple[int, ...]
    pairwise: np.ndarray
    conservative: bool


def cauchy_subsequence_probe(
    collection: Collection,
    rho: float,
    cap: int = EXACT_CAP,
    tol: float = DEFAULT_TOL,
) -> ProbeReport:
    """Greedy cluster structure of the sequence under pairwise LGH <= rho.

    Pairwise distances are exact within the cap and heuristic upper bounds
    beyond it (then the verdict is conservative). The probe succeeds when the
    largest cluster reaches the pigeonhole size ceil(N/B) and is not a
    singleton; a sequence whose members all sit > rho apart therefore fails,
    which is the finite signature of having no convergent subsequence.
    """
    collection.require_valid()
    if rho <= 0:
        raise ParameterError("rho must be positive")
    items = collection.items
    n = len(items)
    pairwise = np.zeros((n, n))
    conservative = False
    for i in range(n):
        for j in range(i + 1, n):
            if items[i].n * items[j].n <= cap:
                d = lgh_exact(items[i], items[j], cap=cap).value
            else:
                d = lgh_upper_bound_heuristic(items[i], items[j]).value
                conservative = True
            pairwise[i, j] = pairwise[j, i] = d

    clusters: list[list[int]] = []
    for i in range(n):
        for cluster in clusters:
            if all(pairwise[i, j] <= rho + tol for j in cluster):
                cluster.append(i)
                break
        else:
            clusters.append([i])
    largest = max(clusters, key=len)
    needed = math.ceil(n / len(clusters))
    ok = len(largest) >= needed and (n == 1 or len(largest) >= 2)
    return ProbeReport(
        ok,
        tuple(tuple(c) for c in clusters),
        tuple(largest),
        pairwise,
        conservative,
    )
