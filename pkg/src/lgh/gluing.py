"""Gluing admissible pseudometrics along chains of labeled spaces and the
finite-resolution limit proxy with its certified tail bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correspondences import AdmissiblePseudometric, check_admissible
from .errors import ParameterError
from .spaces import DEFAULT_TOL, LabeledMetricSpace, LabelSet, PseudoSpace, quotient_pseudometric


@dataclass(frozen=True)
class Chain:
    """Spaces X_0..X_{N-1} over one label set and admissible links between
    consecutive spaces with parameters r_k = links[k].t."""

    spaces: tuple[LabeledMetricSpace, ...]
    links: tuple[AdmissiblePseudometric, ...]

    def __post_init__(self):
        object.__setattr__(self, "spaces", tuple(self.spaces))
        object.__setattr__(self, "links", tuple(self.links))

    def __len__(self) -> int:
        return len(self.spaces)

    @property
    def params(self) -> tuple[float, ...]:
        return tuple(link.t for link in self.links)

    def validate(self, tol: float = DEFAULT_TOL) -> list[str]:
        out = []
        if not self.spaces:
            out.append("empty chain")
            return out
        if len(self.links) != len(self.spaces) - 1:
            out.append("need exactly one link per consecutive pair")
            return out
        ids = self.spaces[0].label_set.ids
        for k, s in enumerate(self.spaces):
            if set(s.label_set.ids) != set(ids):
                out.append(f"space {k} has a different label set")
        for k, link in enumerate(self.links):
            if link.x_space is not self.spaces[k] and link.x_space.points != self.spaces[k].points:
                out.append(f"link {k} does not start at space {k}")
            report = check_admissible(link, link.t, tol)
            if not report.ok:
                out.append(f"link {k} not admissible at r={link.t:.6g}: " + "; ".join(report.violations))
        return out

    def require_valid(self, tol: float = DEFAULT_TOL):
        bad = self.validate(tol)
        if bad:
            raise ParameterError("invalid chain: " + "; ".join(bad))
        return self


def _minplus(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(min,+) product: out[i,j] = min_k a[i,k] + b[k,j]."""
    return (a[:, :, None] + b[None, :, :]).min(axis=1)


def chain_metric(chain: Chain, i: int, j: int) -> np.ndarray:
    """Cross-distance matrix between X_i and X_j (i < j): minimum over
    one-point-per-level routes of the summed link distances. Equals the
    stored link for j = i + 1; admissible at the sum of the traversed r_k."""
    n = len(chain.spaces)
    if not 0 <= i < j < n:
        raise ParameterError(f"need 0 <= i < j < {n}, got ({i},{j})")
    cross = np.asarray(chain.links[i].cross)
    for k in range(i + 1, j):
        cross = _minplus(cross, np.asarray(chain.links[k].cross))
    return cross


def chain_admissible(chain: Chain, i: int, j: int) -> AdmissiblePseudometric:
    """chain_metric(i,j) packaged with its certified parameter sum."""
    cross = chain_metric(chain, i, j)
    t = float(sum(chain.params[i:j]))
    return AdmissiblePseudometric(chain.spaces[i], chain.spaces[j], cross, t)


def glue_disjoint_union(chain: Chain, tol: float = DEFAULT_TOL) -> PseudoSpace:
    """Block pseudometric on the disjoint union of all levels.

    Points are named "level:point"; every level keeps its labels under ids
    "level:label". Cross blocks come from chain_metric.
    """
    chain.require_valid(tol)
    spaces = chain.spaces
    n = len(spaces)
    sizes = [s.n for s in spaces]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    full = np.zeros((total, total))
    for i in range(n):
        a, b = offsets[i], offsets[i + 1]
        full[a:b, a:b] = spaces[i].dist
        acc = None
        for j in range(i + 1, n):
            acc = (
                np.asarray(chain.links[i].cross)
                if acc is None
                else _minplus(acc, np.asarray(chain.links[j - 1].cross))
            )
            c, d = offsets[j], offsets[j + 1]
            full[a:b, c:d] = acc
            full[c:d, a:b] = acc.T
    points = tuple(
        f"{i}:{name}" for i, s in enumerate(spaces) for name in s.points
    )
    ids = []
    labels = {}
    for i, s in enumerate(spaces):
        for l in s.label_set.ids:
            tagged = f"{i}:{l}"
            ids.append(tagged)
            labels[tagged] = int(offsets[i]) + s.labels[l]
    return PseudoSpace(points, full, labels, LabelSet(tuple(ids)))


@dataclass(frozen=True)
class LimitProxy:
    space: LabeledMetricSpace
    bound: float
    per_level_bounds: tuple[float, ...]


def limit_proxy(chain: Chain, tol: float = DEFAULT_TOL) -> LimitProxy:
    """Last chain level (quotiented) standing in for the chain limit.

    per_level_bounds[k] certifies lgh(X_k, proxy) <= sum of the r parameters
    from level k on; ``bound`` is the certificate for the second-to-last
    level, i.e. the final link parameter.
    """
    if not chain.spaces:
        raise ParameterError("empty chain")
    params = chain.params
    n = len(chain.spaces)
    bounds = [float(sum(params[k:])) for k in range(n - 1)] + [0.0]
    proxy = quotient_pseudometric(chain.spaces[-1], tol)
    return LimitProxy(proxy, bounds[-2] if n > 1 else 0.0, tuple(bounds))
