"""Travel time data of labeled spaces: boundary-distance rows with sup-norm
metric, the discrete simplicity surrogate, reconstruction, and the stability
experiment comparing data distances to space distances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correspondences import EXACT_CAP, lgh_exact
from .errors import MalformedDataError, ParameterError
from .precompact import Collection
from .spaces import DEFAULT_TOL, LabeledMetricSpace, LabelSet, strip_labels


@dataclass(frozen=True)
class TravelTimeData:
    """One boundary-distance row per point: rows[x][j] = d_X(x, alpha(l_j)).

    Rows are kept as a multiset; deduplication happens at reconstruction.
    """

    boundary_ids: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "boundary_ids", tuple(self.boundary_ids))
        rows = np.array(self.rows, dtype=float)
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def n_points(self) -> int:
        return self.rows.shape[0]

    def validate(self, tol: float = DEFAULT_TOL) -> list[str]:
        """Internal consistency: zero row per label, boundary 1-Lipschitz
        bound, nonnegative finite entries."""
        out = []
        rows = self.rows
        if rows.ndim != 2 or rows.shape[1] != len(self.boundary_ids):
            return ["row width does not match the boundary ids"]
        if not np.all(np.isfinite(rows)) or np.any(rows < -tol):
            out.append("negative or non-finite entry")
            return out
        zero_rows = {}
        for j, l in enumerate(self.boundary_ids):
            hits = np.nonzero(rows[:, j] <= tol)[0]
            if len(hits) == 0:
                out.append(f"no zero-entry row for label {l}")
            else:
                zero_rows[j] = int(hits[0])
        if out:
            return out
        # boundary geometry recovered from the zero rows
        m = len(self.boundary_ids)
        bdry = np.empty((m, m))
        for j in range(m):
            bdry[j] = rows[zero_rows[j]]
        for x in range(rows.shape[0]):
            gap = np.abs(rows[x][:, None] - rows[x][None, :]) - bdry
            if gap.max() > tol:
                j, k = np.unravel_index(int(np.argmax(gap)), gap.shape)
                out.append(
                    f"row {x} not 1-Lipschitz against boundary pair "
                    f"({self.boundary_ids[j]},{self.boundary_ids[k]})"
                )
                break
        return out


def travel_time_data(space: LabeledMetricSpace) -> TravelTimeData:
    """Full boundary-distance row matrix; requires a nonempty label set."""
    ids = space.label_set.ids
    if not ids:
        raise ParameterError("travel time data needs a nonempty label set")
    cols = [space.labels[l] for l in ids]
    return TravelTimeData(ids, space.dist[:, cols])


@dataclass(frozen=True)
class EmbeddingReport:
    worst: float
    witness: tuple[int, int]
    boundary_resolved: bool


def embedding_distortion(space: LabeledMetricSpace, tol: float = DEFAULT_TOL) -> EmbeddingReport:
    """Worst defect d_X(x,y) - sup-norm gap of the travel time rows.

    Zero within tol means every distance is realized through the boundary
    ("boundary-resolved"), the finite surrogate of simplicity; then the
    travel time map embeds the space isometrically.
    """
    data = travel_time_data(space)
    rows = data.rows
    supnorm = np.abs(rows[:, None, :] - rows[None, :, :]).max(axis=-1)
    gap = space.dist - supnorm
    i, j = np.unravel_index(int(np.argmax(gap)), gap.shape)
    worst = float(gap[i, j])
    return EmbeddingReport(worst, (int(i), int(j)), worst <= tol)


def reconstruct_from_data(
    data: TravelTimeData,
    label_set: LabelSet | None = None,
    tol: float = DEFAULT_TOL,
) -> LabeledMetricSpace:
    """Space of deduplicated rows under the sup-norm, labeled by the zero-entry
    rows. Rows within tol merge (first occurrence is the representative)."""
    rows = data.rows
    reps: list[int] = []
    for x in range(rows.shape[0]):
        for r in reps:
            if float(np.abs(rows[x] - rows[r]).max()) <= tol:
                break
        else:
            reps.append(x)
    rep_rows = rows[reps]
    dist = np.abs(rep_rows[:, None, :] - rep_rows[None, :, :]).max(axis=-1)
    labels = {}
    for j, l in enumerate(data.boundary_ids):
        hits = np.nonzero(rep_rows[:, j] <= tol)[0]
        if len(hits) == 0:
            raise MalformedDataError(f"no zero-entry row for label {l}")
        labels[l] = int(hits[0])
    if label_set is None:
        label_set = LabelSet(data.boundary_ids)
    points = tuple(f"r{k}" for k in range(len(reps)))
    return LabeledMetricSpace(points, dist, labels, label_set).require_valid(tol)


@dataclass(frozen=True)
class StabilityRow:
    i: int
    j: int
    d_data: float
    d_space: float

    @property
    def slack(self) -> float:
        return self.d_space - self.d_data


@dataclass(frozen=True)
class StabilityReport:
    rows: tuple[StabilityRow, ...]
    excluded: tuple[tuple[int, float], ...]
    ok: bool

    def to_csv(self) -> str:
        lines = ["i,j,d_data,d_space,slack"]
        for r in self.rows:
            lines.append(
                f"{r.i},{r.j},{r.d_data:.12g},{r.d_space:.12g},{r.slack:.12g}"
            )
        return "\n".join(lines) + "\n"


def stability_experiment(
    family: Collection,
    cap: int = EXACT_CAP,
    tol: float = DEFAULT_TOL,
) -> StabilityReport:
    """Pairwise comparison of data distances with space distances.

    d_data is the unlabeled GH distance between reconstructed travel time
    data spaces, d_space the labeled distance between the originals; the
    data map is 1-Lipschitz, so d_data <= d_space for boundary-resolved
    members. Non-resolved members are excluded and listed.
    """
    family.require_valid()
    usable = []
    excluded = []
    for k, s in enumerate(family.items):
        report = embedding_distortion(s, tol)
        if report.boundary_resolved:
            usable.append((k, s))
        else:
            excluded.append((k, report.worst))
    recon = {
        k: strip_labels(reconstruct_from_data(travel_time_data(s), tol=tol))
        for k, s in usable
    }
    rows = []
    ok = True
    for a in range(len(usable)):
        for b in range(a + 1, len(usable)):
            i, si = usable[a]
            j, sj = usable[b]
            d_data = lgh_exact(recon[i], recon[j], cap=cap).value
            d_space = lgh_exact(si, sj, cap=cap).value
            rows.append(StabilityRow(i, j, d_data, d_space))
            if d_data > d_space + tol:
                ok = False
    return StabilityReport(tuple(rows), tuple(excluded), ok)
