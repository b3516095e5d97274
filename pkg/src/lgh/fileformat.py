"""Space and manifest files: canonical serialization and positioned parsing.

Canonical form is JSON with sorted object keys, the distance matrix as its
strict upper triangle, label ids sorted lexicographically, and numerals
printed with 12 significant digits (the round trip is then bit-exact).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .approximation import ApproximationWitness
from .correspondences import AdmissiblePseudometric
from .errors import SpaceParseError
from .gluing import Chain
from .spaces import DEFAULT_TOL, LabeledMetricSpace, LabelSet

FORMAT_VERSION = 1


def _num(v) -> str:
    return "%.12g" % float(v)


def _upper_triangle(mat: np.ndarray) -> list[list[float]]:
    n = mat.shape[0]
    return [[float(mat[i, j]) for j in range(i + 1, n)] for i in range(n - 1)]


def _matrix_lines(rows, indent: str) -> list[str]:
    if not rows:
        return ["[]"]
    out = ["["]
    for k, row in enumerate(rows):
        comma = "," if k < len(rows) - 1 else ""
        out.append(indent + "  [" + ", ".join(_num(v) for v in row) + "]" + comma)
    out.append(indent + "]")
    return out


def serialize_space(space: LabeledMetricSpace) -> str:
    """Canonical text for a space; parse_space is its inverse."""
    lines = ["{"]
    lines.append(f'  "format_version": {FORMAT_VERSION},')
    sorted_ids = sorted(space.label_set.ids)
    if space.label_set.label_metric is not None:
        order = [space.label_set.index(l) for l in sorted_ids]
        lm = np.asarray(space.label_set.label_metric)[np.ix_(order, order)]
        body = _matrix_lines(_upper_triangle(lm), "  ")
        lines.append('  "label_metric": ' + body[0])
        lines += body[1:]
        lines[-1] += ","
    entries = ", ".join(
        json.dumps(l) + ": " + json.dumps(space.points[space.labels[l]])
        for l in sorted_ids
    )
    lines.append('  "labels": {' + entries + "},")
    lines.append('  "points": [' + ", ".join(json.dumps(p) for p in space.points) + "],")
    body = _matrix_lines(_upper_triangle(np.asarray(space.dist)), "  ")
    lines.append('  "dist": ' + body[0])
    lines += body[1:]
    lines.append("}")
    return "\n".join(lines) + "\n"


def _structure(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpaceParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(doc, dict):
        raise SpaceParseError("document is not an object")
    return doc


def _dist_matrix(raw, n: int) -> np.ndarray:
    if not isinstance(raw, list) or any(not isinstance(r, list) for r in raw):
        raise SpaceParseError("dist must be a list of rows", field="dist")
    if len(raw) == n and all(len(r) == n for r in raw):
        return np.array(raw, dtype=float)
    if len(raw) == max(n - 1, 0) and all(
        len(raw[i]) == n - 1 - i for i in range(len(raw))
    ):
        full = np.zeros((n, n))
        for i, row in enumerate(raw):
            for k, v in enumerate(row):
                j = i + 1 + k
                full[i, j] = full[j, i] = float(v)
        return full
    raise SpaceParseError(
        f"dist must be a full {n}x{n} matrix or its strict upper triangle",
        field="dist",
    )


def build_space(doc: dict) -> LabeledMetricSpace:
    """Structural conversion of a parsed document; no metric validation."""
    if doc.get("format_version") != FORMAT_VERSION:
        raise SpaceParseError(
            f"unsupported format_version {doc.get('format_version')!r}",
            field="format_version",
        )
    points = doc.get("points")
    if not isinstance(points, list) or not points or any(
        not isinstance(p, str) for p in points
    ):
        raise SpaceParseError("points must be a nonempty list of names", field="points")
    if len(set(points)) != len(points):
        raise SpaceParseError("duplicate point names", field="points")
    index = {p: i for i, p in enumerate(points)}
    dist = _dist_matrix(doc.get("dist"), len(points))
    raw_labels = doc.get("labels", {})
    if not isinstance(raw_labels, dict):
        raise SpaceParseError("labels must be an object", field="labels")
    labels = {}
    for l, p in raw_labels.items():
        if p not in index:
            raise SpaceParseError(f"label {l} -> unknown point {p!r}", field=f"labels.{l}")
        labels[l] = index[p]
    ids = tuple(sorted(raw_labels))
    label_metric = None
    if "label_metric" in doc:
        m = len(ids)
        raw = doc["label_metric"]
        if not isinstance(raw, list):
            raise SpaceParseError("label_metric must be a matrix", field="label_metric")
        if len(raw) == m and all(isinstance(r, list) and len(r) == m for r in raw):
            label_metric = np.array(raw, dtype=float)
        elif len(raw) == max(m - 1, 0) and all(
            len(raw[i]) == m - 1 - i for i in range(len(raw))
        ):
            label_metric = np.zeros((m, m))
            for i, row in enumerate(raw):
                for k, v in enumerate(row):
                    j = i + 1 + k
                    label_metric[i, j] = label_metric[j, i] = float(v)
        else:
            raise SpaceParseError(
                "label_metric shape does not match the label count", field="label_metric"
            )
    return LabeledMetricSpace(tuple(points), dist, labels, LabelSet(ids, label_metric))


def parse_space_lenient(
    text: str, tol: float = DEFAULT_TOL
) -> tuple[LabeledMetricSpace, list[str]]:
    """Parse and return (space, metric violations); raises only on syntactic
    or structural problems."""
    space = build_space(_structure(text))
    return space, space.validate(tol)


def parse_space(text: str, tol: float = DEFAULT_TOL) -> LabeledMetricSpace:
    space, violations = parse_space_lenient(text, tol)
    if violations:
        raise SpaceParseError("invalid space: " + "; ".join(violations))
    return space


def load_space(path: str, tol: float = DEFAULT_TOL) -> LabeledMetricSpace:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            return parse_space(handle.read(), tol)
        except SpaceParseError as exc:
            raise SpaceParseError(f"{path}: {exc}") from exc


def write_space(path: str, space: LabeledMetricSpace):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize_space(space))


@dataclass(frozen=True)
class Manifest:
    """Ordered space files plus optional consecutive link matrices."""

    paths: tuple[str, ...]
    spaces: tuple[LabeledMetricSpace, ...]
    chain: Chain | None
    eps: tuple[float, ...] | None


def load_manifest(path: str, tol: float = DEFAULT_TOL) -> Manifest:
    with open(path, "r", encoding="utf-8") as handle:
        doc = _structure(handle.read())
    if doc.get("format_version") != FORMAT_VERSION:
        raise SpaceParseError(
            f"unsupported format_version {doc.get('format_version')!r}",
            field="format_version",
        )
    rel_paths = doc.get("spaces")
    if not isinstance(rel_paths, list) or not rel_paths:
        raise SpaceParseError("spaces must be a nonempty list of paths", field="spaces")
    base = os.path.dirname(os.path.abspath(path))
    full_paths = [os.path.join(base, p) for p in rel_paths]
    for p in full_paths:
        if not os.path.exists(p):
            raise SpaceParseError(f"referenced file does not exist: {p}", field="spaces")
    spaces = tuple(load_space(p, tol) for p in full_paths)
    ids = set(spaces[0].label_set.ids)
    for k, s in enumerate(spaces[1:], start=1):
        if set(s.label_set.ids) != ids:
            raise SpaceParseError(
                f"space {rel_paths[k]} does not share the label set", field="spaces"
            )
    chain = None
    if "links" in doc:
        raw_links = doc["links"]
        if not isinstance(raw_links, list) or len(raw_links) != len(spaces) - 1:
            raise SpaceParseError(
                "links must list one entry per consecutive pair", field="links"
            )
        links = []
        for k, entry in enumerate(raw_links):
            if not isinstance(entry, dict) or "t" not in entry or "cross" not in entry:
                raise SpaceParseError(
                    f"link {k} must carry 't' and 'cross'", field=f"links[{k}]"
                )
            cross = np.array(entry["cross"], dtype=float)
            if cross.shape != (spaces[k].n, spaces[k + 1].n):
                raise SpaceParseError(
                    f"link {k} cross matrix has shape {cross.shape}, "
                    f"expected ({spaces[k].n},{spaces[k + 1].n})",
                    field=f"links[{k}]",
                )
            links.append(
                AdmissiblePseudometric(spaces[k], spaces[k + 1], cross, float(entry["t"]))
            )
        chain = Chain(spaces, tuple(links))
    eps = None
    if "eps" in doc:
        eps = tuple(float(v) for v in doc["eps"])
    return Manifest(tuple(full_paths), spaces, chain, eps)


def write_manifest(path: str, rel_paths, links=None, eps=None):
    lines = ["{"]
    lines.append(f'  "format_version": {FORMAT_VERSION},')
    if eps is not None:
        lines.append('  "eps": [' + ", ".join(_num(v) for v in eps) + "],")
    if links is not None:
        lines.append('  "links": [')
        for k, link in enumerate(links):
            comma = "," if k < len(links) - 1 else ""
            rows = ", ".join(
                "[" + ", ".join(_num(v) for v in row) + "]" for row in np.asarray(link.cross)
            )
            lines.append(
                f'    {{"cross": [{rows}], "t": {_num(link.t)}}}{comma}'
            )
        lines.append("  ],")
    lines.append('  "spaces": [' + ", ".join(json.dumps(p) for p in rel_paths) + "]")
    lines.append("}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def parse_witness(
    text: str, x: LabeledMetricSpace, y: LabeledMetricSpace
) -> ApproximationWitness:
    """Witness file: point-name lists "x" and "y" plus relabelings "alpha0"
    and "beta0" (label id -> point name)."""
    doc = _structure(text)
    xi = {p: i for i, p in enumerate(x.points)}
    yi = {p: i for i, p in enumerate(y.points)}

    def resolve(names, index, field):
        out = []
        for name in names:
            if name not in index:
                raise SpaceParseError(f"unknown point {name!r}", field=field)
            out.append(index[name])
        return out

    def resolve_map(mapping, index, field):
        out = {}
        for l, p in mapping.items():
            if p not in index:
                raise SpaceParseError(f"label {l} -> unknown point {p!r}", field=field)
            out[l] = index[p]
        return out

    for key in ("x", "y", "alpha0", "beta0"):
        if key not in doc:
            raise SpaceParseError(f"witness misses {key!r}", field=key)
    return ApproximationWitness(
        tuple(resolve(doc["x"], xi, "x")),
        tuple(resolve(doc["y"], yi, "y")),
        resolve_map(doc["alpha0"], xi, "alpha0"),
        resolve_map(doc["beta0"], yi, "beta0"),
    )
