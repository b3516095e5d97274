"""Command-line surface: validation, distances, nets, approximations,
gluing, precompactness diagnostics, travel time tools, and generators.

Exit codes: 0 success, 1 verdict failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import fileformat, generators
from .approximation import check_approximation
from .correspondences import lgh_exact, lgh_lower_bound, lgh_upper_bound_heuristic
from .errors import LghError, SizeCapError, SpaceParseError
from .gluing import glue_disjoint_union, limit_proxy
from .isometry import find_l_isometry
from .precompact import (
    Collection,
    cauchy_subsequence_probe,
    equicontinuity_modulus,
    utb_report,
)
from .spaces import DEFAULT_TOL, greedy_labeled_net
from .traveltime import (
    embedding_distortion,
    reconstruct_from_data,
    stability_experiment,
    travel_time_data,
)


def _num(v) -> str:
    return "%.12g" % float(v)


def _emit(args, text_lines, csv_lines):
    lines = csv_lines if args.format == "csv" else text_lines
    for line in lines:
        print(line)


def cmd_validate(args) -> int:
    worst = 0
    text, csv = [], ["file,ok,violations"]
    for path in args.files:
        with open(path, "r", encoding="utf-8") as handle:
            space, violations = fileformat.parse_space_lenient(handle.read(), args.tol)
        if violations:
            worst = 1
            text.append(f"{path}: INVALID")
            text += [f"  {v}" for v in violations]
        else:
            text.append(f"{path}: ok ({space.n} points, {len(space.label_set)} labels)")
        csv.append(f"{path},{not violations},{';'.join(violations)}")
    _emit(args, text, csv)
    return worst


def cmd_lgh(args) -> int:
    a = fileformat.load_space(args.a, args.tol)
    b = fileformat.load_space(args.b, args.tol)
    if args.mode == "exact":
        res = lgh_exact(a, b, cap=args.cap)
        _emit(
            args,
            [f"lgh_exact = {_num(res.value)}", f"witness pairs: {list(res.correspondence.pairs)}"],
            ["a,b,value", f"{args.a},{args.b},{_num(res.value)}"],
        )
    elif args.mode == "bounds":
        lower = lgh_lower_bound(a, b)
        upper = lgh_upper_bound_heuristic(a, b, restarts=args.restarts, seed=args.seed)
        _emit(
            args,
            [f"lower = {_num(lower)}", f"upper = {_num(upper.value)}"],
            ["a,b,lower,upper", f"{args.a},{args.b},{_num(lower)},{_num(upper.value)}"],
        )
    else:
        upper = lgh_upper_bound_heuristic(a, b, restarts=args.restarts, seed=args.seed)
        _emit(
            args,
            [f"upper = {_num(upper.value)}"],
            ["a,b,upper", f"{args.a},{args.b},{_num(upper.value)}"],
        )
    return 0


def cmd_isom(args) -> int:
    a = fileformat.load_space(args.a, args.tol)
    b = fileformat.load_space(args.b, args.tol)
    result = find_l_isometry(a, b, cap=args.isom_cap, tol=args.tol)
    if result is None:
        _emit(args, ["not L-isometric"], ["a,b,found,mapping", f"{args.a},{args.b},False,"])
        return 1
    named = {a.points[i]: b.points[j] for i, j in enumerate(result.mapping)}
    _emit(
        args,
        ["L-isometric via " + ", ".join(f"{k}->{v}" for k, v in named.items())],
        [
            "a,b,found,mapping",
            f"{args.a},{args.b},True," + ";".join(f"{k}->{v}" for k, v in named.items()),
        ],
    )
    return 0


def cmd_net(args) -> int:
    space = fileformat.load_space(args.file, args.tol)
    net = greedy_labeled_net(space, args.eps)
    text = [
        "net: " + ", ".join(space.points[i] for i in net.net),
        f"covering radius = {_num(net.radius)}",
        f"label displacement = {_num(net.displacement)}",
    ]
    csv = ["kind,label,point"]
    for i in net.net:
        csv.append(f"net,,{space.points[i]}")
    for l in sorted(net.relabel):
        text.append(f"relabel {l} -> {space.points[net.relabel[l]]}")
        csv.append(f"relabel,{l},{space.points[net.relabel[l]]}")
    _emit(args, text, csv)
    return 0


def cmd_approx(args) -> int:
    a = fileformat.load_space(args.a, args.tol)
    b = fileformat.load_space(args.b, args.tol)
    with open(args.witness, "r", encoding="utf-8") as handle:
        witness = fileformat.parse_witness(handle.read(), a, b)
    verdict = check_approximation(a, b, witness, args.eps, args.delta, strong=args.strong)
    text = [f"approximation: {'ok' if verdict.ok else 'FAIL'}"]
    text += [f"  {m}" for m in verdict.failures]
    text.append(f"distortion = {_num(verdict.distortion)}")
    csv = ["clause,ok,value"]
    csv.append(f"x_net,{verdict.x_net.ok},{_num(verdict.x_net.radius)}")
    csv.append(f"y_net,{verdict.y_net.ok},{_num(verdict.y_net.radius)}")
    csv.append(f"distortion,{verdict.distortion_ok},{_num(verdict.distortion)}")
    if verdict.strong_ok is not None:
        csv.append(f"strong,{verdict.strong_ok},")
    _emit(args, text, csv)
    return 0 if verdict.ok else 1


def cmd_glue(args) -> int:
    manifest = fileformat.load_manifest(args.manifest, args.tol)
    if manifest.chain is None:
        raise SpaceParseError("manifest has no links; nothing to glue")
    union = glue_disjoint_union(manifest.chain, args.tol)
    violations = union.validate(args.tol)
    ok = not violations
    text = [f"glued {len(manifest.chain)} levels into {union.n} points: "
            f"{'ok' if ok else 'INVALID'}"]
    text += [f"  {v}" for v in violations]
    _emit(args, text, ["levels,points,ok", f"{len(manifest.chain)},{union.n},{ok}"])
    return 0 if ok else 1


def cmd_limit(args) -> int:
    manifest = fileformat.load_manifest(args.manifest, args.tol)
    if manifest.chain is None:
        raise SpaceParseError("manifest has no links; not a chain")
    proxy = limit_proxy(manifest.chain, args.tol)
    text = [f"proxy = last level, {proxy.space.n} points", f"bound = {_num(proxy.bound)}"]
    csv = ["level,bound"]
    for k, bound in enumerate(proxy.per_level_bounds):
        text.append(f"  lgh(X_{k}, proxy) <= {_num(bound)}")
        csv.append(f"{k},{_num(bound)}")
    _emit(args, text, csv)
    return 0


def cmd_precompact(args) -> int:
    manifest = fileformat.load_manifest(args.manifest, args.tol)
    collection = Collection(manifest.spaces)
    if args.delta is not None:
        omega = equicontinuity_modulus(collection, args.delta)
        _emit(
            args,
            [f"omega({_num(args.delta)}) = {_num(omega)}"],
            ["delta,omega", f"{_num(args.delta)},{_num(omega)}"],
        )
        return 0
    if args.probe is not None:
        report = cauchy_subsequence_probe(collection, args.probe, cap=args.cap, tol=args.tol)
        text = [f"probe at rho={_num(args.probe)}: {'ok' if report.ok else 'FAIL'}"]
        if report.conservative:
            text.append("  (heuristic upper bounds used; verdict is conservative)")
        csv = ["cluster,indices"]
        for k, cluster in enumerate(report.clusters):
            text.append(f"  cluster {k}: {list(cluster)}")
            csv.append(f"{k},{' '.join(map(str, cluster))}")
        _emit(args, text, csv)
        return 0 if report.ok else 1
    eps_list = args.eps or [1.0]
    report = utb_report(collection, eps_list)
    text = [f"diam_max = {_num(report.diam_max)}"]
    csv = ["key,eps,value", f"diam_max,,{_num(report.diam_max)}"]
    for eps, count in sorted(report.n_eps.items()):
        text.append(f"N_{_num(eps)} = {count}")
        csv.append(f"N_eps,{_num(eps)},{count}")
    _emit(args, text, csv)
    return 0


def cmd_traveltime(args) -> int:
    if args.stability:
        manifest = fileformat.load_manifest(args.stability, args.tol)
        collection = Collection(manifest.spaces)
        report = stability_experiment(collection, cap=args.cap, tol=args.tol)
        if args.format == "csv":
            sys.stdout.write(report.to_csv())
        else:
            for row in report.rows:
                print(
                    f"({row.i},{row.j}): d_data = {_num(row.d_data)}, "
                    f"d_space = {_num(row.d_space)}, slack = {_num(row.slack)}"
                )
            for k, worst in report.excluded:
                print(f"excluded {k}: embedding defect {_num(worst)}")
            print("ok" if report.ok else "FAIL")
        return 0 if report.ok else 1
    space = fileformat.load_space(args.data or args.check or args.reconstruct, args.tol)
    if args.data:
        data = travel_time_data(space)
        header = "point," + ",".join(data.boundary_ids)
        lines = [header]
        for i, row in enumerate(data.rows):
            lines.append(f"{space.points[i]}," + ",".join(_num(v) for v in row))
        _emit(args, lines, lines)
        return 0
    if args.check:
        report = embedding_distortion(space, args.tol)
        i, j = report.witness
        _emit(
            args,
            [
                f"embedding defect = {_num(report.worst)} at "
                f"({space.points[i]},{space.points[j]})",
                "boundary-resolved" if report.boundary_resolved else "NOT boundary-resolved",
            ],
            [
                "worst,i,j,boundary_resolved",
                f"{_num(report.worst)},{space.points[i]},{space.points[j]},"
                f"{report.boundary_resolved}",
            ],
        )
        return 0 if report.boundary_resolved else 1
    recon = reconstruct_from_data(travel_time_data(space), space.label_set, args.tol)
    out = fileformat.serialize_space(recon)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(out)
        print(f"wrote {args.out} ({recon.n} points)")
    else:
        sys.stdout.write(out)
    return 0


def cmd_gen(args) -> int:
    if args.generator == "graph":
        size = (args.rows, args.cols) if args.kind == "grid" else args.size
        boundary = args.boundary
        if boundary not in ("endpoints", "leaves"):
            boundary = boundary.split(",")
        space = generators.gen_graph_space(args.kind, size, args.weight, boundary)
        if args.scale != 1.0:
            space = generators.scale_space(space, args.scale)
        fileformat.write_space(args.out, space)
        print(f"wrote {args.out} ({space.n} points)")
        return 0
    if args.generator == "random":
        param = args.dim if args.method == "euclidean" else args.p
        space = generators.gen_random_space(
            args.n, args.method, param, seed=args.seed, n_labels=args.labels
        )
        fileformat.write_space(args.out, space)
        print(f"wrote {args.out} ({space.n} points)")
        return 0
    family = generators.gen_projection_family(args.k)
    os.makedirs(args.out_dir, exist_ok=True)
    rel = []
    for idx, space in enumerate(family.items):
        name = f"projection_{idx}.lms"
        fileformat.write_space(os.path.join(args.out_dir, name), space)
        rel.append(name)
    fileformat.write_manifest(os.path.join(args.out_dir, "manifest.json"), rel)
    print(f"wrote {len(rel)} spaces + manifest to {args.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lgh",
        description="Labeled Gromov-Hausdorff distances on finite labeled metric spaces",
    )
    parser.add_argument(
        "--tol",
        type=float,
        default=float(os.environ.get("LGH_TOL", DEFAULT_TOL)),
        help="absolute tolerance for metric checks (env LGH_TOL)",
    )
    parser.add_argument("--cap", type=int, default=20, help="exact search cap on |X|*|Y|")
    parser.add_argument("--seed", type=int, default=0, help="seed for heuristics/generators")
    parser.add_argument("--format", choices=("text", "csv"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check space files against the metric axioms")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("lgh", help="labeled GH distance between two space files")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="mode", action="store_const", const="exact")
    mode.add_argument("--bounds", dest="mode", action="store_const", const="bounds")
    mode.add_argument("--heuristic", dest="mode", action="store_const", const="heuristic")
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_lgh, mode="exact")

    p = sub.add_parser("isom", help="search for an exact L-isometry")
    p.add_argument("--isom-cap", type=int, default=10)
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_isom)

    p = sub.add_parser("net", help="greedy labeled eps-net")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("file")
    p.set_defaults(func=cmd_net)

    p = sub.add_parser("approx", help="check an (eps,delta)-approximation witness")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--strong", action="store_true")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("witness")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("glue", help="glue a chain manifest into one pseudospace")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_glue)

    p = sub.add_parser("limit", help="limit proxy and certified tail bounds of a chain")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("precompact", help="uniform boundedness / modulus / probe")
    p.add_argument("manifest")
    p.add_argument("--eps", type=float, action="append")
    p.add_argument("--delta", type=float)
    p.add_argument("--probe", type=float)
    p.set_defaults(func=cmd_precompact)

    p = sub.add_parser("traveltime", help="travel time data tools")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--data", metavar="FILE")
    group.add_argument("--check", metavar="FILE")
    group.add_argument("--reconstruct", metavar="FILE")
    group.add_argument("--stability", metavar="MANIFEST")
    p.add_argument("--out")
    p.set_defaults(func=cmd_traveltime)

    p = sub.add_parser("gen", help="deterministic instance generators")
    gensub = p.add_subparsers(dest="generator", required=True)
    g = gensub.add_parser("graph")
    g.add_argument("--kind", choices=("path", "cycle", "star", "tree", "grid"), required=True)
    g.add_argument("--size", type=int, default=5, help="points (path/cycle/star) or depth (tree)")
    g.add_argument("--rows", type=int, default=3)
    g.add_argument("--cols", type=int, default=3)
    g.add_argument("--weight", type=float, default=1.0)
    g.add_argument("--scale", type=float, default=1.0)
    g.add_argument(
        "--boundary",
        default="endpoints",
        help="endpoints | leaves | comma-separated point names",
    )
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)
    g = gensub.add_parser("random")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--method", choices=("euclidean", "random-graph"), default="euclidean")
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--p", type=float, default=0.4)
    g.add_argument("--labels", type=int)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)
    g = gensub.add_parser("projection")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--out-dir", required=True)
    g.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpaceParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SizeCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LghError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
