from __future__ import annotations

import numpy as np
import pytest

from lgh.cli import main
from lgh.fileformat import load_space, write_manifest, write_space
from lgh.generators import gen_dyadic_chain, gen_graph_space, gen_projection_family, scale_space
from lgh.spaces import LabeledMetricSpace, LabelSet


@pytest.fixture
def two_point_files(tmp_path):
    label_set = LabelSet(("l1", "l2"))
    x = LabeledMetricSpace(
        ("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]), {"l1": 0, "l2": 1}, label_set
    )
    y = LabeledMetricSpace(
        ("c", "d"), np.array([[0.0, 2.0], [2.0, 0.0]]), {"l1": 0, "l2": 1}, label_set
    )
    ax, by = tmp_path / "a.lms", tmp_path / "b.lms"
    write_space(str(ax), x)
    write_space(str(by), y)
    return str(ax), str(by)


@pytest.fixture
def chain_manifest(tmp_path):
    chain = gen_dyadic_chain([1, 2, 3])
    rel = []
    for k, space in enumerate(chain.spaces):
        name = f"level{k}.lms"
        write_space(str(tmp_path / name), space)
        rel.append(name)
    path = tmp_path / "chain.json"
    write_manifest(str(path), rel, links=chain.links)
    return str(path)


def test_lgh_exact_two_point(two_point_files, capsys):
    a, b = two_point_files
    assert main(["lgh", "--exact", a, b]) == 0
    out = capsys.readouterr().out
    assert "0.5" in out


def test_lgh_exact_csv(two_point_files, capsys):
    a, b = two_point_files
    assert main(["--format", "csv", "lgh", "--exact", a, b]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "a,b,value"
    assert lines[1].endswith(",0.5")


def test_lgh_bounds(two_point_files, capsys):
    a, b = two_point_files
    assert main(["lgh", "--bounds", a, b]) == 0
    out = capsys.readouterr().out
    assert "lower" in out and "upper" in out


def test_lgh_over_cap_exits_2(two_point_files, capsys):
    a, b = two_point_files
    assert main(["--cap", "3", "lgh", "--exact", a, b]) == 2
    assert "cap" in capsys.readouterr().err


def test_validate_ok_and_violation(tmp_path, capsys):
    good = tmp_path / "good.lms"
    write_space(str(good), gen_graph_space("path", 5))
    bad = tmp_path / "bad.lms"
    bad.write_text(
        '{"format_version": 1, "labels": {}, "points": ["a", "b", "c"],'
        ' "dist": [[1, 3], [1]]}'
    )
    assert main(["validate", str(good)]) == 0
    assert main(["validate", str(bad)]) == 1
    out = capsys.readouterr().out
    assert "triangle (0,1,2)" in out


def test_validate_parse_error_exits_2(tmp_path, capsys):
    broken = tmp_path / "broken.lms"
    broken.write_text("{ not json")
    assert main(["validate", str(broken)]) == 2


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_isom(two_point_files, tmp_path, capsys):
    a, b = two_point_files
    assert main(["isom", a, b]) == 1
    p5 = tmp_path / "p5.lms"
    write_space(str(p5), gen_graph_space("path", 5))
    assert main(["isom", str(p5), str(p5)]) == 0
    assert "v0->v0" in capsys.readouterr().out


def test_net(tmp_path, capsys):
    p5 = tmp_path / "p5.lms"
    write_space(str(p5), gen_graph_space("path", 5))
    assert main(["net", "--eps", "1.5", str(p5)]) == 0
    out = capsys.readouterr().out
    assert "relabel A -> v0" in out


def test_approx(two_point_files, tmp_path, capsys):
    a, b = two_point_files
    witness = tmp_path / "w.json"
    witness.write_text(
        '{"x": ["a", "b"], "y": ["c", "d"],'
        ' "alpha0": {"l1": "a", "l2": "b"}, "beta0": {"l1": "c", "l2": "d"}}'
    )
    assert main(["approx", "--eps", "3", "--delta", "1.5", "--strong", a, b, str(witness)]) == 0
    assert main(["approx", "--eps", "3", "--delta", "0.5", a, b, str(witness)]) == 1


def test_glue_and_limit(chain_manifest, capsys):
    assert main(["glue", chain_manifest]) == 0
    assert "ok" in capsys.readouterr().out
    assert main(["limit", chain_manifest]) == 0
    out = capsys.readouterr().out
    assert "bound" in out


def test_precompact_modes(tmp_path, capsys):
    family = gen_projection_family(3)
    rel = []
    for k, space in enumerate(family.items):
        name = f"proj{k}.lms"
        write_space(str(tmp_path / name), space)
        rel.append(name)
    manifest = tmp_path / "family.json"
    write_manifest(str(manifest), rel)
    assert main(["precompact", str(manifest), "--eps", "0.5"]) == 0
    assert "diam_max" in capsys.readouterr().out
    assert main(["precompact", str(manifest), "--delta", "0.125"]) == 0
    assert "omega" in capsys.readouterr().out
    assert main(["precompact", str(manifest), "--probe", "0.4"]) == 1


def test_traveltime_modes(tmp_path, capsys):
    p5 = tmp_path / "p5.lms"
    write_space(str(p5), gen_graph_space("path", 5))
    assert main(["traveltime", "--data", str(p5)]) == 0
    assert "point,A,B" in capsys.readouterr().out
    assert main(["traveltime", "--check", str(p5)]) == 0
    assert "boundary-resolved" in capsys.readouterr().out
    out_file = tmp_path / "recon.lms"
    assert main(["traveltime", "--reconstruct", str(p5), "--out", str(out_file)]) == 0
    capsys.readouterr()
    recon = load_space(str(out_file))
    assert recon.n == 5


def test_traveltime_stability_csv(tmp_path, capsys):
    base = gen_graph_space("path", 4)
    rel = []
    for k, c in enumerate((1.0, 1.1)):
        name = f"s{k}.lms"
        write_space(str(tmp_path / name), scale_space(base, c))
        rel.append(name)
    manifest = tmp_path / "family.json"
    write_manifest(str(manifest), rel)
    assert main(["--format", "csv", "traveltime", "--stability", str(manifest)]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "i,j,d_data,d_space,slack"
    assert len(lines) == 2


def test_gen_commands(tmp_path, capsys):
    out = tmp_path / "g.lms"
    assert main(["gen", "graph", "--kind", "cycle", "--size", "4", "--out", str(out)]) == 0
    assert load_space(str(out)).n == 4
    out2 = tmp_path / "r.lms"
    assert main(["gen", "random", "--n", "5", "--out", str(out2), "--labels", "2"]) == 0
    assert load_space(str(out2)).n == 5
    capsys.readouterr()
    assert main(["gen", "projection", "--k", "2", "--out-dir", str(tmp_path / "proj")]) == 0
    assert main(["precompact", str(tmp_path / "proj" / "manifest.json"), "--probe", "0.4"]) == 1


def test_gen_deterministic(tmp_path):
    a, b = tmp_path / "a.lms", tmp_path / "b.lms"
    assert main(["--seed", "5", "gen", "random", "--n", "6", "--out", str(a)]) == 0
    assert main(["--seed", "5", "gen", "random", "--n", "6", "--out", str(b)]) == 0
    assert a.read_text() == b.read_text()
