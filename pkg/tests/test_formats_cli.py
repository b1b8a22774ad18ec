"""Point-set file format, witness serialization, and the CLI surface."""

import json

import numpy as np
import pytest

from blockingsets import formats
from blockingsets.blocking import traces_of
from blockingsets.cli import main, version_string
from blockingsets.errors import IoError, ParseError
from blockingsets.fields import make_field
from blockingsets.projspace import PointSet, ProjectiveSpace, Subspace


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def cli_json(capsys, *argv, expect=0):
    code, out, err = run_cli(capsys, *argv)
    assert code == expect, err
    return json.loads(out)


# -- point-set files -------------------------------------------------------------


def test_pointset_roundtrip(tmp_path, baer):
    path = str(tmp_path / "baer.pts")
    formats.write_pointset(path, baer.points)
    again = formats.read_pointset(path)
    assert again == baer.points
    first = open(path, "rb").read()
    formats.write_pointset(path, baer.points)
    assert open(path, "rb").read() == first
    assert first.startswith(b"pointset 1 3 2 2\n")


def test_pointset_meta_sidecar(tmp_path, baer):
    path = str(tmp_path / "baer.pts")
    formats.write_pointset(path, baer.points, meta={"k": 1, "claims": {}})
    assert formats.meta_path(path).endswith("baer.meta.json")
    pts, meta = formats.read_pointset(path, with_meta=True)
    assert pts == baer.points and meta == {"k": 1, "claims": {}}
    bare = str(tmp_path / "bare.pts")
    formats.write_pointset(bare, baer.points)
    _, meta2 = formats.read_pointset(bare, with_meta=True)
    assert meta2 is None


def test_pointset_accepts_comments_and_representatives(tmp_path):
    path = str(tmp_path / "in.pts")
    with open(path, "w") as fh:
        fh.write("# leading comment\n\n"
                 "pointset 1 3 1 2\n"
                 "2 0 2   # same as 1 0 1\n"
                 "1 0 1\n")
    pts = formats.read_pointset(path)
    space = ProjectiveSpace(2, make_field(3, 1))
    assert len(pts) == 1
    assert int(pts.ranks[0]) == space.rank_of((1, 0, 1))


@pytest.mark.parametrize("body,fragment", [
    ("notpointset 1 3 1 2\n1 0 1\n", "not a point set file"),
    ("pointset 1 3 1\n", "header needs"),
    ("pointset 1 x 1 2\n", "non-integer header"),
    ("pointset 9 3 1 2\n", "unsupported version"),
    ("pointset 1 3 1 2\n1 a 1\n", "non-integer"),
    ("pointset 1 3 1 2\n1 0\n", "expected 3 coordinates"),
    ("pointset 1 3 1 2\n1 0 5\n", "element code outside"),
    ("pointset 1 3 1 2\n0 0 0\n", "zero vector"),
    ("pointset 1 4 1 2\n1 0 1\n", "bad space parameters"),
    ("", "empty file"),
])
def test_pointset_parse_errors(tmp_path, body, fragment):
    path = str(tmp_path / "bad.pts")
    with open(path, "w") as fh:
        fh.write(body)
    with pytest.raises(ParseError) as err:
        formats.read_pointset(path)
    assert fragment in str(err.value)
    assert path in str(err.value)


def test_parse_errors_carry_line_numbers(tmp_path):
    path = str(tmp_path / "bad.pts")
    with open(path, "w") as fh:
        fh.write("# comment\npointset 1 3 1 2\n1 0 1\n1 0\n")
    with pytest.raises(ParseError) as err:
        formats.read_pointset(path)
    assert f"{path}:4:" in str(err.value)


def test_io_errors(tmp_path, baer):
    with pytest.raises(IoError):
        formats.read_pointset(str(tmp_path / "missing.pts"))
    with pytest.raises(IoError):
        formats.write_pointset(str(tmp_path / "no" / "dir.pts"), baer.points)
    with pytest.raises(IoError):
        formats.write_json(str(tmp_path / "no" / "x.json"), {})


def test_json_canonical(tmp_path):
    path = str(tmp_path / "obj.json")
    formats.write_json(path, {"b": 1, "a": [1, 2]})
    text = open(path).read()
    assert text == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'
    assert formats.read_json(path) == {"a": [1, 2], "b": 1}
    with open(path, "w") as fh:
        fh.write("{nope")
    with pytest.raises(ParseError):
        formats.read_json(path)


def test_witness_dict_roundtrip(baer, cone_9):
    for witness in (baer, cone_9):
        data = formats.witness_to_dict(witness)
        rebuilt = formats.witness_from_dict(data)
        assert rebuilt.points == witness.points
        assert rebuilt.rank == witness.rank
    data = formats.witness_to_dict(baer)
    data["rank"] = 2
    with pytest.raises(ParseError):
        formats.witness_from_dict(data)
    dep = formats.witness_to_dict(baer)
    dep["rows"] = [dep["rows"][0], dep["rows"][0]]
    dep["rank"] = 2
    with pytest.raises(ParseError):
        formats.witness_from_dict(dep)


# -- CLI -----------------------------------------------------------------------


@pytest.fixture()
def baer_file(tmp_path, capsys):
    path = str(tmp_path / "baer.pts")
    cli_json(capsys, "gen", "subgeometry", "--p", "3", "--t", "2",
             "--n", "2", "--out", path)
    return path


def test_cli_version():
    assert version_string().startswith("blockingsets ")
    assert "(conway-table 1)" in version_string()


def test_cli_gen(tmp_path, capsys, baer):
    path = str(tmp_path / "out.pts")
    data = cli_json(capsys, "gen", "subgeometry", "--p", "3", "--t", "2",
                    "--n", "2", "--out", path)
    assert data["points"] == 13 and data["witness_rank"] == 3
    assert data["path"] == path
    pts, meta = formats.read_pointset(path, with_meta=True)
    assert pts == baer.points
    assert meta["family"] == "subgeometry"
    assert meta["params"] == {"q": 9, "p0": 3, "n": 2}
    rebuilt = formats.witness_from_dict(meta["witness"])
    assert rebuilt.points == pts
    # byte-identical regeneration
    other = str(tmp_path / "out2.pts")
    cli_json(capsys, "gen", "subgeometry", "--p", "3", "--t", "2",
             "--n", "2", "--out", other)
    assert open(path, "rb").read() == open(other, "rb").read()
    assert open(formats.meta_path(path), "rb").read() == \
        open(formats.meta_path(other), "rb").read()


def test_cli_gen_bad_params(tmp_path, capsys):
    code, _, err = run_cli(capsys, "gen", "random_rank_r", "--p", "3",
                           "--t", "3", "--n", "2", "--rank", "0",
                           "--seed", "1", "--out", str(tmp_path / "x.pts"))
    assert code == 2
    assert err.startswith("error: BadParamsError:")


def test_cli_check(capsys, baer_file):
    data = cli_json(capsys, "check", baer_file, "--k", "1")
    assert data["blocking"] and data["minimal"] and data["redei"]
    assert data["small"] and not data["trivial"]
    assert data["exponent"] == 1 and data["set_size"] == 13
    assert data["space"] == {"p": 3, "t": 2, "n": 2, "q": 9}
    assert data["uncovered_rows"] is None
    assert data["removable_point"] is None
    assert len(data["redei_hyperplane_rows"]) == 2


def test_cli_check_nonblocking_still_reports(tmp_path, capsys):
    path = str(tmp_path / "three.pts")
    with open(path, "w") as fh:
        fh.write("pointset 1 3 1 2\n0 0 1\n0 1 0\n1 0 0\n")
    data = cli_json(capsys, "check", path)
    assert not data["blocking"]
    assert data["uncovered_rows"] is not None


def test_cli_check_missing_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "check", str(tmp_path / "nope.pts"))
    assert code == 3
    assert err.startswith("error: IoError:")


def test_cli_reconstruct(capsys, baer_file):
    data = cli_json(capsys, "reconstruct", baer_file, "--p0", "3")
    assert data["status"] == "ok" and data["dim_W"] == 2
    assert data["image_equal"] and data["secants_used"] == 4
    assert len(data["W_rows"]) == 3
    assert data["diagnostics"]["target_dim"] == 2


def test_cli_reconstruct_failure_exit(tmp_path, capsys):
    space = ProjectiveSpace(2, make_field(3, 2))
    line = PointSet(space, Subspace(
        space, [(1, 0, 0), (0, 1, 0)]).point_ranks())
    path = str(tmp_path / "line.pts")
    formats.write_pointset(path, line)
    code, _, err = run_cli(capsys, "reconstruct", path, "--p0", "3")
    assert code == 1
    assert err.startswith("error: NoSublineSecantError:")


def test_cli_islinear(capsys, baer_file, tmp_path, baer):
    data = cli_json(capsys, "islinear", baer_file, "--p0", "3")
    assert data["linear"] and data["rank"] == 3
    assert data["certificate"]["reconstruct_succeeded"]
    assert len(data["witness_rows"]) == 3

    lines = traces_of(baer.points, 1)
    idx = int(np.nonzero(lines.sizes == 4)[0][0])
    row = lines.subspace_at(idx).point_ranks()
    on = [int(r) for r in row if r in baer.points]
    off = [int(r) for r in row if r not in baer.points]
    mutated = PointSet(baer.points.space,
                       [int(r) for r in baer.points.ranks
                        if r != on[0]] + [off[0]])
    bad = str(tmp_path / "mutated.pts")
    formats.write_pointset(bad, mutated)
    data = cli_json(capsys, "islinear", bad, "--p0", "3",
                    "--strategy", "exhaustive", expect=1)
    assert not data["linear"] and data["witness_rows"] is None


def test_cli_harness_shipped(capsys, tmp_path):
    out1 = str(tmp_path / "card1.json")
    out2 = str(tmp_path / "card2.json")
    code, _, _ = run_cli(capsys, "harness", "--instances", "baer_pg2_9",
                         "--threads", "1", "--out", out1)
    assert code == 0
    code, _, _ = run_cli(capsys, "harness", "--instances", "baer_pg2_9",
                         "--threads", "4", "--out", out2)
    assert code == 0
    assert open(out1, "rb").read() == open(out2, "rb").read()
    card = json.loads(open(out1).read())
    assert card["schema"] == "blockingsets-scorecard/1"
    assert card["summary"]["violated"] == 0
    assert {r["instance"] for r in card["checks"]} == {"baer_pg2_9"}


def test_cli_harness_rejects_unknown_names(capsys):
    code, _, err = run_cli(capsys, "harness", "--instances", "nope")
    assert code == 2 and "NotFoundError" in err
    code, _, err = run_cli(capsys, "harness", "--instances", "baer_pg2_9",
                           "--checks", "nope")
    assert code == 2 and "NotFoundError" in err


def test_cli_secants(capsys, baer_file):
    data = cli_json(capsys, "secants", baer_file, "--p0", "3")
    assert data["kappa"] == 4 and data["min_subline_secants"] == 4
    assert data["secant_size_counts"] == {"4": 13}
    assert len(data["per_point"]) == 13
    assert all(row["subline_secants"] == 4 and row["tangent_spaces"] == 6
               for row in data["per_point"])


def test_cli_project(tmp_path, capsys):
    space = ProjectiveSpace(2, make_field(3, 2))
    line = Subspace(space, [(1, 0, 0), (0, 1, 0)])
    from blockingsets.linearsets import enumerate_sublines
    sub = next(enumerate_sublines(line, 3))
    src = str(tmp_path / "subline.pts")
    formats.write_pointset(src, sub)
    img = str(tmp_path / "image.pts")
    data = cli_json(capsys, "project", src, "--out", img)
    assert data["source_size"] == 4 and data["image_size"] == 4
    image = formats.read_pointset(img)
    assert len(image) == 4
    cov = data["covector"]
    arr = np.asarray([space.coords_of(int(r)) for r in image.ranks])
    # image lies in the target hyperplane
    gf = space.field
    for row in arr:
        acc = 0
        for c, v in zip(cov, row):
            acc = gf.add(acc, gf.mul(c, int(v)))
        assert acc == 0


def test_cli_project_rejects_centre_in_set(tmp_path, capsys):
    space = ProjectiveSpace(2, make_field(3, 2))
    line = Subspace(space, [(1, 0, 0), (0, 1, 0)])
    from blockingsets.linearsets import enumerate_sublines
    sub = next(enumerate_sublines(line, 3))
    src = str(tmp_path / "subline.pts")
    formats.write_pointset(src, sub)
    code, _, err = run_cli(capsys, "project", src,
                           "--centre", str(int(sub.ranks[0])),
                           "--cov", "0,0,1")
    assert code == 2 and "CentreInSetError" in err


def test_cli_spread_dump(capsys):
    data = cli_json(capsys, "spread-dump", "--p", "3", "--t", "2",
                    "--n", "2", "--point", "0")
    assert data["h"] == 2 and data["p0"] == 3
    assert data["small"] == {"p": 3, "t": 1, "n": 5}
    assert data["element_dim"] == 1
    assert len(data["element_ranks"]) == 4
    assert data["spread_elements"] == 91


def test_cli_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert out.startswith("blockingsets ")
