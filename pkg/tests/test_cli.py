import csv
import io
import json

import pytest

from cubekappa import build_complex, save_complex
from cubekappa.cli import UsageError, main, parse_c_grid
from cubekappa.corpus import _tree_ball_edges


def run(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def ex42(tmp_path, capsys):
    path = tmp_path / "ex42.json"
    assert run(["generate", "--family", "example42", "--depth", "3", "--out", str(path)], capsys)[0] == 0
    return path


@pytest.fixture
def tree(tmp_path, capsys):
    path = tmp_path / "tree.json"
    assert run(["generate", "--family", "tree_ball", "--valence", "3", "--d", "8", "--out", str(path)], capsys)[0] == 0
    return path


@pytest.fixture
def grid(tmp_path, capsys):
    path = tmp_path / "grid.json"
    assert run(["generate", "--family", "grid", "--n", "8", "--out", str(path)], capsys)[0] == 0
    return path


def test_generate(tmp_path, capsys, grid, ex42):
    doc = json.loads(grid.read_text())
    assert len(doc["vertices"]) == 81
    assert "b" in json.loads(ex42.read_text())["paths"]
    code, out, _ = run(["generate", "--family", "grid", "--n", "2"], capsys)
    assert code == 0 and json.loads(out)["name"] == "grid-2"


@pytest.mark.parametrize("argv", [
    ["generate", "--family", "torus", "--n", "3"],
    ["generate", "--family", "grid"],
    ["generate", "--family", "grid", "--n", "1"],
    ["generate", "--family", "example42", "--depth", "9"],
    [],
    ["frobnicate"],
])
def test_generate_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 1


def test_separation_table(ex42, capsys):
    code, out, _ = run(["analyze", str(ex42), "--analysis", "separation-table"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert ("14", "6") in {(r["crossing_count"], r["well_separation"]) for r in rows}
    assert ("6", "4") in {(r["crossing_count"], r["well_separation"]) for r in rows}


def test_divergence_tree(tree, capsys):
    code, out, _ = run(["analyze", str(tree), "--analysis", "divergence", "--path", "radial",
                        "--kappa", "constant", "--r-max", "3"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and all(r["raw"] == "inf" for r in rows)


def test_excursion_grid_infeasible(grid, capsys):
    code, out, _ = run(["analyze", str(grid), "--analysis", "excursion", "--path", "diagonal",
                        "--c-grid", "0.5:1:0.5", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["summary"]["feasible"] is False
    assert doc["summary"]["excursion_constant"] == "none up to grid max"


@pytest.mark.parametrize("analysis", ["contraction", "slimness", "divergence", "excursion",
                                      "contact-progress", "wellsep-progress", "separation-table"])
def test_every_analysis_is_deterministic(analysis, ex42, capsys):
    argv = ["analyze", str(ex42), "--analysis", analysis, "--format", "json", "--k", "4",
            "--c-grid", "1:6:1"]
    first = run(argv, capsys)
    second = run(argv, capsys)
    assert first[0] == 0 and first == second
    doc = json.loads(first[1])
    assert doc["analysis"] == analysis and doc["summary"]["geodesic"] == "b"


def test_out_file(ex42, tmp_path, capsys):
    out = tmp_path / "report.csv"
    code, stdout, _ = run(["analyze", str(ex42), "--analysis", "contact-progress", "--out", str(out)], capsys)
    assert code == 0 and stdout == ""
    assert out.read_text().startswith("geodesic,parameter,raw,strongly_separated")


def ball_times_square_segment(path):
    """F2 ball of radius 2 times an edge times a path of length 3; the walls
    crossing two vertical walls include crossing pairs, so the search runs."""
    n_tree, tree_edges, _ = _tree_ball_edges(4, 2)

    def vid(v, h, z):
        return (2 * z + h) * n_tree + v

    edges = []
    for z in range(4):
        for h in range(2):
            edges += [(vid(u, h, z), vid(v, h, z)) for u, v in tree_edges]
            if h == 0:
                edges += [(vid(v, 0, z), vid(v, 1, z)) for v in range(n_tree)]
            if z < 3:
                edges += [(vid(v, h, z), vid(v, h, z + 1)) for v in range(n_tree)]
    cc = build_complex(range(8 * n_tree), edges, 0, paths={"vertical": [vid(0, 0, z) for z in range(4)]})
    save_complex(cc, path)


def test_inexact_exit_code(tmp_path, capsys):
    path = tmp_path / "prod.json"
    ball_times_square_segment(path)
    argv = ["analyze", str(path), "--analysis", "separation-table", "--path", "vertical", "--format", "json"]
    code, out, _ = run(argv + ["--budget", "2"], capsys)
    assert code == 3
    assert json.loads(out)["summary"]["exact"] is False
    code, out, _ = run(argv, capsys)
    assert code == 0
    assert {r["well_separation"] for r in json.loads(out)["rows"]} == {5}


@pytest.mark.parametrize("extra", [["--kappa", "power:2"], ["--kappa", "cubic"], ["--c-grid", "5:1:1"],
                                   ["--c-grid", "x"], ["--r-min", "0"], ["--analysis", "nope"]])
def test_analyze_usage_errors(extra, ex42, capsys):
    argv = ["analyze", str(ex42), "--analysis", "contraction"] + extra
    assert run(argv, capsys)[0] == 1


def test_missing_geodesic(ex42, capsys):
    code, _, err = run(["analyze", str(ex42), "--analysis", "contraction", "--path", "nope"], capsys)
    assert code == 2 and "nope" in err


def test_no_admissible_divergence(tmp_path, capsys):
    path = tmp_path / "t.json"
    run(["generate", "--family", "tree_ball", "--d", "2", "--out", str(path)], capsys)
    code, _, _ = run(["analyze", str(path), "--analysis", "divergence", "--path", "radial",
                      "--kappa", "constant", "--r-min", "3", "--r-max", "3"], capsys)
    assert code == 2


def test_verify_pass(ex42, capsys):
    code, out, _ = run(["verify", str(ex42)], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_verify_removed_edge(grid, capsys):
    doc = json.loads(grid.read_text())
    # drop the edge (1,1)-(2,1) of the 9x9 grid, opening a 6-cycle
    doc["edges"].remove([10, 11])
    grid.write_text(json.dumps(doc))
    code, out, _ = run(["verify", str(grid)], capsys)
    assert code == 2
    assert out.startswith("FAIL median")


def test_verify_empty_and_missing(tmp_path, capsys):
    empty = tmp_path / "empty.json"
    empty.write_text("")
    code, out, _ = run(["verify", str(empty)], capsys)
    assert code == 2 and out.startswith("FAIL load")
    assert run(["verify", str(tmp_path / "absent.json")], capsys)[0] == 2


def test_verify_duplicate_edge(tmp_path, capsys):
    path = tmp_path / "dup.json"
    path.write_text(json.dumps({"basepoint": 0, "vertices": [0, 1], "edges": [[0, 1], [0, 1]]}))
    code, out, _ = run(["verify", str(path)], capsys)
    assert code == 2 and out.startswith("FAIL duplicate-edge")


def test_parse_c_grid():
    assert parse_c_grid("0.5:2:0.5") == [0.5, 1.0, 1.5, 2.0]
    assert len(parse_c_grid("0.5:20:0.5")) == 40
    with pytest.raises(UsageError):
        parse_c_grid("1:2")
