import json

import pytest

from polyvis.cli import EXIT_LOAD, EXIT_OK, EXIT_OUTSIDE, main
from polyvis.mapio import save_map

from conftest import HOLE_RINGS, SQUARE_RINGS


@pytest.fixture(scope="module")
def maps(tmp_path_factory):
    from polyvis.environment import validate_and_normalize
    root = tmp_path_factory.mktemp("maps")
    hole = root / "holes.map"
    square = root / "square.map"
    save_map(validate_and_normalize(HOLE_RINGS), hole)
    save_map(validate_and_normalize(SQUARE_RINGS), square)
    return {"hole": str(hole), "square": str(square), "root": root}


def test_preprocess(maps, capsys):
    assert main(["preprocess", maps["hole"]]) == EXIT_OK
    out = capsys.readouterr().out
    assert "triangles: 8" in out
    assert "holes: 1" in out


def test_load_failure_exit_code(tmp_path, capsys):
    missing = str(tmp_path / "nope.map")
    assert main(["preprocess", missing]) == EXIT_LOAD
    bad = tmp_path / "bad.map"
    bad.write_text("MAP v9\n")
    assert main(["preprocess", str(bad)]) == EXIT_LOAD


def test_region_json(maps, capsys):
    assert main(["query", maps["square"], "--type", "region",
                 "--at", "5,5", "--json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"]["kind"] == "region"
    assert len(doc["result"]["polygon"]) == 4


def test_region_json_deterministic(maps, capsys):
    argv = ["query", maps["hole"], "--type", "region", "--at", "2,5",
            "--json"]
    assert main(argv) == EXIT_OK
    first = capsys.readouterr().out
    assert main(argv) == EXIT_OK
    assert capsys.readouterr().out == first


def test_query_outside_exit_code(maps, capsys):
    assert main(["query", maps["hole"], "--type", "region",
                 "--at", "5,5"]) == EXIT_OUTSIDE
    assert "null" in capsys.readouterr().out


def test_two_point_query(maps, capsys):
    assert main(["query", maps["hole"], "--type", "2pt", "--at", "2,5",
                 "--to", "8,5"]) == EXIT_OK
    assert "not visible" in capsys.readouterr().out
    assert main(["query", maps["hole"], "--type", "2pt", "--at", "2,5",
                 "--to", "5,2", "--json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"]["visible"] is True


def test_ray_query(maps, capsys):
    assert main(["query", maps["hole"], "--type", "ray", "--at", "2,5",
                 "--dir", "1,0", "--json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"]["point"] == [4.0, 5.0]


def test_vertices_query(maps, capsys):
    assert main(["query", maps["hole"], "--type", "vertices", "--at",
                 "2,5", "--json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["result"]["vertices"]) == 6


def test_range_flag(maps, capsys):
    assert main(["query", maps["square"], "--type", "region", "--at",
                 "5,5", "--range", "2", "--json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["result"]["polygon"]) == 360


def test_svg_output(maps, tmp_path, capsys):
    svg = tmp_path / "r.svg"
    assert main(["query", maps["hole"], "--type", "region", "--at", "2,5",
                 "--svg", str(svg), "--json"]) == EXIT_OK
    capsys.readouterr()
    assert svg.read_text().startswith("<?xml")


def test_genpoints_and_bench(maps, tmp_path, capsys):
    out = tmp_path / "pts"
    assert main(["genpoints", maps["hole"], "--seed", "5", "--count", "4",
                 "--out", str(out)]) == EXIT_OK
    capsys.readouterr()
    files = sorted(p.name for p in out.iterdir())
    assert files == ["BB.points", "In.points", "Mid.points",
                     "NearM.points", "NearV.points", "Ver.points"]

    # determinism across runs
    out2 = tmp_path / "pts2"
    assert main(["genpoints", maps["hole"], "--seed", "5", "--count", "4",
                 "--out", str(out2)]) == EXIT_OK
    capsys.readouterr()
    for name in files:
        assert (out / name).read_bytes() == (out2 / name).read_bytes()

    report = tmp_path / "report.csv"
    summary = tmp_path / "summary.csv"
    assert main(["bench", maps["hole"], "--points", str(out),
                 "--watchdog", "30", "--report", str(report),
                 "--summary", str(summary)]) == EXIT_OK
    capsys.readouterr()
    lines = report.read_text().strip().split("\n")
    assert lines[0] == ("map,set_kind,point_index,x,y,behavior,"
                        "t_locate_us,t_query_us,triangles_traversed")
    assert len(lines) == 1 + 6 * 4
    head = summary.read_text().split("\n")[0]
    assert head == ("impl,init_us_mean,init_us_std,prep_us_mean,"
                    "prep_us_std,query_us_mean,query_us_std,pl_percent")


def test_selftest(maps, capsys):
    assert main(["selftest", maps["hole"], "--queries", "25"]) == EXIT_OK
    assert "25/25" in capsys.readouterr().out


def test_eps_flags(maps, capsys):
    # with an empty epsilon ladder a point just outside is rejected
    assert main(["--eps1", "", "--eps2", "0", "query", maps["square"],
                 "--type", "region", "--at", "5,-1e-12", "--json"]) \
        == EXIT_OUTSIDE
    capsys.readouterr()
    assert main(["query", maps["square"], "--type", "region",
                 "--at", "5,-1e-12", "--json"]) == EXIT_OK
