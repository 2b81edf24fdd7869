import csv
import math
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from qhgeo import InputError, NormSpec, Polyline, PuncturedSpace, trace_ball
from qhgeo import experiments as ex
from qhgeo.balls import CheckReport
from qhgeo.cli import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, main
from qhgeo.domains import ConvexPolytope, HalfSpace, Polygon
from qhgeo.io import clip_polygon, emit_csv, emit_svg, parse_config, report_text

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
SVG = "{http://www.w3.org/2000/svg}"


# --- configuration ----------------------------------------------------------


def test_parse_config_basic():
    cfg = parse_config(
        """
        # comment line
        domain = punctured
        punctures = 0 0; 3, 0   # inline comment
        norm = inf
        center = 1 0.5
        seed = 18446744073709551615
        radii = 0.2 0.1
        """
    )
    assert cfg.seed == 2**64 - 1
    assert isinstance(cfg.domain(), PuncturedSpace)
    assert cfg.domain().punctures.tolist() == [[0.0, 0.0], [3.0, 0.0]]
    assert math.isinf(cfg.norm().p)
    assert cfg.get_point("center").tolist() == [1.0, 0.5]
    assert cfg.get_floats("radii") == [0.2, 0.1]
    assert cfg.metric().value == "k"


def test_parse_config_domains():
    assert isinstance(parse_config("domain = halfspace\nnormal = 0 1\noffset = 0").domain(), HalfSpace)
    poly = parse_config("domain = polytope\nfaces = 1 0 -1; -1 0 -1; 0 1 -1; 0 -1 -1").domain()
    assert isinstance(poly, ConvexPolytope) and poly.contains(np.array([0.5, 0.5]))
    assert isinstance(parse_config("domain = polygon\nvertices = 0 0; 2 0; 0 2").domain(), Polygon)
    ell = parse_config("domain = lshape\nrectangles = 0 0 2 1; 0 0 1 2").domain()
    assert ell.contains(np.array([0.5, 1.5])) and not ell.contains(np.array([1.5, 1.5]))


def test_parse_config_weighted_norm():
    n = parse_config("norm = 3\nweights = 1 2").norm()
    assert n == NormSpec(3.0, 2, (1.0, 2.0))


@pytest.mark.parametrize(
    "text",
    [
        "seed = -1",
        "seed = 18446744073709551616",
        "tol = 0",
        "grid_spacing = -0.1",
        "no delimiter here",
        "quad_tol = abc",
    ],
)
def test_parse_config_rejects(text):
    with pytest.raises(InputError):
        parse_config(text)


def test_config_accessor_errors():
    cfg = parse_config("domain = torus\nn = 2.5\nviewport = 0 0 -1 1\npts = 1 2; 3")
    with pytest.raises(InputError):
        cfg.domain()
    with pytest.raises(InputError):
        cfg.get_int("n")
    with pytest.raises(InputError):
        cfg.viewport()
    with pytest.raises(InputError):
        cfg.get_points("pts")
    with pytest.raises(InputError):
        cfg.require("missing")


# --- CSV --------------------------------------------------------------------


def _read(path):
    return Path(path).read_bytes().decode("utf-8").split("\r\n")[:-1]


def test_csv_trace_four_rays(tmp_path):
    tr = trace_ball(PuncturedSpace([[0.0, 0.0]]), NormSpec(2.0), "j", (1.0, 0.0), 0.3, n_rays=4)
    lines = _read(emit_csv(tr, tmp_path / "t.csv"))
    assert len(lines) == 5
    assert lines[0] == "angle,t_star,x0,x1,clipped"


def test_csv_polyline_rows(tmp_path):
    pl = Polyline([(0.0, 0.0), (1.0, 2.0), (0.1, 1 / 3)])
    lines = _read(emit_csv(pl, tmp_path / "p.csv"))
    assert len(lines) == 1 + 3
    # repr formatting round-trips exactly
    rows = list(csv.reader(lines[1:]))
    assert np.array_equal(np.array(rows, dtype=float), pl.vertices)


def test_csv_empty_violations(tmp_path):
    lines = _read(emit_csv(CheckReport("s", 1), tmp_path / "v.csv"))
    assert len(lines) == 1 and lines[0].startswith("center0,center1")
    assert len(_read(emit_csv([], tmp_path / "w.csv"))) == 1


def test_csv_report_and_errors(tmp_path):
    rep = ex.ReportDocument("demo")
    rep.record("x", 0.1 + 0.2)
    lines = _read(emit_csv(rep, tmp_path / "r.csv"))
    assert lines == ["quantity,value", "x,0.30000000000000004"]
    with pytest.raises(InputError):
        emit_csv(object(), tmp_path / "bad.csv")
    with pytest.raises(OSError):
        emit_csv(rep, tmp_path / "missing_dir" / "r.csv")


# --- SVG --------------------------------------------------------------------


def _labels(path):
    root = ET.parse(path).getroot()
    return root, [e.get("data-label") for e in root.iter() if e.get("data-label")]


def test_svg_counterexample_scene(tmp_path):
    rep = ex.run_counterexample()
    scene = rep.notes["scene"]
    out = emit_svg(
        tmp_path / "c.svg",
        scene["domain"],
        paths={"broken line": scene["paths"]["broken_line"]},
        points=scene["points"],
        extra_paths=[scene["paths"]["constrained"]],
        viewport=(-2, -3.5, 2, 0.5),
    )
    root, labels = _labels(out)
    assert root.tag == SVG + "svg" and root.get("version") == "1.1"
    assert sorted(labels) == sorted(["x", "a", "b", "c", "broken line"])


def test_svg_ball_trace_polygon(tmp_path):
    tr = trace_ball(PuncturedSpace([[0.0, 0.0]]), NormSpec(2.0), "j", (1.0, 0.0), 0.3, n_rays=16)
    root, labels = _labels(emit_svg(tmp_path / "b.svg", traces=[tr]))
    polys = root.findall(SVG + "polygon")
    assert len(polys) == 1 and len(polys[0].get("points").split()) == 16
    assert labels == []


def test_svg_empty(tmp_path):
    root, _ = _labels(emit_svg(tmp_path / "e.svg"))
    assert root.tag == SVG + "svg" and len(root) == 0
    assert root.get("viewBox")


def test_clip_polygon_half():
    sq = [np.array(p, float) for p in [(0, 0), (2, 0), (2, 2), (0, 2)]]
    out = clip_polygon(sq, np.array([1.0, 0.0]), -1.0)
    xs = sorted({round(float(p[0]), 12) for p in out})
    assert xs == [0.0, 1.0] and len(out) == 4


def test_report_text_lines():
    rep = ex.ReportDocument("demo", {"p": 2.0})
    rep.record("x", 1.5)
    rep.check("x_small", "x", "<=", 2.0)
    rep.notes["verdict"] = "fine"
    lines = report_text(rep).splitlines()
    assert lines[0] == "experiment: demo"
    assert "quantity.x: 1.5" in lines and "note.verdict: fine" in lines
    assert lines[-1] == "passed: true"
    assert all(": " in ln for ln in lines)


# --- command line -----------------------------------------------------------


def _write(tmp_path, text, name="c.cfg"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


@pytest.mark.parametrize(
    "cmd,cfg",
    [
        ("distance", "distance.cfg"),
        ("ball", "ball.cfg"),
        ("counterexample", "counterexample.cfg"),
        ("witness", "witness.cfg"),
        ("jball-intersection", "jball.cfg"),
        ("suite", "suite_fig3.cfg"),
    ],
)
def test_cli_shipped_configs_pass(tmp_path, capsys, cmd, cfg):
    assert main([cmd, "--config", str(CONFIGS / cfg), "--out-dir", str(tmp_path)]) == EXIT_PASS
    stem = cmd.replace("-", "_")
    assert (tmp_path / f"{stem}.txt").read_text().splitlines()[-1] == "passed: true"
    assert (tmp_path / f"{stem}_quantities.csv").exists()
    assert capsys.readouterr().out.strip() == f"{cmd}: pass"


def test_cli_counterexample_svg(tmp_path):
    main(["counterexample", "--config", str(CONFIGS / "counterexample.cfg"), "--out-dir", str(tmp_path)])
    _, labels = _labels(tmp_path / "counterexample.svg")
    assert len(labels) == 5


def test_cli_failing_verdict(tmp_path):
    # the l-infinity j-ball near the diagonal is not convex
    cfg = _write(tmp_path, "domain = punctured\npunctures = 0 0\nnorm = inf\nmetric = j\ncenter = 1 0.909\nradius = 0.2\n")
    assert main(["convex", "--config", str(cfg), "--out-dir", str(tmp_path)]) == EXIT_FAIL
    assert (tmp_path / "convex.txt").read_text().splitlines()[-1] == "passed: false"
    assert len(_read(tmp_path / "convex_violations.csv")) > 1


@pytest.mark.parametrize(
    "text",
    [
        "domain = punctured\npunctures = 0 0\ncenter = 0 0\nmetric = j\n",  # center on a puncture
        "domain = nowhere\ncenter = 1 1\n",
        "radius = -1\ndomain = punctured\npunctures = 0 0\ncenter = 1 0\n",
        "p = 0.5\n",
    ],
)
def test_cli_input_errors(tmp_path, text):
    cmd = "holder" if text.startswith("p =") else "ball"
    assert main([cmd, "--config", str(_write(tmp_path, text)), "--out-dir", str(tmp_path)]) == EXIT_INPUT


def test_cli_missing_config(tmp_path):
    assert main(["ball", "--config", str(tmp_path / "nope.cfg")]) == EXIT_INPUT


def test_cli_bad_seed_and_command():
    with pytest.raises(SystemExit) as e:
        main(["ball", "--config", "x", "--seed", "-3"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["bogus", "--config", "x"])
    assert e.value.code == 2


def test_cli_csv_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["holder", "--config", str(CONFIGS / "holder.cfg"), "--out-dir", str(d), "--seed", "5"]) == 0
    assert (a / "holder_quantities.csv").read_bytes() == (b / "holder_quantities.csv").read_bytes()
    assert (a / "holder.txt").read_bytes() == (b / "holder.txt").read_bytes()


def test_cli_seed_override_changes_output(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["jball-intersection", "--config", str(CONFIGS / "jball.cfg"), "--out-dir", str(a), "--seed", "1"])
    main(["jball-intersection", "--config", str(CONFIGS / "jball.cfg"), "--out-dir", str(b), "--seed", "2"])
    assert (a / "jball_intersection.txt").read_text() != (b / "jball_intersection.txt").read_text()


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "qhgeo.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "counterexample" in out.stdout
