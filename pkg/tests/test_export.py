"""Tests for SVG tilings, DOT Cayley graphs and JSON reports."""

import json
import re

import numpy as np
import pytest
from coxeter_walls.coxeter import normal_form
from coxeter_walls.errors import DimensionNotTwo
from coxeter_walls.export import (
    IDENTITY_FILL,
    cayley_dot,
    chambers_in_window,
    export_tiling,
    report_json,
    result_to_dict,
    to_jsonable,
)
from coxeter_walls.geometry import apply
from coxeter_walls.models import INFINITY, CheckResult, GeneratorSubset, RunReport

POLYGON_FILL = re.compile(r'<polygon points="[^"]*" fill="([^"]+)">')


def test_tiling_needs_the_plane(real_dihedral):
    """Only 2-dimensional realizations can be drawn."""
    with pytest.raises(DimensionNotTwo, match="dimension 1"):
        export_tiling(real_dihedral, 3.0)


def test_tiling_is_deterministic(real_a2t):
    """The same arguments give byte-identical SVG."""
    assert export_tiling(real_a2t, 2.0) == export_tiling(real_a2t, 2.0)


def test_tiling_draws_each_chamber_once(real_a2t):
    """One polygon per chamber in the window, with the identity highlighted."""
    svg = export_tiling(real_a2t, 2.0)
    fills = POLYGON_FILL.findall(svg)
    assert len(fills) == len(chambers_in_window(real_a2t, 2.0))
    assert fills.count(IDENTITY_FILL) == 1
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def test_chambers_in_window_cover_the_disc(real_a1t_a1t):
    """Every unit square with a centre within window + diam of x0 is found."""
    found = chambers_in_window(real_a1t_a1t, 2.0)
    centres = np.array([apply(real_a1t_a1t, e, real_a1t_a1t.basepoint) for e in found])
    assert np.all(np.linalg.norm(centres - real_a1t_a1t.basepoint, axis=1) <= 2.0 + np.sqrt(2) + 1e-9)
    # centres lie on the lattice (0.5, 0.5) + Z^2
    expected = sum(1 for i in range(-4, 5) for j in range(-4, 5) if np.hypot(i, j) <= 2.0 + np.sqrt(2))
    assert len(found) == expected


def test_tiling_colours_cosets(real_a1t_a1t):
    """Chambers of one horizontal strip v W_{0,1} C share a fill."""
    svg = export_tiling(real_a1t_a1t, 3.0, T=GeneratorSubset.of(0, 1))
    fills = POLYGON_FILL.findall(svg)
    found = chambers_in_window(real_a1t_a1t, 3.0)
    rows = [round(float(apply(real_a1t_a1t, e, real_a1t_a1t.basepoint)[1]), 6) for e in found]
    assert len(set(fills)) == len(set(rows))
    by_row: dict[float, set[str]] = {}
    for row, fill in zip(rows, fills):
        by_row.setdefault(row, set()).add(fill)
    assert all(len(colours) == 1 for colours in by_row.values())


def test_tiling_overlay(real_a1t_a1t, a1t_a1t):
    """The overlay is the segment plus a polyline through l(w) + 1 orbit points."""
    w = normal_form(a1t_a1t, [0, 1, 0, 1, 0, 1])
    svg = export_tiling(real_a1t_a1t, 3.0, w=w)
    assert svg.count("<line ") == 1
    polyline = re.search(r'<polyline points="([^"]+)"', svg).group(1)
    assert len(polyline.split()) == 7


def test_cayley_dot_a2(a2):
    """S3 with two generators: six vertices, six edges."""
    dot = cayley_dot(a2, 3)
    lines = dot.splitlines()
    assert lines[0] == "graph cayley"
    assert sum(1 for line in lines if "[label=" in line and "--" not in line) == 6
    assert sum(1 for line in lines if " -- " in line) == 6


def test_cayley_dot_skips_edges_leaving_the_ball(dihedral):
    """Edges to elements outside the ball are dropped."""
    dot = cayley_dot(dihedral, 2)
    assert sum(1 for line in dot.splitlines() if " -- " in line) == 4
    assert 'n0 -- n1 [label="0"];' in dot


def test_to_jsonable(a2):
    """Elements become words, subsets sorted lists, infinity a string."""
    value = {
        "w": normal_form(a2, [1, 0]),
        "T": GeneratorSubset.of(2, 0),
        "m": INFINITY,
        "x": np.float64(0.1) + np.float64(0.2),
        "v": np.array([1, 2]),
        "ok": np.bool_(True),
    }
    out = to_jsonable(value)
    assert out == {"w": [1, 0], "T": [0, 2], "m": "inf", "x": 0.3, "v": [1, 2], "ok": True}
    json.dumps(out)


def test_result_to_dict(a2):
    """Results carry check, pass, data and witness."""
    result = CheckResult(check="lemma0", passed=False, data={"radius": 5}, witness=(normal_form(a2, [0]), 1))
    assert result_to_dict(result) == {"check": "lemma0", "pass": False, "data": {"radius": 5}, "witness": [[0], 1]}


def test_report_json_elapsed():
    """elapsed is only written when timing was requested."""
    report = RunReport(command="order", system="abc", parameters={"radius": 3})
    doc = json.loads(report_json(report))
    assert "elapsed" not in doc
    assert doc["pass"] is False
    report.elapsed = 1.23456
    assert json.loads(report_json(report))["elapsed"] == 1.235
