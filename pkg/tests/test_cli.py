"""Tests for the coxeter-walls command line."""

import hashlib
import json

import pytest
from coxeter_walls.cli import build_parser, run


def run_json(capsys, *argv):
    """Run a command and parse the report it printed."""
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


def test_reduce(capsys):
    """reduce prints the normal form, its length, and whether the input was reduced."""
    code, report = run_json(capsys, "reduce", "--system", "a2t", "--word", "0,1,0,0")
    assert code == 0
    assert report["pass"] is True
    assert report["command"] == "reduce"
    assert report["parameters"] == {"system": "a2t", "word": [0, 1, 0, 0]}
    data = report["results"][0]["data"]
    assert data == {"nf": [0, 1], "length": 2, "input_reduced": False}
    assert len(report["system"]) == 16


def test_system_given_by_file_name(capsys):
    """Bundled systems also resolve with their .cox extension."""
    code, report = run_json(capsys, "spherical", "--system", "a2t.cox", "--subset", "0,1")
    assert code == 0
    data = report["results"][0]["data"]
    assert data["spherical"] is True
    assert data["order"] == 6
    assert data["exact"] is True


def test_system_given_by_path(capsys, tmp_path):
    """Any .cox file on disk can be loaded."""
    path = tmp_path / "b2.cox"
    path.write_text("rank 2\n1 4\n4 1\n")
    code, report = run_json(capsys, "spherical", "--system", str(path), "--subset", "0,1")
    assert code == 0
    assert report["results"][0]["data"]["order"] == 8
    assert report["parameters"]["system"] == "b2"


def test_missing_word(capsys):
    """A command without its required flag exits 2 with a message."""
    assert run(["reduce", "--system", "a2t"]) == 2
    assert "Error: --word is required for reduce" in capsys.readouterr().err


def test_unknown_system(capsys):
    """Unknown systems are input errors."""
    assert run(["validate", "--system", "no_such_system"]) == 2
    assert "System not found" in capsys.readouterr().err


def test_invalid_matrix(capsys, tmp_path):
    """Matrix validation errors name the offending entry."""
    path = tmp_path / "bad.cox"
    path.write_text("rank 2\n1 3\n4 1\n")
    assert run(["validate", "--system", str(path)]) == 2
    assert "m(0,1)" in capsys.readouterr().err


def test_fractional_radius_for_ball(capsys):
    """Ball radii must be integers."""
    assert run(["ball", "--system", "a2", "--radius", "2.5"]) == 2
    assert "non-negative integer" in capsys.readouterr().err


def test_subset_out_of_range(capsys):
    """Subset indices are checked against the rank."""
    assert run(["spherical", "--system", "a2", "--subset", "0,3"]) == 2
    assert "--subset index 3" in capsys.readouterr().err


def test_argparse_errors_return_two():
    """A missing command is reported by argparse with exit status 2."""
    assert run([]) == 2


def test_failed_check_exits_one(capsys, monkeypatch):
    """A failing check sets pass to false and the exit status to 1."""
    monkeypatch.setattr("coxeter_walls.cli.check_lemma22", lambda w, T, radius: False)
    code, report = run_json(capsys, "coset", "--system", "a2t", "--word", "0,1,2", "--subset", "0")
    assert code == 1
    assert report["pass"] is False
    assert report["results"][0]["witness"] == [0, 1, 2]


def test_coset(capsys):
    """coset splits w = v x."""
    code, report = run_json(capsys, "coset", "--system", "a2", "--word", "0,1", "--subset", "0")
    assert code == 0
    data = report["results"][0]["data"]
    assert data["v"] == [0]
    assert data["x"] == [1]
    assert data["len_v"] + data["len_x"] == 2


def test_validate(capsys):
    """validate reports sphericity and whether the system is affine."""
    code, report = run_json(capsys, "validate", "--system", "a2")
    assert code == 0
    data = report["results"][0]["data"]
    assert data["spherical"] is True
    assert data["order"] == 6
    assert data["affine"] is False
    code, report = run_json(capsys, "validate", "--system", "a1t_a1t")
    data = report["results"][0]["data"]
    assert data["affine"] is True
    assert data["dim"] == 2
    assert data["m"] == [[1, 0, 2, 2], [0, 1, 2, 2], [2, 2, 1, 0], [2, 2, 0, 1]]


def test_ball_artifact(capsys, tmp_path):
    """ball writes one JSON line per element when --artifact is given."""
    artifact = tmp_path / "ball.jsonl"
    code, report = run_json(capsys, "ball", "--system", "a2t", "--radius", "2", "--artifact", str(artifact))
    assert code == 0
    data = report["results"][0]["data"]
    assert data["sizes"] == [1, 4, 10]
    lines = artifact.read_text().splitlines()
    assert len(lines) == 10
    assert json.loads(lines[-1])["len"] == 2
    assert data["sha256"] == hashlib.sha256(artifact.read_bytes()).hexdigest()


def test_cayley_dot_needs_artifact(capsys):
    """Side artifacts are never mixed into the JSON report on stdout."""
    assert run(["cayley-dot", "--system", "a2"]) == 2
    assert "needs --artifact" in capsys.readouterr().err


def test_tiling_svg(capsys, tmp_path):
    """tiling-svg writes the picture and reports the chamber count."""
    artifact = tmp_path / "tiling.svg"
    code, report = run_json(
        capsys,
        "tiling-svg", "--system", "a2t", "--radius", "2", "--subset", "0,1", "--word", "0,1,2,0",
        "--artifact", str(artifact),
    )
    assert code == 0
    assert artifact.read_text().startswith("<svg")
    assert report["results"][0]["data"]["chambers"] > 6


def test_tiling_svg_needs_the_plane(capsys, tmp_path):
    """The line has no tiling picture."""
    assert run(["tiling-svg", "--system", "dihedral_inf", "--artifact", str(tmp_path / "t.svg")]) == 2
    assert "dimension 1" in capsys.readouterr().err


def test_order_and_wset(capsys):
    """Infinite orders print as 'inf'; wset lists the words ending in s0."""
    code, report = run_json(capsys, "order", "--system", "dihedral_inf", "--word", "0,1")
    assert report["results"][0]["data"]["order"] == "inf"
    code, report = run_json(capsys, "wset", "--system", "a2", "--generator", "0", "--radius", "3")
    assert report["results"][0]["data"]["elements"] == [[0], [1, 0]]


def test_qdensity(capsys):
    """Quasi-density in the infinite dihedral group, with and without s0."""
    code, report = run_json(capsys, "qdensity", "--system", "dihedral_inf", "--radius", "5")
    assert code == 0
    assert report["results"][0]["data"]["worst_distance"] == 1
    code, report = run_json(capsys, "qdensity", "--system", "dihedral_inf", "--radius", "5", "--generator", "0")
    data = report["results"][0]["data"]
    assert data["worst_distance"] == 1
    assert data["infinite_partner"] == 1


def test_structure_commands(capsys):
    """max-spherical, essential, split-check, finite-index and cor17 on affine A2."""
    _, report = run_json(capsys, "max-spherical", "--system", "a2t")
    assert report["results"][0]["data"]["subsets"] == [[0, 1], [0, 2], [1, 2]]
    _, report = run_json(capsys, "essential", "--system", "a1t_a1t", "--subset", "0,1,2")
    assert report["results"][0]["data"]["essential"] == [0, 1]
    _, report = run_json(capsys, "split-check", "--system", "a1t_a1t", "--subset", "0,1")
    assert report["results"][0]["data"]["splits"] is True
    _, report = run_json(capsys, "finite-index", "--system", "a2t", "--subset", "0,1")
    assert report["results"][0]["data"]["finite_index"] is False
    _, report = run_json(capsys, "cor17", "--system", "a2t")
    assert report["results"][0]["data"] == {"found": False}


def test_verify_sweeps(capsys):
    """verify runs one sweep and reports its parameters."""
    code, report = run_json(capsys, "verify", "lemma22", "--system", "a2t", "--radius", "3")
    assert code == 0
    assert report["parameters"]["target"] == "lemma22"
    code, report = run_json(capsys, "verify", "geodesic", "--system", "dihedral_inf", "--radius", "4")
    assert code == 0
    assert report["results"][0]["data"]["max_d_h"] == pytest.approx(0.0, abs=1e-9)


def test_verify_lemma1_on_one_subset(capsys):
    """--subset limits the conjugate half-space sweep to W_T."""
    code, report = run_json(capsys, "verify", "lemma1", "--system", "a2t", "--radius", "3", "--subset", "0,1")
    assert code == 0
    assert report["results"][0]["data"]["subsets"] == 1


def test_verify_halfspace_fails_below_certified_radius(capsys):
    """A truncation radius that cannot bound the walls exits 1."""
    argv = ["verify", "halfspace", "--system", "a2t", "--radius", "1", "--subset", "0,1", "--trials", "100"]
    code, report = run_json(capsys, *argv)
    assert code == 1
    assert report["results"][0]["data"]["uncertified"] == [[0, 1]]


def test_verify_limits_needs_subset(capsys):
    """limits and rays need --subset."""
    assert run(["verify", "limits", "--system", "a2t"]) == 2
    assert "--subset is required" in capsys.readouterr().err


def test_out_and_timing(capsys, tmp_path):
    """--out writes the report to a file and --timing adds elapsed seconds."""
    out = tmp_path / "report.json"
    assert run(["reduce", "--system", "a2", "--word", "1,0,1", "--out", str(out), "--timing"]) == 0
    assert capsys.readouterr().out == ""
    report = json.loads(out.read_text())
    assert report["elapsed"] >= 0
    assert report["results"][0]["data"]["nf"] == [0, 1, 0]


def test_seed_is_reported(capsys):
    """The seed used by randomized checks is part of the report."""
    _, report = run_json(capsys, "reduce", "--system", "a2", "--word", "0", "--seed", "7")
    assert report["seed"] == 7


def test_every_command_has_help():
    """Each subcommand documents itself."""
    parser = build_parser()
    subparsers = next(a for a in parser._actions if a.dest == "command")
    assert all(help_action.help for help_action in subparsers._choices_actions)
