import json
import subprocess
import sys

import pytest

from conftest import FIXTURES, fixture, manifest
from dimer.cli import main, stable_bundle, verdict_bundle
from dimer.model import dumps, is_isomorphic, load, loads
from dimer import generators as g


def run(*args, stdin=None):
    return subprocess.run([sys.executable, "-m", "dimer.cli", *args], input=stdin,
                          capture_output=True, text=True, timeout=600)


def generated(family, *extra):
    out = run("generate", family, *extra)
    assert out.returncode == 0, out.stderr
    return out.stdout


def test_generate_then_check_tri_disk():
    res = run("check", "--length", "6", stdin=generated("tri_disk"))
    assert res.returncode == 0
    assert "strand-consistent: yes; path-consistent up to 6: yes; verdicts agree" in res.stdout


def test_check_tri_sphere_reports_interior_cycle():
    res = run("check", stdin=generated("tri_sphere"))
    assert res.returncode == 0
    assert "strand-consistent: no (interior cycle witness)" in res.stdout


def test_no_verdict_still_exits_zero():
    res = run("check", str(FIXTURES / "models" / "non_consistent_disk.json"))
    assert res.returncode == 0 and "strand-consistent: no" in res.stdout


def test_batch_square_tori():
    res = run("batch", "--family", "square_torus", "--m", "1..3", "--n", "1..3", "--json")
    assert res.returncode == 0, res.stderr
    bundles = json.loads(res.stdout)
    assert len(bundles) == 9
    assert all(b["strand_consistent"] == "yes" for b in bundles)
    assert all(b["verdicts"] == "agree" for b in bundles)


def test_parse_error_has_position():
    res = run("validate", stdin='{"name": "x",\n "vertices": [}')
    assert res.returncode != 0
    assert "line 2" in res.stderr and "column" in res.stderr


def test_unknown_key_is_named():
    d = json.loads(generated("tri_disk"))
    d["extra"] = 1
    res = run("validate", stdin=json.dumps(d))
    assert res.returncode != 0 and "extra" in res.stderr


def test_invalid_model_exits_nonzero(tmp_path):
    d = json.loads(generated("tri_disk"))
    d["faces"][0]["arrows"] = ["a", "b"]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(d))
    res = run("validate", str(p))
    assert res.returncode != 0 and "face cycle not closed" in res.stdout + res.stderr


def test_generate_is_canonical():
    assert generated("c3_torus") == dumps(g.c3_torus())
    assert loads(generated("square_torus", "--m", "2", "--n", "2")).name == "square_torus_2x2"


def test_reduce_writes_model_and_log(tmp_path):
    out, log = tmp_path / "red.json", tmp_path / "log.json"
    assert main(["reduce", str(FIXTURES / "models" / "subdivided_square_disk_3.json"),
                 "-o", str(out), "--log", str(log)]) == 0
    assert is_isomorphic(load(out), g.square_disk())
    assert len(json.loads(log.read_text())["steps"]) == 3


def test_submodel_command(tmp_path, capsys):
    out = tmp_path / "sub.json"
    sph = FIXTURES / "models" / "tri_sphere.json"
    cc = next(f.id for f in fixture("tri_sphere").faces.values() if f.orientation == "cc")
    assert main(["submodel", str(sph), "--faces", cc, "-o", str(out)]) == 0
    assert is_isomorphic(load(out), g.tri_disk())


def test_equiv_and_normal(capsys):
    c3 = str(FIXTURES / "models" / "c3_torus.json")
    assert main(["equiv", c3, "--path", "v:x,y", "--path", "v:y,x", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["answer"] == "yes"
    assert main(["equiv", c3, "--path", "v:x", "--path", "v:y"]) == 0
    assert "no" in capsys.readouterr().out
    assert main(["normal", c3, "--path", "v:x,y,z", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["normal_form"]["c_value"] == 1


def test_matchings_and_grade(capsys):
    con = str(FIXTURES / "models" / "conifold_torus.json")
    assert main(["matchings", con, "--count"]) == 0
    assert "4" in capsys.readouterr().out
    assert main(["matchings", con, "--enumerate", "--json"]) == 0
    assert len(json.loads(capsys.readouterr().out)["matchings"]) == 4
    assert main(["grade", con, "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["face_degree"] == 4
    holed = str(FIXTURES / "models" / "holed_torus.json")
    assert main(["matchings", holed]) == 0
    assert "adjacent only to" in capsys.readouterr().out


def test_cover_and_surface(tmp_path, capsys):
    out = tmp_path / "cover.json"
    assert main(["cover", str(FIXTURES / "models" / "c3_torus.json"), "--radius", "2", "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert "covering" in data
    assert main(["surface", str(out), "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["classification"] == "disk"


def test_svg_is_deterministic(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    src = str(FIXTURES / "models" / "grid_disk_2x2.json")
    assert main(["svg", src, "--seed", "3", "-o", str(a)]) == 0
    assert main(["svg", src, "--seed", "3", "-o", str(b)]) == 0
    assert a.read_text() == b.read_text() and a.read_text().startswith("<svg")
    assert main(["strands", str(FIXTURES / "models" / "c3_torus.json"), "--svg", str(a)]) == 0
    assert "polyline" in a.read_text()


@pytest.mark.parametrize("name", ["tri_disk", "c3_torus", "bad_annulus", "holed_torus", "wheel_disk_4"])
def test_bundles_match_manifest(name):
    entry = dict(manifest()["models"][name])
    entry.pop("file")
    entry.pop("oracle_matching_count", None)
    assert stable_bundle(verdict_bundle(fixture(name))) == entry
