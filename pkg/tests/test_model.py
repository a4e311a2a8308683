import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fixture, fixture_names
from dimer import generators as g
from dimer.model import (CC, CL, DimerModel, ModelError, NoSuchFace, Path, dumps, face_path, is_isomorphic,
                         iter_paths, loads, model_from_dict, return_path, rotation_system, surface_info,
                         validate)

TRI = {"a": ("1", "2"), "b": ("2", "3"), "c": ("3", "1")}


def test_tri_disk_is_valid():
    assert validate(g.tri_disk()).ok


def test_open_face_cycle_is_reported():
    bad = DimerModel.build(TRI, {"F": (CC, ["a", "b"])}, name="open")
    report = validate(bad)
    assert not report.ok
    assert any(v.message == "face cycle not closed" for v in report.violations)


def test_tri_sphere_is_valid():
    assert validate(g.tri_sphere()).ok


def test_face_of_length_one_is_rejected():
    loop = DimerModel.build({"x": ("v", "v")}, {"F": (CC, ["x"]), "G": (CL, ["x"])}, name="loop")
    assert not validate(loop).ok


def test_arrow_twice_in_one_orientation_is_rejected():
    m = DimerModel.build(TRI, {"F": (CC, ["a", "b", "c"]), "G": (CC, ["a", "b", "c"])}, name="twice")
    assert not validate(m).ok


def test_checked_raises_on_invalid():
    with pytest.raises(ModelError):
        DimerModel.build(TRI, {"F": (CC, ["a", "b"])}, name="open").checked()


@pytest.mark.parametrize("model, chi, b, genus, kind", [
    (g.tri_disk(), 1, 1, 0, "disk"),
    (g.tri_sphere(), 2, 0, 0, "sphere"),
    (g.c3_torus(), 0, 0, 1, "torus"),
    (g.conifold_torus(), 0, 0, 1, "torus"),
    (g.ring_annulus(4), 0, 2, 0, "annulus"),
    (g.holed_torus(), -1, 1, 1, "other(g=1,b=1)"),
])
def test_surface_info(model, chi, b, genus, kind):
    s = surface_info(model)
    assert (s.euler_characteristic, s.boundary_components, s.genus, s.classification) == (chi, b, genus, kind)


def test_return_paths():
    assert return_path(g.tri_disk(), "a", CC).arrows == ("b", "c")
    assert return_path(g.digon_disk(), "a", CC).arrows == ("b",)
    with pytest.raises(NoSuchFace):
        return_path(g.digon_disk(), "a", CL)


def test_face_paths():
    assert face_path(g.tri_disk(), "1").arrows == ("a", "b", "c")
    assert face_path(g.c3_torus(), "v").arrows == ("x", "y", "z")
    assert face_path(g.digon_disk(), "2").arrows == ("b", "a")


def test_rotation_examples():
    rot = rotation_system(g.tri_disk())["1"]
    assert not rot.cyclic and rot.ends == (("in", "c"), ("out", "a"))
    assert rotation_system(g.tri_sphere())["1"].cyclic
    assert len(rotation_system(g.c3_torus())["v"].ends) == 6


def test_paths_need_composable_arrows():
    m = g.tri_disk()
    assert m.path("1", ["a", "b"]) == Path("1", ("a", "b"), "3")
    with pytest.raises(ValueError):
        m.path("1", ["b"])


def test_unknown_json_keys_are_rejected():
    d = json.loads(dumps(g.tri_disk()))
    d["colour"] = "red"
    with pytest.raises(ModelError):
        model_from_dict(d)


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_invariants(name):
    m = fixture(name)
    assert validate(m).ok
    s = surface_info(m)
    assert s.euler_characteristic == len(m.vertices) - len(m.arrows) + len(m.faces)
    assert (s.boundary_components == 0) == (not m.boundary_arrows)
    for v, rot in rotation_system(m).items():
        ends = [("out", a) for a in m.out_arrows[v]] + [("in", a) for a in m.in_arrows[v]]
        assert sorted(rot.ends) == sorted(ends)
    for a in m.internal_arrows:
        for side in (CC, CL):
            cycle = (a,) + return_path(m, a, side).arrows
            face = m.face_at(a, side)
            k = face.arrows.index(a)
            assert cycle == face.arrows[k:] + face.arrows[:k]


@pytest.mark.parametrize("name", fixture_names())
def test_json_round_trip_is_byte_identical(name):
    text = (__import__("conftest").FIXTURES / "models" / f"{name}.json").read_text()
    m = loads(text)
    assert dumps(m) == text
    assert dumps(loads(dumps(m))) == dumps(m)


def test_isomorphism_ignores_names():
    m = g.tri_disk()
    renamed = DimerModel.build({"p": ("x", "y"), "q": ("y", "z"), "r": ("z", "x")},
                               {"G": (CC, ["q", "r", "p"])}, name="other")
    assert is_isomorphic(m, renamed)
    assert not is_isomorphic(m, g.tri_sphere())


def test_iter_paths_counts_on_c3():
    m = g.c3_torus()
    assert sum(1 for p in iter_paths(m, 3) if len(p) == 3) == 27


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3))
def test_generated_tori_validate(m, n):
    for model in (g.c3_torus(m, n), g.square_torus(m, n)):
        assert validate(model).ok
        assert surface_info(model).classification == "torus"


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_spheres_validate(seed):
    m = g.random_sphere(seed)
    assert validate(m).ok
    assert surface_info(m).classification == "sphere"
