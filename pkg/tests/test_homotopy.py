import random
from collections import defaultdict

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fixture, fixture_names
from dimer import generators as g
from dimer.homotopy import (ABELIAN, FREE, MalformedWalk, PatchExhausted, RequiresSimplyConnected, Walk,
                            class_of, is_null_homotopic, make_walk, presentation, unfold_cover, walk_of,
                            winding_number)
from dimer.model import Answer, Path, face_path, is_isomorphic, iter_paths, surface_info, validate
from oracles import lift_displacement

TORI = ["c3_torus", "conifold_torus", "square_torus_1x1", "square_torus_2x2", "c3_torus_2x3", "square_torus_2x3"]


def test_disk_has_trivial_group():
    pres = presentation(g.tri_disk())
    assert pres.regime == FREE and pres.generators == ()


@pytest.mark.parametrize("model", [g.c3_torus(), g.conifold_torus()])
def test_torus_homology(model):
    pres = presentation(model)
    assert pres.regime == ABELIAN and pres.h1 == "Z^2"


def test_c3_letters():
    pres = presentation(g.c3_torus())
    assert pres.letters["x"] == (1, 0)
    assert pres.letters["z"] == (-1, -1)


def test_annulus_group_is_free_of_rank_one():
    pres = presentation(g.ring_annulus(4))
    assert pres.regime == FREE and len(pres.generators) == 1


def test_null_homotopy_examples():
    assert class_of(g.tri_disk(), Path("1")).is_identity
    sph = g.tri_sphere()
    assert is_null_homotopic(sph, sph.path("1", ["a", "b", "c"])) == Answer.YES
    c3 = g.c3_torus()
    assert is_null_homotopic(c3, c3.path("v", ["x"])) == Answer.NO
    dg = g.digon_disk()
    assert is_null_homotopic(dg, dg.path("1", ["a", "b"])) == Answer.YES


def test_non_cycle_is_rejected():
    m = g.tri_disk()
    with pytest.raises(MalformedWalk):
        is_null_homotopic(m, m.path("1", ["a"]))
    with pytest.raises(MalformedWalk):
        make_walk(m, "1", [("b", 1)])


def test_winding_examples():
    m = g.tri_disk()
    p = m.path("1", ["a", "b", "c"])
    assert winding_number(m, p, "F1") == 1
    assert winding_number(m, walk_of(p).inverse(), "F1") == -1
    sq = g.square_disk()
    f = face_path(sq, sq.vertices[0])
    twice = sq.path(f.start, f.arrows * 2)
    assert winding_number(sq, twice, next(iter(sq.faces))) == 2


def test_winding_needs_simply_connected():
    c3 = g.c3_torus()
    with pytest.raises(RequiresSimplyConnected):
        winding_number(c3, c3.path("v", ["x", "y", "z"]), "F1" if "F1" in c3.faces else next(iter(c3.faces)))


@pytest.mark.parametrize("model, radius", [(g.tri_disk(), 2), (g.digon_disk(), 5), (g.square_disk(), 3)])
def test_cover_of_disk_is_a_copy(model, radius):
    patch = unfold_cover(model, model.vertices[0], radius)
    assert is_isomorphic(patch.model, model)


def test_c3_cover_patch():
    patch = unfold_cover(g.c3_torus(), "v", 1)
    assert len(patch.model.faces) >= 2
    labels = [patch.label_of(v) for v in patch.model.vertices]
    assert len(set(labels)) == len(labels)
    assert surface_info(patch.model).classification == "disk"


def test_lift_examples():
    c3 = g.c3_torus()
    patch = unfold_cover(c3, "v", 1)
    assert patch.lift_path(Path("v"), patch.base_lift).is_constant
    q = patch.lift_path(c3.path("v", ["x", "y"]), patch.base_lift)
    assert patch.label_of(q.end) == (1, 1)
    with pytest.raises(PatchExhausted):
        patch.lift_path(c3.path("v", ["x"] * 8), patch.base_lift)
    tri = g.tri_disk()
    tp = unfold_cover(tri, "1", 2)
    lifted = tp.lift_path(tri.path("1", ["a", "b"]), tp.base_lift)
    assert tp.project(lifted).arrows == ("a", "b")


@pytest.mark.parametrize("name", fixture_names(lambda e: e["surface"] in ("disk", "annulus", "torus")))
def test_cover_patches_are_valid_disks(name):
    m = fixture(name)
    patch = unfold_cover(m, m.vertices[0], 2)
    assert validate(patch.model).ok
    assert surface_info(patch.model).classification == "disk"
    for fid, face in patch.model.faces.items():
        base = m.faces[patch.face_map[fid]]
        assert face.orientation == base.orientation
        assert tuple(patch.arrow_map[a] for a in face.arrows) in {
            base.arrows[k:] + base.arrows[:k] for k in range(len(base.arrows))}


@pytest.mark.parametrize("name", TORI)
def test_torus_classes_match_plane_lifts(name):
    """Two paths with common endpoints are homotopic iff their plane lifts end at the same point."""
    m = fixture(name)
    by_label = defaultdict(set)
    by_shift = defaultdict(set)
    for p in iter_paths(m, 5):
        label = class_of(m, p).label
        shift = lift_displacement(m, p.arrows)
        by_label[(p.start, p.end, label)].add(shift)
        by_shift[(p.start, p.end, shift)].add(label)
    assert all(len(s) == 1 for s in by_label.values())
    assert all(len(s) == 1 for s in by_shift.values())


@pytest.mark.parametrize("name", ["c3_torus", "conifold_torus", "square_torus_1x1"])
def test_lift_endpoints_agree_iff_class_is_identity(name):
    m = fixture(name)
    v = m.vertices[0]
    patch = unfold_cover(m, v, 12)
    paths = [p for p in iter_paths(m, 6, start=v)]
    ends = defaultdict(set)
    for p in paths:
        ends[p.end].add(p)
    for group in ends.values():
        group = sorted(group, key=lambda p: p.arrows)[:60]
        for p in group:
            lp = patch.lift_path(p, patch.base_lift)
            for q in group:
                lq = patch.lift_path(q, patch.base_lift)
                diff = walk_of(q).inverse().then(walk_of(p))
                assert (lp.end == lq.end) == class_of(m, diff).is_identity


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["c3_torus", "conifold_torus", "ring_annulus_4x1", "grid_disk_2x2", "holed_torus"]),
       st.integers(0, 10 ** 6))
def test_face_insertion_keeps_class(name, seed):
    rng = random.Random(seed)
    m = fixture(name)
    paths = list(iter_paths(m, 3))
    p = rng.choice(paths)
    k = rng.randrange(len(p) + 1)
    v = p.start if k == 0 else m.head(p.arrows[k - 1])
    faces = [f for f in m.faces.values() if v in {m.tail(a) for a in f.arrows}]
    f = rng.choice(faces)
    i = [m.tail(a) for a in f.arrows].index(v)
    cyc = f.arrows[i:] + f.arrows[:i]
    sign = rng.choice([1, -1])
    loop = Walk(v, tuple((a, 1) for a in cyc), v)
    if sign < 0:
        loop = loop.inverse()
    w = walk_of(p)
    before = Walk(w.start, w.steps[:k], v)
    after = Walk(v, w.steps[k:], w.end)
    assert class_of(m, before.then(loop).then(after)) == class_of(m, w)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["c3_torus", "conifold_torus", "ring_annulus_4x1", "holed_torus"]), st.integers(0, 10 ** 6))
def test_class_is_a_homomorphism(name, seed):
    rng = random.Random(seed)
    m = fixture(name)
    paths = list(iter_paths(m, 3))
    p = rng.choice(paths)
    qs = [q for q in paths if q.start == p.end]
    q = rng.choice(qs)
    hp = presentation(m)
    pq = walk_of(p).then(walk_of(q))
    assert class_of(m, pq).label == hp.mul(class_of(m, p).label, class_of(m, q).label)
    assert class_of(m, walk_of(p).inverse()).label == hp.inv(class_of(m, p).label)
