from collections import Counter

import pytest

from conftest import fixture, fixture_names, manifest
from dimer import generators as g
from dimer.homotopy import unfold_cover
from dimer.model import CC, CL, Answer, is_isomorphic
from dimer.strands import (BAD_LENS, FINITE, INTERIOR_CYCLE, PERIODIC, detect_bad_configurations,
                           is_strand_consistent, quiver_from_strands, strand_consistency, strand_diagram,
                           zigzag_paths)


def _rotations(seq):
    return {tuple(seq[k:] + seq[:k]) for k in range(len(seq))}


def test_tri_disk_strands():
    zs = zigzag_paths(g.tri_disk())
    assert sorted(z.arrows for z in zs) == [("a", "b"), ("b", "c"), ("c", "a")]
    assert all(z.kind == FINITE and z.labels == ("zig",) for z in zs)


def test_tri_sphere_strand_is_periodic():
    zs = zigzag_paths(g.tri_sphere())
    assert [z.kind for z in zs] == [PERIODIC]
    assert Counter(zs[0].arrows) == Counter({"a": 2, "b": 2, "c": 2})


def test_c3_strands():
    zs = zigzag_paths(g.c3_torus())
    assert all(z.kind == PERIODIC and len(z) == 2 for z in zs)
    periods = [z.arrows for z in zs]
    for expected in [("x", "y"), ("y", "z"), ("z", "x")]:
        assert sum(p in _rotations(list(expected)) for p in periods) == 1


def test_bad_configuration_examples():
    sph = detect_bad_configurations(g.tri_sphere())
    assert any(b.kind == INTERIOR_CYCLE and b.verdict == Answer.YES for b in sph)
    assert detect_bad_configurations(g.tri_disk()) == []
    assert detect_bad_configurations(g.c3_torus()) == []


@pytest.mark.parametrize("model, answer", [
    (g.digon_disk(), Answer.YES), (g.tri_sphere(), Answer.NO), (g.conifold_torus(), Answer.YES),
    (g.non_consistent_disk(), Answer.NO), (g.wheel_disk(4), Answer.NO), (g.holed_torus(), Answer.YES),
])
def test_strand_verdicts(model, answer):
    assert is_strand_consistent(model) == answer


def test_non_consistent_disk_has_a_bad_lens():
    assert any(b.kind == BAD_LENS for b in strand_consistency(g.non_consistent_disk()).confirmed)


@pytest.mark.parametrize("model", [g.tri_disk(), g.c3_torus(), g.digon_disk()])
def test_round_trip_examples(model):
    assert is_isomorphic(quiver_from_strands(zigzag_paths(model)), model)


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_strand_properties(name):
    m = fixture(name)
    zs = zigzag_paths(m)
    starts = Counter()
    for z in zs:
        for a, side in z.states:
            starts[a] += 1
        # zigs and zags strictly alternate, including across the period
        labels = z.labels
        assert all(x != y for x, y in zip(labels, labels[1:]))
        if z.kind == PERIODIC:
            assert len(labels) % 2 == 0
    for a in m.arrows:
        assert starts[a] == sum((a, s) in m.face_of for s in (CC, CL))
    assert manifest()["models"][name]["strand_consistent"] == str(strand_consistency(m).answer)
    assert is_isomorphic(quiver_from_strands(strand_diagram(m)), m)


@pytest.mark.parametrize("name", fixture_names(lambda e: e["surface"] == "torus"))
def test_cover_patches_inherit_strand_consistency(name):
    m = fixture(name)
    patch = unfold_cover(m, m.vertices[0], 3)
    assert is_strand_consistent(patch.model) == is_strand_consistent(m) == Answer.YES


def test_sphere_cover_patches_are_not_tested_for_transfer():
    # the sphere is its own universal cover, so the patch is the sphere itself
    sph = g.tri_sphere()
    assert is_strand_consistent(unfold_cover(sph, "1", 3).model) == Answer.NO
