from collections import defaultdict

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fixture, fixture_names, is_strongly_consistent, manifest
from dimer import generators as g
from dimer.matchings import count_matchings
from dimer.model import Answer, is_isomorphic, iter_paths, surface_info, validate
from dimer.rewrite import CONSISTENT, are_equivalent, check_path_consistency
from dimer.strands import is_strand_consistent
from dimer.transform import (BOUNDARY, INTERNAL, DisconnectedSelection, NonSurfaceSelection, NotRemovable,
                             ReductionLog, reduce, remove_digon, removable_digons, replay, submodel)

DIGON_FIXTURES = fixture_names(lambda e: e["reduced_digons"] > 0)


def test_submodel_of_everything_is_a_copy():
    m = g.grid_disk(2, 2)
    assert is_isomorphic(submodel(m, m.faces), m)


def test_sphere_minus_a_face_is_the_triangle():
    sph = g.tri_sphere()
    cc = next(f.id for f in sph.faces.values() if f.orientation == "cc")
    assert is_isomorphic(submodel(sph, [cc]), g.tri_disk())


def test_grid_minus_centre_is_an_annulus():
    m = g.grid_disk(3, 3)
    centre = sorted(m.faces)[4]
    sub = submodel(m, [f for f in m.faces if f != centre])
    assert surface_info(sub).classification == "annulus"
    assert is_strand_consistent(sub) == Answer.YES


def test_submodel_errors():
    m = g.grid_disk(3, 3)
    faces = sorted(m.faces)
    with pytest.raises(DisconnectedSelection):
        submodel(m, [faces[0], faces[8]])
    with pytest.raises(KeyError):
        submodel(m, ["nope"])
    with pytest.raises(NonSurfaceSelection):
        # the ring of squares without the centre and one corner pinches at a vertex
        submodel(m, ["S0_0", "S0_1", "S0_2", "S1_0", "S1_2", "S2_0", "S2_1"])


@pytest.mark.parametrize("name", fixture_names(lambda e: e["strand_consistent"] == "yes"
                                                 and e["surface"] not in ("sphere",)))
def test_submodels_inherit_strand_consistency(name):
    m = fixture(name)
    faces = sorted(m.faces)
    tried = 0
    for drop in faces:
        try:
            sub = submodel(m, [f for f in faces if f != drop])
        except (DisconnectedSelection, NonSurfaceSelection):
            continue
        tried += 1
        assert is_strand_consistent(sub) == Answer.YES
        if tried == 4:
            break


def test_removable_digon_examples():
    assert removable_digons(g.digon_disk()) == []
    assert removable_digons(g.bad_annulus()) == []
    assert removable_digons(g.non_consistent_disk()) == []
    with pytest.raises(NotRemovable):
        remove_digon(g.digon_disk(), next(iter(g.digon_disk().faces)))


def test_boundary_digon_goes_back_to_the_square():
    m = fixture("boundary_digon_square")
    (face,) = removable_digons(m)
    out, step = remove_digon(m, face)
    assert step.case == BOUNDARY
    assert is_isomorphic(out, g.square_disk())


@pytest.mark.parametrize("k", [1, 2, 3])
def test_subdivided_square_reduces(k):
    m = fixture(f"subdivided_square_disk_{k}")
    out, log = reduce(m)
    assert len(log) == k
    assert {s.case for s in log.steps} <= {INTERNAL, BOUNDARY}
    assert is_isomorphic(out, g.square_disk())
    assert is_isomorphic(replay(m, log), out)


def test_square_reduces_to_itself():
    out, log = reduce(g.square_disk())
    assert len(log) == 0 and is_isomorphic(out, g.square_disk())


def test_log_round_trips_through_json():
    m = fixture("subdivided_square_disk_3")
    _, log = reduce(m)
    assert ReductionLog.from_dict(log.to_dict()).to_dict() == log.to_dict()


def _partition(model, paths):
    """Equivalence classes of ``paths`` computed in ``model``, as frozensets of arrow tuples."""
    groups = defaultdict(list)
    for p in paths:
        groups[(p.start, p.end)].append(p)
    out = set()
    for ps in groups.values():
        classes = []
        for p in ps:
            for cls in classes:
                if are_equivalent(model, cls[0], p).answer == Answer.YES:
                    cls.append(p)
                    break
            else:
                classes.append([p])
        out |= {frozenset(q.arrows for q in cls) | {(cls[0].start,)} for cls in classes}
    return out


@pytest.mark.parametrize("name", DIGON_FIXTURES)
def test_each_removal_preserves_invariants(name):
    cur = fixture(name)
    while removable_digons(cur):
        nxt, step = remove_digon(cur, removable_digons(cur)[0])
        assert validate(nxt).ok
        assert surface_info(nxt) == surface_info(cur)
        assert len(nxt.digons) < len(cur.digons)
        assert count_matchings(nxt)[0] == count_matchings(cur)[0]
        kept = [p for p in iter_paths(nxt, 5)]
        assert _partition(nxt, kept) == _partition(cur, kept)
        cur = nxt


@pytest.mark.parametrize("name", fixture_names(is_strongly_consistent))
def test_strongly_consistent_fixtures_reduce_to_no_digons(name):
    out, log = reduce(fixture(name), assert_strongly_consistent=True)
    # a model made of a single digon has nothing to reduce to
    assert out.digons == () or (len(out.faces) == 1 and name == "digon_disk")
    assert log.to_dict()["steps"] == [s.to_dict() for s in log.steps]
    assert manifest()["models"][name]["reduced_digons"] == len(log)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_random_digon_insertions_reduce_back(seed, steps):
    base = g.grid_disk(2, 2)
    m = g.random_digon_insertions(base, seed, steps)
    out, log = reduce(m)
    assert out.digons == ()
    assert surface_info(out) == surface_info(base)
    assert count_matchings(out)[0] == count_matchings(m)[0] == count_matchings(base)[0]
    assert check_path_consistency(out, 4).verdict == CONSISTENT
