"""Fixture families: small named models plus parametrised tilings."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .model import CC, CL, Arrow, DimerModel, Face, ModelError, validate


def tri_disk() -> DimerModel:
    return DimerModel.build({"a": ("1", "2"), "b": ("2", "3"), "c": ("3", "1")},
                            {"F1": (CC, ["a", "b", "c"])}, name="tri_disk")


def tri_sphere() -> DimerModel:
    return DimerModel.build({"a": ("1", "2"), "b": ("2", "3"), "c": ("3", "1")},
                            {"F1": (CC, ["a", "b", "c"]), "F2": (CL, ["a", "b", "c"])},
                            name="tri_sphere")


def digon_disk() -> DimerModel:
    return DimerModel.build({"a": ("1", "2"), "b": ("2", "1")}, {"F1": (CC, ["a", "b"])},
                            name="digon_disk")


def square_disk() -> DimerModel:
    return DimerModel.build(
        {"a": ("1", "2"), "b": ("2", "3"), "c": ("3", "4"), "d": ("4", "1")},
        {"F1": (CC, ["a", "b", "c", "d"])}, name="square_disk")


def c3_torus(m: int = 1, n: int = 1) -> DimerModel:
    """Triangular tiling of an m x n torus; the 1 x 1 case has one vertex and three loops."""
    if m == n == 1:
        return DimerModel.build({"x": ("v", "v"), "y": ("v", "v"), "z": ("v", "v")},
                                {"F1": (CC, ["x", "y", "z"]), "F2": (CL, ["x", "z", "y"])},
                                name="c3_torus")

    def v(i, j):
        return f"{i % m}_{j % n}"

    arrows, faces = {}, {}
    for i in range(m):
        for j in range(n):
            arrows[f"x{i}_{j}"] = (v(i, j), v(i + 1, j))
            arrows[f"y{i}_{j}"] = (v(i, j), v(i, j + 1))
            arrows[f"z{i}_{j}"] = (v(i, j), v(i - 1, j - 1))
    for i in range(m):
        for j in range(n):
            faces[f"A{i}_{j}"] = (CC, [f"x{i}_{j}", f"y{(i + 1) % m}_{j}", f"z{(i + 1) % m}_{(j + 1) % n}"])
            faces[f"B{i}_{j}"] = (CL, [f"x{i}_{j}", f"z{(i + 1) % m}_{j}", f"y{i}_{(j - 1) % n}"])
    return DimerModel.build(arrows, faces, name=f"c3_torus_{m}x{n}")


def conifold_torus() -> DimerModel:
    return DimerModel.build(
        {"a1": ("u", "w"), "a2": ("u", "w"), "b1": ("w", "u"), "b2": ("w", "u")},
        {"F1": (CC, ["a1", "b1", "a2", "b2"]), "F2": (CL, ["a1", "b2", "a2", "b1"])},
        name="conifold_torus")


def _square_lattice(width: int, height: int, wrap_x: bool, wrap_y: bool, name: str) -> DimerModel:
    """Squares of a grid with alternating orientation.

    The horizontal edge (i,j)-(i+1,j) points right when i+j is even and the
    vertical edge (i,j)-(i,j+1) points up when i+j is odd, so squares whose
    lower-left corner has even parity are counter-clockwise cycles.
    """
    W = width if wrap_x else width + 1
    H = height if wrap_y else height + 1

    def v(i, j):
        return f"{i % W}_{j % H}"

    arrows = {}

    def h_edge(i, j):
        name_ = f"h{i % W}_{j % H}"
        if name_ not in arrows:
            a, b = v(i, j), v(i + 1, j)
            arrows[name_] = (a, b) if (i + j) % 2 == 0 else (b, a)
        return name_

    def v_edge(i, j):
        name_ = f"u{i % W}_{j % H}"
        if name_ not in arrows:
            a, b = v(i, j), v(i, j + 1)
            arrows[name_] = (a, b) if (i + j) % 2 == 1 else (b, a)
        return name_

    faces = {}
    for i in range(width):
        for j in range(height):
            bottom, right, top, left = h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)
            if (i + j) % 2 == 0:
                faces[f"S{i}_{j}"] = (CC, [bottom, right, top, left])
            else:
                faces[f"S{i}_{j}"] = (CL, [left, top, right, bottom])
    return DimerModel.build(arrows, faces, name=name)


def square_torus(m: int = 1, n: int = 1) -> DimerModel:
    return _square_lattice(2 * m, 2 * n, True, True, f"square_torus_{m}x{n}")


def grid_disk(m: int = 2, n: int = 2) -> DimerModel:
    return _square_lattice(m, n, False, False, f"grid_disk_{m}x{n}")


def ring_annulus(n: int = 4, width: int = 1) -> DimerModel:
    if n % 2:
        raise ValueError("ring_annulus needs an even number of squares around")
    return _square_lattice(n, width, True, False, f"ring_annulus_{n}x{width}")


def bad_annulus() -> DimerModel:
    """Digon glued to a single other face: an annulus whose leftmost forms diverge."""
    return DimerModel.build(
        {"al": ("u", "w"), "be": ("w", "u"), "x": ("w", "w"), "y": ("u", "u")},
        {"D": (CC, ["al", "be"]), "F": (CL, ["al", "x", "be", "y"])}, name="bad_annulus")


def non_consistent_disk() -> DimerModel:
    """Two triangles with the shared arrow replaced by a composable pair."""
    return DimerModel.build(
        {"a": ("1", "2"), "b": ("2", "3"), "e1": ("3", "5"), "e2": ("5", "1"),
         "f": ("1", "4"), "g": ("4", "3")},
        {"F1": (CC, ["a", "b", "e1", "e2"]), "F2": (CL, ["e1", "e2", "f", "g"])},
        name="non_consistent_disk")


def holed_torus() -> DimerModel:
    """Strand-consistent torus with one hole and no perfect matching.

    Two counter-clockwise digons meet the single clockwise face, which can
    hold only one matched arrow, while each digon needs its own.
    """
    return DimerModel.build(
        {"a0": ("v1", "v0"), "a1": ("v0", "v1"), "a2": ("v1", "v1"), "a3": ("v1", "v1"),
         "a4": ("v1", "v1"), "a5": ("v1", "v1")},
        {"D1": (CC, ["a2", "a5"]), "D2": (CC, ["a3", "a4"]),
         "G": (CL, ["a0", "a1", "a5", "a3", "a2", "a4"])},
        name="holed_torus")


def wheel_disk(k: int = 4) -> DimerModel:
    """A counter-clockwise k-gon ringed by alternating triangles.

    The ring carries a periodic strand around the centre, so the disk is not
    consistent; removing the centre face leaves a consistent annulus.
    """
    arrows, faces = {}, {}
    for i in range(k):
        j = (i + 1) % k
        arrows[f"c{i}"] = (f"v{i}", f"v{j}")
        arrows[f"p{i}"] = (f"v{j}", f"w{i}")
        arrows[f"q{i}"] = (f"w{i}", f"v{i}")
        arrows[f"r{i}"] = (f"w{i}", f"w{j}")
    faces["C"] = (CC, [f"c{i}" for i in range(k)])
    for i in range(k):
        j = (i + 1) % k
        faces[f"L{i}"] = (CL, [f"c{i}", f"p{i}", f"q{i}"])
        faces[f"R{i}"] = (CC, [f"q{j}", f"p{i}", f"r{i}"])
    return DimerModel.build(arrows, faces, name=f"wheel_disk_{k}")


# -- digon insertion ---------------------------------------------------------------------


def _fresh(existing, prefix: str) -> str:
    i = 1
    while f"{prefix}{i}" in existing:
        i += 1
    return f"{prefix}{i}"


def split_face(model: DimerModel, face_id: str, cut: int, name: str | None = None) -> DimerModel:
    """Split a face along a new pair of opposite arrows, inserting a digon between them.

    Undone by the internal case of digon removal.
    """
    f = model.faces[face_id]
    n = len(f.arrows)
    if not 1 <= cut <= n - 1:
        raise ValueError("cut position out of range")
    v0 = model.tail(f.arrows[0])
    vs = model.tail(f.arrows[cut])
    al = _fresh(model.arrows, "zs")
    be = _fresh(set(model.arrows) | {al}, "zt")
    arrows = list(model.arrows.values()) + [Arrow(al, v0, vs), Arrow(be, vs, v0)]
    faces = [g for g in model.faces.values() if g.id != face_id]
    f1 = _fresh(model.faces, "Zp")
    f2 = _fresh(set(model.faces) | {f1}, "Zp")
    dg = _fresh(set(model.faces) | {f1, f2}, "Zd")
    faces.append(Face(f1, f.orientation, f.arrows[:cut] + (be,)))
    faces.append(Face(f2, f.orientation, f.arrows[cut:] + (al,)))
    other = CL if f.orientation == CC else CC
    faces.append(Face(dg, other, (al, be)))
    return DimerModel(model.vertices, arrows, faces, name=name or model.name)


def double_boundary_arrow(model: DimerModel, arrow: str, name: str | None = None) -> DimerModel:
    """Glue a digon onto a boundary arrow; undone by the boundary case of digon removal."""
    if model.is_internal(arrow):
        raise ValueError(f"{arrow!r} is internal")
    side = CL if (arrow, CC) in model.face_of else CC
    a = model.arrows[arrow]
    new = _fresh(model.arrows, "zb")
    arrows = list(model.arrows.values()) + [Arrow(new, a.head, a.tail)]
    fid = _fresh(model.faces, "Zb")
    faces = list(model.faces.values()) + [Face(fid, side, (arrow, new))]
    return DimerModel(model.vertices, arrows, faces, name=name or model.name)


def subdivided(base: DimerModel, k: int = 1) -> DimerModel:
    """k digon insertions; each splits the lowest long face, or else doubles a boundary arrow."""
    m = base
    for _ in range(k):
        long_faces = [f for f in m.faces.values() if len(f.arrows) >= 4]
        if long_faces:
            f = long_faces[0]
            m = split_face(m, f.id, len(f.arrows) // 2)
        elif m.boundary_arrows:
            m = double_boundary_arrow(m, m.boundary_arrows[0])
        else:
            raise ValueError("no face or boundary arrow left to subdivide")
    return m.renamed(f"subdivided_{base.name}_{k}")


def subdivide_arrow(model: DimerModel, arrow: str, name: str | None = None) -> DimerModel:
    """Replace an arrow by two composable arrows through a new vertex."""
    a = model.arrows[arrow]
    mid = _fresh(model.vertex_index, "m")
    a1, a2 = f"{arrow}1", f"{arrow}2"
    if a1 in model.arrows or a2 in model.arrows:
        a1, a2 = _fresh(model.arrows, arrow + "_"), None
        a2 = _fresh(set(model.arrows) | {a1}, arrow + "_")
    arrows = [x for x in model.arrows.values() if x.id != arrow]
    arrows += [Arrow(a1, a.tail, mid), Arrow(a2, mid, a.head)]
    faces = []
    for f in model.faces.values():
        ws = []
        for x in f.arrows:
            ws.extend([a1, a2] if x == arrow else [x])
        faces.append(Face(f.id, f.orientation, tuple(ws)))
    return DimerModel(list(model.vertices) + [mid], arrows, faces, name=name or model.name)


def polygon_sphere(k: int = 3) -> DimerModel:
    arrows = {f"a{i}": (str(i), str((i + 1) % k)) for i in range(k)}
    cyc = [f"a{i}" for i in range(k)]
    return DimerModel.build(arrows, {"F1": (CC, cyc), "F2": (CL, cyc)}, name=f"sphere_{k}")


def random_sphere(seed: int) -> DimerModel:
    rng = random.Random(seed)
    m = polygon_sphere(rng.randint(4, 7))
    for _ in range(rng.randint(1, 4)):
        long_faces = [f for f in m.faces.values() if len(f.arrows) >= 3]
        if not long_faces:
            break
        f = rng.choice(long_faces)
        m = split_face(m, f.id, rng.randint(1, len(f.arrows) - 1))
    return m.renamed(f"random_sphere_{seed}")


def random_digon_insertions(base: DimerModel, seed: int, steps: int = 2) -> DimerModel:
    """Random splits of faces of length >= 4 (which keep the algebra unchanged)."""
    rng = random.Random(seed)
    m = base
    for _ in range(steps):
        long_faces = [f for f in m.faces.values() if len(f.arrows) >= 4]
        if not long_faces:
            break
        f = rng.choice(long_faces)
        m = split_face(m, f.id, rng.randint(2, len(f.arrows) - 2))
    return m.renamed(f"{base.name}_split{seed}")


# -- registry -----------------------------------------------------------------------------


FAMILIES: dict[str, Callable[..., DimerModel]] = {
    "tri_disk": tri_disk,
    "digon_disk": digon_disk,
    "square_disk": square_disk,
    "tri_sphere": tri_sphere,
    "c3_torus": c3_torus,
    "conifold_torus": conifold_torus,
    "square_torus": square_torus,
    "ring_annulus": ring_annulus,
    "bad_annulus": bad_annulus,
    "grid_disk": grid_disk,
    "non_consistent_disk": non_consistent_disk,
    "wheel_disk": wheel_disk,
    "holed_torus": holed_torus,
    "random_sphere": random_sphere,
    "sphere": polygon_sphere,
}


@dataclass
class GeneratorSpec:
    family: str
    params: dict = field(default_factory=dict)

    def build(self) -> DimerModel:
        if self.family in ("subdivided", "digon_insertions"):
            base = GeneratorSpec(self.params.get("base", "square_disk"), dict(self.params.get("base_params", {})))
            if self.family == "subdivided":
                m = subdivided(base.build(), int(self.params.get("k", 1)))
            else:
                m = random_digon_insertions(base.build(), int(self.params.get("seed", 0)),
                                            int(self.params.get("steps", 2)))
        else:
            if self.family not in FAMILIES:
                raise KeyError(f"unknown family {self.family!r}")
            m = FAMILIES[self.family](**self.params)
        report = validate(m)
        if not report.ok:
            raise ModelError(f"generator produced an invalid model: {report.violations}")
        return m


def generate(family: str, **params) -> DimerModel:
    return GeneratorSpec(family, params).build()


def default_corpus() -> list[GeneratorSpec]:
    """The generated corpus used for cross-validation and batch runs; no spheres."""
    specs = [GeneratorSpec(f) for f in ("tri_disk", "digon_disk", "square_disk", "bad_annulus",
                                          "non_consistent_disk", "holed_torus", "conifold_torus")]
    for m in (1, 2, 3):
        for n in (1, 2, 3):
            specs.append(GeneratorSpec("c3_torus", {"m": m, "n": n}))
            specs.append(GeneratorSpec("square_torus", {"m": m, "n": n}))
            specs.append(GeneratorSpec("grid_disk", {"m": m, "n": n}))
    for n in (2, 4, 6):
        for width in (1, 2):
            specs.append(GeneratorSpec("ring_annulus", {"n": n, "width": width}))
    for k in (3, 4, 5, 6):
        specs.append(GeneratorSpec("wheel_disk", {"k": k}))
    for base, ks in (("square_disk", (1, 2, 3)), ("tri_disk", (1, 2))):
        for k in ks:
            specs.append(GeneratorSpec("subdivided", {"base": base, "k": k}))
    for k in (1, 2):
        specs.append(GeneratorSpec("subdivided", {"base": "grid_disk", "base_params": {"m": 2, "n": 2}, "k": k}))
    for seed in range(5):
        specs.append(GeneratorSpec("digon_insertions", {"base": "grid_disk", "base_params": {"m": 2, "n": 3},
                                                        "seed": seed}))
    return specs
