"""Fundamental groups, homotopy classes of walks, winding numbers and cover patches.

The word problem is solved according to the surface:

* surfaces with boundary and the sphere: the 2-complex is collapsed along
  free edges until no face remains, leaving a free group on the non-tree
  edges of what is left;
* the torus: the fundamental group is abelian, so first homology is exact;
* closed surfaces of higher genus: homology is used as a partial oracle.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .model import (
    CC,
    CL,
    Answer,
    Arrow,
    DimerModel,
    Face,
    ModelError,
    Path,
    SurfaceInfo,
    surface_info,
    validate,
)

FREE = "free"
ABELIAN = "abelian"
PARTIAL = "partial"

Letter = tuple[str, int]  # (arrow id, +1 | -1)


class MalformedWalk(ValueError):
    pass


class RequiresSimplyConnected(ValueError):
    pass


class PatchExhausted(LookupError):
    """A lift left the finite cover patch; unfold with a larger radius."""


class UnsupportedSurface(ValueError):
    pass


@dataclass(frozen=True)
class Walk:
    """Signed arrows in traversal order, starting at ``start``."""

    start: str
    steps: tuple[Letter, ...] = ()
    end: str = ""

    def __post_init__(self):
        if not self.end:
            if self.steps:
                raise MalformedWalk("non-empty walk needs an explicit end")
            object.__setattr__(self, "end", self.start)

    @property
    def is_cycle(self) -> bool:
        return self.start == self.end

    def inverse(self) -> "Walk":
        return Walk(self.end, tuple((a, -s) for a, s in reversed(self.steps)), self.start)

    def then(self, other: "Walk") -> "Walk":
        if self.end != other.start:
            raise MalformedWalk(f"walks do not compose at {self.end!r} / {other.start!r}")
        return Walk(self.start, self.steps + other.steps, other.end)

    def __len__(self):
        return len(self.steps)


def make_walk(model: DimerModel, start: str, steps: Sequence[Letter]) -> Walk:
    cur = start
    if start not in model.vertex_index:
        raise MalformedWalk(f"unknown vertex {start!r}")
    for a, s in steps:
        if a not in model.arrows or s not in (1, -1):
            raise MalformedWalk(f"bad step {(a, s)!r}")
        arr = model.arrows[a]
        frm, to = (arr.tail, arr.head) if s == 1 else (arr.head, arr.tail)
        if frm != cur:
            raise MalformedWalk(f"step {a}^{s} does not start at {cur!r}")
        cur = to
    return Walk(start, tuple(steps), cur)


def walk_of(path: Path) -> Walk:
    return Walk(path.start, tuple((a, 1) for a in path.arrows), path.end)


# -- free group words ------------------------------------------------------------

Word = tuple[int, ...]  # nonzero ints, -g is the inverse of g


def reduce_word(w: Iterable[int]) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def mul_words(a: Word, b: Word) -> Word:
    i = 0
    n = min(len(a), len(b))
    while i < n and a[len(a) - 1 - i] == -b[i]:
        i += 1
    return a[: len(a) - i] + b[i:]


# -- presentation ---------------------------------------------------------------------


@dataclass(frozen=True)
class HomotopyClass:
    start: str
    end: str
    label: tuple
    regime: str

    @property
    def exact(self) -> bool:
        return self.regime != PARTIAL

    @property
    def is_identity(self) -> bool:
        return self.start == self.end and not any(self.label)

    def __str__(self) -> str:
        return f"[{self.start}->{self.end}:{format_label(self.label, self.regime)}]"


def format_label(label: tuple, regime: str) -> str:
    if regime == FREE:
        if not label:
            return "e"
        return ".".join(f"g{x}" if x > 0 else f"g{-x}^-1" for x in label)
    return "(" + ",".join(str(x) for x in label) + ")"


@dataclass
class Pi1Presentation:
    """Presentation of the fundamental group of the surface of a model.

    ``letters`` maps every arrow to its image: a reduced word (free regime)
    or an integer vector (abelian regimes).
    """

    model: DimerModel
    surface: SurfaceInfo
    regime: str
    tree: tuple[str, ...]
    generators: tuple[str, ...]
    relators: dict[str, tuple[Letter, ...]]
    collapse_schedule: tuple[tuple[str, str], ...]
    letters: dict[str, tuple]
    relation_matrix: tuple[tuple[int, ...], ...]
    smith_diagonal: tuple[int, ...]
    rank: int

    @property
    def h1(self) -> str:
        torsion = [d for d in self.smith_diagonal if abs(d) > 1]
        parts = [f"Z^{self.rank}"] if self.rank else []
        parts += [f"Z/{abs(d)}" for d in torsion]
        return " + ".join(parts) if parts else "0"

    def identity(self) -> tuple:
        return () if self.regime == FREE else (0,) * self.rank

    def mul(self, a: tuple, b: tuple) -> tuple:
        if self.regime == FREE:
            return mul_words(a, b)
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a: tuple) -> tuple:
        if self.regime == FREE:
            return invert_word(a)
        return tuple(-x for x in a)

    def letter(self, arrow: str, sign: int = 1) -> tuple:
        w = self.letters[arrow]
        return w if sign == 1 else self.inv(w)

    def label_of_arrows(self, arrows: Iterable[str]) -> tuple:
        if self.regime == FREE:
            out: tuple = ()
            for a in arrows:
                out = mul_words(out, self.letters[a])
            return out
        acc = [0] * self.rank
        for a in arrows:
            for i, x in enumerate(self.letters[a]):
                acc[i] += x
        return tuple(acc)

    def label_of_walk(self, walk: Walk) -> tuple:
        out = self.identity()
        for a, s in walk.steps:
            out = self.mul(out, self.letter(a, s))
        return out


def _bfs_tree(vertices: Sequence[str], arrows: Sequence[Arrow]) -> list[str]:
    adj: dict[str, list[tuple[str, str]]] = {v: [] for v in vertices}
    for a in arrows:
        adj[a.tail].append((a.id, a.head))
        adj[a.head].append((a.id, a.tail))
    root = min(vertices)
    seen = {root}
    tree = []
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for aid, w in sorted(adj[v]):
            if w not in seen:
                seen.add(w)
                tree.append(aid)
                queue.append(w)
    if len(seen) != len(vertices):
        raise ModelError("quiver is not connected")
    return tree


def _collapse(model: DimerModel, faces: Sequence[Face]) -> tuple[list[tuple[str, str]], set[str]]:
    """Remove faces through free edges; returns the schedule and the surviving arrows."""
    alive_faces = {f.id: f for f in faces}
    uses: dict[str, set[str]] = {a: set() for a in model.arrows}
    for f in faces:
        for a in f.arrows:
            uses[a].add(f.id)
    alive_arrows = set(model.arrows)
    schedule = []
    while alive_faces:
        free = sorted(a for a in alive_arrows if len(uses[a]) == 1)
        if not free:
            raise UnsupportedSurface("no free edge left; surface is closed")
        a = free[0]
        (fid,) = uses[a]
        schedule.append((a, fid))
        alive_arrows.discard(a)
        for b in alive_faces.pop(fid).arrows:
            uses[b].discard(fid)
    return schedule, alive_arrows


def _abelian_basis(relations: list[list[int]], n: int) -> tuple[list[list[int]], int]:
    """Integer elimination of relations; returns the coordinate map (k x n) and k.

    A relation with a unit entry eliminates the generator in its
    highest-index unit column; otherwise Euclid column steps create one.
    """
    T = [[int(i == j) for j in range(n)] for i in range(n)]  # coords = T @ w
    rels = [r[:] for r in relations]
    while True:
        rels = [r for r in rels if any(r)]
        if not rels:
            break
        r = rels[0]
        units = [j for j, x in enumerate(r) if abs(x) == 1]
        if not units:
            nz = [j for j, x in enumerate(r) if x]
            if len(nz) == 1:
                raise UnsupportedSurface("torsion in first homology")
            i = min(nz, key=lambda j: (abs(r[j]), j))
            for j in nz:
                if j == i:
                    continue
                q = r[j] // r[i]
                # coordinate change c_i += q c_j keeps the pairing r . c
                T[i] = [x + q * y for x, y in zip(T[i], T[j])]
                for s in rels:
                    s[j] -= q * s[i]
            continue
        p = units[-1]
        rp = r[p]
        # c_p is eliminated: c_j += c_p * (-rp * r_j)
        newT = []
        for j in range(len(T)):
            if j == p:
                continue
            f = -rp * r[j]
            newT.append([x + f * y for x, y in zip(T[j], T[p])])
        T = newT
        new_rels = []
        for s in rels[1:]:
            sp = s[p]
            new_rels.append([s[j] - sp * rp * r[j] for j in range(len(s)) if j != p])
        rels = new_rels
    return T, len(T)


def _smith_diagonal(matrix: list[list[int]]) -> tuple[int, ...]:
    if not matrix or not matrix[0]:
        return ()
    from sympy import Matrix
    from sympy.matrices.normalforms import smith_normal_form

    snf = smith_normal_form(Matrix(matrix))
    k = min(snf.shape)
    return tuple(int(snf[i, i]) for i in range(k))


def presentation(model: DimerModel, surface: SurfaceInfo | None = None) -> Pi1Presentation:
    surf = surface or surface_info(model)
    faces = list(model.faces.values())
    arrows = list(model.arrows.values())

    tree_full = _bfs_tree(model.vertices, arrows)
    gens_full = [a for a in model.arrows if a not in set(tree_full)]
    gidx = {a: i for i, a in enumerate(gens_full)}
    relators = {}
    matrix = []
    for f in faces:
        relators[f.id] = tuple((a, 1) for a in f.arrows if a in gidx)
        row = [0] * len(gens_full)
        for a in f.arrows:
            if a in gidx:
                row[gidx[a]] += 1
        matrix.append(row)
    smith = _smith_diagonal(matrix)

    if surf.boundary_components > 0 or surf.genus == 0:
        to_collapse = faces if surf.boundary_components > 0 else faces[1:]
        schedule, alive = _collapse(model, to_collapse)
        kept = [a for a in arrows if a.id in alive]
        tree = _bfs_tree(model.vertices, kept)
        tset = set(tree)
        gens = tuple(a.id for a in kept if a.id not in tset)
        letters: dict[str, tuple] = {}
        for i, g in enumerate(gens):
            letters[g] = (i + 1,)
        for a in tree:
            letters[a] = ()
        for a, fid in reversed(schedule):
            cyc = model.faces[fid].arrows
            k = cyc.index(a)
            rest = cyc[k + 1:] + cyc[:k]
            w: tuple = ()
            for b in rest:
                w = mul_words(w, letters[b])
            letters[a] = invert_word(w)
        return Pi1Presentation(model, surf, FREE, tuple(tree), gens, relators, tuple(schedule),
                               letters, tuple(map(tuple, matrix)), smith, len(gens))

    T, k = _abelian_basis([r[:] for r in matrix], len(gens_full))
    letters = {}
    for a in model.arrows:
        if a in gidx:
            j = gidx[a]
            letters[a] = tuple(T[i][j] for i in range(k))
        else:
            letters[a] = (0,) * k
    regime = ABELIAN if surf.genus == 1 else PARTIAL
    return Pi1Presentation(model, surf, regime, tuple(tree_full), tuple(gens_full), relators, (),
                           letters, tuple(map(tuple, matrix)), smith, k)


class Homotopy:
    """Cached homotopy oracle for one model."""

    def __init__(self, model: DimerModel, pres: Pi1Presentation | None = None):
        self.model = model
        self.pres = pres or presentation(model)

    @property
    def regime(self) -> str:
        return self.pres.regime

    @property
    def exact(self) -> bool:
        return self.pres.regime != PARTIAL

    def class_of(self, walk: Walk | Path) -> HomotopyClass:
        if isinstance(walk, Path):
            return HomotopyClass(walk.start, walk.end, self.pres.label_of_arrows(walk.arrows), self.regime)
        make_walk(self.model, walk.start, walk.steps)
        return HomotopyClass(walk.start, walk.end, self.pres.label_of_walk(walk), self.regime)

    def label(self, arrows: Iterable[str]) -> tuple:
        return self.pres.label_of_arrows(arrows)

    def is_null_homotopic(self, walk: Walk | Path) -> Answer:
        if walk.start != walk.end:
            raise MalformedWalk("not a cycle-walk")
        c = self.class_of(walk)
        if any(c.label):
            return Answer.NO
        return Answer.YES if self.exact else Answer.UNKNOWN


def class_of(model: DimerModel, walk: Walk | Path) -> HomotopyClass:
    return Homotopy(model).class_of(walk)


def is_null_homotopic(model: DimerModel, walk: Walk | Path) -> Answer:
    return Homotopy(model).is_null_homotopic(walk)


# -- winding numbers -------------------------------------------------------------------


def winding_chain(model: DimerModel, walk: Walk | Path) -> dict[str, int]:
    """Integer 2-chain bounded by a closed walk on a disk.

    Counter-clockwise faces contribute their cycle and clockwise faces its
    reverse, so the coefficient of a face is the winding number around it.
    """
    if isinstance(walk, Path):
        walk = walk_of(walk)
    make_walk(model, walk.start, walk.steps)
    if not walk.is_cycle:
        raise MalformedWalk("winding numbers need a cycle-walk")
    surf = surface_info(model)
    if not (surf.genus == 0 and surf.boundary_components == 1):
        raise RequiresSimplyConnected(f"model is a {surf.classification}, not a disk")
    flow = {a: 0 for a in model.arrows}
    for a, s in walk.steps:
        flow[a] += s
    coeff: dict[str, int] = {}
    sign = {CC: 1, CL: -1}
    queue = deque()
    for a in model.boundary_arrows:
        side = CC if (a, CC) in model.face_of else CL
        fid = model.face_of[(a, side)]
        val = sign[side] * flow[a]
        if fid in coeff:
            if coeff[fid] != val:
                raise MalformedWalk("walk does not bound a 2-chain")
        else:
            coeff[fid] = val
            queue.append(fid)
    while queue:
        fid = queue.popleft()
        f = model.faces[fid]
        other_side = CL if f.orientation == CC else CC
        for a in f.arrows:
            gid = model.face_of.get((a, other_side))
            if gid is None:
                continue
            # flow(a) = n_cc - n_cl
            if f.orientation == CC:
                val = coeff[fid] - flow[a]
            else:
                val = coeff[fid] + flow[a]
            if gid in coeff:
                if coeff[gid] != val:
                    raise MalformedWalk("walk does not bound a 2-chain")
            else:
                coeff[gid] = val
                queue.append(gid)
    return coeff


def winding_number(model: DimerModel, walk: Walk | Path, face: str) -> int:
    if face not in model.faces:
        raise KeyError(face)
    return winding_chain(model, walk)[face]


# -- cover patches -----------------------------------------------------------------------


def _label_token(label: tuple, regime: str) -> str:
    if not any(label):
        return ""
    if regime == FREE:
        return ".".join(str(x) for x in label)
    return ",".join(str(x) for x in label)


@dataclass
class CoverPatch:
    """A finite simply connected piece of the universal cover."""

    base: DimerModel
    model: DimerModel
    vertex_map: dict[str, str]
    arrow_map: dict[str, str]
    face_map: dict[str, str]
    lift_of: dict[tuple[str, tuple], str]  # (base vertex, label) -> cover vertex
    arrow_lift: dict[tuple[str, tuple], str]  # (base arrow, tail label) -> cover arrow
    base_lift: str
    homotopy: Homotopy = field(repr=False)

    def covering_dict(self) -> dict:
        return {"vertices": dict(sorted(self.vertex_map.items())),
                "arrows": dict(sorted(self.arrow_map.items()))}

    def label_of(self, cover_vertex: str) -> tuple:
        return self._label_index[cover_vertex]

    @cached_property
    def _label_index(self) -> dict[str, tuple]:
        return {cv: lab for (v, lab), cv in self.lift_of.items()}

    def lift_path(self, base_path: Path, start_lift: str) -> Path:
        if self.vertex_map.get(start_lift) != base_path.start:
            raise ValueError(f"{start_lift!r} is not a lift of {base_path.start!r}")
        pres = self.homotopy.pres
        lab = self._label_index[start_lift]
        out = []
        cur = start_lift
        for a in base_path.arrows:
            ca = self.arrow_lift.get((a, lab))
            if ca is None:
                raise PatchExhausted(f"lift of {a!r} from {cur!r} leaves the patch")
            out.append(ca)
            lab = pres.mul(lab, pres.letters[a])
            cur = self.model.head(ca)
        return Path(start_lift, tuple(out), cur)

    def project(self, cover_path: Path) -> Path:
        return Path(self.vertex_map[cover_path.start],
                    tuple(self.arrow_map[a] for a in cover_path.arrows),
                    self.vertex_map[cover_path.end])


def _face_lift_labels(pres: Pi1Presentation, face: Face, start_label: tuple) -> list[tuple]:
    """Labels at the tail of each arrow of a lifted face, given the label at its first tail."""
    out = [start_label]
    lab = start_label
    for a in face.arrows[:-1]:
        lab = pres.mul(lab, pres.letters[a])
        out.append(lab)
    return out


def unfold_cover(model: DimerModel, base_vertex: str, face_radius: int = 1,
                 max_faces: int = 20000) -> CoverPatch:
    """Breadth-first face unfolding of the universal cover around a lift of ``base_vertex``."""
    surf = surface_info(model)
    if surf.is_closed and surf.genus >= 2:
        raise UnsupportedSurface("cover patches need an exact word problem (genus >= 2 closed)")
    hom = Homotopy(model)
    pres = hom.pres
    ident = pres.identity()

    # a face lift is keyed by (face id, label at the tail of its first arrow)
    def key_through(face: Face, arrow_pos: int, tail_label: tuple) -> tuple[str, tuple]:
        lab = tail_label
        for a in reversed(face.arrows[:arrow_pos]):
            lab = pres.mul(lab, pres.inv(pres.letters[a]))
        return (face.id, lab)

    def lift_faces_at(v: str, lab: tuple) -> list[tuple[str, tuple]]:
        out = []
        for f in model.faces.values():
            for i, a in enumerate(f.arrows):
                if model.tail(a) == v:
                    out.append(key_through(f, i, lab))
        return out

    def vertices_of(fkey) -> list[tuple[str, tuple]]:
        f = model.faces[fkey[0]]
        labs = _face_lift_labels(pres, f, fkey[1])
        return [(model.tail(a), l) for a, l in zip(f.arrows, labs)]

    def crossings(fkey) -> list[tuple[str, tuple[str, tuple]]]:
        f = model.faces[fkey[0]]
        labs = _face_lift_labels(pres, f, fkey[1])
        other = CL if f.orientation == CC else CC
        out = []
        for a, l in zip(f.arrows, labs):
            g = model.face_at(a, other)
            if g is not None:
                tok = _label_token(l, pres.regime)
                out.append((f"{a}~{tok}" if tok else a, key_through(g, g.arrows.index(a), l)))
        return out

    def neighbours(fkey) -> list[tuple[str, tuple]]:
        return [nk for _, nk in crossings(fkey)]

    start = lift_faces_at(base_vertex, ident)
    chosen = set(start)
    frontier = list(dict.fromkeys(start))
    for _ in range(face_radius):
        nxt = []
        for fk in frontier:
            for nk in neighbours(fk):
                if nk not in chosen:
                    chosen.add(nk)
                    nxt.append(nk)
        frontier = nxt
        if len(chosen) > max_faces:
            raise PatchExhausted("face cap reached while unfolding")

    def build(keys) -> tuple[DimerModel, dict, dict, dict, dict, dict]:
        vmap, amap, fmap, lift_of, arrow_lift = {}, {}, {}, {}, {}
        verts = set()
        arrows = {}
        faces = []
        for fk in sorted(keys, key=lambda k: (k[0], k[1])):
            f = model.faces[fk[0]]
            labs = _face_lift_labels(pres, f, fk[1])
            ids = []
            for a, l in zip(f.arrows, labs):
                tok = _label_token(l, pres.regime)
                aid = f"{a}~{tok}" if tok else a
                t = (model.tail(a), l)
                h = (model.head(a), pres.mul(l, pres.letters[a]))
                for v, vl in (t, h):
                    ttok = _label_token(vl, pres.regime)
                    vid = f"{v}~{ttok}" if ttok else v
                    lift_of[(v, vl)] = vid
                    vmap[vid] = v
                    verts.add(vid)
                arrows[aid] = Arrow(aid, lift_of[t], lift_of[h])
                amap[aid] = a
                arrow_lift[(a, l)] = aid
                ids.append(aid)
            tok = _label_token(fk[1], pres.regime)
            fid = f"{f.id}~{tok}" if tok else f.id
            fmap[fid] = f.id
            faces.append(Face(fid, f.orientation, tuple(ids)))
        m = DimerModel(verts, arrows.values(), faces, name=f"{model.name}~cover")
        return m, vmap, amap, fmap, lift_of, arrow_lift

    # repair: fill pinched vertices with their full star, then fill holes
    for _ in range(200):
        m, *_rest = build(chosen)
        rep = validate(m)
        pinched = [v.witness[0] for v in rep.violations if v.axiom == "axiom3"]
        if pinched:
            inv = {vid: key for key, vid in _rest[3].items()}
            for vid in pinched:
                v, lab = inv[vid]
                chosen.update(lift_faces_at(v, lab))
            continue
        if not rep.ok:
            raise ModelError("cover patch failed validation: " + "; ".join(map(str, rep.violations)))
        s = surface_info(m)
        if s.boundary_components <= 1:
            break
        chosen.update(_hole_fill(m, chosen, crossings))
        if len(chosen) > max_faces:
            raise PatchExhausted("face cap reached while filling holes")
    else:
        raise PatchExhausted("cover patch repair did not converge")

    m, vmap, amap, fmap, lift_of, arrow_lift = build(chosen)
    return CoverPatch(model, m, vmap, amap, fmap, lift_of, arrow_lift,
                      lift_of[(base_vertex, ident)], hom)


def _hole_fill(patch: DimerModel, chosen: set, crossings) -> set:
    """Faces glued across every boundary component except the longest one."""
    from .model import rotation_system

    rot = rotation_system(patch)
    parent = {a: a for a in patch.boundary_arrows}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r in rot.values():
        if not r.cyclic:
            parent[find(r.ends[0][1])] = find(r.ends[-1][1])
    comps: dict[str, set[str]] = {}
    for a in patch.boundary_arrows:
        comps.setdefault(find(a), set()).add(a)
    ordered = sorted(comps.values(), key=lambda c: (-len(c), min(c)))
    holes = set().union(*ordered[1:]) if len(ordered) > 1 else set()
    added = set()
    for fk in chosen:
        for cover_arrow, nk in crossings(fk):
            if cover_arrow in holes and nk not in chosen:
                added.add(nk)
    return added


def patch_to_json_dict(patch: CoverPatch) -> dict:
    from .model import model_to_dict

    d = model_to_dict(patch.model)
    d["covering"] = patch.covering_dict()
    return d
