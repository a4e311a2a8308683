"""Dimer models with boundary: storage, validation, paths and surface topology.

A model is a quiver whose faces are oriented cycles labelled ``cc``
(counter-clockwise) or ``cl`` (clockwise).  Face cycles are stored in
traversal order: the first arrow walked comes first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Sequence

CC = "cc"
CL = "cl"
ORIENTATIONS = (CC, CL)


class Answer(str, Enum):
    """Three-valued verdict used by every bounded or partial decision procedure."""

    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


class ModelError(ValueError):
    """Raised for malformed input that cannot be turned into a model."""


class NoSuchFace(LookupError):
    pass


class PathError(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class Face:
    id: str
    orientation: str
    arrows: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.arrows)


@dataclass(frozen=True)
class Path:
    """A path given by its start vertex and arrow ids in traversal order."""

    start: str
    arrows: tuple[str, ...] = ()
    end: str = ""

    def __post_init__(self):
        if not self.end:
            if self.arrows:
                raise PathError("non-constant path needs an explicit end vertex")
            object.__setattr__(self, "end", self.start)

    def __len__(self) -> int:
        return len(self.arrows)

    @property
    def is_constant(self) -> bool:
        return not self.arrows

    def __str__(self) -> str:
        if not self.arrows:
            return f"e_{self.start}"
        return f"{self.start}:" + ",".join(self.arrows)


@dataclass(frozen=True)
class Violation:
    axiom: str
    message: str
    witness: tuple[str, ...] = ()

    def __str__(self) -> str:
        wit = f" [{', '.join(self.witness)}]" if self.witness else ""
        return f"{self.axiom}: {self.message}{wit}"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...] = ()
    structural: bool = False

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class SurfaceInfo:
    euler_characteristic: int
    boundary_components: int
    genus: int

    @property
    def classification(self) -> str:
        g, b = self.genus, self.boundary_components
        named = {(0, 0): "sphere", (0, 1): "disk", (0, 2): "annulus", (1, 0): "torus"}
        return named.get((g, b), f"other(g={g},b={b})")

    @property
    def is_closed(self) -> bool:
        return self.boundary_components == 0

    @property
    def is_simply_connected(self) -> bool:
        return self.genus == 0 and self.boundary_components <= 1

    def to_dict(self) -> dict:
        return {
            "euler_characteristic": self.euler_characteristic,
            "boundary_components": self.boundary_components,
            "genus": self.genus,
            "classification": self.classification,
        }


# arrow-end: ("in" | "out", arrow id)
End = tuple[str, str]


@dataclass(frozen=True)
class Rotation:
    """Clockwise order of arrow-ends at a vertex.

    ``cyclic`` is False at boundary vertices, where the order runs from one
    side of the boundary gap to the other.
    """

    vertex: str
    ends: tuple[End, ...]
    cyclic: bool


class DimerModel:
    """Immutable quiver with oriented faces.

    Construction does not validate; call :func:`validate` (or
    :meth:`checked`) before relying on derived data.
    """

    def __init__(
        self,
        vertices: Iterable[str],
        arrows: Iterable[Arrow],
        faces: Iterable[Face],
        name: str = "",
    ):
        self.name = name
        self.vertices: tuple[str, ...] = tuple(sorted(set(vertices)))
        arrows = sorted(arrows, key=lambda a: a.id)
        faces = sorted(faces, key=lambda f: f.id)
        self.arrows: dict[str, Arrow] = {a.id: a for a in arrows}
        self.faces: dict[str, Face] = {f.id: f for f in faces}
        self._n_arrows_raw = len(arrows)
        self._n_faces_raw = len(faces)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def build(cls, arrows: dict[str, tuple[str, str]], faces: dict[str, tuple[str, Sequence[str]]],
              name: str = "", vertices: Iterable[str] | None = None) -> "DimerModel":
        """Shorthand: ``arrows={id: (tail, head)}``, ``faces={id: (orientation, [arrow ids])}``."""
        arr = [Arrow(i, t, h) for i, (t, h) in arrows.items()]
        if vertices is None:
            vertices = {v for a in arr for v in (a.tail, a.head)}
        fcs = [Face(i, o, tuple(ws)) for i, (o, ws) in faces.items()]
        return cls(vertices, arr, fcs, name=name)

    def checked(self) -> "DimerModel":
        report = validate(self)
        if not report.ok:
            raise ModelError(f"invalid dimer model {self.name!r}: " + "; ".join(map(str, report.violations)))
        return self

    def renamed(self, name: str) -> "DimerModel":
        return DimerModel(self.vertices, self.arrows.values(), self.faces.values(), name=name)

    # -- derived incidence ----------------------------------------------------

    @cached_property
    def arrow_ids(self) -> tuple[str, ...]:
        return tuple(self.arrows)

    @cached_property
    def arrow_index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.arrows)}

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def face_of(self) -> dict[tuple[str, str], str]:
        """(arrow id, orientation) -> face id."""
        out = {}
        for f in self.faces.values():
            for a in f.arrows:
                out.setdefault((a, f.orientation), f.id)
        return out

    def face_at(self, arrow: str, side: str) -> Face | None:
        fid = self.face_of.get((arrow, side))
        return None if fid is None else self.faces[fid]

    def is_internal(self, arrow: str) -> bool:
        return (arrow, CC) in self.face_of and (arrow, CL) in self.face_of

    def is_boundary_arrow(self, arrow: str) -> bool:
        return not self.is_internal(arrow)

    @cached_property
    def boundary_arrows(self) -> tuple[str, ...]:
        return tuple(a for a in self.arrows if not self.is_internal(a))

    @cached_property
    def internal_arrows(self) -> tuple[str, ...]:
        return tuple(a for a in self.arrows if self.is_internal(a))

    @cached_property
    def boundary_vertices(self) -> frozenset[str]:
        out = set()
        for a in self.boundary_arrows:
            out.add(self.arrows[a].tail)
            out.add(self.arrows[a].head)
        return frozenset(out)

    def tail(self, arrow: str) -> str:
        return self.arrows[arrow].tail

    def head(self, arrow: str) -> str:
        return self.arrows[arrow].head

    @cached_property
    def out_arrows(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a in self.arrows.values():
            out.setdefault(a.tail, []).append(a.id)
        return {v: tuple(xs) for v, xs in out.items()}

    @cached_property
    def in_arrows(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a in self.arrows.values():
            out.setdefault(a.head, []).append(a.id)
        return {v: tuple(xs) for v, xs in out.items()}

    def next_in_face(self, arrow: str, side: str) -> str | None:
        f = self.face_at(arrow, side)
        if f is None:
            return None
        i = f.arrows.index(arrow)
        return f.arrows[(i + 1) % len(f.arrows)]

    def prev_in_face(self, arrow: str, side: str) -> str | None:
        f = self.face_at(arrow, side)
        if f is None:
            return None
        i = f.arrows.index(arrow)
        return f.arrows[i - 1]

    @cached_property
    def digons(self) -> tuple[str, ...]:
        return tuple(f.id for f in self.faces.values() if len(f.arrows) == 2)

    # -- paths -----------------------------------------------------------------

    def path(self, start: str, arrows: Sequence[str] = ()) -> Path:
        """Build a path, checking composability."""
        if start not in self.vertex_index:
            raise PathError(f"unknown vertex {start!r}")
        cur = start
        for a in arrows:
            if a not in self.arrows:
                raise PathError(f"unknown arrow {a!r}")
            if self.arrows[a].tail != cur:
                raise PathError(f"arrow {a!r} does not start at {cur!r}")
            cur = self.arrows[a].head
        return Path(start, tuple(arrows), cur)

    def path_from_arrows(self, arrows: Sequence[str]) -> Path:
        if not arrows:
            raise PathError("constant paths need a vertex")
        return self.path(self.tail(arrows[0]), arrows)

    def compose(self, first: Path, second: Path) -> Path:
        """Traverse ``first`` then ``second``."""
        if first.end != second.start:
            raise PathError(f"cannot compose: {first} ends at {first.end}, {second} starts at {second.start}")
        return Path(first.start, first.arrows + second.arrows, second.end)

    def __repr__(self) -> str:
        return (f"DimerModel({self.name!r}, |Q0|={len(self.vertices)}, "
                f"|Q1|={len(self.arrows)}, |Q2|={len(self.faces)})")

    def __eq__(self, other):
        if not isinstance(other, DimerModel):
            return NotImplemented
        return (self.vertices == other.vertices and self.arrows == other.arrows
                and self.faces == other.faces)

    def __hash__(self):
        return hash((self.vertices, tuple(self.arrows.values()), tuple(self.faces.values())))


# -- validation -----------------------------------------------------------------


def _corner_successor(model: DimerModel) -> dict[End, End]:
    """Counter-clockwise successor of each arrow-end across one face corner.

    A cc corner (alpha in, beta out) sends out-beta to in-alpha; a cl corner
    (gamma in, delta out) sends in-gamma to out-delta.
    """
    succ: dict[End, End] = {}
    for f in model.faces.values():
        n = len(f.arrows)
        for i in range(n):
            a_in, b_out = f.arrows[i - 1], f.arrows[i]
            if n == 1:
                continue
            if f.orientation == CC:
                succ[("out", b_out)] = ("in", a_in)
            else:
                succ[("in", a_in)] = ("out", b_out)
    return succ


def validate(model: DimerModel) -> ValidationReport:
    """Check the dimer-model axioms, reporting every violation with a witness."""
    errs: list[Violation] = []
    # structural references first
    if model._n_arrows_raw != len(model.arrows):
        errs.append(Violation("structure", "duplicate arrow id"))
    if model._n_faces_raw != len(model.faces):
        errs.append(Violation("structure", "duplicate face id"))
    vset = set(model.vertices)
    for a in model.arrows.values():
        for end in (a.tail, a.head):
            if end not in vset:
                errs.append(Violation("structure", "arrow cites unknown vertex", (a.id, end)))
    for f in model.faces.values():
        if f.orientation not in ORIENTATIONS:
            errs.append(Violation("structure", "face orientation must be cc or cl", (f.id, f.orientation)))
        for x in f.arrows:
            if x not in model.arrows:
                errs.append(Violation("structure", "face cites unknown arrow", (f.id, x)))
    if errs:
        return ValidationReport(False, tuple(errs), structural=True)

    # faces are cycles of length >= 2
    for f in model.faces.values():
        if len(f.arrows) < 2:
            errs.append(Violation("faces", "face cycle has length < 2", (f.id,)))
            continue
        for i in range(len(f.arrows) - 1):
            x, y = f.arrows[i], f.arrows[i + 1]
            if model.head(x) != model.tail(y):
                errs.append(Violation("faces", "face cycle not composable", (f.id, x, y)))
        if model.head(f.arrows[-1]) != model.tail(f.arrows[0]):
            errs.append(Violation("faces", "face cycle not closed", (f.id, f.arrows[-1], f.arrows[0])))

    # axioms (1)+(2): one or two faces, at most once per orientation
    count: dict[tuple[str, str], int] = {}
    for f in model.faces.values():
        for x in f.arrows:
            count[(x, f.orientation)] = count.get((x, f.orientation), 0) + 1
    for a in model.arrows:
        ncc, ncl = count.get((a, CC), 0), count.get((a, CL), 0)
        if ncc + ncl == 0:
            errs.append(Violation("axiom1", "arrow lies in no face", (a,)))
        if ncc > 1 or ncl > 1:
            errs.append(Violation("axiom2", "arrow appears more than once on one side", (a,)))
    if errs:
        return ValidationReport(False, tuple(errs))

    # axiom (4): finite nonzero degree
    for v in model.vertices:
        if not model.out_arrows.get(v) and not model.in_arrows.get(v):
            errs.append(Violation("axiom4", "vertex has no incident arrows", (v,)))

    # axiom (3): incidence graph connected at every vertex
    succ = _corner_successor(model)
    for v in model.vertices:
        ends = [("out", a) for a in model.out_arrows[v]] + [("in", a) for a in model.in_arrows[v]]
        if not ends:
            continue
        parent = {e: e for e in ends}

        def find(e):
            while parent[e] != e:
                parent[e] = parent[parent[e]]
                e = parent[e]
            return e

        for e in ends:
            s = succ.get(e)
            if s is not None and s in parent:
                parent[find(e)] = find(s)
        roots = {find(e) for e in ends}
        if len(roots) > 1:
            errs.append(Violation("axiom3", "incidence graph not connected", (v,)))

    # face adjacency graph connected
    if model.faces:
        adj: dict[str, set[str]] = {f: set() for f in model.faces}
        for a in model.arrows:
            fs = [model.face_of[(a, o)] for o in ORIENTATIONS if (a, o) in model.face_of]
            for x in fs:
                adj[x].update(fs)
        # faces sharing a vertex are also adjacent (pinched surfaces are caught above)
        seen = {next(iter(model.faces))}
        stack = list(seen)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(model.faces):
            missing = sorted(set(model.faces) - seen)
            errs.append(Violation("connected", "face adjacency graph not connected", tuple(missing[:3])))
    else:
        errs.append(Violation("faces", "model has no faces"))

    return ValidationReport(not errs, tuple(errs))


# -- rotation system and surface -------------------------------------------------


def rotation_system(model: DimerModel) -> dict[str, Rotation]:
    """Clockwise order of arrow-ends around every vertex.

    Consecutive entries (in-end, out-end) are face corners.  Raises
    :class:`ModelError` when the corners do not chain into one orbit.
    """
    succ = _corner_successor(model)
    pred = {b: a for a, b in succ.items()}
    out: dict[str, Rotation] = {}
    for v in model.vertices:
        ends = [("out", a) for a in model.out_arrows[v]] + [("in", a) for a in model.in_arrows[v]]
        starts = [e for e in ends if e not in pred]
        if len(starts) > 1:
            raise ModelError(f"axiom3: incidence graph at {v!r} is not connected")
        first = starts[0] if starts else min(ends, key=lambda e: (e[1], e[0]))
        chain = [first]
        while True:
            nxt = succ.get(chain[-1])
            if nxt is None or nxt == first:
                break
            chain.append(nxt)
        if len(chain) != len(ends):
            raise ModelError(f"axiom3: incidence graph at {v!r} is not connected")
        cyclic = not starts
        order = tuple(reversed(chain))
        if cyclic:
            # canonical rotation: start at the smallest in-end
            k = min(range(len(order)), key=lambda i: (order[i][0] != "in", order[i][1]))
            order = order[k:] + order[:k]
        out[v] = Rotation(v, order, cyclic)
    return out


def surface_info(model: DimerModel) -> SurfaceInfo:
    chi = len(model.vertices) - len(model.arrows) + len(model.faces)
    rot = rotation_system(model)
    parent = {a: a for a in model.boundary_arrows}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r in rot.values():
        if not r.cyclic:
            a, b = r.ends[0][1], r.ends[-1][1]
            parent[find(a)] = find(b)
    b = len({find(a) for a in parent})
    g2 = 2 - chi - b
    if g2 < 0 or g2 % 2:
        raise ModelError(f"inconsistent topology: chi={chi}, boundary={b}")
    return SurfaceInfo(chi, b, g2 // 2)


def return_path(model: DimerModel, arrow: str, side: str) -> Path:
    """The face cycle on ``side`` with ``arrow`` removed, from head to tail of ``arrow``."""
    f = model.face_at(arrow, side)
    if f is None:
        raise NoSuchFace(f"arrow {arrow!r} has no {side} face")
    i = f.arrows.index(arrow)
    rest = f.arrows[i + 1:] + f.arrows[:i]
    return Path(model.head(arrow), rest, model.tail(arrow))


def face_path(model: DimerModel, vertex: str) -> Path:
    """Face-path at ``vertex`` around the lowest-id face through it."""
    if vertex not in model.vertex_index:
        raise PathError(f"unknown vertex {vertex!r}")
    for f in model.faces.values():
        for i, a in enumerate(f.arrows):
            if model.tail(a) == vertex:
                cyc = f.arrows[i:] + f.arrows[:i]
                return Path(vertex, cyc, vertex)
    raise PathError(f"vertex {vertex!r} lies on no face")


def face_paths_at(model: DimerModel, vertex: str) -> list[Path]:
    out = []
    for f in model.faces.values():
        for i, a in enumerate(f.arrows):
            if model.tail(a) == vertex:
                out.append(Path(vertex, f.arrows[i:] + f.arrows[:i], vertex))
    return out


def iter_paths(model: DimerModel, max_len: int, start: str | None = None) -> Iterator[Path]:
    """All paths of length <= max_len (constant paths included), depth first."""
    starts = [start] if start is not None else list(model.vertices)
    for v in starts:
        stack: list[tuple[str, tuple[str, ...]]] = [(v, ())]
        while stack:
            cur, arrs = stack.pop()
            yield Path(v, arrs, cur)
            if len(arrs) < max_len:
                for a in reversed(model.out_arrows[cur]):
                    stack.append((model.head(a), arrs + (a,)))


# -- JSON -------------------------------------------------------------------------

_TOP_KEYS = {"name", "vertices", "arrows", "faces"}
_ARROW_KEYS = {"id", "tail", "head"}
_FACE_KEYS = {"id", "orientation", "arrows"}


def model_from_dict(data: dict, extra_keys: Iterable[str] = ()) -> DimerModel:
    if not isinstance(data, dict):
        raise ModelError("top level must be an object")
    unknown = set(data) - _TOP_KEYS - set(extra_keys)
    if unknown:
        raise ModelError(f"unknown top-level keys: {sorted(unknown)}")
    for key in ("vertices", "arrows", "faces"):
        if key not in data:
            raise ModelError(f"missing key {key!r}")
    arrows, faces = [], []
    for i, a in enumerate(data["arrows"]):
        if not isinstance(a, dict) or set(a) != _ARROW_KEYS:
            raise ModelError(f"arrows[{i}] must have exactly keys {sorted(_ARROW_KEYS)}")
        arrows.append(Arrow(str(a["id"]), str(a["tail"]), str(a["head"])))
    for i, f in enumerate(data["faces"]):
        if not isinstance(f, dict) or set(f) != _FACE_KEYS:
            raise ModelError(f"faces[{i}] must have exactly keys {sorted(_FACE_KEYS)}")
        faces.append(Face(str(f["id"]), str(f["orientation"]), tuple(str(x) for x in f["arrows"])))
    verts = [str(v) for v in data["vertices"]]
    if len(set(verts)) != len(verts):
        raise ModelError("duplicate vertex id")
    return DimerModel(verts, arrows, faces, name=str(data.get("name", "")))


def model_to_dict(model: DimerModel) -> dict:
    return {
        "name": model.name,
        "vertices": list(model.vertices),
        "arrows": [{"id": a.id, "tail": a.tail, "head": a.head} for a in model.arrows.values()],
        "faces": [{"id": f.id, "orientation": f.orientation, "arrows": list(f.arrows)}
                  for f in model.faces.values()],
    }


def dumps(model: DimerModel, extra: dict | None = None) -> str:
    data = model_to_dict(model)
    if extra:
        data.update(extra)
    return json.dumps(data, indent=2) + "\n"


def loads(text: str) -> DimerModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    extra = ("covering",) if isinstance(data, dict) and "covering" in data else ()
    return model_from_dict(data, extra_keys=extra)


def load(path) -> DimerModel:
    with open(path) as fh:
        return loads(fh.read())


# -- isomorphism ------------------------------------------------------------------


def find_isomorphism(m1: DimerModel, m2: DimerModel) -> dict[str, str] | None:
    """Arrow bijection preserving incidence, face cycles and orientations, or None."""
    if (len(m1.vertices), len(m1.arrows), len(m1.faces)) != (len(m2.vertices), len(m2.arrows), len(m2.faces)):
        return None
    if not m1.arrows:
        return {}
    sig1 = sorted(_face_signature(m1))
    if sig1 != sorted(_face_signature(m2)):
        return None
    a0 = next(iter(m1.arrows))
    for b0 in m2.arrows:
        amap = _propagate(m1, m2, a0, b0)
        if amap is not None and _vertices_agree(m1, m2, amap):
            return amap
    return None


def is_isomorphic(m1: DimerModel, m2: DimerModel) -> bool:
    return find_isomorphism(m1, m2) is not None


def _face_signature(m: DimerModel) -> list[tuple[str, int]]:
    return [(f.orientation, len(f.arrows)) for f in m.faces.values()]


def _propagate(m1: DimerModel, m2: DimerModel, a0: str, b0: str) -> dict[str, str] | None:
    amap = {a0: b0}
    used = {b0}
    stack = [a0]
    while stack:
        a = stack.pop()
        b = amap[a]
        for side in ORIENTATIONS:
            na, nb = m1.next_in_face(a, side), m2.next_in_face(b, side)
            if (na is None) != (nb is None):
                return None
            if na is None:
                continue
            if len(m1.face_at(a, side).arrows) != len(m2.face_at(b, side).arrows):
                return None
            if na in amap:
                if amap[na] != nb:
                    return None
            else:
                if nb in used:
                    return None
                amap[na] = nb
                used.add(nb)
                stack.append(na)
    return amap if len(amap) == len(m1.arrows) else None


def _vertices_agree(m1: DimerModel, m2: DimerModel, amap: dict[str, str]) -> bool:
    vmap: dict[str, str] = {}
    for a, b in amap.items():
        for x, y in ((m1.tail(a), m2.tail(b)), (m1.head(a), m2.head(b))):
            if vmap.setdefault(x, y) != y:
                return False
    return len(set(vmap.values())) == len(vmap) == len(m1.vertices)
