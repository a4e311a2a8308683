"""Zigzag paths, strand diagrams and bad configurations.

A strand state ``(arrow, side)`` means the strand leaves ``arrow`` through
the face on ``side``: the next arrow is the successor of ``arrow`` in that
face, and the strand then has to turn through the opposite side.  Pairs
leaving through a counter-clockwise face are zigs, the others zags.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .homotopy import Homotopy
from .model import CC, CL, Answer, Arrow, DimerModel, Face, Path

FINITE = "finite"
PERIODIC = "periodic"

SELF_INTERSECTION = "NullHomotopicSelfIntersection"
INTERIOR_CYCLE = "NullHomotopicInteriorCycle"
BAD_LENS = "BadLens"

State = tuple[str, str]


def opposite(side: str) -> str:
    return CL if side == CC else CC


@dataclass(frozen=True)
class ZigzagPath:
    kind: str
    arrows: tuple[str, ...]
    # side used to leave each arrow; None marks the last arrow of a finite strand
    sides: tuple[str | None, ...]

    @property
    def states(self) -> tuple[State, ...]:
        return tuple((a, s) for a, s in zip(self.arrows, self.sides) if s is not None)

    @property
    def labels(self) -> tuple[str, ...]:
        """'zig' or 'zag' for each consecutive pair."""
        return tuple("zig" if s == CC else "zag" for s in self.sides if s is not None)

    def __len__(self) -> int:
        return len(self.arrows)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "arrows": list(self.arrows), "pairs": list(self.labels)}


@dataclass(frozen=True)
class Occurrence:
    strand: int
    position: int
    side: str | None


@dataclass
class StrandDiagram:
    model: DimerModel
    strands: list[ZigzagPath]
    crossings: dict[str, list[Occurrence]] = field(default_factory=dict)

    def strand_of_state(self) -> dict[State, tuple[int, int]]:
        out = {}
        for i, z in enumerate(self.strands):
            for k, st in enumerate(z.states):
                out[st] = (i, k)
        return out


@dataclass(frozen=True)
class BadConfiguration:
    kind: str
    strands: tuple[int, ...]
    arrows: tuple[str, ...]
    segments: tuple[tuple[str, ...], ...]
    verdict: Answer

    @property
    def potential(self) -> bool:
        return self.verdict != Answer.YES

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "strands": list(self.strands),
            "arrows": list(self.arrows),
            "segments": [list(s) for s in self.segments],
            "homotopy": str(self.verdict),
        }


def step(model: DimerModel, state: State) -> State | str:
    """Next state, or the final arrow id when the strand ends."""
    a, side = state
    b = model.next_in_face(a, side)
    nxt = opposite(side)
    if (b, nxt) in model.face_of:
        return (b, nxt)
    return b


def _walk(model: DimerModel, state: State, limit: int) -> Iterator[State | tuple[str, None]]:
    """Unroll a strand forward from ``state`` for at most ``limit`` arrows."""
    cur: State | str = state
    for _ in range(limit):
        if isinstance(cur, str):
            yield (cur, None)
            return
        yield cur
        cur = step(model, cur)


def zigzag_paths(model: DimerModel) -> list[ZigzagPath]:
    states = [(a, s) for a in model.arrows for s in (CC, CL) if (a, s) in model.face_of]
    seen: set[State] = set()
    out: list[ZigzagPath] = []
    starts = [(a, s) for a, s in states if (a, opposite(s)) not in model.face_of]
    for st in starts:
        arrows, sides = [], []
        cur: State | str = st
        while not isinstance(cur, str):
            seen.add(cur)
            arrows.append(cur[0])
            sides.append(cur[1])
            cur = step(model, cur)
        arrows.append(cur)
        sides.append(None)
        out.append(ZigzagPath(FINITE, tuple(arrows), tuple(sides)))
    periodic = []
    for st in states:
        if st in seen:
            continue
        cyc = []
        cur = st
        while cur not in seen:
            seen.add(cur)
            cyc.append(cur)
            cur = step(model, cur)
        k = min(range(len(cyc)), key=lambda i: cyc[i])
        cyc = cyc[k:] + cyc[:k]
        periodic.append(ZigzagPath(PERIODIC, tuple(a for a, _ in cyc), tuple(s for _, s in cyc)))
    periodic.sort(key=lambda z: z.states[0])
    return out + periodic


def strand_diagram(model: DimerModel) -> StrandDiagram:
    strands = zigzag_paths(model)
    crossings: dict[str, list[Occurrence]] = {a: [] for a in model.arrows}
    for i, z in enumerate(strands):
        for k, (a, s) in enumerate(zip(z.arrows, z.sides)):
            crossings[a].append(Occurrence(i, k, s))
    return StrandDiagram(model, strands, crossings)


# -- bad configurations ---------------------------------------------------------------


class _Detector:
    def __init__(self, model: DimerModel, hom: Homotopy | None = None):
        self.model = model
        self.hom = hom or Homotopy(model)
        self.diagram = strand_diagram(model)

    def null(self, arrows: tuple[str, ...], start: str) -> Answer:
        end = self.model.head(arrows[-1]) if arrows else start
        return self.hom.is_null_homotopic(Path(start, arrows, end))

    def self_intersections(self) -> list[BadConfiguration]:
        out = []
        m = self.model
        for i, z in enumerate(self.diagram.strands):
            occ: dict[str, list[int]] = {}
            for k, (a, s) in enumerate(zip(z.arrows, z.sides)):
                if s is not None:
                    occ.setdefault(a, []).append(k)
            for a, ks in occ.items():
                for x in ks:
                    for y in ks:
                        if z.sides[x] == z.sides[y]:
                            continue
                        if z.kind == FINITE:
                            if y <= x:
                                continue
                            seg = z.arrows[x:y]
                        else:
                            seg = z.arrows[x:] + z.arrows[:y] if y <= x else z.arrows[x:y]
                        verdict = self.null(seg, m.tail(a))
                        if verdict != Answer.NO:
                            out.append(BadConfiguration(SELF_INTERSECTION, (i,), (a,), (seg,), verdict))
        return out

    def interior_cycles(self) -> list[BadConfiguration]:
        out = []
        for i, z in enumerate(self.diagram.strands):
            if z.kind != PERIODIC:
                continue
            verdict = self.null(z.arrows, self.model.tail(z.arrows[0]))
            if verdict != Answer.NO:
                out.append(BadConfiguration(INTERIOR_CYCLE, (i,), (z.arrows[0],), (z.arrows,), verdict))
        return out

    def _unrolled(self, state: State) -> list[tuple[str, str | None]]:
        where = self.diagram.strand_of_state()[state]
        z = self.diagram.strands[where[0]]
        limit = 2 * len(z.arrows) + 1 if z.kind == PERIODIC else len(z.arrows)
        return list(_walk(self.model, state, limit))

    def lenses(self) -> list[BadConfiguration]:
        m = self.model
        where = self.diagram.strand_of_state()
        out = []
        for alpha in m.internal_arrows:
            wa = self._unrolled((alpha, CC))
            wb = self._unrolled((alpha, CL))
            la = self._tail_labels([a for a, _ in wa])
            lb = self._tail_labels([a for a, _ in wb])
            found = False
            seen_a: set = set()
            for i in range(1, len(wa)):
                if found:
                    break
                beta, sa = wa[i]
                interior_b: set = set()
                for j in range(1, len(wb)):
                    b2, sb = wb[j]
                    if b2 == beta and la[i] == lb[j] and sa != sb and not (seen_a & interior_b):
                        za = tuple(a for a, _ in wa[: i + 1])
                        zb = tuple(a for a, _ in wb[: j + 1])
                        verdict = Answer.YES if self.hom.exact else Answer.UNKNOWN
                        out.append(BadConfiguration(
                            BAD_LENS, (where[(alpha, CC)][0], where[(alpha, CL)][0]),
                            (alpha, beta), (za, zb), verdict))
                        found = True
                        break
                    interior_b.add((b2, lb[j]))
                seen_a.add((beta, la[i]))
        return out

    def _tail_labels(self, arrows: list[str]) -> list[tuple]:
        """Cover label at the tail of each arrow, relative to the tail of the first."""
        pres = self.hom.pres
        lab = pres.identity()
        out = []
        for a in arrows:
            out.append(lab)
            lab = pres.mul(lab, pres.letters[a])
        return out


def detect_bad_configurations(model: DimerModel, hom: Homotopy | None = None) -> list[BadConfiguration]:
    det = _Detector(model, hom)
    return det.self_intersections() + det.interior_cycles() + det.lenses()


@dataclass(frozen=True)
class StrandVerdict:
    answer: Answer
    confirmed: tuple[BadConfiguration, ...]
    potential: tuple[BadConfiguration, ...]


def strand_consistency(model: DimerModel, hom: Homotopy | None = None) -> StrandVerdict:
    found = detect_bad_configurations(model, hom)
    confirmed = tuple(b for b in found if not b.potential)
    potential = tuple(b for b in found if b.potential)
    if confirmed:
        ans = Answer.NO
    elif potential:
        ans = Answer.UNKNOWN
    else:
        ans = Answer.YES
    return StrandVerdict(ans, confirmed, potential)


def is_strand_consistent(model: DimerModel, hom: Homotopy | None = None) -> Answer:
    return strand_consistency(model, hom).answer


# -- reconstruction -------------------------------------------------------------------


def quiver_from_strands(diagram: StrandDiagram | list[ZigzagPath], name: str = "") -> DimerModel:
    """Rebuild the model from strand data alone.

    Consecutive arrows of a strand are consecutive in a face of the side the
    strand leaves through, so the face cycles are the orbits of those
    successor maps; vertices are glued from head/tail identifications.
    """
    strands = diagram.strands if isinstance(diagram, StrandDiagram) else diagram
    succ: dict[State, str] = {}
    arrows: set[str] = set()
    for z in strands:
        arrows.update(z.arrows)
        n = len(z.arrows)
        for k, s in enumerate(z.sides):
            if s is None:
                continue
            nxt = z.arrows[(k + 1) % n]
            succ[(z.arrows[k], s)] = nxt
    parent: dict[tuple[str, str], tuple[str, str]] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in arrows:
        find((a, "h"))
        find((a, "t"))
    for (a, _), b in succ.items():
        parent[find((a, "h"))] = find((b, "t"))
    classes: dict[tuple, list] = {}
    for x in list(parent):
        classes.setdefault(find(x), []).append(x)
    ordered = sorted(classes.values(), key=lambda c: min(c))
    vname = {}
    for i, c in enumerate(ordered):
        for x in c:
            vname[x] = f"v{i}"
    arrs = [Arrow(a, vname[(a, "t")], vname[(a, "h")]) for a in sorted(arrows)]
    faces = []
    done: set[State] = set()
    for side in (CC, CL):
        for a in sorted(arrows):
            if (a, side) not in succ or (a, side) in done:
                continue
            cyc = [a]
            done.add((a, side))
            b = succ[(a, side)]
            while b != a:
                cyc.append(b)
                done.add((b, side))
                b = succ[(b, side)]
            faces.append(Face(f"{side}{len(faces)}", side, tuple(cyc)))
    return DimerModel(set(vname.values()), arrs, faces, name=name)
