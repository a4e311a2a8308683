"""Submodels induced by face subsets, and digon removal."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .model import CC, CL, DimerModel, Face, ModelError, surface_info, validate

INTERNAL = "internal-two-neighbors"
BOUNDARY = "boundary"


class DisconnectedSelection(ValueError):
    pass


class NonSurfaceSelection(ValueError):
    pass


class NotRemovable(ValueError):
    pass


def submodel(model: DimerModel, faces: Iterable[str], name: str | None = None) -> DimerModel:
    chosen = sorted(set(faces))
    missing = [f for f in chosen if f not in model.faces]
    if missing:
        raise KeyError(f"unknown faces: {missing}")
    if not chosen:
        raise DisconnectedSelection("empty face selection")
    fs = [model.faces[f] for f in chosen]
    arrows = {a for f in fs for a in f.arrows}
    # connectivity through shared arrows
    owner: dict[str, list[str]] = {}
    for f in fs:
        for a in f.arrows:
            owner.setdefault(a, []).append(f.id)
    seen = {chosen[0]}
    stack = [chosen[0]]
    while stack:
        x = stack.pop()
        for a in model.faces[x].arrows:
            for y in owner[a]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    if len(seen) != len(chosen):
        raise DisconnectedSelection(f"faces {sorted(set(chosen) - seen)} are not glued to the rest")
    verts = {model.tail(a) for a in arrows} | {model.head(a) for a in arrows}
    sub = DimerModel(verts, [model.arrows[a] for a in arrows], fs,
                     name=name or f"{model.name}_sub")
    rep = validate(sub)
    if not rep.ok:
        raise NonSurfaceSelection("; ".join(map(str, rep.violations)))
    return sub


@dataclass(frozen=True)
class ReductionStep:
    face: str
    case: str
    removed_arrows: tuple[str, ...]
    merged_face: str | None

    def to_dict(self) -> dict:
        return {"face": self.face, "case": self.case, "removed_arrows": list(self.removed_arrows),
                "merged_face": self.merged_face}


@dataclass
class ReductionLog:
    steps: list[ReductionStep] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def to_dict(self) -> dict:
        return {"steps": [s.to_dict() for s in self.steps], "notes": list(self.notes)}

    @classmethod
    def from_dict(cls, data: dict) -> "ReductionLog":
        steps = [ReductionStep(s["face"], s["case"], tuple(s["removed_arrows"]), s["merged_face"])
                 for s in data["steps"]]
        return cls(steps, list(data.get("notes", ())))


def _digon_case(model: DimerModel, fid: str) -> str | None:
    f = model.faces[fid]
    if len(f.arrows) != 2 or len(model.faces) == 1:
        return None
    a, b = f.arrows
    ia, ib = model.is_internal(a), model.is_internal(b)
    if ia and ib:
        other = CL if f.orientation == CC else CC
        if model.face_of[(a, other)] != model.face_of[(b, other)]:
            return INTERNAL
        return None
    if ia != ib:
        return BOUNDARY
    return None


def removable_digons(model: DimerModel) -> list[str]:
    return [fid for fid in model.faces if _digon_case(model, fid) is not None]


def remove_digon(model: DimerModel, face: str) -> tuple[DimerModel, ReductionStep]:
    if face not in model.faces:
        raise KeyError(face)
    case = _digon_case(model, face)
    if case is None:
        raise NotRemovable(f"digon {face!r} cannot be removed")
    f = model.faces[face]
    a, b = f.arrows
    other = CL if f.orientation == CC else CC
    if case == INTERNAL:
        fa, fb = model.face_at(a, other), model.face_at(b, other)

        def ret(x, g):
            i = g.arrows.index(x)
            return g.arrows[i + 1:] + g.arrows[:i]

        merged_id = min(fa.id, fb.id)
        merged = Face(merged_id, other, ret(b, fb) + ret(a, fa))
        faces = [g for g in model.faces.values() if g.id not in (face, fa.id, fb.id)] + [merged]
        arrows = [x for x in model.arrows.values() if x.id not in (a, b)]
        removed = (a, b)
    else:
        bnd = a if not model.is_internal(a) else b
        faces = [g for g in model.faces.values() if g.id != face]
        arrows = [x for x in model.arrows.values() if x.id != bnd]
        removed = (bnd,)
        merged_id = None
    verts = {x.tail for x in arrows} | {x.head for x in arrows}
    out = DimerModel(verts, arrows, faces, name=model.name)
    rep = validate(out)
    if not rep.ok:
        raise ModelError(f"digon removal produced an invalid model: {rep.violations}")
    return out, ReductionStep(face, case, removed, merged_id)


def reduce(model: DimerModel, assert_strongly_consistent: bool = False) -> tuple[DimerModel, ReductionLog]:
    """Remove removable digons, lowest face id first, until none is left."""
    log = ReductionLog()
    before = surface_info(model)
    cur = model
    while True:
        cand = removable_digons(cur)
        if not cand:
            break
        cur, step = remove_digon(cur, cand[0])
        log.steps.append(step)
        if surface_info(cur) != before:
            raise AssertionError("digon removal changed the surface")
    if cur.digons and not (len(cur.faces) == 1):
        log.notes.append(f"digons left that cannot be removed: {', '.join(cur.digons)}")
        if assert_strongly_consistent:
            raise AssertionError("BUG: strongly consistent model kept irremovable digons")
    return cur.renamed(f"{model.name}_red"), log


def replay(model: DimerModel, log: ReductionLog) -> DimerModel:
    cur = model
    for step in log.steps:
        cur, again = remove_digon(cur, step.face)
        if again != step:
            raise AssertionError(f"replay diverged at {step}")
    return cur.renamed(f"{model.name}_red")
