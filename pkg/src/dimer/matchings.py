"""Perfect matchings: plabic graph, existence via flows, enumeration and grading."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import CC, CL, Answer, DimerModel, Path


class Degenerate(ValueError):
    def __init__(self, arrows):
        super().__init__(f"arrows in no perfect matching: {', '.join(arrows)}")
        self.arrows = tuple(arrows)


@dataclass(frozen=True)
class PlabicGraph:
    black: tuple[str, ...]
    white: tuple[str, ...]
    internal: frozenset[str]
    edges: dict[str, tuple[str, str]]  # arrow -> (black vertex, white vertex)

    def neighbours(self, v: str) -> list[str]:
        out = []
        for b, w in self.edges.values():
            if b == v:
                out.append(w)
            elif w == v:
                out.append(b)
        return out


def _node(model: DimerModel, arrow: str, side: str) -> str:
    fid = model.face_of.get((arrow, side))
    return f"F:{fid}" if fid is not None else f"B:{arrow}"


def plabic_graph(model: DimerModel) -> PlabicGraph:
    edges = {a: (_node(model, a, CL), _node(model, a, CC)) for a in model.arrows}
    black = sorted({b for b, _ in edges.values()})
    white = sorted({w for _, w in edges.values()})
    if set(black) & set(white):
        raise AssertionError("plabic graph is not bipartite")
    internal = frozenset(f"F:{f}" for f in model.faces)
    return PlabicGraph(tuple(black), tuple(white), internal, edges)


@dataclass(frozen=True)
class PerfectMatching:
    arrows: frozenset[str]

    def __contains__(self, a: str) -> bool:
        return a in self.arrows

    def sorted(self) -> list[str]:
        return sorted(self.arrows)

    def __call__(self, path: Path | Sequence[str]) -> int:
        return intersection_number(self, path)

    def __str__(self) -> str:
        return "{" + ",".join(self.sorted()) + "}"


def is_perfect_matching(model: DimerModel, arrows: Iterable[str]) -> bool:
    s = set(arrows)
    if not s <= set(model.arrows):
        return False
    return all(sum(a in s for a in f.arrows) == 1 for f in model.faces.values())


def intersection_number(matching: PerfectMatching | Iterable[str], path: Path | Sequence[str]) -> int:
    arrows = path.arrows if isinstance(path, Path) else path
    m = matching.arrows if isinstance(matching, PerfectMatching) else set(matching)
    return sum(1 for a in arrows if a in m)


# -- flow with lower bounds ------------------------------------------------------------


class _Flow:
    """Unit-ish capacity max-flow by BFS augmenting paths."""

    def __init__(self):
        self.graph: dict[str, list[list]] = {}

    def add(self, u: str, v: str, cap: int) -> list:
        fwd = [v, cap, None]
        bwd = [u, 0, fwd]
        fwd[2] = bwd
        self.graph.setdefault(u, []).append(fwd)
        self.graph.setdefault(v, []).append(bwd)
        return fwd

    def maxflow(self, s: str, t: str) -> int:
        total = 0
        while True:
            prev: dict[str, list] = {}
            queue = deque([s])
            seen = {s}
            while queue and t not in seen:
                u = queue.popleft()
                for e in self.graph.get(u, []):
                    if e[1] > 0 and e[0] not in seen:
                        seen.add(e[0])
                        prev[e[0]] = e
                        queue.append(e[0])
            if t not in seen:
                return total
            path = []
            v = t
            while v != s:
                e = prev[v]
                path.append(e)
                v = e[2][0]
            push = min(e[1] for e in path)
            for e in path:
                e[1] -= push
                e[2][1] += push
            total += push


def _feasible_matching(model: DimerModel, forced: Sequence[str] = ()) -> frozenset[str] | None:
    """Arrow set meeting every face exactly once, containing ``forced``; None if none exists."""
    g = plabic_graph(model)
    fl = _Flow()
    excess: dict[str, int] = {}
    S, T, SS, TT = "#s", "#t", "#ss", "#tt"

    def edge(u, v, low, cap):
        e = fl.add(u, v, cap - low)
        if low:
            excess[v] = excess.get(v, 0) + low
            excess[u] = excess.get(u, 0) - low
        return e

    for b in g.black:
        low = 1 if b in g.internal else 0
        edge(S, b, low, 1)
    for w in g.white:
        low = 1 if w in g.internal else 0
        edge(w, T, low, 1)
    forced = set(forced)
    arrow_edges = {}
    for a, (b, w) in g.edges.items():
        arrow_edges[a] = (edge(b, w, 1 if a in forced else 0, 1), a in forced)
    fl.add(T, S, 10 ** 9)
    need = 0
    for v, x in excess.items():
        if x > 0:
            fl.add(SS, v, x)
            need += x
        elif x < 0:
            fl.add(v, TT, -x)
    if fl.maxflow(SS, TT) != need:
        return None
    chosen = set()
    for a, (e, was_forced) in arrow_edges.items():
        used = (1 - e[1]) if not was_forced else 1
        if was_forced or used:
            chosen.add(a)
    # the flow saturates every face; boundary vertices carry at most one unit
    if not is_perfect_matching(model, chosen):
        raise AssertionError("flow produced an invalid matching")
    return frozenset(chosen)


@dataclass(frozen=True)
class HallCertificate:
    """Internal vertices of one colour with fewer neighbours than members."""

    colour: str
    faces: tuple[str, ...]
    neighbours: tuple[str, ...]


def _hall_certificate(model: DimerModel) -> HallCertificate | None:
    g = plabic_graph(model)
    for colour, side, other in (("white", g.white, 1), ("black", g.black, 0)):
        adj: dict[str, list[str]] = {}
        for a, bw in g.edges.items():
            u, v = bw[other], bw[1 - other]
            adj.setdefault(u, []).append(v)
        faces = [v for v in side if v in g.internal]
        match: dict[str, str] = {}

        def augment(u, seen):
            for v in adj.get(u, []):
                if v in seen:
                    continue
                seen.add(v)
                if v not in match or augment(match[v], seen):
                    match[v] = u
                    return True
            return False

        matched = {u for u in faces if augment(u, set())}
        free = [u for u in faces if u not in matched]
        if not free:
            continue
        # alternating reachability from an unmatched face
        S = {free[0]}
        N: set[str] = set()
        queue = deque([free[0]])
        while queue:
            u = queue.popleft()
            for v in adj.get(u, []):
                if v not in N:
                    N.add(v)
                    w = match.get(v)
                    if w is not None and w not in S:
                        S.add(w)
                        queue.append(w)
        return HallCertificate(colour, tuple(sorted(x[2:] for x in S)), tuple(sorted(N)))
    return None


@dataclass(frozen=True)
class MatchingSearch:
    matching: PerfectMatching | None
    certificate: HallCertificate | None


def find_matching_with_certificate(model: DimerModel) -> MatchingSearch:
    found = _feasible_matching(model)
    if found is not None:
        return MatchingSearch(PerfectMatching(found), None)
    return MatchingSearch(None, _hall_certificate(model))


def find_matching(model: DimerModel, canonical_limit: int = 300) -> PerfectMatching | None:
    """A perfect matching found by flow.

    For models with at most ``canonical_limit`` arrows the answer is made
    canonical: the lexicographically least sorted arrow list, built greedily.
    """
    found = _feasible_matching(model)
    if found is None:
        return None
    if len(model.arrows) > canonical_limit:
        return PerfectMatching(found)
    forced: list[str] = []
    blocked: set[str] = set()
    for a in model.arrows:
        if a in blocked:
            continue
        m = _feasible_matching(model, forced + [a])
        if m is not None:
            forced.append(a)
            found = m
            for s in (CC, CL):
                f = model.face_at(a, s)
                if f is not None:
                    blocked.update(f.arrows)
    return PerfectMatching(found)


@dataclass(frozen=True)
class MatchingList:
    matchings: tuple[PerfectMatching, ...]
    truncated: bool

    def __len__(self):
        return len(self.matchings)


def enumerate_matchings(model: DimerModel, cap: int | None = None) -> MatchingList:
    """Backtracking over faces in id order, candidate arrows in id order."""
    faces = list(model.faces.values())
    covered: set[str] = set()
    chosen: list[str] = []
    out: list[PerfectMatching] = []
    truncated = False

    def other_faces(a):
        return [model.face_of[(a, s)] for s in (CC, CL) if (a, s) in model.face_of]

    def rec(i: int) -> bool:
        nonlocal truncated
        while i < len(faces) and faces[i].id in covered:
            i += 1
        if i == len(faces):
            if cap is not None and len(out) >= cap:
                truncated = True
                return False
            out.append(PerfectMatching(frozenset(chosen)))
            return True
        for a in sorted(faces[i].arrows):
            fs = other_faces(a)
            if any(f in covered for f in fs):
                continue
            covered.update(fs)
            chosen.append(a)
            ok = rec(i + 1)
            chosen.pop()
            covered.difference_update(fs)
            if not ok:
                return False
        return True

    if faces:
        rec(0)
    out.sort(key=lambda m: m.sorted())
    return MatchingList(tuple(out), truncated)


def count_matchings(model: DimerModel, cap: int | None = None) -> tuple[int, bool]:
    ml = enumerate_matchings(model, cap)
    return len(ml), ml.truncated


@dataclass(frozen=True)
class Nondegeneracy:
    answer: Answer
    unmatchable: tuple[str, ...]


def is_nondegenerate(model: DimerModel) -> Nondegeneracy:
    covered: set[str] = set()
    bad = []
    for a in model.arrows:
        if a in covered:
            continue
        m = _feasible_matching(model, forced=[a])
        if m is None:
            bad.append(a)
        else:
            covered |= m
    return Nondegeneracy(Answer.NO if bad else Answer.YES, tuple(bad))


@dataclass(frozen=True)
class Grading:
    degrees: dict[str, int]
    face_degree: int

    def __call__(self, path: Path | Sequence[str]) -> int:
        arrows = path.arrows if isinstance(path, Path) else path
        return sum(self.degrees[a] for a in arrows)


def grading(model: DimerModel, cap: int = 100000, matchings: Sequence[PerfectMatching] | None = None) -> Grading:
    """Degree of an arrow = number of perfect matchings containing it."""
    if matchings is None:
        ml = enumerate_matchings(model, cap)
        if ml.truncated:
            raise ValueError(f"more than {cap} matchings; raise the cap")
        matchings = ml.matchings
    deg = {a: 0 for a in model.arrows}
    for m in matchings:
        for a in m.arrows:
            deg[a] += 1
    zero = [a for a, d in deg.items() if d == 0]
    if zero:
        raise Degenerate(zero)
    total = len(matchings)
    for f in model.faces.values():
        assert sum(deg[a] for a in f.arrows) == total
    return Grading(deg, total)
