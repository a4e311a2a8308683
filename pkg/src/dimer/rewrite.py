"""Path rewriting in the dimer algebra.

Two paths are equivalent when a chain of basic morphs (swapping the two
return paths of an internal arrow) takes one to the other.  The engine
explores equivalence classes by breadth-first search with a node budget,
and derives c-values by stripping face-paths out of class members.
"""

from __future__ import annotations

import heapq
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

from .homotopy import Homotopy
from .matchings import PerfectMatching, enumerate_matchings
from .model import CC, CL, Answer, DimerModel, Path, iter_paths, surface_info

LEFT = "left"    # replaces the cc return path with the cl one
RIGHT = "right"  # replaces the cl return path with the cc one

CONSISTENT = "consistent_up_to"
INCONSISTENT = "inconsistent"
UNKNOWN = "unknown"


def default_budget() -> int:
    return int(os.environ.get("DIMER_BUDGET", "20000"))


class InvalidSite(ValueError):
    pass


class EndpointMismatch(ValueError):
    pass


class NotAnAnnulus(ValueError):
    pass


class NotStronglyConsistent(ValueError):
    pass


@dataclass(frozen=True)
class MorphSite:
    arrow: str
    side: str
    position: int
    ambiguous: bool = False

    def to_dict(self) -> dict:
        return {"arrow": self.arrow, "side": self.side, "position": self.position,
                "ambiguous": self.ambiguous}


Key = tuple[str, tuple[str, ...]]  # (start vertex, arrows)


class _Incomplete(Exception):
    def __init__(self, key: Key):
        super().__init__("class exploration hit the budget")
        self.key = key


class _Conflict(Exception):
    def __init__(self, witness: dict):
        super().__init__(witness.get("reason", "inconsistent"))
        self.witness = witness


class Engine:
    """Morph graph search over one model, with memoised equivalence classes."""

    def __init__(self, model: DimerModel, hom: Homotopy | None = None):
        self.model = model
        self.hom = hom or Homotopy(model)
        # pattern -> list of (replacement, arrow, kind)
        self.by_first: dict[str, list[tuple[tuple[str, ...], tuple[str, ...], str, str]]] = {}
        for a in model.internal_arrows:
            rcc = self._ret(a, CC)
            rcl = self._ret(a, CL)
            self.by_first.setdefault(rcc[0], []).append((rcc, rcl, a, LEFT))
            self.by_first.setdefault(rcl[0], []).append((rcl, rcc, a, RIGHT))
        for lst in self.by_first.values():
            lst.sort(key=lambda t: (t[2], t[3]))
        self.cycles_by_first: dict[str, list[tuple[str, ...]]] = {}
        for f in model.faces.values():
            n = len(f.arrows)
            for i in range(n):
                rot = f.arrows[i:] + f.arrows[:i]
                self.cycles_by_first.setdefault(rot[0], []).append(rot)
        self.class_id: dict[Key, int] = {}
        self.oversized: dict[Key, int] = {}
        self.members: list[frozenset[Key]] = []
        self._strip: dict[int, tuple[int, int]] = {}
        self._matchings: tuple[PerfectMatching, ...] | None = None
        self._infinite_patterns: dict[str, list[tuple[str, ...]]] | None = None
        self._balls: dict[tuple[Key, int], dict[Key, Key | None]] = {}

    def _ret(self, a: str, side: str) -> tuple[str, ...]:
        f = self.model.face_at(a, side)
        i = f.arrows.index(a)
        return f.arrows[i + 1:] + f.arrows[:i]

    # -- morphs -----------------------------------------------------------------

    def raw_sites(self, arrows: tuple[str, ...]) -> list[tuple[int, tuple, tuple, str, str]]:
        out = []
        n = len(arrows)
        for pos in range(n):
            for pat, rep, a, kind in self.by_first.get(arrows[pos], ()):
                k = len(pat)
                if pos + k <= n and arrows[pos:pos + k] == pat:
                    out.append((pos, pat, rep, a, kind))
        return out

    def neighbours(self, key: Key) -> Iterator[Key]:
        v, arrows = key
        for pos, pat, rep, _, _ in self.raw_sites(arrows):
            yield (v, arrows[:pos] + rep + arrows[pos + len(pat):])

    def sites(self, path: Path) -> list[MorphSite]:
        raw = self.raw_sites(path.arrows)
        counts: dict[tuple[str, str], int] = {}
        for pos, pat, rep, a, kind in raw:
            counts[(a, kind)] = counts.get((a, kind), 0) + 1
        out = [MorphSite(a, kind, pos, counts[(a, kind)] > 1) for pos, pat, rep, a, kind in raw]
        out.sort(key=lambda s: (s.position, s.arrow, s.side))
        return out

    def apply(self, path: Path, site: MorphSite) -> Path:
        side = CC if site.side == LEFT else CL
        if site.arrow not in self.model.arrows or not self.model.is_internal(site.arrow):
            raise InvalidSite(f"{site.arrow!r} is not an internal arrow")
        pat = self._ret(site.arrow, side)
        rep = self._ret(site.arrow, CL if side == CC else CC)
        p = site.position
        if path.arrows[p:p + len(pat)] != pat:
            raise InvalidSite(f"no return path of {site.arrow!r} at position {p}")
        return Path(path.start, path.arrows[:p] + rep + path.arrows[p + len(pat):], path.end)

    # -- equivalence classes --------------------------------------------------------

    def explore(self, key: Key, budget: int) -> int:
        """Class id of ``key``; raises _Incomplete when the class exceeds ``budget`` nodes."""
        cid = self.class_id.get(key)
        if cid is not None:
            return cid
        if self.oversized.get(key, 0) >= budget:
            raise _Incomplete(key)
        v, arrows = key
        if len(arrows) >= 2:
            # a path with a subpath of infinite class has an infinite class itself
            for sub in ((v, arrows[:-1]), (self.model.head(arrows[0]), arrows[1:])):
                try:
                    self.explore(sub, budget)
                except _Incomplete:
                    if self.oversized.get(sub, 0) == float("inf"):
                        self.oversized[key] = float("inf")
                        raise _Incomplete(key) from None
        seen = {key}
        queue = deque([key])
        n0 = len(key[1])
        while queue:
            cur = queue.popleft()
            for nxt in self.neighbours(cur):
                if nxt not in seen:
                    seen.add(nxt)
                    # a path equivalent to a longer path containing it has an infinite class
                    pumps = (len(nxt[1]) > n0 and self._pumps(nxt, seen, n0)) or self._has_infinite_pattern(nxt)
                    if pumps:
                        budget = float("inf")
                    # a node already known to lie in an oversized class settles this one
                    known = self.oversized.get(nxt, 0)
                    if known >= budget:
                        budget = known
                    if pumps or len(seen) > budget or known >= budget:
                        # every node seen lies in the same oversized class
                        for k in seen:
                            self.oversized[k] = max(self.oversized.get(k, 0), budget)
                        raise _Incomplete(key)
                    queue.append(nxt)
        cid = len(self.members)
        self.members.append(frozenset(seen))
        for k in seen:
            self.class_id[k] = cid
        return cid

    def _has_infinite_pattern(self, node: Key) -> bool:
        """Whether ``node`` contains a return path whose class is infinite."""
        if self._infinite_patterns is None:
            self._infinite_patterns = {}
            found: dict[str, list[tuple[str, ...]]] = {}
            for lst in self.by_first.values():
                for pat, _, _, _ in lst:
                    key = (self.model.tail(pat[0]), pat)
                    try:
                        self.explore(key, 2000)
                    except _Incomplete:
                        if self.oversized.get(key, 0) == float("inf"):
                            found.setdefault(pat[0], []).append(pat)
            self._infinite_patterns = found
        if not self._infinite_patterns:
            return False
        arrows = node[1]
        n = len(arrows)
        for i, a in enumerate(arrows):
            for pat in self._infinite_patterns.get(a, ()):
                if arrows[i:i + len(pat)] == pat and len(pat) < n:
                    return True
        return False

    def _pumps(self, node: Key, seen: set[Key], k: int) -> bool:
        """Whether a proper subpath of ``node`` of length ``k`` is an earlier member of the class."""
        v, arrows = node
        if k == 0:
            return False
        n = len(arrows)
        starts = [v] + [self.model.head(a) for a in arrows]
        return any((starts[i], arrows[i:i + k]) in seen for i in range(n - k + 1))

    def try_class(self, key: Key, budget: int) -> int | None:
        try:
            return self.explore(key, budget)
        except _Incomplete:
            return None

    def strip(self, cid: int, budget: int) -> tuple[int, int]:
        """(minimal class id, c-value) of a class, checking every face-path removal agrees."""
        if cid in self._strip:
            return self._strip[cid]
        results: dict[tuple[int, int], tuple[Key, Key]] = {}
        for key in sorted(self.members[cid], key=lambda k: (len(k[1]), k[1])):
            v, arrows = key
            for pos in range(len(arrows)):
                for cyc in self.cycles_by_first.get(arrows[pos], ()):
                    k = len(cyc)
                    if arrows[pos:pos + k] != cyc:
                        continue
                    q = (v, arrows[:pos] + arrows[pos + k:])
                    qc = self.explore(q, budget)
                    root, c = self.strip(qc, budget)
                    results.setdefault((root, c + 1), (key, q))
        if not results:
            out = (cid, 0)
        elif len(results) == 1:
            out = next(iter(results))
        else:
            (r1, w1), (r2, w2) = list(results.items())[:2]
            raise _Conflict({
                "reason": "removing different face-paths from one class gives different chains",
                "path": list(w1[0][1]), "start": w1[0][0],
                "reduced_1": list(w1[1][1]), "c_1": r1[1],
                "reduced_2": list(w2[1][1]), "c_2": r2[1],
            })
        self._strip[cid] = out
        return out

    def representative(self, cid: int) -> Path:
        v, arrows = min(self.members[cid], key=lambda k: (len(k[1]), k[1]))
        end = self.model.head(arrows[-1]) if arrows else v
        return Path(v, arrows, end)

    def chain(self, p: Key, q: Key, budget: int) -> list[tuple[MorphSite, Key]] | None:
        """Shortest morph chain from p to q, bidirectional BFS; None if not found in budget."""
        if p == q:
            return []
        par_f: dict[Key, Key | None] = {p: None}
        par_b: dict[Key, Key | None] = {q: None}
        qf, qb = deque([p]), deque([q])
        meet = None
        while qf and qb and meet is None and len(par_f) + len(par_b) <= budget:
            for frontier, par, other in ((qf, par_f, par_b), (qb, par_b, par_f)):
                for _ in range(len(frontier)):
                    cur = frontier.popleft()
                    for nxt in self.neighbours(cur):
                        if nxt not in par:
                            par[nxt] = cur
                            frontier.append(nxt)
                            if nxt in other:
                                meet = nxt
                                break
                    if meet is not None:
                        break
                if meet is not None:
                    break
        if meet is None:
            return None
        seq = []
        x = meet
        while x is not None:
            seq.append(x)
            x = par_f[x]
        seq.reverse()
        x = par_b[meet]
        while x is not None:
            seq.append(x)
            x = par_b[x]
        steps = []
        for a, b in zip(seq, seq[1:]):
            steps.append((self._site_between(a, b), b))
        return steps

    def ball(self, key: Key, size: int) -> dict[Key, Key | None]:
        """Breadth-first neighbourhood of ``key`` with at most ``size`` nodes, as a parent map (memoised)."""
        got = self._balls.get((key, size))
        if got is not None:
            return got
        par: dict[Key, Key | None] = {key: None}
        queue = deque([key])
        while queue and len(par) < size:
            cur = queue.popleft()
            for nxt in self.neighbours(cur):
                if nxt not in par:
                    par[nxt] = cur
                    queue.append(nxt)
        self._balls[(key, size)] = par
        return par

    def ball_chain(self, p: Key, q: Key, size: int) -> list[tuple[MorphSite, Key]] | None:
        """Morph chain through the memoised balls around p and q; None if they do not meet."""
        bp, bq = self.ball(p, size), self.ball(q, size)
        small, large = (bp, bq) if len(bp) <= len(bq) else (bq, bp)
        meet = next((k for k in small if k in large), None)
        if meet is None:
            return None
        seq = []
        x = meet
        while x is not None:
            seq.append(x)
            x = bp[x]
        seq.reverse()
        x = bq[meet]
        while x is not None:
            seq.append(x)
            x = bq[x]
        return [(self._site_between(a, b), b) for a, b in zip(seq, seq[1:])]

    def _site_between(self, a: Key, b: Key) -> MorphSite:
        for pos, pat, rep, arrow, kind in self.raw_sites(a[1]):
            if a[1][:pos] + rep + a[1][pos + len(pat):] == b[1]:
                return MorphSite(arrow, kind, pos)
        raise AssertionError("consecutive chain entries are not one morph apart")

    def matchings(self, cap: int = 256) -> tuple[PerfectMatching, ...]:
        if self._matchings is None:
            self._matchings = enumerate_matchings(self.model, cap).matchings
        return self._matchings


def engine_for(model: DimerModel) -> Engine:
    eng = model.__dict__.get("_engine")
    if eng is None:
        eng = Engine(model)
        model.__dict__["_engine"] = eng
    return eng


def _key(path: Path) -> Key:
    return (path.start, tuple(path.arrows))


def _as_path(model: DimerModel, p) -> Path:
    if isinstance(p, Path):
        return model.path(p.start, p.arrows)
    return model.path_from_arrows(list(p))


# -- public operations ----------------------------------------------------------------


def morph_sites(model: DimerModel, path: Path) -> list[MorphSite]:
    return engine_for(model).sites(path)


def apply_morph(model: DimerModel, path: Path, site: MorphSite) -> Path:
    out = engine_for(model).apply(path, site)
    if __debug__:
        hom = engine_for(model).hom
        assert hom.class_of(out) == hom.class_of(path)
    return out


@dataclass(frozen=True)
class Equivalence:
    answer: Answer
    chain: tuple[MorphSite, ...] = ()
    reason: str = ""


def are_equivalent(model: DimerModel, p: Path, q: Path, budget: int | None = None) -> Equivalence:
    budget = budget or default_budget()
    if (p.start, p.end) != (q.start, q.end):
        raise EndpointMismatch(f"{p} and {q} have different endpoints")
    if p.arrows == q.arrows:
        return Equivalence(Answer.YES, (), "identical")
    eng = engine_for(model)
    if eng.hom.class_of(p) != eng.hom.class_of(q):
        if eng.hom.exact:
            return Equivalence(Answer.NO, (), "homotopy classes differ")
    for m in eng.matchings():
        if m(p) != m(q):
            return Equivalence(Answer.NO, (), f"intersection numbers differ for matching {m}")
    kp, kq = _key(p), _key(q)
    cp = eng.try_class(kp, budget)
    if cp is not None:
        if kq not in eng.members[cp]:
            return Equivalence(Answer.NO, (), "class of the first path exhausted")
        ch = eng.chain(kp, kq, 2 * len(eng.members[cp]) + 2)
        return Equivalence(Answer.YES, tuple(s for s, _ in ch), "morph chain")
    if eng.oversized.get(kp) == float("inf"):
        # an infinite class: search memoised neighbourhoods so repeated queries stay cheap
        ch = eng.ball_chain(kp, kq, max(64, budget // 20))
        if ch is not None:
            return Equivalence(Answer.YES, tuple(s for s, _ in ch), "morph chain")
        if eng.try_class(kq, budget) is not None:
            return Equivalence(Answer.NO, (), "class of the second path is finite")
        return Equivalence(Answer.UNKNOWN, (), "infinite class; bounded neighbourhoods do not meet")
    ch = eng.chain(kp, kq, budget)
    if ch is not None:
        return Equivalence(Answer.YES, tuple(s for s, _ in ch), "morph chain")
    return Equivalence(Answer.UNKNOWN, (), f"budget {budget} exhausted")


# -- normal forms -----------------------------------------------------------------------


@dataclass(frozen=True)
class NormalForm:
    homotopy_class: object
    representative: Path | None
    c_value: int | None
    evidence: str  # matching-certified | bfs-certified | bounded-unknown

    @property
    def certified(self) -> bool:
        return self.evidence != "bounded-unknown"

    def to_dict(self) -> dict:
        rep = None
        if self.representative is not None:
            rep = {"start": self.representative.start, "arrows": list(self.representative.arrows)}
        return {"class": str(self.homotopy_class), "representative": rep,
                "c_value": self.c_value, "evidence": self.evidence}


class _WeightedCover:
    """Least-weight paths in the universal cover, weighted by a positive grading."""

    def __init__(self, eng: Engine, weights: dict[str, int]):
        self.eng = eng
        self.model = eng.model
        self.pres = eng.hom.pres
        self.w = weights

    def least(self, start: str, target: tuple[str, tuple], cap: int,
              start_label: tuple | None = None) -> tuple[int, tuple[str, ...]] | None:
        pres = self.pres
        lab0 = pres.identity() if start_label is None else start_label
        src = (start, lab0)
        dist = {src: 0}
        heap = [(0, 0, (), src)]
        done = set()
        while heap:
            d, n, arrows, node = heapq.heappop(heap)
            if node in done:
                continue
            done.add(node)
            if node == target:
                return d, arrows
            if len(done) > cap:
                return None
            v, lab = node
            for a in self.model.out_arrows[v]:
                nxt = (self.model.head(a), pres.mul(lab, pres.letters[a]))
                if nxt in done:
                    continue
                nd = d + self.w[a]
                if nxt not in dist or nd <= dist[nxt]:
                    dist[nxt] = nd
                    heapq.heappush(heap, (nd, n + 1, arrows + (a,), nxt))
        return None


def _grading_if_consistent(model: DimerModel, eng: Engine) -> dict[str, int] | None:
    """Arrow degrees summed over all matchings, when the least-weight search is sound."""
    if "_weights" in model.__dict__:
        return model.__dict__["_weights"]
    from .strands import strand_consistency

    out = None
    surf = eng.hom.pres.surface
    if eng.hom.exact and not (surf.is_closed and surf.genus == 0):
        if strand_consistency(model, eng.hom).answer == Answer.YES:
            ml = enumerate_matchings(model, cap=4096)
            if ml.matchings and not ml.truncated:
                deg = {a: 0 for a in model.arrows}
                for m in ml.matchings:
                    for a in m.arrows:
                        deg[a] += 1
                if all(deg.values()):
                    out = deg
    model.__dict__["_weights"] = out
    return out


def normal_form(model: DimerModel, p: Path, budget: int | None = None) -> NormalForm:
    budget = budget or default_budget()
    eng = engine_for(model)
    cls = eng.hom.class_of(p)
    weights = _grading_if_consistent(model, eng)
    if weights is not None:
        n_match = sum(weights[a] for a in model.faces[next(iter(model.faces))].arrows)
        wc = _WeightedCover(eng, weights)
        res = wc.least(p.start, (p.end, cls.label), cap=budget)
        if res is not None:
            wmin, arrows = res
            wp = sum(weights[a] for a in p.arrows)
            diff = wp - wmin
            if diff % n_match:
                raise AssertionError("grading difference is not a multiple of the face degree")
            rep = Path(p.start, arrows, p.end)
            return NormalForm(cls, rep, diff // n_match, "matching-certified")
    try:
        cid = eng.explore(_key(p), budget)
        root, c = eng.strip(cid, budget)
    except _Incomplete:
        return NormalForm(cls, None, None, "bounded-unknown")
    except _Conflict:
        return NormalForm(cls, None, None, "bounded-unknown")
    return NormalForm(cls, eng.representative(root), c, "bfs-certified")


def c_value(model: DimerModel, p: Path, budget: int | None = None) -> int | None:
    return normal_form(model, p, budget).c_value


def is_minimal(model: DimerModel, p: Path, budget: int | None = None) -> Answer:
    if p.is_constant:
        return Answer.YES
    nf = normal_form(model, p, budget)
    if nf.c_value is None:
        return Answer.UNKNOWN
    return Answer.YES if nf.c_value == 0 else Answer.NO


@dataclass(frozen=True)
class LeftmostResult:
    path: Path
    diverged: bool
    steps: int


def _moving_sites(eng: Engine, p: Path, kind: str) -> list[MorphSite]:
    """Sites of one side whose morph changes the path.

    When both return paths of an arrow coincide (only on the sphere) the
    morph is the identity and does not count as a direction to move in.
    """
    return [s for s in eng.sites(p) if s.side == kind
            and eng._ret(s.arrow, CC) != eng._ret(s.arrow, CL)]


def _directional_form(model: DimerModel, p: Path, kind: str, step_budget: int) -> LeftmostResult:
    eng = engine_for(model)
    cur = p
    for k in range(step_budget):
        sites = _moving_sites(eng, cur, kind)
        if not sites:
            return LeftmostResult(cur, False, k)
        cur = eng.apply(cur, sites[0])
    return LeftmostResult(cur, bool(_moving_sites(eng, cur, kind)), step_budget)


def leftmost_form(model: DimerModel, p: Path, step_budget: int = 100) -> LeftmostResult:
    """Apply left-morphs (lowest position, then arrow id) until none are left."""
    return _directional_form(model, p, LEFT, step_budget)


def rightmost_form(model: DimerModel, p: Path, step_budget: int = 100) -> LeftmostResult:
    return _directional_form(model, p, RIGHT, step_budget)


def is_leftmost(model: DimerModel, p: Path) -> bool:
    return not _moving_sites(engine_for(model), p, LEFT)


def is_rightmost(model: DimerModel, p: Path) -> bool:
    return not _moving_sites(engine_for(model), p, RIGHT)


# -- bounded consistency checks ------------------------------------------------------------


@dataclass(frozen=True)
class ConsistencyVerdict:
    verdict: str
    length_bound: int
    budget: int
    witness: dict | None = None
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict == CONSISTENT

    def __str__(self) -> str:
        if self.verdict == CONSISTENT:
            return f"consistent up to length {self.length_bound}"
        if self.verdict == INCONSISTENT:
            return f"inconsistent ({self.witness.get('reason', '')})"
        if self.witness is not None:
            return f"unknown (potential: {self.witness.get('reason', '')})"
        return f"unknown (budget {self.budget} exhausted up to length {self.length_bound})"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "length_bound": self.length_bound, "budget": self.budget,
                "witness": self.witness, "stats": self.stats}


def _buckets(model: DimerModel, eng: Engine, L: int, budget: int):
    """Classes of all paths up to length L grouped by endpoints and homotopy class."""
    buckets: dict[tuple, set[int]] = {}
    incomplete = 0
    for p in iter_paths(model, L):
        cid = eng.try_class(_key(p), budget)
        if cid is None:
            incomplete += 1
            continue
        lab = eng.hom.label(p.arrows)
        buckets.setdefault((p.start, p.end, lab), set()).add(cid)
    return buckets, incomplete


def _path_dict(eng: Engine, cid: int) -> dict:
    r = eng.representative(cid)
    return {"start": r.start, "arrows": list(r.arrows)}


def check_path_consistency(model: DimerModel, length_bound: int = 6,
                           budget: int | None = None) -> ConsistencyVerdict:
    """Falsifier for path-consistency on paths up to ``length_bound``.

    Within each (endpoints, homotopy class) bucket every class must reduce
    to the same minimal class by stripping face-paths, and distinct classes
    must have distinct c-values.
    """
    budget = budget or default_budget()
    eng = engine_for(model)
    buckets, incomplete = _buckets(model, eng, length_bound, budget)
    undecided = 0
    # with homology labels only, one bucket may hold several homotopy classes,
    # so bucket-level findings are potential rather than confirmed
    potential = None
    for bkey in sorted(buckets, key=lambda k: (k[0], k[1], str(k[2]))):
        cids = sorted(buckets[bkey])
        info = {}
        for cid in cids:
            try:
                info[cid] = eng.strip(cid, budget)
            except _Incomplete:
                undecided += 1
            except _Conflict as exc:
                w = dict(exc.witness)
                return ConsistencyVerdict(INCONSISTENT, length_bound, budget, w)
        finding = None
        roots = sorted({r for r, _ in info.values()})
        if len(roots) > 1:
            finding = {
                "reason": "two inequivalent minimal paths in one homotopy class",
                "path_1": _path_dict(eng, roots[0]), "path_2": _path_dict(eng, roots[1]),
            }
        else:
            by_c: dict[int, int] = {}
            for cid, (root, c) in sorted(info.items()):
                if c in by_c and by_c[c] != cid:
                    finding = {
                        "reason": "inequivalent homotopic paths with equal c-value",
                        "c_value": c,
                        "path_1": _path_dict(eng, by_c[c]), "path_2": _path_dict(eng, cid),
                    }
                    break
                by_c[c] = cid
        if finding is not None:
            if eng.hom.exact:
                return ConsistencyVerdict(INCONSISTENT, length_bound, budget, finding)
            if potential is None:
                potential = {**finding, "potential": True,
                             "note": "homotopy is known only up to homology on this surface"}
    stats = {"classes": len(eng.members), "buckets": len(buckets),
             "incomplete_paths": incomplete, "undecided_classes": undecided}
    if potential is not None:
        return ConsistencyVerdict(UNKNOWN, length_bound, budget, potential, stats)
    if incomplete or undecided:
        return ConsistencyVerdict(UNKNOWN, length_bound, budget, None, stats)
    return ConsistencyVerdict(CONSISTENT, length_bound, budget, None, stats)


def check_cancellativity(model: DimerModel, length_bound: int = 4, budget: int | None = None,
                         extension: int = 2) -> ConsistencyVerdict:
    """Search for [p a] = [q a] or [a p] = [a q] with [p] != [q]."""
    budget = budget or default_budget()
    eng = engine_for(model)
    buckets, incomplete = _buckets(model, eng, length_bound, budget)
    exts_after = {v: [p for p in iter_paths(model, extension, v) if p.arrows] for v in model.vertices}
    exts_before: dict[str, list[Path]] = {v: [] for v in model.vertices}
    for v in model.vertices:
        for p in iter_paths(model, extension, v):
            if p.arrows:
                exts_before[p.end].append(p)
    undecided = 0
    for (v1, v2, _), cids in sorted(buckets.items(), key=lambda kv: (kv[0][0], kv[0][1], str(kv[0][2]))):
        reps = [eng.representative(c) for c in sorted(cids)]
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                p, q = reps[i], reps[j]
                for a in exts_after[v2]:
                    ka = (p.start, p.arrows + a.arrows)
                    kb = (q.start, q.arrows + a.arrows)
                    ca, cb = eng.try_class(ka, budget), eng.try_class(kb, budget)
                    if ca is None or cb is None:
                        undecided += 1
                        continue
                    if ca == cb:
                        return ConsistencyVerdict(INCONSISTENT, length_bound, budget, {
                            "reason": "right cancellation fails",
                            "p": {"start": p.start, "arrows": list(p.arrows)},
                            "q": {"start": q.start, "arrows": list(q.arrows)},
                            "extension": list(a.arrows)})
                for b in exts_before[v1]:
                    ka = (b.start, b.arrows + p.arrows)
                    kb = (b.start, b.arrows + q.arrows)
                    ca, cb = eng.try_class(ka, budget), eng.try_class(kb, budget)
                    if ca is None or cb is None:
                        undecided += 1
                        continue
                    if ca == cb:
                        return ConsistencyVerdict(INCONSISTENT, length_bound, budget, {
                            "reason": "left cancellation fails",
                            "p": {"start": p.start, "arrows": list(p.arrows)},
                            "q": {"start": q.start, "arrows": list(q.arrows)},
                            "extension": list(b.arrows)})
    stats = {"incomplete_paths": incomplete, "undecided_pairs": undecided}
    if incomplete or undecided:
        return ConsistencyVerdict(UNKNOWN, length_bound, budget, None, stats)
    return ConsistencyVerdict(CONSISTENT, length_bound, budget, None, stats)


# -- boundary finiteness ------------------------------------------------------------------


@dataclass(frozen=True)
class FinitenessVerdict:
    answer: Answer
    dimension: int | None = None
    witness: dict | None = None
    length_bound: int = 0

    def to_dict(self) -> dict:
        return {"answer": str(self.answer), "dimension": self.dimension,
                "witness": self.witness, "length_bound": self.length_bound}


def boundary_finiteness(model: DimerModel, length_bound: int = 8, budget: int | None = None,
                        powers: int = 6) -> FinitenessVerdict:
    """Dimension of the algebra modulo the boundary idempotents, when it is finite.

    A class survives when no member touches a boundary vertex.  If no path
    of some length survives, no longer one does, which certifies finiteness.
    """
    budget = budget or default_budget()
    eng = engine_for(model)
    bverts = model.boundary_vertices
    inner = [v for v in model.vertices if v not in bverts]

    def touches(key: Key) -> bool:
        v, arrows = key
        return v in bverts or any(model.head(a) in bverts for a in arrows)

    def survives(p: Path) -> Answer:
        cid = eng.try_class(_key(p), budget)
        if cid is None:
            return Answer.UNKNOWN
        return Answer.NO if any(touches(k) for k in eng.members[cid]) else Answer.YES

    classes: set[int] = set()
    by_len: dict[int, int] = {}
    unknown = False
    surviving_cycles: list[Path] = []
    for v in inner:
        for p in iter_paths(model, length_bound, v):
            if p.is_constant:
                continue
            if touches(_key(p)):
                continue
            s = survives(p)
            if s == Answer.UNKNOWN:
                unknown = True
                continue
            if s == Answer.YES:
                cid = eng.class_id[_key(p)]
                if cid not in classes:
                    classes.add(cid)
                by_len[len(p)] = by_len.get(len(p), 0) + 1
                if p.start == p.end:
                    surviving_cycles.append(p)
    for k in range(1, length_bound + 1):
        if by_len.get(k, 0) == 0 and not unknown:
            dim = len(inner) + len(classes)
            return FinitenessVerdict(Answer.YES, dim, None, length_bound)
    if not bverts:
        for c in surviving_cycles:
            if not eng.hom.class_of(c).is_identity and eng.hom.exact:
                return FinitenessVerdict(Answer.NO, None, {
                    "reason": "no boundary; a cycle with nontrivial homotopy class has pairwise distinct powers",
                    "cycle": {"start": c.start, "arrows": list(c.arrows)}}, length_bound)
    for c in sorted(surviving_cycles, key=lambda p: (len(p), p.arrows)):
        ids = []
        ok = True
        for k in range(1, powers + 1):
            pk = Path(c.start, c.arrows * k, c.end)
            if survives(pk) != Answer.YES:
                ok = False
                break
            ids.append(eng.class_id[_key(pk)])
        if ok and len(set(ids)) == len(ids):
            return FinitenessVerdict(Answer.NO, None, {
                "reason": f"powers 1..{powers} of a cycle survive and are pairwise inequivalent",
                "cycle": {"start": c.start, "arrows": list(c.arrows)}}, length_bound)
    return FinitenessVerdict(Answer.UNKNOWN, None, None, length_bound)


# -- Noetherian criterion on annuli -----------------------------------------------------------


@dataclass(frozen=True)
class NoetherianVerdict:
    satisfied: bool
    matching: tuple[str, ...] | None
    weights: dict | None = None

    def __str__(self) -> str:
        if self.satisfied:
            return "satisfied by matching {" + ",".join(self.matching) + "}"
        return "unknown (no matching equalises the loop weights)"


def minimal_loop(model: DimerModel, vertex: str, direction: int, cap: int = 200000) -> Path | None:
    """Least-graded cycle at ``vertex`` winding once around an annulus in ``direction``."""
    eng = engine_for(model)
    weights = _grading_if_consistent(model, eng)
    if weights is None:
        raise NotStronglyConsistent("needs a strongly consistent model")
    wc = _WeightedCover(eng, weights)
    target = (vertex, (direction,))
    res = wc.least(vertex, target, cap)
    if res is None:
        return None
    return Path(vertex, res[1], vertex)


def noetherian_criterion_annulus(model: DimerModel, cap: int = 200000) -> NoetherianVerdict:
    surf = surface_info(model)
    if surf.classification != "annulus":
        raise NotAnAnnulus(f"model is a {surf.classification}")
    eng = engine_for(model)
    if eng.hom.pres.rank != 1:
        raise NotAnAnnulus("annulus presentation should have one free generator")
    if _grading_if_consistent(model, eng) is None:
        raise NotStronglyConsistent("model is not strongly consistent")
    loops = {}
    for v in model.vertices:
        for d in (1, -1):
            loop = minimal_loop(model, v, d, cap)
            if loop is None:
                return NoetherianVerdict(False, None)
            loops[(v, d)] = loop
    for m in eng.matchings(cap=4096):
        ws = {(v, d): m(loop) for (v, d), loop in loops.items()}
        if len({ws[(v, 1)] for v in model.vertices}) == 1 and len({ws[(v, -1)] for v in model.vertices}) == 1:
            return NoetherianVerdict(True, tuple(m.sorted()),
                                     {"forward": ws[(model.vertices[0], 1)], "backward": ws[(model.vertices[0], -1)]})
    return NoetherianVerdict(False, None)
