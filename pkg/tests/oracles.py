"""Brute-force reference implementations, deliberately naive.

They share nothing with the library beyond the model data structure.
"""

from __future__ import annotations

import re
from collections import deque

from dimer.model import DimerModel

# -- matching oracle: every subset of arrows --------------------------------------------


def brute_matchings(model: DimerModel, max_arrows: int = 20) -> list[frozenset[str]]:
    ids = sorted(model.arrows)
    if len(ids) > max_arrows:
        raise ValueError(f"{len(ids)} arrows is too many for subset enumeration")
    bit = {a: 1 << i for i, a in enumerate(ids)}
    masks = []
    for f in model.faces.values():
        m = 0
        for a in f.arrows:
            m |= bit[a]
        masks.append(m)
    out = []
    for s in range(1 << len(ids)):
        if all(bin(s & m).count("1") == 1 for m in masks):
            out.append(frozenset(a for a in ids if s & bit[a]))
    return out


# -- equivalence oracle: full morph graph search ---------------------------------------


def _return_pairs(model: DimerModel) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """(one return path, the other) for every internal arrow, both directions."""
    sides: dict[str, dict[str, tuple[str, ...]]] = {}
    for f in model.faces.values():
        cyc = list(f.arrows)
        for i, a in enumerate(cyc):
            sides.setdefault(a, {})[f.orientation] = tuple(cyc[i + 1:] + cyc[:i])
    pairs = []
    for a, d in sides.items():
        if len(d) == 2:
            pairs.append((d["cc"], d["cl"]))
            pairs.append((d["cl"], d["cc"]))
    return pairs


def morph_search(model: DimerModel, arrows: tuple[str, ...], cap: int = 10 ** 6) -> tuple[set, bool]:
    """Paths reachable by basic morphs, stopping once ``cap`` are found; (members, finished)."""
    pairs = _return_pairs(model)
    seen = {tuple(arrows)}
    queue = deque(seen)
    while queue:
        p = queue.popleft()
        for old, new in pairs:
            k = len(old)
            for i in range(len(p) - k + 1):
                if p[i:i + k] == old:
                    q = p[:i] + new + p[i + k:]
                    if q not in seen:
                        seen.add(q)
                        if len(seen) > cap:
                            return seen, False
                        queue.append(q)
    return seen, True


def morph_class(model: DimerModel, arrows: tuple[str, ...], cap: int = 10 ** 6) -> set[tuple[str, ...]] | None:
    """All paths reachable by basic morphs; None when more than ``cap`` are found."""
    members, finished = morph_search(model, arrows, cap)
    return members if finished else None


def brute_equivalent(model: DimerModel, p: tuple[str, ...], q: tuple[str, ...], cap: int = 10 ** 6) -> bool | None:
    if p == q:
        return True
    cls = morph_class(model, p, cap)
    if cls is None:
        return None
    return tuple(q) in cls


# -- torus homotopy oracle: lifts to the plane ------------------------------------------


def _square_name(name: str) -> tuple[int, int] | None:
    m = re.fullmatch(r"square_torus_(\d+)x(\d+)", name)
    return None if m is None else (int(m.group(1)), int(m.group(2)))


def displacements(model: DimerModel) -> dict[str, tuple[int, int]]:
    """Displacement in the plane of the lift of every arrow, from the generator's geometry."""
    name = model.name
    if name == "c3_torus":
        return {"x": (1, 0), "y": (0, 1), "z": (-1, -1)}
    if name == "conifold_torus":
        return {"a1": (1, 0), "b1": (0, 1), "a2": (-1, 0), "b2": (0, -1)}
    m = re.fullmatch(r"c3_torus_(\d+)x(\d+)", name)
    if m:
        return {a: {"x": (1, 0), "y": (0, 1), "z": (-1, -1)}[a[0]] for a in model.arrows}
    sq = _square_name(name)
    if sq:
        # h<i>_<j> joins (i,j) and (i+1,j), pointing right when i+j is even;
        # u<i>_<j> joins (i,j) and (i,j+1), pointing up when i+j is odd
        out = {}
        for a in model.arrows:
            i, j = map(int, a[1:].split("_"))
            sign = 1 if (i + j) % 2 == (0 if a[0] == "h" else 1) else -1
            out[a] = (sign, 0) if a[0] == "h" else (0, sign)
        return out
    raise KeyError(f"no plane geometry known for {name!r}")


def lift_displacement(model: DimerModel, arrows) -> tuple[int, int]:
    d = displacements(model)
    x = y = 0
    for a in arrows:
        x += d[a][0]
        y += d[a][1]
    return (x, y)


def signed_area(model: DimerModel, face_id: str) -> float:
    """Shoelace area of the lifted face polygon; positive for counter-clockwise."""
    d = displacements(model)
    x = y = 0
    pts = [(0, 0)]
    for a in model.faces[face_id].arrows:
        x += d[a][0]
        y += d[a][1]
        pts.append((x, y))
    return 0.5 * sum(p[0] * q[1] - q[0] * p[1] for p, q in zip(pts, pts[1:]))


# -- homology oracle: face boundaries over the rationals --------------------------------


def homology_separates(model: DimerModel, p, q) -> bool:
    """Whether p - q, as an arrow chain, lies outside the rational span of the face cycles."""
    import numpy as np

    ids = sorted(model.arrows)
    idx = {a: i for i, a in enumerate(ids)}
    faces = np.zeros((len(ids), len(model.faces)))
    for j, f in enumerate(model.faces.values()):
        for a in f.arrows:
            faces[idx[a], j] += 1
    diff = np.zeros(len(ids))
    for a in p:
        diff[idx[a]] += 1
    for a in q:
        diff[idx[a]] -= 1
    if not diff.any():
        return False
    r = np.linalg.matrix_rank(faces) if faces.size else 0
    return np.linalg.matrix_rank(np.column_stack([faces, diff])) > r


# -- homotopy oracle: homomorphisms to a symmetric group --------------------------------


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """First p, then q."""
    return tuple(q[i] for i in p)


def permutation_images(model: DimerModel, degree: int = 4, limit: int = 400,
                       seed: int = 0) -> list[dict[str, tuple[int, ...]]]:
    """Up to ``limit`` arrow labellings by permutations whose face products are trivial.

    Arrows of a spanning tree get the identity, so each labelling is a homomorphism from the
    fundamental group. Paths with equal endpoints but different images are not homotopic.
    """
    import random
    from itertools import permutations

    rng = random.Random(seed)
    ident = tuple(range(degree))
    perms = list(permutations(ident))
    tree: set[str] = set()
    reached = {min(model.vertices)}
    grew = True
    while grew:
        grew = False
        for a in sorted(model.arrows):
            t, h = model.tail(a), model.head(a)
            if (t in reached) != (h in reached):
                tree.add(a)
                reached |= {t, h}
                grew = True
    gens = sorted(a for a in model.arrows if a not in tree)
    order = {a: i for i, a in enumerate(gens)}
    # each face is checked once its last generator is assigned
    due: dict[int, list[tuple[str, ...]]] = {}
    for f in model.faces.values():
        last = max((order[a] for a in f.arrows if a in order), default=-1)
        due.setdefault(last, []).append(f.arrows)
    out: list[dict[str, tuple[int, ...]]] = []
    label = {a: ident for a in tree}

    def trivial(cycle) -> bool:
        cur = ident
        for a in cycle:
            cur = _compose(cur, label[a])
        return cur == ident

    if not all(trivial(c) for c in due.get(-1, [])):
        return out

    def assign(i: int) -> None:
        if len(out) >= limit:
            return
        if i == len(gens):
            out.append(dict(label))
            return
        for s in rng.sample(perms, len(perms)):
            label[gens[i]] = s
            if all(trivial(c) for c in due.get(i, [])):
                assign(i + 1)
            if len(out) >= limit:
                break
        del label[gens[i]]

    assign(0)
    return out


def permutation_image(labelling: dict[str, tuple[int, ...]], arrows) -> tuple[int, ...]:
    cur = tuple(range(len(next(iter(labelling.values())))))
    for a in arrows:
        cur = _compose(cur, labelling[a])
    return cur
