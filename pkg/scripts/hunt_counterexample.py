"""Search random models for a digon-free, strand-consistent one with no perfect matching.

Candidates are built from a random pair of permutations of the arrows: the cycles of
the first are the counter-clockwise faces and the cycles of the second the clockwise
faces. Some faces are then deleted to open holes in the surface. Nothing is asserted;
every hit is printed with a bounded path-consistency check and written out as a model
file for inspection. Hits on closed surfaces of genus at least two are marked
unconfirmed, since homotopy there is known only up to homology.
"""

from __future__ import annotations

import argparse
import random
from dataclasses import dataclass
from pathlib import Path

from dimer.homotopy import Homotopy
from dimer.matchings import find_matching
from dimer.model import CC, CL, DimerModel, ModelError, dumps, surface_info, validate
from dimer.rewrite import check_path_consistency
from dimer.strands import strand_consistency
from dimer.transform import reduce, submodel


@dataclass
class HuntConfig:
    trials: int = 20000
    min_arrows: int = 4
    max_arrows: int = 12
    max_holes: int = 2
    path_length: int = 4
    seed: int = 0
    out: Path = Path("hunt_hits")


def _cycles(perm: list[int]) -> list[list[int]]:
    seen, out = set(), []
    for i in range(len(perm)):
        if i in seen:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j]
        out.append(cyc)
    return out


def random_model(rng: random.Random, n: int, name: str) -> DimerModel | None:
    """Model whose faces are the cycles of two random permutations, or None if invalid."""
    sigma = rng.sample(range(n), n)
    tau = rng.sample(range(n), n)
    # endpoint ids: 2*i is the tail of arrow i, 2*i+1 its head
    parent = list(range(2 * n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for perm in (sigma, tau):
        for i in range(n):
            parent[find(2 * i + 1)] = find(2 * perm[i])
    arrows = {f"a{i}": (f"v{find(2 * i)}", f"v{find(2 * i + 1)}") for i in range(n)}
    faces = {}
    for k, cyc in enumerate(_cycles(sigma)):
        faces[f"P{k}"] = (CC, [f"a{i}" for i in cyc])
    for k, cyc in enumerate(_cycles(tau)):
        faces[f"N{k}"] = (CL, [f"a{i}" for i in cyc])
    try:
        m = DimerModel.build(arrows, faces, name=name)
    except ModelError:
        return None
    return m if validate(m).ok else None


def with_holes(rng: random.Random, m: DimerModel, holes: int) -> DimerModel | None:
    if holes == 0:
        return m
    faces = sorted(m.faces)
    if holes >= len(faces):
        return None
    keep = sorted(set(faces) - set(rng.sample(faces, holes)))
    try:
        sub = submodel(m, keep, name=f"{m.name}_h{holes}")
    except (ModelError, ValueError):
        return None
    return sub if validate(sub).ok else None


def is_candidate(m: DimerModel) -> bool:
    """Weakly consistent, not a sphere, and without digons even after reduction."""
    if surface_info(m).classification == "sphere":
        return False
    if strand_consistency(m).answer.value != "yes":
        return False
    return not reduce(m)[0].digons


def hunt(cfg: HuntConfig) -> list[DimerModel]:
    rng = random.Random(cfg.seed)
    hits, candidates = [], 0
    for t in range(cfg.trials):
        base = random_model(rng, rng.randint(cfg.min_arrows, cfg.max_arrows), f"hunt_{t}")
        if base is None:
            continue
        m = with_holes(rng, base, rng.randint(0, cfg.max_holes))
        if m is None or not is_candidate(m):
            continue
        candidates += 1
        if find_matching(m) is None:
            hits.append(m)
    print(f"{cfg.trials} trials, {candidates} digon-free strand-consistent candidates, {len(hits)} without a matching")
    return hits


def main() -> None:
    cfg = HuntConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in ("trials", "min_arrows", "max_arrows", "max_holes", "path_length", "seed"):
        ap.add_argument(f"--{f.replace('_', '-')}", type=int, default=getattr(cfg, f))
    ap.add_argument("--out", type=Path, default=cfg.out)
    cfg = HuntConfig(**vars(ap.parse_args()))
    hits = hunt(cfg)
    if hits:
        cfg.out.mkdir(parents=True, exist_ok=True)
        for m in hits:
            (cfg.out / f"{m.name}.json").write_text(dumps(m))
            exact = "exact homotopy" if Homotopy(m).exact else "unconfirmed, homology only"
            path = check_path_consistency(m, cfg.path_length)
            print(f"  {m.name} ({surface_info(m).classification}; {exact}; path {path}): "
                  f"written to {cfg.out / (m.name + '.json')}")


if __name__ == "__main__":
    main()
