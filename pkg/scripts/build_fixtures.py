"""Write the fixture corpus and its manifest of expected verdict bundles.

Matching counts in the manifest come from the subset-enumeration oracle
whenever the model has at most ``oracle_arrows`` arrows, and must agree with
the library count; everything else is the library verdict at the time of
writing, kept as a regression baseline.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from oracles import brute_matchings  # noqa: E402

from dimer import generators as g  # noqa: E402
from dimer.cli import stable_bundle, verdict_bundle  # noqa: E402
from dimer.model import DimerModel, dumps  # noqa: E402
from dimer.transform import submodel  # noqa: E402


@dataclass
class FixtureConfig:
    out: Path = ROOT / "fixtures"
    length: int = 6
    matching_cap: int = 10000
    oracle_arrows: int = 20
    random_spheres: int = 5


def named_fixtures(cfg: FixtureConfig) -> list[DimerModel]:
    wheel = g.wheel_disk(4)
    annulus = submodel(wheel, [f for f in wheel.faces if f != "C"], name="wheel_annulus_4")
    sq = g.square_disk()
    models = [
        g.tri_disk(), g.digon_disk(), sq, g.tri_sphere(), g.c3_torus(), g.conifold_torus(),
        g.square_torus(1, 1), g.square_torus(2, 2), g.grid_disk(2, 2), g.grid_disk(3, 3),
        g.ring_annulus(2), g.ring_annulus(4), g.bad_annulus(), g.non_consistent_disk(),
        g.holed_torus(), wheel, annulus,
        g.double_boundary_arrow(sq, "a", name="boundary_digon_square"),
    ]
    models += [g.subdivided(sq, k) for k in (1, 2, 3)]
    models += [g.random_sphere(seed) for seed in range(cfg.random_spheres)]
    return models


def all_models(cfg: FixtureConfig) -> list[DimerModel]:
    seen: dict[str, DimerModel] = {}
    for m in named_fixtures(cfg) + [spec.build() for spec in g.default_corpus()]:
        seen.setdefault(m.name, m)
    return [seen[k] for k in sorted(seen)]


def build(cfg: FixtureConfig) -> dict:
    models_dir = cfg.out / "models"
    models_dir.mkdir(parents=True, exist_ok=True)
    for old in models_dir.glob("*.json"):
        old.unlink()
    manifest = {"length": cfg.length, "matching_cap": cfg.matching_cap, "models": []}
    for m in all_models(cfg):
        (models_dir / f"{m.name}.json").write_text(dumps(m))
        entry = stable_bundle(verdict_bundle(m, cfg.length, cap=cfg.matching_cap))
        entry["file"] = f"models/{m.name}.json"
        if len(m.arrows) <= cfg.oracle_arrows:
            brute = len(brute_matchings(m, cfg.oracle_arrows))
            if brute != entry["matching_count"]:
                raise AssertionError(f"{m.name}: oracle finds {brute} matchings, library {entry['matching_count']}")
            entry["oracle_matching_count"] = brute
        manifest["models"].append(entry)
        print(f"{m.name}: {entry['strand_consistent']} / {entry['path_consistent_up_to_L']}", file=sys.stderr)
    (cfg.out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=FixtureConfig.out)
    args = parser.parse_args()
    build(FixtureConfig(out=args.out))


if __name__ == "__main__":
    main()
