"""Verdict bundles for the fixture corpus and the generated corpus, with a summary.

Counts how often strand-consistency and bounded path-consistency agree, how many
models are nondegenerate, and how many digons reduction removes. Every bundle is
written to one JSON file so runs can be compared.
"""

from __future__ import annotations

import argparse
import json
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from dimer.cli import _bundle_job
from dimer.generators import default_corpus
from dimer.model import dumps

ROOT = Path(__file__).resolve().parent.parent


@dataclass
class SweepConfig:
    fixtures: Path = ROOT / "fixtures" / "models"
    generated: bool = True
    length: int = 6
    budget: int = 20000
    cap: int = 10000
    jobs: int = min(4, os.cpu_count() or 1)
    out: Path = Path("sweep.json")


def jobs_for(cfg: SweepConfig) -> list[tuple]:
    work = []
    for path in sorted(cfg.fixtures.glob("*.json")):
        if path.name != "manifest.json":
            work.append((path.stem, path.read_text()))
    if cfg.generated:
        for spec in default_corpus():
            m = spec.build()
            work.append((f"generated/{m.name}", dumps(m)))
    return [(label, text, cfg.length, cfg.budget, cfg.cap) for label, text in work]


def summarise(bundles: list[dict]) -> dict:
    ok = [b for b in bundles if "error" not in b]
    return {
        "models": len(bundles),
        "errors": [b["name"] for b in bundles if "error" in b],
        "surfaces": Counter(b["surface"]["classification"] for b in ok),
        "strand_consistent": Counter(b["strand_consistent"] for b in ok),
        "path_verdicts": Counter(b["path_consistent_up_to_L"]["verdict"] for b in ok),
        "strand_vs_path": Counter(b["verdicts"] for b in ok),
        "nondegenerate": Counter(b["nondegenerate"] for b in ok),
        "without_matching": sorted(b["name"] for b in ok if b["matching_count"] == 0),
        "digons_removed": sum(b["reduced_digons"] for b in ok),
    }


def sweep(cfg: SweepConfig) -> tuple[list[dict], dict]:
    work = jobs_for(cfg)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            bundles = list(pool.map(_bundle_job, work))
    else:
        bundles = [_bundle_job(w) for w in work]
    return bundles, summarise(bundles)


def main() -> None:
    cfg = SweepConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixtures", type=Path, default=cfg.fixtures)
    ap.add_argument("--no-generated", dest="generated", action="store_false")
    for f in ("length", "budget", "cap", "jobs"):
        ap.add_argument(f"--{f}", type=int, default=getattr(cfg, f))
    ap.add_argument("--out", type=Path, default=cfg.out)
    cfg = SweepConfig(**vars(ap.parse_args()))
    bundles, summary = sweep(cfg)
    cfg.out.write_text(json.dumps({"summary": summary, "bundles": bundles}, indent=2, sort_keys=True))
    for key, value in summary.items():
        print(f"{key}: {dict(value) if isinstance(value, Counter) else value}")
    print(f"bundles written to {cfg.out}")


if __name__ == "__main__":
    main()
