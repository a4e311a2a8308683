"""Draw every fixture, with its strands, as SVG (and optionally DOT) files."""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from dimer import svg
from dimer.model import load

ROOT = Path(__file__).resolve().parent.parent


@dataclass
class RenderConfig:
    fixtures: Path = ROOT / "fixtures" / "models"
    out: Path = Path("drawings")
    seed: int = 0
    strands: bool = True
    dot: bool = False


def render(cfg: RenderConfig) -> list[Path]:
    cfg.out.mkdir(parents=True, exist_ok=True)
    written = []
    for path in sorted(cfg.fixtures.glob("*.json")):
        if path.name == "manifest.json":
            continue
        model = load(path)
        target = cfg.out / f"{path.stem}.svg"
        target.write_text(svg.model_svg(model, seed=cfg.seed, strands=cfg.strands))
        written.append(target)
        if cfg.dot:
            target = cfg.out / f"{path.stem}.dot"
            target.write_text(svg.model_dot(model))
            written.append(target)
    return written


def main() -> None:
    cfg = RenderConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixtures", type=Path, default=cfg.fixtures)
    ap.add_argument("--out", type=Path, default=cfg.out)
    ap.add_argument("--seed", type=int, default=cfg.seed)
    ap.add_argument("--no-strands", dest="strands", action="store_false")
    ap.add_argument("--dot", action="store_true")
    cfg = RenderConfig(**vars(ap.parse_args()))
    print(f"{len(render(cfg))} files written to {cfg.out}")


if __name__ == "__main__":
    main()
