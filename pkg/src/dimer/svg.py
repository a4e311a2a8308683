"""Drawings of models and their strands as SVG, and Graphviz DOT text.

Drawings are presentational only.  Disk-like models use a seeded spring
layout; torus models use the periodic harmonic embedding in the unit
square, with every element drawn at its neighbouring translates and
clipped to the fundamental domain.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import networkx as nx
import numpy as np

from .homotopy import ABELIAN, presentation
from .model import CC, DimerModel, surface_info
from .strands import PERIODIC, zigzag_paths

SIZE = 480
MARGIN = 40
PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _torus_layout(model: DimerModel) -> tuple[dict[str, np.ndarray], dict[str, np.ndarray]]:
    """Vertex positions in [0,1)^2 and a displacement vector for every arrow."""
    pres = presentation(model)
    idx = {v: i for i, v in enumerate(model.vertices)}
    n = len(idx)
    lap = np.zeros((n, n))
    rhs = np.zeros((n, 2))
    shift = {a: np.array(pres.letters[a], dtype=float) for a in model.arrows}
    for a in model.arrows.values():
        t, h, d = idx[a.tail], idx[a.head], shift[a.id]
        if t == h:
            continue
        lap[t, t] += 1
        lap[h, h] += 1
        lap[t, h] -= 1
        lap[h, t] -= 1
        # minimise |x_h + d - x_t|^2 over all arrows
        rhs[t] += d
        rhs[h] -= d
    lap[0, :] = 0
    lap[0, 0] = 1
    rhs[0] = 0
    x = np.linalg.lstsq(lap, rhs, rcond=None)[0]
    pos = {v: np.mod(x[i], 1.0) for v, i in idx.items()}
    vec = {}
    for a in model.arrows.values():
        raw = x[idx[a.head]] + shift[a.id] - x[idx[a.tail]]
        vec[a.id] = raw
    return pos, vec


def _spring_layout(model: DimerModel, seed: int) -> tuple[dict[str, np.ndarray], dict[str, np.ndarray]]:
    g = nx.Graph()
    g.add_nodes_from(model.vertices)
    g.add_edges_from((a.tail, a.head) for a in model.arrows.values() if a.tail != a.head)
    raw = nx.spring_layout(g, seed=seed)
    pts = np.array([raw[v] for v in model.vertices]) if raw else np.zeros((1, 2))
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.where(hi - lo > 1e-9, hi - lo, 1.0)
    pos = {v: (np.asarray(raw[v]) - lo) / span for v in model.vertices}
    vec = {a.id: pos[a.head] - pos[a.tail] for a in model.arrows.values()}
    return pos, vec


def _bend(model: DimerModel) -> dict[str, float]:
    """Curvature offset per arrow so parallel arrows do not overlap."""
    groups: dict[frozenset, list[str]] = {}
    for a in model.arrows.values():
        groups.setdefault(frozenset((a.tail, a.head)), []).append(a.id)
    out = {}
    for ids in groups.values():
        k = len(ids)
        for i, a in enumerate(sorted(ids)):
            out[a] = 0.0 if k == 1 else 0.18 * (i - (k - 1) / 2)
    return out


def _control(p: np.ndarray, v: np.ndarray, bend: float, loop: bool) -> tuple[np.ndarray, np.ndarray]:
    if loop:
        return p + np.array([0.06, 0.09]), p + np.array([0.06, 0.03])
    normal = np.array([-v[1], v[0]])
    ctrl = p + v / 2 + bend * normal
    mid = 0.25 * p + 0.5 * ctrl + 0.25 * (p + v)
    return ctrl, mid


def model_svg(model: DimerModel, seed: int = 0, strands: bool = True) -> str:
    torus = surface_info(model).classification == "torus" and presentation(model).regime == ABELIAN
    pos, vec = _torus_layout(model) if torus else _spring_layout(model, seed)
    bend = _bend(model)
    scale = SIZE - 2 * MARGIN

    def xy(p):
        return MARGIN + scale * p[0], MARGIN + scale * (1 - p[1])

    offsets = [np.array([dx, dy]) for dx in (-1, 0, 1) for dy in (-1, 0, 1)] if torus else [np.zeros(2)]
    mids = {}
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
             f'viewBox="0 0 {SIZE} {SIZE}">',
             '<defs><marker id="tip" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" '
             'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#444"/></marker>',
             f'<clipPath id="dom"><rect x="{MARGIN}" y="{MARGIN}" width="{scale}" height="{scale}"/>'
             '</clipPath></defs>',
             f'<title>{escape(model.name)}</title>']
    if torus:
        parts.append(f'<rect x="{MARGIN}" y="{MARGIN}" width="{scale}" height="{scale}" '
                     'fill="none" stroke="#bbb" stroke-dasharray="4 3"/>')
    parts.append('<g clip-path="url(#dom)">' if torus else "<g>")
    for a in sorted(model.arrows):
        p, v = pos[model.tail(a)], vec[a]
        loop = float(np.linalg.norm(v)) < 1e-9
        ctrl, mid = _control(p, v, bend[a], loop)
        mids[a] = (mid, v)
        for off in offsets:
            (x0, y0), (x1, y1), (cx, cy) = xy(p + off), xy(p + v + off), xy(ctrl + off)
            if loop:
                (c2x, c2y) = xy(_control(p, v, 0, True)[1] + off)
                d = f"M{x0:.1f},{y0:.1f} C{cx:.1f},{cy:.1f} {c2x:.1f},{c2y:.1f} {x1:.1f},{y1:.1f}"
            else:
                d = f"M{x0:.1f},{y0:.1f} Q{cx:.1f},{cy:.1f} {x1:.1f},{y1:.1f}"
            parts.append(f'<path d="{d}" fill="none" stroke="#444" marker-end="url(#tip)">'
                         f'<title>{escape(a)}</title></path>')
    if strands:
        for i, z in enumerate(zigzag_paths(model)):
            colour = PALETTE[i % len(PALETTE)]
            seq = list(z.arrows) + ([z.arrows[0]] if z.kind == PERIODIC else [])
            base = pos[model.tail(seq[0])]
            pts = [mids[seq[0]][0]]
            for a, b in zip(seq, seq[1:]):
                # the lift of b starts at the head of the current lift of a
                head = base + vec[a]
                base = head
                pts.append(mids[b][0] - pos[model.tail(b)] + head)
            for off in offsets:
                coords = " ".join("%.1f,%.1f" % xy(q + off) for q in pts)
                parts.append(f'<polyline points="{coords}" fill="none" stroke="{colour}" '
                             f'stroke-width="2" stroke-opacity="0.7"><title>strand {i}</title></polyline>')
    for v in model.vertices:
        for off in offsets:
            x, y = xy(pos[v] + off)
            parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="5" fill="white" stroke="black">'
                         f'<title>{escape(v)}</title></circle>')
    parts.append("</g></svg>")
    return "\n".join(parts) + "\n"


def model_dot(model: DimerModel) -> str:
    lines = [f'digraph "{model.name}" {{']
    for v in model.vertices:
        lines.append(f'  "{v}";')
    for a in sorted(model.arrows):
        lines.append(f'  "{model.tail(a)}" -> "{model.head(a)}" [label="{a}"];')
    for f in sorted(model.faces):
        face = model.faces[f]
        shape = "counter-clockwise" if face.orientation == CC else "clockwise"
        lines.append(f'  // face {f} ({shape}): {" ".join(face.arrows)}')
    lines.append("}")
    return "\n".join(lines) + "\n"
