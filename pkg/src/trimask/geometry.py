"""Layout ingestion, layout-graph construction, and projection-based splitting.

The input is a set of axis-aligned rectangles in integer nanometers. Two
features closer than the minimum colorable distance ``min_s`` form a conflict
pair. Features are split into segments at stitch candidates found by
projecting conflicting neighbors onto the feature's long axis: the midpoint
of each wide-enough uncovered interval becomes a legal split location.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .graphs import DecompositionGraph, Pair, Segment, ordered_pair

Rect = tuple[int, int, int, int]


class LayoutError(ValueError):
    """Invalid layout file or layout invariant violation."""


@dataclass(frozen=True)
class ProcessParams:
    """Process constants in nm (alpha is the dimensionless stitch weight)."""

    min_s: int = 85
    overlap_margin: int = 10
    alpha: float = 0.1
    min_width: int = 25
    min_spacing: int = 30

    def __post_init__(self):
        if not self.min_s > self.min_spacing > 0:
            raise LayoutError(
                f"require min_s > min_spacing > 0, got {self.min_s}, {self.min_spacing}"
            )
        if self.overlap_margin <= 0:
            raise LayoutError(f"overlap_margin must be positive, got {self.overlap_margin}")
        if self.alpha <= 0:
            raise LayoutError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class Shape:
    id: int
    rect: Rect


@dataclass(frozen=True)
class Layout:
    shapes: tuple[Shape, ...]
    params: ProcessParams
    units: str = "nm"

    def __post_init__(self):
        if self.units != "nm":
            raise LayoutError(f"unsupported units {self.units!r}, expected 'nm'")
        ids = [s.id for s in self.shapes]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise LayoutError(f"duplicate shape id {dup[0]}")
        for s in self.shapes:
            x_lo, y_lo, x_hi, y_hi = s.rect
            if x_lo >= x_hi or y_lo >= y_hi:
                raise LayoutError(f"degenerate rectangle on shape {s.id}: {s.rect}")
        _check_disjoint(self.shapes)

    @cached_property
    def shape_by_id(self) -> dict[int, Shape]:
        return {s.id: s for s in self.shapes}


def _check_disjoint(shapes: tuple[Shape, ...]) -> None:
    if len(shapes) < 2:
        return
    r = np.array([s.rect for s in shapes], dtype=np.int64)
    x_lo, y_lo, x_hi, y_hi = r[:, 0], r[:, 1], r[:, 2], r[:, 3]
    # interiors intersect iff both axes strictly overlap
    ox = (x_lo[:, None] < x_hi[None, :]) & (x_lo[None, :] < x_hi[:, None])
    oy = (y_lo[:, None] < y_hi[None, :]) & (y_lo[None, :] < y_hi[:, None])
    bad = ox & oy
    np.fill_diagonal(bad, False)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        a, b = shapes[int(i)].id, shapes[int(j)].id
        raise LayoutError(f"overlapping shapes {min(a, b)} and {max(a, b)}")


def load_layout(path) -> Layout:
    """Parse a layout JSON file; every layout invariant is enforced here."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise LayoutError(f"cannot read layout {path}: {exc}") from exc
    return layout_from_dict(doc)


def layout_from_dict(doc: dict) -> Layout:
    if not isinstance(doc, dict) or "shapes" not in doc:
        raise LayoutError("layout document must be an object with a 'shapes' list")
    params_doc = doc.get("params", {})
    known = {"min_s", "overlap_margin", "alpha", "min_width", "min_spacing"}
    extra = set(params_doc) - known
    if extra:
        raise LayoutError(f"unknown params keys: {sorted(extra)}")
    params = ProcessParams(**params_doc)
    shapes = []
    for entry in doc["shapes"]:
        try:
            sid = entry["id"]
            rect = entry["rect"]
        except (TypeError, KeyError) as exc:
            raise LayoutError(f"malformed shape entry {entry!r}") from exc
        if not isinstance(sid, int) or isinstance(sid, bool):
            raise LayoutError(f"shape id must be an integer, got {sid!r}")
        if len(rect) != 4 or not all(isinstance(c, int) and not isinstance(c, bool) for c in rect):
            raise LayoutError(f"shape {sid}: rect must be 4 integers, got {rect!r}")
        shapes.append(Shape(id=sid, rect=tuple(rect)))
    return Layout(shapes=tuple(shapes), params=params, units=doc.get("units", "nm"))


def layout_to_dict(layout: Layout) -> dict:
    p = layout.params
    return {
        "units": layout.units,
        "params": {
            "min_s": p.min_s,
            "overlap_margin": p.overlap_margin,
            "alpha": p.alpha,
            "min_width": p.min_width,
            "min_spacing": p.min_spacing,
        },
        "shapes": [{"id": s.id, "rect": list(s.rect)} for s in layout.shapes],
    }


def euclidean_gap(a: Shape | Rect, b: Shape | Rect) -> float:
    """Minimum euclidean distance between two closed rectangles (0 if touching)."""
    ra = a.rect if isinstance(a, Shape) else a
    rb = b.rect if isinstance(b, Shape) else b
    dx = max(0, ra[0] - rb[2], rb[0] - ra[2])
    dy = max(0, ra[1] - rb[3], rb[1] - ra[3])
    return math.hypot(dx, dy)


@dataclass(frozen=True)
class LayoutGraph:
    """Conflict graph over whole shapes: an edge iff gap < min_s (strict)."""

    nodes: tuple[int, ...]
    edges: frozenset[Pair]

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, set[int]] = {n: set() for n in self.nodes}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {n: tuple(sorted(adj[n])) for n in self.nodes}

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def subgraph(self, keep) -> "LayoutGraph":
        keep = set(keep)
        return LayoutGraph(
            nodes=tuple(n for n in self.nodes if n in keep),
            edges=frozenset(e for e in self.edges if e[0] in keep and e[1] in keep),
        )

    def connected_components(self) -> list["LayoutGraph"]:
        seen: set[int] = set()
        comps = []
        for root in self.nodes:
            if root in seen:
                continue
            stack, comp = [root], {root}
            seen.add(root)
            while stack:
                u = stack.pop()
                for v in self.adjacency[u]:
                    if v not in comp:
                        comp.add(v)
                        seen.add(v)
                        stack.append(v)
            comps.append(self.subgraph(comp))
        return comps


def build_layout_graph(layout: Layout) -> LayoutGraph:
    shapes = sorted(layout.shapes, key=lambda s: s.id)
    ids = [s.id for s in shapes]
    n = len(shapes)
    if n < 2:
        return LayoutGraph(nodes=tuple(ids), edges=frozenset())
    r = np.array([s.rect for s in shapes], dtype=np.int64)
    x_lo, y_lo, x_hi, y_hi = r[:, 0], r[:, 1], r[:, 2], r[:, 3]
    dx = np.maximum(0, np.maximum(x_lo[:, None] - x_hi[None, :], x_lo[None, :] - x_hi[:, None]))
    dy = np.maximum(0, np.maximum(y_lo[:, None] - y_hi[None, :], y_lo[None, :] - y_hi[:, None]))
    close = dx * dx + dy * dy < layout.params.min_s**2
    edges = frozenset(
        ordered_pair(ids[i], ids[j]) for i, j in np.argwhere(np.triu(close, k=1))
    )
    return LayoutGraph(nodes=tuple(ids), edges=edges)


def _merge_intervals(intervals: list[tuple[int, int]]) -> list[tuple[int, int]]:
    merged: list[list[int]] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def stitch_candidates(layout: Layout, lg: LayoutGraph, shape_id: int) -> list[int]:
    """Legal split positions along one shape's long axis.

    Conflicting neighbors project their extent onto the axis; each maximal
    uncovered span lying between two covered regions contributes its
    midpoint, kept only when the midpoint clears both shape ends and the
    adjacent covers by at least the overlap margin.
    """
    shape = layout.shape_by_id[shape_id]
    x_lo, y_lo, x_hi, y_hi = shape.rect
    horizontal = (x_hi - x_lo) >= (y_hi - y_lo)
    lo, hi = (x_lo, x_hi) if horizontal else (y_lo, y_hi)
    margin = layout.params.overlap_margin

    covers = []
    for other in lg.adjacency[shape_id]:
        o = layout.shape_by_id[other].rect
        c_lo, c_hi = (o[0], o[2]) if horizontal else (o[1], o[3])
        c_lo, c_hi = max(c_lo, lo), min(c_hi, hi)
        if c_lo < c_hi:
            covers.append((c_lo, c_hi))
    covers = _merge_intervals(covers)

    # only spans strictly between two covered regions qualify: splitting an
    # unconstrained stretch separates no conflicts
    uncovered = [
        (prev_hi, next_lo)
        for (_, prev_hi), (next_lo, _) in zip(covers, covers[1:])
        if prev_hi < next_lo
    ]

    out = []
    for u_lo, u_hi in uncovered:
        mid = (u_lo + u_hi) // 2
        if mid - lo < margin or hi - mid < margin:
            continue
        if mid - u_lo < margin or u_hi - mid < margin:
            continue
        out.append(mid)
    return out


def _split_rect(rect: Rect, cuts: list[int], horizontal: bool) -> list[Rect]:
    x_lo, y_lo, x_hi, y_hi = rect
    lo, hi = (x_lo, x_hi) if horizontal else (y_lo, y_hi)
    bounds = [lo] + sorted(cuts) + [hi]
    pieces = []
    for a, b in zip(bounds, bounds[1:]):
        pieces.append((a, y_lo, b, y_hi) if horizontal else (x_lo, a, x_hi, b))
    return pieces


def project_and_split(
    layout: Layout, lg: LayoutGraph, split_nodes=None
) -> DecompositionGraph:
    """Build the decomposition graph: split shapes at stitch candidates,
    connect consecutive pieces with SE, and recompute CE at segment level.

    ``split_nodes`` restricts which shapes may be split (all by default);
    unsplit shapes still appear as single-segment nodes and still project
    onto their neighbors.
    """
    if split_nodes is None:
        split_nodes = set(lg.nodes)
    else:
        split_nodes = set(split_nodes)

    min_s = layout.params.min_s
    segments: list[Segment] = []
    by_shape: dict[int, list[Segment]] = {}
    next_id = 0
    for shape in sorted(layout.shapes, key=lambda s: s.id):
        x_lo, y_lo, x_hi, y_hi = shape.rect
        horizontal = (x_hi - x_lo) >= (y_hi - y_lo)
        cuts = stitch_candidates(layout, lg, shape.id) if shape.id in split_nodes else []
        pieces = _split_rect(shape.rect, cuts, horizontal)
        segs = []
        for rect in pieces:
            segs.append(Segment(id=next_id, parent=shape.id, rect=rect))
            next_id += 1
        segments.extend(segs)
        by_shape[shape.id] = segs

    se: set[Pair] = set()
    ce: set[Pair] = set()
    for shape_id, segs in by_shape.items():
        for a, b in zip(segs, segs[1:]):
            se.add(ordered_pair(a.id, b.id))
        # non-consecutive pieces of one shape sit apart but may still conflict
        for i in range(len(segs)):
            for j in range(i + 2, len(segs)):
                if euclidean_gap(segs[i].rect, segs[j].rect) < min_s:
                    ce.add(ordered_pair(segs[i].id, segs[j].id))
    for u, v in sorted(lg.edges):
        for a in by_shape[u]:
            for b in by_shape[v]:
                if euclidean_gap(a.rect, b.rect) < min_s:
                    ce.add(ordered_pair(a.id, b.id))

    return DecompositionGraph(
        segments=tuple(segments), ce=frozenset(ce), se=frozenset(se)
    )
