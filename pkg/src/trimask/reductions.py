"""Optimality-preserving graph reductions.

Two reductions shrink the problem before any solver runs: iterative removal
of degree<=2 nodes from the layout graph (they can always be recolored
conflict-free afterwards), and cutting at bridges of the decomposition graph
(the two sides solve independently; a cyclic color rotation of one side
makes the bridge edge free).
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import LayoutGraph
from .graphs import DecompositionGraph, Pair, ordered_pair


@dataclass(frozen=True)
class PeelRecord:
    """Stack of (node, neighbors at removal time); pop order reverses push."""

    stack: tuple[tuple[int, frozenset[int]], ...]

    def __len__(self) -> int:
        return len(self.stack)

    @property
    def peeled_nodes(self) -> frozenset[int]:
        return frozenset(node for node, _ in self.stack)


def peel_low_degree(lg: LayoutGraph) -> tuple[LayoutGraph, PeelRecord]:
    """Remove nodes of current degree <= 2 until none remain.

    Always removes the smallest eligible node id first, so the record is
    deterministic. The residual graph has minimum degree 3 (or is empty).
    """
    adj = {n: set(lg.adjacency[n]) for n in lg.nodes}
    stack: list[tuple[int, frozenset[int]]] = []
    candidates = sorted((n for n in adj if len(adj[n]) <= 2), reverse=True)
    in_queue = set(candidates)
    while candidates:
        node = candidates.pop()
        in_queue.discard(node)
        if node not in adj or len(adj[node]) > 2:
            continue
        neighbors = frozenset(adj[node])
        stack.append((node, neighbors))
        for other in neighbors:
            adj[other].discard(node)
            if len(adj[other]) <= 2 and other not in in_queue:
                in_queue.add(other)
                candidates.append(other)
                candidates.sort(reverse=True)
        del adj[node]
    residual = lg.subgraph(adj.keys())
    return residual, PeelRecord(stack=tuple(stack))


def reinsert_and_color(record: PeelRecord, partial: dict[int, int]) -> dict[int, int]:
    """Pop peeled nodes and give each the smallest color its recorded
    neighbors do not use. With <=2 recorded neighbors a free color always
    exists, so no conflict is introduced on recorded edges."""
    colors = dict(partial)
    for node, neighbors in reversed(record.stack):
        used = {colors[v] for v in neighbors}
        colors[node] = min(c for c in range(3) if c not in used)
    return colors


@dataclass(frozen=True)
class BridgeCut:
    bridge: Pair
    edge_kind: str  # "CE" or "SE"
    side_a: frozenset[int]
    side_b: frozenset[int]


def find_bridges(dg: DecompositionGraph) -> list[BridgeCut]:
    """All bridges over CE union SE via iterative DFS low-link.

    Each cut carries the two node sets obtained by removing that single
    edge; together they partition the bridge's connected component.
    """
    adj = dg.adjacency
    order: dict[int, int] = {}
    low: dict[int, int] = {}
    component: dict[int, int] = {}
    bridges: list[Pair] = []
    counter = 0

    for root in dg.nodes:
        if root in order:
            continue
        comp_id = root
        # iterative DFS; entries are (node, parent, neighbor iterator)
        order[root] = low[root] = counter
        counter += 1
        component[root] = comp_id
        stack = [(root, None, iter(adj[root]))]
        while stack:
            node, parent, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt == parent:
                    parent = None  # skip the tree edge once; simple graph
                    continue
                if nxt in order:
                    low[node] = min(low[node], order[nxt])
                else:
                    order[nxt] = low[nxt] = counter
                    counter += 1
                    component[nxt] = comp_id
                    stack[-1] = (node, parent, it)
                    stack.append((nxt, node, iter(adj[nxt])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if stack:
                    up = stack[-1][0]
                    low[up] = min(low[up], low[node])
                    if low[node] > order[up]:
                        bridges.append(ordered_pair(up, node))

    comp_nodes: dict[int, set[int]] = {}
    for node, comp_id in component.items():
        comp_nodes.setdefault(comp_id, set()).add(node)

    cuts = []
    for u, v in sorted(bridges):
        side_b = _reachable_without(dg, v, (u, v))
        side_a = comp_nodes[component[u]] - side_b
        kind = "CE" if (u, v) in dg.ce else "SE"
        cuts.append(
            BridgeCut(
                bridge=(u, v),
                edge_kind=kind,
                side_a=frozenset(side_a),
                side_b=frozenset(side_b),
            )
        )
    return cuts


def _reachable_without(dg: DecompositionGraph, start: int, banned: Pair) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        node = stack.pop()
        for nxt in dg.adjacency[node]:
            if ordered_pair(node, nxt) == banned or nxt in seen:
                continue
            seen.add(nxt)
            stack.append(nxt)
    return seen


def stitch_and_rotate(
    cut: BridgeCut, color_a: dict[int, int], color_b: dict[int, int]
) -> dict[int, int]:
    """Merge two independently colored sides of a bridge.

    Side b is rotated by the smallest cyclic shift that makes the bridge
    endpoints differ (conflict bridge) or agree (stitch bridge); a shift in
    {0,1,2} always works, and rotation leaves side b's own cost unchanged.
    """
    u, v = cut.bridge
    end_a, end_b = (u, v) if u in cut.side_a else (v, u)
    ca, cb = color_a[end_a], color_b[end_b]
    for k in range(3):
        rotated = (cb + k) % 3
        if cut.edge_kind == "CE" and rotated != ca:
            break
        if cut.edge_kind == "SE" and rotated == ca:
            break
    merged = dict(color_a)
    for node, color in color_b.items():
        merged[node] = (color + k) % 3
    return merged
