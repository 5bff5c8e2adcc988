"""End-to-end decomposition flow.

Order of operations: build the layout graph, peel low-degree shapes, project
and split the survivors, then solve each connected component of the residual
decomposition graph (cutting at every bridge, exact search or the relaxation
per configuration), merge, and finally pop the peeled shapes back with
greedy conflict-free colors.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .detection import InfeasibleWitness, propagate_and_check
from .geometry import Layout, LayoutGraph, ProcessParams, build_layout_graph, project_and_split
from .graphs import (
    DecompositionGraph,
    MaskAssignment,
    as_fraction,
    connected_components,
    evaluate,
)
from .ilp import solve_exact
from .reductions import (
    BridgeCut,
    PeelRecord,
    find_bridges,
    peel_low_degree,
    stitch_and_rotate,
)
from .sdp import (
    MappingInfo,
    MappingParams,
    SdpConfig,
    build_cost_matrix,
    hyperplane_rounding,
    map_to_masks,
    solve_relaxation,
)
from .unionfind import DisjointSet


@dataclass(frozen=True)
class DecomposeConfig:
    solver: str = "auto"  # "exact" | "sdp" | "auto"
    params: ProcessParams = field(default_factory=ProcessParams)
    mapping: MappingParams = field(default_factory=MappingParams)
    sdp: SdpConfig = field(default_factory=SdpConfig)
    alpha: float | None = None  # None: take from layout params (0.1 for bare graphs)
    node_budget: int = 5_000_000
    auto_threshold: int = 25
    seed: int = 42
    rounding: str = "triplet"  # "triplet" | "hyperplane"

    def __post_init__(self):
        if self.solver not in ("exact", "sdp", "auto"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.rounding not in ("triplet", "hyperplane"):
            raise ValueError(f"unknown rounding {self.rounding!r}")


@dataclass
class ComponentReport:
    component: int  # smallest node id in the component
    size: int
    solver: str
    nodes_explored: int = 0
    proven_optimal: bool = True
    bridges_cut: int = 0
    sdp_converged: bool | None = None
    mapping_degraded: bool = False
    peel_fallback: bool = False


@dataclass
class DecomposeResult:
    assignment: MaskAssignment
    dg: DecompositionGraph
    lg: LayoutGraph | None
    per_component: list[ComponentReport]
    witnesses: list[InfeasibleWitness]
    peeled: int
    components: int
    stitch_count: int
    conflict_count: int
    objective: float
    proven_optimal: bool
    wall_time: float
    solver: str

    def payload(self) -> dict:
        """Seed-deterministic summary (timing excluded by design)."""
        return {
            "solver": self.solver,
            "components": self.components,
            "peeled": self.peeled,
            "CE": len(self.dg.ce),
            "SE": len(self.dg.se),
            "st": self.stitch_count,
            "cn": self.conflict_count,
            "objective": self.objective,
            "proven_optimal": self.proven_optimal,
            "masks": {n: self.assignment.colors[n] for n in sorted(self.assignment.colors)},
            "witnesses": [
                {"edge": list(w.edge), "path": list(w.path)} for w in self.witnesses
            ],
        }


def _solve_leaf(dg: DecompositionGraph, alpha, cfg: DecomposeConfig, report: ComponentReport):
    n = len(dg.nodes)
    solver = cfg.solver
    if solver == "auto":
        solver = "exact" if n <= cfg.auto_threshold else "sdp"
    if solver == "exact":
        res = solve_exact(dg, alpha, budget=cfg.node_budget)
        report.nodes_explored += res.nodes_explored
        report.proven_optimal = report.proven_optimal and res.proven_optimal
        return res.assignment.colors
    sdp_cfg = cfg.sdp
    if n > 16:
        # large components get a lighter schedule: the rounding only needs
        # the structure of the Gram matrix, not a certified stationary point
        sdp_cfg = replace(
            sdp_cfg,
            restarts=min(sdp_cfg.restarts, 3),
            shift_rounds=min(sdp_cfg.shift_rounds, 5),
            max_inner_iters=min(sdp_cfg.max_inner_iters, 200),
            grad_tol=max(sdp_cfg.grad_tol, 1e-4),
        )
    cost = build_cost_matrix(dg, alpha)
    sol = solve_relaxation(cost, dg, sdp_cfg)
    report.sdp_converged = sol.converged if report.sdp_converged is None else (
        report.sdp_converged and sol.converged
    )
    report.proven_optimal = False
    if cfg.rounding == "hyperplane":
        rng = np.random.default_rng(cfg.seed)
        return hyperplane_rounding(sol, dg, alpha, rng).colors
    info = MappingInfo()
    assignment = map_to_masks(sol, dg, cfg.mapping, alpha=alpha, info=info)
    report.mapping_degraded = report.mapping_degraded or info.degraded
    return assignment.colors


def _solve_with_bridges(dg: DecompositionGraph, alpha, cfg, report) -> dict[int, int]:
    """Cut every bridge of a connected component, solve the bridge-free
    pieces, and merge them back along the bridge forest; each reattachment
    rotates one side so the bridge edge costs nothing."""
    if len(dg.nodes) <= 1:
        return {node: 0 for node in dg.nodes}
    cuts = find_bridges(dg)
    if not cuts:
        return _solve_leaf(dg, alpha, cfg, report)
    report.bridges_cut += len(cuts)
    bridge_set = {cut.bridge for cut in cuts}
    pruned = DecompositionGraph(
        segments=dg.segments, ce=dg.ce - bridge_set, se=dg.se - bridge_set
    )
    dsu = DisjointSet(dg.nodes)
    blocks: dict[int, dict[int, int]] = {}
    for piece in connected_components(pruned):
        if len(piece.nodes) == 1:
            colors = {piece.nodes[0]: 0}
        else:
            colors = _solve_leaf(piece, alpha, cfg, report)
        for a, b in zip(piece.nodes, piece.nodes[1:]):
            dsu.union(a, b)
        blocks[dsu.find(piece.nodes[0])] = colors
    for cut in cuts:
        u, v = cut.bridge
        ru, rv = dsu.find(u), dsu.find(v)
        color_a, color_b = blocks.pop(ru), blocks.pop(rv)
        merge_cut = BridgeCut(
            bridge=cut.bridge,
            edge_kind=cut.edge_kind,
            side_a=frozenset(color_a),
            side_b=frozenset(color_b),
        )
        merged = stitch_and_rotate(merge_cut, color_a, color_b)
        dsu.union(ru, rv)
        blocks[dsu.find(ru)] = merged
    (colors,) = blocks.values()
    return colors


def _solve_components(dg: DecompositionGraph, alpha, cfg):
    colors: dict[int, int] = {}
    reports: list[ComponentReport] = []
    witnesses: list[InfeasibleWitness] = []
    for comp in connected_components(dg):
        verdict = propagate_and_check(comp.nodes, comp.ce)
        if isinstance(verdict, InfeasibleWitness):
            witnesses.append(verdict)
        report = ComponentReport(
            component=min(comp.nodes), size=len(comp.nodes), solver=cfg.solver
        )
        colors.update(_solve_with_bridges(comp, alpha, cfg, report))
        reports.append(report)
    return colors, reports, witnesses


def decompose_graph(dg: DecompositionGraph, cfg: DecomposeConfig | None = None) -> DecomposeResult:
    """Decompose a bare decomposition graph (no geometry, hence no peeling)."""
    cfg = cfg or DecomposeConfig()
    alpha = as_fraction(cfg.alpha if cfg.alpha is not None else 0.1)
    t0 = time.perf_counter()
    colors, reports, witnesses = _solve_components(dg, alpha, cfg)
    assignment = evaluate(dg, colors, alpha)
    return _result(assignment, dg, None, reports, witnesses, 0, t0, cfg)


def decompose(layout: Layout, cfg: DecomposeConfig | None = None) -> DecomposeResult:
    cfg = cfg or DecomposeConfig()
    if cfg.params is not layout.params:
        cfg = replace(cfg, params=layout.params)
    alpha = as_fraction(cfg.alpha if cfg.alpha is not None else layout.params.alpha)
    t0 = time.perf_counter()

    lg = build_layout_graph(layout)
    residual_lg, record = peel_low_degree(lg)
    dg = project_and_split(layout, lg, split_nodes=residual_lg.nodes)
    residual_segments = [
        s.id for s in dg.segments if s.parent in set(residual_lg.nodes)
    ]
    residual_dg = dg.subgraph(residual_segments)

    colors, reports, witnesses = _solve_components(residual_dg, alpha, cfg)
    colors, fallback_parents = _reinsert_segments(layout, dg, record, colors)

    if fallback_parents:
        # a peeled shape ran out of free colors against a stitched neighbor;
        # re-solve its whole layout-graph component without peeling
        redo = set()
        for comp in lg.connected_components():
            if set(comp.nodes) & fallback_parents:
                redo.update(comp.nodes)
        redo_dg = dg.subgraph([s.id for s in dg.segments if s.parent in redo])
        redo_colors, redo_reports, redo_witnesses = _solve_components(redo_dg, alpha, cfg)
        for rep in redo_reports:
            rep.peel_fallback = True
        colors.update(redo_colors)
        reports.extend(redo_reports)
        witnesses.extend(redo_witnesses)

    assignment = evaluate(dg, colors, alpha)
    return _result(assignment, dg, lg, reports, witnesses, len(record), t0, cfg)


def _reinsert_segments(layout, dg, record: PeelRecord, colors):
    """Pop peeled shapes, coloring each against the segments of its recorded
    neighbors that sit within the coloring distance. Returns the colored map
    and the set of shapes for which all three colors were blocked."""
    by_parent: dict[int, list[int]] = {}
    for seg in dg.segments:
        by_parent.setdefault(seg.parent, []).append(seg.id)
    adjacency = dg.adjacency
    out = dict(colors)
    blocked: set[int] = set()
    for shape_id, neighbor_shapes in reversed(record.stack):
        seg_id = by_parent[shape_id][0]  # peeled shapes are never split
        used = set()
        for other_seg in adjacency[seg_id]:
            parent = dg.segment_by_id[other_seg].parent
            if parent in neighbor_shapes and other_seg in out:
                used.add(out[other_seg])
        free = [c for c in range(3) if c not in used]
        if free:
            out[seg_id] = free[0]
        else:
            blocked.add(shape_id)
            costs = []
            for c in range(3):
                clash = sum(
                    1
                    for other_seg in adjacency[seg_id]
                    if other_seg in out and out[other_seg] == c
                )
                costs.append((clash, c))
            out[seg_id] = min(costs)[1]
    return out, blocked


def _result(assignment, dg, lg, reports, witnesses, peeled, t0, cfg) -> DecomposeResult:
    return DecomposeResult(
        assignment=assignment,
        dg=dg,
        lg=lg,
        per_component=reports,
        witnesses=witnesses,
        peeled=peeled,
        components=len(connected_components(dg)),
        stitch_count=assignment.stitch_count,
        conflict_count=assignment.conflict_count,
        objective=assignment.objective_float(),
        proven_optimal=all(r.proven_optimal for r in reports),
        wall_time=time.perf_counter() - t0,
        solver=cfg.solver,
    )


def compare_solvers(layout: Layout, cfg: DecomposeConfig | None = None) -> dict:
    """Run the exact and relaxation pipelines on the same layout and report
    stitch/conflict totals and wall time side by side."""
    cfg = cfg or DecomposeConfig()
    rows = {}
    for solver in ("exact", "sdp"):
        result = decompose(layout, replace(cfg, solver=solver))
        rows[solver] = {
            "st": result.stitch_count,
            "cn": result.conflict_count,
            "objective": result.objective,
            "cpu_s": result.wall_time,
        }
    exact_obj = rows["exact"]["objective"]
    sdp_obj = rows["sdp"]["objective"]
    rows["ratio"] = {
        "objective": (sdp_obj / exact_obj) if exact_obj else (1.0 if sdp_obj == 0 else float("inf")),
        "speedup": rows["exact"]["cpu_s"] / max(rows["sdp"]["cpu_s"], 1e-12),
    }
    return rows
