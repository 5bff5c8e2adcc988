"""Semidefinite relaxation of mask assignment and its rounding to three masks.

Each node gets a unit vector; three ideal directions at mutual angle 2*pi/3
encode the masks, so same-mask pairs have dot product 1 and different-mask
pairs -1/2. Dropping the discreteness leaves: minimize the conflict-weighted
sum of dot products subject to unit diagonal, dot >= -1/2 on conflict pairs,
and positive semidefiniteness. The engine optimizes a low-rank factor whose
rows live on the unit sphere, with a quadratic penalty enforcing the -1/2
floor; the resulting Gram matrix is rounded to masks by sorting entries and
growing same-mask groups through a disjoint set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graphs import DecompositionGraph, MaskAssignment, as_fraction, evaluate
from .unionfind import DisjointSet

# the three ideal directions; pairwise dots are exactly 1 (same) or -1/2
MASK_VECTORS = (
    (1.0, 0.0),
    (-0.5, math.sqrt(3.0) / 2.0),
    (-0.5, -math.sqrt(3.0) / 2.0),
)
DOT_SAME = Fraction(1)
DOT_DIFFERENT = Fraction(-1, 2)


def discrete_vector_objective(colors: dict[int, int], dg: DecompositionGraph, alpha) -> Fraction:
    """Objective of the vector form under the three ideal directions.

    Computed with exact rationals (the ideal pairwise dots are 1 and -1/2),
    so the value matches the conflict/stitch count objective bit for bit.
    """
    frac = as_fraction(alpha)
    total = Fraction(0)
    for u, v in dg.ce:
        dot = DOT_SAME if colors[u] == colors[v] else DOT_DIFFERENT
        total += Fraction(2, 3) * (dot + Fraction(1, 2))
    for u, v in dg.se:
        dot = DOT_SAME if colors[u] == colors[v] else DOT_DIFFERENT
        total += Fraction(2, 3) * frac * (1 - dot)
    return total


@dataclass(frozen=True)
class CostMatrix:
    """Symmetric edge-weight matrix: 1 on conflict pairs, -alpha on stitch
    pairs, 0 elsewhere (zero diagonal). Row k corresponds to index[k]."""

    matrix: np.ndarray
    index: tuple[int, ...]
    alpha: float = 0.1


def build_cost_matrix(dg: DecompositionGraph, alpha) -> CostMatrix:
    nodes = dg.nodes
    pos = {node: k for k, node in enumerate(nodes)}
    a = float(as_fraction(alpha))
    m = np.zeros((len(nodes), len(nodes)))
    for u, v in dg.ce:
        m[pos[u], pos[v]] = m[pos[v], pos[u]] = 1.0
    for u, v in dg.se:
        m[pos[u], pos[v]] = m[pos[v], pos[u]] = -a
    return CostMatrix(matrix=m, index=nodes, alpha=a)


@dataclass(frozen=True)
class SdpConfig:
    rank: int | None = None  # None -> min(n, 8)
    restarts: int = 5
    seed: int = 42
    mu_initial: float = 4.0
    mu_growth: float = 10.0
    ramp_rounds: int = 3  # pure-penalty rounds, mu multiplied by mu_growth each
    shift_rounds: int = 12  # multiplier-shift rounds at the final mu
    max_inner_iters: int = 400
    grad_tol: float = 1e-5
    constraint_tol: float = 1e-6


@dataclass(frozen=True)
class RelaxationSolution:
    x: np.ndarray
    v: np.ndarray
    index: tuple[int, ...]
    obj_simplified: float
    obj_relaxation: float
    converged: bool
    grad_norm: float
    max_violation: float

    @classmethod
    def from_factor(cls, v, index, ce_pairs, se_pairs, alpha, converged=True, grad_norm=0.0):
        v = np.asarray(v, dtype=float)
        x = v @ v.T
        return cls(
            x=x,
            v=v,
            index=tuple(index),
            obj_simplified=_objective_simplified(x, ce_pairs, se_pairs, alpha),
            obj_relaxation=_objective_relaxation(x, ce_pairs, se_pairs, alpha),
            converged=converged,
            grad_norm=grad_norm,
            max_violation=_max_violation(x, ce_pairs),
        )

    @classmethod
    def from_matrix(cls, x, index, ce_pairs, se_pairs, alpha):
        """Factor an explicit Gram matrix (eigendecomposition, clipped)."""
        x = np.asarray(x, dtype=float)
        vals, vecs = np.linalg.eigh(x)
        vals = np.clip(vals, 0.0, None)
        v = vecs * np.sqrt(vals)
        return cls.from_factor(v, index, ce_pairs, se_pairs, alpha)


def _edge_positions(dg: DecompositionGraph, index):
    pos = {node: k for k, node in enumerate(index)}
    ce = np.array(sorted((pos[u], pos[v]) for u, v in dg.ce), dtype=int).reshape(-1, 2)
    se = np.array(sorted((pos[u], pos[v]) for u, v in dg.se), dtype=int).reshape(-1, 2)
    return ce, se


def _objective_simplified(x, ce, se, alpha) -> float:
    # sum over conflict pairs minus alpha times sum over stitch pairs
    a = float(as_fraction(alpha))
    tot = float(x[ce[:, 0], ce[:, 1]].sum()) if len(ce) else 0.0
    if len(se):
        tot -= a * float(x[se[:, 0], se[:, 1]].sum())
    return tot


def _objective_relaxation(x, ce, se, alpha) -> float:
    a = float(as_fraction(alpha))
    tot = 0.0
    if len(ce):
        tot += (2.0 / 3.0) * float((x[ce[:, 0], ce[:, 1]] + 0.5).sum())
    if len(se):
        tot += (2.0 * a / 3.0) * float((1.0 - x[se[:, 0], se[:, 1]]).sum())
    return tot


def _max_violation(x, ce) -> float:
    diag = float(np.max(np.abs(np.diag(x) - 1.0))) if len(x) else 0.0
    floor = float(np.max(np.maximum(0.0, -0.5 - x[ce[:, 0], ce[:, 1]]))) if len(ce) else 0.0
    return max(diag, floor)


def _normalize_rows(v: np.ndarray) -> np.ndarray:
    norms = np.sqrt((v * v).sum(axis=1, keepdims=True))
    norms[norms == 0.0] = 1.0
    return v / norms


def _penalized_value(v, w, mu, ce, shift=None):
    """Objective plus quadratic wall penalty.

    ``shift`` (multiplier estimates divided by 2*mu) moves each hinge so the
    walls can be enforced exactly without driving mu to stiffness; zero shift
    is the plain penalty.
    """
    x_ce = (v[ce[:, 0]] * v[ce[:, 1]]).sum(axis=1) if len(ce) else np.zeros(0)
    base = 0.5 * float(np.sum((w @ v) * v))
    raw = -0.5 - x_ce
    if shift is None:
        hinge = np.maximum(0.0, raw)
        return base + mu * float(hinge @ hinge), hinge
    hinge = np.maximum(0.0, raw + shift)
    return base + mu * float(hinge @ hinge - shift @ shift), hinge


def _riemannian_grad(v, w, mu, ce, hinge):
    grad = w @ v
    if len(ce) and mu and hinge.any():
        coef = -2.0 * mu * hinge
        np.add.at(grad, ce[:, 0], coef[:, None] * v[ce[:, 1]])
        np.add.at(grad, ce[:, 1], coef[:, None] * v[ce[:, 0]])
    radial = (grad * v).sum(axis=1, keepdims=True)
    return grad - radial * v


def _lipschitz_bound(w, mu, ce) -> float:
    degree = np.zeros(len(w))
    if len(ce):
        np.add.at(degree, ce[:, 0], 1.0)
        np.add.at(degree, ce[:, 1], 1.0)
    row = float(np.abs(w).sum(axis=1).max()) if len(w) else 1.0
    return max(1.0, row + 2.0 * mu * float(degree.max(initial=0.0)))


def _minimize_on_sphere(v, w, mu, ce, max_iters, tol, shift=None):
    """Projected gradient with spectral (Barzilai-Borwein) steps and a
    nonmonotone backtracking safeguard; rows are renormalized every step."""
    value, hinge = _penalized_value(v, w, mu, ce, shift)
    grad = _riemannian_grad(v, w, mu, ce, hinge)
    safe_step = 1.0 / _lipschitz_bound(w, mu, ce)
    step = safe_step
    memory = [value]
    fresh_step = False
    for _ in range(max_iters):
        gnorm = float(np.sqrt((grad * grad).sum()))
        if gnorm < tol:
            break
        accepted = False
        trial_step = step
        reference = max(memory)
        for _ in range(25):
            v_new = _normalize_rows(v - trial_step * grad)
            value_new, hinge_new = _penalized_value(v_new, w, mu, ce, shift)
            if value_new <= reference - 1e-4 * trial_step * gnorm * gnorm:
                accepted = True
                break
            trial_step *= 0.5
        if not accepted:
            # spectral step may be poisoned; retry once from the safe step
            if fresh_step:
                break
            step = safe_step
            fresh_step = True
            continue
        fresh_step = False
        grad_new = _riemannian_grad(v_new, w, mu, ce, hinge_new)
        dv = (v_new - v).ravel()
        dg_ = (grad_new - grad).ravel()
        denom = float(dv @ dg_)
        step = float(dv @ dv) / denom if denom > 1e-16 else trial_step * 2.0
        step = min(max(step, 1e-12), 1e3)
        v, value, grad, hinge = v_new, value_new, grad_new, hinge_new
        memory.append(value)
        if len(memory) > 10:
            memory.pop(0)
    return v, float(np.sqrt((grad * grad).sum()))


def _full_gradient(v, w, mu, ce, shift=None):
    _, hinge = _penalized_value(v, w, mu, ce, shift)
    return _riemannian_grad(v, w, mu, ce, hinge)


def _rank_reduced(v):
    """Drop negligible eigen-components of the Gram matrix and re-factor.

    Low-rank factorizations stall on flat saddles where a spurious small
    eigenvalue decays only quadratically; truncating it and re-descending
    escapes the saddle. Returns None when there is nothing to truncate.
    """
    x = v @ v.T
    vals, vecs = np.linalg.eigh(x)
    keep = vals > 1e-3 * max(float(vals.max()), 1e-12)
    if keep.all() or not keep.any():
        return None
    reduced = vecs[:, keep] * np.sqrt(vals[keep])
    pad = np.zeros((v.shape[0], v.shape[1] - reduced.shape[1]))
    return _normalize_rows(np.hstack([reduced, pad]))


def solve_relaxation(
    a: CostMatrix, dg: DecompositionGraph, cfg: SdpConfig | None = None
) -> RelaxationSolution:
    """Approximately minimize the relaxation through a low-rank factor.

    The -1/2 floor on conflict pairs is enforced by a quadratic penalty: a
    short ramp multiplies the weight by a fixed factor per round, then
    multiplier shifts take over at the final weight so the floor tightens
    without runaway stiffness. Each restart begins from a fresh random
    factor and the best feasible candidate wins. ``converged`` certifies
    both a small final gradient and a small constraint violation.
    """
    cfg = cfg or SdpConfig()
    nodes = a.index
    n = len(nodes)
    if n == 0:
        return RelaxationSolution(
            x=np.zeros((0, 0)), v=np.zeros((0, 0)), index=(),
            obj_simplified=0.0, obj_relaxation=0.0, converged=True,
            grad_norm=0.0, max_violation=0.0,
        )
    ce, se = _edge_positions(dg, nodes)
    alpha = a.alpha
    rank = cfg.rank if cfg.rank is not None else min(n, 8)
    rank = max(1, min(rank, n))
    w = a.matrix
    rng = np.random.default_rng(cfg.seed)

    best = None
    have_certified = False
    for _ in range(max(1, cfg.restarts)):
        v = _normalize_rows(rng.normal(size=(n, rank)))
        mu = cfg.mu_initial
        grad_norm = 0.0
        for round_idx in range(cfg.ramp_rounds):
            tol = max(cfg.grad_tol, 1e-3 / (round_idx + 1))
            v, grad_norm = _minimize_on_sphere(v, w, mu, ce, cfg.max_inner_iters, tol)
            if round_idx < cfg.ramp_rounds - 1:
                mu *= cfg.mu_growth
        # multiplier rounds: hinge shifts let a moderate mu enforce the walls
        # exactly, so the end game stays well conditioned; once some restart
        # has certified, later restarts get a shorter schedule
        rounds = cfg.shift_rounds if not have_certified else max(3, cfg.shift_rounds // 3)
        shift = np.zeros(len(ce))
        violation = _max_violation(v @ v.T, ce)
        previous_norm = None
        stall_rounds = 0
        shake_tried = False
        for round_idx in range(rounds):
            _, hinge = _penalized_value(v, w, mu, ce, shift)
            shift = hinge
            # intermediate rounds only need enough accuracy to update the
            # multipliers; certification accuracy is for the settled walls
            round_tol = cfg.grad_tol
            if violation > 10.0 * cfg.constraint_tol and round_idx < rounds - 1:
                round_tol = max(cfg.grad_tol, min(1e-3, violation))
            v, grad_norm = _minimize_on_sphere(
                v, w, mu, ce, cfg.max_inner_iters, round_tol, shift
            )
            violation = _max_violation(v @ v.T, ce)
            if grad_norm < cfg.grad_tol and violation <= cfg.constraint_tol:
                break
            stalled = previous_norm is not None and grad_norm > 0.5 * previous_norm
            previous_norm = grad_norm
            if not stalled:
                continue
            escaped = False
            v_cut = _rank_reduced(v)  # flat-saddle escape
            if v_cut is not None:
                v_cut, grad_cut = _minimize_on_sphere(
                    v_cut, w, mu, ce, cfg.max_inner_iters, cfg.grad_tol, shift
                )
                f_old, _ = _penalized_value(v, w, mu, ce, shift)
                f_new, _ = _penalized_value(v_cut, w, mu, ce, shift)
                if f_new <= f_old + 1e-12:
                    v, grad_norm = v_cut, grad_cut
                    violation = _max_violation(v @ v.T, ce)
                    previous_norm = None
                    escaped = True
            if not escaped and not shake_tried:
                # saddle shake: a small perturbation plus re-descent
                shake_tried = True
                v_shake = _normalize_rows(v + 0.02 * rng.normal(size=v.shape))
                v_shake, grad_shake = _minimize_on_sphere(
                    v_shake, w, mu, ce, cfg.max_inner_iters, cfg.grad_tol, shift
                )
                f_old, _ = _penalized_value(v, w, mu, ce, shift)
                f_new, _ = _penalized_value(v_shake, w, mu, ce, shift)
                if f_new < f_old - 1e-12:
                    v, grad_norm = v_shake, grad_shake
                    violation = _max_violation(v @ v.T, ce)
                    previous_norm = None
                    escaped = True
            if not escaped:
                stall_rounds += 1
                if stall_rounds >= 2:
                    break
        x = v @ v.T
        obj = _objective_simplified(x, ce, se, alpha)
        feasible = violation <= cfg.constraint_tol
        key = (not feasible, obj if feasible else violation)
        if best is None or key < best[0]:
            best = (key, v, grad_norm, violation)
        if grad_norm < cfg.grad_tol and violation <= cfg.constraint_tol:
            have_certified = True

    _, v, grad_norm, violation = best
    x = v @ v.T
    np.fill_diagonal(x, 1.0)
    return RelaxationSolution(
        x=x,
        v=v,
        index=nodes,
        obj_simplified=_objective_simplified(x, ce, se, alpha),
        obj_relaxation=_objective_relaxation(x, ce, se, alpha),
        converged=bool(grad_norm < cfg.grad_tol and violation <= cfg.constraint_tol),
        grad_norm=grad_norm,
        max_violation=violation,
    )


@dataclass(frozen=True)
class MappingParams:
    """Thresholds for the sorted-entry rounding; one entry per round."""

    union_levels: tuple[float, ...] = (0.9,)
    sepa_levels: tuple[float, ...] = (-0.4,)

    def __post_init__(self):
        if len(self.union_levels) != len(self.sepa_levels):
            raise ValueError("union and separation level lists must match in length")
        for u, s in zip(self.union_levels, self.sepa_levels):
            if not (-0.5 < u <= 1.0):
                raise ValueError(f"union level {u} outside (-0.5, 1]")
            if not (-1.0 <= s < u):
                raise ValueError(f"separation level {s} outside [-1, union level)")

    @property
    def rounds(self) -> int:
        return len(self.union_levels)


@dataclass
class MappingInfo:
    forced_unions: int = 0
    ignored_separations: int = 0
    groups: tuple[tuple[int, ...], ...] = ()

    @property
    def degraded(self) -> bool:
        return self.forced_unions > 0


def _compatible(dsu: DisjointSet, separations: list[tuple[int, int]], i: int, j: int) -> bool:
    ri, rj = dsu.find(i), dsu.find(j)
    for a, b in separations:
        ra, rb = dsu.find(a), dsu.find(b)
        if (ra == ri and rb == rj) or (ra == rj and rb == ri):
            return False
    return True


def map_to_masks(
    sol: RelaxationSolution,
    dg: DecompositionGraph,
    params: MappingParams | None = None,
    alpha=None,
    info: MappingInfo | None = None,
) -> MaskAssignment:
    """Round a relaxation to three masks via sorted entry triplets.

    Entries near 1 union their endpoints (when no recorded separation blocks
    the merge), entries near -1/2 record separations, and remaining groups
    are merged greedily from the top of the sorted list until three remain.
    Every triplet is visited at most once per round (a cursor never rewinds:
    skipped triplets stay skippable after further unions).
    """
    params = params or MappingParams()
    info = info if info is not None else MappingInfo()
    nodes = sol.index
    n = len(nodes)
    alpha = 0.1 if alpha is None else alpha

    triplets = []
    for i in range(n):
        for j in range(i + 1, n):
            value = float(sol.x[i, j])
            if value != 0.0:
                triplets.append((value, nodes[i], nodes[j]))
    triplets.sort(key=lambda t: (-t[0], t[1], t[2]))

    dsu = DisjointSet(nodes)
    separations: list[tuple[int, int]] = []
    for k in range(params.rounds):
        for value, i, j in triplets:
            if value <= params.union_levels[k]:
                break
            if dsu.same(i, j):
                continue
            if _compatible(dsu, separations, i, j):
                dsu.union(i, j)
        for value, i, j in triplets:
            if value >= params.sepa_levels[k]:
                continue
            if dsu.same(i, j):
                info.ignored_separations += 1
                continue
            separations.append((i, j))

    def group_count() -> int:
        return len({dsu.find(node) for node in nodes})

    cursor = 0
    while group_count() > 3:
        merged = False
        while cursor < len(triplets):
            value, i, j = triplets[cursor]
            if not dsu.same(i, j) and _compatible(dsu, separations, i, j):
                dsu.union(i, j)
                merged = True
                break
            cursor += 1
        if merged:
            continue
        # no compatible pair left: force the best-ranked mergeable pair
        forced = False
        for value, i, j in triplets:
            if not dsu.same(i, j):
                dsu.union(i, j)
                info.forced_unions += 1
                forced = True
                break
        if not forced:
            for i in nodes:
                for j in nodes:
                    if i < j and not dsu.same(i, j):
                        dsu.union(i, j)
                        info.forced_unions += 1
                        forced = True
                        break
                if forced:
                    break

    groups = sorted(dsu.groups().values(), key=lambda members: members[0])
    info.groups = tuple(tuple(g) for g in groups)
    colors = {}
    for mask, members in enumerate(groups):
        for node in members:
            colors[node] = mask
    return evaluate(dg, colors, alpha)


def hyperplane_rounding(
    sol: RelaxationSolution, dg: DecompositionGraph, alpha, rng
) -> MaskAssignment:
    """Alternative rounding: project factors onto a random direction, peel a
    greedy independent set as the first mask, then two-color the rest."""
    nodes = sol.index
    scores = sol.v @ rng.normal(size=sol.v.shape[1])
    order = sorted(range(len(nodes)), key=lambda k: (-scores[k], nodes[k]))
    adjacency = dg.adjacency
    first: set[int] = set()
    for k in order:
        node = nodes[k]
        if not any(other in first for other in adjacency[node]):
            first.add(node)
    colors = {node: 0 for node in first}
    frac = as_fraction(alpha)
    for k in order:
        node = nodes[k]
        if node in colors:
            continue
        costs = []
        for c in (1, 2):
            cost = Fraction(0)
            for other in adjacency[node]:
                if other not in colors:
                    continue
                pair = (node, other) if node < other else (other, node)
                if pair in dg.ce and colors[other] == c:
                    cost += 1
                elif pair in dg.se and colors[other] != c:
                    cost += frac
            costs.append((cost, c))
        colors[node] = min(costs)[1]
    return evaluate(dg, colors, alpha)
