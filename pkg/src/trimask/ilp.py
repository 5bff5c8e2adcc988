"""Exact minimization through a 0-1 linear model and branch and bound.

The 0-1 model is the specification of record: each node carries two bits
(the pair (1,1) is forbidden, leaving three codes), auxiliary bit pairs
linearize per-edge equality/inequality tests, and the objective sums
conflict indicators plus alpha times stitch indicators. The search engine
itself branches directly on ternary node colors; the bit model is kept for
verification and for export to external LP solvers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from .graphs import (
    DecompositionGraph,
    MaskAssignment,
    Pair,
    as_fraction,
    evaluate,
)

# color code -> (first bit, second bit); (1,1) is never used
COLOR_BITS = {0: (0, 0), 1: (0, 1), 2: (1, 0)}
BITS_COLOR = {bits: color for color, bits in COLOR_BITS.items()}


@dataclass(frozen=True)
class LinearConstraint:
    """Canonical form: sum(coeff * var) <= rhs with integer coefficients."""

    name: str
    coeffs: dict[str, int]
    rhs: int

    def violated_by(self, bits: dict[str, int]) -> bool:
        return sum(c * bits[v] for v, c in self.coeffs.items()) > self.rhs


@dataclass(frozen=True)
class IlpModel:
    variables: tuple[str, ...]
    constraints: tuple[LinearConstraint, ...]
    objective: dict[str, Fraction]
    alpha: Fraction
    nodes: tuple[int, ...]
    ce: tuple[Pair, ...]
    se: tuple[Pair, ...]


def _x(i: int, bit: int) -> str:
    return f"x{i}_{bit}"


def _c(i: int, j: int, bit: int | None = None) -> str:
    return f"c{i}_{j}" if bit is None else f"c{i}_{j}_{bit}"


def _s(i: int, j: int, bit: int | None = None) -> str:
    return f"s{i}_{j}" if bit is None else f"s{i}_{j}_{bit}"


def build_ilp(dg: DecompositionGraph, alpha) -> IlpModel:
    """Assemble the 0-1 model: one color-cap row per node, five rows per
    conflict edge, six per stitch edge (the final or-constraint splits in two)."""
    frac = as_fraction(alpha)
    nodes = dg.nodes
    ce = tuple(sorted(dg.ce))
    se = tuple(sorted(dg.se))

    variables: list[str] = []
    constraints: list[LinearConstraint] = []
    objective: dict[str, Fraction] = {}

    for i in nodes:
        variables += [_x(i, 1), _x(i, 2)]
        constraints.append(
            LinearConstraint(f"color_cap[{i}]", {_x(i, 1): 1, _x(i, 2): 1}, 1)
        )

    for i, j in ce:
        variables += [_c(i, j, 1), _c(i, j, 2), _c(i, j)]
        objective[_c(i, j)] = Fraction(1)
        constraints += [
            LinearConstraint(
                f"conflict_bit1_hi[{i},{j}]",
                {_x(i, 1): 1, _x(j, 1): 1, _c(i, j, 1): -1},
                1,
            ),
            LinearConstraint(
                f"conflict_bit1_lo[{i},{j}]",
                {_x(i, 1): -1, _x(j, 1): -1, _c(i, j, 1): -1},
                -1,
            ),
            LinearConstraint(
                f"conflict_bit2_hi[{i},{j}]",
                {_x(i, 2): 1, _x(j, 2): 1, _c(i, j, 2): -1},
                1,
            ),
            LinearConstraint(
                f"conflict_bit2_lo[{i},{j}]",
                {_x(i, 2): -1, _x(j, 2): -1, _c(i, j, 2): -1},
                -1,
            ),
            LinearConstraint(
                f"conflict_and[{i},{j}]",
                {_c(i, j, 1): 1, _c(i, j, 2): 1, _c(i, j): -1},
                1,
            ),
        ]

    for i, j in se:
        variables += [_s(i, j, 1), _s(i, j, 2), _s(i, j)]
        objective[_s(i, j)] = frac
        constraints += [
            LinearConstraint(
                f"stitch_bit1_pos[{i},{j}]",
                {_x(i, 1): 1, _x(j, 1): -1, _s(i, j, 1): -1},
                0,
            ),
            LinearConstraint(
                f"stitch_bit1_neg[{i},{j}]",
                {_x(j, 1): 1, _x(i, 1): -1, _s(i, j, 1): -1},
                0,
            ),
            LinearConstraint(
                f"stitch_bit2_pos[{i},{j}]",
                {_x(i, 2): 1, _x(j, 2): -1, _s(i, j, 2): -1},
                0,
            ),
            LinearConstraint(
                f"stitch_bit2_neg[{i},{j}]",
                {_x(j, 2): 1, _x(i, 2): -1, _s(i, j, 2): -1},
                0,
            ),
            LinearConstraint(
                f"stitch_or_1[{i},{j}]", {_s(i, j, 1): 1, _s(i, j): -1}, 0
            ),
            LinearConstraint(
                f"stitch_or_2[{i},{j}]", {_s(i, j, 2): 1, _s(i, j): -1}, 0
            ),
        ]

    return IlpModel(
        variables=tuple(variables),
        constraints=tuple(constraints),
        objective=objective,
        alpha=frac,
        nodes=nodes,
        ce=ce,
        se=se,
    )


def encode_coloring(model: IlpModel, colors: dict[int, int]) -> dict[str, int]:
    """Tight 0-1 encoding of a coloring: every auxiliary variable takes its
    minimal feasible value, so the encoded objective equals the true cost."""
    bits: dict[str, int] = {}
    for i in model.nodes:
        b1, b2 = COLOR_BITS[colors[i]]
        bits[_x(i, 1)] = b1
        bits[_x(i, 2)] = b2
    for i, j in model.ce:
        c1 = int(bits[_x(i, 1)] == bits[_x(j, 1)])
        c2 = int(bits[_x(i, 2)] == bits[_x(j, 2)])
        bits[_c(i, j, 1)] = c1
        bits[_c(i, j, 2)] = c2
        bits[_c(i, j)] = max(0, c1 + c2 - 1)
    for i, j in model.se:
        s1 = abs(bits[_x(i, 1)] - bits[_x(j, 1)])
        s2 = abs(bits[_x(i, 2)] - bits[_x(j, 2)])
        bits[_s(i, j, 1)] = s1
        bits[_s(i, j, 2)] = s2
        bits[_s(i, j)] = max(s1, s2)
    return bits


def decode_bits(model: IlpModel, bits: dict[str, int]) -> dict[int, int]:
    """Colors from the node bit variables, e.g. of an externally solved model."""
    return {i: BITS_COLOR[(bits[_x(i, 1)], bits[_x(i, 2)])] for i in model.nodes}


@dataclass(frozen=True)
class EncodingCheck:
    feasible: bool
    objective: Fraction | None
    violations: tuple[str, ...]


def check_encoding(model: IlpModel, bits: dict[str, int]) -> EncodingCheck:
    """Verify a full variable assignment against every constraint."""
    for var in model.variables:
        if var not in bits:
            raise ValueError(f"variable {var} is unassigned")
        if bits[var] not in (0, 1):
            raise ValueError(f"variable {var} must be 0/1, got {bits[var]}")
    violations = tuple(c.name for c in model.constraints if c.violated_by(bits))
    if violations:
        return EncodingCheck(feasible=False, objective=None, violations=violations)
    obj = sum((w * bits[v] for v, w in model.objective.items()), Fraction(0))
    return EncodingCheck(feasible=True, objective=obj, violations=())


@dataclass(frozen=True)
class SolveReport:
    assignment: MaskAssignment
    nodes_explored: int
    proven_optimal: bool
    wall_time: float


def solve_exact(
    dg: DecompositionGraph, alpha, budget: int = 5_000_000
) -> SolveReport:
    """Branch and bound over ternary node colors.

    Branch order is descending degree (ties by node id); the first node in
    that order is pinned to color 0, which is harmless by color-permutation
    symmetry. The bound at any partial assignment is the exact cost of edges
    whose endpoints are both colored; a branch is cut when the bound cannot
    beat the incumbent. A greedy pass seeds the incumbent. When the explored
    node budget runs out the best incumbent is returned unproven.
    """
    t0 = time.perf_counter()
    frac = as_fraction(alpha)
    stitch_w, conflict_w = frac.numerator, frac.denominator
    nodes = dg.nodes
    n = len(nodes)
    if n == 0:
        return SolveReport(evaluate(dg, {}, alpha), 0, True, time.perf_counter() - t0)

    order = sorted(nodes, key=lambda v: (-dg.degree(v), v))
    pos = {v: k for k, v in enumerate(order)}
    # edges to already-placed nodes, per position: (earlier position, weight)
    back: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for u, v in dg.ce:
        hi, lo = max(pos[u], pos[v]), min(pos[u], pos[v])
        back[hi].append((lo, conflict_w))
    for u, v in dg.se:
        hi, lo = max(pos[u], pos[v]), min(pos[u], pos[v])
        back[hi].append((lo, -stitch_w))
    # weight w>0: cost w if colors equal; w<0: cost -w if colors differ

    def add_cost(colors: list[int], k: int, c: int) -> int:
        cost = 0
        for j, w in back[k]:
            if w > 0:
                if colors[j] == c:
                    cost += w
            elif colors[j] != c:
                cost -= w
        return cost

    # greedy incumbent: cheapest color per node in branch order
    greedy = [0] * n
    greedy_cost = 0
    for k in range(n):
        costs = [add_cost(greedy[:k] + [0] * (n - k), k, c) for c in range(3)]
        best = min(range(3), key=lambda c: (costs[c], c))
        greedy[k] = best
        greedy_cost += costs[best]

    best_cost = greedy_cost
    best_colors = list(greedy)
    proven = True
    explored = 0
    colors = [0] * n

    def descend(k: int, cost: int, used: int) -> None:
        # 'used' = number of distinct colors among positions < k; capping the
        # next color at used keeps only canonical colorings (colors appear in
        # first-use order), which is exactly where the lex-smallest optimum
        # lives, so the reported assignment is unchanged
        nonlocal best_cost, best_colors, proven, explored
        if explored >= budget:
            proven = False
            return
        if k == n:
            if cost < best_cost:
                best_cost = cost
                best_colors = colors[:n]
            return
        for c in range(min(used + 1, 3)):
            if explored >= budget:
                proven = False
                return
            explored += 1
            nxt = cost + add_cost(colors, k, c)
            if nxt >= best_cost:
                continue  # remaining edges only add cost; cannot improve
            colors[k] = c
            descend(k + 1, nxt, max(used, c + 1))

    descend(0, 0, 0)

    assignment = evaluate(dg, {order[k]: best_colors[k] for k in range(n)}, alpha)
    return SolveReport(
        assignment=assignment,
        nodes_explored=explored,
        proven_optimal=proven,
        wall_time=time.perf_counter() - t0,
    )


def write_lp(model: IlpModel) -> str:
    """Serialize the model in LP-format text (minimize, <= rows, binaries)."""
    terms = []
    for var, w in model.objective.items():
        coef = float(w)
        terms.append(f"+ {coef:g} {var}" if coef >= 0 else f"- {-coef:g} {var}")
    obj = " ".join(terms) if terms else "0"
    lines = ["Minimize", f" obj: {obj}", "Subject To"]
    for con in model.constraints:
        row = []
        for var, coef in con.coeffs.items():
            row.append(f"+ {coef} {var}" if coef >= 0 else f"- {-coef} {var}")
        name = con.name.replace("[", "_").replace("]", "").replace(",", "_")
        lines.append(f" {name}: {' '.join(row)} <= {con.rhs}")
    lines.append("Binary")
    for var in model.variables:
        lines.append(f" {var}")
    lines.append("End")
    return "\n".join(lines) + "\n"
