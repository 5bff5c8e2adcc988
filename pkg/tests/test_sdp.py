import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import k4_graph, random_graph, triangle_graph, worked_example_graph
from trimask.graphs import DecompositionGraph, brute_force_optimum, evaluate
from trimask.sdp import (
    MASK_VECTORS,
    MappingInfo,
    MappingParams,
    RelaxationSolution,
    SdpConfig,
    build_cost_matrix,
    discrete_vector_objective,
    hyperplane_rounding,
    map_to_masks,
    solve_relaxation,
)


class TestMaskVectors:
    def test_unit_norm(self):
        for v in MASK_VECTORS:
            assert abs(v[0] ** 2 + v[1] ** 2 - 1.0) < 1e-12

    def test_pairwise_dots(self):
        for i, a in enumerate(MASK_VECTORS):
            for j, b in enumerate(MASK_VECTORS):
                dot = a[0] * b[0] + a[1] * b[1]
                expected = 1.0 if i == j else -0.5
                assert abs(dot - expected) < 1e-12


class TestCostMatrix:
    def test_worked_example_first_row(self):
        cm = build_cost_matrix(worked_example_graph(), 0.1)
        assert cm.index == (1, 2, 3, 4, 5)
        np.testing.assert_allclose(cm.matrix[0], [0, 1, 1, -0.1, 1])
        np.testing.assert_allclose(cm.matrix, cm.matrix.T)

    def test_no_edges_zero(self):
        cm = build_cost_matrix(DecompositionGraph.from_edges(3), 0.1)
        assert not cm.matrix.any()

    def test_single_conflict_pair(self):
        cm = build_cost_matrix(DecompositionGraph.from_edges(2, ce=[(0, 1)]), 0.1)
        assert cm.matrix[0, 1] == 1.0 and cm.matrix[1, 0] == 1.0


class TestVectorObjective:
    def test_conflict_same_color_contributes_one(self):
        dg = DecompositionGraph.from_edges(2, ce=[(0, 1)])
        assert discrete_vector_objective({0: 1, 1: 1}, dg, 0.1) == 1

    def test_conflict_distinct_contributes_zero(self):
        dg = DecompositionGraph.from_edges(2, ce=[(0, 1)])
        assert discrete_vector_objective({0: 0, 1: 2}, dg, 0.1) == 0

    def test_stitch_terms(self):
        dg = DecompositionGraph.from_edges(2, se=[(0, 1)])
        assert discrete_vector_objective({0: 0, 1: 0}, dg, 0.1) == 0
        assert discrete_vector_objective({0: 0, 1: 1}, dg, 0.1) == Fraction(1, 10)

    def test_identity_with_evaluate(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 11))
            dg = random_graph(rng, n)
            colors = {node: int(rng.integers(0, 3)) for node in dg.nodes}
            assert discrete_vector_objective(colors, dg, 0.1) == \
                evaluate(dg, colors, 0.1).objective


class TestRelaxation:
    def test_triangle_analytic_optimum(self):
        dg = triangle_graph()
        sol = solve_relaxation(build_cost_matrix(dg, 0.1), dg)
        assert sol.converged
        for i in range(3):
            assert abs(sol.x[i, i] - 1.0) < 1e-6
            for j in range(i + 1, 3):
                assert abs(sol.x[i, j] + 0.5) < 1e-4
        assert abs(sol.obj_relaxation) < 1e-4

    def test_single_node(self):
        dg = DecompositionGraph.from_edges(1)
        sol = solve_relaxation(build_cost_matrix(dg, 0.1), dg)
        assert sol.converged
        np.testing.assert_allclose(sol.x, [[1.0]])

    def test_empty_graph(self):
        dg = DecompositionGraph.from_edges(0)
        sol = solve_relaxation(build_cost_matrix(dg, 0.1), dg)
        assert sol.converged and sol.x.shape == (0, 0)

    def test_worked_example_matches_reference_matrix(self):
        dg = worked_example_graph()
        sol = solve_relaxation(build_cost_matrix(dg, 0.1), dg)
        idx = {node: k for k, node in enumerate(sol.index)}
        assert abs(sol.x[idx[1], idx[4]] - 1.0) <= 0.05
        assert abs(sol.x[idx[3], idx[5]] - 1.0) <= 0.05
        for j in (2, 3, 5):
            assert abs(sol.x[idx[1], idx[j]] + 0.5) <= 0.05

    def test_factor_consistency(self, rng):
        dg = random_graph(rng, 7)
        sol = solve_relaxation(build_cost_matrix(dg, 0.1), dg)
        assert np.max(np.abs(sol.x - sol.v @ sol.v.T)) <= 1e-8

    def test_psd_within_tolerance(self, rng):
        dg = random_graph(rng, 8)
        sol = solve_relaxation(build_cost_matrix(dg, 0.1), dg)
        assert np.linalg.eigvalsh(sol.x).min() >= -1e-6

    def test_k4_relaxation_value(self):
        # tetrahedral configuration: all entries -1/3, objective 2/3
        dg = k4_graph()
        sol = solve_relaxation(build_cost_matrix(dg, 0.1), dg)
        assert sol.converged
        assert abs(sol.obj_relaxation - 2.0 / 3.0) < 1e-3

    def test_lower_bound_when_converged(self, rng):
        checked = 0
        for _ in range(15):
            n = int(rng.integers(3, 11))
            dg = random_graph(rng, n)
            sol = solve_relaxation(build_cost_matrix(dg, 0.1), dg)
            if not sol.converged:
                continue
            checked += 1
            opt = float(brute_force_optimum(dg, 0.1).objective)
            assert sol.obj_relaxation <= opt + 1e-4
        assert checked >= 8

    def test_deterministic(self, rng):
        dg = random_graph(rng, 6)
        cm = build_cost_matrix(dg, 0.1)
        a = solve_relaxation(cm, dg)
        b = solve_relaxation(cm, dg)
        assert np.array_equal(a.x, b.x)


def reference_solution(dg, x, alpha=0.1):
    """Wrap an explicit Gram matrix for mapping tests."""
    nodes = dg.nodes
    pos = {n: k for k, n in enumerate(nodes)}
    ce = [(pos[u], pos[v]) for u, v in sorted(dg.ce)]
    se = [(pos[u], pos[v]) for u, v in sorted(dg.se)]
    return RelaxationSolution.from_matrix(
        np.array(x, dtype=float), nodes,
        np.array(ce, dtype=int).reshape(-1, 2),
        np.array(se, dtype=int).reshape(-1, 2),
        alpha,
    )


WORKED_X = [
    [1.0, -0.5, -0.5, 1.0, -0.5],
    [-0.5, 1.0, -0.5, -0.5, -0.5],
    [-0.5, -0.5, 1.0, -0.5, 1.0],
    [1.0, -0.5, -0.5, 1.0, -0.5],
    [-0.5, -0.5, 1.0, -0.5, 1.0],
]


class TestMapping:
    def test_worked_example_grouping(self):
        dg = worked_example_graph()
        sol = reference_solution(dg, WORKED_X)
        asg = map_to_masks(sol, dg, alpha=0.1)
        assert asg.colors[1] == asg.colors[4]
        assert asg.colors[3] == asg.colors[5]
        assert len({asg.colors[1], asg.colors[2], asg.colors[3]}) == 3
        assert asg.objective == 0

    def test_identity_matrix_three_singletons(self):
        dg = DecompositionGraph.from_edges(3)
        sol = reference_solution(dg, np.eye(3))
        asg = map_to_masks(sol, dg, alpha=0.1)
        assert sorted(asg.colors.values()) == [0, 1, 2]

    def test_never_beats_oracle(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 10))
            dg = random_graph(rng, n)
            sol = solve_relaxation(build_cost_matrix(dg, 0.1), dg)
            mapped = map_to_masks(sol, dg, alpha=0.1)
            assert mapped.objective >= brute_force_optimum(dg, 0.1).objective

    def test_mapping_deterministic(self, rng):
        dg = random_graph(rng, 8)
        sol = solve_relaxation(build_cost_matrix(dg, 0.1), dg)
        a = map_to_masks(sol, dg, alpha=0.1)
        b = map_to_masks(sol, dg, alpha=0.1)
        assert a.colors == b.colors

    def test_params_validation(self):
        with pytest.raises(ValueError):
            MappingParams(union_levels=(0.9, 0.8), sepa_levels=(-0.4,))
        with pytest.raises(ValueError):
            MappingParams(union_levels=(-0.6,), sepa_levels=(-0.7,))
        with pytest.raises(ValueError):
            MappingParams(union_levels=(0.5,), sepa_levels=(0.6,))

    def test_forced_union_flagged(self):
        # tetrahedral X separates every pair at level -0.3, forcing a flagged
        # merge to get down to three groups
        dg = DecompositionGraph.from_edges(4, ce=[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
        x = np.full((4, 4), -1.0 / 3.0)
        np.fill_diagonal(x, 1.0)
        sol = reference_solution(dg, x)
        info = MappingInfo()
        map_to_masks(sol, dg, MappingParams(union_levels=(0.9,), sepa_levels=(-0.3,)),
                     alpha=0.1, info=info)
        assert info.forced_unions >= 1

    def test_visitation_scales_quadratically(self):
        # sorted-triplet mapping grows like n^2 log n, so doubling n may cost
        # at most 5x; best-of-7 timing with a warmup keeps the measure stable
        def run(n):
            rng = np.random.default_rng(0)
            x = rng.uniform(-0.45, 0.95, size=(n, n))
            x = (x + x.T) / 2
            np.fill_diagonal(x, 1.0)
            dg = DecompositionGraph.from_edges(n)
            sol = reference_solution(dg, np.eye(n))
            object.__setattr__(sol, "x", x)
            map_to_masks(sol, dg, alpha=0.1)  # warmup
            best = float("inf")
            for _ in range(7):
                t0 = time.perf_counter()
                map_to_masks(sol, dg, alpha=0.1)
                best = min(best, time.perf_counter() - t0)
            return best

        slow, fast = run(600), run(300)
        assert slow / fast <= 5.0


class TestHyperplaneRounding:
    def test_produces_valid_three_coloring(self, rng):
        dg = random_graph(rng, 9)
        sol = solve_relaxation(build_cost_matrix(dg, 0.1), dg)
        asg = hyperplane_rounding(sol, dg, 0.1, np.random.default_rng(0))
        assert set(asg.colors) == set(dg.nodes)
        assert all(c in (0, 1, 2) for c in asg.colors.values())
        assert asg.objective >= brute_force_optimum(dg, 0.1).objective
