"""Active/passive next-class selection and the Gibbs class sampler."""

import numpy as np
import pytest
from scipy import stats

import labelgeo as lg

from oracles import tree_path_union


class TestNextClassActive:
    def test_p5_stretches_to_the_far_end(self, p5):
        state = lg.initial_state(p5, (0, 1))
        assert sorted(state.locus) == [0, 1]
        assert state.inner_boundary == (1,)
        picked, after = lg.next_class_active(state)
        assert picked == 4
        assert sorted(after.locus) == [0, 1, 2, 3, 4]

    def test_star_tie_break_prefers_smallest_id(self, star):
        state = lg.initial_state(star, (0, 1))
        assert sorted(state.locus) == [0, 1, 4]
        assert state.inner_boundary == (4,)
        picked, after = lg.next_class_active(state)
        assert picked == 2
        assert sorted(after.locus) == [0, 1, 2, 4]

    def test_complete_locus_errors(self, p3):
        state = lg.initial_state(p3, (0, 2))
        with pytest.raises(lg.ValidationError, match="complete"):
            lg.next_class_active(state)

    def test_path_constraint_soundness(self):
        rng = np.random.default_rng(17)
        for seed in range(8):
            g = lg.generate_random("tree", int(rng.integers(5, 13)), seed)
            space = lg.LabelSpace.from_graph(g)
            k = int(rng.integers(1, 4))
            anchors = [int(a) for a in rng.choice(space.labels, size=k, replace=False)]
            state = lg.initial_state(space, anchors)
            if len(state.locus) == space.n_vertices:
                continue
            picked, _ = lg.next_class_active(state)
            path = space.path(picked, state.anchors[0])
            entry = next(v for v in path if v in state.locus)
            upto = path[: path.index(entry) + 1]
            assert set(upto) & state.locus == {entry}
            assert entry in state.inner_boundary

    @pytest.mark.parametrize("seed", range(10))
    def test_pick_maximizes_locus_growth_exhaustively(self, seed):
        rng = np.random.default_rng(300 + seed)
        n = int(rng.integers(5, 13))
        g = lg.generate_random("tree", n, seed)
        space = lg.LabelSpace.from_graph(g)
        k = min(int(rng.integers(1, 5)), n - 1)
        anchors = [int(a) for a in rng.choice(space.labels, size=k, replace=False)]
        state = lg.initial_state(space, anchors)
        if len(state.locus) == n:
            return
        picked, after = lg.next_class_active(state)
        # independent oracle: BFS path-union size for every candidate
        sizes = {
            y: len(tree_path_union(n, g.edges, anchors + [y]))
            for y in range(n)
            if y not in set(anchors)
        }
        assert len(after.locus) == sizes[picked] == max(sizes.values())

    def test_requires_tree(self, grid33):
        with pytest.raises(lg.ValidationError, match="tree"):
            lg.initial_state(grid33, (0, 8))


class TestNextClassPassive:
    def test_deterministic_per_seed(self, p3):
        state = lg.initial_state(p3, (0,))
        first, _ = lg.next_class_passive(state, 123)
        second, _ = lg.next_class_passive(state, 123)
        assert first == second
        assert first in (1, 2)

    def test_forced_last_vertex(self, p3):
        state = lg.initial_state(p3, (0, 1))
        picked, _ = lg.next_class_passive(state, 0)
        assert picked == 2

    def test_draws_without_replacement(self, p5):
        state = lg.initial_state(p5, (2,))
        rng = np.random.default_rng(7)
        seen = [2]
        for _ in range(4):
            picked, state = lg.next_class_passive(state, rng)
            assert picked not in seen
            seen.append(picked)
        assert sorted(seen) == [0, 1, 2, 3, 4]
        with pytest.raises(lg.ValidationError, match="every label"):
            lg.next_class_passive(state, rng)


class TestRunSelection:
    def test_p5_single_active_round(self, p5):
        traj = lg.run_selection(p5, (0, 1), rounds=1, policy="active", seed=0)
        assert traj.points == ((0, 2, 2), (1, 3, 5))

    def test_passive_reproducible(self, p5):
        a = lg.run_selection(p5, (0,), rounds=3, policy="passive", seed=11)
        b = lg.run_selection(p5, (0,), rounds=3, policy="passive", seed=11)
        assert a == b

    def test_zero_rounds_is_initial_point_only(self, p5):
        traj = lg.run_selection(p5, (1, 3), rounds=0, policy="active", seed=0)
        assert traj.points == ((0, 2, 3),)

    def test_locus_sizes_nondecreasing(self):
        g = lg.generate_random("tree", 30, seed=5)
        space = lg.LabelSpace.from_graph(g)
        for policy in ("active", "passive"):
            traj = lg.run_selection(space, (0, 1), rounds=12, policy=policy, seed=3)
            sizes = [locus for _, _, locus in traj.points]
            assert all(a <= b for a, b in zip(sizes, sizes[1:]))

    def test_bad_policy(self, p5):
        with pytest.raises(lg.ValidationError, match="policy"):
            lg.run_selection(p5, (0,), 1, "greedy", 0)


class TestGibbsSampler:
    def test_p3_centroid_is_middle_vertex(self, p3):
        # exhaustive uniform-weight variances: (5, 2, 5)
        manual = [sum(p3.dist[v, u] ** 2 for u in range(3)) for v in range(3)]
        assert manual == [5.0, 2.0, 5.0]
        assert lg.metric_centroid(p3) == 1

    def test_theta_zero_is_uniform(self, p5):
        counts = np.zeros(5)
        for i in range(2000):
            draw = lg.gibbs_sample_classes(p5, 1, 0.0, seed=i)
            counts[draw[0]] += 1
        assert stats.chisquare(counts).pvalue > 0.01

    def test_high_theta_concentrates_on_centroid(self, p5):
        centroid = lg.metric_centroid(p5)
        assert centroid == 2
        hits = {v: 0 for v in range(5)}
        for i in range(2000):
            for v in lg.gibbs_sample_classes(p5, 2, 10.0, seed=10_000 + i):
                hits[v] += 1
        assert hits[centroid] > hits[0]
        assert hits[centroid] > hits[4]

    def test_draws_are_distinct_and_seeded(self, p5):
        draw = lg.gibbs_sample_classes(p5, 5, 1.5, seed=4)
        assert sorted(draw) == [0, 1, 2, 3, 4]
        assert draw == lg.gibbs_sample_classes(p5, 5, 1.5, seed=4)

    def test_k_out_of_range(self, p3):
        with pytest.raises(lg.ValidationError, match="k must be"):
            lg.gibbs_sample_classes(p3, 4, 0.0, seed=0)
        with pytest.raises(lg.ValidationError, match="theta"):
            lg.gibbs_sample_classes(p3, 1, -0.5, seed=0)
