"""Losses, calibration, temperature sweeps, simplex regions, policy summaries."""

import numpy as np
import pytest

import labelgeo as lg


class TestEvaluate:
    def test_perfect_predictions(self, p3):
        report = lg.evaluate(p3, [0, 1, 2], [0, 1, 2])
        assert report.mean_sq_distance == 0.0
        assert report.zero_one_error == 0.0
        assert report.normalized_msd == 0.0
        assert report.n_samples == 3

    def test_complete_graph_msd_equals_zero_one(self):
        s = lg.LabelSpace.from_graph(lg.make_complete(4))
        report = lg.evaluate(s, [0, 1, 2, 3], [0, 1, 3, 2])
        assert report.mean_sq_distance == 0.5 == report.zero_one_error

    def test_p3_worst_case_normalizes_to_one(self, p3):
        report = lg.evaluate(p3, [2], [0])
        assert report.mean_sq_distance == 4.0
        assert report.normalized_msd == 1.0

    def test_random_lists_on_complete_graph(self):
        s = lg.LabelSpace.from_graph(lg.make_complete(7))
        rng = np.random.default_rng(0)
        for _ in range(25):
            preds = rng.integers(0, 7, size=40)
            truths = rng.integers(0, 7, size=40)
            report = lg.evaluate(s, preds, truths)
            assert report.mean_sq_distance == report.zero_one_error
            assert 0.0 <= report.normalized_msd <= 1.0

    def test_errors(self, p3):
        with pytest.raises(lg.ValidationError, match="truths"):
            lg.evaluate(p3, [0, 1], [0])
        with pytest.raises(lg.ValidationError, match="outside"):
            lg.evaluate(p3, [0], [9])
        with pytest.raises(lg.ValidationError, match="outside"):
            lg.evaluate(p3, [9], [0])

    def test_optimistic_mode_scores_best_tie_member(self, p3):
        tie = lg.Prediction(members=(0, 1, 2), canonical=0)
        pessimist = lg.evaluate(p3, [tie], [2])
        optimist = lg.evaluate(p3, [tie], [2], optimistic=True)
        assert pessimist.mean_sq_distance == 4.0
        assert optimist.mean_sq_distance == 0.0
        assert optimist.zero_one_error == 0.0

    def test_weight_scaling_leaves_normalized_msd_unchanged(self):
        base = lg.LabelSpace.from_graph(lg.load_edge_list("0 1 1\n1 2 1"))
        scaled = lg.LabelSpace.from_graph(lg.load_edge_list("0 1 3\n1 2 3"))
        a = lg.evaluate(base, [2, 1], [0, 1])
        b = lg.evaluate(scaled, [2, 1], [0, 1])
        assert b.mean_sq_distance == pytest.approx(9 * a.mean_sq_distance)
        assert b.normalized_msd == pytest.approx(a.normalized_msd)


class TestExpectedCalibrationError:
    def test_perfectly_calibrated_is_zero(self):
        conf = np.repeat([0.25, 0.75], 40)
        correct = np.concatenate([
            np.repeat([True, False], [10, 30]),   # accuracy 0.25 in the 0.25 bin
            np.repeat([True, False], [30, 10]),   # accuracy 0.75 in the 0.75 bin
        ])
        report = lg.expected_calibration_error(conf, correct)
        assert report.ece == pytest.approx(0.0, abs=1e-9)

    def test_confident_and_always_wrong(self):
        report = lg.expected_calibration_error([1.0] * 8, [False] * 8)
        assert report.ece == pytest.approx(1.0)

    def test_hand_computed_four_point_mix(self):
        conf = [0.95, 0.85, 0.65, 0.30]
        correct = [True, False, True, False]
        # bins: |1-.95|/4 + |0-.85|/4 + |1-.65|/4 + |0-.30|/4
        expected = (0.05 + 0.85 + 0.35 + 0.30) / 4
        report = lg.expected_calibration_error(conf, correct)
        assert report.ece == pytest.approx(expected)
        assert sum(b.count for b in report.bins) == 4

    def test_bin_counts_partition_samples(self):
        rng = np.random.default_rng(1)
        conf = rng.random(500)
        correct = rng.random(500) < conf
        report = lg.expected_calibration_error(conf, correct, n_bins=15)
        assert sum(b.count for b in report.bins) == 500
        assert 0.0 <= report.ece <= 1.0

    def test_errors(self):
        with pytest.raises(lg.ValidationError, match="0, 1"):
            lg.expected_calibration_error([1.5], [True])
        with pytest.raises(lg.ValidationError, match="equal-length"):
            lg.expected_calibration_error([0.5, 0.5], [True])


class TestTemperatureSweep:
    def test_single_temperature_equals_direct_evaluation(self, p5):
        logits = np.array([[2.0, 0.0], [0.0, 2.0]])
        truths = [0, 4]
        sweep = lg.temperature_sweep(p5, (0, 4), logits, truths, [1.0])
        probs = lg.softmax_with_temperature(logits, 1.0)
        adaptor = lg.build_adaptor(p5, (0, 4))
        direct = lg.evaluate(p5, lg.predict_batch(adaptor, probs), truths)
        assert sweep.entries[0].eval_report == direct

    def test_logit_scaling_identity(self, p5):
        rng = np.random.default_rng(3)
        logits = rng.normal(size=(30, 2))
        truths = [int(v) for v in rng.integers(0, 5, size=30)]
        a = lg.temperature_sweep(p5, (0, 4), logits, truths, [2.0])
        b = lg.temperature_sweep(p5, (0, 4), 5.0 * logits, truths, [10.0])
        assert a.entries[0].eval_report == b.entries[0].eval_report
        assert a.entries[0].calibration.ece == pytest.approx(b.entries[0].calibration.ece)

    def test_msd_optimal_temperature_can_differ_from_default(self, p5):
        # truth is the midpoint; a flatter softmax pulls the mean onto it
        logits = np.array([[1.0, 0.0]])
        sweep = lg.temperature_sweep(p5, (0, 4), logits, [2], [1.0, 100.0])
        assert sweep.best_msd_temperature == 100.0

    def test_reports_both_optima(self, p5):
        rng = np.random.default_rng(9)
        logits = rng.normal(size=(20, 2)) * 3
        truths = [int(v) for v in rng.integers(0, 5, size=20)]
        temps = [0.5, 1.0, 2.0, 4.0]
        sweep = lg.temperature_sweep(p5, (0, 4), logits, truths, temps)
        assert sweep.best_msd_temperature in temps
        assert sweep.best_ece_temperature in temps
        assert len(sweep.entries) == 4


class TestSimplexRegions:
    def test_complete_k3_regions_are_argmax(self, k3):
        grid = lg.simplex_regions(k3, (0, 1, 2), 12)
        assert len(grid.points) == 13 * 14 // 2
        for (a, b, c), label, ties in zip(grid.points, grid.assignments, grid.tie_sizes):
            coords = (a, b, c)
            best = max(coords)
            assert label == coords.index(best)
            assert (ties > 1) == (coords.count(best) > 1)

    def test_corners_map_to_anchors(self, p5, grid33, k3):
        for space, anchors in [(p5, (0, 2, 4)), (grid33, (0, 4, 8)), (k3, (0, 1, 2))]:
            grid = lg.simplex_regions(space, anchors, 1)
            by_point = dict(zip(grid.points, grid.assignments))
            assert by_point[(1, 0, 0)] == anchors[0]
            assert by_point[(0, 1, 0)] == anchors[1]
            assert by_point[(0, 0, 1)] == anchors[2]

    def test_tree_regions_reach_interior_vertices(self, p5):
        grid = lg.simplex_regions(p5, (0, 2, 4), 20)
        assert set(grid.assignments) == {0, 1, 2, 3, 4}

    def test_requires_three_anchors(self, p5):
        with pytest.raises(lg.ValidationError, match="3 anchors"):
            lg.simplex_regions(p5, (0, 4), 10)


class TestComparePolicies:
    def test_single_trajectory_means_echo_it(self):
        traj = lg.Trajectory(policy="active", seed=0, points=((0, 2, 2), (1, 3, 5)))
        summary = lg.compare_policies([traj])
        assert [(s.round_index, s.mean_locus_size, s.stderr) for s in summary] == [
            (0, 2.0, 0.0),
            (1, 5.0, 0.0),
        ]

    def test_active_beats_passive_on_p5(self, p5):
        trajectories = []
        for trial in range(6):
            for policy in ("active", "passive"):
                trajectories.append(
                    lg.run_selection(p5, (0, 1), rounds=2, policy=policy, seed=trial)
                )
        summary = {(s.policy, s.round_index): s.mean_locus_size for s in lg.compare_policies(trajectories)}
        for r in range(3):
            assert summary[("active", r)] >= summary[("passive", r)]

    def test_stderr_uses_sample_std(self):
        a = lg.Trajectory(policy="p", seed=0, points=((0, 1, 2),))
        b = lg.Trajectory(policy="p", seed=1, points=((0, 1, 4),))
        (row,) = lg.compare_policies([a, b])
        assert row.mean_locus_size == 3.0
        assert row.stderr == pytest.approx(np.std([2, 4], ddof=1) / np.sqrt(2))


def test_relative_improvement():
    assert lg.relative_improvement(0.2922, 0.2613) == pytest.approx(0.10574, abs=1e-4)
    with pytest.raises(lg.ValidationError):
        lg.relative_improvement(0.0, 1.0)
