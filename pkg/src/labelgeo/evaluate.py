"""Losses, calibration, temperature sweeps, policy comparison, and simplex regions.

The evaluation loss is the empirical mean squared distance between predicted
and true labels; on the complete graph it coincides with the 0-1 error, and
dividing by the squared diameter puts any metric space on the same 0-1 scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .frechet import (
    ABS_TOL,
    REL_TOL,
    Prediction,
    build_adaptor,
    check_anchors,
    predict_batch,
    softmax_with_temperature,
)
from .graphs import LabelSpace


@dataclass(frozen=True)
class EvalReport:
    mean_sq_distance: float
    zero_one_error: float
    normalized_msd: float
    n_samples: int

    def to_dict(self) -> dict:
        return {
            "mean_sq_distance": self.mean_sq_distance,
            "zero_one_error": self.zero_one_error,
            "normalized_msd": self.normalized_msd,
            "n_samples": self.n_samples,
        }


def _canonical_ids(space: LabelSpace, predictions) -> tuple[list[int], list[tuple[int, ...]]]:
    ids, tie_sets = [], []
    label_set = set(int(v) for v in space.labels)
    for p in predictions:
        if isinstance(p, Prediction):
            ids.append(p.canonical)
            tie_sets.append(p.members)
        else:
            ids.append(int(p))
            tie_sets.append((int(p),))
        if ids[-1] not in label_set:
            raise ValidationError(f"prediction {ids[-1]} is outside the label set")
    return ids, tie_sets


def evaluate(space: LabelSpace, predictions, truths, optimistic: bool = False) -> EvalReport:
    """Mean squared distance, 0-1 error, and the diameter-normalized form.

    ``predictions`` may be canonical label ids or :class:`Prediction` objects.
    With ``optimistic=True`` each sample scores the best member of its tie set
    (off by default; canonical scoring is the standard mode).
    """
    preds, tie_sets = _canonical_ids(space, predictions)
    truth_ids = [int(t) for t in truths]
    if len(preds) != len(truth_ids):
        raise ValidationError(
            f"got {len(preds)} predictions but {len(truth_ids)} truths"
        )
    if not preds:
        raise ValidationError("need at least one sample")
    label_set = set(int(v) for v in space.labels)
    for t in truth_ids:
        if t not in label_set:
            raise ValidationError(f"truth {t} is outside the label set")
    d = space.dist
    if optimistic:
        sq = np.array([min(d[m, t] ** 2 for m in ms) for ms, t in zip(tie_sets, truth_ids)])
        wrong = np.array([t not in ms for ms, t in zip(tie_sets, truth_ids)])
    else:
        sq = d[preds, truth_ids] ** 2
        wrong = np.asarray(preds) != np.asarray(truth_ids)
    msd = float(sq.mean())
    diam = space.diameter
    return EvalReport(
        mean_sq_distance=msd,
        zero_one_error=float(wrong.mean()),
        normalized_msd=msd / diam**2 if diam > 0 else 0.0,
        n_samples=len(preds),
    )


@dataclass(frozen=True)
class BinStat:
    lower: float
    upper: float
    mean_confidence: float
    accuracy: float
    count: int


@dataclass(frozen=True)
class CalibrationReport:
    ece: float
    bins: tuple[BinStat, ...]
    n_samples: int
    temperature: float | None = None

    def to_dict(self) -> dict:
        return {
            "temperature": self.temperature,
            "ece": self.ece,
            "n_samples": self.n_samples,
            "bins": [
                {
                    "lower": b.lower,
                    "upper": b.upper,
                    "mean_confidence": b.mean_confidence,
                    "accuracy": b.accuracy,
                    "count": b.count,
                }
                for b in self.bins
            ],
        }


def expected_calibration_error(
    confidences, correct, n_bins: int = 10, temperature: float | None = None
) -> CalibrationReport:
    """Equal-width-bin ECE: sum over bins of (count/n) * |accuracy - confidence|.

    Empty bins contribute nothing and are reported with zeroed statistics.
    """
    conf = np.asarray(confidences, dtype=np.float64)
    hits = np.asarray(correct, dtype=bool)
    if conf.ndim != 1 or conf.shape != hits.shape or conf.size == 0:
        raise ValidationError("confidences and correct flags must be equal-length, nonempty")
    if np.any(conf < 0) or np.any(conf > 1) or not np.all(np.isfinite(conf)):
        raise ValidationError("confidences must lie in [0, 1]")
    if n_bins < 1:
        raise ValidationError("n_bins must be >= 1")
    n = conf.size
    idx = np.minimum((conf * n_bins).astype(np.int64), n_bins - 1)
    bins = []
    ece = 0.0
    for b in range(n_bins):
        in_bin = idx == b
        count = int(in_bin.sum())
        if count:
            mean_conf = float(conf[in_bin].mean())
            acc = float(hits[in_bin].mean())
            ece += (count / n) * abs(acc - mean_conf)
        else:
            mean_conf, acc = 0.0, 0.0
        bins.append(BinStat(b / n_bins, (b + 1) / n_bins, mean_conf, acc, count))
    return CalibrationReport(ece=float(ece), bins=tuple(bins), n_samples=n, temperature=temperature)


@dataclass(frozen=True)
class SweepEntry:
    temperature: float
    eval_report: EvalReport
    calibration: CalibrationReport


@dataclass(frozen=True)
class SweepResult:
    entries: tuple[SweepEntry, ...]
    best_msd_temperature: float
    best_ece_temperature: float


def temperature_sweep(
    space: LabelSpace, anchors, logits, truths, temperatures, n_bins: int = 10
) -> SweepResult:
    """Evaluate softmax -> adaptor prediction at each temperature.

    Confidence for calibration is the max softmax probability; a sample is
    correct when the canonical prediction matches its truth.  Reports the
    temperature minimizing the mean squared distance and the one minimizing
    the ECE (first on ties).
    """
    ids, _ = check_anchors(space, anchors)
    temps = [float(t) for t in temperatures]
    if not temps:
        raise ValidationError("need at least one temperature")
    adaptor = build_adaptor(space, ids)
    logit_mat = np.asarray(logits, dtype=np.float64)
    if logit_mat.ndim != 2 or logit_mat.shape[1] != len(ids):
        raise ValidationError(f"logits must be (n, {len(ids)}), got {logit_mat.shape}")
    truth_ids = [int(t) for t in truths]
    entries = []
    for t in temps:
        probs = softmax_with_temperature(logit_mat, t)
        preds = predict_batch(adaptor, probs)
        report = evaluate(space, preds, truth_ids)
        conf = probs.max(axis=1)
        hit = np.array([p.canonical == y for p, y in zip(preds, truth_ids)])
        cal = expected_calibration_error(conf, hit, n_bins=n_bins, temperature=t)
        entries.append(SweepEntry(temperature=t, eval_report=report, calibration=cal))
    best_msd = min(entries, key=lambda e: e.eval_report.mean_sq_distance)
    best_ece = min(entries, key=lambda e: e.calibration.ece)
    return SweepResult(
        entries=tuple(entries),
        best_msd_temperature=best_msd.temperature,
        best_ece_temperature=best_ece.temperature,
    )


@dataclass(frozen=True)
class SimplexRegionGrid:
    """Canonical predicted label for every barycentric grid point over 3 anchors."""

    anchors: tuple[int, int, int]
    resolution: int
    points: tuple[tuple[int, int, int], ...]
    assignments: tuple[int, ...]
    tie_sizes: tuple[int, ...]


def simplex_regions(space: LabelSpace, anchors, resolution: int) -> SimplexRegionGrid:
    """Sweep the barycentric grid {(a,b,c) : a+b+c=R} over three anchors.

    Grid size is (R+1)(R+2)/2; corner points always map to their anchors.
    """
    ids, pos = check_anchors(space, anchors)
    if len(ids) != 3:
        raise ValidationError(f"simplex regions need exactly 3 anchors, got {len(ids)}")
    r = int(resolution)
    if r < 1:
        raise ValidationError(f"resolution must be >= 1, got {resolution}")
    points = [(a, b, r - a - b) for a in range(r + 1) for b in range(r - a + 1)]
    weights = np.asarray(points, dtype=np.float64) / r
    variances = space.label_dsq[:, pos] @ weights.T
    vmin = variances.min(axis=0)
    mask = variances <= vmin + np.maximum(REL_TOL * np.abs(vmin), ABS_TOL)
    canonical = space.labels[mask.argmax(axis=0)]
    tie_sizes = mask.sum(axis=0)
    return SimplexRegionGrid(
        anchors=ids,
        resolution=r,
        points=tuple(points),
        assignments=tuple(int(v) for v in canonical),
        tie_sizes=tuple(int(s) for s in tie_sizes),
    )


@dataclass(frozen=True)
class PolicyRoundSummary:
    policy: str
    round_index: int
    n_trials: int
    mean_locus_size: float
    stderr: float


def compare_policies(trajectories) -> list[PolicyRoundSummary]:
    """Per-round mean locus size and standard error for each policy."""
    grouped: dict[tuple[str, int], list[int]] = {}
    for traj in trajectories:
        for round_index, _, locus_size in traj.points:
            grouped.setdefault((traj.policy, round_index), []).append(locus_size)
    if not grouped:
        raise ValidationError("need at least one trajectory")
    out = []
    for (policy, round_index), sizes in sorted(grouped.items()):
        arr = np.asarray(sizes, dtype=np.float64)
        stderr = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
        out.append(
            PolicyRoundSummary(
                policy=policy,
                round_index=round_index,
                n_trials=arr.size,
                mean_locus_size=float(arr.mean()),
                stderr=stderr,
            )
        )
    return out


def relative_improvement(baseline: float, ours: float) -> float:
    """(baseline - ours) / baseline; positive when ours is lower."""
    if baseline == 0:
        raise ValidationError("relative improvement is undefined for a zero baseline")
    return (baseline - ours) / baseline
