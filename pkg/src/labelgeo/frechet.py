"""Weighted Frechet means over label spaces and the linear prediction form.

The weighted Frechet variance of a candidate label v under anchors
(lambda_1..lambda_K) and weights w is sum_i w_i * d^2(v, lambda_i); the
Frechet mean is its argmin over the label set Y.  Stacking the negative
squared distances into an N x K matrix turns prediction into a fixed linear
transform of the probability vector followed by an argmax.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graphs import LabelSpace

REL_TOL = 1e-9
ABS_TOL = 1e-12


def _tie_threshold(extreme: float) -> float:
    return max(REL_TOL * abs(extreme), ABS_TOL)


def tie_argmin(values: np.ndarray) -> np.ndarray:
    """Indices of all entries within tolerance of the minimum."""
    vmin = float(values.min())
    return np.flatnonzero(values <= vmin + _tie_threshold(vmin))


def tie_argmax(values: np.ndarray) -> np.ndarray:
    """Indices of all entries within tolerance of the maximum."""
    vmax = float(values.max())
    return np.flatnonzero(values >= vmax - _tie_threshold(vmax))


@dataclass(frozen=True)
class Prediction:
    """An argmin/argmax tie set with its canonical (smallest-id) representative."""

    members: tuple[int, ...]
    canonical: int

    @classmethod
    def from_ids(cls, ids) -> "Prediction":
        members = tuple(sorted(int(v) for v in ids))
        return cls(members=members, canonical=members[0])

    @property
    def tie_set_size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class DistanceAdaptor:
    """N x K matrix of negative squared distances, rows ordered by sorted Y."""

    matrix: np.ndarray
    anchors: tuple[int, ...]
    labels: np.ndarray

    def __post_init__(self):
        self.matrix.flags.writeable = False


def check_anchors(space: LabelSpace, anchors) -> tuple[tuple[int, ...], np.ndarray]:
    """Validate an observed set: nonempty, distinct, subset of Y.

    Returns the anchor ids and their row positions in sorted Y.
    """
    ids = tuple(int(a) for a in anchors)
    if not ids:
        raise ValidationError("observed set is empty")
    if len(set(ids)) != len(ids):
        raise ValidationError("observed set contains duplicates")
    return ids, space.label_positions(ids)


def check_weights(weights, k: int) -> np.ndarray:
    """Validate a weight vector: length k, finite, nonnegative, not all zero."""
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (k,):
        raise ValidationError(f"expected {k} weights, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValidationError("weights must be finite")
    if np.any(w < 0):
        raise ValidationError("weights must be nonnegative")
    if not np.any(w > 0):
        raise ValidationError("weights must not be all zero")
    return w


def frechet_variance(space: LabelSpace, anchors, weights, v: int) -> float:
    """Weighted sum of squared distances from candidate v to the anchors."""
    ids, pos = check_anchors(space, anchors)
    w = check_weights(weights, len(ids))
    v_pos = space.label_positions([v])[0]
    return float(space.label_dsq[v_pos, pos] @ w)


def frechet_mean(space: LabelSpace, anchors, weights) -> Prediction:
    """Exact argmin of the Frechet variance over Y, with the full tie set.

    Weights may be unnormalized: positive rescaling leaves the argmin set
    unchanged.  Ties are resolved to the smallest vertex id as the canonical
    representative.
    """
    ids, pos = check_anchors(space, anchors)
    w = check_weights(weights, len(ids))
    variances = space.label_dsq[:, pos] @ w
    return Prediction.from_ids(space.labels[tie_argmin(variances)])


def build_adaptor(space: LabelSpace, anchors) -> DistanceAdaptor:
    """The fixed linear transform turning probability vectors into label scores."""
    ids, pos = check_anchors(space, anchors)
    return DistanceAdaptor(matrix=-space.label_dsq[:, pos], anchors=ids, labels=space.labels)


def adaptor_predict(adaptor: DistanceAdaptor, p) -> Prediction:
    """Argmax of (adaptor.matrix @ p); equals the Frechet mean under weights p."""
    w = check_weights(p, len(adaptor.anchors))
    scores = adaptor.matrix @ w
    return Prediction.from_ids(adaptor.labels[tie_argmax(scores)])


def predict_batch(adaptor: DistanceAdaptor, probs) -> list[Prediction]:
    """Row-wise :func:`adaptor_predict` for a (n_samples, K) probability matrix."""
    pmat = np.asarray(probs, dtype=np.float64)
    if pmat.ndim != 2 or pmat.shape[1] != len(adaptor.anchors):
        raise ValidationError(
            f"probability matrix must be (n, {len(adaptor.anchors)}), got {pmat.shape}"
        )
    scores = pmat @ adaptor.matrix.T
    return [Prediction.from_ids(adaptor.labels[tie_argmax(row)]) for row in scores]


def beta_predict(space: LabelSpace, anchors, p, beta: float) -> Prediction:
    """Argmin of sum_i p_i * d^beta(y, lambda_i); beta=2 is the Frechet mean,
    beta=1 the Frechet median."""
    if not np.isfinite(beta) or beta <= 0:
        raise ValidationError(f"beta must be positive, got {beta}")
    ids, pos = check_anchors(space, anchors)
    w = check_weights(p, len(ids))
    if beta == 2.0:
        powered = space.label_dsq[:, pos]  # shared with the adaptor path, bit-identical
    else:
        powered = space.label_dist[:, pos] ** beta
    return Prediction.from_ids(space.labels[tie_argmin(powered @ w)])


def softmax_with_temperature(logits, temperature: float) -> np.ndarray:
    """Temperature-scaled softmax along the last axis, stabilized by max-subtraction."""
    if not np.isfinite(temperature) or temperature <= 0:
        raise ValidationError(f"temperature must be positive, got {temperature}")
    z = np.asarray(logits, dtype=np.float64)
    if z.size == 0 or not np.all(np.isfinite(z)):
        raise ValidationError("logits must be finite and nonempty")
    z = z / temperature
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)
