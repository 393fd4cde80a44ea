"""Active next-class selection on trees, a passive baseline, and a Gibbs class sampler.

On a tree the locus of an observed set is the vertex set of the union of the
unique paths between its anchors (a subtree).  The next class maximizing the
locus growth is the vertex farthest from the subtree's inner boundary along a
path that stays outside the subtree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .frechet import check_anchors, frechet_mean
from .graphs import LabelSpace


@dataclass(frozen=True)
class SelectionState:
    """Current observed set with its tree locus and inner boundary."""

    space: LabelSpace
    anchors: tuple[int, ...]
    locus: frozenset
    inner_boundary: tuple[int, ...]
    round_index: int


def tree_locus(space: LabelSpace, anchors) -> frozenset:
    """Vertex set of the union of pairwise anchor paths (exact on trees)."""
    ids, _ = check_anchors(space, anchors)
    members = set(ids)
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            members.update(space.path(a, b))
    return frozenset(members)


def _inner_boundary(space: LabelSpace, locus: frozenset) -> tuple[int, ...]:
    return tuple(
        sorted(v for v in locus if any(u not in locus for u in space.neighbors(v)))
    )


def initial_state(space: LabelSpace, anchors) -> SelectionState:
    if space.kind != "tree":
        raise ValidationError(f"active selection needs a tree space, got kind {space.kind!r}")
    if space.graph.labels != tuple(range(space.n_vertices)):
        raise ValidationError("active selection needs every tree vertex to be a label")
    ids, _ = check_anchors(space, anchors)
    locus = tree_locus(space, ids)
    return SelectionState(
        space=space,
        anchors=ids,
        locus=locus,
        inner_boundary=_inner_boundary(space, locus),
        round_index=0,
    )


def _advance(state: SelectionState, chosen: int) -> SelectionState:
    anchors = state.anchors + (chosen,)
    locus = tree_locus(state.space, anchors)
    return SelectionState(
        space=state.space,
        anchors=anchors,
        locus=locus,
        inner_boundary=_inner_boundary(state.space, locus),
        round_index=state.round_index + 1,
    )


def next_class_active(state: SelectionState) -> tuple[int, SelectionState]:
    """Pick the vertex maximizing d(y, b) over boundary vertices b reachable
    from y without re-entering the locus; ties broken by (d desc, y asc, b asc).

    The only feasible boundary partner for y is the first locus vertex on the
    path from y (any other one is blocked by it), so candidates are the pairs
    (y, entry(y)).
    """
    space = state.space
    outside = [int(v) for v in space.labels if v not in state.locus]
    if not outside:
        raise ValidationError("selection complete: the locus already covers the label space")
    anchor = state.anchors[0]
    best: tuple[float, int, int] | None = None
    for y in outside:
        entry = next(v for v in space.path(y, anchor) if v in state.locus)
        key = (-space.dist[y, entry], y, entry)
        if best is None or key < best:
            best = key
    chosen = best[1]
    return chosen, _advance(state, chosen)


def next_class_passive(state: SelectionState, seed) -> tuple[int, SelectionState]:
    """Uniform seeded draw from the not-yet-observed labels (without replacement)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    remaining = [int(v) for v in state.space.labels if v not in set(state.anchors)]
    if not remaining:
        raise ValidationError("selection complete: every label is already observed")
    choice = remaining[int(rng.integers(len(remaining)))]
    return choice, _advance(state, choice)


@dataclass(frozen=True)
class Trajectory:
    """Per-round (round, num_observed, locus_size) triples for one trial."""

    policy: str
    seed: int
    points: tuple[tuple[int, int, int], ...]


def run_selection(
    space: LabelSpace, initial_anchors, rounds: int, policy: str, seed: int
) -> Trajectory:
    """Run a selection loop; the locus size is nondecreasing across rounds.

    Rounds past completion (locus = Y for the active policy, all labels
    observed for the passive one) repeat the final point unchanged.
    """
    if policy not in ("active", "passive"):
        raise ValidationError(f"policy must be 'active' or 'passive', got {policy!r}")
    if rounds < 0:
        raise ValidationError("rounds must be >= 0")
    state = initial_state(space, initial_anchors)
    rng = np.random.default_rng(seed)
    points = [(0, len(state.anchors), len(state.locus))]
    n_labels = len(space.labels)
    for r in range(1, rounds + 1):
        if policy == "active" and len(state.locus) < n_labels:
            _, state = next_class_active(state)
        elif policy == "passive" and len(state.anchors) < n_labels:
            _, state = next_class_passive(state, rng)
        points.append((r, len(state.anchors), len(state.locus)))
    return Trajectory(policy=policy, seed=seed, points=tuple(points))


def metric_centroid(space: LabelSpace) -> int:
    """Canonical Frechet mean of the whole label set under uniform weights."""
    labels = [int(v) for v in space.labels]
    return frechet_mean(space, labels, np.ones(len(labels))).canonical


def gibbs_sample_classes(space: LabelSpace, k: int, theta: float, seed: int) -> tuple[int, ...]:
    """Draw k distinct labels with probability proportional to
    exp(-theta * d(label, centroid)), renormalizing after each removal.

    theta = 0 is uniform sampling; larger theta concentrates draws around the
    metric centroid.
    """
    n = len(space.labels)
    if k < 1 or k > n:
        raise ValidationError(f"k must be in [1, {n}], got {k}")
    if not np.isfinite(theta) or theta < 0:
        raise ValidationError(f"theta must be nonnegative, got {theta}")
    centroid = metric_centroid(space)
    c_pos = space.label_positions([centroid])[0]
    # stabilized: exp(-theta*(d - d_min)) leaves the normalized weights unchanged
    d = space.label_dist[:, c_pos]
    logw = -theta * (d - d.min())
    weights = np.exp(logw)
    rng = np.random.default_rng(seed)
    remaining = list(range(n))
    drawn: list[int] = []
    for _ in range(k):
        w = weights[remaining]
        probs = w / w.sum()
        if abs(probs.sum() - 1.0) > 1e-9:
            raise ValidationError("sampling weights failed to normalize")
        pick = int(rng.choice(len(remaining), p=probs))
        drawn.append(int(space.labels[remaining[pick]]))
        remaining.pop(pick)
    return tuple(drawn)
