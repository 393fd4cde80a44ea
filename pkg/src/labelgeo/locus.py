"""Loci of the Frechet mean and locus covers.

The locus of an observed set is every label attainable as a Frechet mean for
some weight vector on the simplex.  Pairwise-decomposable spaces (trees,
phylogenetic trees, grids) admit a polynomial sweep over anchor pairs; the
general sweep enumerates a full discretized weight grid and is exponential in
the number of anchors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError, ValidationError
from .frechet import ABS_TOL, REL_TOL, check_anchors, frechet_mean
from .graphs import LabelSpace

DEFAULT_BUDGET = 10**8
_CHUNK = 131072

PAIRWISE_KINDS = ("tree", "phylogenetic_tree", "grid")


def default_resolution(space: LabelSpace) -> int:
    """Weight-grid steps: the graph diameter, rounded up for non-integer metrics."""
    d = space.diameter
    r = int(round(d)) if abs(d - round(d)) <= 1e-9 else math.ceil(d)
    return max(1, r)


@dataclass(frozen=True)
class Locus:
    """Computed locus members with one witness weight vector per member.

    ``exact`` is False when the metric is non-integer, where the discretized
    sweep is only guaranteed to produce a lower bound on the true locus.
    """

    anchors: tuple[int, ...]
    members: tuple[int, ...]
    witnesses: dict[int, tuple[float, ...]]
    method: str
    resolution: int
    exact: bool

    @property
    def member_set(self) -> frozenset:
        return frozenset(self.members)


@dataclass(frozen=True)
class CoverReport:
    """A candidate cover with per-label certificates.

    Each certificate names the anchors and weights of a witness whose Frechet
    mean contains (``singleton``: equals) the vertex; ``missing`` lists
    vertices for which no witness was found.
    """

    cover: tuple[int, ...]
    is_locus_cover: bool
    is_identifying: bool | None
    certificates: dict[int, dict] = field(default_factory=dict)
    missing: tuple[int, ...] = ()
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "cover": list(self.cover),
            "is_locus_cover": self.is_locus_cover,
            "is_identifying": self.is_identifying,
            "certificates": {str(v): c for v, c in sorted(self.certificates.items())},
            "missing": list(self.missing),
            "note": self.note,
        }


def _tie_mask(variances: np.ndarray) -> np.ndarray:
    """Per-column tie mask for a (n_labels, n_weights) variance table."""
    vmin = variances.min(axis=0)
    thr = np.maximum(REL_TOL * np.abs(vmin), ABS_TOL)
    return variances <= vmin + thr


def _pair_sweep(space: LabelSpace, pos_i: int, pos_j: int, resolution: int):
    """Members and first-seen pair weights for one anchor pair sweep.

    Yields (label_id, w_i, w_j) for every tie-set member over the weights
    (t/R, 1-t/R), t = 0..R.
    """
    t = np.arange(resolution + 1, dtype=np.float64) / resolution
    weights = np.stack([t, 1.0 - t])  # (2, R+1)
    variances = space.label_dsq[:, (pos_i, pos_j)] @ weights
    mask = _tie_mask(variances)
    rows, cols = np.nonzero(mask)
    for r, c in zip(rows.tolist(), cols.tolist()):
        yield int(space.labels[r]), float(weights[0, c]), float(weights[1, c])


def locus_pairwise(space: LabelSpace, anchors, resolution: int | None = None) -> Locus:
    """Union of pair loci over all anchor pairs (the polynomial sweep).

    Equals the full locus exactly when the space is pairwise decomposable
    (trees, phylogenetic trees, grids); otherwise it is a lower bound.
    """
    ids, pos = check_anchors(space, anchors)
    res = default_resolution(space) if resolution is None else int(resolution)
    if res < 1:
        raise ValidationError(f"resolution must be >= 1, got {resolution}")
    k = len(ids)
    members: dict[int, tuple[float, ...]] = {}

    def indicator(idx: int) -> tuple[float, ...]:
        return tuple(1.0 if t == idx else 0.0 for t in range(k))

    for i, a in enumerate(ids):
        members.setdefault(a, indicator(i))
    if k == 1:
        for v in frechet_mean(space, ids, [1.0]).members:
            members.setdefault(v, (1.0,))
    n_labels = len(space.labels)
    for i in range(k):
        for j in range(i + 1, k):
            for label, wi, wj in _pair_sweep(space, pos[i], pos[j], res):
                if label not in members:
                    w = [0.0] * k
                    w[i], w[j] = wi, wj
                    members[label] = tuple(w)
            if len(members) == n_labels:
                break
        if len(members) == n_labels:
            break
    return Locus(
        anchors=ids,
        members=tuple(sorted(members)),
        witnesses=members,
        method="pairwise",
        resolution=res,
        exact=space.is_integer_metric(),
    )


def _weight_grid_chunks(resolution: int, k: int, start: int = 1):
    """Chunks of the weight grid {0..R}^K / R, skipping the all-zero row 0."""
    shape = (resolution + 1,) * k
    total = (resolution + 1) ** k
    for lo in range(start, total, _CHUNK):
        idx = np.arange(lo, min(lo + _CHUNK, total))
        digits = np.stack(np.unravel_index(idx, shape), axis=1).astype(np.float64)
        yield digits / resolution


def locus_general(
    space: LabelSpace, anchors, resolution: int | None = None, budget: int = DEFAULT_BUDGET
) -> Locus:
    """Union of Frechet means over the full discretized weight grid.

    Enumerates (R+1)^K weight vectors (minus the all-zero vector, whose
    variance ordering is undefined); refuses when that count exceeds
    ``budget``.
    """
    ids, pos = check_anchors(space, anchors)
    res = default_resolution(space) if resolution is None else int(resolution)
    if res < 1:
        raise ValidationError(f"resolution must be >= 1, got {resolution}")
    k = len(ids)
    required = (res + 1) ** k
    if required > budget:
        raise BudgetExceededError(required, budget)
    members: dict[int, tuple[float, ...]] = {}
    for i, a in enumerate(ids):
        w = [0.0] * k
        w[i] = 1.0
        members.setdefault(a, tuple(w))
    n_labels = len(space.labels)
    dsq = space.label_dsq[:, pos]
    for weights in _weight_grid_chunks(res, k):
        variances = dsq @ weights.T
        mask = _tie_mask(variances)
        rows, cols = np.nonzero(mask)
        for r, c in zip(rows.tolist(), cols.tolist()):
            label = int(space.labels[r])
            if label not in members:
                members[label] = tuple(weights[c])
        if len(members) == n_labels:
            break
    return Locus(
        anchors=ids,
        members=tuple(sorted(members)),
        witnesses=members,
        method="general",
        resolution=res,
        exact=space.is_integer_metric(),
    )


def check_pairwise_decomposable(
    space: LabelSpace, anchors, resolution: int | None = None, budget: int = DEFAULT_BUDGET
) -> tuple[bool, int | None]:
    """Compare the pairwise and general sweeps at equal resolution.

    Returns (True, None) when they agree, else (False, first vertex found by
    the general sweep but missed by the pairwise one).
    """
    res = default_resolution(space) if resolution is None else int(resolution)
    pairwise = locus_pairwise(space, anchors, res)
    general = locus_general(space, anchors, res, budget=budget)
    extra = sorted(general.member_set - pairwise.member_set)
    if extra:
        return False, extra[0]
    return True, None


def _certificate(anchor_ids, weights, singleton: bool) -> dict:
    return {
        "anchors": [int(a) for a in anchor_ids],
        "weights": [float(w) for w in weights],
        "singleton": bool(singleton),
    }


def min_cover_tree(space: LabelSpace) -> CoverReport:
    """Leaves of a tree, with the constructive path weights as certificates.

    For an internal vertex v on the path between leaves l1, l2, the weights
    (d(v,l2), d(v,l1)) / d(l1,l2) make v the unique Frechet mean, so the
    cover is also identifying.
    """
    if space.kind != "tree":
        raise ValidationError(f"min_cover_tree needs a tree space, got kind {space.kind!r}")
    leaves = space.graph.leaves()
    certificates: dict[int, dict] = {}
    all_single = True
    for v in range(space.n_vertices):
        if v in leaves:
            pred = frechet_mean(space, [v], [1.0])
            certificates[v] = _certificate([v], [1.0], pred.members == (v,))
        else:
            pair = _leaf_pair_through(space, v, leaves)
            l1, l2 = pair
            total = space.dist[l1, l2]
            w = (space.dist[v, l2] / total, space.dist[v, l1] / total)
            pred = frechet_mean(space, pair, w)
            certificates[v] = _certificate(pair, w, pred.members == (v,))
        all_single &= certificates[v]["singleton"]
    return CoverReport(
        cover=leaves,
        is_locus_cover=True,
        is_identifying=all_single,
        certificates=certificates,
    )


def _leaf_pair_through(space: LabelSpace, v: int, leaves) -> tuple[int, int]:
    """First leaf pair (by sorted order) whose unique path passes through v."""
    for i, l1 in enumerate(leaves):
        for l2 in leaves[i + 1:]:
            total = space.dist[l1, l2]
            if abs(space.dist[l1, v] + space.dist[v, l2] - total) <= 1e-9 * max(1.0, total):
                return l1, l2
    raise ValidationError(f"vertex {v} lies on no leaf-to-leaf path")


def min_cover_grid(space: LabelSpace) -> CoverReport:
    """The two furthest opposite corners of a grid.

    Certificates witness membership only: every vertex of a grid lies on a
    shortest corner-to-corner path, so the witness mean is the whole
    anti-diagonal through the vertex and the cover is not identifying in
    general.
    """
    if space.kind != "grid":
        raise ValidationError(f"min_cover_grid needs a grid space, got kind {space.kind!r}")
    n = space.n_vertices
    if n == 1:
        return CoverReport(
            cover=(0,),
            is_locus_cover=True,
            is_identifying=True,
            certificates={0: _certificate([0], [1.0], True)},
        )
    c1, c2 = 0, n - 1
    total = space.dist[c1, c2]
    certificates: dict[int, dict] = {}
    covered = True
    for v in range(n):
        w = (space.dist[v, c2] / total, space.dist[v, c1] / total)
        pred = frechet_mean(space, (c1, c2), w)
        ok = v in pred.members
        covered &= ok
        certificates[v] = _certificate((c1, c2), w, pred.members == (v,))
    return CoverReport(
        cover=(c1, c2),
        is_locus_cover=covered,
        is_identifying=False,
        certificates=certificates,
    )


def _grid_corners(m: int, n: int) -> tuple[int, ...]:
    return tuple(sorted({0, n - 1, (m - 1) * n, m * n - 1}))


def identifying_cover_grid(
    space: LabelSpace, resolution: int | None = None, budget: int = DEFAULT_BUDGET
) -> CoverReport:
    """The grid corners, verified identifying by a weight-grid search.

    Searches the discretized simplex over the corners (default resolution
    4 * diam, where the constructive singleton weights fall exactly on grid
    points) for a weight vector whose mean is the singleton {v}, for every v.
    """
    if space.kind != "grid":
        raise ValidationError(f"identifying_cover_grid needs a grid space, got kind {space.kind!r}")
    m, n = space.graph.grid_shape
    corners = _grid_corners(m, n)
    if space.n_vertices == 1:
        return CoverReport(
            cover=(0,),
            is_locus_cover=True,
            is_identifying=True,
            certificates={0: _certificate([0], [1.0], True)},
        )
    res = 4 * default_resolution(space) if resolution is None else int(resolution)
    if res < 1:
        raise ValidationError(f"resolution must be >= 1, got {resolution}")
    k = len(corners)
    required = (res + 1) ** k
    if required > budget:
        raise BudgetExceededError(required, budget)
    pos = space.label_positions(corners)
    dsq = space.label_dsq[:, pos]
    certificates: dict[int, dict] = {}
    n_labels = len(space.labels)
    for weights in _weight_grid_chunks(res, k):
        variances = dsq @ weights.T
        mask = _tie_mask(variances)
        singleton_cols = np.flatnonzero(mask.sum(axis=0) == 1)
        if singleton_cols.size:
            rows = mask[:, singleton_cols].argmax(axis=0)
            for r, c in zip(rows.tolist(), singleton_cols.tolist()):
                label = int(space.labels[r])
                if label not in certificates:
                    certificates[label] = _certificate(corners, weights[c], True)
        if len(certificates) == n_labels:
            break
    missing = tuple(v for v in map(int, space.labels) if v not in certificates)
    return CoverReport(
        cover=corners,
        is_locus_cover=not missing,
        is_identifying=not missing,
        certificates=certificates,
        missing=missing,
    )


def phylo_cover(space: LabelSpace, resolution: int | None = None) -> CoverReport:
    """Greedy locus cover for a phylogenetic tree.

    Leaf pairs are visited by path length, longest first (ties by ascending
    endpoint ids); both endpoints of the current pair join the cover until
    the pairwise locus reaches every leaf.  Worst case the cover is all
    leaves, which is always a (trivial) cover.
    """
    if space.kind != "phylogenetic_tree":
        raise ValidationError(f"phylo_cover needs a phylogenetic tree, got kind {space.kind!r}")
    leaves = [int(v) for v in space.labels]
    res = default_resolution(space) if resolution is None else int(resolution)
    if len(leaves) == 1:
        return CoverReport(
            cover=(leaves[0],),
            is_locus_cover=True,
            is_identifying=None,
            certificates={leaves[0]: _certificate([leaves[0]], [1.0], True)},
        )
    pairs = sorted(
        ((l1, l2) for i, l1 in enumerate(leaves) for l2 in leaves[i + 1:]),
        key=lambda pr: (-space.dist[pr[0], pr[1]], pr[0], pr[1]),
    )
    cover: list[int] = []
    certificates: dict[int, dict] = {}
    target = set(leaves)

    def absorb(new: list[int]) -> None:
        # sweep only pairs that involve a newly added anchor
        old = list(cover)
        for a in new:
            certificates.setdefault(a, _certificate([a], [1.0], True))
            cover.append(a)
        fresh_pairs = [(a, b) for a in new for b in old] + [
            (new[s], new[t]) for s in range(len(new)) for t in range(s + 1, len(new))
        ]
        for a, b in fresh_pairs:
            pa, pb = space.label_positions([a, b])
            for label, wa, wb in _pair_sweep(space, pa, pb, res):
                certificates.setdefault(label, _certificate([a, b], [wa, wb], False))

    for l1, l2 in pairs:
        if set(certificates) >= target:
            break
        absorb([v for v in (l1, l2) if v not in cover])
    return CoverReport(
        cover=tuple(sorted(cover)),
        is_locus_cover=set(certificates) >= target,
        is_identifying=None,
        certificates=certificates,
    )


def is_locus_cover(
    space: LabelSpace, anchors, resolution: int | None = None, budget: int = DEFAULT_BUDGET
) -> bool:
    """Whether the locus of the anchors reaches every label.

    Uses the pairwise sweep on pairwise-decomposable kinds and the general
    sweep otherwise.  An anchor set equal to Y is a cover without computation
    (the trivial cover).
    """
    ids, _ = check_anchors(space, anchors)
    target = set(int(v) for v in space.labels)
    if set(ids) >= target:
        return True
    if space.kind in PAIRWISE_KINDS:
        loc = locus_pairwise(space, ids, resolution)
    else:
        loc = locus_general(space, ids, resolution, budget=budget)
    return loc.member_set >= target
