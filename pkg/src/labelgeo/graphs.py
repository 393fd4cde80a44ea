"""Label metric spaces modeled as graphs.

A label space is an undirected, connected, positively weighted graph together
with a designated label set Y (all vertices, unless the graph is a
phylogenetic tree, where Y is exactly the leaves).  Distances are shortest
paths; the diameter is the largest entry of the all-pairs matrix.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import csgraph_from_dense, shortest_path
from scipy.spatial.distance import pdist, squareform

from .errors import ValidationError

KINDS = ("generic", "tree", "phylogenetic_tree", "grid", "complete", "embedding_metric")

_NO_PREDECESSOR = -9999  # scipy.sparse.csgraph sentinel


@dataclass(frozen=True)
class LabelGraph:
    """An undirected graph over dense 0-based vertex ids with a label set.

    ``edges`` are normalized (u < v, sorted, no duplicates); ``labels`` is the
    sorted label set Y.  ``kind`` is one of ``KINDS`` and carries structural
    guarantees checked at construction time.
    """

    n_vertices: int
    edges: tuple[tuple[int, int, float], ...]
    labels: tuple[int, ...]
    kind: str
    grid_shape: tuple[int, int] | None = None

    def __post_init__(self):
        _validate_graph(self)

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency_lists(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return [sorted(nbrs) for nbrs in adj]

    def leaves(self) -> tuple[int, ...]:
        """Vertices of degree 1 (the single vertex, for a one-vertex graph)."""
        if self.n_vertices == 1:
            return (0,)
        deg = self.degrees()
        return tuple(int(v) for v in np.flatnonzero(deg == 1))


@dataclass(frozen=True)
class DistanceMatrix:
    """All-pairs shortest-path lengths and their maximum."""

    values: np.ndarray
    diameter: float

    def __post_init__(self):
        self.values.flags.writeable = False


@dataclass(frozen=True)
class PathOracle:
    """Predecessor table sufficient to rebuild one shortest path per pair."""

    predecessors: np.ndarray

    def __post_init__(self):
        self.predecessors.flags.writeable = False

    def path(self, u: int, v: int) -> list[int]:
        """One shortest path from u to v, inclusive of both endpoints."""
        if u == v:
            return [u]
        pred = self.predecessors
        out = [v]
        node = v
        while node != u:
            node = int(pred[u, node])
            if node == _NO_PREDECESSOR:
                raise ValidationError(f"no path from {u} to {v}")
            out.append(node)
        out.reverse()
        return out


def _normalize_edges(raw_edges) -> tuple[tuple[int, int, float], ...]:
    return tuple(sorted((min(u, v), max(u, v), float(w)) for u, v, w in raw_edges))


def _connected(n: int, edges) -> bool:
    if n == 1:
        return True
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v, _ in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if not seen[y]:
                seen[y] = True
                stack.append(y)
    return bool(seen.all())


def _validate_graph(g: LabelGraph) -> None:
    if g.kind not in KINDS:
        raise ValidationError(f"unknown graph kind {g.kind!r}")
    if g.n_vertices < 1:
        raise ValidationError("graph needs at least one vertex")
    seen_pairs = set()
    for u, v, w in g.edges:
        if not (0 <= u < g.n_vertices and 0 <= v < g.n_vertices):
            raise ValidationError(f"edge ({u},{v}) references a missing vertex")
        if u == v:
            raise ValidationError(f"self-loop at vertex {u}")
        if (u, v) in seen_pairs:
            raise ValidationError(f"duplicate edge ({u},{v})")
        seen_pairs.add((u, v))
        if w < 0 or (w == 0 and g.kind != "embedding_metric"):
            raise ValidationError(f"edge ({u},{v}) has non-positive weight {w}")
    if not g.labels:
        raise ValidationError("label set is empty")
    if list(g.labels) != sorted(set(g.labels)):
        raise ValidationError("labels must be sorted and distinct")
    if g.labels[0] < 0 or g.labels[-1] >= g.n_vertices:
        raise ValidationError("label outside vertex range")
    if not _connected(g.n_vertices, g.edges):
        raise ValidationError("disconnected graph")
    n, m = g.n_vertices, len(g.edges)
    if g.kind in ("tree", "phylogenetic_tree") and m != n - 1:
        raise ValidationError(f"kind {g.kind}: expected {n - 1} edges, found {m}")
    if g.kind == "phylogenetic_tree" and set(g.labels) != set(g.leaves()):
        raise ValidationError("phylogenetic tree labels must be exactly the leaves")
    if g.kind == "complete" and m != n * (n - 1) // 2:
        raise ValidationError(f"kind complete: expected {n * (n - 1) // 2} edges, found {m}")
    if g.kind == "grid":
        if g.grid_shape is None or g.grid_shape[0] * g.grid_shape[1] != n:
            raise ValidationError("kind grid requires a matching grid_shape")
    if g.kind == "embedding_metric" and m != n * (n - 1) // 2:
        raise ValidationError("embedding metric must be a complete weighted graph")


def _infer_kind(n: int, edges, labels, header_labels) -> str:
    m = len(edges)
    if m == n - 1:  # connected was already checked, so acyclic
        deg = np.zeros(n, dtype=np.int64)
        for u, v, _ in edges:
            deg[u] += 1
            deg[v] += 1
        leaves = set(int(x) for x in np.flatnonzero(deg == 1)) if n > 1 else {0}
        if header_labels is not None and set(labels) == leaves:
            return "phylogenetic_tree"
        return "tree"
    if m == n * (n - 1) // 2:
        return "complete"
    return "generic"


def load_edge_list(text: str) -> LabelGraph:
    """Parse an edge-list file: rows ``u<TAB>v[<TAB>w]``, any whitespace accepted.

    An optional header line ``#labels: i,j,...`` restricts the label set Y.
    Other ``#`` lines are comments.  Kind is inferred: acyclic graphs are
    trees (phylogenetic when the labels header lists exactly the leaves) and
    a full pair set is a complete graph.
    """
    edges: list[tuple[int, int, float]] = []
    header_labels: list[int] | None = None
    pair_lines: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.lower().startswith("labels:"):
                if header_labels is not None:
                    raise ValidationError(f"line {lineno}: duplicate labels header")
                try:
                    header_labels = [int(tok) for tok in body[len("labels:"):].split(",") if tok.strip()]
                except ValueError:
                    raise ValidationError(f"line {lineno}: malformed labels header") from None
                if not header_labels:
                    raise ValidationError(f"line {lineno}: empty labels header")
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise ValidationError(f"line {lineno}: expected 'u v [w]', found {len(fields)} fields")
        try:
            u, v = int(fields[0]), int(fields[1])
            w = float(fields[2]) if len(fields) == 3 else 1.0
        except ValueError:
            raise ValidationError(f"line {lineno}: parse failure in {line!r}") from None
        if u < 0 or v < 0:
            raise ValidationError(f"line {lineno}: negative vertex id")
        if u == v:
            raise ValidationError(f"line {lineno}: self-loop at vertex {u}")
        if not math.isfinite(w) or w <= 0:
            raise ValidationError(f"line {lineno}: edge weight must be a positive finite number")
        key = (min(u, v), max(u, v))
        if key in pair_lines:
            raise ValidationError(f"line {lineno}: duplicate edge ({u},{v}), first seen at line {pair_lines[key]}")
        pair_lines[key] = lineno
        edges.append((u, v, w))
    if not edges:
        raise ValidationError("no edges found")
    n = 1 + max(max(u, v) for u, v, _ in edges)
    labels = tuple(sorted(header_labels)) if header_labels is not None else tuple(range(n))
    if header_labels is not None and len(set(header_labels)) != len(header_labels):
        raise ValidationError("labels header contains duplicates")
    norm = _normalize_edges(edges)
    if not _connected(n, norm):
        raise ValidationError("disconnected graph")
    kind = _infer_kind(n, norm, labels, header_labels)
    return LabelGraph(n_vertices=n, edges=norm, labels=labels, kind=kind)


def save_edge_list(graph: LabelGraph) -> str:
    """Serialize a graph in the format accepted by :func:`load_edge_list`."""
    lines = []
    if graph.labels != tuple(range(graph.n_vertices)):
        lines.append("#labels: " + ",".join(str(v) for v in graph.labels))
    for u, v, w in graph.edges:
        if w == 1.0:
            lines.append(f"{u}\t{v}")
        else:
            lines.append(f"{u}\t{v}\t{w!r}")
    return "\n".join(lines) + "\n"


def load_names(text: str) -> list[str]:
    """Sidecar names file: line i names vertex i."""
    names = [line.rstrip("\n") for line in text.splitlines()]
    if not names:
        raise ValidationError("names file is empty")
    return names


def load_embeddings_csv(text: str) -> np.ndarray:
    """Embeddings file: CSV, one row of floats per class."""
    rows = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            row = [float(tok) for tok in line.split(",")]
        except ValueError:
            raise ValidationError(f"line {lineno}: non-numeric embedding entry") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValidationError(f"line {lineno}: dimension mismatch ({len(row)} != {width})")
        rows.append(row)
    if len(rows) < 2:
        raise ValidationError("need at least two embedding rows")
    return np.asarray(rows, dtype=np.float64)


def all_pairs_distances(graph: LabelGraph) -> tuple[DistanceMatrix, PathOracle]:
    """Exact all-pairs shortest paths: BFS per source when unweighted, Dijkstra otherwise."""
    n = graph.n_vertices
    if n == 1:
        dist = np.zeros((1, 1))
        pred = np.full((1, 1), _NO_PREDECESSOR, dtype=np.int32)
        return DistanceMatrix(dist, 0.0), PathOracle(pred)
    weights = np.array([w for _, _, w in graph.edges])
    rows = np.array([u for u, _, _ in graph.edges])
    cols = np.array([v for _, v, _ in graph.edges])
    if np.any(weights == 0.0):
        # explicit zero-weight edges (duplicate embeddings) need a non-zero null marker
        dense = np.full((n, n), np.inf)
        dense[rows, cols] = weights
        dense[cols, rows] = weights
        csgraph = csgraph_from_dense(dense, null_value=np.inf)
    else:
        csgraph = csr_matrix((weights, (rows, cols)), shape=(n, n))
    unweighted = bool(np.all(weights == 1.0))
    dist, pred = shortest_path(
        csgraph, method="auto", directed=False, unweighted=unweighted, return_predecessors=True
    )
    dist = np.asarray(dist, dtype=np.float64)
    return DistanceMatrix(dist, float(dist.max())), PathOracle(np.asarray(pred))


class LabelSpace:
    """A :class:`LabelGraph` bundled with its distance matrix and path oracle.

    Immutable after construction; all arrays are read-only and safe to share
    across threads.
    """

    def __init__(self, graph: LabelGraph, distance: DistanceMatrix, oracle: PathOracle):
        self.graph = graph
        self.distance = distance
        self.oracle = oracle
        self.labels = np.asarray(graph.labels, dtype=np.int64)
        self.labels.flags.writeable = False
        self._label_pos = {int(v): i for i, v in enumerate(self.labels)}
        self.label_dist = np.ascontiguousarray(distance.values[np.ix_(self.labels, self.labels)])
        self.label_dist.flags.writeable = False
        self.label_dsq = np.square(self.label_dist)
        self.label_dsq.flags.writeable = False
        self._adjacency = graph.adjacency_lists()

    @classmethod
    def from_graph(cls, graph: LabelGraph) -> "LabelSpace":
        distance, oracle = all_pairs_distances(graph)
        return cls(graph, distance, oracle)

    @property
    def n_vertices(self) -> int:
        return self.graph.n_vertices

    @property
    def kind(self) -> str:
        return self.graph.kind

    @property
    def diameter(self) -> float:
        return self.distance.diameter

    @property
    def dist(self) -> np.ndarray:
        return self.distance.values

    def is_integer_metric(self) -> bool:
        d = self.distance.values
        return bool(np.allclose(d, np.round(d), rtol=0.0, atol=1e-9))

    def label_positions(self, vertices) -> np.ndarray:
        """Row positions (in sorted Y) of the given label vertices."""
        out = np.empty(len(vertices), dtype=np.int64)
        for i, v in enumerate(vertices):
            try:
                out[i] = self._label_pos[int(v)]
            except KeyError:
                raise ValidationError(f"vertex {v} is not in the label set Y") from None
        return out

    def neighbors(self, v: int) -> list[int]:
        return self._adjacency[v]

    def path(self, u: int, v: int) -> list[int]:
        return self.oracle.path(u, v)


def detect_grid_shape(graph: LabelGraph) -> tuple[int, int] | None:
    """Row-major (m, n) lattice shape of an unweighted graph, or None.

    Vertex ids must already be row-major; a path with scrambled ids is not a
    1 x n grid.
    """
    if any(w != 1.0 for _, _, w in graph.edges):
        return None
    n_v = graph.n_vertices
    pairs = {(u, v) for u, v, _ in graph.edges}
    for m in range(1, n_v + 1):
        if n_v % m:
            continue
        cols = n_v // m
        expected = set()
        for i in range(m):
            for j in range(cols):
                v = i * cols + j
                if j + 1 < cols:
                    expected.add((v, v + 1))
                if i + 1 < m:
                    expected.add((v, v + cols))
        if expected == pairs:
            return (m, cols)
    return None


def make_grid(m: int, n: int) -> LabelGraph:
    """Unweighted 4-neighbor rectangular lattice with row-major vertex ids."""
    if m < 1 or n < 1:
        raise ValidationError(f"grid needs m, n >= 1, got ({m},{n})")
    edges = []
    for i in range(m):
        for j in range(n):
            v = i * n + j
            if j + 1 < n:
                edges.append((v, v + 1, 1.0))
            if i + 1 < m:
                edges.append((v, v + n, 1.0))
    n_v = m * n
    if n_v == 1:
        return LabelGraph(1, (), (0,), "grid", grid_shape=(1, 1))
    return LabelGraph(n_v, _normalize_edges(edges), tuple(range(n_v)), "grid", grid_shape=(m, n))


def make_complete(n: int) -> LabelGraph:
    """Unweighted complete graph: every label equidistant from every other."""
    if n < 1:
        raise ValidationError(f"complete graph needs n >= 1, got {n}")
    edges = [(u, v, 1.0) for u in range(n) for v in range(u + 1, n)]
    return LabelGraph(n, tuple(edges), tuple(range(n)), "complete")


def metric_from_embeddings(vectors) -> tuple[LabelGraph, DistanceMatrix]:
    """Complete weighted graph whose edge weights are Euclidean embedding distances.

    The complete graph with metric weights is its own shortest-path closure,
    so the distance matrix is the pairwise Euclidean matrix itself.  Duplicate
    embeddings produce zero distances between distinct labels; this is
    reported as a warning and kept.
    """
    try:
        arr = np.asarray(vectors, dtype=np.float64)
    except ValueError:
        arr = None
    if arr is None or arr.ndim != 2:
        lengths = sorted({len(v) for v in vectors})
        raise ValidationError(f"embedding dimension mismatch: row lengths {lengths}")
    n = arr.shape[0]
    if n < 2:
        raise ValidationError("need at least two embedding vectors")
    dmat = squareform(pdist(arr, metric="euclidean"))
    if np.any(dmat[np.triu_indices(n, k=1)] == 0.0):
        warnings.warn("duplicate embeddings give zero distance between distinct labels", stacklevel=2)
    edges = tuple((u, v, float(dmat[u, v])) for u in range(n) for v in range(u + 1, n))
    graph = LabelGraph(n, edges, tuple(range(n)), "embedding_metric")
    return graph, DistanceMatrix(dmat, float(dmat.max()))


def space_from_embeddings(vectors) -> LabelSpace:
    """Build a ready-to-use :class:`LabelSpace` from embedding vectors."""
    graph, distance = metric_from_embeddings(vectors)
    n = graph.n_vertices
    pred = np.tile(np.arange(n, dtype=np.int32)[:, None], (1, n))
    np.fill_diagonal(pred, _NO_PREDECESSOR)
    return LabelSpace(graph, distance, PathOracle(pred))


def _graph_from_nx(g: "nx.Graph", kind: str) -> LabelGraph:
    n = g.number_of_nodes()
    edges = _normalize_edges((u, v, 1.0) for u, v in g.edges())
    if kind == "phylogenetic_tree":
        deg = np.zeros(n, dtype=np.int64)
        for u, v, _ in edges:
            deg[u] += 1
            deg[v] += 1
        labels = tuple(int(x) for x in np.flatnonzero(deg == 1))
    else:
        labels = tuple(range(n))
    return LabelGraph(n, edges, labels, kind)


def _derived_seed(seed: int, attempt: int) -> int:
    return (seed * 1_000_003 + attempt) % 2**32


def generate_random(
    kind: str,
    n: int,
    seed: int,
    *,
    k: int | None = None,
    p: float | None = None,
    m: int | None = None,
    max_retries: int = 100,
) -> LabelGraph:
    """Seeded random graph families; disconnected draws are rejected and resampled.

    ``kind`` is one of ``tree``, ``phylo_tree`` (n = number of leaves),
    ``watts_strogatz`` (needs k, p), ``erdos_renyi`` (needs p), or
    ``barabasi_albert`` (needs m).
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    if kind == "tree":
        g = nx.random_labeled_tree(n, seed=_derived_seed(seed, 0))
        return _graph_from_nx(g, "tree")
    if kind == "phylo_tree":
        return _random_phylogenetic_tree(n, seed)
    if kind == "watts_strogatz":
        if k is None or p is None:
            raise ValidationError("watts_strogatz needs k and p")
        maker = lambda s: nx.watts_strogatz_graph(n, k, p, seed=s)
    elif kind == "erdos_renyi":
        if p is None:
            raise ValidationError("erdos_renyi needs p")
        maker = lambda s: nx.gnp_random_graph(n, p, seed=s)
    elif kind == "barabasi_albert":
        if m is None:
            raise ValidationError("barabasi_albert needs m")
        if not 1 <= m < n:
            raise ValidationError("barabasi_albert needs 1 <= m < n")
        maker = lambda s: nx.barabasi_albert_graph(n, m, seed=s)
    else:
        raise ValidationError(f"unknown random family {kind!r}")
    for attempt in range(max_retries):
        g = maker(_derived_seed(seed, attempt))
        if g.number_of_nodes() == n and (n == 1 or nx.is_connected(g)):
            return _graph_from_nx(g, "generic")
    raise ValidationError(f"no connected {kind} graph within {max_retries} attempts")


def _random_phylogenetic_tree(n_leaves: int, seed: int) -> LabelGraph:
    """Random binary phylogenetic tree with exactly ``n_leaves`` leaves.

    Grown by repeatedly subdividing a uniformly random edge and hanging a new
    leaf off the subdivision vertex; every internal vertex ends with degree 3.
    """
    if n_leaves < 2:
        raise ValidationError("phylo_tree needs n >= 2 leaves")
    rng = np.random.default_rng(seed)
    edges = [(0, 1)]
    next_id = 2
    for _ in range(n_leaves - 2):
        u, v = edges.pop(int(rng.integers(len(edges))))
        mid, leaf = next_id, next_id + 1
        next_id += 2
        edges.extend([(u, mid), (mid, v), (mid, leaf)])
    norm = _normalize_edges((u, v, 1.0) for u, v in edges)
    n = next_id
    deg = np.zeros(n, dtype=np.int64)
    for u, v, _ in norm:
        deg[u] += 1
        deg[v] += 1
    labels = tuple(int(x) for x in np.flatnonzero(deg == 1))
    return LabelGraph(n, norm, labels, "phylogenetic_tree")


def summarize_graph(
    graph: LabelGraph, target_supernodes: int, seed: int
) -> tuple[LabelGraph, np.ndarray]:
    """Coarsen a graph by repeatedly absorbing a random supernode's neighbors.

    Each step picks a supernode uniformly at random and merges its whole
    1-hop neighborhood into it, until at most ``target_supernodes`` remain.
    Supernode edges are deduplicated with weight 1.  Returns the quotient
    graph and the total, surjective vertex -> supernode mapping.
    """
    if target_supernodes < 1:
        raise ValidationError("target_supernodes must be >= 1")
    n = graph.n_vertices
    rng = np.random.default_rng(seed)
    rep = list(range(n))  # vertex -> current supernode representative
    adj: dict[int, set[int]] = {v: set() for v in range(n)}
    for u, v, _ in graph.edges:
        adj[u].add(v)
        adj[v].add(u)
    alive = sorted(adj)
    while len(alive) > target_supernodes:
        v = alive[int(rng.integers(len(alive)))]
        absorbed = sorted(adj[v])
        if not absorbed:
            break
        for u in absorbed:
            for w in adj[u]:
                if w != v:
                    adj[w].discard(u)
                    adj[w].add(v)
                    adj[v].add(w)
            adj[v].discard(u)
            del adj[u]
        merged = set(absorbed)
        for x in range(n):
            if rep[x] in merged:
                rep[x] = v
        alive = sorted(adj)
    order = {r: i for i, r in enumerate(alive)}
    mapping = np.array([order[rep[x]] for x in range(n)], dtype=np.int64)
    quotient_edges = set()
    for u, v, _ in graph.edges:
        a, b = mapping[u], mapping[v]
        if a != b:
            quotient_edges.add((min(a, b), max(a, b), 1.0))
    n_super = len(alive)
    if n_super == 1:
        quotient = LabelGraph(1, (), (0,), "generic")
    else:
        norm = _normalize_edges(quotient_edges)
        kind = _infer_kind(n_super, norm, tuple(range(n_super)), None)
        quotient = LabelGraph(n_super, norm, tuple(range(n_super)), kind)
    return quotient, mapping
