"""Independent brute-force oracles; deliberately naive and scipy-free.

These recompute expected values from first principles (BFS, exhaustive
enumeration, hand loops) so the tested code paths never check themselves.
"""

from collections import deque

import numpy as np


def bfs_distances(n, edges):
    """All-pairs hop distances via one BFS per source (unweighted oracle)."""
    adj = [[] for _ in range(n)]
    for u, v, *_ in edges:
        adj[u].append(v)
        adj[v].append(u)
    dist = np.full((n, n), np.inf)
    for s in range(n):
        dist[s, s] = 0
        q = deque([s])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if dist[s, y] == np.inf:
                    dist[s, y] = dist[s, x] + 1
                    q.append(y)
    return dist


def floyd_warshall(n, edges):
    """All-pairs weighted distances, O(n^3) (weighted oracle)."""
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for u, v, w in edges:
        dist[u, v] = min(dist[u, v], w)
        dist[v, u] = min(dist[v, u], w)
    for k in range(n):
        dist = np.minimum(dist, dist[:, k][:, None] + dist[k, :][None, :])
    return dist


def is_connected(n, edges):
    if n == 1:
        return True
    adj = [[] for _ in range(n)]
    for u, v, *_ in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    q = deque([0])
    while q:
        x = q.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                q.append(y)
    return len(seen) == n


def triangle_inequality_holds(dist, atol=1e-9):
    n = dist.shape[0]
    for k in range(n):
        if np.any(dist > dist[:, k][:, None] + dist[k, :][None, :] + atol):
            return False
    return True


def degree_leaves(n, edges):
    """Degree-count leaf oracle."""
    deg = [0] * n
    for u, v, *_ in edges:
        deg[u] += 1
        deg[v] += 1
    return sorted(v for v in range(n) if deg[v] == 1)


def brute_frechet_mean(dist, labels, anchors, weights, rel=1e-9, abs_=1e-12):
    """Exhaustive weighted argmin over the label set, plain Python loops."""
    variances = {}
    for y in labels:
        variances[y] = sum(w * dist[y, a] ** 2 for a, w in zip(anchors, weights))
    vmin = min(variances.values())
    thr = max(rel * abs(vmin), abs_)
    return {y for y, v in variances.items() if v <= vmin + thr}


def brute_locus(dist, labels, anchors, resolution):
    """Exhaustive general locus over the full weight grid, plain Python."""
    k = len(anchors)
    members = set()
    grid = range(resolution + 1)

    def rec(prefix):
        if len(prefix) == k:
            if any(prefix):
                w = [t / resolution for t in prefix]
                members.update(brute_frechet_mean(dist, labels, anchors, w))
            return
        for t in grid:
            rec(prefix + (t,))

    rec(())
    return members


def bfs_path(n, edges, u, v):
    """One shortest path by BFS parents (unweighted oracle)."""
    adj = [[] for _ in range(n)]
    for a, b, *_ in edges:
        adj[a].append(b)
        adj[b].append(a)
    parent = {u: None}
    q = deque([u])
    while q:
        x = q.popleft()
        if x == v:
            break
        for y in sorted(adj[x]):
            if y not in parent:
                parent[y] = x
                q.append(y)
    path = [v]
    while path[-1] != u:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def tree_path_union(n, edges, anchors):
    """Union of pairwise anchor paths (tree locus oracle)."""
    members = set(anchors)
    anchors = list(anchors)
    for i, a in enumerate(anchors):
        for b in anchors[i + 1:]:
            members.update(bfs_path(n, edges, a, b))
    return members
