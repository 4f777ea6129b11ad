"""Simplicial complexes, graphs, and hypergraphs with their incidence maps.

A global vertex order fixes every face ordering, so boundary signs come
purely from position parity and outputs are reproducible. Graph edges are
unordered pairs; orientation is a per-edge sign that flips the default
boundary column (-1 at the smaller endpoint, +1 at the larger).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np


@dataclass(frozen=True)
class SimplicialComplex:
    labels: tuple[str, ...]
    faces_by_dim: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.faces_by_dim) - 1

    def face_count(self, i: int) -> int:
        return len(self.faces_by_dim[i])

    def to_dict(self) -> dict:
        facets = [list(self.labels[v] for v in f) for f in facets_of(self)]
        return {"facets": facets}


def facets_of(k: SimplicialComplex) -> list[tuple[int, ...]]:
    """Faces maximal under inclusion."""
    all_faces = [set(f) for faces in k.faces_by_dim for f in faces]
    out = []
    for faces in reversed(k.faces_by_dim):
        for f in faces:
            fs = set(f)
            if not any(fs < g for g in all_faces):
                out.append(f)
    return sorted(out, key=lambda f: (len(f), f))


def build_complex(facets) -> SimplicialComplex:
    """Downward closure of the given facets.

    The ground set is ordered by first appearance across facets, with labels
    inside a facet visited in sorted order.
    """
    facet_list = [tuple(f) for f in facets]
    if not facet_list:
        raise ValueError("at least one facet is required")
    labels: list = []
    seen = {}
    for f in facet_list:
        if len(f) == 0:
            raise ValueError("facets must be nonempty")
        if len(set(f)) != len(f):
            raise ValueError(f"facet {f!r} repeats a vertex")
        try:
            ordered = sorted(f)
        except TypeError:
            ordered = sorted(f, key=str)
        for lab in ordered:
            if lab not in seen:
                seen[lab] = len(labels)
                labels.append(lab)
    by_dim: list[set] = []
    for f in facet_list:
        idx = tuple(sorted(seen[lab] for lab in f))
        dim = len(idx) - 1
        while len(by_dim) <= dim:
            by_dim.append(set())
        for size in range(1, len(idx) + 1):
            for sub in combinations(idx, size):
                by_dim[size - 1].add(sub)
    return SimplicialComplex(
        labels=tuple(labels),
        faces_by_dim=tuple(tuple(sorted(s)) for s in by_dim),
    )


def boundary_matrix(k: SimplicialComplex, i: int) -> np.ndarray:
    """Signed boundary map from i-faces to (i-1)-faces, integer entries.

    Column g has entry (-1)^j in the row of the face obtained by deleting
    position j of g. For i = 0 the target space is trivial and the result
    is a 0 x |S_0| matrix.
    """
    if i < 0 or i > k.dimension:
        raise ValueError(f"dimension {i} out of range 0..{k.dimension}")
    if i == 0:
        return np.zeros((0, k.face_count(0)), dtype=np.int64)
    rows = {f: r for r, f in enumerate(k.faces_by_dim[i - 1])}
    b = np.zeros((k.face_count(i - 1), k.face_count(i)), dtype=np.int64)
    for c, g in enumerate(k.faces_by_dim[i]):
        for j in range(len(g)):
            f = g[:j] + g[j + 1 :]
            b[rows[f], c] = -1 if j % 2 else 1
    return b


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with per-edge orientation signs."""

    labels: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    orientation: tuple[int, ...] = field(default=())

    def __post_init__(self):
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValueError("vertex labels must be distinct")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"loop at vertex index {u}")
            if not (0 <= u < v < n):
                raise ValueError(f"edge ({u}, {v}) is not a normalized index pair")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("duplicate edges")
        if list(self.edges) != sorted(self.edges):
            raise ValueError("edges must be sorted")
        if not self.orientation:
            object.__setattr__(self, "orientation", (1,) * len(self.edges))
        if len(self.orientation) != len(self.edges):
            raise ValueError("orientation length must match edge count")
        if any(s not in (-1, 1) for s in self.orientation):
            raise ValueError("orientation entries must be +1 or -1")

    @classmethod
    def from_edge_labels(cls, labels, edge_pairs, orientation=None) -> "Graph":
        labels = tuple(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        pairs = []
        for u, v in edge_pairs:
            iu, iv = index[u], index[v]
            pairs.append((min(iu, iv), max(iu, iv)))
        if orientation is None:
            orientation = (1,) * len(pairs)
        order = sorted(range(len(pairs)), key=lambda e: pairs[e])
        return cls(
            labels=labels,
            edges=tuple(pairs[e] for e in order),
            orientation=tuple(int(orientation[e]) for e in order),
        )

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def m(self) -> int:
        return len(self.edges)

    def with_orientation(self, orientation) -> "Graph":
        return Graph(self.labels, self.edges, tuple(int(s) for s in orientation))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        return a

    def neighbors(self, v: int) -> tuple[int, ...]:
        out = [b if a == v else a for a, b in self.edges if v in (a, b)]
        return tuple(sorted(out))

    def components(self) -> list[tuple[int, ...]]:
        parent = list(range(self.n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        groups: dict[int, list[int]] = {}
        for v in range(self.n):
            groups.setdefault(find(v), []).append(v)
        return sorted(tuple(sorted(g)) for g in groups.values())

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.labels),
            "edges": [[self.labels[u], self.labels[v]] for u, v in self.edges],
            "orientation": list(self.orientation),
        }


def graph_incidence(g: Graph) -> np.ndarray:
    """Signed vertex-edge incidence: column e = (u, v) holds -sigma_e at u,
    +sigma_e at v. Columns sum to zero."""
    b = np.zeros((g.n, g.m), dtype=np.int64)
    for e, (u, v) in enumerate(g.edges):
        b[u, e] = -g.orientation[e]
        b[v, e] = g.orientation[e]
    return b


def unsigned_incidence(g: Graph) -> np.ndarray:
    return np.abs(graph_incidence(g))


@dataclass(frozen=True)
class Hypergraph:
    labels: tuple[str, ...]
    hyperedges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.labels)
        for h in self.hyperedges:
            if len(h) == 0:
                raise ValueError("empty hyperedge")
            if list(h) != sorted(set(h)):
                raise ValueError(f"hyperedge {h!r} must be a sorted set of indices")
            if h[0] < 0 or h[-1] >= n:
                raise ValueError(f"hyperedge {h!r} has out-of-range vertices")
        if list(self.hyperedges) != sorted(self.hyperedges):
            raise ValueError("hyperedges must be sorted")

    @classmethod
    def from_edge_labels(cls, labels, hyperedges) -> "Hypergraph":
        labels = tuple(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        hs = sorted(tuple(sorted(index[lab] for lab in h)) for h in hyperedges)
        return cls(labels=labels, hyperedges=tuple(hs))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def m(self) -> int:
        return len(self.hyperedges)

    @property
    def rank(self) -> int:
        return max(len(h) for h in self.hyperedges)

    @property
    def max_degree(self) -> int:
        deg = np.zeros(self.n, dtype=np.int64)
        for h in self.hyperedges:
            deg[list(h)] += 1
        return int(deg.max())

    def incidence(self) -> np.ndarray:
        h = np.zeros((self.n, self.m), dtype=np.int64)
        for e, verts in enumerate(self.hyperedges):
            h[list(verts), e] = 1
        return h

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.labels),
            "hyperedges": [[self.labels[v] for v in h] for h in self.hyperedges],
        }


def clique_expansion(hg: Hypergraph, edge_weights=None) -> tuple[Graph, np.ndarray]:
    """Graph joining every pair co-contained in a hyperedge.

    The returned weights align with the expansion's sorted edge list; the
    weight of pair {u, v} is the sum of w_e over hyperedges containing both.
    A 2-uniform hypergraph maps to itself with unchanged weights.
    """
    if edge_weights is None:
        edge_weights = np.ones(hg.m)
    w = np.asarray(edge_weights, dtype=float)
    if w.shape != (hg.m,):
        raise ValueError("need one weight per hyperedge")
    if np.any(w <= 0):
        raise ValueError("hyperedge weights must be positive")
    pair_w: dict[tuple[int, int], float] = {}
    for e, verts in enumerate(hg.hyperedges):
        for u, v in combinations(verts, 2):
            pair_w[(u, v)] = pair_w.get((u, v), 0.0) + float(w[e])
    pairs = sorted(pair_w)
    graph = Graph(labels=hg.labels, edges=tuple(pairs))
    return graph, np.array([pair_w[p] for p in pairs])
