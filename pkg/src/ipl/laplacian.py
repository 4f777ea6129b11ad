"""Inner product Laplacians and their classical recoveries.

For a chain complex with boundary matrices B_i and one SPD inner product
M_i = Q_i^2 per face dimension, the dimension-i Laplacian is

    L_i = Q_i B_i^T M_{i-1}^{-1} B_i Q_i  +  Q_i^{-1} B_{i+1} M_{i+1} B_{i+1}^T Q_i^{-1},

with the absent term dropped at the extreme dimensions. The single-term
form Q_V^{-1} B M_E B^T Q_V^{-1} (the semi-Hodge Laplacian) also accepts
unsigned incidence matrices, which covers the signless variants and
hypergraphs. Diagonal inner product choices recover the combinatorial,
normalized, and signless Laplacians exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import Graph, Hypergraph, SimplicialComplex, boundary_matrix, clique_expansion, graph_incidence, unsigned_incidence
from .conformality import DEFAULT_SUBSET_CAP, weak_conformality_value
from .linalg import SpdMatrix, sym_eig
from .report import VerificationReport

# Eigenvalues at or below ZERO_RTOL * max(lambda_max, 1) count as kernel.
ZERO_RTOL = 1e-9


@dataclass
class SpectrumResult:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    harmonic_eigenvectors: np.ndarray
    zero_multiplicity: int

    def to_dict(self) -> dict:
        return {
            "matrix": [[float(v) for v in row] for row in self.matrix],
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "eigenvectors": [[float(v) for v in row] for row in self.eigenvectors],
            "harmonic_eigenvectors": [[float(v) for v in row] for row in self.harmonic_eigenvectors],
            "zero_multiplicity": self.zero_multiplicity,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumResult":
        return cls(
            matrix=np.asarray(d["matrix"], dtype=float),
            eigenvalues=np.asarray(d["eigenvalues"], dtype=float),
            eigenvectors=np.asarray(d["eigenvectors"], dtype=float),
            harmonic_eigenvectors=np.asarray(d["harmonic_eigenvectors"], dtype=float),
            zero_multiplicity=int(d["zero_multiplicity"]),
        )

    def to_rows(self):
        return ["index", "eigenvalue"], [[i, float(v)] for i, v in enumerate(self.eigenvalues)]


@dataclass
class Compatibility:
    omega: float
    perfect: bool
    per_vertex: list

    def to_dict(self) -> dict:
        return {"omega": self.omega, "perfect": self.perfect, "per_vertex": [float(v) for v in self.per_vertex]}

    @classmethod
    def from_dict(cls, d: dict) -> "Compatibility":
        return cls(omega=float(d["omega"]), perfect=bool(d["perfect"]), per_vertex=[float(v) for v in d["per_vertex"]])


class IplSetup:
    """A chain complex paired with one SPD inner product per dimension."""

    def __init__(self, boundaries, inner_products, target_dim: int):
        self.inner = list(inner_products)
        self.boundaries = list(boundaries)
        dim = len(self.inner) - 1
        if len(self.boundaries) != dim + 1:
            raise ValueError("expected one boundary matrix per dimension (index 0 is the zero map)")
        for i in range(1, dim + 1):
            b = self.boundaries[i]
            expected = (self.inner[i - 1].dim, self.inner[i].dim)
            if b.shape != expected:
                raise ValueError(f"boundary {i} has shape {b.shape}, inner products require {expected}")
        if not (0 <= target_dim <= dim):
            raise ValueError(f"target dimension {target_dim} out of range 0..{dim}")
        self.target_dim = target_dim

    @property
    def dim(self) -> int:
        return len(self.inner) - 1

    @classmethod
    def from_complex(cls, k: SimplicialComplex, inner_products, target_dim: int) -> "IplSetup":
        inner = list(inner_products)
        if len(inner) != k.dimension + 1:
            raise ValueError(f"complex has dimensions 0..{k.dimension}, got {len(inner)} inner products")
        for i, m in enumerate(inner):
            if m.dim != k.face_count(i):
                raise ValueError(f"inner product {i} has dim {m.dim}, complex has {k.face_count(i)} faces")
        boundaries = [boundary_matrix(k, i).astype(float) for i in range(k.dimension + 1)]
        return cls(boundaries, inner, target_dim)

    @classmethod
    def from_graph(cls, g: Graph, m_v: SpdMatrix, m_e: SpdMatrix, target_dim: int = 0) -> "IplSetup":
        if m_v.dim != g.n or m_e.dim != g.m:
            raise ValueError("inner product dimensions must match vertex and edge counts")
        b1 = graph_incidence(g).astype(float)
        return cls([np.zeros((0, g.n)), b1], [m_v, m_e], target_dim)

    def with_inverted_inner_products(self) -> "IplSetup":
        """Swap every M_i for its inverse (the coboundary-style Laplacian)."""
        return IplSetup(self.boundaries, [SpdMatrix(m.inverse()) for m in self.inner], self.target_dim)


def _spectrum(matrix: np.ndarray, q_inv: np.ndarray) -> SpectrumResult:
    matrix = 0.5 * (matrix + matrix.T)
    vals, vecs = sym_eig(matrix)
    threshold = ZERO_RTOL * max(float(vals[-1]), 1.0) if len(vals) else 0.0
    return SpectrumResult(
        matrix=matrix,
        eigenvalues=vals,
        eigenvectors=vecs,
        harmonic_eigenvectors=q_inv @ vecs,
        zero_multiplicity=int(np.sum(vals <= threshold)),
    )


def inner_product_laplacian(setup: IplSetup) -> SpectrumResult:
    i = setup.target_dim
    m_i = setup.inner[i]
    q = m_i.sqrt_entries
    q_inv = m_i.inv_sqrt_entries
    n = m_i.dim
    lap = np.zeros((n, n))
    if i >= 1:
        b = setup.boundaries[i]
        lap += q @ b.T @ setup.inner[i - 1].solve(b) @ q
    if i < setup.dim:
        b = setup.boundaries[i + 1]
        lap += q_inv @ b @ setup.inner[i + 1].entries @ b.T @ q_inv
    return _spectrum(lap, q_inv)


def semi_hodge(b, m_v: SpdMatrix, m_e: SpdMatrix) -> SpectrumResult:
    """Q_V^{-1} B M_E B^T Q_V^{-1} for a signed or unsigned incidence B."""
    b = np.asarray(b, dtype=float)
    if b.shape != (m_v.dim, m_e.dim):
        raise ValueError(f"incidence shape {b.shape} does not match inner products ({m_v.dim}, {m_e.dim})")
    q_inv = m_v.inv_sqrt_entries
    return _spectrum(q_inv @ b @ m_e.entries @ b.T @ q_inv, q_inv)


def _incidence_of(obj) -> np.ndarray:
    if isinstance(obj, Graph):
        return unsigned_incidence(obj)
    if isinstance(obj, Hypergraph):
        return obj.incidence()
    return np.abs(np.asarray(obj, dtype=float))


def compatibility(carrier, m_v: SpdMatrix, m_e: SpdMatrix) -> Compatibility:
    """Least omega with 1_{E(v)}^T M_E 1_{E(v)} <= omega * M_V[v,v] for all v."""
    h = _incidence_of(carrier)
    if h.shape != (m_v.dim, m_e.dim):
        raise ValueError("incidence shape does not match inner products")
    ratios = []
    for v in range(h.shape[0]):
        mask = (h[v] != 0).astype(float)
        d_v = float(mask @ m_e.entries @ mask)
        w_v = float(m_v.entries[v, v])
        ratios.append(d_v / w_v)
    omega = max(ratios)
    perfect = all(abs(r - omega) <= 1e-9 * abs(omega) for r in ratios)
    return Compatibility(omega=float(omega), perfect=bool(perfect), per_vertex=ratios)


def verify_radius_bound(
    carrier, m_v: SpdMatrix, m_e: SpdMatrix, *, cap: int = DEFAULT_SUBSET_CAP, force: bool = False
) -> VerificationReport:
    """Spectral radius of the semi-Hodge Laplacian against its conformality bound.

    lambda_max <= (1+rho_V)/(1-rho_V) * ((1+rho_E)/(1-rho_E))^2 * r * omega,
    with r the largest hyperedge size and omega the compatibility constant.
    """
    if isinstance(carrier, Graph):
        b = graph_incidence(carrier).astype(float)
    elif isinstance(carrier, Hypergraph):
        b = carrier.incidence().astype(float)
    else:
        b = np.asarray(carrier, dtype=float)
    spec = semi_hodge(b, m_v, m_e)
    lam_max = float(spec.eigenvalues[-1])
    rho_v = weak_conformality_value(m_v, cap=cap, force=force)
    rho_e = weak_conformality_value(m_e, cap=cap, force=force)
    rank = int((np.abs(b) > 0).sum(axis=0).max(initial=0))
    omega = compatibility(b, m_v, m_e).omega
    bound = (1 + rho_v) / (1 - rho_v) * ((1 + rho_e) / (1 - rho_e)) ** 2 * rank * omega
    return VerificationReport(
        check="semi-hodge-spectral-radius",
        passed=bool(lam_max <= bound + 1e-9),
        values={
            "lambda_max": lam_max,
            "rho_v": rho_v,
            "rho_e": rho_e,
            "rank": rank,
            "omega": omega,
            "bound": bound,
            "margin": bound - lam_max,
        },
    )


def _orthonormal_range(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if a.size == 0 or min(a.shape) == 0:
        return np.zeros((n, 0))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((n, 0))
    rank = int(np.sum(s > max(a.shape) * np.finfo(float).eps * s[0]))
    return u[:, :rank]


def hodge_decomposition(setup: IplSetup):
    """Orthogonal split R^n = Im(Q_i B_i^T Q_{i-1}^{-1}) + Ker(L_i) + Im(Q_i^{-1} B_{i+1} Q_{i+1}).

    The flanking subspaces are the images of the transposed and plain inner
    product boundary maps zeta_i = Q_{i-1}^{-1} B_i Q_i at dimensions i and
    i+1; both are invariant under L_i and orthogonal to its kernel. Returns
    three orthonormal bases plus a residual dictionary (pairwise cross-Gram
    norms and the composition residual of consecutive maps).
    """
    i = setup.target_dim
    m_i = setup.inner[i]
    n = m_i.dim
    if i >= 1:
        from_below = m_i.sqrt_entries @ setup.boundaries[i].T @ setup.inner[i - 1].inv_sqrt_entries
    else:
        from_below = np.zeros((n, 0))
    if i < setup.dim:
        from_above = m_i.inv_sqrt_entries @ setup.boundaries[i + 1] @ setup.inner[i + 1].sqrt_entries
    else:
        from_above = np.zeros((n, 0))
    basis_up = _orthonormal_range(from_below)
    basis_down = _orthonormal_range(from_above)
    spec = inner_product_laplacian(setup)
    basis_harmonic = spec.eigenvectors[:, : spec.zero_multiplicity]

    def gram(a, b):
        return float(np.linalg.norm(a.T @ b)) if a.size and b.size else 0.0

    residuals = {
        "up_harmonic": gram(basis_up, basis_harmonic),
        "up_down": gram(basis_up, basis_down),
        "harmonic_down": gram(basis_harmonic, basis_down),
        "dims": (basis_up.shape[1], basis_harmonic.shape[1], basis_down.shape[1]),
    }
    if 1 <= i <= setup.dim - 1:
        zeta_i = setup.inner[i - 1].inv_sqrt_entries @ setup.boundaries[i] @ m_i.sqrt_entries
        zeta_next = m_i.inv_sqrt_entries @ setup.boundaries[i + 1] @ setup.inner[i + 1].sqrt_entries
        residuals["zeta_composition"] = float(np.linalg.norm(zeta_i @ zeta_next))
    return basis_up, basis_harmonic, basis_down, residuals


CLASSICAL_KINDS = ("combinatorial", "normalized", "signless", "normalized-signless")


def recover_classical(kind: str, g: Graph, edge_weights=None):
    """Vertex/edge inner products that reproduce a textbook Laplacian.

    Returns (M_V, M_E, SpectrumResult). The edge inner product is the
    diagonal of edge weights; the vertex inner product is the identity for
    the combinatorial variants and the weighted degree diagonal for the
    normalized ones. Signless variants route through the unsigned incidence.
    """
    if kind not in CLASSICAL_KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {CLASSICAL_KINDS}")
    if edge_weights is None:
        edge_weights = np.ones(g.m)
    w = np.asarray(edge_weights, dtype=float)
    if w.shape != (g.m,):
        raise ValueError("need one weight per edge")
    if np.any(w <= 0):
        raise ValueError("edge weights must be positive")
    m_e = SpdMatrix.from_diagonal(w)
    if kind in ("combinatorial", "signless"):
        m_v = SpdMatrix.identity(g.n)
    else:
        weighted_deg = np.abs(graph_incidence(g)).astype(float) @ w
        m_v = SpdMatrix.from_diagonal(weighted_deg)
    b = graph_incidence(g) if kind in ("combinatorial", "normalized") else unsigned_incidence(g)
    return m_v, m_e, semi_hodge(b.astype(float), m_v, m_e)


def hypergraph_to_ipl(hg: Hypergraph, d, d_tilde, w, pi):
    """Re-express L = D - Dt H W Ht Dt as an inner product Laplacian.

    Requires a strictly positive vector pi in the kernel of L. The carrier
    is the clique expansion with pair weights
    pi_u pi_v dt_u dt_v sum_{e contains u,v} w_e, the vertex inner product
    is diag(pi)^2, and the resulting Laplacian reproduces L entrywise.
    """
    d = np.asarray(d, dtype=float)
    dt = np.asarray(d_tilde, dtype=float)
    w = np.asarray(w, dtype=float)
    pi = np.asarray(pi, dtype=float)
    n, m = hg.n, hg.m
    for name, vec, size in (("D", d, n), ("D-tilde", dt, n), ("W", w, m), ("pi", pi, n)):
        if vec.shape != (size,):
            raise ValueError(f"{name} must be a vector of length {size}")
        if np.any(vec <= 0):
            raise ValueError(f"{name} must be strictly positive")
    h = hg.incidence().astype(float)
    lap = np.diag(d) - (dt[:, None] * (h @ np.diag(w) @ h.T) * dt[None, :])
    scale = max(1.0, float(np.abs(lap).max()) * float(np.abs(pi).max()))
    kernel_resid = float(np.abs(lap @ pi).max())
    if kernel_resid > 1e-9 * scale:
        raise ValueError(
            f"pi is not in the kernel of L: max |L pi| = {kernel_resid:.3e} "
            f"(tolerance {1e-9 * scale:.3e})"
        )
    graph, base_w = clique_expansion(hg, w)
    pair_w = np.array(
        [pi[u] * pi[v] * dt[u] * dt[v] * bw for (u, v), bw in zip(graph.edges, base_w)]
    )
    m_v = SpdMatrix.from_diagonal(pi**2)
    m_e = SpdMatrix.from_diagonal(pair_w)
    b = graph_incidence(graph).astype(float)
    conjugated = (pi[:, None] * lap) * pi[None, :]
    clique_resid = float(np.abs(conjugated - b @ np.diag(pair_w) @ b.T).max())
    ipl = semi_hodge(b, m_v, m_e)
    ipl_resid = float(np.abs(ipl.matrix - lap).max())
    tol = 1e-9 * scale
    report = VerificationReport(
        check="hypergraph-clique-expansion",
        passed=bool(clique_resid <= tol and ipl_resid <= tol),
        values={
            "kernel_residual": kernel_resid,
            "clique_identity_residual": clique_resid,
            "ipl_residual": ipl_resid,
            "pair_weights": [float(v) for v in pair_w],
        },
    )
    return graph, m_v, m_e, report


def stationary_distribution(p: np.ndarray, *, max_iter: int = 100000, tol: float = 1e-12) -> np.ndarray:
    """Stationary distribution of a row-stochastic matrix by power iteration.

    Starts uniform and iterates x <- P^T x with l1 normalization; raises if
    the chain fails to settle, which covers non-ergodic inputs.
    """
    n = p.shape[0]
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = p.T @ x
        nxt = nxt / nxt.sum()
        if float(np.abs(nxt - x).sum()) <= tol:
            x = nxt
            break
        x = nxt
    else:
        raise RuntimeError(f"power iteration did not converge in {max_iter} steps; chain may not be ergodic")
    if np.any(x <= 10.0 * tol):
        raise RuntimeError("stationary distribution has a vanishing entry; chain is not ergodic")
    return x


def digraph_laplacian(p, *, max_iter: int = 100000, tol: float = 1e-12):
    """Symmetrized digraph Laplacians of an ergodic chain, as IPLs.

    Returns (L, normalized_L, pi, report) with
    L = Pi - (Pi P + P^T Pi)/2 and
    normalized_L = I - (Pi^{1/2} P Pi^{-1/2} + Pi^{-1/2} P^T Pi^{1/2})/2.
    Both re-express as inner product Laplacians on the support graph
    ({u,v} is an edge iff P_uv > 0 or P_vu > 0).
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError("transition matrix must be square")
    if np.any(p < 0):
        raise ValueError("transition matrix has negative entries")
    row_err = float(np.abs(p.sum(axis=1) - 1.0).max())
    if row_err > 1e-10:
        raise ValueError(f"rows must sum to 1 within 1e-10 (max error {row_err:.3e})")
    n = p.shape[0]
    pi = stationary_distribution(p, max_iter=max_iter, tol=tol)
    stat_resid = float(np.abs(pi @ p - pi).max())

    lap = np.diag(pi) - 0.5 * (pi[:, None] * p + p.T * pi[None, :])
    lap = 0.5 * (lap + lap.T)
    sq = np.sqrt(pi)
    norm_lap = np.eye(n) - 0.5 * ((sq[:, None] * p) / sq[None, :] + (p.T * sq[None, :]) / sq[:, None])
    norm_lap = 0.5 * (norm_lap + norm_lap.T)

    pairs = sorted(
        (u, v) for u in range(n) for v in range(u + 1, n) if p[u, v] > 0 or p[v, u] > 0
    )
    if not pairs:
        raise ValueError("support graph has no edges")
    graph = Graph(labels=tuple(f"v{i + 1}" for i in range(n)), edges=tuple(pairs))
    pair_w = np.array([0.5 * (pi[u] * p[u, v] + pi[v] * p[v, u]) for u, v in pairs])
    b = graph_incidence(graph).astype(float)
    m_e = SpdMatrix.from_diagonal(pair_w)
    ipl_plain = semi_hodge(b, SpdMatrix.identity(n), m_e)
    ipl_norm = semi_hodge(b, SpdMatrix.from_diagonal(pi), m_e)
    resid_plain = float(np.abs(ipl_plain.matrix - lap).max())
    resid_norm = float(np.abs(ipl_norm.matrix - norm_lap).max())
    report = VerificationReport(
        check="digraph-laplacian",
        passed=bool(resid_plain <= 1e-9 and resid_norm <= 1e-9 and stat_resid <= 1e-10),
        values={
            "stationary_residual": stat_resid,
            "ipl_residual": resid_plain,
            "normalized_ipl_residual": resid_norm,
            "support_edges": [[int(u), int(v)] for u, v in pairs],
            "pair_weights": [float(v) for v in pair_w],
        },
    )
    return lap, norm_lap, pi, report
