"""Inner product Laplacians for graphs, hypergraphs, and simplicial complexes."""

__version__ = "0.1.0"

from .complexes import (
    Graph,
    Hypergraph,
    SimplicialComplex,
    boundary_matrix,
    build_complex,
    clique_expansion,
    graph_incidence,
    unsigned_incidence,
)
from .conformality import (
    ConformalityResult,
    PartitionGadget,
    inverse_conformality_check,
    make_conformality_pair,
    partition_gadget,
    strong_conformality,
    verify_conformality_bounds,
    weak_conformality,
    weak_conformality_sampled,
    weak_conformality_value,
)
from .errors import EnumerationCapError, NotPositiveDefiniteError, NotSymmetricError
from .isoperimetry import (
    CutStats,
    NeumannResult,
    conductance,
    cut_stats,
    dirichlet_eigenvalues,
    neumann_eigenvalue,
    neumann_limit_experiment,
    normalized_inner_products,
    s_local_conductance,
    verify_cheeger,
    verify_eml,
    verify_eml_batch,
)
from .laplacian import (
    Compatibility,
    IplSetup,
    SpectrumResult,
    compatibility,
    digraph_laplacian,
    hodge_decomposition,
    hypergraph_to_ipl,
    inner_product_laplacian,
    recover_classical,
    semi_hodge,
    verify_radius_bound,
)
from .linalg import SpdMatrix, gen_eig, spd_solve, spd_sqrt, sym_eig
from .report import VerificationReport, emit_report, stable_json

__all__ = [
    "__version__",
    "Graph",
    "Hypergraph",
    "SimplicialComplex",
    "boundary_matrix",
    "build_complex",
    "clique_expansion",
    "graph_incidence",
    "unsigned_incidence",
    "ConformalityResult",
    "PartitionGadget",
    "inverse_conformality_check",
    "make_conformality_pair",
    "partition_gadget",
    "strong_conformality",
    "verify_conformality_bounds",
    "weak_conformality",
    "weak_conformality_sampled",
    "weak_conformality_value",
    "EnumerationCapError",
    "NotPositiveDefiniteError",
    "NotSymmetricError",
    "CutStats",
    "NeumannResult",
    "conductance",
    "cut_stats",
    "dirichlet_eigenvalues",
    "neumann_eigenvalue",
    "neumann_limit_experiment",
    "normalized_inner_products",
    "s_local_conductance",
    "verify_cheeger",
    "verify_eml",
    "verify_eml_batch",
    "Compatibility",
    "IplSetup",
    "SpectrumResult",
    "compatibility",
    "digraph_laplacian",
    "hodge_decomposition",
    "hypergraph_to_ipl",
    "inner_product_laplacian",
    "recover_classical",
    "semi_hodge",
    "verify_radius_bound",
    "SpdMatrix",
    "gen_eig",
    "spd_solve",
    "spd_sqrt",
    "sym_eig",
    "VerificationReport",
    "emit_report",
    "stable_json",
]
