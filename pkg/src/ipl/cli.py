"""Command-line front end.

One binary with verb/subverb commands, JSON files in, a deterministic JSON
(or CSV) report on stdout. Exit codes: 0 computed and passed, 1 computed
but a verification failed, 2 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .complexes import Graph
from .conformality import (
    DEFAULT_SUBSET_CAP,
    weak_conformality,
    weak_conformality_sampled,
)
from .errors import EnumerationCapError
from .isoperimetry import (
    CONDUCTANCE_CAP,
    DEFAULT_EPSILON_SCHEDULE,
    conductance,
    dirichlet_eigenvalues,
    neumann_eigenvalue,
    neumann_limit_experiment,
    normalized_inner_products,
    s_local_conductance,
    verify_cheeger,
    verify_eml,
    verify_eml_batch,
)
from .jsonio import load_graph, load_hypergraph, load_matrix, load_vector
from .laplacian import (
    IplSetup,
    digraph_laplacian,
    hypergraph_to_ipl,
    inner_product_laplacian,
    recover_classical,
    verify_radius_bound,
)
from .linalg import SpdMatrix
from .report import csv_table, stable_json

FORMAT_VERSION = "1"


class UsageError(ValueError):
    pass


def _parse_orientation(text: str, m: int):
    tokens = [t.strip() for t in text.split(",")]
    if len(tokens) != m:
        raise UsageError(f"--orientation needs {m} comma-separated signs, got {len(tokens)}")
    out = []
    for t in tokens:
        if t in ("+", "+1", "1"):
            out.append(1)
        elif t in ("-", "-1"):
            out.append(-1)
        else:
            raise UsageError(f"orientation entries must be + or -, got {t!r}")
    return tuple(out)


def _parse_subset(text: str, g: Graph):
    if text.strip() == "":
        return []
    index = {lab: i for i, lab in enumerate(g.labels)}
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok not in index:
            raise UsageError(f"unknown vertex label {tok!r}")
        out.append(index[tok])
    return out


def _parse_schedule(text: str):
    if ":" in text:
        lo, hi = text.split(":", 1)
        start, stop = float(lo), float(hi)
        if not (0 < stop <= start < 1):
            raise UsageError("schedule endpoints must satisfy 0 < end <= start < 1")
        out = []
        eps = start
        while eps >= stop * (1 - 1e-12):
            out.append(eps)
            eps /= 10.0
        return out
    return [float(t) for t in text.split(",")]


def _load_spd(path) -> SpdMatrix:
    return SpdMatrix(load_matrix(path))


def _classical_pair(kind: str, g: Graph):
    if kind == "normalized":
        return normalized_inner_products(g)
    if kind == "combinatorial":
        return SpdMatrix.identity(g.n), SpdMatrix.identity(g.m)
    raise UsageError(f"--kind must be normalized or combinatorial for inner products, got {kind!r}")


def _graph_with_inner_products(args) -> tuple[Graph, SpdMatrix, SpdMatrix]:
    g = load_graph(args.graph)
    if getattr(args, "orientation", None):
        g = g.with_orientation(_parse_orientation(args.orientation, g.m))
    if getattr(args, "mv", None) or getattr(args, "me", None):
        if not (args.mv and args.me):
            raise UsageError("--mv and --me must be given together")
        m_v, m_e = _load_spd(args.mv), _load_spd(args.me)
    else:
        m_v, m_e = _classical_pair(getattr(args, "kind", None) or "normalized", g)
    return g, m_v, m_e


def _config(args, inputs: dict, flags: dict) -> dict:
    return {
        "command": args.command if not getattr(args, "subverb", None) else f"{args.command} {args.subverb}",
        "inputs": inputs,
        "flags": flags,
        "version": __version__,
        "format_version": FORMAT_VERSION,
    }


def _emit(config: dict, result: dict, csv: str | None = None) -> None:
    if csv is not None:
        sys.stdout.write(csv)
    else:
        sys.stdout.write(stable_json({"config": config, "result": result}))


def _cmd_conformality(args) -> int:
    matrix_path = args.matrix_pos or args.matrix
    if not matrix_path:
        raise UsageError("a matrix file is required (positional or --matrix)")
    if args.matrix_pos and args.matrix:
        raise UsageError("give the matrix either positionally or via --matrix, not both")
    m = _load_spd(matrix_path)
    cap = args.weak_cap
    res = weak_conformality(m, cap=cap, force=args.force, threads=args.threads)
    out = res.to_dict()
    flags = {"weak_cap": cap, "force": args.force, "threads": args.threads}
    if args.sampled is not None:
        if args.seed is None:
            raise UsageError("--sampled requires --seed")
        out["sampled"] = weak_conformality_sampled(m, args.sampled, args.seed)
        flags.update({"sampled": args.sampled, "seed": args.seed})
    _emit(_config(args, {"matrix": str(matrix_path)}, flags), out)
    return 0


def _cmd_spectrum(args) -> int:
    g = load_graph(args.graph)
    if args.orientation:
        g = g.with_orientation(_parse_orientation(args.orientation, g.m))
    m_v, m_e = _load_spd(args.mv), _load_spd(args.me)
    setup = IplSetup.from_graph(g, m_v, m_e, target_dim=args.dim)
    if args.coboundary:
        setup = setup.with_inverted_inner_products()
    spec = inner_product_laplacian(setup)
    result = spec.to_dict()
    result["verification"] = {
        "min_eigenvalue": float(spec.eigenvalues[0]),
        "zero_multiplicity": spec.zero_multiplicity,
    }
    config = _config(
        args,
        {"graph": args.graph, "mv": args.mv, "me": args.me},
        {"dim": args.dim, "orientation": args.orientation, "coboundary": args.coboundary},
    )
    if args.csv:
        header, rows = spec.to_rows()
        _emit(config, result, csv=csv_table(header, rows))
    else:
        _emit(config, result)
    return 0


def _cmd_recover(args) -> int:
    g = load_graph(args.graph)
    weights = load_vector(args.weights) if args.weights else None
    m_v, m_e, spec = recover_classical(args.kind, g, weights)
    result = {
        "m_v": [[float(v) for v in row] for row in m_v.entries],
        "m_e": [[float(v) for v in row] for row in m_e.entries],
        "spectrum": spec.to_dict(),
    }
    config = _config(
        args,
        {"graph": args.graph, **({"weights": args.weights} if args.weights else {})},
        {"kind": args.kind},
    )
    if args.csv:
        header, rows = spec.to_rows()
        _emit(config, result, csv=csv_table(header, rows))
    else:
        _emit(config, result)
    return 0


def _cmd_hypergraph_to_ipl(args) -> int:
    hg, w = load_hypergraph(args.hypergraph)
    pi = load_vector(args.pi) if args.pi else np.ones(hg.n)
    dt = load_vector(args.dt) if args.dt else np.ones(hg.n)
    h = hg.incidence().astype(float)
    if args.d:
        d = load_vector(args.d)
    else:
        # Kernel-consistent default: D pi = Dt H W H^T Dt pi entrywise.
        d = (dt * (h @ (w * (h.T @ (dt * pi))))) / pi
    graph, m_v, m_e, report = hypergraph_to_ipl(hg, d, dt, w, pi)
    result = {
        "graph": graph.to_dict(),
        "m_v": [[float(v) for v in row] for row in m_v.entries],
        "m_e": [[float(v) for v in row] for row in m_e.entries],
        "report": report.to_dict(),
    }
    inputs = {"hypergraph": args.hypergraph}
    for name in ("pi", "d", "dt"):
        if getattr(args, name):
            inputs[name] = getattr(args, name)
    _emit(_config(args, inputs, {}), result)
    return 0 if report.passed else 1


def _cmd_digraph(args) -> int:
    p = load_matrix(args.transition)
    lap, norm_lap, pi, report = digraph_laplacian(p)
    result = {
        "l": [[float(v) for v in row] for row in lap],
        "normalized_l": [[float(v) for v in row] for row in norm_lap],
        "pi": [float(v) for v in pi],
        "report": report.to_dict(),
    }
    _emit(_config(args, {"transition": args.transition}, {}), result)
    return 0 if report.passed else 1


def _cmd_conductance(args) -> int:
    g, m_v, m_e = _graph_with_inner_products(args)
    phi, witness, table = conductance(
        g, m_v, m_e, force=args.force, include_table=args.table
    )
    result = {"phi": float(phi), "witness_S": [g.labels[i] for i in witness]}
    if table is not None:
        result["table"] = [
            {**row, "subset": [g.labels[i] for i in row["subset"]]} for row in table
        ]
    config = _config(
        args,
        {"graph": args.graph},
        {"kind": args.kind, "mv": args.mv, "me": args.me, "table": args.table, "force": args.force},
    )
    if args.csv:
        if table is None:
            raise UsageError("--csv for conductance requires --table")
        rows = [
            [";".join(g.labels[i] for i in r["subset"]), r["e_cut"], r["vol"], r["vol_comp"], r["phi"]]
            for r in table
        ]
        _emit(config, result, csv=csv_table(["subset", "e_cut", "vol", "vol_comp", "phi"], rows))
    else:
        _emit(config, result)
    return 0


def _cmd_verify(args) -> int:
    g, m_v, m_e = _graph_with_inner_products(args)
    flags = {
        "kind": args.kind,
        "mv": args.mv,
        "me": args.me,
        "orientation": args.orientation,
        "weak_cap": args.weak_cap,
        "force": args.force,
    }
    if args.subverb == "cheeger":
        report = verify_cheeger(g, m_v, m_e, cap=args.weak_cap, force=args.force)
    elif args.subverb == "radius":
        report = verify_radius_bound(g, m_v, m_e, cap=args.weak_cap, force=args.force)
    elif args.subverb == "eml":
        if args.batch:
            report = verify_eml_batch(g, m_v, m_e, cap=args.weak_cap, force=args.force)
            flags["batch"] = True
        else:
            if args.x is None or args.y is None:
                raise UsageError("verify eml needs --x and --y (or --batch)")
            x = _parse_subset(args.x, g)
            y = _parse_subset(args.y, g)
            report = verify_eml(g, m_v, m_e, x, y, cap=args.weak_cap, force=args.force)
            flags.update({"x": args.x, "y": args.y})
    else:
        raise UsageError(f"unknown verification {args.subverb!r}")
    _emit(_config(args, {"graph": args.graph}, flags), report.to_dict())
    return 0 if report.passed else 1


def _cmd_neumann(args) -> int:
    g = load_graph(args.graph)
    subset = _parse_subset(args.subset, g)
    schedule = _parse_schedule(args.schedule) if args.schedule else list(DEFAULT_EPSILON_SCHEDULE)
    if args.direct_only:
        res = neumann_eigenvalue(g, subset)
    else:
        res = neumann_limit_experiment(g, subset, schedule)
    phi_s, local_report = s_local_conductance(g, subset, force=args.force)
    result = res.to_dict()
    result["subset_labels"] = [g.labels[i] for i in res.subset]
    result["boundary_labels"] = [g.labels[i] for i in res.boundary]
    result["s_local"] = local_report.to_dict()
    config = _config(
        args,
        {"graph": args.graph},
        {"subset": args.subset, "schedule": args.schedule, "direct_only": args.direct_only, "force": args.force},
    )
    if args.csv:
        header, rows = res.to_rows()
        _emit(config, result, csv=csv_table(header, rows))
    else:
        _emit(config, result)
    if args.direct_only:
        return 0 if local_report.passed else 1
    return 0 if (res.converged and local_report.passed) else 1


def _cmd_dirichlet(args) -> int:
    g = load_graph(args.graph)
    subset = _parse_subset(args.subset, g)
    vals = dirichlet_eigenvalues(g, subset)
    result = {
        "eigenvalues": [float(v) for v in vals],
        "subset_labels": [g.labels[i] for i in sorted(set(subset))],
    }
    config = _config(args, {"graph": args.graph}, {"subset": args.subset})
    if args.csv:
        rows = [[i, float(v)] for i, v in enumerate(vals)]
        _emit(config, result, csv=csv_table(["index", "eigenvalue"], rows))
    else:
        _emit(config, result)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ipl",
        description="Inner product Laplacian toolkit: conformality, spectra, and isoperimetric verification.",
    )
    parser.add_argument(
        "--version", action="version", version=f"ipl {__version__} (report format {FORMAT_VERSION})"
    )
    parser.add_argument("--threads", type=int, default=1, help="worker threads for subset enumeration (default: 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("conformality", help="strong and weak conformality of an SPD matrix")
    p.add_argument("matrix_pos", nargs="?", metavar="matrix.json", help="SPD matrix file")
    p.add_argument("--matrix", help="SPD matrix file (alternative to the positional form)")
    p.add_argument("--weak-cap", type=int, default=DEFAULT_SUBSET_CAP, help=f"enumeration cap on the dimension (default: {DEFAULT_SUBSET_CAP})")
    p.add_argument("--force", action="store_true", help="run past the enumeration cap")
    p.add_argument("--sampled", type=int, help="also report a sampled lower bound with this many trials")
    p.add_argument("--seed", type=int, help="seed for --sampled")
    p.set_defaults(handler=_cmd_conformality)

    p = sub.add_parser("spectrum", help="inner product Laplacian spectrum of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--mv", required=True, help="vertex inner product matrix file")
    p.add_argument("--me", required=True, help="edge inner product matrix file")
    p.add_argument("--dim", type=int, default=0, choices=(0, 1), help="chain dimension (default: 0)")
    p.add_argument("--orientation", help="per-edge signs, e.g. +,-")
    p.add_argument("--coboundary", action="store_true", help="use inverted inner products")
    p.add_argument("--csv", action="store_true", help="emit eigenvalues as CSV")
    p.set_defaults(handler=_cmd_spectrum)

    p = sub.add_parser("recover", help="classical Laplacian as an inner product Laplacian")
    p.add_argument("--kind", required=True, choices=("combinatorial", "normalized", "signless", "normalized-signless"))
    p.add_argument("--graph", required=True)
    p.add_argument("--weights", help="per-edge weight vector file (default: all ones)")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(handler=_cmd_recover)

    p = sub.add_parser("hypergraph-to-ipl", help="re-express a hypergraph Laplacian on the clique expansion")
    p.add_argument("--hypergraph", required=True)
    p.add_argument("--pi", help="kernel vector file (default: all ones)")
    p.add_argument("--d", help="degree diagonal file (default: kernel-consistent)")
    p.add_argument("--dt", help="scaling diagonal file (default: all ones)")
    p.set_defaults(handler=_cmd_hypergraph_to_ipl)

    p = sub.add_parser("digraph", help="symmetrized digraph Laplacians of an ergodic chain")
    p.add_argument("--transition", required=True, help="row-stochastic matrix file")
    p.set_defaults(handler=_cmd_digraph)

    def add_inner_product_options(p):
        p.add_argument("--kind", choices=("normalized", "combinatorial"), help="classical inner products (default: normalized)")
        p.add_argument("--mv", help="vertex inner product matrix file")
        p.add_argument("--me", help="edge inner product matrix file")
        p.add_argument("--orientation", help="per-edge signs, e.g. +,-")
        p.add_argument("--weak-cap", type=int, default=DEFAULT_SUBSET_CAP, help=f"conformality enumeration cap (default: {DEFAULT_SUBSET_CAP})")
        p.add_argument("--force", action="store_true", help="run past enumeration caps")

    p = sub.add_parser("conductance", help=f"exact inner product conductance (cap {CONDUCTANCE_CAP} vertices)")
    p.add_argument("--graph", required=True)
    add_inner_product_options(p)
    p.add_argument("--table", action="store_true", help="include every cut in the report")
    p.add_argument("--csv", action="store_true", help="emit the cut table as CSV (requires --table)")
    p.set_defaults(handler=_cmd_conductance)

    p = sub.add_parser("verify", help="check a theorem on a concrete instance")
    vsub = p.add_subparsers(dest="subverb", required=True)
    for name, extra in (("cheeger", ()), ("eml", ("--x", "--y")), ("radius", ())):
        q = vsub.add_parser(name)
        q.add_argument("--graph", required=True)
        add_inner_product_options(q)
        for flag in extra:
            q.add_argument(flag, help="comma-separated vertex labels")
        if name == "eml":
            q.add_argument("--batch", action="store_true", help="sweep all (X, Y) pairs")
        q.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("neumann", help="Neumann eigenvalue, directly and as an epsilon limit")
    p.add_argument("--graph", required=True)
    p.add_argument("--subset", required=True, help="comma-separated vertex labels")
    p.add_argument("--schedule", help="epsilon schedule, e.g. 1e-1:1e-8 or 0.5,0.1")
    p.add_argument("--direct-only", action="store_true", help="skip the epsilon sweep")
    p.add_argument("--force", action="store_true")
    p.add_argument("--csv", action="store_true", help="emit the epsilon trace as CSV")
    p.set_defaults(handler=_cmd_neumann)

    p = sub.add_parser("dirichlet", help="Dirichlet eigenvalues of an induced subgraph")
    p.add_argument("--graph", required=True)
    p.add_argument("--subset", required=True, help="comma-separated vertex labels")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(handler=_cmd_dirichlet)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc.filename}: file not found", file=sys.stderr)
        return 2
    except EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
