"""Strong and weak conformality of SPD matrices.

Strong conformality measures the worst correlation, under the inner product
M, of vectors that are orthogonal in the standard inner product; it has the
closed form (lambda_max - lambda_min)/(lambda_max + lambda_min). Weak
conformality restricts to vectors with disjoint support, is tied to the
representing basis, and is computed exactly by maximizing the top
generalized eigenvalue over all 2^(k-1) - 1 unordered support partitions:
for a subset S,

    value(S)^2 = max eig of  M_SS v = (1/lambda) M_SSbar M_SbarSbar^-1 M_SSbar^T v.

Exact computation is exponential by nature (the decision problem encodes
integer Partition instances), so enumeration is capped by default.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh as scipy_eigh

from .errors import EnumerationCapError
from .linalg import SpdMatrix, gen_eig
from .report import VerificationReport

DEFAULT_SUBSET_CAP = 20


@dataclass
class ConformalityResult:
    rho_strong: float
    rho_weak: float
    witness_partition: tuple[int, ...]
    witness_x: np.ndarray
    witness_y: np.ndarray

    def to_dict(self) -> dict:
        return {
            "rho_strong": self.rho_strong,
            "rho_weak": self.rho_weak,
            "witness_S": list(self.witness_partition),
            "witness_x": [float(v) for v in self.witness_x],
            "witness_y": [float(v) for v in self.witness_y],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConformalityResult":
        return cls(
            rho_strong=float(d["rho_strong"]),
            rho_weak=float(d["rho_weak"]),
            witness_partition=tuple(int(i) for i in d["witness_S"]),
            witness_x=np.asarray(d["witness_x"], dtype=float),
            witness_y=np.asarray(d["witness_y"], dtype=float),
        )


def strong_conformality(m: SpdMatrix) -> float:
    """Closed form (lambda_max - lambda_min)/(lambda_max + lambda_min)."""
    if m.dim < 2:
        raise ValueError("strong conformality requires dimension >= 2")
    lo, hi = float(m.eigenvalues[0]), float(m.eigenvalues[-1])
    return (hi - lo) / (hi + lo)


def _partition_masks(k: int):
    # Index 0 is pinned to S: (S, complement) is an unordered pair, so this
    # enumerates each partition exactly once. The all-in mask is excluded.
    return range(1 << (k - 1)) if k > 1 else range(0)


def _mask_to_subset(mask: int, k: int) -> tuple[int, ...]:
    return (0,) + tuple(i + 1 for i in range(k - 1) if (mask >> i) & 1)


def _subset_value(entries: np.ndarray, s_idx: np.ndarray, t_idx: np.ndarray) -> float:
    m_ss = entries[np.ix_(s_idx, s_idx)]
    m_st = entries[np.ix_(s_idx, t_idx)]
    m_tt = entries[np.ix_(t_idx, t_idx)]
    factor = cho_factor(m_tt, lower=True)
    a = m_st @ cho_solve(factor, m_st.T)
    a = 0.5 * (a + a.T)
    vals = scipy_eigh(a, m_ss, eigvals_only=True)
    return float(np.sqrt(max(float(vals[-1]), 0.0)))


def _scan_masks(entries: np.ndarray, masks, k: int):
    all_idx = np.arange(k)
    best_val = -1.0
    best_subset: tuple[int, ...] | None = None
    for mask in masks:
        subset = _mask_to_subset(mask, k)
        if len(subset) == k:
            continue
        s_idx = np.array(subset)
        t_idx = np.setdiff1d(all_idx, s_idx, assume_unique=True)
        val = _subset_value(entries, s_idx, t_idx)
        if val > best_val or (val == best_val and subset < best_subset):
            best_val, best_subset = val, subset
    return best_val, best_subset


def weak_conformality(
    m: SpdMatrix,
    *,
    cap: int = DEFAULT_SUBSET_CAP,
    force: bool = False,
    threads: int = 1,
) -> ConformalityResult:
    """Exact weak conformality via exhaustive partition enumeration.

    Ties between partitions resolve to the lexicographically smallest
    subset containing index 0, so output is deterministic regardless of
    evaluation order or thread count.
    """
    k = m.dim
    if k < 2:
        raise ValueError("weak conformality requires dimension >= 2")
    if k > cap and not force:
        raise EnumerationCapError(
            f"dimension {k} exceeds the enumeration cap {cap}: exact weak "
            f"conformality solves 2^(k-1)-1 = {2 ** (k - 1) - 1} generalized "
            "eigenproblems; pass force=True (CLI: --force) to run anyway"
        )
    entries = m.entries
    masks = list(_partition_masks(k))
    if threads > 1 and len(masks) > 64:
        chunks = np.array_split(np.array(masks), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _scan_masks(entries, c.tolist(), k), chunks))
        best_val, best_subset = -1.0, None
        for val, subset in results:
            if subset is None:
                continue
            if val > best_val or (val == best_val and subset < best_subset):
                best_val, best_subset = val, subset
    else:
        best_val, best_subset = _scan_masks(entries, masks, k)

    s_idx = np.array(best_subset)
    t_idx = np.setdiff1d(np.arange(k), s_idx, assume_unique=True)
    rho, x, y = _witness_pair(m, s_idx, t_idx)
    return ConformalityResult(
        rho_strong=strong_conformality(m),
        rho_weak=rho,
        witness_partition=best_subset,
        witness_x=x,
        witness_y=y,
    )


def _witness_pair(m: SpdMatrix, s_idx: np.ndarray, t_idx: np.ndarray):
    """Maximizing pair for a fixed support partition.

    x is the top generalized eigenvector on S; the optimal partner on the
    complement is y = M_SbarSbar^-1 M_SSbar^T x. Both are returned with
    unit M-norm and a sign making the correlation nonnegative.
    """
    entries = m.entries
    m_ss = entries[np.ix_(s_idx, s_idx)]
    m_st = entries[np.ix_(s_idx, t_idx)]
    m_tt = entries[np.ix_(t_idx, t_idx)]
    factor = cho_factor(m_tt, lower=True)
    a = m_st @ cho_solve(factor, m_st.T)
    a = 0.5 * (a + a.T)
    vals, vecs = gen_eig(a, SpdMatrix(m_ss))
    rho = float(np.sqrt(max(float(vals[-1]), 0.0)))
    v = vecs[:, -1]
    y_t = cho_solve(factor, m_st.T @ v)
    if np.abs(y_t).max(initial=0.0) < 1e-300:
        # Decoupled blocks (rho = 0): any vector on the complement works.
        y_t = np.zeros(len(t_idx))
        y_t[0] = 1.0
    k = m.dim
    x = np.zeros(k)
    x[s_idx] = v
    y = np.zeros(k)
    y[t_idx] = y_t
    x = x / np.sqrt(m.quad(x))
    y = y / np.sqrt(m.quad(y))
    if float(x @ entries @ y) < 0.0:
        y = -y
    return rho, x, y


def weak_conformality_value(
    m: SpdMatrix, *, cap: int = DEFAULT_SUBSET_CAP, force: bool = False
) -> float:
    """Weak conformality as a bare number, with the vacuous 1-d case as 0.

    A one-dimensional space admits no disjoint-support pair, so the least
    valid rho is 0; theorem verifiers use this form for their correction
    factors.
    """
    if m.dim < 2:
        return 0.0
    return weak_conformality(m, cap=cap, force=force).rho_weak


def weak_conformality_sampled(m: SpdMatrix, trials: int, seed: int) -> float:
    """Lower-bound oracle: best correlation over random disjoint-support pairs.

    Support sizes are uniform on [1, k-1]; entries are standard normal.
    Deterministic for a fixed seed, and never exceeds the exact value.
    """
    k = m.dim
    if k < 2:
        raise ValueError("sampled weak conformality requires dimension >= 2")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    sizes = rng.integers(1, k, size=trials)
    order = np.argsort(rng.random((trials, k)), axis=1)
    ranks = np.argsort(order, axis=1)
    mask = ranks < sizes[:, None]
    x = rng.standard_normal((trials, k)) * mask
    y = rng.standard_normal((trials, k)) * ~mask
    mx = x @ m.entries
    num = np.abs(np.einsum("ti,ti->t", mx, y))
    den = np.sqrt(np.einsum("ti,ti->t", mx, x) * np.einsum("ti,ij,tj->t", y, m.entries, y))
    return float((num / den).max())


def make_conformality_pair(
    rho_w: float, rho_s: float, k: int, *, cap: int = DEFAULT_SUBSET_CAP
) -> SpdMatrix:
    """Build a k x k SPD matrix with weak conformality rho_w and strong rho_s.

    The 2x2 block [[a, rho_w], [rho_w, 1/a]] has weak conformality rho_w for
    every a >= 1 (there is a single support partition), while its strong
    conformality sqrt((a - 1/a)^2 + 4 rho_w^2)/(a + 1/a) sweeps [rho_w, 1);
    a is found by bisection and an identity block pads to dimension k.
    """
    if not (0.0 <= rho_w <= rho_s < 1.0):
        raise ValueError("need 0 <= rho_w <= rho_s < 1")
    if k < 2:
        raise ValueError("need dimension k >= 2")

    def strong_of(alpha: float) -> float:
        return float(np.sqrt((alpha - 1.0 / alpha) ** 2 + 4.0 * rho_w**2) / (alpha + 1.0 / alpha))

    if rho_s <= rho_w:
        alpha = 1.0
    else:
        lo, hi = 1.0, 1e8
        if strong_of(hi) < rho_s:
            raise RuntimeError(f"bisection bracket [1, 1e8] cannot reach rho_s = {rho_s}")
        alpha = None
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            f = strong_of(mid)
            if abs(f - rho_s) <= 1e-10:
                alpha = mid
                break
            if f < rho_s:
                lo = mid
            else:
                hi = mid
        if alpha is None:
            raise RuntimeError("bisection for the strong-conformality target did not converge")

    block = np.array([[alpha, rho_w], [rho_w, 1.0 / alpha]])
    entries = np.eye(k)
    entries[:2, :2] = block
    m = SpdMatrix(entries)

    measured_s = strong_conformality(m)
    if abs(measured_s - rho_s) > 1e-8:
        raise RuntimeError(f"constructed matrix has strong conformality {measured_s}, wanted {rho_s}")
    # Adjoining a diagonal block preserves weak conformality, so for large k
    # it suffices to verify the 2x2 block.
    check = m if k <= cap else SpdMatrix(block)
    measured_w = weak_conformality(check, cap=cap).rho_weak
    if abs(measured_w - rho_w) > 1e-8:
        raise RuntimeError(f"constructed matrix has weak conformality {measured_w}, wanted {rho_w}")
    return m


@dataclass
class PartitionGadget:
    """SPD encoding of an integer Partition instance.

    For instance x_1..x_n the gadget is M = x x^T + I with x_i = sqrt(x_i).
    Balanced partitions of the instance exist exactly when the weak
    conformality of M attains X/(X+1), where 2X is the instance sum.
    """

    instance: tuple[int, ...]
    matrix: SpdMatrix
    half_sum: float
    affirmative_value: float


def partition_gadget(instance) -> PartitionGadget:
    values = [int(v) for v in instance]
    if len(values) < 2:
        raise ValueError("a Partition instance needs at least two numbers")
    if any(v < 1 for v in values) or any(int(v) != v for v in instance):
        raise ValueError("Partition instance entries must be natural numbers >= 1")
    x = np.sqrt(np.asarray(values, dtype=float))
    m = SpdMatrix(np.outer(x, x) + np.eye(len(values)))
    half = 0.5 * float(sum(values))
    return PartitionGadget(
        instance=tuple(values),
        matrix=m,
        half_sum=half,
        affirmative_value=half / (half + 1.0),
    )


def verify_conformality_bounds(
    m: SpdMatrix, x, *, cap: int = DEFAULT_SUBSET_CAP, force: bool = False
) -> VerificationReport:
    """Check the sign and trace sandwiches around x^T M x.

    With rho the exact weak conformality, both
    (1-rho)/(1+rho) |x|^T M |x| <= x^T M x <= (1+rho)/(1-rho) |x|^T M |x| and
    the same bracket with sum_i x_i^2 M_ii in place of |x|^T M |x| must hold.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (m.dim,):
        raise ValueError(f"dimension mismatch: matrix is {m.dim}-dimensional, x has shape {x.shape}")
    rho = weak_conformality(m, cap=cap, force=force).rho_weak
    lo_factor = (1.0 - rho) / (1.0 + rho)
    hi_factor = (1.0 + rho) / (1.0 - rho)
    quad = m.quad(x)
    abs_quad = m.quad(np.abs(x))
    diag_quad = float(np.sum(x * x * np.diagonal(m.entries)))
    slack = 1e-10
    sign_ok = lo_factor * abs_quad - slack <= quad <= hi_factor * abs_quad + slack
    trace_ok = lo_factor * diag_quad - slack <= quad <= hi_factor * diag_quad + slack
    return VerificationReport(
        check="conformality-bounds",
        passed=bool(sign_ok and trace_ok),
        values={
            "rho_weak": rho,
            "quadratic_form": quad,
            "sign_lower": lo_factor * abs_quad,
            "sign_upper": hi_factor * abs_quad,
            "trace_lower": lo_factor * diag_quad,
            "trace_upper": hi_factor * diag_quad,
            "sign_bound_holds": bool(sign_ok),
            "trace_bound_holds": bool(trace_ok),
        },
    )


def inverse_conformality_check(
    m: SpdMatrix, *, cap: int = DEFAULT_SUBSET_CAP, force: bool = False
) -> VerificationReport:
    """Both conformalities must be invariant under matrix inversion."""
    if m.dim < 2:
        raise ValueError("conformality requires dimension >= 2")
    inv = SpdMatrix(m.inverse())
    rho_s = strong_conformality(m)
    rho_s_inv = strong_conformality(inv)
    rho_w = weak_conformality(m, cap=cap, force=force).rho_weak
    rho_w_inv = weak_conformality(inv, cap=cap, force=force).rho_weak
    tol = 1e-8
    return VerificationReport(
        check="inverse-conformality",
        passed=bool(abs(rho_s - rho_s_inv) <= tol and abs(rho_w - rho_w_inv) <= tol),
        values={
            "rho_strong": rho_s,
            "rho_strong_inverse": rho_s_inv,
            "rho_weak": rho_w,
            "rho_weak_inverse": rho_w_inv,
        },
    )
