"""Continuous-to-finite recovery chain.

The compressed measurement sequences obey an infinite family of linear
systems sharing one unknown support. Recovery reduces that family to a
single finite joint-sparse problem:

    demodulate (undo W)  ->  Q = sum_n y[n] y[n]^H  ->  frame V with Q = V V^H
    ->  joint-sparse solve of V = A U  ->  support S
    ->  coefficients via the pseudo-inverse of A restricted to S (and Z undone).

Solvers: exhaustive minimum-support search (exact, combinatorial) and
simultaneous orthogonal matching pursuit (greedy).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InfeasibleError, InvalidInputError, SingularOperatorError
from .sampling_design import MeasurementBank, MeasurementDesign
from .si_core import CoefficientBank
from .tolerances import DEFAULT_TOLERANCES, Tolerances

EXHAUSTIVE_GUARD = 10 ** 6
SOLVERS = ("exhaustive", "somp")
Q_DOMAINS = ("time", "frequency")


@dataclass(frozen=True)
class MMVProblem:
    """Finite joint-sparse system V = A U with a sparsity budget."""

    A: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)
    k_max: int

    def __post_init__(self):
        a = np.asarray(self.A, dtype=np.complex128)
        v = np.asarray(self.V, dtype=np.complex128)
        if a.ndim != 2 or v.ndim != 2:
            raise DimensionError("A and V must be 2-D")
        if v.shape[0] != a.shape[0]:
            raise DimensionError(f"V has {v.shape[0]} rows but A has {a.shape[0]}")
        if v.shape[1] < 1:
            raise InvalidInputError("V must have at least one column")
        if not 0 <= self.k_max <= a.shape[1]:
            raise InvalidInputError(f"k_max={self.k_max} out of range 0..{a.shape[1]}")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "V", v)


@dataclass(frozen=True)
class RecoveryResult:
    support: frozenset[int]
    coefficients: CoefficientBank
    diagnostics: dict


def demodulate(y: MeasurementBank, design: MeasurementDesign,
               tol: Tolerances = DEFAULT_TOLERANCES) -> MeasurementBank:
    """Undo the shaping bank: y_tilde(w_q) = W^{-1}(w_q) y(w_q)."""
    if y.p != design.p or y.length != design.grid.n:
        raise DimensionError(
            f"measurements ({y.p} x {y.length}) incompatible with design "
            f"(p={design.p}, N={design.grid.n})")
    conds = np.linalg.cond(design.W.values)
    bad = np.flatnonzero(~(conds <= tol.cond_tol))
    if bad.size:
        q = int(bad[0])
        raise SingularOperatorError(
            f"W singular at grid point {q}: cond={conds[q]:.3e} exceeds {tol.cond_tol:.1e}",
            grid_index=q)
    spectra = np.fft.fft(y.sequences, axis=1)
    solved = np.linalg.solve(design.W.values, spectra.T[:, :, None])[:, :, 0]
    return MeasurementBank(np.fft.ifft(solved.T, axis=1))


def compute_q(y: MeasurementBank, domain: str = "time") -> np.ndarray:
    """Gram accumulation of the measurement sequences.

    time:      Q = sum_n y[n] y[n]^H over the N samples (default)
    frequency: Q = sum_q y(w_q) y(w_q)^H over the grid bins (= N times the
               time-domain Q, by Parseval)
    Either yields the same column span, hence the same recovered support.
    """
    if domain == "time":
        mat = y.sequences
    elif domain == "frequency":
        mat = np.fft.fft(y.sequences, axis=1)
    else:
        raise InvalidInputError(f"unknown Q domain {domain!r}; choose from {Q_DOMAINS}")
    q = mat @ mat.conj().T
    return (q + q.conj().T) / 2.0


def frame_from_q(q: np.ndarray, rank_tol: float | None = None,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[np.ndarray, np.ndarray]:
    """Factor Q = V V^H by eigendecomposition, dropping eigenvalues below
    rank_tol times the largest.

    Returns (V, eigenvalues) with eigenvalues sorted descending; V has one
    column per retained eigenvalue (possibly zero columns for Q = 0).
    """
    if rank_tol is None:
        rank_tol = tol.rank_rel_tol
    q = np.asarray(q, dtype=np.complex128)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise DimensionError(f"Q must be square, got shape {q.shape}")
    herm_dev = float(np.max(np.abs(q - q.conj().T))) if q.size else 0.0
    scale = max(float(np.max(np.abs(q))), 1.0) if q.size else 1.0
    if herm_dev > 1e-10 * scale:
        raise InvalidInputError(f"Q is not Hermitian (deviation {herm_dev:.3e})")
    eigvals, eigvecs = np.linalg.eigh((q + q.conj().T) / 2.0)
    trace = float(np.sum(eigvals))
    if np.min(eigvals) < -tol.psd_tol * max(trace, 0.0) - tol.psd_tol:
        raise InvalidInputError(
            f"Q is indefinite: smallest eigenvalue {np.min(eigvals):.3e}")
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    lam_max = float(eigvals[0]) if eigvals.size else 0.0
    keep = eigvals > rank_tol * lam_max if lam_max > 0 else np.zeros_like(eigvals, dtype=bool)
    v = eigvecs[:, keep] * np.sqrt(eigvals[keep])
    return v, eigvals


def _support_residual(A: np.ndarray, v: np.ndarray, support) -> float:
    """Relative Frobenius residual of projecting V onto the span of A_S."""
    norm_v = float(np.linalg.norm(v))
    if norm_v == 0.0:
        return 0.0
    if len(support) == 0:
        return 1.0
    a_s = A[:, sorted(support)]
    coef, *_ = np.linalg.lstsq(a_s, v, rcond=None)
    return float(np.linalg.norm(v - a_s @ coef)) / norm_v


def solve_mmv_exhaustive(prob: MMVProblem,
                         tol: Tolerances = DEFAULT_TOLERANCES) -> frozenset[int]:
    """Exact minimum-support search.

    Scans supports by increasing size (lexicographic within a size) and
    returns the first one whose projection residual is within
    ``tol.mmv_residual_rel``. Guarded to C(m, k_max) <= 1e6 subsets per size.
    """
    m = prob.A.shape[1]
    if math.comb(m, prob.k_max) > EXHAUSTIVE_GUARD:
        raise InvalidInputError(
            f"exhaustive search refused: C({m}, {prob.k_max}) exceeds {EXHAUSTIVE_GUARD}")
    norm_v = float(np.linalg.norm(prob.V))
    if norm_v == 0.0:
        return frozenset()
    best_res = math.inf
    best_support: frozenset[int] = frozenset()
    for size in range(1, prob.k_max + 1):
        for combo in itertools.combinations(range(m), size):
            res = _support_residual(prob.A, prob.V, combo)
            if res <= tol.mmv_residual_rel:
                return frozenset(combo)
            if res < best_res:
                best_res = res
                best_support = frozenset(combo)
    raise InfeasibleError(
        f"no support of size <= {prob.k_max} fits the measurements "
        f"(best relative residual {best_res:.3e})",
        best_residual=best_res, best_support=best_support)


def solve_mmv_somp(prob: MMVProblem,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> frozenset[int]:
    """Simultaneous orthogonal matching pursuit.

    Greedily picks the column maximizing ||a_i^H R||_2 / ||a_i||_2 against
    the current residual matrix, then re-projects V onto the selected
    columns. Stops at k_max atoms or when the relative residual drops below
    ``tol.mmv_residual_rel``. Ties break to the lowest index. The returned
    support is not verified; callers should check the residual.
    """
    A, v = prob.A, prob.V
    norm_v = float(np.linalg.norm(v))
    if norm_v == 0.0:
        return frozenset()
    col_norms = np.linalg.norm(A, axis=0)
    selected: list[int] = []
    residual = v
    while len(selected) < prob.k_max:
        if np.linalg.norm(residual) / norm_v <= tol.mmv_residual_rel:
            break
        scores = np.linalg.norm(A.conj().T @ residual, axis=1)
        scores = np.divide(scores, col_norms, out=np.zeros_like(scores),
                           where=col_norms > 0)
        scores[selected] = -1.0  # never reselect
        pick = int(np.argmax(scores))
        if scores[pick] <= 0:
            break
        selected.append(pick)
        a_s = A[:, sorted(selected)]
        coef, *_ = np.linalg.lstsq(a_s, v, rcond=None)
        residual = v - a_s @ coef
    return frozenset(selected)


def _solve(prob: MMVProblem, solver: str, tol: Tolerances) -> frozenset[int]:
    if solver == "exhaustive":
        return solve_mmv_exhaustive(prob, tol)
    if solver == "somp":
        return solve_mmv_somp(prob, tol)
    raise InvalidInputError(f"unknown solver {solver!r}; choose from {SOLVERS}")


def recover_support(y: MeasurementBank, design: MeasurementDesign, k_max: int,
                    solver: str = "exhaustive", q_domain: str = "time",
                    tol: Tolerances = DEFAULT_TOLERANCES) -> frozenset[int]:
    """Identify the active channel set from compressed measurements."""
    y_tilde = demodulate(y, design, tol)
    q = compute_q(y_tilde, q_domain)
    v, _ = frame_from_q(q, tol=tol)
    if v.shape[1] == 0:
        return frozenset()
    return _solve(MMVProblem(design.A, v, k_max), solver, tol)


def recover_coefficients(y: MeasurementBank, design: MeasurementDesign,
                         support, tol: Tolerances = DEFAULT_TOLERANCES) -> CoefficientBank:
    """Reconstruct the coefficient bank given a support set.

    Per grid bin: d_S(w_q) = Z_S^{-1}(w_q) A_S^+ y_tilde(w_q); channels off
    the support are exactly zero. Exact whenever the support covers the truth
    and A_S has full column rank.
    """
    support = sorted(int(i) for i in set(support))
    if any(i < 0 or i >= design.m for i in support):
        raise InvalidInputError(f"support {support} out of range for m={design.m}")
    n = design.grid.n
    if not support:
        return CoefficientBank.zeros(design.m, n)
    a_s = design.A[:, support]
    sv = np.linalg.svd(a_s, compute_uv=False)
    if sv[-1] <= tol.rank_rel_tol * sv[0]:
        raise InvalidInputError(
            f"columns {support} of A are rank deficient (sv ratio {sv[-1] / sv[0]:.3e})")
    y_tilde = demodulate(y, design, tol)
    spectra = np.fft.fft(y_tilde.sequences, axis=1)
    x = np.linalg.pinv(a_s) @ spectra  # (|S|, N)
    if design.Z is not None:
        x = x / design.Z.diagonal()[:, support].T
    sequences = np.zeros((design.m, n), dtype=np.complex128)
    sequences[support] = np.fft.ifft(x, axis=1)
    return CoefficientBank(sequences, frozenset(support))


def recover(y: MeasurementBank, design: MeasurementDesign, k_max: int,
            solver: str = "exhaustive", q_domain: str = "time",
            tol: Tolerances = DEFAULT_TOLERANCES) -> RecoveryResult:
    """Full pipeline with diagnostics: support, coefficients, Q spectrum."""
    y_tilde = demodulate(y, design, tol)
    q = compute_q(y_tilde, q_domain)
    v, eigvals = frame_from_q(q, tol=tol)
    if v.shape[1] == 0:
        support: frozenset[int] = frozenset()
    else:
        support = _solve(MMVProblem(design.A, v, k_max), solver, tol)
    coefficients = recover_coefficients(y, design, support, tol)
    diagnostics = {
        "rank_q": int(v.shape[1]),
        "residual": _support_residual(design.A, v, support),
        "solver": solver,
        "q_eigenvalues": [float(e) for e in eigvals],
    }
    return RecoveryResult(support=support, coefficients=coefficients,
                          diagnostics=diagnostics)
