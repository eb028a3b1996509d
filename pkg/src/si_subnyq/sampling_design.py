"""Compressive sampling system construction.

A measurement design bundles a p x m mixing matrix A (p <= m), an invertible
p x p shaping filter bank W(w_q) and an optional invertible diagonal m x m
bank Z(w_q). Measurements are y(w_q) = W(w_q) A Z(w_q) d(w_q) per grid bin,
equivalently a multichannel circular filtering of the coefficient sequences.

The module also synthesizes the analog-side objects: the biorthogonal set of
any admissible sampling family, and the p sampling filters whose
cross-spectrum matrix with the generators equals W(w_q) A exactly.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InvalidInputError, SingularOperatorError
from .si_core import (
    CoefficientBank,
    FrequencyGrid,
    GeneratorSet,
    PeriodicMatrixFunction,
    cross_spectrum_matrix,
)
from .tolerances import DEFAULT_TOLERANCES, Tolerances

KRUSKAL_MAX_COLUMNS = 24
_KRUSKAL_CHUNK = 20000
MATRIX_KINDS = ("gaussian", "gaussian_real", "bernoulli", "fourier_rows")


@dataclass(frozen=True)
class MeasurementDesign:
    """Immutable measurement system (A, W, optional Z) on a frequency grid."""

    A: np.ndarray = field(repr=False)
    W: PeriodicMatrixFunction
    grid: FrequencyGrid
    Z: PeriodicMatrixFunction | None = None

    def __post_init__(self):
        a = np.array(self.A, dtype=np.complex128)
        if a.ndim != 2:
            raise DimensionError(f"A must be 2-D, got shape {a.shape}")
        p, m = a.shape
        if p > m:
            raise InvalidInputError(f"A must have p <= m rows, got {p} x {m}")
        if self.W.grid.n != self.grid.n:
            raise DimensionError("W lives on a different grid than the design")
        if self.W.rows != p or self.W.cols != p:
            raise DimensionError(f"W must be {p} x {p}, got {self.W.rows} x {self.W.cols}")
        if self.Z is not None:
            if self.Z.grid.n != self.grid.n:
                raise DimensionError("Z lives on a different grid than the design")
            if self.Z.rows != m or self.Z.cols != m:
                raise DimensionError(f"Z must be {m} x {m}, got {self.Z.rows} x {self.Z.cols}")
            if not self.Z.is_diagonal():
                raise InvalidInputError("Z must be exactly diagonal")
        a.setflags(write=False)
        object.__setattr__(self, "A", a)

    @property
    def p(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class MeasurementBank:
    """p compressed measurement sequences of length N."""

    sequences: np.ndarray = field(repr=False)

    def __post_init__(self):
        seq = np.array(self.sequences, dtype=np.complex128)
        if seq.ndim != 2:
            raise DimensionError(f"sequences must be (p, N), got shape {seq.shape}")
        seq.setflags(write=False)
        object.__setattr__(self, "sequences", seq)

    @property
    def p(self) -> int:
        return self.sequences.shape[0]

    @property
    def length(self) -> int:
        return self.sequences.shape[1]


def validate_design(design: MeasurementDesign,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> None:
    """Enforce the invertibility invariants: cond(W(w_q)) <= cond_tol at every
    grid point, and every Z diagonal entry bounded away from zero."""
    conds = np.linalg.cond(design.W.values)
    bad = np.flatnonzero(~(conds <= tol.cond_tol))
    if bad.size:
        q = int(bad[0])
        raise SingularOperatorError(
            f"W singular at grid point {q}: cond={conds[q]:.3e} exceeds {tol.cond_tol:.1e}",
            grid_index=q)
    if design.Z is not None:
        diag = design.Z.diagonal()
        scale = max(float(np.max(np.abs(diag))), 1.0)
        bad_z = np.flatnonzero(np.min(np.abs(diag), axis=1) < scale / tol.cond_tol)
        if bad_z.size:
            q = int(bad_z[0])
            raise SingularOperatorError(
                f"Z has a near-zero diagonal entry at grid point {q}", grid_index=q)


def make_design(A: np.ndarray, grid: FrequencyGrid,
                W: PeriodicMatrixFunction | None = None,
                Z: PeriodicMatrixFunction | None = None,
                tol: Tolerances = DEFAULT_TOLERANCES) -> MeasurementDesign:
    """Validated constructor; W defaults to the identity bank."""
    A = np.asarray(A, dtype=np.complex128)
    if W is None:
        W = PeriodicMatrixFunction.identity(grid, A.shape[0])
    design = MeasurementDesign(A=A, W=W, grid=grid, Z=Z)
    validate_design(design, tol)
    return design


def biorthogonalize(h: GeneratorSet, a_gen: GeneratorSet,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> GeneratorSet:
    """Turn any admissible sampling family h into the biorthogonal family v.

    v(nu) = M_HA^{-*}(e^{j w_q}) h(nu) pointwise on the frequency lattice; the
    result satisfies cross_spectrum_matrix(v, a_gen) = I at every grid point.
    """
    m_ha = cross_spectrum_matrix(h, a_gen)
    if m_ha.rows != m_ha.cols:
        raise DimensionError(
            f"biorthogonalization needs as many h channels ({h.m}) as generators ({a_gen.m})")
    conds = np.linalg.cond(m_ha.values)
    bad = np.flatnonzero(~(conds <= tol.cond_tol))
    if bad.size:
        q = int(bad[0])
        raise SingularOperatorError(
            f"M_HA singular at grid point {q}: cond={conds[q]:.3e} exceeds {tol.cond_tol:.1e}",
            grid_index=q)
    inv = np.linalg.inv(m_ha.values)
    spectra = np.einsum("qir,rqj->iqj", np.conj(inv), h.spectra)
    return GeneratorSet(h.grid, h.period, h.alias_support, spectra)


def build_sampling_filters(design: MeasurementDesign, v: GeneratorSet) -> GeneratorSet:
    """Synthesize the p sampling filters s(nu) = W*(e^{j w_q}) A* v(nu).

    When v is biorthogonal to the generators, the cross-spectrum matrix of the
    returned filters against the generators equals W(w_q) A at every grid
    point (with Z absent).
    """
    if design.grid.n != v.grid.n:
        raise DimensionError("design and biorthogonal set live on different grids")
    if design.m != v.m:
        raise DimensionError(
            f"design mixes {design.m} channels but biorthogonal set has {v.m}")
    spectra = np.einsum("qir,rl,lqj->iqj",
                        np.conj(design.W.values), np.conj(design.A), v.spectra)
    return GeneratorSet(v.grid, v.period, v.alias_support, spectra)


def compressive_sample(d: CoefficientBank, design: MeasurementDesign,
                       tol: Tolerances = DEFAULT_TOLERANCES) -> MeasurementBank:
    """Produce the compressed measurements y(w_q) = W(w_q) A Z(w_q) d(w_q).

    This is the direct per-bin product; it coincides with pushing d through
    the combined operator via the filter-bank path (circular convolution).
    """
    if d.m != design.m:
        raise DimensionError(f"bank has {d.m} channels but A has {design.m} columns")
    if d.length != design.grid.n:
        raise DimensionError(f"sequence length {d.length} != grid length {design.grid.n}")
    spectra = np.fft.fft(d.sequences, axis=1)
    if design.Z is not None:
        spectra = design.Z.diagonal().T * spectra
    mixed = design.A @ spectra
    shaped = np.einsum("qir,rq->iq", design.W.values, mixed)
    return MeasurementBank(np.fft.ifft(shaped, axis=1))


def combined_operator(design: MeasurementDesign) -> PeriodicMatrixFunction:
    """The p x m sampling operator M(w_q) = W(w_q) A Z(w_q)."""
    values = design.W.values @ design.A
    if design.Z is not None:
        values = values * design.Z.diagonal()[:, None, :]
    return PeriodicMatrixFunction(design.grid, values)


def kruskal_rank(A: np.ndarray, rel_tol: float | None = None,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Largest q such that every set of q columns of A is linearly independent.

    Exhaustive over column subsets; a subset counts as full rank when its
    smallest singular value exceeds rel_tol times its largest. Refuses
    matrices wider than 24 columns (combinatorial guard).
    """
    if rel_tol is None:
        rel_tol = tol.rank_rel_tol
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise DimensionError(f"A must be 2-D, got shape {A.shape}")
    p, m = A.shape
    if m > KRUSKAL_MAX_COLUMNS:
        raise InvalidInputError(
            f"kruskal_rank refuses m={m} columns: exhaustive subset search is "
            f"limited to {KRUSKAL_MAX_COLUMNS} columns")
    sigma = 0
    for q in range(1, min(p, m) + 1):
        combos = itertools.combinations(range(m), q)
        all_full_rank = True
        while True:
            chunk = list(itertools.islice(combos, _KRUSKAL_CHUNK))
            if not chunk:
                break
            subs = np.moveaxis(A[:, np.asarray(chunk)], 1, 0)  # (batch, p, q)
            sv = np.linalg.svd(subs, compute_uv=False)
            if not np.all(sv[:, -1] > rel_tol * sv[:, 0]):
                all_full_rank = False
                break
        if not all_full_rank:
            break
        sigma = q
    return sigma


@dataclass(frozen=True)
class RateReport:
    p: int
    m: int
    sigma: int
    k_max_unique: int


def verify_rate(design: MeasurementDesign,
                tol: Tolerances = DEFAULT_TOLERANCES) -> RateReport:
    """Report the largest sparsity with guaranteed unique recovery,
    k_max_unique = floor(sigma(A) / 2)."""
    sigma = kruskal_rank(design.A, tol=tol)
    return RateReport(p=design.p, m=design.m, sigma=sigma, k_max_unique=sigma // 2)


# ---------------------------------------------------------------------------
# Random ensembles
# ---------------------------------------------------------------------------

def make_cs_matrix(kind: str, p: int, m: int, rng: np.random.Generator,
                   cosets=None) -> np.ndarray:
    """Draw a p x m compressed-sensing matrix.

    gaussian       i.i.d. complex Gaussian, columns normalized to unit norm
    gaussian_real  i.i.d. real Gaussian, columns normalized to unit norm
    bernoulli      i.i.d. +-1/sqrt(p)
    fourier_rows   p rows of the m x m DFT-style matrix exp(2j*pi*l*c/m)/sqrt(m);
                   row indices are ``cosets`` or a random distinct draw
    """
    if p > m:
        raise InvalidInputError(f"p={p} must not exceed m={m}")
    if kind == "gaussian":
        A = rng.standard_normal((p, m)) + 1j * rng.standard_normal((p, m))
        return A / np.linalg.norm(A, axis=0, keepdims=True)
    if kind == "gaussian_real":
        A = rng.standard_normal((p, m)).astype(np.complex128)
        return A / np.linalg.norm(A, axis=0, keepdims=True)
    if kind == "bernoulli":
        return rng.choice([-1.0, 1.0], size=(p, m)).astype(np.complex128) / np.sqrt(p)
    if kind == "fourier_rows":
        if cosets is None:
            cosets = rng.choice(m, size=p, replace=False)
        cosets = np.asarray(list(cosets), dtype=int)
        if cosets.shape[0] != p:
            raise InvalidInputError(f"need {p} coset rows, got {cosets.shape[0]}")
        if len(set(int(c) % m for c in cosets)) != p:
            raise InvalidInputError("coset rows must be distinct mod m")
        ell = np.arange(m)
        return np.exp(2j * np.pi * np.outer(cosets, ell) / m) / np.sqrt(m)
    raise InvalidInputError(f"unknown matrix kind {kind!r}; choose from {MATRIX_KINDS}")


def random_invertible_w(p: int, grid: FrequencyGrid, rng: np.random.Generator,
                        max_cond: float = 1e4,
                        max_draws: int = 64) -> PeriodicMatrixFunction:
    """Random invertible p x p filter bank, well conditioned at every bin."""
    for _ in range(max_draws):
        values = rng.standard_normal((grid.n, p, p)) + 1j * rng.standard_normal((grid.n, p, p))
        if np.max(np.linalg.cond(values)) <= max_cond:
            return PeriodicMatrixFunction(grid, values)
    raise InvalidInputError("failed to draw a well-conditioned W")


def random_diagonal_z(m: int, grid: FrequencyGrid,
                      rng: np.random.Generator) -> PeriodicMatrixFunction:
    """Random invertible diagonal bank; magnitudes in [0.5, 1.5], random phase."""
    mag = rng.uniform(0.5, 1.5, size=(grid.n, m))
    phase = rng.uniform(0.0, 2.0 * np.pi, size=(grid.n, m))
    diag = mag * np.exp(1j * phase)
    values = np.zeros((grid.n, m, m), dtype=np.complex128)
    idx = np.arange(m)
    values[:, idx, idx] = diag
    return PeriodicMatrixFunction(grid, values)


# ---------------------------------------------------------------------------
# JSON serialization (bit-exact round trip)
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise InvalidInputError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def _emit(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_emit(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(k)}:{_emit(v)}" for k, v in obj.items()) + "}"
    raise InvalidInputError(f"cannot serialize {type(obj).__name__}")


def _pairs(values: np.ndarray) -> list:
    flat = np.asarray(values, dtype=np.complex128).reshape(-1)
    return [[float(v.real), float(v.imag)] for v in flat]


def design_to_json(design: MeasurementDesign, matrix_kind: str | None = None,
                   seed: int | None = None) -> str:
    """Serialize a design. Doubles are emitted with 17 significant digits so
    the round trip through the decimal text is bit-exact."""
    doc = {
        "p": design.p,
        "m": design.m,
        "N": design.grid.n,
        "A": _pairs(design.A),
        "W": [_pairs(design.W.values[q]) for q in range(design.grid.n)],
        "Z": None if design.Z is None else
             [_pairs(design.Z.diagonal()[q]) for q in range(design.grid.n)],
        "matrix_kind": matrix_kind,
        "seed": seed,
    }
    return _emit(doc)


def _from_pairs(pairs, shape) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    return flat.reshape(shape)


def design_from_json(text: str) -> tuple[MeasurementDesign, dict]:
    """Parse a serialized design; returns (design, metadata)."""
    doc = json.loads(text)
    for key in ("p", "m", "N", "A", "W"):
        if key not in doc:
            raise InvalidInputError(f"design document is missing field {key!r}")
    p, m, n = int(doc["p"]), int(doc["m"]), int(doc["N"])
    grid = FrequencyGrid(n)
    A = _from_pairs(doc["A"], (p, m))
    w_values = np.stack([_from_pairs(rows, (p, p)) for rows in doc["W"]])
    W = PeriodicMatrixFunction(grid, w_values)
    Z = None
    if doc.get("Z") is not None:
        z_values = np.zeros((n, m, m), dtype=np.complex128)
        idx = np.arange(m)
        for q, diag in enumerate(doc["Z"]):
            z_values[q, idx, idx] = _from_pairs(diag, (m,))
        Z = PeriodicMatrixFunction(grid, z_values)
    design = MeasurementDesign(A=A, W=W, grid=grid, Z=Z)
    meta = {"matrix_kind": doc.get("matrix_kind"), "seed": doc.get("seed")}
    return design, meta
