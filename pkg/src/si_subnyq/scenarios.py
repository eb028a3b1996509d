"""End-to-end scenario builders: periodic coefficient sparsity and multiband.

Both scenarios emit plain (generators, design, signal) triples that feed the
generic sampling/recovery pipeline; no scenario-specific recovery code
exists.

Generator representation note: the frequency-domain generator sets declared
here are exact on the evaluation lattice. For the piecewise-constant (box)
scenario the declared spectra are the band-limited family with the same
sampled correlation sequences as the box family; every discrete quantity in
the pipeline (cross-spectra, samples, recovered coefficients) is therefore
identical to the true box system, while waveform-level checks integrate the
true piecewise-constant waveform directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InvalidInputError
from .sampling_design import (
    MeasurementBank,
    MeasurementDesign,
    biorthogonalize,
    build_sampling_filters,
    compressive_sample,
    kruskal_rank,
    make_cs_matrix,
    make_design,
)
from .si_core import (
    TWO_PI,
    CoefficientBank,
    FrequencyGrid,
    GeneratorSet,
    PeriodicMatrixFunction,
    cross_spectrum,
    cross_spectrum_matrix,
    filterbank_sample,
)
from .sparse_model import SparseSISignal, SparsityProfile, synthesize
from .tolerances import DEFAULT_TOLERANCES, Tolerances


# ---------------------------------------------------------------------------
# Periodic sparsity of a single-generator signal
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicSparsityScenario:
    """Single-generator signal whose coefficients are block-sparse.

    Out of each consecutive group of m coefficients at base period T', at
    most k are nonzero, in the fixed 0-based pattern ``s_pattern``. The
    reindexed system has m generators with period m*T' and p compressed
    output sequences.
    """

    m: int
    k: int
    s_pattern: frozenset[int]
    base_period: float
    n_blocks: int
    seed: int
    p: int
    matrix_kind: str = "gaussian"

    def __post_init__(self):
        pattern = frozenset(int(i) for i in self.s_pattern)
        if len(pattern) != self.k:
            raise InvalidInputError(
                f"s_pattern {sorted(pattern)} has {len(pattern)} entries, expected k={self.k}")
        if any(i < 0 or i >= self.m for i in pattern):
            raise InvalidInputError(f"s_pattern {sorted(pattern)} out of range 0..{self.m - 1}")
        if not 1 <= self.p <= self.m:
            raise InvalidInputError(f"p={self.p} must satisfy 1 <= p <= m={self.m}")
        if self.base_period <= 0:
            raise InvalidInputError("base_period must be positive")
        if self.n_blocks < 1:
            raise InvalidInputError("n_blocks must be >= 1")
        object.__setattr__(self, "s_pattern", pattern)


def shifted_box_generators(m: int, base_period: float,
                           grid: FrequencyGrid) -> GeneratorSet:
    """The reindexed box family a_i(t) = box(t - i*T'), period T = m*T'.

    Declared spectra are the exact lattice-equivalent band-limited family
    A_i(nu) = T' * exp(-1j*nu*i*T') on [0, 2*pi/T'): it has the same sampled
    cross-correlations as the box family (the Gram matrix is T' * I), which
    is all the sampling operators ever see.
    """
    period = m * base_period
    alias_support = tuple(range(-(m - 1), 1))
    w = grid.points
    j = np.asarray(alias_support, dtype=float)
    nu = (w[:, None] - TWO_PI * j[None, :]) / period  # (N, m) lattice, inside [0, 2*pi/T')
    channels = np.arange(m)[:, None, None]
    spectra = base_period * np.exp(-1j * nu[None, :, :] * channels * base_period)
    return GeneratorSet(grid, period, alias_support, spectra)


def box_prefilter_generator(base_period: float, grid: FrequencyGrid) -> GeneratorSet:
    """The normalized box q(t) = box(t)/T' as a single generator at period T'
    (lattice-equivalent spectrum: 1 on [0, 2*pi/T'))."""
    spectra = np.ones((1, grid.n, 1), dtype=np.complex128)
    return GeneratorSet(grid, base_period, (0,), spectra)


@dataclass(frozen=True)
class PeriodicSparsityBuild:
    scenario: PeriodicSparsityScenario
    generators: GeneratorSet
    biorthogonal: GeneratorSet
    filters: GeneratorSet
    design: MeasurementDesign
    signal: SparseSISignal
    report: dict = field(repr=False)


def build_periodic_sparsity(sc: PeriodicSparsityScenario,
                            tol: Tolerances = DEFAULT_TOLERANCES) -> PeriodicSparsityBuild:
    """Assemble the m-generator reformulation, its biorthogonal set, the
    sampling filters and a block-sparse signal.

    The build verifies the two construction identities numerically: the
    prefilter/generator product spectrum is identically 1 on the base-rate
    grid, and the biorthogonal cross-spectrum matrix is the identity.
    """
    grid = FrequencyGrid(sc.n_blocks)
    generators = shifted_box_generators(sc.m, sc.base_period, grid)

    rng = np.random.default_rng(sc.seed)
    a_matrix = make_cs_matrix(sc.matrix_kind, sc.p, sc.m, rng)
    design = make_design(a_matrix, grid, tol=tol)  # W = I

    v = biorthogonalize(generators, generators, tol)
    m_va = cross_spectrum_matrix(v, generators)
    m_va_dev = float(np.max(np.abs(
        m_va.values - np.eye(sc.m)[None, :, :])))
    if m_va_dev > tol.biorth_tol:
        raise InvalidInputError(
            f"biorthogonality identity failed: max deviation {m_va_dev:.3e}")

    # prefilter identity on the base-rate grid: the product spectrum of the
    # normalized box against the box generator is identically one
    base_grid = FrequencyGrid(sc.m * sc.n_blocks)
    q_gen = box_prefilter_generator(sc.base_period, base_grid)
    a_base = GeneratorSet(base_grid, sc.base_period, (0,),
                          sc.base_period * np.ones((1, base_grid.n, 1)))
    g_values = cross_spectrum(q_gen, a_base)
    g_dev = float(np.max(np.abs(g_values - 1.0)))

    filters = build_sampling_filters(design, v)

    profile = SparsityProfile(sc.m, sc.k, sc.s_pattern)
    coefficients = synthesize(profile, sc.n_blocks, rng)
    signal = SparseSISignal(profile, coefficients, generators)

    report = {
        "m_va_deviation": m_va_dev,
        "prefilter_identity_deviation": g_dev,
        "baseline_rate": 1.0 / sc.base_period,
        "compressed_rate": sc.p / (sc.m * sc.base_period),
        "compression_factor": sc.p / sc.m,
    }
    return PeriodicSparsityBuild(sc, generators, v, filters, design, signal, report)


def flatten_block_coefficients(bank: CoefficientBank) -> np.ndarray:
    """Interleave channel sequences back into the flat base-rate sequence:
    d_flat[l + n*m] = d_l[n]."""
    return bank.sequences.T.reshape(-1)


def baseline_reference_samples(build: PeriodicSparsityBuild) -> np.ndarray:
    """The uncompressed reference path: one sequence at the base rate whose
    samples equal the flat coefficients (prefilter-then-sample, m = 1)."""
    sc = build.scenario
    base_grid = FrequencyGrid(sc.m * sc.n_blocks)
    q_gen = box_prefilter_generator(sc.base_period, base_grid)
    a_base = GeneratorSet(base_grid, sc.base_period, (0,),
                          sc.base_period * np.ones((1, base_grid.n, 1)))
    m_qa = cross_spectrum_matrix(q_gen, a_base)
    flat = flatten_block_coefficients(build.signal.coefficients)
    d_flat = CoefficientBank.from_sequences(flat[None, :])
    return filterbank_sample(d_flat, m_qa)[0]


def render_piecewise_constant(build: PeriodicSparsityBuild,
                              resolution: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Sample the true box-generator waveform on a fine cell grid.

    Returns (cell_centers, cell_values); the waveform is constant on each
    cell of width T'/resolution, so these values represent it exactly.
    """
    sc = build.scenario
    flat = flatten_block_coefficients(build.signal.coefficients)
    values = np.repeat(flat, resolution)
    h = sc.base_period / resolution
    centers = (np.arange(values.shape[0]) + 0.5) * h
    return centers, values


def piecewise_constant_waveform_check(build: PeriodicSparsityBuild,
                                      resolution: int = 64,
                                      tol: Tolerances = DEFAULT_TOLERANCES) -> dict:
    """Integrate the modulated true waveform and compare with the filter-bank
    samples.

    Each output sample is the integral over one length-(m*T') block of the
    waveform times the conjugated sampling filter, a piecewise-constant
    function with values A[i, l]/T' on base cell l. The integrand is constant
    on every fine cell (cell width divides T'), so per-cell rectangle sums
    integrate it exactly; the tolerance covers float accumulation only.
    """
    sc = build.scenario
    h = sc.base_period / resolution
    _, x_vals = render_piecewise_constant(build, resolution)
    # (blocks, m, resolution): fine cells grouped by block and base cell
    cells = x_vals.reshape(sc.n_blocks, sc.m, resolution)
    base_cell_integrals = cells.sum(axis=2) * h  # (blocks, m)
    modulator = build.design.A / sc.base_period  # conj(s_i) values per base cell
    y_quad = np.einsum("il,nl->in", modulator, base_cell_integrals)

    y_fb = compressive_sample(build.signal.coefficients, build.design, tol).sequences
    scale = float(np.max(np.abs(y_fb)))
    max_err = float(np.max(np.abs(y_quad - y_fb)))
    rel_err = max_err / scale if scale > 0 else max_err
    return {
        "max_relative_error": rel_err,
        "passed": bool(rel_err <= tol.quadrature_rel_tol),
        "samples_quadrature": y_quad,
        "samples_filterbank": y_fb,
    }


# ---------------------------------------------------------------------------
# Multiband sampling via coset delays
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultibandScenario:
    """Complex multiband signal observed through delayed sub-grid sampling.

    The band-limited range [0, 2*pi/T) is split into m equal slices; a signal
    with n_bands bands of width <= band_width occupies at most 2*n_bands
    slices. Sampling uses p distinct integer coset offsets c_i.
    """

    n_bands: int
    band_width: float
    m: int
    T: float
    cosets: tuple[int, ...]
    seed: int
    n_samples: int = 32

    def __post_init__(self):
        if self.n_bands < 1:
            raise InvalidInputError("n_bands must be >= 1")
        if self.T <= 0 or self.band_width <= 0:
            raise InvalidInputError("T and band_width must be positive")
        if self.m * self.band_width * self.T > TWO_PI * (1 + 1e-12):
            raise InvalidInputError(
                f"slice count m={self.m} too large: need m <= 2*pi/(B*T) = "
                f"{TWO_PI / (self.band_width * self.T):.3f} so each band spans <= 2 slices")
        cosets = tuple(int(c) for c in self.cosets)
        if any(c < 0 or c > self.m for c in cosets):
            raise InvalidInputError(f"cosets {cosets} must lie in 0..m={self.m}")
        if len(set(c % self.m for c in cosets)) != len(cosets):
            raise InvalidInputError(f"cosets {cosets} must be distinct mod m")
        if len(cosets) > self.m:
            raise InvalidInputError("more cosets than slices")
        if self.n_samples < 1:
            raise InvalidInputError("n_samples must be >= 1")
        object.__setattr__(self, "cosets", cosets)

    @property
    def p(self) -> int:
        return len(self.cosets)


def multiband_slice_generators(m: int, T: float, grid: FrequencyGrid) -> GeneratorSet:
    """m orthonormal brick-wall slice generators covering [0, 2*pi/T).

    Slice i has constant value sqrt(m*T) on [i*2*pi/(m*T), (i+1)*2*pi/(m*T))
    and is exactly zero elsewhere, so the Gram matrix is the identity."""
    period = m * T
    alias_support = tuple(range(-(m - 1), 1))
    spectra = np.zeros((m, grid.n, m), dtype=np.complex128)
    for i in range(m):
        j_index = alias_support.index(-i)
        spectra[i, :, j_index] = np.sqrt(m * T)
    return GeneratorSet(grid, period, alias_support, spectra)


def multiband_shaping_bank(sc: MultibandScenario,
                           grid: FrequencyGrid) -> PeriodicMatrixFunction:
    """Diagonal shaping bank with entries exp(1j*c_i*w_q/m)/sqrt(T)."""
    w = grid.points
    values = np.zeros((grid.n, sc.p, sc.p), dtype=np.complex128)
    for i, c in enumerate(sc.cosets):
        values[:, i, i] = np.exp(1j * c * w / sc.m) / np.sqrt(sc.T)
    return PeriodicMatrixFunction(grid, values)


@dataclass(frozen=True)
class MultibandBuild:
    scenario: MultibandScenario
    generators: GeneratorSet
    design: MeasurementDesign
    signal: SparseSISignal
    report: dict = field(repr=False)


def build_multiband(sc: MultibandScenario,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> MultibandBuild:
    """Construct slice generators, the coset-row mixing matrix, the diagonal
    shaping bank and a sparse multiband signal occupying <= 2*n_bands slices."""
    grid = FrequencyGrid(sc.n_samples)
    generators = multiband_slice_generators(sc.m, sc.T, grid)

    a_matrix = make_cs_matrix("fourier_rows", sc.p, sc.m,
                              np.random.default_rng(sc.seed), cosets=sc.cosets)
    design = make_design(a_matrix, grid, W=multiband_shaping_bank(sc, grid), tol=tol)

    rng = np.random.default_rng(sc.seed)
    slice_width = TWO_PI / (sc.m * sc.T)
    active: set[int] = set()
    band_edges = []
    for _ in range(sc.n_bands):
        start = rng.uniform(0.0, TWO_PI / sc.T - sc.band_width)
        stop = start + sc.band_width
        first = int(start // slice_width)
        last = int((stop * (1 - 1e-12)) // slice_width)
        active.update(range(first, min(last, sc.m - 1) + 1))
        band_edges.append((float(start), float(stop)))

    profile = SparsityProfile(sc.m, len(active), frozenset(active))
    coefficients = synthesize(profile, sc.n_samples, rng)
    signal = SparseSISignal(profile, coefficients, generators)

    report = {
        "active_slices": sorted(active),
        "band_edges": band_edges,
        "k_max": 2 * sc.n_bands,
        "sigma": kruskal_rank(a_matrix, tol=tol) if sc.m <= 16 else None,
    }
    return MultibandBuild(sc, generators, design, signal, report)


def delay_filter_equivalence_check(build: MultibandBuild, n_points: int = 512,
                                   tol: Tolerances = DEFAULT_TOLERANCES) -> dict:
    """Verify that each synthesized sampling branch acts as a pure delay.

    Evaluates G_i(w) = W_i*(e^{j*w*m*T}) * sum_l conj(A[i, l]) A_l(w) on a
    dense grid inside [0, 2*pi/T) and compares with exp(-1j*c_i*w*T).
    """
    sc = build.scenario
    omega = np.arange(n_points) * (TWO_PI / sc.T) / n_points
    slice_width = TWO_PI / (sc.m * sc.T)
    ell = np.minimum((omega // slice_width).astype(int), sc.m - 1)
    wrapped = omega * sc.m * sc.T - TWO_PI * ell  # w*m*T reduced to [0, 2*pi)
    max_dev = 0.0
    for i, c in enumerate(sc.cosets):
        w_conj = np.exp(-1j * c * wrapped / sc.m) / np.sqrt(sc.T)
        slice_sum = np.sqrt(sc.m * sc.T) * np.conj(build.design.A[i, ell])
        g = w_conj * slice_sum
        target = np.exp(-1j * c * omega * sc.T)
        max_dev = max(max_dev, float(np.max(np.abs(g - target))))
    return {
        "max_deviation": max_dev,
        "passed": bool(max_dev <= tol.delay_identity_tol),
        "n_points": n_points,
    }


def fractional_delay_demodulate(y: np.ndarray, coset: int, m: int,
                                T: float = 1.0) -> np.ndarray:
    """Realize the scaled fractional delay c/m by a multirate time chain.

    Upsample by m, apply the ideal one-sided circular low-pass (passband
    [0, 2*pi/m) on the upsampled grid, gain m), circularly delay by ``coset``
    samples, downsample by m, and scale by 1/sqrt(T). On the DFT grid this
    equals multiplying the spectrum by exp(-1j*coset*w_q/m)/sqrt(T).
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim != 1:
        raise DimensionError("fractional_delay_demodulate expects a single sequence")
    n = y.shape[0]
    up = np.zeros(m * n, dtype=np.complex128)
    up[::m] = y
    spectrum = np.fft.fft(up)
    spectrum[n:] = 0.0
    spectrum *= m
    delayed = np.roll(np.fft.ifft(spectrum), coset)
    return delayed[::m] / np.sqrt(T)


def fractional_delay_direct(y: np.ndarray, coset: int, m: int,
                            T: float = 1.0) -> np.ndarray:
    """Frequency-domain counterpart of the fractional-delay chain."""
    y = np.asarray(y, dtype=np.complex128)
    n = y.shape[0]
    w = TWO_PI * np.arange(n) / n
    return np.fft.ifft(np.fft.fft(y) * np.exp(-1j * coset * w / m)) / np.sqrt(T)


def demodulate_by_delays(bank: MeasurementBank, sc: MultibandScenario) -> MeasurementBank:
    """Apply the fractional-delay chain to every measurement channel."""
    rows = [fractional_delay_demodulate(bank.sequences[i], c, sc.m, sc.T)
            for i, c in enumerate(sc.cosets)]
    return MeasurementBank(np.stack(rows))


# ---------------------------------------------------------------------------
# JSON loaders
# ---------------------------------------------------------------------------

def periodic_scenario_from_json(doc: dict) -> PeriodicSparsityScenario:
    """Build a periodic-sparsity scenario from a parsed JSON document."""
    try:
        return PeriodicSparsityScenario(
            m=int(doc["m"]),
            k=int(doc["k"]),
            s_pattern=frozenset(int(i) for i in doc["s_pattern"]),
            base_period=float(doc.get("base_period", 1.0)),
            n_blocks=int(doc["n_blocks"]),
            seed=int(doc["seed"]),
            p=int(doc["p"]),
            matrix_kind=str(doc.get("matrix_kind", "gaussian")),
        )
    except KeyError as exc:
        raise InvalidInputError(f"periodic scenario config missing field {exc}") from exc


def multiband_scenario_from_json(doc: dict) -> MultibandScenario:
    """Build a multiband scenario from a parsed JSON document."""
    try:
        return MultibandScenario(
            n_bands=int(doc["n_bands"]),
            band_width=float(doc["band_width"]),
            m=int(doc["m"]),
            T=float(doc.get("T", 1.0)),
            cosets=tuple(int(c) for c in doc["cosets"]),
            seed=int(doc["seed"]),
            n_samples=int(doc.get("n_samples", 32)),
        )
    except KeyError as exc:
        raise InvalidInputError(f"multiband scenario config missing field {exc}") from exc
