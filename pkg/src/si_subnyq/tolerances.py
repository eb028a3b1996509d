"""Central record of every numerical threshold used by the library.

All thresholds are artifact decisions for a noiseless, float64 setting; the
recovery theory itself is exact. Keeping them in one frozen record makes
every tolerance discoverable and overridable in one place.
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # Invertibility / conditioning
    cond_tol: float = 1e8              # max condition number of a per-frequency operator
    hermitian_tol: float = 1e-12       # max |M - M^H| entry before an eigensolve
    psd_tol: float = 1e-10             # Q eigenvalues >= -psd_tol * trace(Q)

    # Rank decisions
    rank_rel_tol: float = 1e-10        # relative singular-value / eigenvalue cutoff

    # Solver stopping
    mmv_residual_rel: float = 1e-8     # relative Frobenius residual accepted as "fits"

    # Construction identities
    biorth_tol: float = 1e-10          # ||M_VA - I||_inf after biorthogonalization
    operator_identity_tol: float = 1e-10   # ||M_SA - W A||_inf for synthesized filters
    dual_path_tol: float = 1e-12       # grid product vs filter-bank realization
    round_trip_tol: float = 1e-10      # sample -> reconstruct identity

    # Recovery quality (noiseless)
    recovery_rel_tol: float = 1e-9     # relative coefficient error for exact recovery
    zero_energy_tol: float = 1e-12     # ||d_hat|| below this counts as zero for NMSE

    # Scenario checks
    quadrature_rel_tol: float = 1e-6   # waveform integration vs filter-bank samples
    delay_identity_tol: float = 1e-9   # coset delay-filter identity on the dense grid
    frac_delay_rel_tol: float = 1e-8   # fractional-delay chain vs direct multiply

    def with_overrides(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT_TOLERANCES = Tolerances()
