"""Busy-period analysis toolkit for the M/G/inf queue.

The busy period B of an infinite-server queue with Poisson arrivals has a
known Laplace transform but, for most service laws, intractable moments.
This package computes the transform by certified quadrature, the moments
by the exact recurrence, the peakedness p = B(1/alpha) and its normalized
form eta (which discriminates service-time distributions while staying
inside simple analytic bounds), the exact M/D/inf specializations
including the busy-period density, and a vectorized Monte Carlo oracle
for independent verification.
"""

from .distributions import (Deterministic, Exponential, G1, G2,
                            PowerFunction, QueueConfig, ServiceDistribution,
                            from_spec)
from .errors import AccuracyError, CancellationError
from .mdinf import MDDensity, md_density, md_laplace, md_moments
from .moments import (MomentTable, busy_moments, c_n_zero, sathe_bounds,
                      second_moment_integral)
from .sim import (SimResult, estimate, heavy_traffic_check,
                  sample_busy_period, sample_busy_periods)
from .transform import (EtaReport, TransformValue, busy_laplace, eta,
                        eta_bounds, k_integral, peakedness,
                        peakedness_closed_form)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "CancellationError",
    "Deterministic",
    "EtaReport",
    "Exponential",
    "G1",
    "G2",
    "MDDensity",
    "MomentTable",
    "PowerFunction",
    "QueueConfig",
    "ServiceDistribution",
    "SimResult",
    "busy_laplace",
    "busy_moments",
    "c_n_zero",
    "estimate",
    "eta",
    "eta_bounds",
    "from_spec",
    "heavy_traffic_check",
    "k_integral",
    "md_density",
    "md_laplace",
    "md_moments",
    "peakedness",
    "peakedness_closed_form",
    "sample_busy_period",
    "sample_busy_periods",
    "sathe_bounds",
    "second_moment_integral",
]
