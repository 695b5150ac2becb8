"""Busy-period moments E[B^n] and Sathe's variance bounds.

The moments come from the recurrence

    E[B^n] = (-1)^(n+1) { (e^rho/lam) n C^(n-1)(0)
                          - e^rho sum_{p=1}^{n-1} (-1)^(n-p) C(n,p) E[B^(n-p)] C^(p)(0) }

driven by the integrals

    C^(n)(0) = int_0^inf (-t)^n exp(-lam Lambda(t)) lam (1 - G(t)) dt.

n = 1 gives E[B] = (e^rho - 1)/lam for every service law; higher moments
depend on the whole law.  The second moment also has the integral form

    E[B^2] = (2 e^rho / lam) int_0^inf (exp(lam (alpha - Lambda(t))) - 1) dt,

which follows from the recurrence at n = 2 by integration by parts and
serves as an independent route for cross-checking.

The recurrence alternates in sign, so sums are accumulated with exact
(compensated) summation and a cancellation alarm trips rather than return
noise once more than 8 leading digits are lost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .distributions import QueueConfig, ServiceDistribution, require_coherent
from .errors import AccuracyError, CancellationError

__all__ = [
    "MomentTable",
    "c_n_zero",
    "busy_moments",
    "second_moment_integral",
    "sathe_bounds",
]

_CANCEL_DIGITS = 8.0


@dataclass(frozen=True)
class MomentTable:
    """E[B^k] for k = 1..n_max plus variance and its Sathe bracket.

    ``variance`` and the bounds are filled when n_max >= 2; ``gamma_s`` is
    the service-time coefficient of variation used by the bounds.
    """

    n_max: int
    raw_moments: tuple[float, ...]
    variance: float | None
    sathe_lower: float | None
    sathe_upper: float | None
    gamma_s: float

    @property
    def mean(self) -> float:
        return self.raw_moments[0]


def moments_from_c(c: list[float], rho: float, lam: float,
                   n_max: int) -> tuple[float, ...]:
    """Run the E[B^n] recurrence on precomputed C^(0..n_max-1)(0) values.

    Sums are accumulated with math.fsum (exact); the cancellation alarm
    trips when the largest addend exceeds the total by more than
    10**_CANCEL_DIGITS.
    """
    e_rho = math.exp(rho)
    e = [1.0]  # E[B^0]
    for n in range(1, n_max + 1):
        terms = [e_rho / lam * n * c[n - 1]]
        for p in range(1, n):
            terms.append(-e_rho * (-1.0) ** (n - p) * math.comb(n, p)
                         * e[n - p] * c[p])
        total = math.fsum(terms)
        peak = max(abs(t) for t in terms)
        if total == 0.0 or math.log10(peak / abs(total)) > _CANCEL_DIGITS:
            raise CancellationError(
                f"moment recurrence unstable at n={n} (rho={rho})",
                math.inf if total == 0.0 else math.log10(peak / abs(total)))
        e.append((-1.0) ** (n + 1) * total)
    return tuple(e[1:])


def c_n_zero(d: ServiceDistribution, q: QueueConfig, n: int,
             tol: float = 1e-10) -> float:
    """C^(n)(0) by adaptive quadrature.

    Finite-support laws integrate over [0, support_end] exactly (the
    survival factor kills the integrand beyond); the others ride the
    exponential decay of the survival out to infinity.
    """
    require_coherent(d, q)
    if n < 0 or n != int(n):
        raise ValueError(f"moment order must be a nonnegative integer, got {n}")
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    lam = q.lam
    sign = -1.0 if n % 2 else 1.0

    def integrand(t):
        return (t**n * math.exp(-lam * d.integrated_survival(t))
                * lam * d.survival(t))

    upper = d.support_end if math.isfinite(d.support_end) else math.inf
    val, err = quad(integrand, 0.0, upper, epsabs=tol, epsrel=1e-12,
                    limit=400, full_output=True)[:2]
    if err > tol:
        raise AccuracyError(f"C^({n})(0) quadrature tolerance not met", err)
    return sign * val


def busy_moments(d: ServiceDistribution, q: QueueConfig, n_max: int = 2,
                 tol: float = 1e-10) -> MomentTable:
    """E[B^n] for n = 1..n_max via the recurrence, plus variance bounds.

    n_max beyond ~5 is increasingly ill-conditioned for large rho; the
    cancellation alarm raises :class:`CancellationError` before noise is
    returned.
    """
    require_coherent(d, q)
    if n_max < 1 or n_max != int(n_max):
        raise ValueError(f"n_max must be a positive integer, got {n_max}")
    rho, lam = q.rho, q.lam
    c = [c_n_zero(d, q, k, tol) for k in range(n_max)]
    moments = moments_from_c(c, rho, lam, n_max)
    gamma = d.gamma_s()
    if n_max >= 2:
        variance = moments[1] - moments[0] ** 2
        lo, hi = sathe_bounds(rho, lam, gamma)
    else:
        variance = lo = hi = None
    return MomentTable(n_max=n_max, raw_moments=moments, variance=variance,
                       sathe_lower=lo, sathe_upper=hi, gamma_s=gamma)


def second_moment_integral(d: ServiceDistribution, q: QueueConfig,
                           tol: float = 1e-8) -> float:
    """E[B^2] = (2 e^rho / lam) int_0^inf expm1(lam (alpha - Lambda(t))) dt.

    Independent of the recurrence route; ``tol`` is absolute on the result.
    """
    require_coherent(d, q)
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    rho, lam = q.rho, q.lam
    scale = 2.0 * math.exp(rho) / lam

    def integrand(t):
        return math.expm1(lam * d.integrated_survival_deficit(t))

    upper = d.support_end if math.isfinite(d.support_end) else math.inf
    val, err = quad(integrand, 0.0, upper, epsabs=tol / scale, epsrel=1e-12,
                    limit=400, full_output=True)[:2]
    if err * scale > tol:
        raise AccuracyError("second-moment quadrature tolerance not met",
                            err * scale)
    return scale * val


def sathe_bounds(rho: float, lam: float, gamma_s: float) -> tuple[float, float]:
    """Variance bracket depending only on rho, lam and the service
    coefficient of variation:

        lower = max[e^{2 rho} + e^rho rho^2 g^2 - 2 rho e^rho - 1, 0] / lam^2
        upper = [2 e^rho (g^2 + 1)(e^rho - 1 - rho) - (e^rho - 1)^2] / lam^2

    At gamma_s = 0 the two coincide at e^{2 rho} - 2 rho e^rho - 1.
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    if gamma_s < 0:
        raise ValueError(f"gamma_s must be nonnegative, got {gamma_s}")
    e_rho = math.exp(rho)
    g2 = gamma_s**2
    lower = max(e_rho**2 + e_rho * rho**2 * g2 - 2.0 * rho * e_rho - 1.0, 0.0)
    upper = (2.0 * e_rho * (g2 + 1.0) * (math.expm1(rho) - rho)
             - math.expm1(rho) ** 2)
    return lower / lam**2, upper / lam**2
