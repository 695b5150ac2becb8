"""Busy-period Laplace transform of the M/G/inf queue, and the parameters
derived from it: the peakedness p (transform at s = 1/alpha) and the
normalized discriminator eta.

The transform is

    B(s) = 1 + s/lam - 1 / (lam * K(s)),
    K(s) = int_0^inf exp(-s t - lam * Lambda(t)) dt,

with Lambda the integrated survival of the service law.  K is evaluated by
adaptive quadrature on [0, T] plus a certified bracket for the tail: since
Lambda is nondecreasing with limit alpha,

    exp(-rho) e^{-sT}/s  <=  int_T^inf ...  <=  exp(-lam Lambda(T)) e^{-sT}/s,

so T is enlarged until the bracket is narrower than the tolerance and the
midpoint is used.  Correctness never depends on the choice of T, only cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .distributions import QueueConfig, ServiceDistribution, require_coherent
from .errors import AccuracyError

__all__ = [
    "TransformValue",
    "EtaReport",
    "k_integral",
    "busy_laplace",
    "peakedness",
    "peakedness_closed_form",
    "eta",
    "eta_bounds",
]

#: families with a closed-form peakedness, keyed by canonical tag
_CLOSED_FORM = {"g1", "g2", "deterministic", "exponential"}

_FAMILY_ALIASES = {
    "g1": "g1",
    "g2": "g2",
    "d": "deterministic",
    "det": "deterministic",
    "deterministic": "deterministic",
    "m": "exponential",
    "exp": "exponential",
    "exponential": "exponential",
}


@dataclass(frozen=True)
class TransformValue:
    """B(s) with an absolute error estimate; 0 < value <= 1 for s >= 0."""

    s: float
    value: float
    error_bound: float


@dataclass(frozen=True)
class EtaReport:
    """Peakedness and eta for one (family, rho), with the analytic bounds
    1 <= eta <= (e^rho - 1)/(e^rho - rho - 1) they must satisfy."""

    family: str
    rho: float
    p: float
    eta: float
    eta_lower: float
    eta_upper: float
    quadrature_error: float  # absolute bound on p (0 for closed forms)


def k_integral(d: ServiceDistribution, q: QueueConfig, s: float,
               tol: float = 1e-10) -> tuple[float, float]:
    """K(s) = int_0^inf exp(-s t - lam Lambda(t)) dt with |error| <= bound <= tol.

    Raises :class:`AccuracyError` when the tolerance cannot be met.
    """
    require_coherent(d, q)
    if not s > 0:
        raise ValueError(f"transform argument must be positive, got {s}")
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    lam, rho, alpha = q.lam, q.rho, q.alpha

    if math.isfinite(d.support_end):
        # beyond the support Lambda(t) = alpha exactly: tail is exact
        big_t = d.support_end
        tail = math.exp(-rho - s * big_t) / s
        tail_err = 0.0
    else:
        # the bracket narrows exponentially in T however small s is, so cap
        # the head start; quadrature over a needlessly long [0, T] only
        # costs accuracy
        big_t = alpha * max(1.0, min(10.0 / (s * alpha), 16.0))
        width = math.inf
        for _ in range(200):
            deficit = d.integrated_survival_deficit(big_t)
            width = math.exp(-rho - s * big_t) * math.expm1(lam * deficit) / s
            if width <= tol / 2:
                break
            big_t *= 2.0
        else:
            raise AccuracyError("tail bracket did not close", width)
        tail = math.exp(-rho - s * big_t) / s + width / 2.0
        tail_err = width / 2.0

    def integrand(t):
        return math.exp(-s * t - lam * d.integrated_survival(t))

    # anchor points help QUADPACK when 1/s and alpha live on different scales
    pts = sorted({p for p in (alpha, 1.0 / s, 10.0 / s, d.support_end)
                  if 0.0 < p < big_t})
    body, body_err = quad(integrand, 0.0, big_t, points=pts or None,
                          epsabs=tol / 2, epsrel=1e-12, limit=400,
                          full_output=True)[:2]
    bound = body_err + tail_err
    if bound > tol:
        raise AccuracyError("quadrature tolerance not met", bound)
    return body + tail, bound


def busy_laplace(d: ServiceDistribution, q: QueueConfig, s: float,
                 tol: float = 1e-10) -> TransformValue:
    """B(s) = 1 + s/lam - 1/(lam K(s)); s = 0 returns exactly 1."""
    if s < 0:
        raise ValueError(f"transform argument must be nonnegative, got {s}")
    if s == 0:
        require_coherent(d, q)
        return TransformValue(0.0, 1.0, 0.0)
    k, k_err = k_integral(d, q, s, tol)
    value = 1.0 + s / q.lam - 1.0 / (q.lam * k)
    err = k_err / (q.lam * k * (k - k_err)) if k_err < k else math.inf
    return TransformValue(s, value, err)


def peakedness(d: ServiceDistribution, q: QueueConfig,
               tol: float = 1e-10) -> float:
    """p = B(1/alpha), the transform evaluated at the reciprocal mean."""
    return busy_laplace(d, q, 1.0 / q.alpha, tol).value


def peakedness_closed_form(family: str, rho: float) -> float:
    """Closed-form p for the four families that admit one.

    g1: (rho+1)/(e^rho + rho)          g2: rho/(e^rho + rho - 1)
    deterministic: (rho+1)/(e^(rho+1) + rho)
    exponential: (e^rho - rho - 1)/(rho (e^rho - 1))
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    fam = _FAMILY_ALIASES.get(family.strip().lower())
    if fam == "g1":
        return (rho + 1.0) / (math.exp(rho) + rho)
    if fam == "g2":
        return rho / (math.expm1(rho) + rho)
    if fam == "deterministic":
        return (rho + 1.0) / (math.exp(rho + 1.0) + rho)
    if fam == "exponential":
        em1 = math.expm1(rho)
        return (em1 - rho) / (rho * em1)
    raise ValueError(f"no closed-form peakedness for family {family!r}")


def eta(d: ServiceDistribution, q: QueueConfig, tol: float = 1e-10) -> EtaReport:
    """eta = p * rho / (e^rho - rho - 1) + 1.

    Uses the closed-form p when the family permits, quadrature otherwise;
    the quadrature error bound on p is reported alongside.
    """
    require_coherent(d, q)
    rho = q.rho
    if d.family in _CLOSED_FORM:
        p, p_err = peakedness_closed_form(d.family, rho), 0.0
    else:
        tv = busy_laplace(d, q, 1.0 / q.alpha, tol)
        p, p_err = tv.value, tv.error_bound
    lower, upper = eta_bounds(rho)
    denom = math.expm1(rho) - rho
    return EtaReport(family=d.family, rho=rho, p=p,
                     eta=p * rho / denom + 1.0,
                     eta_lower=lower, eta_upper=upper,
                     quadrature_error=p_err)


def eta_bounds(rho: float) -> tuple[float, float]:
    """(1, (e^rho - 1)/(e^rho - rho - 1)); the upper bound tends to 1."""
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    em1 = math.expm1(rho)
    return 1.0, em1 / (em1 - rho)
