"""Service-time distribution catalog for the M/G/inf queue.

Every law exposes the quantities the busy-period machinery needs in closed
form: the CDF G(t), the survival 1 - G(t), the integrated survival
Lambda(t) = int_0^t [1 - G(v)] dv (which increases to the mean alpha), the
quantile function, and inverse-CDF sampling.

Families:

* ``Deterministic(alpha)``  -- unit step at ``alpha``.
* ``Exponential(alpha)``    -- rate ``1/alpha``.
* ``PowerFunction(c)``      -- G(t) = t**c on [0, 1], mean c/(c+1).
* ``G1(lam, rho)``          -- atom exp(-rho) at 0, then a logistic-type
  continuous part; the matching busy period is exponential with an atom
  at the origin.
* ``G2(lam, rho)``          -- continuous law whose busy period is exactly
  exponential.

G1 and G2 are parameterized by the queue itself (arrival rate ``lam`` and
traffic intensity ``rho``); their mean is rho/lam by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QueueConfig",
    "ServiceDistribution",
    "Deterministic",
    "Exponential",
    "PowerFunction",
    "G1",
    "G2",
    "from_spec",
    "require_coherent",
]


@dataclass(frozen=True)
class QueueConfig:
    """Arrival rate ``lam`` and traffic intensity ``rho``; alpha = rho/lam."""

    lam: float
    rho: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"arrival rate must be positive, got {self.lam}")
        if not self.rho > 0:
            raise ValueError(f"traffic intensity must be positive, got {self.rho}")

    @property
    def alpha(self) -> float:
        return self.rho / self.lam


def _as_time(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise ValueError("time must be nonnegative")
    return arr


def _as_prob(u):
    arr = np.asarray(u, dtype=float)
    if np.any((arr < 0) | (arr >= 1)):
        raise ValueError("probability level must lie in [0, 1)")
    return arr


def _match(t, out):
    # scalar in, scalar out
    return float(out) if np.ndim(t) == 0 else out


class ServiceDistribution:
    """Base class: immutable after construction, safe to share across tasks.

    Sampling takes an externally owned ``numpy.random.Generator`` so that
    concurrent users can keep one independent stream each.
    """

    family: str = ""
    alpha: float
    #: end of the support; ``inf`` for unbounded laws.  Quadratures use it
    #: to truncate exactly.
    support_end: float = math.inf

    def cdf(self, t):
        """G(t); vectorized, rejects negative t."""
        raise NotImplementedError

    def survival(self, t):
        """1 - G(t), in a cancellation-free form per family."""
        raise NotImplementedError

    def integrated_survival(self, t):
        """Lambda(t) = int_0^t [1 - G(v)] dv, closed form."""
        raise NotImplementedError

    def integrated_survival_deficit(self, t):
        """alpha - Lambda(t), computed without cancellation.

        This is int_t^inf [1 - G(v)] dv; the transform and second-moment
        quadratures need it accurately when it is many orders of magnitude
        below alpha.
        """
        raise NotImplementedError

    def quantile(self, u):
        """inf{t : G(t) >= u} for u in [0, 1)."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-CDF sampling: quantile applied to uniform variates."""
        return self.quantile(rng.random(size))

    def second_moment(self) -> float:
        """E[S^2] of the service time."""
        raise NotImplementedError

    def gamma_s(self) -> float:
        """Coefficient of variation of the service time."""
        var = self.second_moment() - self.alpha**2
        return math.sqrt(max(var, 0.0)) / self.alpha

    def spec(self) -> str:
        """Canonical spec string, re-parseable by :func:`from_spec`."""
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.spec()!r})"


class Deterministic(ServiceDistribution):
    """Constant service time ``alpha``."""

    family = "deterministic"

    def __init__(self, alpha: float):
        if not alpha > 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        self.alpha = float(alpha)
        self.support_end = self.alpha

    def cdf(self, t):
        arr = _as_time(t)
        return _match(t, np.where(arr >= self.alpha, 1.0, 0.0))

    def survival(self, t):
        arr = _as_time(t)
        return _match(t, np.where(arr < self.alpha, 1.0, 0.0))

    def integrated_survival(self, t):
        arr = _as_time(t)
        return _match(t, np.minimum(arr, self.alpha))

    def integrated_survival_deficit(self, t):
        arr = _as_time(t)
        return _match(t, np.maximum(self.alpha - arr, 0.0))

    def quantile(self, u):
        arr = _as_prob(u)
        return _match(u, np.where(arr > 0, self.alpha, 0.0))

    def second_moment(self):
        return self.alpha**2

    def spec(self):
        return f"det:alpha={self.alpha:g}"


class Exponential(ServiceDistribution):
    """Exponential service with mean ``alpha``."""

    family = "exponential"

    def __init__(self, alpha: float):
        if not alpha > 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        self.alpha = float(alpha)

    def cdf(self, t):
        arr = _as_time(t)
        return _match(t, -np.expm1(-arr / self.alpha))

    def survival(self, t):
        arr = _as_time(t)
        return _match(t, np.exp(-arr / self.alpha))

    def integrated_survival(self, t):
        arr = _as_time(t)
        return _match(t, -self.alpha * np.expm1(-arr / self.alpha))

    def integrated_survival_deficit(self, t):
        arr = _as_time(t)
        return _match(t, self.alpha * np.exp(-arr / self.alpha))

    def quantile(self, u):
        arr = _as_prob(u)
        return _match(u, -self.alpha * np.log1p(-arr))

    def second_moment(self):
        return 2.0 * self.alpha**2

    def spec(self):
        return f"exp:alpha={self.alpha:g}"


class PowerFunction(ServiceDistribution):
    """G(t) = t**c on [0, 1]; mean alpha = c/(c+1)."""

    family = "power"

    def __init__(self, c: float):
        if not c > 0:
            raise ValueError(f"power exponent c must be positive, got {c}")
        self.c = float(c)
        self.alpha = self.c / (self.c + 1.0)
        self.support_end = 1.0

    def cdf(self, t):
        arr = _as_time(t)
        return _match(t, np.minimum(arr, 1.0) ** self.c)

    def survival(self, t):
        arr = _as_time(t)
        return _match(t, 1.0 - np.minimum(arr, 1.0) ** self.c)

    def integrated_survival(self, t):
        arr = np.minimum(_as_time(t), 1.0)
        return _match(t, arr - arr ** (self.c + 1.0) / (self.c + 1.0))

    def integrated_survival_deficit(self, t):
        arr = np.minimum(_as_time(t), 1.0)
        out = self.alpha - arr + arr ** (self.c + 1.0) / (self.c + 1.0)
        return _match(t, np.maximum(out, 0.0))

    def quantile(self, u):
        arr = _as_prob(u)
        return _match(u, arr ** (1.0 / self.c))

    def second_moment(self):
        # quadrature route, cross-checked against c/(c+2) in the tests
        from scipy.integrate import quad

        val, _ = quad(lambda t: 2.0 * t * (1.0 - t**self.c), 0.0, 1.0,
                      epsabs=1e-12, epsrel=1e-12)
        return val

    def spec(self):
        return f"pow:c={self.c:g}"


class G1(ServiceDistribution):
    """Logistic-type law with an atom exp(-rho) at the origin.

    G(t) = exp(-rho) / (exp(-rho) + (1 - exp(-rho)) exp(-lam t)); the mean
    is exactly rho/lam, which the tests verify by quadrature.
    """

    family = "g1"

    def __init__(self, lam: float, rho: float, alpha: float | None = None):
        if not lam > 0:
            raise ValueError(f"lam must be positive, got {lam}")
        if not rho > 0:
            raise ValueError(f"rho must be positive, got {rho}")
        self.lam = float(lam)
        self.rho = float(rho)
        self.alpha = self.rho / self.lam
        if alpha is not None and not math.isclose(alpha, self.alpha, rel_tol=1e-9):
            raise ValueError(
                f"alpha={alpha} inconsistent with rho/lam={self.alpha}")
        self._atom = math.exp(-self.rho)
        self._q = -math.expm1(-self.rho)  # 1 - exp(-rho)
        self._em1 = math.expm1(self.rho)  # exp(rho) - 1

    def cdf(self, t):
        arr = _as_time(t)
        e = np.exp(-self.lam * arr)
        return _match(t, self._atom / (self._atom + self._q * e))

    def survival(self, t):
        arr = _as_time(t)
        e = np.exp(-self.lam * arr)
        return _match(t, self._q * e / (self._atom + self._q * e))

    def integrated_survival(self, t):
        arr = _as_time(t)
        out = self.alpha - np.log1p(self._em1 * np.exp(-self.lam * arr)) / self.lam
        return _match(t, out)

    def integrated_survival_deficit(self, t):
        arr = _as_time(t)
        return _match(t, np.log1p(self._em1 * np.exp(-self.lam * arr)) / self.lam)

    def quantile(self, u):
        arr = _as_prob(u)
        out = np.zeros_like(arr)
        above = arr > self._atom
        if np.any(above):
            ua = arr[above] if arr.ndim else arr
            # G(t) = u  =>  t = [rho + log(u (1-e^-rho) / (1-u))] / lam
            ta = (self.rho + np.log(ua * self._q / (1.0 - ua))) / self.lam
            if arr.ndim:
                out[above] = ta
            else:
                out = ta
        return _match(u, out)

    def second_moment(self):
        from scipy.integrate import quad

        val, _ = quad(lambda t: 2.0 * t * self.survival(t), 0.0, np.inf,
                      epsabs=1e-10, epsrel=1e-10, limit=200)
        return val

    def spec(self):
        return f"g1:lambda={self.lam:g},rho={self.rho:g}"


class G2(ServiceDistribution):
    """Continuous law whose busy period is exactly exponential.

    Survival 1 - G(t) = 1 / ((1 - exp(-rho)) + exp(-rho) exp(k t)) with
    k = lam / (1 - exp(-rho)); the mean is exactly rho/lam.
    """

    family = "g2"

    def __init__(self, lam: float, rho: float, alpha: float | None = None):
        if not lam > 0:
            raise ValueError(f"lam must be positive, got {lam}")
        if not rho > 0:
            raise ValueError(f"rho must be positive, got {rho}")
        self.lam = float(lam)
        self.rho = float(rho)
        self.alpha = self.rho / self.lam
        if alpha is not None and not math.isclose(alpha, self.alpha, rel_tol=1e-9):
            raise ValueError(
                f"alpha={alpha} inconsistent with rho/lam={self.alpha}")
        self._atom0 = math.exp(-self.rho)
        self._q = -math.expm1(-self.rho)   # 1 - exp(-rho)
        self._k = self.lam / self._q
        self._em1 = math.expm1(self.rho)   # exp(rho) - 1

    def cdf(self, t):
        return _match(t, 1.0 - self.survival(_as_time(t)))

    def survival(self, t):
        arr = _as_time(t)
        # 1/(q + e^{-rho} e^{kt}) written overflow-free
        e = np.exp(-self._k * arr)
        return _match(t, e / (self._q * e + self._atom0))

    def integrated_survival(self, t):
        arr = _as_time(t)
        out = self.alpha - np.log1p(self._em1 * np.exp(-self._k * arr)) / self.lam
        return _match(t, out)

    def integrated_survival_deficit(self, t):
        arr = _as_time(t)
        return _match(t, np.log1p(self._em1 * np.exp(-self._k * arr)) / self.lam)

    def quantile(self, u):
        arr = _as_prob(u)
        # 1 - G = 1/(q + e^{-rho} e^{kt})  =>  t = [rho + log(u/(1-u) q + u)] ... solved:
        # q + e^{-rho} e^{kt} = 1/(1-u)  =>  t = (1/k) [rho + log(1/(1-u) - q)]
        out = (self.rho + np.log(1.0 / (1.0 - arr) - self._q)) / self._k
        return _match(u, np.maximum(out, 0.0))

    def second_moment(self):
        from scipy.integrate import quad

        val, _ = quad(lambda t: 2.0 * t * self.survival(t), 0.0, np.inf,
                      epsabs=1e-10, epsrel=1e-10, limit=200)
        return val

    def spec(self):
        return f"g2:lambda={self.lam:g},rho={self.rho:g}"


_FAMILY_BUILDERS = {
    "det": (Deterministic, {"alpha"}),
    "exp": (Exponential, {"alpha"}),
    "pow": (PowerFunction, {"c"}),
    "g1": (G1, {"lambda", "rho", "alpha"}),
    "g2": (G2, {"lambda", "rho", "alpha"}),
}


def from_spec(spec: str) -> ServiceDistribution:
    """Parse a distribution spec string.

    Format: ``det:alpha=1.0``, ``exp:alpha=1.0``, ``pow:c=0.5``,
    ``g1:lambda=1.0,rho=1.0``, ``g2:lambda=1.0,rho=1.0``.
    """
    head, _, tail = spec.strip().partition(":")
    key = head.strip().lower()
    if key not in _FAMILY_BUILDERS:
        raise ValueError(
            f"unknown family {head!r}; expected one of {sorted(_FAMILY_BUILDERS)}")
    cls, allowed = _FAMILY_BUILDERS[key]
    kwargs = {}
    if tail:
        for item in tail.split(","):
            name, _, value = item.partition("=")
            name = name.strip().lower()
            if name not in allowed:
                raise ValueError(f"parameter {name!r} not valid for {key!r}")
            try:
                kwargs[name] = float(value)
            except ValueError:
                raise ValueError(f"bad numeric value in {item!r}") from None
    if "lambda" in kwargs:
        kwargs["lam"] = kwargs.pop("lambda")
    try:
        return cls(**kwargs)
    except TypeError:
        raise ValueError(f"missing required parameters in {spec!r}") from None


def require_coherent(d: ServiceDistribution, q: QueueConfig) -> None:
    """Reject (distribution, queue) pairs whose means disagree.

    Every formula downstream assumes rho = lam * E[S]; a mismatched pair
    would silently produce nonsense.
    """
    if not math.isclose(d.alpha, q.alpha, rel_tol=1e-9, abs_tol=1e-15):
        raise ValueError(
            f"service mean {d.alpha} inconsistent with queue rho/lam = {q.alpha}")
    if isinstance(d, (G1, G2)):
        if not (math.isclose(d.lam, q.lam, rel_tol=1e-9)
                and math.isclose(d.rho, q.rho, rel_tol=1e-9)):
            raise ValueError(
                f"{d.family} is parameterized by (lam={d.lam}, rho={d.rho}) "
                f"but the queue has (lam={q.lam}, rho={q.rho})")
