"""Exact M/D/inf (constant service) specializations.

With deterministic service the busy period admits a closed-form transform

    B(s) = 1 + (1/lam) (s - (s + lam) s / (lam e^{-(s+lam) alpha} + s)),

a quadrature-free moment recurrence built on

    C^(0)(0) = 1 - e^{-rho},
    C^(n)(0) = -e^{-rho} (-alpha)^n - (n/lam) C^(n-1)(0),

and an explicit busy-period law: a point mass e^{-rho} at t = alpha plus a
geometric mixture of convolution powers.  Equivalently,

    B  =  alpha + X_1 + ... + X_N,

where P(N = n) = e^{-rho} (1 - e^{-rho})^n and the X_i are i.i.d. with
density lam e^{-lam x} / (1 - e^{-rho}) on [0, alpha].  The density of the
continuous part is computed by repeated trapezoid-grid convolution of the
X density, truncating once the neglected geometric weight drops below the
requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import QueueConfig
from .moments import MomentTable, moments_from_c, sathe_bounds
from .transform import TransformValue

__all__ = ["MDDensity", "md_laplace", "md_moments", "md_density",
           "write_density_csv"]


@dataclass(frozen=True)
class MDDensity:
    """Busy-period law of M/D/inf: atom at alpha plus a gridded density.

    ``density_values[i]`` is the continuous-part density at ``grid[i]``
    (the grid starts at alpha, step ``grid[1] - grid[0]``).  At abscissae
    where the density jumps, the stored value is the midpoint of the
    one-sided limits, which is the right convention for trapezoid sums.
    ``tail_mass_bound`` bounds the probability not represented on the grid
    (dropped mixture terms plus mass beyond the last point).
    """

    alpha: float
    rho: float
    atom_mass: float
    grid: np.ndarray
    density_values: np.ndarray
    n_terms: int
    tail_mass_bound: float

    def total_mass(self) -> float:
        """atom + trapezoid integral of the continuous part."""
        return self.atom_mass + float(np.trapz(self.density_values, self.grid))

    def mean(self) -> float:
        return self.atom_mass * self.alpha + float(
            np.trapz(self.grid * self.density_values, self.grid))

    def laplace(self, s: float) -> float:
        """Numerical transform of the gridded law (atom term included)."""
        return self.atom_mass * math.exp(-s * self.alpha) + float(
            np.trapz(np.exp(-s * self.grid) * self.density_values, self.grid))


def md_laplace(s: float, q: QueueConfig) -> TransformValue:
    """Closed-form busy-period transform; exact, no quadrature."""
    if s < 0:
        raise ValueError(f"transform argument must be nonnegative, got {s}")
    lam, alpha = q.lam, q.alpha
    value = 1.0 + (s - (s + lam) * s
                   / (lam * math.exp(-(s + lam) * alpha) + s)) / lam
    return TransformValue(s, value, 0.0)


def md_moments(q: QueueConfig, n_max: int = 2) -> MomentTable:
    """Exact moments from the closed C^(n)(0) recurrence (deterministic
    service has gamma_s = 0, so Sathe's bounds pinch to the variance)."""
    if n_max < 1 or n_max != int(n_max):
        raise ValueError(f"n_max must be a positive integer, got {n_max}")
    rho, lam, alpha = q.rho, q.lam, q.alpha
    atom = math.exp(-rho)
    c = [-math.expm1(-rho)]
    for n in range(1, n_max):
        c.append(-atom * (-alpha) ** n - (n / lam) * c[n - 1])
    moments = moments_from_c(c, rho, lam, n_max)
    if n_max >= 2:
        variance = moments[1] - moments[0] ** 2
        lo, hi = sathe_bounds(rho, lam, 0.0)
    else:
        variance = lo = hi = None
    return MomentTable(n_max=n_max, raw_moments=moments, variance=variance,
                       sathe_lower=lo, sathe_upper=hi, gamma_s=0.0)


def md_density(q: QueueConfig, t_max: float | None = None,
               grid_step: float | None = None, tol: float = 1e-6) -> MDDensity:
    """Busy-period density as atom + truncated geometric convolution mixture.

    Keeps mixture terms up to the smallest n with (1-e^-rho)^(n+1) < tol.
    Defaults: ``grid_step = alpha/512`` and ``t_max`` about twenty mean
    overshoots past alpha.
    """
    rho, lam, alpha = q.rho, q.lam, q.alpha
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    atom = math.exp(-rho)
    weight = -math.expm1(-rho)            # 1 - e^-rho, the geometric ratio
    mean_n = math.expm1(rho)              # E[N]
    mean_x = 1.0 / lam - alpha * atom / weight
    if grid_step is None:
        grid_step = alpha / 512.0
    if t_max is None:
        t_max = alpha + max(20.0 * mean_n * mean_x, 4.0 * alpha)
    if not grid_step > 0:
        raise ValueError(f"grid_step must be positive, got {grid_step}")
    if grid_step > alpha / 16.0:
        raise ValueError(
            f"grid_step {grid_step} too coarse; need at most alpha/16 = {alpha / 16}")
    if not t_max > alpha:
        raise ValueError(f"t_max must exceed alpha={alpha}, got {t_max}")

    h = float(grid_step)
    n_pts = int(math.ceil((t_max - alpha) / h))
    x = h * np.arange(n_pts + 1)

    # X density lam e^{-lam x}/(1-e^-rho) on [0, alpha]; midpoint value at
    # the jump when alpha lands on the grid.
    f = np.where(x <= alpha + 1e-12 * alpha,
                 lam * np.exp(-lam * x) / weight, 0.0)
    i_jump = int(round(alpha / h))
    if i_jump <= n_pts and abs(i_jump * h - alpha) <= 1e-9 * alpha:
        f[i_jump] = 0.5 * lam * math.exp(-lam * alpha) / weight
        f[i_jump + 1:] = 0.0

    n_terms = 1
    while weight ** (n_terms + 1) >= tol:
        n_terms += 1

    dens = np.zeros(n_pts + 1)
    deficit = 0.0                          # retained mass missing from grid
    g = f.copy()
    term_weight = atom
    for _ in range(n_terms):
        term_weight *= weight
        dens += term_weight * g
        deficit += term_weight * max(0.0, 1.0 - float(np.trapz(g, dx=h)))
        # trapezoid-corrected grid convolution with f
        conv = np.convolve(g, f)[:n_pts + 1] - 0.5 * (g[0] * f[:n_pts + 1]
                                                      + f[0] * g[:n_pts + 1])
        g = h * conv

    return MDDensity(alpha=alpha, rho=rho, atom_mass=atom,
                     grid=alpha + x, density_values=dens, n_terms=n_terms,
                     tail_mass_bound=weight ** (n_terms + 1) + deficit)


def write_density_csv(dens: MDDensity, path) -> None:
    """Two-column CSV (t, b_t) with a leading header line carrying the atom."""

    def _dump(fh):
        fh.write(f"# alpha={dens.alpha:.10g} rho={dens.rho:.10g} "
                 f"atom_mass={dens.atom_mass:.10e} n_terms={dens.n_terms} "
                 f"tail_mass_bound={dens.tail_mass_bound:.3e}\n")
        fh.write("t,b_t\n")
        for t, b in zip(dens.grid, dens.density_values):
            fh.write(f"{t:.10g},{b:.10e}\n")

    if hasattr(path, "write"):
        _dump(path)
    else:
        with open(path, "w") as fh:
            _dump(fh)
