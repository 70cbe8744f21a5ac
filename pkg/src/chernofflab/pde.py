"""Monotone finite-difference viscosity solvers, the independent PDE oracle.

Two explicit marches on the 1D grid:

* ``solve_hj``     u_t = H(u_x) by Lax-Friedrichs with dissipation at least
                   max |H'| over the gradient range in play,
* ``solve_g_heat`` u_t = G(u_xx) for fully nonlinear second-order flows
                   G(a) = max_l (lam_l^2 a / 2 - cost_l) + Sigma a / 2.

Both schemes are monotone by their CFL restriction, freeze the two outermost
node layers, and are first-order accurate; they cross-check the Chernoff
limits without sharing any code path with them.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InputError


@dataclass(frozen=True)
class Hamiltonian1:
    """Convex first-order Hamiltonian sampled on a gradient grid."""

    p_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if p.ndim != 1 or p.shape != v.shape or p.shape[0] < 2:
            raise InputError("Hamiltonian needs matching 1D grids")
        if np.any(np.diff(p) <= 0):
            raise InputError("gradient grid must be strictly increasing")
        slopes = np.diff(v) / np.diff(p)
        if np.any(np.diff(slopes) < -1e-8):
            raise InputError("Hamiltonian must be convex along its grid")
        p = p.copy(); v = v.copy()
        p.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "p_grid", p)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_model(cls, model, p_grid):
        """Sample H(p) = E[p xi] from an expectation model."""
        p = np.asarray(p_grid, dtype=float)
        return cls(p, np.array([model.expect_linear(pp) for pp in p]))

    @classmethod
    def from_callable(cls, fn, p_grid):
        p = np.asarray(p_grid, dtype=float)
        return cls(p, np.asarray(fn(p), dtype=float))

    def __call__(self, p):
        return np.interp(p, self.p_grid, self.values)

    def max_slope(self, p_lo, p_hi):
        """Largest |H'| over [p_lo, p_hi], from the grid slopes."""
        slopes = np.diff(self.values) / np.diff(self.p_grid)
        mids = 0.5 * (self.p_grid[:-1] + self.p_grid[1:])
        mask = (mids >= p_lo) & (mids <= p_hi)
        if not np.any(mask):
            mask[:] = True
        return float(np.max(np.abs(slopes[mask])))


@dataclass(frozen=True)
class Hamiltonian2:
    """Second-order nonlinearity G(a) = max_l (lam_l^2 a/2 - cost_l) + Sigma a/2."""

    lam_grid: np.ndarray
    costs: np.ndarray
    sigma2: float = 0.0

    def __post_init__(self):
        lam = np.asarray(self.lam_grid, dtype=float)
        cost = np.asarray(self.costs, dtype=float)
        if lam.shape != cost.shape or lam.ndim != 1:
            raise InputError("lambda grid and costs must be matching 1D arrays")
        fin = np.isfinite(cost)
        if not np.any(fin):
            raise InputError("all shift costs are infinite")
        lam = lam[fin].copy()
        cost = cost[fin].copy()
        if not np.any(np.isclose(cost, 0.0)):
            raise InputError("G(0) = 0 requires a zero-cost lambda entry")
        lam.flags.writeable = False
        cost.flags.writeable = False
        object.__setattr__(self, "lam_grid", lam)
        object.__setattr__(self, "costs", cost)

    @classmethod
    def from_model(cls, measure, penalty, lam_grid):
        lam = np.asarray(lam_grid, dtype=float)
        _, sig = measure.mean_and_cov()
        return cls(lam, np.asarray(penalty(np.abs(lam)), dtype=float),
                   float(sig[0, 0]))

    def __call__(self, a):
        a = np.asarray(a, dtype=float)
        parts = 0.5 * self.lam_grid[:, None] ** 2 * a.ravel()[None, :] - self.costs[:, None]
        out = parts.max(axis=0) + 0.5 * self.sigma2 * a.ravel()
        return out.reshape(a.shape) if a.ndim else float(out[0])

    @property
    def max_diffusion(self):
        return 0.5 * float(np.max(self.lam_grid ** 2)) + 0.5 * self.sigma2


def solve_hj(ham, f, t, safety=0.5):
    """March u_t = H(u_x) from u(0) = f up to time t (monotone Lax-Friedrichs).

    The dissipation is max |H'| over the whole sampled gradient range (the
    Hamiltonian saturates beyond it) and the time step obeys
    dt <= safety * h / (2 alpha), so the scheme is monotone for arbitrary
    data, including the artificial frozen-boundary layer.
    """
    if t < 0:
        raise InputError("solve_hj requires t >= 0")
    if f.grid.dimension != 1:
        raise InputError("the PDE oracle is one-dimensional")
    if t == 0.0:
        return f
    h = f.grid.spacing
    alpha = max(ham.max_slope(ham.p_grid[0], ham.p_grid[-1]), 1e-8)
    dt = safety * h / (2.0 * alpha)
    steps = max(int(np.ceil(t / dt)), 1)
    dt = t / steps
    vals = _kernels.lax_friedrichs(f.values, h, dt, steps,
                                   ham.p_grid, ham.values, alpha)
    return f.replace_values(vals)


def solve_g_heat(g2, f, t, safety=0.5):
    """March u_t = G(u_xx) from u(0) = f up to time t (explicit monotone)."""
    if t < 0:
        raise InputError("solve_g_heat requires t >= 0")
    if f.grid.dimension != 1:
        raise InputError("the PDE oracle is one-dimensional")
    if t == 0.0:
        return f
    h = f.grid.spacing
    diff = max(g2.max_diffusion, 1e-8)
    dt = safety * h * h / (2.0 * diff)
    steps = max(int(np.ceil(t / dt)), 1)
    dt = t / steps
    vals = _kernels.g_heat(f.values, h, dt, steps, g2.lam_grid, g2.costs,
                           0.5 * g2.sigma2)
    return f.replace_values(vals)
