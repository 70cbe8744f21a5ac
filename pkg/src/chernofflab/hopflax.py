"""Closed-form limit semigroups: the Hopf-Lax formula and envelope bounds.

These are the analytic oracles that the Chernoff engine is checked against:
first-order limits admit the representation

    (S(t) f)(x) = sup_y ( f(x + t y) - phi(y) t )

with a convex coercive rate phi, and any two convex bounds H_- <= H <= H_+
on the linear-payoff expectation sandwich the limit between the Hopf-Lax
flows of their conjugates.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridTooSmallError, InputError
from .expectations import legendre
_CHUNK = 256


@dataclass(frozen=True)
class RateFunction:
    """Convex rate on a 1D (or radial) grid, +inf marking infinite cost."""

    grid: np.ndarray
    values: np.ndarray
    radial: bool = False
    directions: int = 16

    def __post_init__(self):
        y = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if y.ndim != 1 or y.shape != v.shape:
            raise InputError("rate function needs matching 1D grids")
        if np.any(np.diff(y) <= 0):
            raise InputError("rate grid must be strictly increasing")
        fin = np.isfinite(v)
        if not np.any(fin):
            raise InputError("rate function must be finite somewhere")
        if np.min(v[fin]) < -1e-6:
            raise InputError("rate function must be nonnegative up to tolerance")
        if self.radial and y[0] < 0:
            raise InputError("radial rate grids start at radius >= 0")
        y = y.copy(); v = v.copy()
        y.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "grid", y)
        object.__setattr__(self, "values", v)

    def min_value(self):
        return float(np.min(self.values[np.isfinite(self.values)]))

    def argmin(self):
        fin = np.where(np.isfinite(self.values))[0]
        k = fin[np.argmin(self.values[fin])]
        return float(self.grid[k])

    def edge_slope(self):
        """phi(y_max) / |y_max|, the observable superlinearity certificate."""
        fin = np.isfinite(self.values)
        y = self.grid[fin]
        v = self.values[fin]
        return float(v[-1] / abs(y[-1])) if y[-1] != 0 else np.inf

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("y,phi\n")
            for y, v in zip(self.grid, self.values):
                tok = "inf" if not np.isfinite(v) else f"{v:.12g}"
                fh.write(f"{y:.12g},{tok}\n")

    @classmethod
    def from_csv(cls, path):
        ys, vs = [], []
        with open(path) as fh:
            fh.readline()
            for line in fh:
                y, v = line.strip().split(",")
                ys.append(float(y))
                vs.append(np.inf if v == "inf" else float(v))
        return cls(np.asarray(ys), np.asarray(vs))


def conjugate_rate(model, z_grid, y_grid, tol=1e-6):
    """Rate phi(y) = sup_z (y z - E[z xi]) from an expectation model (1D).

    The infimum of the exact rate is zero; if the discrete minimum deviates
    beyond ``tol`` the z-grid was too small for the requested dual range.
    """
    z = np.asarray(z_grid, dtype=float)
    if 0.0 not in z:
        raise InputError("z-grid must contain 0 so the rate is nonnegative")
    vals = np.array([model.expect_linear(zz) for zz in z])
    phi = legendre(z, vals, np.asarray(y_grid, dtype=float))
    m = float(np.min(phi))
    if abs(m) > tol:
        raise GridTooSmallError(
            f"rate minimum {m:.3e} deviates from 0 beyond tol; enlarge the y-grid")
    return RateFunction(np.asarray(y_grid, dtype=float), phi)


def _candidates(rate):
    """Finite (y, phi) pairs ordered by |y| then y, for deterministic ties."""
    if rate.radial:
        radii = rate.grid
        angles = 2 * np.pi * np.arange(rate.directions) / rate.directions
        ys = np.concatenate([np.outer(radii, [np.cos(a), np.sin(a)])
                             for a in angles])
        phis = np.tile(rate.values, rate.directions)
        norms = np.tile(rate.grid, rate.directions)
    else:
        ys = rate.grid
        phis = rate.values
        norms = np.abs(ys)
    fin = np.isfinite(phis)
    ys, phis, norms = ys[fin], phis[fin], norms[fin]
    order = np.lexsort((ys if ys.ndim == 1 else ys[:, 0], norms))
    return ys[order], phis[order]


def hopf_lax(f, t, rate):
    """sup over the rate grid of f(x + t y) - phi(y) t, per node x.

    Infinite rate entries are skipped; ties in the maximum resolve toward
    the candidate of smallest |y|. t = 0 returns f unchanged.
    """
    if t < 0:
        raise InputError("hopf_lax requires t >= 0")
    if t == 0.0:
        return f
    g = f.grid
    ys, phis = _candidates(rate)
    if g.dimension == 1:
        nodes = g.axis
        best = np.full(nodes.shape, -np.inf)
        for k0 in range(0, ys.shape[0], _CHUNK):
            yy = ys[k0:k0 + _CHUNK]
            pp = phis[k0:k0 + _CHUNK]
            vals = f.eval(nodes[:, None] + t * yy[None, :]) - t * pp[None, :]
            np.maximum(best, vals.max(axis=1), out=best)
        return f.replace_values(best)
    if ys.ndim == 1:
        raise InputError("2D grid functions need a radial rate function")
    nodes = g.nodes()
    best = np.full(nodes.shape[0], -np.inf)
    for k0 in range(0, ys.shape[0], _CHUNK):
        yy = ys[k0:k0 + _CHUNK]
        pp = phis[k0:k0 + _CHUNK]
        pts = nodes[:, None, :] + t * yy[None, :, :]
        vals = f.eval(pts) - t * pp[None, :]
        np.maximum(best, vals.max(axis=1), out=best)
    return f.replace_values(best.reshape(f.values.shape))


def envelope(f, t, z_grid, h_minus, h_plus, y_grid):
    """Hopf-Lax sandwich (S_- f, S_+ f) from bounds H_- <= H_+ on E[z xi].

    Conjugation reverses the order, so the upper semigroup uses the
    conjugate of H_+ (the smaller rate) and vice versa.
    """
    hm = np.asarray(h_minus, dtype=float)
    hp = np.asarray(h_plus, dtype=float)
    if np.any(hm > hp + 1e-12):
        raise InputError("envelope requires H_- <= H_+ on the z-grid")
    y = np.asarray(y_grid, dtype=float)
    rate_upper = RateFunction(y, legendre(z_grid, hp, y))
    rate_lower = RateFunction(y, legendre(z_grid, hm, y))
    s_minus = hopf_lax(f, t, rate_lower)
    s_plus = hopf_lax(f, t, rate_upper)
    if np.any(s_minus.values > s_plus.values + 1e-9):
        raise InputError("envelope ordering failed; check the H bounds")
    return s_minus, s_plus


def semigroup_defect(f, s, t, rate, compact):
    """sup norm on the compact of S(s+t) f - S(s) S(t) f for Hopf-Lax flows."""
    if s < 0 or t < 0:
        raise InputError("semigroup_defect requires s, t >= 0")
    direct = hopf_lax(f, s + t, rate)
    nested = hopf_lax(hopf_lax(f, t, rate), s, rate)
    return direct.replace_values(direct.values - nested.values).sup_norm_on(compact)
