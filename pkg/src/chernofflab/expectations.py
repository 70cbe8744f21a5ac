"""Convex expectation functionals on finitely supported payoff samples.

Five model variants are provided, all constant-preserving, monotone and
convex on evaluations:

* ``Linear``          plain weighted average against a reference measure,
* ``Entropic``        log-integral of the exponential (entropic certainty
                      equivalent),
* ``Shortfall``       utility-shortfall value solved by bisection,
* ``ShiftSup``        penalized supremum over deterministic shifts of the
                      reference measure,
* ``SymmetricTwoPointSup``  penalized supremum over symmetric two-point
                      mixtures of shifts, the second-order analogue.

Payoffs are callables mapping sample points to values; each model queries
exactly the points it needs, so all expectations are finite sums.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InputError, PreconditionError

SHORTFALL_TOL = 1e-10
CENTERING_PROBES = (1.0, -1.0, 2.0, -2.0)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure on R^d."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.atleast_1d(np.asarray(self.atoms, dtype=float))
        if atoms.ndim == 1:
            atoms = atoms[:, None]
        weights = np.asarray(self.weights, dtype=float)
        if atoms.shape[0] != weights.shape[0]:
            raise InputError("atoms and weights must have matching lengths")
        if np.any(weights < 0):
            raise InputError("weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise InputError("weights must sum to one")
        if not np.all(np.isfinite(atoms)):
            raise InputError("atoms must be finite")
        atoms = atoms.copy()
        weights = weights.copy()
        atoms.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def dimension(self):
        return self.atoms.shape[1]

    def mean_and_cov(self):
        """First moment and raw second-moment matrix (m, Sigma)."""
        m = self.weights @ self.atoms
        sigma = (self.atoms * self.weights[:, None]).T @ self.atoms
        return m, sigma

    @classmethod
    def from_pairs(cls, pairs):
        atoms, weights = zip(*pairs)
        return cls(np.asarray(atoms, dtype=float), np.asarray(weights, dtype=float))

    @classmethod
    def load(cls, path):
        """Rows ``atom,weight`` (2D atoms written as ``x;y``)."""
        atoms, weights = [], []
        with open(path) as fh:
            for raw in fh:
                line = raw.split("#")[0].strip()
                if not line:
                    continue
                left, right = line.rsplit(",", 1)
                atoms.append([float(tok) for tok in left.split(";")])
                weights.append(float(right))
        a = np.asarray(atoms, dtype=float)
        if a.shape[1] == 1:
            a = a[:, 0]
        return cls(a, np.asarray(weights, dtype=float))

    def save(self, path):
        with open(path, "w") as fh:
            for a, w in zip(self.atoms, self.weights):
                fh.write(";".join(f"{x:.12g}" for x in a) + f",{w:.12g}\n")


def gauss_hermite(n_nodes, mean=0.0, std=1.0):
    """Gaussian N(mean, std^2) as Gauss-Hermite quadrature atoms."""
    x, w = np.polynomial.hermite.hermgauss(n_nodes)
    return DiscreteMeasure(mean + std * np.sqrt(2.0) * x, w / np.sqrt(np.pi))


def two_point(spread=1.0):
    """The symmetric Bernoulli measure (delta_{-s} + delta_{+s}) / 2."""
    return DiscreteMeasure(np.array([-spread, spread]), np.array([0.5, 0.5]))


@dataclass(frozen=True)
class PenaltyFunction:
    """Convex nondecreasing penalty on a parameter grid, with inf markers.

    ``phi(0) = 0`` is required; evaluation between grid points is linear and
    becomes infinite as soon as an infinite neighbour is involved.
    """

    grid: np.ndarray
    values: np.ndarray
    slope_bound: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if c.ndim != 1 or c.shape != v.shape or c.shape[0] < 2:
            raise InputError("penalty needs matching 1D grids with >= 2 entries")
        if np.any(np.diff(c) <= 0):
            raise InputError("penalty parameter grid must be strictly increasing")
        if c[0] != 0.0 or v[0] != 0.0:
            raise InputError("penalty must have phi(0) = 0 with 0 the first grid point")
        if np.any(v < 0):
            raise InputError("penalty values must be nonnegative")
        fin = np.isfinite(v)
        if np.any(np.diff(v[fin]) < -1e-12):
            raise InputError("penalty must be nondecreasing")
        vf = v[fin]
        cf = c[fin]
        if vf.shape[0] >= 3:
            slopes = np.diff(vf) / np.diff(cf)
            if np.any(np.diff(slopes) < -1e-9):
                raise InputError("penalty must be convex along its grid")
        if self.slope_bound > 0 and np.isfinite(v[-1]):
            if v[-1] / c[-1] < self.slope_bound - 1e-12:
                raise InputError("penalty fails its declared superlinearity bound")
        c = c.copy(); v = v.copy()
        c.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "grid", c)
        object.__setattr__(self, "values", v)

    def __call__(self, c):
        c = np.abs(np.asarray(c, dtype=float))
        out = np.interp(c, self.grid, np.where(np.isfinite(self.values),
                                               self.values, np.inf))
        out = np.where(c > self.grid[-1], np.inf, out)
        return out if out.ndim else float(out)

    @classmethod
    def quadratic(cls, radius=4.0, n=129, coeff=1.0):
        c = np.linspace(0.0, radius, n)
        return cls(c, coeff * c**2, slope_bound=coeff * radius * 0.5)

    @classmethod
    def indicator(cls, radius=1.0, n=65):
        """0 on [0, radius], +inf beyond."""
        c = np.linspace(0.0, radius, n)
        grid = np.append(c, radius * (1 + 1e-9))
        vals = np.append(np.zeros(n), np.inf)
        return cls(grid, vals)

    @classmethod
    def load(cls, path):
        """Rows ``c,value`` where value may be the token ``inf``."""
        cs, vs = [], []
        with open(path) as fh:
            for raw in fh:
                line = raw.split("#")[0].strip()
                if not line:
                    continue
                c, v = line.split(",")
                cs.append(float(c))
                vs.append(np.inf if v.strip().lower() == "inf" else float(v))
        return cls(np.asarray(cs), np.asarray(vs))

    def save(self, path):
        with open(path, "w") as fh:
            for c, v in zip(self.grid, self.values):
                tok = "inf" if not np.isfinite(v) else f"{v:.12g}"
                fh.write(f"{c:.12g},{tok}\n")


# ---------------------------------------------------------------------------
# expectation models
# ---------------------------------------------------------------------------

def _payoff_values(g, pts):
    vals = np.asarray(g(pts) if callable(g) else g, dtype=float)
    if not np.all(np.isfinite(vals)):
        raise InputError("payoff must be finite at all required sample points")
    return vals


class ExpectationModel:
    """Base class; subclasses implement ``expect`` on payoff callables."""

    measure: DiscreteMeasure

    def expect(self, g):
        raise NotImplementedError

    def __call__(self, g):
        return self.expect(g)

    def expect_linear(self, a):
        """E[a . xi] for a coefficient vector (scalar in 1D)."""
        a = np.asarray(a, dtype=float)
        return self.expect(lambda y: y @ a if a.ndim else
                           (y[:, 0] if y.ndim > 1 else y) * a)

    def is_centered(self, tol=1e-9, probes=CENTERING_PROBES):
        return all(abs(self.expect_linear(a)) <= tol for a in probes)

    def _atom_points(self):
        a = self.measure.atoms
        return a[:, 0] if a.shape[1] == 1 else a


@dataclass(frozen=True)
class Linear(ExpectationModel):
    measure: DiscreteMeasure

    def expect(self, g):
        return float(self.measure.weights @ _payoff_values(g, self._atom_points()))


@dataclass(frozen=True)
class Entropic(ExpectationModel):
    measure: DiscreteMeasure

    def expect(self, g):
        vals = _payoff_values(g, self._atom_points())
        return float(_logsumexp(vals + np.log(self.measure.weights)))


@dataclass(frozen=True)
class Shortfall(ExpectationModel):
    """E[g] = inf{m : sum_i w_i ((1 + g_i - m)^+)^p <= 1}, p > 1."""

    measure: DiscreteMeasure
    power: float = 2.0

    def __post_init__(self):
        if not self.power > 1:
            raise InputError("shortfall power must exceed 1")

    def expect(self, g):
        vals = _payoff_values(g, self._atom_points())
        return float(shortfall_root(vals[None, :], self.measure.weights, self.power)[0])


@dataclass(frozen=True)
class ShiftSup(ExpectationModel):
    """E[g] = max over shifts s of (sum_i w_i g(a_i + s) - phi(|s|))."""

    measure: DiscreteMeasure
    penalty: PenaltyFunction
    shifts: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        s = np.atleast_1d(np.asarray(self.shifts, dtype=float))
        if s.ndim == 1:
            s = s[:, None]
        if s.shape[1] != self.measure.dimension:
            raise InputError("shift grid dimension must match the measure")
        cost = self.penalty(np.linalg.norm(s, axis=1))
        keep = np.isfinite(cost)
        if not np.any(keep):
            raise InputError("penalty is infinite on the whole shift grid")
        s = s[keep].copy()
        cost = np.asarray(cost[keep], dtype=float).copy()
        s.flags.writeable = False
        cost.flags.writeable = False
        object.__setattr__(self, "shifts", s)
        object.__setattr__(self, "_costs", cost)

    def expect(self, g):
        a = self.measure.atoms
        w = self.measure.weights
        pts_p = a[None, :, :] + self.shifts[:, None, :]
        flat = pts_p.reshape(-1, a.shape[1])
        flat = flat[:, 0] if a.shape[1] == 1 else flat
        vals = _payoff_values(g, flat).reshape(len(self.shifts), len(w))
        means = vals @ w
        if self.symmetric:
            pts_m = a[None, :, :] - self.shifts[:, None, :]
            flat = pts_m.reshape(-1, a.shape[1])
            flat = flat[:, 0] if a.shape[1] == 1 else flat
            vals_m = _payoff_values(g, flat).reshape(len(self.shifts), len(w))
            means = 0.5 * (means + vals_m @ w)
        return float(np.max(means - self._costs))


def SymmetricTwoPointSup(measure, penalty, shifts):
    """Symmetric two-point shift supremum (second-order scaling analogue)."""
    return ShiftSup(measure, penalty, shifts, symmetric=True)


@dataclass(frozen=True)
class Centered(ExpectationModel):
    """Mean-centering transform: E~[g] = min over a-grid of E[g + a . xi]."""

    base: ExpectationModel
    a_grid: np.ndarray = field(default_factory=lambda: np.arange(-80, 81) / 20.0)

    def __post_init__(self):
        a = np.asarray(self.a_grid, dtype=float).copy()
        a.flags.writeable = False
        object.__setattr__(self, "a_grid", a)
        object.__setattr__(self, "measure", self.base.measure)
        for probe in CENTERING_PROBES:
            if self.base.expect_linear(probe) < -1e-9:
                raise PreconditionError(
                    f"centering requires E[a xi] >= 0; probe a={probe} fails")

    def expect(self, g):
        best = np.inf
        for a in self.a_grid:
            if callable(g):
                shifted = lambda y, a=a: np.asarray(g(y)) + a * (
                    y[:, 0] if np.ndim(y) > 1 else np.asarray(y))
            else:
                raise InputError("centered models need callable payoffs")
            best = min(best, self.base.expect(shifted))
        return float(best)


def centered(model, a_grid=None):
    if a_grid is None:
        return Centered(model)
    return Centered(model, np.asarray(a_grid, dtype=float))


# ---------------------------------------------------------------------------
# scalar transforms
# ---------------------------------------------------------------------------

def _logsumexp(x, axis=None):
    m = np.max(x, axis=axis, keepdims=True)
    out = m + np.log(np.sum(np.exp(x - m), axis=axis, keepdims=True))
    return out.reshape(np.shape(np.max(x, axis=axis)))


def shortfall_root(vals, weights, power, tol=SHORTFALL_TOL):
    """Vectorized bisection for the shortfall level, rows = payoff vectors.

    The defining map m -> sum w ((1 + v - m)^+)^p is strictly decreasing, so
    the bracket [min v - 1, max v + 1] always contains the root.
    """
    vals = np.asarray(vals, dtype=float)
    lo = vals.min(axis=1) - 1.0
    hi = vals.max(axis=1) + 1.0
    assert np.all(lo < hi)
    for _ in range(int(np.ceil(np.log2((hi - lo).max() / tol))) + 2):
        mid = 0.5 * (lo + hi)
        s = (np.maximum(1.0 + vals - mid[:, None], 0.0) ** power) @ weights
        high = s > 1.0
        lo = np.where(high, mid, lo)
        hi = np.where(high, hi, mid)
    return 0.5 * (lo + hi)


def log_mgf(measure, x):
    """Lambda(x) = log sum_i w_i exp(x . a_i), max-shifted for stability."""
    x = np.asarray(x, dtype=float)
    a = measure.atoms
    logw = np.log(measure.weights)
    if x.ndim == 0 or (x.ndim == 1 and a.shape[1] > 1):
        e = a @ np.atleast_1d(x) if a.shape[1] > 1 else a[:, 0] * float(x)
        return float(_logsumexp(e + logw))
    e = np.multiply.outer(x, a[:, 0])
    return _logsumexp(e + logw[None, :], axis=-1)


def legendre(z_grid, values, y_grid):
    """Discrete convex conjugate g*(y) = max_z (y z - g(z)) on the dual grid.

    Entries of ``values`` may be +inf (skipped). Uses the monotone-maximizer
    scan, linear in the two grid sizes.
    """
    z = np.asarray(z_grid, dtype=float)
    g = np.asarray(values, dtype=float)
    y = np.asarray(y_grid, dtype=float)
    if z.shape != g.shape or z.ndim != 1:
        raise InputError("legendre expects matching 1D grids")
    if np.any(np.diff(z) <= 0) or (y.size > 1 and np.any(np.diff(y) <= 0)):
        raise InputError("legendre grids must be strictly increasing")
    if np.count_nonzero(np.isfinite(g)) < 2:
        raise InputError("legendre needs at least two finite values")
    return _kernels.legendre_scan(z, g, np.atleast_1d(y.astype(float)))
