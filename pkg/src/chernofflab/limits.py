"""Probabilistic laboratory: recursive statistics, nonlinear limit
functionals, large-deviation rate measurements, and generator checks.

The iteration identity

    (I(h)^k f)(x) = h * E_bar[ f(psi_k(h, x, xi_1, ..., xi_k)) / h ]

turns product-space functionals of recursively perturbed statistics into k
grid sweeps, so no product measure is ever constructed; a brute-force
enumeration over atom sequences doubles as the independent cross-check for
small k.
"""

from dataclasses import dataclass

import numpy as np

from .chernoff import OneStepOperator, Partition, SecondOrder, iterate
from .errors import DegenerateSetError, InputError, PreconditionError
from .expectations import (CENTERING_PROBES, Shortfall, legendre, log_mgf)

_LATTICE_DENOMS = tuple(range(1, 65))


# ---------------------------------------------------------------------------
# recursive statistics and exact functionals
# ---------------------------------------------------------------------------

def recursive_statistic(scaling, t, samples):
    """X = psi_n(t, 0, y_1, ..., y_n): left fold of the scaling map from 0."""
    samples = np.atleast_1d(np.asarray(samples, dtype=float))
    if samples.size == 0:
        raise InputError("recursive_statistic needs at least one sample")
    x = 0.0
    for y in samples:
        x = float(scaling.map(t, x, y))
    return x


def nonlinear_functional(model, scaling, f, n):
    """(1/n) E_bar[n f(X_n)] computed as (I(1/n)^n f)(0)."""
    if n < 1:
        raise InputError("n must be a positive integer")
    op = OneStepOperator(model, scaling)
    u = iterate(op, Partition(1.0, 1.0 / n), f)
    return float(u.values[f.grid.origin_index])


def clt_functional(model, f, n, probe_tol=1e-8):
    """(1/n) E_bar[n f(sum xi_i / sqrt(n))] via the second-order scaling.

    Requires a centered model: E[a xi] = 0 for the probe coefficients.
    Apply :func:`chernofflab.expectations.centered` first otherwise.
    """
    for a in CENTERING_PROBES:
        if abs(model.expect_linear(a)) > probe_tol:
            raise PreconditionError(
                f"clt_functional needs a centered model; E[{a} xi] != 0")
    op = OneStepOperator(model, SecondOrder())
    u = iterate(op, Partition(1.0, 1.0 / n), f)
    return float(u.values[f.grid.origin_index])


def brute_force_functional(model, scaling, f, n, t=1.0):
    """(I(t/n)^n f)(0) by exact recursion over atom sequences.

    Independent of the grid-sweep path: intermediate values are evaluated at
    the exactly reachable points, never resampled. Exponential in n; meant
    for n <= 6 with few atoms.
    """
    h = t / n
    memo = {}

    def value(x, k):
        key = (round(float(x), 12), k)
        if key in memo:
            return memo[key]
        if k == 0:
            out = float(f.eval(x))
        else:
            def payoff(y):
                pts = scaling.map(h, x, np.atleast_1d(np.asarray(y, dtype=float)))
                return np.array([value(p, k - 1) for p in np.atleast_1d(pts)]) / h
            out = h * model.expect(payoff)
        memo[key] = out
        return out

    return value(0.0, n)


def sample_iid(measure, n, seed):
    """Deterministic iid draws from a discrete measure (Monte Carlo companion)."""
    if n < 1:
        raise InputError("sample count must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(measure.weights), size=n, p=measure.weights)
    atoms = measure.atoms
    return atoms[idx, 0] if atoms.shape[1] == 1 else atoms[idx]


# ---------------------------------------------------------------------------
# exact tail probabilities by dynamic programming
# ---------------------------------------------------------------------------

def _lattice_scale(values):
    for d in _LATTICE_DENOMS:
        scaled = values * d
        if np.all(np.abs(scaled - np.round(scaled)) < 1e-9):
            return d
    raise InputError("atoms must lie on a lattice with denominator <= 64 "
                     "for exact tail probabilities")


def exact_tail_probabilities(measure, threshold, n_grid):
    """P(X_n >= threshold) for X_n the running average, every n in n_grid.

    One dynamic-programming pass over the integer lattice carrying the atom
    sums; snapshots are taken at the requested n. Exact up to float rounding.
    """
    if measure.dimension != 1:
        raise InputError("tail probabilities are one-dimensional")
    n_grid = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])) or n_grid[0] < 1:
        raise InputError("n grid must be strictly increasing positive integers")
    atoms = measure.atoms[:, 0]
    d = _lattice_scale(atoms)
    ints = np.round(atoms * d).astype(np.int64)
    lo, hi = int(ints.min()), int(ints.max())
    span = hi - lo
    kernel = np.zeros(span + 1)
    for a, w in zip(ints, measure.weights):
        kernel[a - lo] += w
    dist = np.array([1.0])
    offset = 0  # dist[j] = P(sum_int = offset + j)
    out = {}
    want = set(n_grid)
    for n in range(1, n_grid[-1] + 1):
        dist = np.convolve(dist, kernel)
        offset += lo
        if n in want:
            # sum/ (n d) >= threshold  <=>  sum_int >= threshold * n * d
            cut = int(np.ceil(threshold * n * d - 1e-9))
            j0 = max(cut - offset, 0)
            out[n] = float(dist[j0:].sum()) if j0 < dist.shape[0] else 0.0
    return [out[n] for n in n_grid]


@dataclass
class RateReport:
    n_grid: list
    values: list
    fitted_rate: float
    bound: float
    passed: bool

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("n,value,fitted_rate,bound,pass\n")
            for n, v in zip(self.n_grid, self.values):
                fh.write(f"{n},{v:.12g},{self.fitted_rate:.12g},"
                         f"{self.bound:.12g},{int(self.passed)}\n")


def _fit_rate(n_grid, values):
    """Extrapolate v_n = s + (a log n + b)/n from the last three entries."""
    ns = np.asarray(n_grid[-3:], dtype=float)
    vs = np.asarray(values[-3:], dtype=float)
    if ns.shape[0] < 3:
        return float(vs[-1])
    A = np.stack([np.ones(3), np.log(ns) / ns, 1.0 / ns], axis=1)
    coef = np.linalg.solve(A, vs)
    return float(coef[0])


def ld_rate(measure, threshold, n_grid, shift_radius=0.0,
            z_grid=None, tol=1e-3):
    """Exponential decay of P(X_n >= threshold) against the conjugate bound.

    Reports (1/n) log P per n, the extrapolated slope, and the analytic
    bound -inf_{x >= threshold - shift_radius} Lambda*(x) from the
    log-moment-generating / conjugation pipeline.
    """
    probs = exact_tail_probabilities(measure, threshold, n_grid)
    if all(p == 0.0 for p in probs):
        raise DegenerateSetError("the event has probability zero for every n")
    values = [np.log(p) / n if p > 0 else -np.inf
              for p, n in zip(probs, n_grid)]
    fitted = _fit_rate(n_grid, values)

    mean = float(measure.mean_and_cov()[0][0])
    x0 = threshold - shift_radius
    if x0 <= mean + 1e-15:
        bound = 0.0
    else:
        if z_grid is None:
            z_grid = np.linspace(-12.0, 12.0, 4801)
        lam = log_mgf(measure, z_grid)
        bound = -float(legendre(z_grid, lam, np.array([x0]))[0])
    return RateReport(list(n_grid), values, fitted, bound,
                      passed=bool(fitted <= bound + tol))


def poly_rate(measure, power, threshold, n_grid, shift_radius=0.0,
              x_grid=None, tol=0.05):
    """Polynomial decay n^(p-1) P(X_n >= threshold) against the shortfall bound.

    The bound is (inf_{x >= threshold - shift_radius} Lambda*(x))^(-p) with
    Lambda the shortfall transform of linear payoffs; an infinite bound (the
    infimum is zero) is reported as +inf and passes trivially.
    """
    if not (1.0 < power <= 4.0):
        raise InputError("power must lie in (1, 4]")
    probs = exact_tail_probabilities(measure, threshold, n_grid)
    if all(p == 0.0 for p in probs):
        raise DegenerateSetError("the event has probability zero for every n")
    values = [n ** (power - 1.0) * p for p, n in zip(probs, n_grid)]

    mean = float(measure.mean_and_cov()[0][0])
    x0 = threshold - shift_radius
    if x0 <= mean + 1e-15:
        bound = np.inf
    else:
        if x_grid is None:
            x_grid = np.linspace(-6.0, 6.0, 1201)
        model = Shortfall(measure, power)
        lam = np.array([model.expect_linear(x) for x in x_grid])
        lstar = float(legendre(x_grid, lam, np.array([x0]))[0])
        bound = lstar ** (-power) if lstar > 1e-12 else np.inf
    passed = bool(values[-1] <= bound * (1.0 + tol)) if np.isfinite(bound) else True
    return RateReport(list(n_grid), values, _fit_rate(n_grid, values),
                      float(bound), passed)


# ---------------------------------------------------------------------------
# generator checks
# ---------------------------------------------------------------------------

@dataclass
class GeneratorDiagnostics:
    h_grid: list
    defects: list
    nodes: np.ndarray
    estimate: np.ndarray
    analytic: np.ndarray

    @property
    def final_defect(self):
        return self.defects[-1]

    def estimate_at(self, x):
        k = int(np.argmin(np.abs(self.nodes - x)))
        return float(self.estimate[k])


def generator_values(op, f, nodes):
    """Analytic generator A f on the given nodes, from the model formulas.

    First-order scalings: A f(x) = E[ f'(x) psi_0(x, .) ]; second order:
    A f(x) = E[ y^2 f''(x) / 2 ]. Derivatives of f come from the grid.
    """
    g = f.grid
    if g.dimension != 1:
        raise InputError("generator checks are one-dimensional")
    grad = f.fd_gradient()
    hess = f.fd_hessian()
    axis = g.axis
    out = np.empty(nodes.shape[0])
    for k, x in enumerate(nodes):
        i = int(np.argmin(np.abs(axis - x)))
        if isinstance(op.scaling, SecondOrder):
            c = 0.5 * hess[i]
            out[k] = op.model.expect(lambda y: c * np.asarray(y) ** 2)
        else:
            c = grad[i]
            scaling = op.scaling
            out[k] = op.model.expect(
                lambda y: c * np.asarray(scaling.psi0(x, np.asarray(y))))
    return out


def interpolation_floor(f, compact, h_min, reach=1.0):
    """Quantization level of a generator defect from linear interpolation.

    Each probe quotient carries up to hg^2 |f''| / (4 h) of interpolation
    error, with the curvature taken over the compact widened by the largest
    query offset; below this level defect orderings are not meaningful.
    """
    g = f.grid
    lo, hi = compact
    mask = (g.axis >= lo - reach - 1e-12) & (g.axis <= hi + reach + 1e-12)
    curv = float(np.max(np.abs(f.fd_hessian()[mask])))
    return g.spacing ** 2 * max(curv, 1.0) / (4.0 * h_min) + 1e-12


def generator_check(op, f, h_grid, compact, analytic=None):
    """Defect max over the compact of |(I(h) f - f)/h - A f| per probe h.

    The defect sequence of a consistent one-step family decreases to the
    interpolation floor as h shrinks; the returned estimate is the
    difference quotient at the smallest h.
    """
    h_grid = sorted(h_grid, reverse=True)
    g = f.grid
    lo, hi = compact
    mask = (g.axis >= lo - 1e-12) & (g.axis <= hi + 1e-12)
    nodes = g.axis[mask]
    if analytic is None:
        analytic = generator_values(op, f, nodes)
    defects = []
    estimate = None
    for h in h_grid:
        u = op(h, f)
        quot = (u.values[mask] - f.values[mask]) / h
        defects.append(float(np.max(np.abs(quot - analytic))))
        estimate = quot
    return GeneratorDiagnostics(list(h_grid), defects, nodes, estimate,
                                np.asarray(analytic))
