"""One-step operators, their iteration over partitions, and Chernoff limits.

The one-step operator attached to an expectation model E and a scaling
family psi is

    (I(t) f)(x) = t * E[ f(psi(t, x, .)) / t ],        I(0) = identity.

Iterating I over an equidistant partition of [0, t] and refining the mesh
produces the semigroup approximation; two staggered refinement schedules are
run side by side so that the independence of the limit from the partition
choice is observable.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InputError
from .expectations import (Centered, Entropic, ExpectationModel, Linear,
                           ShiftSup, Shortfall, shortfall_root)
from .grid import GrowthWeight

_REMAINDER_EPS = 1e-13


# ---------------------------------------------------------------------------
# scaling families
# ---------------------------------------------------------------------------

class ScalingFamily:
    """Randomization map psi(t, x, y) applied to the running state."""

    def map(self, t, x, y):
        raise NotImplementedError

    def psi0(self, x, y):
        """Small-time derivative psi_0(x, y) = lim (psi(h,x,y) - x) / h."""
        raise NotImplementedError

    def base_and_scale(self, t, nodes):
        """Decompose psi(t, x, y) = base(x) + scale * y for the 1D fast path."""
        raise NotImplementedError


@dataclass(frozen=True)
class FirstOrderAffine(ScalingFamily):
    """psi(t, x, y) = x + t y, the averaged-sum scaling."""

    def map(self, t, x, y):
        return x + t * y

    def psi0(self, x, y):
        return np.broadcast_to(y, np.broadcast(x, y).shape).astype(float)

    def base_and_scale(self, t, nodes):
        return nodes, t


@dataclass(frozen=True)
class Perturbed(ScalingFamily):
    """psi(t, x, y) = x + t phi0(x) + t y with phi0 bounded Lipschitz.

    Realizes the time-linear perturbation phi(t, x) = t phi0(x); ``lip``
    is the declared Lipschitz bound of phi0.
    """

    phi0: object
    lip: float

    def map(self, t, x, y):
        return x + t * self.phi0(x) + t * y

    def psi0(self, x, y):
        return self.phi0(x) + y

    def base_and_scale(self, t, nodes):
        return nodes + t * np.asarray(self.phi0(nodes), dtype=float), t


@dataclass(frozen=True)
class SecondOrder(ScalingFamily):
    """psi(t, x, y) = x + sqrt(t) y, the CLT scaling."""

    def map(self, t, x, y):
        return x + np.sqrt(t) * y

    def psi0(self, x, y):
        raise InputError("second-order scaling has no first-order derivative map")

    def base_and_scale(self, t, nodes):
        return nodes, float(np.sqrt(t))


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Equidistant partition of [0, horizon] with mesh ``step``."""

    horizon: float
    step: float

    def __post_init__(self):
        if self.horizon < 0 or not (0 < self.step <= 1):
            raise InputError("partition needs horizon >= 0 and step in (0, 1]")

    @property
    def full_steps(self):
        return int(np.floor(self.horizon / self.step + _REMAINDER_EPS))

    @property
    def remainder(self):
        rem = self.horizon - self.full_steps * self.step
        return 0.0 if rem < _REMAINDER_EPS else min(rem, self.step)


# ---------------------------------------------------------------------------
# the one-step operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OneStepOperator:
    model: ExpectationModel
    scaling: ScalingFamily = field(default_factory=FirstOrderAffine)
    weight: GrowthWeight = field(default_factory=GrowthWeight)

    def __call__(self, t, f):
        return one_step(self, t, f)


def one_step(op, t, f):
    """Apply I(t) to a grid function; t = 0 returns f unchanged."""
    if t < 0:
        raise InputError("one_step requires t >= 0")
    if t == 0.0:
        return f
    g = f.grid
    model = op.model
    if g.dimension == 1 and not isinstance(model, Centered):
        base, scale = op.scaling.base_and_scale(t, g.axis)
        vals = _step_fast_1d(model, f, base, scale, t)
    else:
        vals = _step_generic(model, op.scaling, f, t)
    return f.replace_values(vals)


def _step_fast_1d(model, f, base, scale, t):
    g = f.grid
    origin = -g.half_width
    h = g.spacing
    const = f.extension == "constant"
    if isinstance(model, Linear):
        offs = scale * model.measure.atoms[:, 0]
        return _kernels.one_step_weighted(f.values, origin, h, const, base,
                                          offs, model.measure.weights)
    if isinstance(model, Entropic):
        offs = scale * model.measure.atoms[:, 0]
        return _kernels.one_step_entropic(f.values, origin, h, const, base,
                                          offs, np.log(model.measure.weights), t)
    if isinstance(model, ShiftSup):
        offs = scale * model.measure.atoms[:, 0]
        shift_offs = scale * model.shifts[:, 0]
        return _kernels.one_step_shiftmax(f.values, origin, h, const, base, offs,
                                          model.measure.weights, shift_offs,
                                          model._costs, t, model.symmetric)
    if isinstance(model, Shortfall):
        offs = scale * model.measure.atoms[:, 0]
        q = base[:, None] + offs[None, :]
        F = _kernels.interp1(f.values, origin, h, q, const)
        return t * shortfall_root(F / t, model.measure.weights, model.power)
    raise InputError(f"unsupported expectation model {type(model).__name__}")


def _step_generic(model, scaling, f, t):
    """Slow path: build the payoff per node through callables (any d, any model)."""
    g = f.grid
    nodes = g.axis if g.dimension == 1 else g.nodes()
    out = np.empty(nodes.shape[0] if g.dimension > 1 else nodes.shape[0])
    for k in range(out.shape[0]):
        x = nodes[k]
        payoff = _node_payoff(scaling, f, t, x)
        out[k] = t * model.expect(lambda y: payoff(y) / t)
    if g.dimension == 1:
        return out
    return out.reshape(f.values.shape)


def _node_payoff(scaling, f, t, x):
    def payoff(y):
        y = np.asarray(y, dtype=float)
        pts = scaling.map(t, x, y)
        return f.eval(pts)
    return payoff


def iterate(op, partition, f):
    """I(pi) f = I(step)^k I(remainder) f, remainder applied first."""
    u = f
    rem = partition.remainder
    if rem > 0.0:
        u = one_step(op, rem, u)
    for _ in range(partition.full_steps):
        u = one_step(op, partition.step, u)
    return u


# ---------------------------------------------------------------------------
# Chernoff limits with convergence diagnostics
# ---------------------------------------------------------------------------

@dataclass
class ChernoffDiagnostics:
    schedule: list
    steps: list
    gaps: list
    values_at_origin: list
    cross_schedule_gap: float
    cauchy_gap: float
    converged: bool
    tol: float

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("n,h,sup_gap_on_K,cross_schedule_gap,value_at_origin\n")
            last = len(self.schedule) - 1
            for i, (n, h, gap, v) in enumerate(zip(self.schedule, self.steps,
                                                   self.gaps, self.values_at_origin)):
                cross = f"{self.cross_schedule_gap:.12g}" if i == last else "nan"
                fh.write(f"{n},{h:.12g},{gap:.12g},{cross},{v:.12g}\n")


def chernoff_limit(op, t, f, schedule, tol=1e-3, compact=None,
                   dyadic_base=0.75, dyadic_levels=None):
    """Iterate over a refining schedule and report convergence diagnostics.

    ``schedule`` lists the number of uniform steps (strictly increasing). A
    second, staggered dyadic schedule with mesh ``dyadic_base * 2^-j`` is run
    alongside; its terminal value measures the independence of the limit from
    the partition choice. Non-convergence is reported, never raised.
    """
    schedule = list(schedule)
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise InputError("schedule must be strictly increasing")
    if compact is None:
        r = f.grid.half_width / 2.0
        compact = (-r, r)

    origin = f.grid.origin_index
    gaps, values = [], []
    prev = None
    for n in schedule:
        u = iterate(op, Partition(t, t / n), f)
        gaps.append(np.nan if prev is None else
                    prev.replace_values(u.values - prev.values).sup_norm_on(compact))
        values.append(float(u.values[origin]))
        prev = u

    if dyadic_levels is None:
        jmax = int(np.round(np.log2(schedule[-1])))
        dyadic_levels = range(max(jmax - 2, 1), jmax + 1)
    ud = None
    for j in dyadic_levels:
        ud = iterate(op, Partition(t, min(dyadic_base * t * 2.0 ** (-j), 1.0)), f)
    cross = prev.replace_values(prev.values - ud.values).sup_norm_on(compact)

    cauchy = gaps[-1] if len(gaps) > 1 else np.inf
    diag = ChernoffDiagnostics(schedule=schedule, steps=[t / n for n in schedule],
                               gaps=gaps, values_at_origin=values,
                               cross_schedule_gap=float(cross),
                               cauchy_gap=float(cauchy),
                               converged=bool(cauchy <= tol), tol=tol)
    return prev, diag


def upper_lipschitz_certificate(op, f, probe_times, weight=None):
    """c_hat = max over probe t of || (I(t) f - f)^+ ||_kappa / t.

    A finite value that is stable under refining the probes witnesses
    membership of f in the upper Lipschitz set of the operator family.
    """
    w = weight if weight is not None else f.weight
    best = 0.0
    for t in probe_times:
        if not (0 < t <= 1):
            raise InputError("probe times must lie in (0, 1]")
        diff = one_step(op, t, f).values - f.values
        pos = f.replace_values(np.maximum(diff, 0.0))
        best = max(best, pos.weighted_norm(w) / t)
    return best
