"""Declarative experiment runner.

Configs are line-oriented key/value files with ``[section]`` headers; the
``inf`` token marks infinite penalty values. ``run`` executes a config and
writes CSV artifacts plus one PASS/FAIL line per declared check; the exit
status is 0 iff every check passes, 1 on a numerical failure, 2 on a parse
error and 3 on a validation error. Payoffs are named analytic families
evaluated on the grid at load time, never arbitrary expressions.
"""

import argparse
import os
import sys
import time

import numpy as np

from .chernoff import (FirstOrderAffine, OneStepOperator, Partition, Perturbed,
                       SecondOrder, chernoff_limit, iterate)
from .configs import BUILTINS
from .errors import ConfigError
from .expectations import (DiscreteMeasure, Entropic, Linear, PenaltyFunction,
                           ShiftSup, Shortfall, SymmetricTwoPointSup,
                           gauss_hermite)
from .grid import Grid, GridFunction, GrowthWeight
from .hopflax import conjugate_rate, envelope, hopf_lax
from .limits import (clt_functional, generator_check, interpolation_floor,
                     ld_rate, poly_rate)
from .pde import Hamiltonian1, Hamiltonian2, solve_g_heat, solve_hj

KINDS = ("lln", "cramer", "poly_rate", "clt", "wasserstein", "generator",
         "envelope", "pde_crosscheck")


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def parse_config_text(text):
    """Parse into {section: {key: value}}, raising ConfigError with a line."""
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header at line {lineno}",
                                  line=lineno)
            current = line[1:-1].strip()
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value at line {lineno}", line=lineno)
        if current is None:
            raise ConfigError(f"key outside any section at line {lineno}",
                              line=lineno)
        key, val = line.split("=", 1)
        sections[current][key.strip()] = val.strip()
    if not sections:
        raise ConfigError("empty configuration", line=1)
    return sections


def serialize_config(sections):
    out = []
    for name, kv in sections.items():
        out.append(f"[{name}]")
        for k, v in kv.items():
            out.append(f"{k} = {v}")
        out.append("")
    return "\n".join(out)


class _Fields:
    """Typed access into one section with field-naming validation errors."""

    def __init__(self, sections, section):
        self.section = section
        self.kv = sections.get(section, {})

    def _fail(self, key, why):
        raise ConfigError(f"field [{self.section}] {key}: {why}",
                          field=f"{self.section}.{key}")

    def str_(self, key, default=None):
        if key not in self.kv:
            if default is None:
                self._fail(key, "is required")
            return default
        return self.kv[key]

    def float_(self, key, default=None):
        raw = self.str_(key, None if default is None else str(default))
        try:
            return float(raw)
        except ValueError:
            self._fail(key, f"is not a number: {raw!r}")

    def int_(self, key, default=None):
        raw = self.str_(key, None if default is None else str(default))
        try:
            return int(raw)
        except ValueError:
            self._fail(key, f"is not an integer: {raw!r}")

    def floats(self, key, default=None):
        raw = self.str_(key, default)
        try:
            return [float(tok) for tok in raw.split(",") if tok.strip()]
        except ValueError:
            self._fail(key, f"is not a comma-separated number list: {raw!r}")

    def ints(self, key, default=None):
        return [int(v) for v in self.floats(key, default)]


# ---------------------------------------------------------------------------
# component builders
# ---------------------------------------------------------------------------

def _build_measure(spec, fields):
    spec = spec.strip()
    if spec.startswith("gauss_hermite(") and spec.endswith(")"):
        return gauss_hermite(int(spec[14:-1]))
    if spec.startswith("point(") and spec.endswith(")"):
        return DiscreteMeasure(np.array([float(spec[6:-1])]), np.array([1.0]))
    if spec.startswith("atoms(") and spec.endswith(")"):
        pairs = []
        for tok in spec[6:-1].split(","):
            a, w = tok.split(":")
            pairs.append((float(a), float(w)))
        return DiscreteMeasure.from_pairs(pairs)
    fields._fail("measure", f"unknown measure spec {spec!r}")


def _build_penalty(spec, fields):
    spec = spec.strip()
    if spec.startswith("quadratic(") and spec.endswith(")"):
        args = [float(t) for t in spec[10:-1].split(",")]
        radius = args[0]
        n = int(args[1]) if len(args) > 1 else 129
        return PenaltyFunction.quadratic(radius, n)
    if spec.startswith("indicator(") and spec.endswith(")"):
        return PenaltyFunction.indicator(float(spec[10:-1]))
    fields._fail("penalty", f"unknown penalty spec {spec!r}")


def _build_model(sections):
    fields = _Fields(sections, "expectation")
    variant = fields.str_("variant")
    measure = _build_measure(fields.str_("measure"), fields)
    if variant == "linear":
        return Linear(measure)
    if variant == "entropic":
        return Entropic(measure)
    if variant == "shortfall":
        return Shortfall(measure, fields.float_("power", 2.0))
    if variant in ("shift_sup", "symmetric_two_point"):
        penalty = _build_penalty(fields.str_("penalty", "quadratic(2, 129)"), fields)
        lo, hi, n = fields.floats("shifts")
        shifts = np.linspace(lo, hi, int(n))
        if variant == "shift_sup":
            return ShiftSup(measure, penalty, shifts)
        return SymmetricTwoPointSup(measure, penalty, shifts)
    fields._fail("variant", f"unknown expectation variant {variant!r}")


def _build_scaling(sections):
    fields = _Fields(sections, "scaling")
    family = fields.str_("family", "first_order_affine")
    if family == "first_order_affine":
        return FirstOrderAffine()
    if family == "second_order":
        return SecondOrder()
    if family == "perturbed":
        amp = fields.float_("amplitude", 0.1)
        return Perturbed(phi0=lambda x, a=amp: a * np.sin(x), lip=amp)
    fields._fail("family", f"unknown scaling family {family!r}")


def _build_grid(sections):
    fields = _Fields(sections, "grid")
    n = fields.int_("N")
    if n % 2 == 0:
        fields._fail("N", "must be odd so the origin is a node")
    grid = Grid(fields.float_("R"), n)
    ext = fields.str_("extension", "constant")
    if ext not in ("constant", "linear"):
        fields._fail("extension", f"must be constant or linear, got {ext!r}")
    weight = GrowthWeight(fields.int_("weight", 0))
    return grid, ext, weight


def _payoff_callable(sections):
    fields = _Fields(sections, "payoff")
    family = fields.str_("family")
    if family == "quadratic":
        center = fields.float_("center", 0.0)
        sign = fields.float_("sign", 1.0)
        clip = fields.float_("clip", np.inf)
        return lambda x: sign * np.minimum((np.asarray(x) - center) ** 2, clip)
    if family == "cosh":
        clip = fields.float_("clip", 6.0)
        return lambda x: np.minimum(np.cosh(np.asarray(x)), np.cosh(clip))
    if family == "sin":
        amp = fields.float_("amplitude", 1.0)
        freq = fields.float_("frequency", 1.0)
        return lambda x: amp * np.sin(freq * np.asarray(x))
    if family == "abs_clipped":
        center = fields.float_("center", 0.0)
        cap = fields.float_("cap", 4.0)
        return lambda x: np.minimum(np.abs(np.asarray(x) - center), cap)
    if family == "indicator_approx":
        edge = fields.float_("edge", 0.5)
        width = fields.float_("width", 0.2)
        return lambda x: 0.5 * (1.0 + np.tanh((np.asarray(x) - edge) / width))
    if family == "constant":
        value = fields.float_("value", 1.0)
        return lambda x: np.full(np.shape(x), value, dtype=float)
    fields._fail("family", f"unknown payoff family {family!r}")


def _build_payoff(sections):
    grid, ext, weight = _build_grid(sections)
    fn = _payoff_callable(sections)
    return GridFunction.sample(grid, fn, ext, weight), fn


# ---------------------------------------------------------------------------
# experiment runners
# ---------------------------------------------------------------------------

def _check_line(name, ok, detail):
    return f"{name}: {'PASS' if ok else 'FAIL'} ({detail})"


def _run_lln(sections, outdir):
    model = _build_model(sections)
    scaling = _build_scaling(sections)
    f, _ = _build_payoff(sections)
    sched = _Fields(sections, "schedule")
    check = _Fields(sections, "check")
    schedule = sched.ints("uniform")
    base = sched.float_("dyadic_base", 0.75)
    compact = check.float_("compact", 2.0)
    op = OneStepOperator(model, scaling)
    u, diag = chernoff_limit(op, 1.0, f, schedule, tol=check.float_("tolerance"),
                             compact=(-compact, compact), dyadic_base=base)
    value0 = diag.values_at_origin[-1]

    zr, zn = check.floats("rate_z", "8,1601")
    yr, yn = check.floats("rate_y", "10,2001")
    rate = conjugate_rate(model, np.linspace(-zr, zr, int(zn)),
                          np.linspace(-yr, yr, int(yn)))
    oracle = hopf_lax(f, 1.0, rate)
    oracle0 = float(oracle.values[f.grid.origin_index])

    diag.to_csv(os.path.join(outdir, "diagnostics.csv"))
    u.to_csv(os.path.join(outdir, "limit.csv"))
    rate.to_csv(os.path.join(outdir, "rate.csv"))

    lines = []
    tol = check.float_("tolerance")
    target = check.float_("target")
    lines.append(_check_line("target_value", abs(value0 - target) <= tol,
                             f"|{value0:.6f} - {target:.6f}| <= {tol}"))
    otol = check.float_("oracle_tolerance", tol)
    lines.append(_check_line("hopf_lax_oracle", abs(value0 - oracle0) <= otol,
                             f"|{value0:.6f} - {oracle0:.6f}| <= {otol}"))
    factor = check.float_("cross_factor", 2.0)
    ok_cross = diag.cross_schedule_gap <= factor * diag.cauchy_gap
    lines.append(_check_line("partition_independence", ok_cross,
                             f"cross {diag.cross_schedule_gap:.2e} <= "
                             f"{factor} x cauchy {diag.cauchy_gap:.2e}"))
    return lines


def _run_cramer(sections, outdir):
    model = _build_model(sections)
    sset = _Fields(sections, "set")
    check = _Fields(sections, "check")
    n_grid = _Fields(sections, "schedule").ints("n")
    report = ld_rate(model.measure, sset.float_("threshold"), n_grid,
                     shift_radius=sset.float_("shift_radius", 0.0))
    report.to_csv(os.path.join(outdir, "rate_report.csv"))
    lo, hi = check.floats("slope_window")
    lines = [_check_line("slope_window", lo <= report.fitted_rate <= hi,
                         f"{report.fitted_rate:.6f} in [{lo}, {hi}]")]
    if "bound_target" in check.kv:
        bt = check.float_("bound_target")
        btol = check.float_("bound_tolerance", 1e-4)
        lines.append(_check_line("bound_value", abs(report.bound - bt) <= btol,
                                 f"|{report.bound:.6f} - {bt:.6f}| <= {btol}"))
    below = all(v <= report.bound + 1e-12 for v in report.values)
    lines.append(_check_line("approach_from_below", below,
                             "every (1/n) log P sits below the bound"))
    return lines


def _run_poly_rate(sections, outdir):
    model = _build_model(sections)
    sset = _Fields(sections, "set")
    check = _Fields(sections, "check")
    n_grid = _Fields(sections, "schedule").ints("n")
    power = _Fields(sections, "expectation").float_("power", 2.0)
    report = poly_rate(model.measure, power, sset.float_("threshold"), n_grid,
                       shift_radius=sset.float_("shift_radius", 0.0),
                       tol=check.float_("tolerance", 0.05))
    report.to_csv(os.path.join(outdir, "rate_report.csv"))
    return [_check_line("polynomial_bound", report.passed,
                        f"n^(p-1) P = {report.values[-1]:.3e} <= "
                        f"bound {report.bound:.4g} x (1 + tol)")]


def _run_clt(sections, outdir):
    model = _build_model(sections)
    f, payoff_fn = _build_payoff(sections)
    sched = _Fields(sections, "schedule")
    check = _Fields(sections, "check")
    n_list = sched.ints("n")
    tol = check.float_("tolerance")

    target_spec = check.str_("target")
    if target_spec == "gaussian":
        lam_max = 0.0
        if isinstance(model, ShiftSup):
            lam_max = float(np.max(np.abs(model.shifts)))
        _, sig = model.measure.mean_and_cov()
        std = float(np.sqrt(lam_max ** 2 + sig[0, 0]))
        gx, gw = np.polynomial.hermite.hermgauss(128)
        target = float(gw @ payoff_fn(np.sqrt(2.0) * std * gx) / np.sqrt(np.pi))
    else:
        target = float(target_spec)

    values = [clt_functional(model, f, n) for n in n_list]
    with open(os.path.join(outdir, "clt_values.csv"), "w") as fh:
        fh.write("n,value,target\n")
        for n, v in zip(n_list, values):
            fh.write(f"{n},{v:.12g},{target:.12g}\n")

    lines = []
    if target_spec == "gaussian":
        ok = abs(values[-1] - target) <= tol
        lines.append(_check_line("gaussian_limit", ok,
                                 f"|{values[-1]:.6f} - {target:.6f}| <= {tol}"))
    else:
        ok = all(abs(v - target) <= tol for v in values)
        lines.append(_check_line("exact_identity", ok,
                                 f"max dev {max(abs(v - target) for v in values):.2e}"
                                 f" <= {tol}"))
        interior = check.float_("interior", 0.0)
        if interior > 0:
            op = OneStepOperator(model, SecondOrder())
            u = iterate(op, Partition(1.0, 1.0 / n_list[-1]), f)
            x2 = f.grid.axis ** 2
            dev = u.replace_values(u.values - x2 - 1.0)
            sup = dev.sup_norm_on((-interior, interior))
            lines.append(_check_line("interior_identity", sup <= tol,
                                     f"sup on [-{interior},{interior}] = {sup:.2e}"))

    if "gheat_tolerance" in check.kv:
        gtol = check.float_("gheat_tolerance")
        rg, ng = check.floats("gheat_grid", "6,385")
        pgrid = Grid(rg, int(ng))
        pf = GridFunction.sample(pgrid, payoff_fn)
        exp_fields = _Fields(sections, "expectation")
        penalty = _build_penalty(exp_fields.str_("penalty"), exp_fields)
        lam = model.shifts[:, 0] if isinstance(model, ShiftSup) else np.array([0.0, 1.0])
        g2 = Hamiltonian2.from_model(model.measure, penalty, lam)
        upde = solve_g_heat(g2, pf, sched_horizon(sections))
        pde0 = float(upde.values[pgrid.origin_index])
        ok = abs(values[-1] - pde0) <= gtol
        lines.append(_check_line("g_heat_crosscheck", ok,
                                 f"|{values[-1]:.6f} - {pde0:.6f}| <= {gtol}"))
        upde.to_csv(os.path.join(outdir, "g_heat.csv"))

    if "cross_factor" in check.kv and len(n_list) > 1:
        op = OneStepOperator(model, SecondOrder())
        compact = check.float_("compact", 2.0)
        _, diag = chernoff_limit(op, 1.0, f, n_list, tol=tol,
                                 compact=(-compact, compact),
                                 dyadic_base=sched.float_("dyadic_base", 0.75))
        diag.to_csv(os.path.join(outdir, "diagnostics.csv"))
        factor = check.float_("cross_factor")
        ok = diag.cross_schedule_gap <= factor * diag.cauchy_gap
        lines.append(_check_line("partition_independence", ok,
                                 f"cross {diag.cross_schedule_gap:.2e} <= "
                                 f"{factor} x cauchy {diag.cauchy_gap:.2e}"))
    return lines


def sched_horizon(sections):
    return _Fields(sections, "schedule").float_("horizon", 1.0)


def _run_wasserstein(sections, outdir):
    model = _build_model(sections)
    f, _ = _build_payoff(sections)
    h_grid = _Fields(sections, "schedule").floats("h")
    check = _Fields(sections, "check")
    compact = check.float_("compact", 2.0)
    op = OneStepOperator(model, FirstOrderAffine())
    diag = generator_check(op, f, h_grid, (-compact, compact))
    est0 = diag.estimate_at(0.0)

    # sup_c (c |f'(0)| - phi(c)) + m f'(0) straight from the penalty grid
    i0 = f.grid.origin_index
    slope = abs(f.fd_gradient(i0))
    pen = model.penalty
    fin = np.isfinite(pen.values)
    formula = float(np.max(pen.grid[fin] * slope - pen.values[fin]))
    m = float(model.measure.mean_and_cov()[0][0])
    formula += m * f.fd_gradient(i0)

    with open(os.path.join(outdir, "generator.csv"), "w") as fh:
        fh.write("h,defect\n")
        for h, d in zip(diag.h_grid, diag.defects):
            fh.write(f"{h:.12g},{d:.12g}\n")
    tol = check.float_("tolerance")
    return [_check_line("generator_formula", abs(est0 - formula) <= tol,
                        f"|{est0:.6f} - {formula:.6f}| <= {tol}")]


def _run_generator(sections, outdir):
    model = _build_model(sections)
    scaling = _build_scaling(sections)
    f, _ = _build_payoff(sections)
    h_grid = _Fields(sections, "schedule").floats("h")
    check = _Fields(sections, "check")
    compact = check.float_("compact", 2.0)
    op = OneStepOperator(model, scaling)
    diag = generator_check(op, f, h_grid, (-compact, compact))

    # interpolation floor: linear interpolation quantizes each defect by up
    # to hg^2 max|f''| / (4 h); below that level ordering is not meaningful
    floor = interpolation_floor(f, (-compact, compact), min(h_grid))
    mono = all(b <= a + floor for a, b in zip(diag.defects, diag.defects[1:]))
    final_tol = check.float_("final_tolerance", 0.01)
    with open(os.path.join(outdir, "generator.csv"), "w") as fh:
        fh.write("h,defect\n")
        for h, d in zip(diag.h_grid, diag.defects):
            fh.write(f"{h:.12g},{d:.12g}\n")
    return [
        _check_line("defect_monotone", mono,
                    f"defects {['%.2e' % d for d in diag.defects]}, "
                    f"floor {floor:.1e}"),
        _check_line("final_defect", diag.final_defect <= final_tol,
                    f"{diag.final_defect:.2e} <= {final_tol}"),
    ]


def _run_envelope(sections, outdir):
    model = _build_model(sections)
    scaling = _build_scaling(sections)
    f, _ = _build_payoff(sections)
    check = _Fields(sections, "check")
    n = _Fields(sections, "schedule").ints("uniform")[-1]
    compact = check.float_("compact", 2.0)
    op = OneStepOperator(model, scaling)
    u = iterate(op, Partition(1.0, 1.0 / n), f)

    zr, zn = check.floats("z_grid", "8,1601")
    yr, yn = check.floats("y_grid", "12,2401")
    z = np.linspace(-zr, zr, int(zn))
    lam = np.array([model.expect_linear(zz) for zz in z])
    amp = scaling.lip
    s_minus, s_plus = envelope(f, 1.0, z, lam - amp * np.abs(z),
                               lam + amp * np.abs(z), np.linspace(-yr, yr, int(yn)))
    mask = np.abs(f.grid.axis) <= compact + 1e-12
    slack_hi = float(np.min((s_plus.values - u.values)[mask]))
    slack_lo = float(np.min((u.values - s_minus.values)[mask]))
    u.to_csv(os.path.join(outdir, "chernoff.csv"))
    s_minus.to_csv(os.path.join(outdir, "envelope_lower.csv"))
    s_plus.to_csv(os.path.join(outdir, "envelope_upper.csv"))
    slack = check.float_("slack", -5e-3)
    return [
        _check_line("upper_envelope", slack_hi >= slack,
                    f"min(S+ - u) = {slack_hi:+.2e} >= {slack}"),
        _check_line("lower_envelope", slack_lo >= slack,
                    f"min(u - S-) = {slack_lo:+.2e} >= {slack}"),
    ]


def _run_pde_crosscheck(sections, outdir):
    model = _build_model(sections)
    f, _ = _build_payoff(sections)
    check = _Fields(sections, "check")
    t = check.float_("horizon", 1.0)
    pr, pn = check.floats("p_grid", "12,971")
    ham = Hamiltonian1.from_model(model, np.linspace(-pr, pr, int(pn)))
    u = solve_hj(ham, f, t)
    pde0 = float(u.values[f.grid.origin_index])

    yr, yn = check.floats("rate_y", "10,2001")
    rate = conjugate_rate(model, ham.p_grid, np.linspace(-yr, yr, int(yn)))
    hl = hopf_lax(f, t, rate)
    hl0 = float(hl.values[f.grid.origin_index])
    u.to_csv(os.path.join(outdir, "pde.csv"))
    hl.to_csv(os.path.join(outdir, "hopf_lax.csv"))
    tol = check.float_("tolerance")
    lines = [_check_line("pde_vs_hopf_lax", abs(pde0 - hl0) <= tol,
                         f"|{pde0:.6f} - {hl0:.6f}| <= {tol}")]
    if "target" in check.kv:
        target = check.float_("target")
        lines.append(_check_line("pde_vs_target", abs(pde0 - target) <= tol,
                                 f"|{pde0:.6f} - {target:.6f}| <= {tol}"))
    return lines


_RUNNERS = {
    "lln": _run_lln,
    "cramer": _run_cramer,
    "poly_rate": _run_poly_rate,
    "clt": _run_clt,
    "wasserstein": _run_wasserstein,
    "generator": _run_generator,
    "envelope": _run_envelope,
    "pde_crosscheck": _run_pde_crosscheck,
}


def run_config_text(text, output_root=None):
    """Parse, validate and execute one experiment; returns (ok, lines)."""
    sections = parse_config_text(text)
    exp = _Fields(sections, "experiment")
    kind = exp.str_("kind")
    if kind not in KINDS:
        exp._fail("kind", f"must be one of {KINDS}")
    name = exp.str_("name")
    root = output_root or os.environ.get("CHERNOFFLAB_OUT", "chernofflab_out")
    outdir = os.path.join(root, name)
    os.makedirs(outdir, exist_ok=True)
    start = time.perf_counter()
    lines = _RUNNERS[kind](sections, outdir)
    elapsed = time.perf_counter() - start
    ok = all(": PASS" in ln for ln in lines)
    lines.append(f"{name}: {'PASS' if ok else 'FAIL'} in {elapsed:.2f}s")
    with open(os.path.join(outdir, "summary.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return ok, lines


def list_experiments():
    """Stable catalog of built-in configs as (name, description) pairs."""
    return [(name, desc) for name, (desc, _) in BUILTINS.items()]


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="chernofflab",
        description="Convex-semigroup limit-theorem experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a config file or built-in name")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output root directory")
    sub.add_parser("list", help="list built-in experiments")
    p_desc = sub.add_parser("describe", help="print a built-in config")
    p_desc.add_argument("name")
    args = parser.parse_args(argv)

    if args.command == "list":
        for name, desc in list_experiments():
            print(f"{name}: {desc}")
        return 0
    if args.command == "describe":
        if args.name not in BUILTINS:
            print(f"unknown experiment {args.name!r}", file=sys.stderr)
            return 3
        print(BUILTINS[args.name][1], end="")
        return 0

    if args.config in BUILTINS:
        text = BUILTINS[args.config][1]
    else:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            print(f"cannot read config: {exc}", file=sys.stderr)
            return 2
    try:
        ok, lines = run_config_text(text, args.out)
    except ConfigError as exc:
        where = f" (line {exc.line})" if exc.line else ""
        where = f" (field {exc.field})" if exc.field else where
        print(f"config error: {exc}{where}", file=sys.stderr)
        return 2 if exc.line else 3
    for ln in lines:
        print(ln)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
