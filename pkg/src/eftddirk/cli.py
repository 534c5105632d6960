"""Command-line front end: experiment runs and verification suites as CSV.

Columns per subcommand:

  converge      scheme, h, mge, slope
  efficiency    scheme, target_mge, h_used, mge, cpu_seconds
  hamiltonian   scheme, t, abs_drift
  stability     theta, omega_h, abs_R, in_region
  dispersion    scheme, r, theta, disp, dis, fitted_order, fitted_coeff, dis_fitted_order, dis_fitted_coeff
  order-check   scheme, tree_no, tree, rho, h, residual, slope, required, certified
  fit-check     scheme, v, stage, residual
  freq-search   scheme, iteration, omega, objective
  integrate     t, y0, y1, ...

Exit status: 0 success, 2 bad flags, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from fractions import Fraction

import numpy as np

from .analysis import SingularStageError, phase_curves, phase_leading_terms, stability_region
from .fitting import final_fit_residual, internal_fit_residual, oscillatory_probes
from .frequency import OBJECTIVES, FreqSearch, estimate_omega
from .integrator import ConvergenceError, StepConfig, integrate
from .problems import PROBLEMS, get_problem
from .tableau import PoleError, build_scheme, eval_tableau
from .trees import order_residuals

EXIT_FLAGS = 2
EXIT_NUMERIC = 3

NUMERIC_ERRORS = (ConvergenceError, PoleError, SingularStageError, FloatingPointError, np.linalg.LinAlgError)


class FlagError(ValueError):
    pass


def parse_number(text: str) -> float:
    """'0.1', '1/64', '2e-3' -> float; fractions are parsed exactly."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def parse_list(text: str) -> list[float]:
    return [parse_number(t) for t in text.split(",") if t.strip()]


def parse_names(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


class Output:
    def __init__(self, path):
        self.path = path
        self.fh = None

    def __enter__(self):
        self.fh = sys.stdout if self.path in (None, "-") else open(self.path, "w", newline="", encoding="utf-8")
        self.writer = csv.writer(self.fh, lineterminator="\n")
        return self

    def row(self, *values):
        self.writer.writerow([fmt(v) for v in values])

    def __exit__(self, *exc):
        if self.fh is not sys.stdout:
            self.fh.close()
        else:
            self.fh.flush()


def _schemes(names):
    try:
        return [(n, build_scheme(n)) for n in names]
    except ValueError as exc:
        raise FlagError(str(exc)) from None


def _problem(args):
    kw = {}
    if getattr(args, "n", None) is not None:
        kw["N"] = args.n
    for item in args.param or []:
        key, _, val = item.partition("=")
        if not val:
            raise FlagError(f"--param expects key=value, got {item!r}")
        kw[key.strip().replace("-", "_")] = int(val) if val.strip().lstrip("-").isdigit() else parse_number(val)
    try:
        prob = get_problem(args.problem, **kw)
    except TypeError as exc:
        raise FlagError(f"bad --param for {args.problem}: {exc}") from None
    if args.t_end is not None:
        prob = prob.with_span(prob.t_span[0], args.t_end)
    return prob


def _omega(args, prob):
    omega = args.omega if args.omega is not None else prob.omega_hint
    if omega is None:
        raise FlagError("--omega is required for this problem")
    return omega


def _reference(prob, h_list, ref_h):
    """Exact solution if available, else a fine 3s6 run with a fitted omega hint."""
    if prob.exact is not None:
        return None
    h = ref_h if ref_h is not None else min(h_list) / 8
    ref = integrate(build_scheme("3s6"), prob, StepConfig(h=h, omega=prob.omega_hint or 1.0))
    return ref.at


def cmd_converge(args, out):
    prob = _problem(args)
    omega = _omega(args, prob)
    h_list = sorted(args.h, reverse=True)
    ref = _reference(prob, h_list, args.ref_h)
    failed = False
    out.row("scheme", "h", "mge", "slope")
    for name, spec in _schemes(args.schemes):
        prev = None
        for h in h_list:
            try:
                mge = integrate(spec, prob, StepConfig(h=h, omega=omega), reference=ref).report.max_global_error
            except NUMERIC_ERRORS as exc:
                out.row(name, h, f"error: {exc}", "")
                failed = True
                prev = None
                continue
            slope = None
            if prev is not None and mge > 0 and prev[1] > 0:
                slope = math.log(prev[1] / mge) / math.log(prev[0] / h)
            out.row(name, h, mge, slope)
            prev = (h, mge)
    return EXIT_NUMERIC if failed else 0


def _bisect_h(spec, prob, omega, target, ref, h_lo, h_hi, max_iter):
    """Geometric bisection on h until target/2 <= MGE <= 2*target."""
    best = None
    for _ in range(max_iter):
        h = math.sqrt(h_lo * h_hi)
        try:
            rep = integrate(spec, prob, StepConfig(h=h, omega=omega), reference=ref).report
            mge = rep.max_global_error
        except NUMERIC_ERRORS:
            h_hi = h
            continue
        best = (h, mge, rep.wall_seconds)
        if target / 2 <= mge <= 2 * target:
            return best, True
        if mge > target:
            h_hi = h
        else:
            h_lo = h
    return best, False


def cmd_efficiency(args, out):
    prob = _problem(args)
    omega = _omega(args, prob)
    ref = _reference(prob, [args.h_min], args.ref_h)
    failed = False
    out.row("scheme", "target_mge", "h_used", "mge", "cpu_seconds")
    for name, spec in _schemes(args.schemes):
        for target in args.target:
            best, ok = _bisect_h(spec, prob, omega, target, ref, args.h_min, args.h_max, args.max_iter)
            if not ok:
                failed = True
            if best is None:
                out.row(name, target, "", "error: no successful run", "")
            else:
                out.row(name, target, best[0], best[1], best[2])
    return EXIT_NUMERIC if failed else 0


def cmd_hamiltonian(args, out):
    prob = _problem(args)
    if prob.invariant is None:
        raise FlagError(f"problem {prob.name!r} has no invariant")
    omega = _omega(args, prob)
    failed = False
    out.row("scheme", "t", "abs_drift")
    for name, spec in _schemes(args.schemes):
        try:
            res = integrate(spec, prob, StepConfig(h=args.h, omega=omega))
        except NUMERIC_ERRORS as exc:
            out.row(name, "", f"error: {exc}")
            failed = True
            continue
        drift = res.report.invariant_drift
        n = len(drift)
        t0 = prob.t_span[0]
        for k in range(0, n, args.stride):
            t = prob.t_span[1] if k == n - 1 else t0 + k * args.h
            out.row(name, t, drift[k])
        if (n - 1) % args.stride:
            out.row(name, prob.t_span[1], drift[-1])
    return EXIT_NUMERIC if failed else 0


def cmd_stability(args, out):
    (_, spec), = _schemes([args.scheme])
    reg = stability_region(spec, (0.0, args.theta_max), (0.0, args.v_max), args.grid)
    out.fh.write(reg.to_csv())
    return 0


def cmd_dispersion(args, out):
    out.row("scheme", "r", "theta", "disp", "dis", "fitted_order", "fitted_coeff", "dis_fitted_order", "dis_fitted_coeff")
    theta_seq = args.theta_max * 2.0 ** (-0.5 * np.arange(args.points))
    for name, spec in _schemes(args.schemes):
        for r in args.r:
            rep = phase_leading_terms(spec, r, theta_seq)
            theta, disp, dis = phase_curves(spec, r, theta_seq)
            for t, dp, ds in zip(theta, disp, dis):
                out.row(name, r, t, dp, ds, rep.disp_order, rep.disp_coeff, rep.dis_order, rep.dis_coeff)
    return 0


def cmd_order_check(args, out):
    failed = False
    out.row("scheme", "tree_no", "tree", "rho", "h", "residual", "slope", "required", "certified")
    for name, spec in _schemes(args.schemes):
        for row in order_residuals(spec, args.omega, sorted(args.h, reverse=True)):
            failed |= not row.certified
            out.row(name, row.tree_no, row.tree, row.tree.rho, row.h, row.residual, row.slope, row.required, row.certified)
    return EXIT_NUMERIC if failed else 0


def cmd_fit_check(args, out):
    failed = False
    out.row("scheme", "v", "stage", "residual")
    for name, spec in _schemes(args.schemes):
        for v in args.v:
            tab = eval_tableau(spec, v)
            probe = oscillatory_probes(1.0, v)[0]
            for i in range(tab.s):
                r = abs(internal_fit_residual(tab, i, probe))
                failed |= r > args.tol
                out.row(name, v, i + 1, r)
            r = abs(final_fit_residual(tab, probe))
            failed |= r > args.tol
            out.row(name, v, "final", r)
    return EXIT_NUMERIC if failed else 0


def cmd_freq_search(args, out):
    prob = _problem(args)
    try:
        search = FreqSearch(tuple(args.bracket), args.tol, args.objective)
    except ValueError as exc:
        raise FlagError(str(exc)) from None
    ref = _reference(prob, [args.h], args.ref_h) if args.objective == "global-error" else None
    out.row("scheme", "iteration", "omega", "objective")
    for name, spec in _schemes(args.schemes):
        res = estimate_omega(spec, prob, args.h, search, reference=ref)
        for it, w, val in res.probes:
            out.row(name, it, w, val)
        out.row(name, "best", res.omega, res.value)
    return 0


def cmd_integrate(args, out):
    prob = _problem(args)
    omega = _omega(args, prob)
    (_, spec), = _schemes([args.scheme])
    res = integrate(spec, prob, StepConfig(h=args.h, omega=omega), stride=args.stride)
    out.row("t", *[f"y{k}" for k in range(prob.dim)])
    for t, y in zip(res.t, res.y):
        out.row(t, *y)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eftddirk",
        description=__doc__.split("\n\n")[0],
        epilog=__doc__.split("\n\n", 1)[1],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--output", "-o", default=None, help="CSV path (default stdout)")
        return sp

    def problem_flags(sp, default="kepler"):
        sp.add_argument("--problem", default=default, choices=sorted(PROBLEMS))
        sp.add_argument("--t-end", type=parse_number, default=None)
        sp.add_argument(
            "--omega", "--omega-hint", dest="omega", type=parse_number, default=None,
            help="fitting frequency (default: problem hint)",
        )
        sp.add_argument("--n", type=int, default=None, help="grid size N (sine-gordon)")
        sp.add_argument("--param", action="append", metavar="KEY=VALUE", help="problem parameter, repeatable")
        sp.add_argument("--ref-h", type=parse_number, default=None, help="reference stepsize when no exact solution")

    schemes_default = "2s4a,2s4a-opt,2s4b,2s4b-opt,2s5,3s6"

    sp = add("converge", cmd_converge, "max global error over a list of stepsizes")
    problem_flags(sp)
    sp.add_argument("--schemes", type=parse_names, default=parse_names(schemes_default))
    sp.add_argument("--h", type=parse_list, default=parse_list("1/8,1/16,1/32,1/64"))

    sp = add("efficiency", cmd_efficiency, "stepsize and cost needed for target errors")
    problem_flags(sp)
    sp.add_argument("--schemes", type=parse_names, default=parse_names(schemes_default))
    sp.add_argument("--target", type=parse_list, default=parse_list("1e-4,1e-6,1e-8"))
    sp.add_argument("--h-min", type=parse_number, default=1 / 4096)
    sp.add_argument("--h-max", type=parse_number, default=1 / 2)
    sp.add_argument("--max-iter", type=int, default=30)

    sp = add("hamiltonian", cmd_hamiltonian, "invariant drift along a run")
    problem_flags(sp, "fpu")
    sp.add_argument("--schemes", type=parse_names, default=parse_names(schemes_default))
    sp.add_argument("--h", type=parse_number, default=1 / 200)
    sp.add_argument("--stride", type=int, default=200)

    sp = add("stability", cmd_stability, "|R| over the (theta, omega*h) window")
    sp.add_argument("--scheme", default="3s6")
    sp.add_argument("--grid", type=int, default=500)
    sp.add_argument("--theta-max", type=parse_number, default=5.0)
    sp.add_argument("--v-max", type=parse_number, default=5.0)

    sp = add("dispersion", cmd_dispersion, "dispersion/dissipation curves and leading terms")
    sp.add_argument("--schemes", type=parse_names, default=parse_names(schemes_default))
    sp.add_argument("--r", type=parse_list, default=parse_list("0,1/2"))
    sp.add_argument("--theta-max", type=parse_number, default=0.8)
    sp.add_argument("--points", type=int, default=16, help="number of theta values (ratio 2^-1/2)")

    sp = add("order-check", cmd_order_check, "tree residual slopes")
    sp.add_argument("--schemes", type=parse_names, default=parse_names(schemes_default))
    sp.add_argument("--omega", type=parse_number, default=1.0)
    sp.add_argument("--h", type=parse_list, default=parse_list("1/2,1/4,1/8,1/16,1/32,1/64"))

    sp = add("fit-check", cmd_fit_check, "exponential-fitting residuals at lambda = i*omega")
    sp.add_argument("--schemes", type=parse_names, default=parse_names(schemes_default))
    sp.add_argument("--v", type=parse_list, default=parse_list("0.1,0.5,1,2"))
    sp.add_argument("--tol", type=parse_number, default=1e-12)

    sp = add("freq-search", cmd_freq_search, "golden-section search for the fitting frequency")
    problem_flags(sp)
    sp.add_argument("--schemes", type=parse_names, default=parse_names("3s6"))
    sp.add_argument("--h", type=parse_number, default=1 / 16)
    sp.add_argument("--bracket", type=parse_list, default=parse_list("4.5,5.5"))
    sp.add_argument("--tol", type=parse_number, default=1e-6)
    sp.add_argument("--objective", choices=OBJECTIVES, default="global-error")

    sp = add("integrate", cmd_integrate, "trajectory dump")
    problem_flags(sp)
    sp.add_argument("--scheme", default="3s6")
    sp.add_argument("--h", type=parse_number, default=1 / 16)
    sp.add_argument("--stride", type=int, default=1)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for attr in ("stride", "grid", "n", "points", "max_iter"):
        value = getattr(args, attr, None)
        if value is not None and value < 1:
            parser.error(f"--{attr.replace('_', '-')} must be positive")
    if getattr(args, "bracket", None) is not None and len(args.bracket) != 2:
        parser.error("--bracket takes two values lo,hi")
    try:
        with Output(args.output) as out:
            return args.func(args, out)
    except FlagError as exc:
        print(f"eftddirk: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except NUMERIC_ERRORS as exc:
        print(f"eftddirk: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"eftddirk: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except OSError as exc:
        print(f"eftddirk: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS


if __name__ == "__main__":
    sys.exit(main())
