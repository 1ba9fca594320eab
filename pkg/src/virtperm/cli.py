"""Command-line entry point: ``virtperm <subcommand> ...``.

Exit codes: 0 on success or a passing experiment, 2 when an experiment's
statistical criterion fails, 1 on usage, validation or I/O errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

from .central_sampler import Fixed, PoissonDirichlet, induced_permutation, make_lambda, sample_gem, sample_positions
from .errors import VirtpermError
from .experiments import (
    DEFAULT_SEED,
    MODES,
    ExperimentReport,
    TestFunction,
    rerun,
    run_consistency,
    run_cycle_length_convergence,
    run_delta_uniformity,
    run_eigenangle_convergence,
    run_flow_convergence,
    run_marginal_check,
)
from .flow_spectrum import spectrum_U
from .perm_core import Permutation, rescaled_eigenangles
from .rng import Stream

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAIL = 2

# sampling utilities draw lambda and positions from these children of the seed
_TAG_SAMPLE_LAMBDA = 0
_TAG_SAMPLE_POINTS = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse, but usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# --- argument types -----------------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


# --- parser -----------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, fmt: bool = True):
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="master seed (decimal or 0x hex)")
    p.add_argument("--out", default=None, help="output file (standard output when omitted)")
    if fmt:
        p.add_argument("--format", choices=("json", "csv"), default="json", help="output format")


def _law_flags(p: argparse.ArgumentParser, required: bool = True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--theta", type=float, default=None, help="lambda ~ Poisson-Dirichlet(theta)")
    g.add_argument("--lambda", dest="lam", type=_floats, default=None, help="fixed lambda, e.g. 0.5,0.3,0.2")
    p.add_argument("--truncation", type=int, default=256, help="stick-breaking truncation for --theta")
    p.add_argument("--tail-epsilon", type=float, default=1e-6, help="stick-breaking stops below this mass")


def _fixed_lambda(p: argparse.ArgumentParser):
    p.add_argument("--lambda", dest="lam", type=_floats, required=True, help="fixed lambda, e.g. 0.6,0.4")


def _experiment_flags(p: argparse.ArgumentParser, plot: bool = False, dump: bool = True):
    p.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    if dump:
        p.add_argument("--dump-samples", default=None, help="also write per-trial samples as CSV here")
    if plot:
        p.add_argument("--plot", default=None, help="write an SVG chart of the per-N series here")


def _grid_flags(p: argparse.ArgumentParser, grid: str, trials: int, mode: str):
    p.add_argument("--n-grid", type=_ints, default=grid, help="increasing list of N, e.g. 100,1000")
    p.add_argument("--trials", type=int, default=trials, help="independent trials per N")
    p.add_argument("--mode", choices=MODES, default=mode,
                   help="almost-sure: one nested sample per trial; in-probability: fresh samples per N")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="virtperm", formatter_class=fmt,
                     description="Virtual permutations under central measures.")
    parser.add_argument("--replay", default=None,
                        help="rerun the run recorded in a JSON file written by this tool")
    parser.add_argument("--out", default=None, help="with --replay: output file")
    parser.add_argument("--workers", type=int, default=1, help="with --replay: worker processes")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    def add(name, text):
        return sub.add_parser(name, help=text, description=text, formatter_class=fmt)

    p = add("sample", "Sample lambda and positions of ids 0..n-1; report the induced permutation.")
    _law_flags(p)
    p.add_argument("--n", type=int, default=10, help="number of ids")
    _common(p)

    p = add("spectrum", "Atoms of the spectrum of iU in a window (lambda sampled when --theta is given).")
    _law_flags(p)
    p.add_argument("--window", type=float, default=50.0, help="half-width A of the window [-A, A]")
    _common(p)

    p = add("eigenangles", "Rescaled eigenangles of a sampled or given permutation.")
    _law_flags(p, required=False)
    p.add_argument("--perm", default=None, help="file with one cycle per line (instead of sampling)")
    p.add_argument("--n", type=int, default=1000, help="number of ids when sampling")
    p.add_argument("--window", type=float, default=50.0, help="half-width A of the window [-A, A]")
    _common(p)

    p = add("marginal", "Chi-square of the induced permutation of {0..n-1} against Ewens(theta).")
    p.add_argument("--n", type=int, default=4, help="size of the marginal (at most 6)")
    p.add_argument("--theta", type=float, required=True, help="Ewens parameter")
    p.add_argument("--trials", type=int, default=200_000, help="samples per sampler")
    p.add_argument("--alpha", type=float, default=1e-3, help="significance level")
    p.add_argument("--truncation", type=int, default=256, help="stick-breaking truncation")
    p.add_argument("--tail-epsilon", type=float, default=1e-6, help="stick-breaking stops below this mass")
    _common(p)
    _experiment_flags(p, dump=False)

    p = add("uniformity", "KS test of delta(x, y) / lambda(x) against Uniform(0, 1).")
    _law_flags(p)
    p.add_argument("--n", type=int, default=200, help="ids per configuration")
    p.add_argument("--trials", type=int, default=10_000, help="number of pooled ratios")
    p.add_argument("--alpha", type=float, default=1e-3, help="significance level")
    p.add_argument("--max-retries", type=int, default=1000, help="redraws when no pair shares a circle")
    _common(p)
    _experiment_flags(p)

    p = add("cycle-converge", "Relative cycle length of an element against its circle perimeter.")
    _fixed_lambda(p)
    _grid_flags(p, "100,1000,10000", 100, "almost-sure")
    p.add_argument("--circle", type=int, default=1, help="circle (1-based) element 0 is conditioned on")
    p.add_argument("--slack", type=float, default=1.5, help="multiplier on the 3-sigma bound")
    p.add_argument("--abs-tol", type=float, default=None, help="additional absolute tolerance at the largest N")
    p.add_argument("--min-fraction", type=float, default=0.99, help="fraction of trials that must be within bounds")
    p.add_argument("--max-retries", type=int, default=1000, help="redraws to put element 0 on the circle")
    _common(p)
    _experiment_flags(p, plot=True, dump=False)

    p = add("flow-converge", "Failure probability of sigma^round(alpha N) against the flow S^alpha.")
    _law_flags(p)
    p.add_argument("--alpha", type=float, required=True, help="flow time")
    p.add_argument("--epsilon", type=float, default=0.05, help="distance threshold")
    p.add_argument("--cap", type=float, default=0.01, help="bound on p_fail at the largest N")
    _grid_flags(p, "100,1000,10000", 200, "in-probability")
    _common(p)
    _experiment_flags(p, plot=True)

    p = add("eigenangle-converge", "Linear statistic of rescaled eigenangles against the spectrum of iU.")
    _fixed_lambda(p)
    p.add_argument("--center", type=float, default=2 * math.pi, help="centre of the triangle test function")
    p.add_argument("--half-width", type=float, default=math.pi, help="half-width of the triangle")
    p.add_argument("--height", type=float, default=1.0, help="height of the triangle")
    p.add_argument("--tolerance", type=float, default=None, help="error bound at the largest N (0.05(1+limit))")
    _grid_flags(p, "100,1000,10000", 100, "in-probability")
    _common(p)
    _experiment_flags(p, plot=True)

    p = add("consistency", "Projective consistency of induced permutations and exact Ewens identities.")
    _law_flags(p)
    p.add_argument("--configs", type=int, default=100, help="number of sampled configurations")
    p.add_argument("--max-size", type=int, default=200, help="largest |K|")
    _common(p)
    _experiment_flags(p, dump=False)
    return parser


# --- helpers -------------------------------------------------------------------------------


def _law(args):
    if args.theta is not None:
        return PoissonDirichlet(args.theta, args.truncation, args.tail_epsilon)
    return Fixed(make_lambda(args.lam))


def _sampled_lambda(args):
    if args.theta is not None:
        return sample_gem(args.theta, args.truncation, args.tail_epsilon,
                          Stream.from_seed(args.seed).child(_TAG_SAMPLE_LAMBDA))
    return make_lambda(args.lam)


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _run_record(argv: Sequence[str]) -> dict:
    """The arguments needed to rerun, without the output destination."""
    kept: list[str] = []
    skip = False
    for a in argv:
        if skip:
            skip = False
        elif a == "--out":
            skip = True
        elif not a.startswith("--out="):
            kept.append(a)
    return {"argv": kept}


def _stats_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["statistic", "value"])
    for k, v in report.statistics:
        w.writerow([k, repr(v) if isinstance(v, float) else v])
    w.writerow(["pass", report.passed])
    return buf.getvalue()


def _finish_report(report: ExperimentReport, args) -> int:
    if args.format == "csv":
        _emit(_stats_csv(report), args.out)
    else:
        _emit(report.to_json(), args.out)
    if getattr(args, "dump_samples", None) and report.samples is not None:
        _emit(report.samples, args.dump_samples)
    if getattr(args, "plot", None):
        from .plotting import render_plot  # matplotlib is only imported when plotting
        render_plot(report, args.plot)
    print(report.summary(), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


# --- subcommands -------------------------------------------------------------------------


def _cmd_sample(args, argv) -> int:
    lam = _sampled_lambda(args)
    if args.n < 0:
        raise UsageError("--n must be non-negative")
    config = sample_positions(lam, range(args.n), Stream.from_seed(args.seed).child(_TAG_SAMPLE_POINTS))
    perm = induced_permutation(config, range(args.n))
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "circle", "coord", "atom", "image"])
        for x in config.ids():
            pos = config[x]
            if hasattr(pos, "coord"):
                w.writerow([x, pos.circle, repr(pos.coord), "", perm(x)])
            else:
                w.writerow([x, "", "", pos.atom, perm(x)])
        _emit(buf.getvalue(), args.out)
    else:
        data = config.to_dict()
        data["cycles"] = [list(c) for c in perm.cycles]
        data["run"] = _run_record(argv)
        _emit(json.dumps(data, indent=2) + "\n", args.out)
    return EXIT_OK


def _emit_process(pp, args, argv):
    if args.format == "csv":
        _emit(pp.to_csv(), args.out)
    else:
        data = pp.to_dict()
        data["run"] = _run_record(argv)
        _emit(json.dumps(data, indent=2) + "\n", args.out)


def _cmd_spectrum(args, argv) -> int:
    _emit_process(spectrum_U(_sampled_lambda(args), args.window), args, argv)
    return EXIT_OK


def _cmd_eigenangles(args, argv) -> int:
    if args.perm is not None:
        if args.theta is not None or args.lam is not None:
            raise UsageError("--perm excludes --theta/--lambda")
        with open(args.perm, encoding="utf-8") as fh:
            perm = Permutation.from_text(fh.read())
    else:
        if args.theta is None and args.lam is None:
            raise UsageError("one of --theta, --lambda or --perm is required")
        if args.n < 1:
            raise UsageError("--n must be positive")
        config = sample_positions(_sampled_lambda(args), range(args.n),
                                  Stream.from_seed(args.seed).child(_TAG_SAMPLE_POINTS))
        perm = induced_permutation(config, range(args.n))
    _emit_process(rescaled_eigenangles(perm, args.window), args, argv)
    return EXIT_OK


def _cmd_marginal(args, argv) -> int:
    return _finish_report(run_marginal_check(args.n, args.theta, args.trials, args.seed, args.alpha,
                                             args.truncation, args.tail_epsilon, args.workers), args)


def _cmd_uniformity(args, argv) -> int:
    report = run_delta_uniformity(_law(args), args.n, args.trials, args.seed, args.alpha, args.max_retries,
                                  args.workers, dump_samples=args.dump_samples is not None)
    return _finish_report(report, args)


def _cmd_cycle(args, argv) -> int:
    report = run_cycle_length_convergence(make_lambda(args.lam), args.n_grid, args.trials, args.seed, args.circle,
                                          args.slack, args.abs_tol, args.min_fraction, args.mode,
                                          args.max_retries, args.workers)
    return _finish_report(report, args)


def _cmd_flow(args, argv) -> int:
    report = run_flow_convergence(_law(args), args.alpha, args.n_grid, args.epsilon, args.trials, args.seed,
                                  args.cap, args.mode, args.workers, dump_samples=args.dump_samples is not None)
    return _finish_report(report, args)


def _cmd_eigen(args, argv) -> int:
    f = TestFunction.triangle(args.center, args.half_width, args.height)
    report = run_eigenangle_convergence(make_lambda(args.lam), f, args.n_grid, args.trials, args.seed,
                                        args.tolerance, args.mode, args.workers,
                                        dump_samples=args.dump_samples is not None)
    return _finish_report(report, args)


def _cmd_consistency(args, argv) -> int:
    report = run_consistency(_law(args), args.configs, args.max_size, args.seed, workers=args.workers)
    return _finish_report(report, args)


_COMMANDS = {
    "sample": _cmd_sample,
    "spectrum": _cmd_spectrum,
    "eigenangles": _cmd_eigenangles,
    "marginal": _cmd_marginal,
    "uniformity": _cmd_uniformity,
    "cycle-converge": _cmd_cycle,
    "flow-converge": _cmd_flow,
    "eigenangle-converge": _cmd_eigen,
    "consistency": _cmd_consistency,
}


def _replay(path: str, out: str | None, workers: int) -> int:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not JSON: {e}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path} is not a record written by virtperm")
    if "run" in data:
        argv = list(data["run"]["argv"])
        if out is not None:
            argv += ["--out", out]
        return main(argv)
    if "name" in data and "params" in data:
        original = ExperimentReport.from_dict(data)
        report = rerun(original, workers)
        _emit(report.to_json(), out)
        if report.to_dict() != original.to_dict():
            print(f"replay of {path} differs from the recorded report", file=sys.stderr)
            return EXIT_ERROR
        print(report.summary(), file=sys.stderr)
        return EXIT_OK if report.passed else EXIT_FAIL
    raise UsageError(f"{path} is not a record written by virtperm")


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.replay is not None:
            if args.command is not None:
                raise UsageError("--replay takes no subcommand")
            return _replay(args.replay, args.out, args.workers)
        if args.command is None:
            raise UsageError("a subcommand is required")
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be at least 1")
        return _COMMANDS[args.command](args, argv)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"virtperm: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (VirtpermError, ValueError, OSError) as e:
        print(f"virtperm: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
