"""Seeded Monte Carlo suites, one per convergence statement.

Every suite derives one stream per trial from ``(seed, suite tag, trial)``
and assembles results in trial order, so a report depends only on its
parameters and seed, never on ``workers``.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

from ..central_sampler import (
    Fixed,
    LambdaLaw,
    LambdaSequence,
    OnCircle,
    _crp_rows,
    _gem_rows,
    _induced_rows,
    _place,
    induced_permutation,
    law_from_dict,
    sample_positions,
)
from ..errors import DegenerateInputError, PreconditionError, ValidationError
from ..flow_spectrum import delta_arc, distance, flow_apply, spectrum_U
from ..perm_core import Permutation, ewens_log_pmf, power, project, rescaled_eigenangles, shift_count
from ..rng import Stream, keyed_uniforms
from .report import ExperimentReport
from .stats import chi2_critical, chi_square, chi_square_two_sample, ks_critical, ks_statistic
from .testfunc import TestFunction

DEFAULT_SEED = 0xC1C1E5

_TAG_UNIFORMITY = 1
_TAG_FLOW = 2
_TAG_EIGEN = 3
_TAG_MARGINAL = 4
_TAG_CYCLE = 5
_TAG_CONSISTENCY = 6

MODES = ("almost-sure", "in-probability")


def _map(fn: Callable, args: Sequence, workers: int) -> list:
    """Ordered map, optionally over worker processes."""
    if workers <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args, chunksize=max(1, len(args) // (4 * workers))))


def _alpha_n(alpha: float, n: int) -> int:
    """round(alpha * n), halves rounded up."""
    return int(math.floor(alpha * n + 0.5))


def _check_grid(n_grid: Sequence[int]) -> list[int]:
    grid = [int(n) for n in n_grid]
    if not grid or any(n < 1 for n in grid) or any(a >= b for a, b in zip(grid, grid[1:])):
        raise ValidationError(f"n_grid must be a non-empty increasing list of positive ints: {n_grid}")
    return grid


def _check_mode(mode: str):
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")


def _trial_streams(seed: int, tag: int, trial: int, mode: str, grid: list[int]) -> list[Stream]:
    """One stream per grid point: shared in almost-sure mode, fresh otherwise."""
    base = Stream.from_seed(seed).child(tag, trial)
    if mode == "almost-sure":
        return [base] * len(grid)
    return [base.child(j + 1) for j in range(len(grid))]


def _sample_config(law: LambdaLaw, n: int, stream: Stream):
    lam = law.sample(stream.child(0))
    return sample_positions(lam, range(n), stream.child(1))


def _non_increasing(xs: Sequence[float]) -> bool:
    return all(b <= a for a, b in zip(xs, xs[1:]))


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _f(x) -> float:
    return float(x)


# --- uniformity of the normalised displacement -------------------------------


def _uniformity_trial(args):
    law, n, seed, trial, max_retries = args
    base = Stream.from_seed(seed).child(_TAG_UNIFORMITY, trial)
    for attempt in range(max_retries):
        config = _sample_config(law, n, base.child(attempt))
        by_circle: dict[int, list[int]] = {}
        for x in range(n):
            pos = config[x]
            if isinstance(pos, OnCircle):
                by_circle.setdefault(pos.circle, []).append(x)
        pairs = []
        used: set[int] = set()
        for x in range(n):
            pos = config[x]
            if x in used or not isinstance(pos, OnCircle):
                continue
            partner = next((y for y in by_circle[pos.circle] if y > x and y not in used), None)
            if partner is not None:
                pairs.append((x, partner))
                used.update((x, partner))
                if len(pairs) == 2:
                    break
        if not pairs:
            continue
        x, y = pairs[0]
        lam = config.lam.perimeter(config[x].circle)
        ratio = delta_arc(config, config[x], config[y]).value / lam
        perm = induced_permutation(config, range(n))
        k = shift_count(perm, x, y)
        finite = k / len(by_circle[config[x].circle])
        second = math.nan
        if len(pairs) == 2:
            z, w = pairs[1]
            lam2 = config.lam.perimeter(config[z].circle)
            second = delta_arc(config, config[z], config[w]).value / lam2
        return ratio, finite, second, attempt + 1
    return None


def run_delta_uniformity(law: LambdaLaw, n: int = 200, trials: int = 10_000, seed: int = DEFAULT_SEED,
                         alpha: float = 1e-3, max_retries: int = 1000, workers: int = 1,
                         dump_samples: bool = False) -> ExperimentReport:
    """KS test of delta(x, y) / lambda(x) against Uniform(0, 1).

    Each trial samples a configuration on ``{0..n-1}`` and uses the first pair
    of ids sharing a circle (redrawing the configuration when there is none).
    The finite analogue ``k_I(x, y) / |C(x) cap I|`` read off the induced
    permutation is reported alongside, as is the correlation between the
    ratios of two disjoint pairs.
    """
    if n < 2:
        raise PreconditionError("n must be at least 2")
    if isinstance(law, Fixed) and not law.lam.values:
        raise DegenerateInputError("lambda has no circles: every element is a fixed point")
    args = [(law, n, seed, t, max_retries) for t in range(trials)]
    results = _map(_uniformity_trial, args, workers)
    if any(r is None for r in results):
        raise DegenerateInputError(f"no pair of equivalent elements within {max_retries} redraws")
    ratios = np.array([r[0] for r in results])
    finite = np.array([r[1] for r in results])
    second = np.array([r[2] for r in results])
    ks = ks_statistic(ratios)
    crit = ks_critical(alpha, trials)
    both = ~np.isnan(second)
    corr = float(np.corrcoef(ratios[both], second[both])[0, 1]) if both.sum() > 2 else math.nan
    stats = [
        ("ks", ks),
        ("ks_critical", crit),
        ("ks_finite_shift", ks_statistic(finite)),
        ("mean_abs_finite_gap", _f(np.mean(np.abs(finite - ratios)))),
        ("corr_disjoint_pairs", corr),
        ("disjoint_pairs", int(both.sum())),
        ("mean_attempts", _f(np.mean([r[3] for r in results]))),
    ]
    samples = None
    if dump_samples:
        samples = _csv(["trial", "ratio", "finite_ratio", "second_ratio"],
                       ((t, float(a), float(b), float(c)) for t, (a, b, c) in enumerate(zip(ratios, finite, second))))
    params = {"law": law.to_dict(), "n": n, "trials": trials, "alpha": alpha, "max_retries": max_retries}
    return ExperimentReport("uniformity", params, seed, stats, bool(ks < crit), crit, samples)


# --- flow convergence -------------------------------------------------------


def _flow_trial(args):
    law, alpha, grid, epsilon, seed, trial, mode = args
    out = []
    for n, stream in zip(grid, _trial_streams(seed, _TAG_FLOW, trial, mode, grid)):
        config = _sample_config(law, n, stream)
        perm = power(induced_permutation(config, range(n)), _alpha_n(alpha, n))
        worst = 0.0
        for x in range(n):
            pos = config[x]
            d = distance(config, config[perm(x)], flow_apply(config, pos, alpha))
            worst = max(worst, d)
        out.append(worst)
    return out


def run_flow_convergence(law: LambdaLaw, alpha: float, n_grid: Sequence[int], epsilon: float = 0.05,
                         trials: int = 200, seed: int = DEFAULT_SEED, cap: float = 0.01,
                         mode: str = "in-probability", workers: int = 1,
                         dump_samples: bool = False) -> ExperimentReport:
    """Probability that sigma_I^round(alpha N) misses the flow by epsilon somewhere.

    For each N the failure event is ``max_x d(sigma^{alpha_N}(x), S^alpha(x))
    >= epsilon`` over ``x`` in ``I = {0..N-1}``.  Passes when the empirical
    failure probability is non-increasing along the grid and below ``cap`` at
    the largest N.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValidationError("epsilon must lie in (0, 1)")
    grid = _check_grid(n_grid)
    _check_mode(mode)
    args = [(law, float(alpha), grid, epsilon, seed, t, mode) for t in range(trials)]
    worst = np.array(_map(_flow_trial, args, workers))  # (trials, len(grid))
    p_fail = (worst >= epsilon).mean(axis=0)
    stats = []
    for j, n in enumerate(grid):
        stats.append((f"p_fail[N={n}]", _f(p_fail[j])))
    for j, n in enumerate(grid):
        stats.append((f"mean_max_distance[N={n}]", _f(worst[:, j].mean())))
    passed = _non_increasing(list(p_fail)) and p_fail[-1] < cap
    samples = None
    if dump_samples:
        samples = _csv(["trial"] + [f"max_distance_N{n}" for n in grid],
                       ([t] + [float(v) for v in row] for t, row in enumerate(worst)))
    params = {"law": law.to_dict(), "alpha": float(alpha), "n_grid": grid, "epsilon": epsilon,
              "trials": trials, "cap": cap, "mode": mode}
    return ExperimentReport("flow-converge", params, seed, stats, bool(passed), cap, samples)


# --- spectral convergence -------------------------------------------------------


def eigenangle_limit(lam: LambdaSequence, f: TestFunction) -> float:
    """Linear statistic of the spectrum of iU under ``f``."""
    lo, hi = f.support
    a = max(abs(lo), abs(hi))
    return spectrum_U(lam, a).linear_statistic(f)


def _eigen_trial(args):
    lam, f, grid, seed, trial, mode = args
    lo, hi = f.support
    window = max(abs(lo), abs(hi))
    law = Fixed(lam)
    out = []
    for n, stream in zip(grid, _trial_streams(seed, _TAG_EIGEN, trial, mode, grid)):
        config = _sample_config(law, n, stream)
        pp = rescaled_eigenangles(induced_permutation(config, range(n)), window)
        out.append(pp.linear_statistic(f))
    return out


def run_eigenangle_convergence(lam: LambdaSequence, f: TestFunction, n_grid: Sequence[int],
                               trials: int = 100, seed: int = DEFAULT_SEED, tolerance: float | None = None,
                               mode: str = "in-probability", workers: int = 1,
                               dump_samples: bool = False) -> ExperimentReport:
    """Linear statistics of rescaled eigenangles against the spectrum of iU.

    Passes when the mean absolute error is non-increasing along the grid and
    below ``tolerance`` (default ``0.05 * (1 + limit)``) at the largest N.
    """
    if f(0.0) != 0.0 and lam.dust > 0:
        raise ValidationError("infinite limit: f(0) != 0 while the dust is positive")
    grid = _check_grid(n_grid)
    _check_mode(mode)
    limit = eigenangle_limit(lam, f)
    tol = 0.05 * (1.0 + limit) if tolerance is None else float(tolerance)
    args = [(lam, f, grid, seed, t, mode) for t in range(trials)]
    values = np.array(_map(_eigen_trial, args, workers))
    err = np.abs(values - limit)
    mean_err = err.mean(axis=0)
    stats: list = [("limit", limit)]
    for name, col in (("mean_abs_error", mean_err), ("mean_statistic", values.mean(axis=0)),
                      ("min_statistic", values.min(axis=0)), ("max_statistic", values.max(axis=0))):
        stats.extend((f"{name}[N={n}]", _f(v)) for n, v in zip(grid, col))
    passed = _non_increasing(list(mean_err)) and mean_err[-1] < tol
    samples = None
    if dump_samples:
        samples = _csv(["trial"] + [f"statistic_N{n}" for n in grid],
                       ([t] + [float(v) for v in row] for t, row in enumerate(values)))
    params = {"lambda": list(lam.values), "dust": lam.dust, "f": f.to_dict(), "n_grid": grid,
              "trials": trials, "mode": mode}
    return ExperimentReport("eigenangle-converge", params, seed, stats, bool(passed), tol, samples)


# --- finite marginals ----------------------------------------------------------


def all_permutations(n: int) -> list[Permutation]:
    return [Permutation(tuple(range(n)), p) for p in itertools.permutations(range(n))]


def ewens_pmf_table(n: int, theta: float) -> np.ndarray:
    """Exact Ewens probabilities over :func:`all_permutations` order."""
    return np.array([math.exp(ewens_log_pmf(p, theta)) for p in all_permutations(n)])


class _PermIndex:
    """Maps image rows ``(T, n)`` of permutations of ``{0..n-1}`` to indices."""

    def __init__(self, n: int):
        self.n = n
        self.weights = n ** np.arange(n)
        table = np.full(n ** n, -1, dtype=np.int64)
        for i, p in enumerate(itertools.permutations(range(n))):
            table[int(np.dot(p, self.weights))] = i
        self.table = table

    def __call__(self, images: np.ndarray) -> np.ndarray:
        return self.table[images @ self.weights]


_MARGINAL_CHUNK = 2048


def _circle_chunk(args):
    """Counts of induced permutations of ``{0..n-1}`` for one chunk of trials."""
    n, theta, truncation, tail_epsilon, seed, start, stop = args
    keys = Stream.from_seed(seed).child(_TAG_MARGINAL, 0).children(range(start, stop))
    if theta == 0.0:
        values = np.ones((len(keys), 1))
    else:
        values, _, _ = _gem_rows(theta, truncation, tail_epsilon, keys)
    ids = np.arange(n, dtype=np.uint64)
    u = keyed_uniforms(keys[:, None, :], ids[None, :], slot=0, words=2)
    circ, coord = _place(values, u[..., 0], u[..., 1])
    images = _induced_rows(circ, coord)
    # exact coordinate ties go through the scalar sampler (it redraws them)
    tie = (circ[:, :, None] == circ[:, None, :]) & (coord[:, :, None] == coord[:, None, :]) & (circ[:, :, None] >= 0)
    tie &= ~np.eye(n, dtype=bool)[None]
    for row in np.flatnonzero(tie.any(axis=(1, 2))):
        lam = LambdaSequence(tuple(values[row][values[row] > 0]), max(0.0, 1.0 - float(values[row].sum())))
        stream = Stream(tuple(int(k) for k in keys[row]))
        perm = induced_permutation(sample_positions(lam, range(n), stream), range(n))
        images[row] = perm.images
    index = _PermIndex(n)
    return np.bincount(index(images), minlength=math.factorial(n))


def _crp_chunk(args):
    n, theta, seed, start, stop = args
    keys = Stream.from_seed(seed).child(_TAG_MARGINAL, 1).children(range(start, stop))
    index = _PermIndex(n)
    return np.bincount(index(_crp_rows(n, theta, keys)), minlength=math.factorial(n))


def marginal_counts(n: int, theta: float, trials: int, seed: int, truncation: int = 256,
                    tail_epsilon: float = 1e-6, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Counts over :func:`all_permutations` from the circle sampler and the CRP.

    Trial ``t`` of the circle route uses the key ``child(t)`` of its route
    stream for both lambda and the points, so it equals
    ``induced_permutation(sample_positions(sample_gem(theta, rng=key), range(n), key))``.
    """
    chunks = [(s, min(s + _MARGINAL_CHUNK, trials)) for s in range(0, trials, _MARGINAL_CHUNK)]
    circle = _map(_circle_chunk, [(n, theta, truncation, tail_epsilon, seed, a, b) for a, b in chunks], workers)
    crp = _map(_crp_chunk, [(n, theta, seed, a, b) for a, b in chunks], workers)
    return np.sum(circle, axis=0), np.sum(crp, axis=0)


def run_marginal_check(n: int, theta: float, trials: int = 200_000, seed: int = DEFAULT_SEED,
                       alpha: float = 1e-3, truncation: int = 256, tail_epsilon: float = 1e-6,
                       workers: int = 1) -> ExperimentReport:
    """Chi-square of the law of sigma_n against the exact Ewens(theta) pmf.

    lambda ~ Poisson-Dirichlet(theta) (``lambda = (1)`` when ``theta == 0``)
    feeds the circle construction; the sequential-insertion sampler is tested
    the same way, and the two samples against each other.  Passes when none
    of the three tests rejects at level ``alpha``.
    """
    if not 1 <= n <= 6:
        raise ValidationError("n must lie in 1..6 (the test enumerates all n! outcomes)")
    if theta < 0:
        raise ValidationError("theta must be non-negative")
    if trials < 1:
        raise ValidationError("trials must be positive")
    pmf = ewens_pmf_table(n, theta)
    circle, crp = marginal_counts(n, float(theta), trials, seed, truncation, tail_epsilon, workers)
    c_stat, c_dof = chi_square(circle, pmf, trials)
    r_stat, r_dof = chi_square(crp, pmf, trials)
    t_stat, t_dof = chi_square_two_sample(circle, crp)
    stats = [
        ("chi2_circle", c_stat), ("dof_circle", c_dof), ("critical_circle", chi2_critical(alpha, c_dof)),
        ("chi2_crp", r_stat), ("dof_crp", r_dof), ("critical_crp", chi2_critical(alpha, r_dof)),
        ("chi2_two_sample", t_stat), ("dof_two_sample", t_dof),
        ("critical_two_sample", chi2_critical(alpha, t_dof)),
    ]
    passed = (c_stat <= chi2_critical(alpha, c_dof) and r_stat <= chi2_critical(alpha, r_dof)
              and t_stat <= chi2_critical(alpha, t_dof))
    perms = all_permutations(n)
    samples = _csv(["permutation", "expected", "circle", "crp"],
                   ((p.to_text().strip().replace("\n", "|"), float(q), int(a), int(b))
                    for p, q, a, b in zip(perms, pmf, circle, crp)))
    params = {"n": n, "theta": float(theta), "trials": trials, "alpha": alpha,
              "truncation": truncation, "tail_epsilon": tail_epsilon}
    return ExperimentReport("marginal", params, seed, stats, bool(passed), alpha, samples)


# --- cycle lengths ----------------------------------------------------------------


def _cycle_trial(args):
    lam, grid, circle, seed, trial, mode, max_retries = args
    law = Fixed(lam)
    out = []
    base = Stream.from_seed(seed).child(_TAG_CYCLE, trial)
    config = None
    for j, n in enumerate(grid):
        if config is None or mode == "in-probability":
            for attempt in range(max_retries):
                stream = base.child(j if mode == "in-probability" else 0, attempt)
                head = sample_positions(lam, [0], stream.child(1))[0]
                if isinstance(head, OnCircle) and head.circle == circle:
                    break
            else:
                raise DegenerateInputError(f"element 0 never landed on circle {circle}")
            size = n if mode == "in-probability" else grid[-1]
            config = _sample_config(law, size, stream)
        perm = induced_permutation(config, range(n))
        cyc = perm.cycles[perm._locator[0][0]]
        out.append(len(cyc) / n)
    return out


def run_cycle_length_convergence(lam: LambdaSequence, n_grid: Sequence[int], trials: int = 100,
                                 seed: int = DEFAULT_SEED, circle: int = 1, slack: float = 1.5,
                                 abs_tol: float | None = None, min_fraction: float = 0.99,
                                 mode: str = "almost-sure", max_retries: int = 1000,
                                 workers: int = 1) -> ExperimentReport:
    """|C(x) cap I_N| / N against lambda_k for an element x on circle k.

    Element 0 is conditioned onto circle ``k`` by redrawing.  Passes when, at
    the largest N, at least ``min_fraction`` of trials lie within
    ``3 sqrt(lambda_k (1 - lambda_k) / N) * slack`` (and within ``abs_tol``
    when given).
    """
    if not lam.values:
        raise ValidationError("lambda must have at least one circle")
    lam_k = lam.perimeter(circle)
    grid = _check_grid(n_grid)
    _check_mode(mode)
    args = [(lam, grid, circle, seed, t, mode, max_retries) for t in range(trials)]
    ratios = np.array(_map(_cycle_trial, args, workers))
    dev = np.abs(ratios - lam_k)
    bounds = [3.0 * math.sqrt(lam_k * (1.0 - lam_k) / n) * slack for n in grid]
    stats = []
    for j, n in enumerate(grid):
        stats.append((f"mean_abs_deviation[N={n}]", _f(dev[:, j].mean())))
    for j, n in enumerate(grid):
        stats.append((f"fraction_within_bound[N={n}]", _f((dev[:, j] <= bounds[j]).mean())))
    passed = (dev[:, -1] <= bounds[-1]).mean() >= min_fraction
    if abs_tol is not None:
        frac = _f((dev[:, -1] < abs_tol).mean())
        stats.append(("fraction_within_abs_tol", frac))
        passed = passed and frac >= min_fraction
    stats.append(("bound_at_max_n", bounds[-1]))
    params = {"lambda": list(lam.values), "dust": lam.dust, "n_grid": grid, "trials": trials,
              "circle": circle, "slack": slack, "abs_tol": abs_tol, "min_fraction": min_fraction,
              "mode": mode, "max_retries": max_retries}
    return ExperimentReport("cycle-converge", params, seed, stats, bool(passed), bounds[-1])


# --- consistency ----------------------------------------------------------------------


def _consistency_trial(args):
    law, max_size, seed, trial = args
    stream = Stream.from_seed(seed).child(_TAG_CONSISTENCY, trial)
    u = stream.child(2).uniforms(np.arange(3 * max_size + 1, dtype=np.uint64))
    size_k = 1 + int(u[0] * max_size)
    config = _sample_config(law, size_k, stream)
    big = list(range(size_k))
    mid = [x for x in big if u[1 + x] < 0.7] or big[:1]
    small = [x for x in mid if u[1 + max_size + x] < 0.7] or mid[:1]
    sk, sj, si = (induced_permutation(config, s) for s in (big, mid, small))
    failures = int(project(sk, mid) != sj) + int(project(sj, small) != si) + int(project(sk, small) != si)
    return failures


def ewens_exactness(max_n: int = 6, thetas: Sequence[float] = (0.3, 1.0, 2.7), max_project: int = 5):
    """Largest deviations of the Ewens pmf from normalisation and from projection invariance."""
    norm_err = 0.0
    proj_err = 0.0
    for theta in thetas:
        for n in range(1, max_n + 1):
            norm_err = max(norm_err, abs(math.fsum(ewens_pmf_table(n, theta)) - 1.0))
        for n in range(2, max_project + 1):
            perms = all_permutations(n)
            pmf = ewens_pmf_table(n, theta)
            for r in range(1, n):
                for subset in itertools.combinations(range(n), r):
                    pushed: dict[Permutation, list[float]] = {}
                    for p, q in zip(perms, pmf):
                        pushed.setdefault(project(p, subset), []).append(q)
                    for p, qs in pushed.items():
                        proj_err = max(proj_err, abs(math.fsum(qs) - math.exp(ewens_log_pmf(p, theta))))
    return norm_err, proj_err


def run_consistency(law: LambdaLaw, configs: int = 100, max_size: int = 200, seed: int = DEFAULT_SEED,
                    ewens_max_n: int = 6, thetas: Sequence[float] = (0.3, 1.0, 2.7), tolerance: float = 1e-12,
                    workers: int = 1) -> ExperimentReport:
    """Projective consistency of induced permutations plus exact Ewens checks.

    For each configuration on ``K`` (``|K| <= max_size``) and random nested
    ``I <= J <= K`` the induced permutations must satisfy
    ``project(sigma_K, J) == sigma_J`` and so on, with no exception.
    """
    args = [(law, max_size, seed, t) for t in range(configs)]
    failures = sum(_map(_consistency_trial, args, workers))
    norm_err, proj_err = ewens_exactness(ewens_max_n, thetas)
    stats = [("projection_failures", failures), ("checks", 3 * configs),
             ("ewens_normalization_error", norm_err), ("ewens_projection_error", proj_err)]
    passed = failures == 0 and norm_err <= tolerance and proj_err <= tolerance
    params = {"law": law.to_dict(), "configs": configs, "max_size": max_size,
              "ewens_max_n": ewens_max_n, "thetas": list(thetas)}
    return ExperimentReport("consistency", params, seed, stats, bool(passed), tolerance)


# --- replay ----------------------------------------------------------------------------


def _lam(params: dict) -> LambdaSequence:
    return LambdaSequence(tuple(float(v) for v in params["lambda"]), float(params["dust"]))


def rerun(report: ExperimentReport, workers: int = 1) -> ExperimentReport:
    """Run the experiment described by ``report`` again from its params and seed."""
    p, seed = report.params, report.seed
    dump = report.samples is not None
    try:
        if report.name == "uniformity":
            return run_delta_uniformity(law_from_dict(p["law"]), p["n"], p["trials"], seed, p["alpha"],
                                        p["max_retries"], workers, dump)
        if report.name == "flow-converge":
            return run_flow_convergence(law_from_dict(p["law"]), p["alpha"], p["n_grid"], p["epsilon"],
                                        p["trials"], seed, p["cap"], p["mode"], workers, dump)
        if report.name == "eigenangle-converge":
            return run_eigenangle_convergence(_lam(p), TestFunction.from_dict(p["f"]), p["n_grid"], p["trials"],
                                              seed, report.tolerance, p["mode"], workers, dump)
        if report.name == "marginal":
            return run_marginal_check(p["n"], p["theta"], p["trials"], seed, p["alpha"], p["truncation"],
                                      p["tail_epsilon"], workers)
        if report.name == "cycle-converge":
            return run_cycle_length_convergence(_lam(p), p["n_grid"], p["trials"], seed, p["circle"], p["slack"],
                                                p["abs_tol"], p["min_fraction"], p["mode"], p["max_retries"],
                                                workers)
        if report.name == "consistency":
            return run_consistency(law_from_dict(p["law"]), p["configs"], p["max_size"], seed, p["ewens_max_n"],
                                   p["thetas"], report.tolerance, workers)
    except KeyError as e:
        raise ValidationError(f"report params lack {e}") from None
    raise ValidationError(f"unknown experiment {report.name!r}")
