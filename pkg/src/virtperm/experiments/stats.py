"""Goodness-of-fit statistics used by the experiment suites."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import stats as _st

from ..errors import PreconditionError, ValidationError


def ks_statistic(samples: Sequence[float]) -> float:
    """Sup distance between the empirical CDF of ``samples`` and Uniform(0, 1)."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(x)
    if n == 0:
        raise PreconditionError("KS statistic of an empty sample")
    x = np.clip(x, 0.0, 1.0)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - x)
    d_minus = np.max(x - (i - 1) / n)
    return float(max(d_plus, d_minus))


def ks_critical(alpha: float, n: int) -> float:
    """Asymptotic (Kolmogorov) critical value ``c(alpha) / sqrt(n)``."""
    return float(_st.kstwobign.isf(alpha)) / math.sqrt(n)


def chi_square(observed: Sequence[int], expected: Sequence[float], total: int) -> tuple[float, int]:
    """Pearson statistic of counts against category probabilities.

    Categories with zero probability and zero count are skipped and do not
    count towards the degrees of freedom.
    """
    obs = np.asarray(observed, dtype=np.float64)
    p = np.asarray(expected, dtype=np.float64)
    if obs.shape != p.shape or obs.ndim != 1:
        raise ValidationError("observed and expected must list the same categories")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValidationError(f"expected probabilities sum to {p.sum()}")
    if int(total) != int(round(obs.sum())) or total <= 0:
        raise ValidationError("total must be positive and equal the observed count")
    if np.any((p == 0) & (obs > 0)):
        raise ValidationError("observed count in a category of zero probability")
    live = p > 0
    e = total * p[live]
    stat = float(np.sum((obs[live] - e) ** 2 / e))
    return stat, int(live.sum()) - 1


def chi_square_two_sample(a: Sequence[int], b: Sequence[int]) -> tuple[float, int]:
    """Two-sample chi-square homogeneity statistic for count vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValidationError("count vectors differ in length")
    na, nb = a.sum(), b.sum()
    if na <= 0 or nb <= 0:
        raise ValidationError("both samples must be non-empty")
    live = (a + b) > 0
    ka, kb = math.sqrt(nb / na), math.sqrt(na / nb)
    stat = float(np.sum((ka * a[live] - kb * b[live]) ** 2 / (a[live] + b[live])))
    return stat, int(live.sum()) - 1


def chi2_critical(alpha: float, dof: int) -> float:
    return float(_st.chi2.isf(alpha, dof)) if dof > 0 else 0.0
