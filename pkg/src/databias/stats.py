"""Two-sample significance testing for experiment grids."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    df: float
    degenerate: bool = False


def student_t_sf2(t: float, df: float) -> float:
    """Two-sided tail probability Pr(|T| >= |t|) for Student's t with ``df`` dof."""
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def welch_t_test(sample_a, sample_b) -> TTestResult:
    """Unequal-variance two-sample t-test with Welch-Satterthwaite dof.

    Zero variance in both samples is flagged as degenerate: equal means give
    ``t=0, p=1``; different means give ``t=±inf, p=0``.
    """
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least two values")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("samples must be finite")
    va, vb = a.var(ddof=1) / a.size, b.var(ddof=1) / b.size
    diff = a.mean() - b.mean()
    se2 = va + vb
    if se2 == 0.0:
        df = float(a.size + b.size - 2)
        if diff == 0.0:
            return TTestResult(0.0, 1.0, df, degenerate=True)
        return TTestResult(math.copysign(math.inf, diff), 0.0, df, degenerate=True)
    t = diff / math.sqrt(se2)
    df = se2 ** 2 / (va ** 2 / (a.size - 1) + vb ** 2 / (b.size - 1))
    return TTestResult(float(t), student_t_sf2(t, df), float(df))


def significance_marker(p: float | None) -> str:
    if p is None:
        return ""
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def significance_level(p: float | None) -> str:
    return {"**": "p01", "*": "p05", "": "none"}[significance_marker(p)]
