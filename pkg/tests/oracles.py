"""Independent reference computations used to check the package routines.

Each oracle takes a deliberately different route from the implementation it
checks: brute-force enumeration, numerical differentiation or quadrature.
"""
import itertools
import math

import numpy as np
from scipy import integrate


def brute_force_auc(pos, neg):
    """Average over every (positive, negative) pair; ties count one half."""
    total = 0.0
    for p, n in itertools.product(pos, neg):
        total += 1.0 if p > n else 0.5 if p == n else 0.0
    return total / (len(pos) * len(neg))


def naive_logistic_loss(params, X, y, lam):
    w, b = params[:-1], params[-1]
    loss = 0.0
    for xi, yi in zip(X, y):
        z = float(np.dot(xi, w) + b)
        p = 1.0 / (1.0 + math.exp(-z))
        loss -= yi * math.log(p) + (1 - yi) * math.log(1 - p)
    return loss / len(y) + 0.5 * lam * float(np.dot(w, w))


def central_difference(fn, params, h=1e-6):
    grad = np.zeros_like(params)
    for j in range(params.size):
        e = np.zeros_like(params)
        e[j] = h
        grad[j] = (fn(params + e) - fn(params - e)) / (2 * h)
    return grad


def t_density(x, df):
    log_c = math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)
    return math.exp(log_c) * (1 + x * x / df) ** (-(df + 1) / 2)


def t_two_sided_p_by_quadrature(t, df):
    tail, _ = integrate.quad(t_density, abs(t), math.inf, args=(df,), epsabs=1e-13, epsrel=1e-12)
    return 2 * tail


def welch_by_hand(a, b):
    a, b = list(map(float, a)), list(map(float, b))
    ma, mb = sum(a) / len(a), sum(b) / len(b)
    va = sum((x - ma) ** 2 for x in a) / (len(a) - 1)
    vb = sum((x - mb) ** 2 for x in b) / (len(b) - 1)
    se2 = va / len(a) + vb / len(b)
    t = (ma - mb) / math.sqrt(se2)
    df = se2 ** 2 / ((va / len(a)) ** 2 / (len(a) - 1) + (vb / len(b)) ** 2 / (len(b) - 1))
    return t, df


def pearson(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    xm, ym = x - x.mean(), y - y.mean()
    return float((xm * ym).sum() / math.sqrt((xm * xm).sum() * (ym * ym).sum()))
