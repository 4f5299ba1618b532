"""Small Nelder-Mead simplex minimizer on plain tuples.

scipy's ``minimize`` costs a few milliseconds of setup per call, which
dominates when the expectation update runs tens of thousands of times in a
sweep; the problems here are 2-D, so a tuple implementation is much cheaper.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

Point = tuple[float, ...]


def nelder_mead(
    func: Callable[[Point], float],
    x0: Sequence[float],
    step: float | Sequence[float] = 0.1,
    xatol: float = 1e-11,
    fatol: float = 1e-15,
    max_iter: int = 1000,
) -> tuple[Point, float, int]:
    """Minimize ``func`` from ``x0``; return ``(x_best, f_best, n_evals)``.

    Standard coefficients (reflect 1, expand 2, contract 1/2, shrink 1/2).
    ``x0`` is a vertex of the initial simplex, so the result is never worse
    than ``func(x0)``. Non-finite function values are treated as +inf.
    """
    n = len(x0)
    steps = [float(step)] * n if isinstance(step, (int, float)) else [float(s) for s in step]
    if n == 2:
        return _nelder_mead_2d(func, x0, steps, xatol, fatol, max_iter)
    nfev = 0

    def f(x: Point) -> float:
        nonlocal nfev
        nfev += 1
        v = func(x)
        return v if v == v else math.inf

    start = tuple(float(v) for v in x0)
    simplex = [(f(start), start)]
    for i in range(n):
        x = list(start)
        x[i] += steps[i]
        x = tuple(x)
        simplex.append((f(x), x))

    for _ in range(max_iter):
        simplex.sort(key=lambda item: item[0])
        f_best, x_best = simplex[0]
        f_worst, x_worst = simplex[-1]
        size = max(abs(a - b) for _, x in simplex[1:] for a, b in zip(x, x_best))
        if size <= xatol and f_worst - f_best <= fatol:
            break

        centroid = tuple(sum(x[i] for _, x in simplex[:-1]) / n for i in range(n))
        xr = tuple(c + (c - w) for c, w in zip(centroid, x_worst))
        fr = f(xr)
        if fr < f_best:
            xe = tuple(c + 2.0 * (c - w) for c, w in zip(centroid, x_worst))
            fe = f(xe)
            simplex[-1] = (fe, xe) if fe < fr else (fr, xr)
            continue
        if fr < simplex[-2][0]:
            simplex[-1] = (fr, xr)
            continue
        if fr < f_worst:
            xc = tuple(c + 0.5 * (r - c) for c, r in zip(centroid, xr))
            fc = f(xc)
            if fc <= fr:
                simplex[-1] = (fc, xc)
                continue
        else:
            xc = tuple(c + 0.5 * (w - c) for c, w in zip(centroid, x_worst))
            fc = f(xc)
            if fc < f_worst:
                simplex[-1] = (fc, xc)
                continue
        shrunk = [simplex[0]]
        for _, x in simplex[1:]:
            xs = tuple(b + 0.5 * (a - b) for a, b in zip(x, x_best))
            shrunk.append((f(xs), xs))
        simplex = shrunk

    simplex.sort(key=lambda item: item[0])
    f_best, x_best = simplex[0]
    return x_best, f_best, nfev


def _nelder_mead_2d(func, x0, steps, xatol, fatol, max_iter):
    # unrolled copy of the loop above; same arithmetic, so identical results
    nfev = 0

    def f(a: float, b: float) -> float:
        nonlocal nfev
        nfev += 1
        v = func((a, b))
        return v if v == v else math.inf

    a0, b0 = float(x0[0]), float(x0[1])
    simplex = [
        (f(a0, b0), a0, b0),
        (f(a0 + steps[0], b0), a0 + steps[0], b0),
        (f(a0, b0 + steps[1]), a0, b0 + steps[1]),
    ]
    key = _first
    for _ in range(max_iter):
        simplex.sort(key=key)
        fb, ab, bb = simplex[0]
        fm, am, bm = simplex[1]
        fw, aw, bw = simplex[2]
        size = max(abs(am - ab), abs(bm - bb), abs(aw - ab), abs(bw - bb))
        if size <= xatol and fw - fb <= fatol:
            break
        ca, cb = (ab + am) / 2, (bb + bm) / 2
        ra, rb = ca + (ca - aw), cb + (cb - bw)
        fr = f(ra, rb)
        if fr < fb:
            ea, eb = ca + 2.0 * (ca - aw), cb + 2.0 * (cb - bw)
            fe = f(ea, eb)
            simplex[2] = (fe, ea, eb) if fe < fr else (fr, ra, rb)
            continue
        if fr < fm:
            simplex[2] = (fr, ra, rb)
            continue
        if fr < fw:
            ka, kb = ca + 0.5 * (ra - ca), cb + 0.5 * (rb - cb)
            fc = f(ka, kb)
            if fc <= fr:
                simplex[2] = (fc, ka, kb)
                continue
        else:
            ka, kb = ca + 0.5 * (aw - ca), cb + 0.5 * (bw - cb)
            fc = f(ka, kb)
            if fc < fw:
                simplex[2] = (fc, ka, kb)
                continue
        ma, mb = ab + 0.5 * (am - ab), bb + 0.5 * (bm - bb)
        wa, wb = ab + 0.5 * (aw - ab), bb + 0.5 * (bw - bb)
        simplex = [simplex[0], (f(ma, mb), ma, mb), (f(wa, wb), wa, wb)]

    simplex.sort(key=key)
    fb, ab, bb = simplex[0]
    return (ab, bb), fb, nfev


def _first(item):
    return item[0]
