"""Nelder-Mead polytope minimization.

Plain downhill-simplex descent with the classical reflection/expansion/
contraction/shrink moves.  The landscape this package minimizes over is
rough, so the search driver chains several runs per random start; this
module only implements a single run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class NelderMeadResult:
    x: np.ndarray
    fun: float
    evals: int
    converged: bool  # False means the evaluation budget ran out first


def initial_simplex(x0: np.ndarray, step: float = 0.1) -> np.ndarray:
    """x0 plus one axis-aligned perturbation per coordinate.

    The perturbation of coordinate i is step * max(|x0_i|, 1).
    """
    d = len(x0)
    sim = np.tile(x0, (d + 1, 1))
    for i in range(d):
        sim[i + 1, i] += step * max(abs(x0[i]), 1.0)
    return sim


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0: np.ndarray,
    max_evals: int,
    f_tol: float = 1e-12,
    x_tol: float = 1e-10,
    adaptive: bool = False,
    step: float = 0.1,
    bound: float | None = None,
) -> NelderMeadResult:
    """Minimize `objective` from `x0` with a Nelder-Mead simplex.

    Stops when the function spread across the simplex is below `f_tol`
    and the simplex diameter is below `x_tol`, or when `max_evals`
    evaluations have been spent (reported via ``converged=False``).  The
    returned point is the best ever evaluated, never worse than f(x0).

    `adaptive` switches to dimension-scaled expansion/contraction/shrink
    coefficients, which behave much better for large dimension.  `bound`,
    if given, clips every candidate point into [-bound, bound]^d.
    """
    x0 = np.asarray(x0, dtype=float)
    d = len(x0)
    if d < 1:
        raise ValueError("x0 must have at least one coordinate")
    if max_evals < d + 2:
        raise ValueError(f"max_evals={max_evals} cannot even evaluate the initial simplex")
    if adaptive:
        rho, chi, psi, sigma = 1.0, 1.0 + 2.0 / d, 0.75 - 0.5 / d, 1.0 - 1.0 / d
    else:
        rho, chi, psi, sigma = 1.0, 2.0, 0.5, 0.5

    def clip(x):
        return np.clip(x, -bound, bound) if bound is not None else x

    sim = np.array([clip(p) for p in initial_simplex(x0, step)])
    fs = np.empty(d + 1)
    evals = 0
    for i in range(d + 1):
        fs[i] = objective(sim[i])
        evals += 1

    converged = False
    while evals < max_evals:
        order = np.argsort(fs, kind="stable")
        sim = sim[order]
        fs = fs[order]
        if fs[-1] - fs[0] < f_tol and np.max(np.abs(sim[1:] - sim[0])) < x_tol:
            converged = True
            break

        centroid = np.mean(sim[:-1], axis=0)
        xr = clip(centroid + rho * (centroid - sim[-1]))
        fr = objective(xr)
        evals += 1
        if fr < fs[0]:
            if evals < max_evals:
                xe = clip(centroid + rho * chi * (centroid - sim[-1]))
                fe = objective(xe)
                evals += 1
                if fe < fr:
                    sim[-1], fs[-1] = xe, fe
                else:
                    sim[-1], fs[-1] = xr, fr
            else:
                sim[-1], fs[-1] = xr, fr
        elif fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
        else:
            shrink = False
            if evals < max_evals:
                if fr < fs[-1]:
                    xc = clip(centroid + psi * rho * (centroid - sim[-1]))
                    fc = objective(xc)
                    evals += 1
                    if fc <= fr:
                        sim[-1], fs[-1] = xc, fc
                    else:
                        shrink = True
                else:
                    xcc = clip(centroid - psi * (centroid - sim[-1]))
                    fcc = objective(xcc)
                    evals += 1
                    if fcc < fs[-1]:
                        sim[-1], fs[-1] = xcc, fcc
                    else:
                        shrink = True
            if shrink:
                for i in range(1, d + 1):
                    if evals >= max_evals:
                        break
                    sim[i] = clip(sim[0] + sigma * (sim[i] - sim[0]))
                    fs[i] = objective(sim[i])
                    evals += 1

    best = int(np.argmin(fs))
    return NelderMeadResult(
        x=sim[best].copy(), fun=float(fs[best]), evals=evals, converged=converged
    )
