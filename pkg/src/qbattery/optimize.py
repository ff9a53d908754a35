"""Seeded multi-start derivative-free maximization over angle vectors.

The objectives in this package (work yields over local-unitary angles,
information backflow over state-pair angles) are smooth, low-dimensional and
multimodal in the phases, so each start runs a Nelder-Mead simplex search
and the starts are drawn from a scrambled low-discrepancy sequence on the
torus.  The zero vector is always included as start 0 because the angle
charts put their canonical representative there.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc


@dataclass(frozen=True)
class OptimizerSettings:
    starts: int = 24
    seed: int = 0
    max_evals: int = 2000
    f_tol: float = 1e-9
    agree_tol: float = 1e-6

    def for_grid_index(self, index: int) -> "OptimizerSettings":
        """Derived settings whose seed is a pure function of (seed, index), so
        sweep results do not depend on execution order or thread count."""
        return replace(self, seed=self.seed * 1_000_003 + index)


@dataclass(frozen=True)
class OptimizerReport:
    n_starts: int
    best_start: int
    best_value: float
    best_x: np.ndarray
    spread: float
    converged: bool
    evaluations: int


def start_points(dim: int, settings: OptimizerSettings, span: float = 2.0 * np.pi) -> np.ndarray:
    """Zero vector plus scrambled Halton points on [0, span)^dim."""
    if settings.starts < 1:
        raise ValueError("need at least one start")
    pts = np.zeros((settings.starts, dim))
    if settings.starts > 1:
        rng = np.random.default_rng(np.random.SeedSequence(settings.seed))
        sampler = qmc.Halton(d=dim, scramble=True, seed=rng)
        pts[1:] = sampler.random(settings.starts - 1) * span
    return pts


def multistart_maximize(
    objective,
    dim: int,
    settings: OptimizerSettings | None = None,
    span: float = 2.0 * np.pi,
) -> tuple[np.ndarray, float, OptimizerReport]:
    """Maximize objective(x) for x in R^dim from multiple seeded starts.

    Returns (best_x, best_value, report); the report flags non-convergence
    (no second start agreeing with the best within agree_tol) instead of
    raising.
    """
    settings = settings or OptimizerSettings()
    values = np.empty(settings.starts)
    solutions = np.empty((settings.starts, dim))
    evaluations = 0
    for i, x0 in enumerate(start_points(dim, settings, span)):
        res = minimize(
            lambda x: -objective(x),
            x0,
            method="Nelder-Mead",
            options={
                "maxfev": settings.max_evals,
                "fatol": settings.f_tol,
                "xatol": 1e-6,
            },
        )
        values[i] = -res.fun
        solutions[i] = res.x
        evaluations += res.nfev
    best = int(np.argmax(values))
    agree = int(np.sum(values >= values[best] - settings.agree_tol))
    report = OptimizerReport(
        n_starts=settings.starts,
        best_start=best,
        best_value=float(values[best]),
        best_x=solutions[best],
        spread=float(values.max() - values.min()),
        converged=settings.starts == 1 or agree >= 2,
        evaluations=evaluations,
    )
    return solutions[best], float(values[best]), report
