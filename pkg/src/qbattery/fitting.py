"""Least-squares fitting of work-versus-entanglement sweeps.

Four fit families are supported, all built on the entanglement gap
g(E) = sqrt(2**(E+1) - 2**(2E)):

    M1: 3*c*(a - g(E))                     params (c, a)
    M2: 3*c*(1 + g(E)) + b*exp(a*E)        params (a, b, c)
    M3: 3*p*(1 + g(E)) + q*exp(r*E**3)     params (p, q, r)
    M4: 6*c*g(E) + b*exp(a*E)              params (a, b, c)

Fits run damped Gauss-Newton (Levenberg-Marquardt) iterations; the reported
95% confidence half-widths come from the linearized covariance scaled by
the residual variance and the two-sided 95% normal quantile.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import least_squares

from .states import schmidt_gap

Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class FitModel:
    name: str
    param_names: tuple[str, ...]
    predict: Callable[[np.ndarray, np.ndarray], np.ndarray]


def _m1(e, p):
    c, a = p
    return 3.0 * c * (a - schmidt_gap(e))


def _m2(e, p):
    a, b, c = p
    return 3.0 * c * (1.0 + schmidt_gap(e)) + b * np.exp(a * e)


def _m3(e, p):
    pp, q, r = p
    return 3.0 * pp * (1.0 + schmidt_gap(e)) + q * np.exp(r * e**3)


def _m4(e, p):
    a, b, c = p
    return 6.0 * c * schmidt_gap(e) + b * np.exp(a * e)


MODELS: dict[str, FitModel] = {
    "M1": FitModel("M1", ("c", "a"), _m1),
    "M2": FitModel("M2", ("a", "b", "c"), _m2),
    "M3": FitModel("M3", ("p", "q", "r"), _m3),
    "M4": FitModel("M4", ("a", "b", "c"), _m4),
}


@dataclass(frozen=True)
class FitResult:
    model: str
    params: dict[str, float]
    residual: float
    confidence95: dict[str, float]
    iterations: int
    converged: bool
    message: str = ""

    def predict(self, e) -> np.ndarray:
        model = MODELS[self.model]
        vec = np.array([self.params[name] for name in model.param_names])
        return model.predict(np.asarray(e, dtype=float), vec)


def _resolve_model(model) -> FitModel:
    if isinstance(model, FitModel):
        return model
    try:
        return MODELS[model]
    except KeyError:
        raise ValueError(f"unknown fit model {model!r}; choose from {sorted(MODELS)}")


def _split_data(data) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("data must be a sequence of (E, value) pairs")
    e, y = arr[:, 0], arr[:, 1]
    if np.any(e < -1e-12) or np.any(e > 1.0 + 1e-12):
        raise ValueError("abscissa values must lie in [0, 1]")
    return e, y


def default_init(model, data) -> np.ndarray:
    """Endpoint-anchored starting point.

    The scale parameter (c or p) is matched at a data endpoint; the
    exponential-correction parameters start small and negative so the search
    begins near the pure base family.  M1 anchors at the largest E (the gap
    term vanishes there), the three-parameter families at the smallest.
    """
    mdl = _resolve_model(model)
    e, y = _split_data(data)
    i0 = int(np.argmin(e))
    e0, y0 = e[i0], y[i0]
    g0 = schmidt_gap(e0)
    a0, b0, q0, r0 = 0.1, -0.1, -0.1, -0.1

    def safe_ratio(num, den):
        out = num / den if abs(den) > 1e-9 else 1.0
        return out if abs(out) > 1e-9 else 1.0

    if mdl.name == "M1":
        i1 = int(np.argmax(e))
        return np.array([safe_ratio(y[i1], 3.0 * (a0 - schmidt_gap(e[i1]))), a0])
    if mdl.name == "M2":
        return np.array([a0, b0, safe_ratio(y0 - b0 * np.exp(a0 * e0), 3.0 * (1.0 + g0))])
    if mdl.name == "M3":
        return np.array([safe_ratio(y0 - q0 * np.exp(r0 * e0**3), 3.0 * (1.0 + g0)), q0, r0])
    return np.array([a0, b0, safe_ratio(y0 - b0 * np.exp(a0 * e0), 6.0 * g0)])


def _bootstrap_half_widths(
    mdl: FitModel,
    e: np.ndarray,
    y: np.ndarray,
    fitted: np.ndarray,
    samples: int,
    seed: int,
    max_nfev: int,
    step_tol: float,
) -> np.ndarray:
    """95% half-widths from seeded residual-resampling refits."""
    gen = np.random.default_rng(seed)
    base = mdl.predict(e, fitted)
    residuals = y - base
    draws = np.empty((samples, len(fitted)))
    for b in range(samples):
        y_star = base + gen.choice(residuals, size=len(e), replace=True)
        res = least_squares(
            lambda p: mdl.predict(e, p) - y_star,
            fitted,
            method="lm",
            xtol=step_tol,
            max_nfev=max_nfev,
        )
        draws[b] = res.x
    lo, hi = np.percentile(draws, [2.5, 97.5], axis=0)
    return 0.5 * (hi - lo)


def fit_curve(
    model,
    data,
    init=None,
    max_nfev: int = 500,
    step_tol: float = 1e-10,
    bootstrap: int = 0,
    bootstrap_seed: int = 0,
) -> FitResult:
    """Least-squares fit of a model family to (E, value) pairs.

    Never raises on numerical trouble: a singular linearization or an
    exhausted iteration budget is reported through ``converged`` and
    ``message``.  With ``bootstrap > 0`` the confidence half-widths come
    from that many seeded residual-resampling refits (percentile based)
    instead of the linearized covariance.
    """
    mdl = _resolve_model(model)
    e, y = _split_data(data)
    n_par = len(mdl.param_names)
    if len(e) < n_par + 1:
        raise ValueError(f"need at least {n_par + 1} data points, got {len(e)}")
    x0 = np.asarray(init, dtype=float) if init is not None else default_init(mdl, data)
    if x0.shape != (n_par,):
        raise ValueError(f"init must have {n_par} entries, got {x0.shape}")

    res = least_squares(
        lambda p: mdl.predict(e, p) - y,
        x0,
        method="lm",
        xtol=step_tol,
        ftol=np.finfo(float).eps,
        gtol=np.finfo(float).eps,
        max_nfev=max_nfev,
    )
    sse = float(2.0 * res.cost)
    dof = len(e) - n_par
    converged = bool(res.status > 0)
    message = res.message if not converged else ""

    jtj = res.jac.T @ res.jac
    try:
        cov = np.linalg.inv(jtj) * (sse / dof)
        half = Z95 * np.sqrt(np.clip(np.diag(cov), 0.0, None))
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(jtj) * (sse / dof)
        half = Z95 * np.sqrt(np.clip(np.diag(cov), 0.0, None))
        converged = False
        message = (message + "; " if message else "") + "singular normal equations"

    if bootstrap > 0:
        half = _bootstrap_half_widths(
            mdl, e, y, res.x, bootstrap, bootstrap_seed, max_nfev, step_tol
        )

    return FitResult(
        model=mdl.name,
        params=dict(zip(mdl.param_names, (float(v) for v in res.x))),
        residual=sse,
        confidence95=dict(zip(mdl.param_names, (float(v) for v in half))),
        iterations=int(res.nfev),
        converged=converged,
        message=message,
    )
