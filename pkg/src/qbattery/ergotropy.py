"""Passive states and unitary work extraction, global and local.

The maximum work a unitary can draw from (rho, H) is Tr(rho H) minus the
energy of the passive state, whose populations are the spectrum of rho
anti-ordered against the spectrum of H.  Because the battery Hamiltonian is
a sum of single-qubit terms, the locally extractable work splits exactly
into the marginal ergotropies; the 6-angle numerical maximization is kept
only as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .collision import collision_propagator, _apply, _require_state
from .linalg import ContractViolation, is_density_matrix, is_hermitian, partial_trace
from .model import SIGMA_Z, ModelParams, battery_hamiltonian, thermal_spin_state
from .optimize import OptimizerReport, OptimizerSettings, multistart_maximize
from .states import fixed_entanglement_state, locally_passive_state, projector, single_qubit_unitary

QUANTITIES = ("G_p", "G", "L")


def _check_pair(rho, h):
    r = np.asarray(rho, dtype=complex)
    hm = np.asarray(h, dtype=complex)
    if r.shape != hm.shape:
        raise ContractViolation("state and Hamiltonian must have equal dims")
    if not is_density_matrix(r):
        raise ContractViolation("rho is not a density matrix within tolerance")
    if not is_hermitian(hm):
        raise ContractViolation("h is not Hermitian within tolerance")
    return r, hm


def passive_state(rho, h) -> np.ndarray:
    """State with rho's spectrum anti-ordered against h's energies.

    Commutes with h and carries no unitarily extractable work.
    """
    r, hm = _check_pair(rho, h)
    rho_desc = np.linalg.eigvalsh(r)[::-1]
    _, vecs = np.linalg.eigh(hm)
    return (vecs * rho_desc) @ vecs.conj().T


def global_ergotropy(rho, h) -> float:
    """Tr(rho h) - Tr(sigma_rho h); non-negative, zero iff rho is passive.

    Computed from the sorted spectra directly, which makes the value
    independent of eigenvector tie-breaking under degenerate energies.
    """
    r, hm = _check_pair(rho, h)
    rho_desc = np.linalg.eigvalsh(r)[::-1]
    energies = np.linalg.eigvalsh(hm)
    return float(np.trace(r @ hm).real - rho_desc @ energies)


def local_ergotropy(rho12, p: ModelParams) -> float:
    """Maximum work extractable with product unitaries U1 (x) U2.

    The battery Hamiltonian has no interaction term, so the maximization
    separates into the marginal ergotropies against e1*sz and e2*sz.
    """
    r = np.asarray(rho12, dtype=complex)
    if r.shape != (4, 4):
        raise ContractViolation(f"expected a 4x4 state, got {r.shape}")
    if not is_density_matrix(r):
        raise ContractViolation("rho12 is not a density matrix within tolerance")
    rho1 = partial_trace(r, (2, 2), "A")
    rho2 = partial_trace(r, (2, 2), "B")
    return global_ergotropy(rho1, p.e1 * SIGMA_Z) + global_ergotropy(rho2, p.e2 * SIGMA_Z)


def local_ergotropy_numeric(
    rho12, p: ModelParams, settings: OptimizerSettings | None = None
) -> float:
    """Direct maximization over the 6-angle product-unitary family.

    Slow; exists to cross-check the analytic marginal split.
    """
    r = np.asarray(rho12, dtype=complex)
    h12 = battery_hamiltonian(p)
    e_in = float(np.trace(r @ h12).real)

    def extracted(angles):
        u = np.kron(single_qubit_unitary(*angles[:3]), single_qubit_unitary(*angles[3:]))
        return e_in - float(np.trace(u @ r @ u.conj().T @ h12).real)

    _, best, _ = multistart_maximize(extracted, 6, settings)
    return best


def ergotropy_after_collisions(
    rho0, n: int, p: ModelParams, mode: str = "global"
) -> float:
    """Evolve n full collisions, then take the global or local work yield."""
    if mode not in ("global", "local"):
        raise ValueError(f"mode must be 'global' or 'local', got {mode!r}")
    state = _require_state(rho0, "rho0")
    if n < 0:
        raise ValueError(f"collision count must be >= 0, got {n}")
    u = collision_propagator(p)
    bath = thermal_spin_state(p)
    for _ in range(n):
        state = _apply(u, state, bath)
    if mode == "global":
        return global_ergotropy(state, battery_hamiltonian(p))
    return local_ergotropy(state, p)


@dataclass(frozen=True)
class WorkRecord:
    """One extremal work value on the fixed-entanglement family."""

    quantity: str
    entanglement: float
    n: int
    coupling: float
    delta_t: float
    value: float
    report: OptimizerReport | None = None


def _phase_swept_gp(entanglement: float, n: int, p: ModelParams) -> tuple[float, OptimizerReport]:
    """Maximize the direct work yield over the free relative phase of the
    locally passive state: 64-point grid plus bounded refinement."""

    def value_at(theta: float) -> float:
        rho0 = projector(locally_passive_state(entanglement, phase=theta))
        return ergotropy_after_collisions(rho0, n, p, "global")

    grid = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    vals = np.array([value_at(t) for t in grid])
    best = int(np.argmax(vals))
    step = grid[1] - grid[0]
    res = minimize_scalar(
        lambda t: -value_at(t),
        bounds=(grid[best] - step, grid[best] + step),
        method="bounded",
        options={"xatol": 1e-10},
    )
    refined = -float(res.fun)
    theta = float(res.x)
    if vals[best] >= refined:
        refined, theta = float(vals[best]), float(grid[best])
    report = OptimizerReport(
        n_starts=len(grid),
        best_start=best,
        best_value=refined,
        best_x=np.array([theta]),
        spread=float(vals.max() - vals.min()),
        converged=True,
        evaluations=len(grid) + int(res.nfev),
    )
    return refined, report


def max_work_fixed_entanglement(
    entanglement: float,
    n: int,
    p: ModelParams,
    quantity: str,
    settings: OptimizerSettings | None = None,
    phase_sweep: bool = False,
) -> WorkRecord:
    """Extremal work after n collisions at fixed initial entanglement.

    quantity "G_p": direct yield of the locally passive initial state (no
    optimization; optional phase sweep).  "G"/"L": global or local yield
    maximized over the 6-angle fixed-entanglement family by seeded
    multi-start search.
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity must be one of {QUANTITIES}, got {quantity!r}")
    report: OptimizerReport | None = None
    if quantity == "G_p":
        if phase_sweep:
            value, report = _phase_swept_gp(entanglement, n, p)
        else:
            rho0 = projector(locally_passive_state(entanglement))
            value = ergotropy_after_collisions(rho0, n, p, "global")
    else:
        mode = "global" if quantity == "G" else "local"

        def objective(angles):
            rho0 = projector(fixed_entanglement_state(entanglement, angles))
            return ergotropy_after_collisions(rho0, n, p, mode)

        _, value, report = multistart_maximize(objective, 6, settings)
    return WorkRecord(
        quantity=quantity,
        entanglement=float(entanglement),
        n=int(n),
        coupling=p.k,
        delta_t=p.delta_t,
        value=float(value),
        report=report,
    )
