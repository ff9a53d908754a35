"""Repeated-interaction evolution of the battery.

Each collision couples qubit 2 to one fresh thermal spin for a duration
delta_t through the joint propagator exp(-j*tau*H_total), then traces the
spin out.  Fresh spins carry no memory, so every full collision applies the
same channel; *within* a collision the reduced dynamics is sampled by
re-exponentiating from the collision's initial boundary state, which keeps
the intra-collision spin-battery correlations exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import ContractViolation, is_density_matrix, partial_trace, unitary_from_hamiltonian
from .model import ModelParams, thermal_spin_state, total_collision_hamiltonian

_TAU_SLACK = 1e-12


@lru_cache(maxsize=512)
def collision_propagator(p: ModelParams, tau: float | None = None) -> np.ndarray:
    """Joint 8x8 propagator for one (partial) collision of duration tau.

    ``tau=None`` means the full collision duration p.delta_t.  Results are
    cached; treat the returned array as read-only.
    """
    t = p.delta_t if tau is None else float(tau)
    u = unitary_from_hamiltonian(total_collision_hamiltonian(p), t)
    u.flags.writeable = False
    return u


def _require_state(rho, what: str = "input") -> np.ndarray:
    m = np.asarray(rho, dtype=complex)
    if m.shape != (4, 4):
        raise ContractViolation(f"{what} must be a 4x4 battery state, got {m.shape}")
    if not is_density_matrix(m):
        raise ContractViolation(f"{what} is not a density matrix within tolerance")
    return m


def _apply(u: np.ndarray, rho: np.ndarray, bath: np.ndarray) -> np.ndarray:
    joint = u @ np.kron(rho, bath) @ u.conj().T
    return partial_trace(joint, (4, 2), "A")


def collide_once(rho, p: ModelParams) -> np.ndarray:
    """One full collision with a fresh thermal spin."""
    m = _require_state(rho)
    return _apply(collision_propagator(p), m, thermal_spin_state(p))


def evolve_within_collision(rho, tau: float, p: ModelParams) -> np.ndarray:
    """Partial collision of duration tau in (0, delta_t], from the state at the
    collision's start; tau = delta_t reproduces collide_once exactly."""
    m = _require_state(rho)
    if not (0.0 < tau <= p.delta_t * (1.0 + _TAU_SLACK)):
        raise ValueError(f"tau must lie in (0, {p.delta_t}], got {tau}")
    return _apply(collision_propagator(p, float(tau)), m, thermal_spin_state(p))


@dataclass(frozen=True)
class Trajectory:
    """Battery states sampled along a collision sequence.

    ``collision_index[i]`` is the 1-based index of the spin active at
    ``times[i]`` (0 for the initial sample); boundary samples at n*delta_t
    belong to collision n.
    """

    times: np.ndarray
    states: np.ndarray
    collision_index: np.ndarray
    params: ModelParams

    def __len__(self) -> int:
        return len(self.times)

    def to_csv(self, path, work_values=None, work_label: str = "work") -> None:
        """Write `t, collision_index, rho_re_00..rho_im_33` rows, full double
        precision, plus one derived work column when values are supplied."""
        header = ["t", "collision_index"]
        for i in range(4):
            for j in range(4):
                header += [f"rho_re_{i}{j}", f"rho_im_{i}{j}"]
        if work_values is not None:
            work_values = np.asarray(work_values, dtype=float)
            if work_values.shape != self.times.shape:
                raise ValueError("work_values length must match the sample count")
            header.append(work_label)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for idx, (t, rho, ci) in enumerate(
                zip(self.times, self.states, self.collision_index)
            ):
                row = ["%.17g" % t, int(ci)]
                for i in range(4):
                    for j in range(4):
                        row += ["%.17g" % rho[i, j].real, "%.17g" % rho[i, j].imag]
                if work_values is not None:
                    row.append("%.17g" % work_values[idx])
                writer.writerow(row)


def evolve(rho0, n: int, p: ModelParams) -> Trajectory:
    """n full collisions, sampled at the boundaries {0, delta_t, ..., n*delta_t}."""
    m = _require_state(rho0, "rho0")
    if n < 0:
        raise ValueError(f"collision count must be >= 0, got {n}")
    u = collision_propagator(p)
    bath = thermal_spin_state(p)
    states = np.empty((n + 1, 4, 4), dtype=complex)
    states[0] = m
    for step in range(1, n + 1):
        states[step] = _apply(u, states[step - 1], bath)
    times = np.arange(n + 1) * p.delta_t
    return Trajectory(
        times=times,
        states=states,
        collision_index=np.arange(n + 1),
        params=p,
    )


def fine_trajectory(rho0, n: int, substeps: int, p: ModelParams) -> Trajectory:
    """n collisions sampled at `substeps` interior points each.

    Within collision m the samples evolve from the boundary state at
    (m-1)*delta_t; the final sub-sample of each collision is the next
    boundary state, so boundary samples agree with evolve().
    """
    m = _require_state(rho0, "rho0")
    if n < 0:
        raise ValueError(f"collision count must be >= 0, got {n}")
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    bath = thermal_spin_state(p)
    taus = [(s * p.delta_t) / substeps for s in range(1, substeps + 1)]
    unitaries = [collision_propagator(p, tau) for tau in taus]
    total = n * substeps + 1
    states = np.empty((total, 4, 4), dtype=complex)
    times = np.empty(total, dtype=float)
    index = np.empty(total, dtype=int)
    states[0], times[0], index[0] = m, 0.0, 0
    pos = 1
    boundary = m
    for coll in range(1, n + 1):
        for s in range(substeps):
            states[pos] = _apply(unitaries[s], boundary, bath)
            times[pos] = ((coll - 1) * substeps + (s + 1)) * p.delta_t / substeps
            index[pos] = coll
            pos += 1
        boundary = states[pos - 1]
    return Trajectory(times=times, states=states, collision_index=index, params=p)
