"""Two-qubit pure states: entanglement, Schmidt form, constrained families.

A pure state is a length-4 complex vector over the basis {|00>, |01>, |10>,
|11>} of the sigma_z eigenbases.  Entanglement is measured by logarithmic
negativity, which runs from 0 to 1 ebit for two qubits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ContractViolation

NORM_TOL = 1e-12


def _as_state_vector(c) -> np.ndarray:
    v = np.asarray(c, dtype=complex).reshape(-1)
    if v.shape != (4,):
        raise ContractViolation(f"expected a 4-component state vector, got {v.shape}")
    if not np.isfinite(v).all():
        raise ContractViolation("state vector has non-finite entries")
    if abs(v.conj() @ v - 1.0) > NORM_TOL:
        raise ContractViolation("state vector is not normalized")
    return v


def projector(c) -> np.ndarray:
    """Rank-one density matrix |c><c|."""
    v = _as_state_vector(c)
    return np.outer(v, v.conj())


def log_negativity(c) -> float:
    """log2(2*|c0*c3 - c1*c2| + 1) for a normalized two-qubit pure state."""
    v = _as_state_vector(c)
    return float(np.log2(2.0 * abs(v[0] * v[3] - v[1] * v[2]) + 1.0))


def schmidt_gap(entanglement):
    """sqrt(2**(E+1) - 2**(2E)): the gap lambda1 - lambda2 at log-negativity E.

    Accepts scalars or arrays; decreases monotonically from 1 at E=0 to 0 at
    E=1.
    """
    e = np.asarray(entanglement, dtype=float)
    if np.any(e < -1e-12) or np.any(e > 1.0 + 1e-12):
        raise ValueError("entanglement must lie in [0, 1]")
    val = 2.0 ** (e + 1.0) - 2.0 ** (2.0 * e)
    out = np.sqrt(np.clip(val, 0.0, None))
    return out if out.ndim else float(out)


def schmidt_lambdas_from_entanglement(entanglement: float) -> tuple[float, float]:
    """Schmidt eigenvalues (lambda1 >= lambda2) of a pure state with the given
    log-negativity; lambda_i = (1 +/- schmidt_gap(E)) / 2."""
    gap = schmidt_gap(float(entanglement))
    return 0.5 * (1.0 + gap), 0.5 * (1.0 - gap)


def locally_passive_state(entanglement: float, phase: float = 0.0) -> np.ndarray:
    """The locally passive pure state at fixed entanglement.

    Returns sqrt(lambda2)|00> + exp(j*phase)*sqrt(lambda1)|11>: the larger
    Schmidt weight sits on the two-qubit ground level, so both marginals are
    passive and the local work yield vanishes.  The relative phase is free;
    the default 0 is the canonical representative.
    """
    lam1, lam2 = schmidt_lambdas_from_entanglement(entanglement)
    c = np.zeros(4, dtype=complex)
    c[0] = np.sqrt(lam2)
    c[3] = np.exp(1j * phase) * np.sqrt(lam1)
    return c


def single_qubit_unitary(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Rz(alpha) @ Ry(beta) @ Rz(gamma), covering SU(2) up to global phase."""
    rz_a = np.diag([np.exp(-0.5j * alpha), np.exp(0.5j * alpha)])
    rz_g = np.diag([np.exp(-0.5j * gamma), np.exp(0.5j * gamma)])
    cb, sb = np.cos(0.5 * beta), np.sin(0.5 * beta)
    ry = np.array([[cb, -sb], [sb, cb]], dtype=complex)
    return rz_a @ ry @ rz_g


def fixed_entanglement_state(entanglement: float, angles) -> np.ndarray:
    """A generic pure state with the given entanglement.

    Applies local unitaries, each parametrized by three Euler angles, to the
    Schmidt normal form sqrt(lambda1)|00> + sqrt(lambda2)|11>.  Local
    unitaries leave the log-negativity unchanged, so the whole 6-angle family
    sweeps the fixed-entanglement set.
    """
    a = np.asarray(angles, dtype=float).reshape(-1)
    if a.shape != (6,):
        raise ValueError(f"expected 6 angles, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("angles must be finite")
    lam1, lam2 = schmidt_lambdas_from_entanglement(entanglement)
    base = np.zeros(4, dtype=complex)
    base[0] = np.sqrt(lam1)
    base[3] = np.sqrt(lam2)
    u1 = single_qubit_unitary(*a[:3])
    u2 = single_qubit_unitary(*a[3:])
    return np.kron(u1, u2) @ base


@dataclass(frozen=True)
class SchmidtForm:
    """Schmidt data of a two-qubit pure state.

    ``lambdas`` are the two marginal eigenvalues sorted descending; the
    columns of ``basis_1`` and ``basis_2`` are the matching local vectors,
    so sum_i sqrt(lambdas[i]) basis_1[:, i] (x) basis_2[:, i] rebuilds the
    state exactly.
    """

    lambdas: np.ndarray
    basis_1: np.ndarray
    basis_2: np.ndarray

    def reconstruct(self) -> np.ndarray:
        coeff = np.sqrt(self.lambdas)
        return sum(
            coeff[i] * np.kron(self.basis_1[:, i], self.basis_2[:, i])
            for i in range(2)
        )


def schmidt_decompose(c) -> SchmidtForm:
    """Schmidt decomposition via SVD of the 2x2 coefficient matrix."""
    v = _as_state_vector(c)
    m = v.reshape(2, 2)
    u, s, vh = np.linalg.svd(m)
    # Complete each 2x2 factor to a unitary whose columns are the local bases.
    return SchmidtForm(lambdas=s**2, basis_1=u, basis_2=vh.T)


def state_to_reals(c) -> np.ndarray:
    """Serialize a pure state as 8 reals (interleaved re/im), for CSV/JSON."""
    v = _as_state_vector(c)
    out = np.empty(8, dtype=float)
    out[0::2] = v.real
    out[1::2] = v.imag
    return out


def state_from_reals(vals) -> np.ndarray:
    v = np.asarray(vals, dtype=float).reshape(-1)
    if v.shape != (8,):
        raise ValueError(f"expected 8 reals, got shape {v.shape}")
    return _as_state_vector(v[0::2] + 1j * v[1::2])
