"""Exact time evolution of the Raman exchange Hamiltonian.

The interaction H = a2^dag a1 sigma^- + a2 a1^dag sigma^+ (g = 1) couples
each |n, m>|a> only to |n+1, m-1>|b>, so the full propagator factorizes into
independent 2x2 rotations

    A'[n, m]     = cos(gt w) A[n, m]     - i sin(gt w) B[n+1, m-1]
    B'[n+1, m-1] = cos(gt w) B[n+1, m-1] - i sin(gt w) A[n, m]

with Rabi angle rate w = sqrt((n+1) m).  This map is applied once over the
whole grid per requested time; no integrator is involved.  A brute-force
matrix-exponential path (``evolve_oracle``) is kept for verification and
never shares code with the closed form.

Grid-edge policy: cells whose partner falls outside the truncated grid are
frozen by the truncation, which would silently break the physics if they
were populated.  Their total population is checked against EDGE_TOL on
entry and the call fails loudly instead of truncating.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .states import AtomRegisterState, AtomState, JointState

# Population allowed in cells that would couple past the grid boundary.
EDGE_TOL = 1e-10
# Largest dense dimension the brute-force oracle will exponentiate.
ORACLE_MAX_DIM = 20_000


class EdgeLeakageError(RuntimeError):
    """State population touches the grid boundary: cutoff too small."""


def _pair_rates(shape: tuple[int, int]) -> np.ndarray:
    """sqrt((n+1) m) for the pair blocks {A[n, m], B[n+1, m-1]}.

    Entry [n, m-1] of the returned (rows-1, cols-1) array is the rate for
    n = 0..rows-2, m = 1..cols-1.
    """
    rows, cols = shape
    return np.sqrt(np.outer(np.arange(1, rows), np.arange(1, cols)))


def edge_population(state: JointState) -> float:
    """Total population of the boundary cells frozen by truncation."""
    A, B = state.A, state.B
    pop = float(np.sum(np.abs(A[-1, 1:]) ** 2))
    pop += float(np.sum(np.abs(B[1:, -1]) ** 2))
    return pop


def _require_headroom(state: JointState, context: str) -> None:
    pop = edge_population(state)
    if pop > EDGE_TOL:
        raise EdgeLeakageError(
            f"{context}: population {pop:.3e} sits on grid-edge cells that would couple "
            f"outside the {state.A.shape} grid (budget {EDGE_TOL:.1e}); enlarge the cutoffs"
        )


def evolve(state: JointState, gt: float) -> JointState:
    """Propagate for dimensionless time gt (negative gt runs backwards)."""
    if not np.isfinite(gt):
        raise ValueError("gt must be finite")
    _require_headroom(state, "evolve")
    A, B = state.A, state.B
    rows, cols = A.shape
    A2 = A.copy()
    B2 = B.copy()
    if rows > 1 and cols > 1:
        w = _pair_rates(A.shape)
        c = np.cos(gt * w)
        s = np.sin(gt * w)
        a0 = A[: rows - 1, 1:]
        b0 = B[1:, : cols - 1]
        A2[: rows - 1, 1:] = c * a0 - 1j * s * b0
        B2[1:, : cols - 1] = c * b0 - 1j * s * a0
    return JointState(A=A2, B=B2, require_normalized=state.require_normalized)


def hamiltonian_apply(state: JointState) -> JointState:
    """H|psi> with g = 1 (result is not normalized).

    a2^dag a1 sigma^-:  B[n, m] -> sqrt(n (m+1)) at A[n-1, m+1]
    a2 a1^dag sigma^+:  A[n, m] -> sqrt((n+1) m) at B[n+1, m-1]
    """
    _require_headroom(state, "hamiltonian_apply")
    A, B = state.A, state.B
    rows, cols = A.shape
    A2 = np.zeros_like(A)
    B2 = np.zeros_like(B)
    if rows > 1 and cols > 1:
        w = _pair_rates(A.shape)
        B2[1:, : cols - 1] = w * A[: rows - 1, 1:]
        A2[: rows - 1, 1:] = w * B[1:, : cols - 1]
    return JointState(A=A2, B=B2, require_normalized=False)


def _flatten(state: JointState) -> np.ndarray:
    return np.concatenate([state.A.ravel(), state.B.ravel()])


def _unflatten(vec: np.ndarray, shape: tuple[int, int], require_normalized: bool = True) -> JointState:
    half = shape[0] * shape[1]
    return JointState(
        A=vec[:half].reshape(shape),
        B=vec[half:].reshape(shape),
        require_normalized=require_normalized,
    )


def hamiltonian_matrix(shape: tuple[int, int]) -> np.ndarray:
    """Dense H assembled column by column from hamiltonian_apply."""
    dim = 2 * shape[0] * shape[1]
    H = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(dim):
        basis_vec = np.zeros(dim, dtype=np.complex128)
        basis_vec[col] = 1.0
        basis_state = _unflatten(basis_vec, shape, require_normalized=False)
        # Basis vectors sitting on the frozen edge cells map to zero.
        try:
            out = hamiltonian_apply(basis_state)
        except EdgeLeakageError:
            continue
        H[:, col] = _flatten(out)
    return H


def evolve_oracle(state: JointState, gt: float) -> JointState:
    """Brute-force propagation via eigendecomposition of the dense H.

    Independent verification path for :func:`evolve`; it never uses the
    closed-form pair rotation.  Restricted to small grids.
    """
    shape = state.A.shape
    dim = 2 * shape[0] * shape[1]
    if dim > ORACLE_MAX_DIM:
        raise ValueError(f"oracle dimension {dim} exceeds limit {ORACLE_MAX_DIM}")
    _require_headroom(state, "evolve_oracle")
    H = hamiltonian_matrix(shape)
    herm_dev = float(np.max(np.abs(H - H.conj().T)))
    if herm_dev > 1e-12:
        raise AssertionError(f"assembled Hamiltonian not Hermitian (dev {herm_dev:.3e})")
    eigvals, eigvecs = scipy.linalg.eigh(H)
    psi = _flatten(state)
    evolved = eigvecs @ (np.exp(-1j * eigvals * gt) * (eigvecs.conj().T @ psi))
    return _unflatten(evolved, shape)


@dataclass(frozen=True)
class ExcitationDistribution:
    """Distribution of the total photon number N = n + m (atom excluded).

    The exchange moves a photon between the modes whenever the atom flips,
    so N is conserved by the evolution.
    """

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a nonempty 1-d array")
        if np.any(probs < -1e-14):
            raise ValueError("negative probability entry")
        total = float(np.sum(probs))
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"excitation probabilities sum to {total!r}, expected 1")
        probs = np.clip(probs, 0.0, None)
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)


def excitation_distribution(state: JointState) -> ExcitationDistribution:
    """Probability of each total photon number N = n + m."""
    rows, cols = state.A.shape
    n_plus_m = (np.arange(rows)[:, None] + np.arange(cols)[None, :]).ravel()
    weights = (np.abs(state.A) ** 2 + np.abs(state.B) ** 2).ravel()
    probs = np.bincount(n_plus_m, weights=weights, minlength=rows + cols - 1)
    return ExcitationDistribution(probs)


def pass_atom(register: AtomRegisterState, atom: AtomState, gt: float) -> AtomRegisterState:
    """Send a fresh atom through the cavity for time gt.

    The new atom couples to the field grid of every existing branch while
    all earlier atom labels ride along as spectators; each branch therefore
    evolves independently under the single-atom propagator.
    """
    new_branches: dict[str, np.ndarray] = {}
    for label in sorted(register.branches):
        grid = register.branches[label]
        joint = JointState(A=atom.gamma * grid, B=atom.delta * grid, require_normalized=False)
        evolved = evolve(joint, gt)
        new_branches[label + "a"] = evolved.A
        new_branches[label + "b"] = evolved.B
    return AtomRegisterState(new_branches)
