"""Core state containers for the two-mode-field + two-level-atom Hilbert space.

Single-mode states are complex amplitude vectors over the Fock basis
|0..cutoff>.  The combined system is stored as a pair of dense grids
A[n, m], B[n, m]: the amplitudes of |n, m>|a> and |n, m>|b>.  All times in
this package are the dimensionless product g*t (effective coupling g = 1).

Every container is immutable after construction and validates its own
normalization, so downstream code can rely on unit norm without rechecking.
Two tolerances apply: truncation leakage at construction (1e-10) and
unitarity during evolution (1e-12).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Union

import numpy as np

# Truncation leakage budget for freshly prepared single-mode states.
CONSTRUCTION_TOL = 1e-10
# Unitarity budget for states produced by exact evolution / algebra.
EVOLUTION_TOL = 1e-12

ATOM_LEVELS = ("a", "b")


class NormalizationError(ValueError):
    """A state failed its unit-norm invariant."""


def _frozen_complex_array(values, ndim: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.complex128)
    if arr.ndim != ndim:
        raise ValueError(f"expected {ndim}-dimensional amplitude array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("amplitudes must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ModeAmplitudes:
    """Amplitudes of a single cavity mode over the Fock basis |0..cutoff>.

    The squared amplitudes must sum to one within the construction
    tolerance; the preparation routines renormalize after truncation, so in
    practice the norm is exactly one up to rounding.
    """

    amps: np.ndarray

    def __post_init__(self):
        arr = _frozen_complex_array(self.amps, ndim=1)
        if arr.size == 0:
            raise ValueError("amplitude vector must contain at least the vacuum entry")
        object.__setattr__(self, "amps", arr)
        norm_sq = float(np.sum(np.abs(arr) ** 2))
        if abs(norm_sq - 1.0) > CONSTRUCTION_TOL:
            raise NormalizationError(
                f"mode norm^2 = {norm_sq!r} deviates from 1 beyond {CONSTRUCTION_TOL}"
            )

    @property
    def cutoff(self) -> int:
        return self.amps.size - 1

    def probabilities(self) -> np.ndarray:
        """Photon-number distribution |amps[n]|^2."""
        return np.abs(self.amps) ** 2


@dataclass(frozen=True)
class AtomState:
    """Two-level atomic state gamma*|a> + delta*|b>."""

    gamma: complex
    delta: complex

    def __post_init__(self):
        object.__setattr__(self, "gamma", complex(self.gamma))
        object.__setattr__(self, "delta", complex(self.delta))
        norm_sq = abs(self.gamma) ** 2 + abs(self.delta) ** 2
        if abs(norm_sq - 1.0) > EVOLUTION_TOL:
            raise NormalizationError(f"|gamma|^2 + |delta|^2 = {norm_sq!r}, expected 1")

    @classmethod
    def a(cls) -> "AtomState":
        return cls(1.0, 0.0)

    @classmethod
    def b(cls) -> "AtomState":
        return cls(0.0, 1.0)

    @classmethod
    def plus(cls, phi: float = 0.0) -> "AtomState":
        """(e^{i phi}|a> + |b>) / sqrt(2)."""
        return cls(np.exp(1j * phi) / np.sqrt(2.0), 1.0 / np.sqrt(2.0))

    @classmethod
    def minus(cls, phi: float = 0.0) -> "AtomState":
        """(e^{i phi}|a> - |b>) / sqrt(2)."""
        return cls(np.exp(1j * phi) / np.sqrt(2.0), -1.0 / np.sqrt(2.0))


def _check_norm(norm_sq: float, tol: float, what: str) -> None:
    if abs(norm_sq - 1.0) > tol:
        raise NormalizationError(f"{what} norm^2 = {norm_sq!r} deviates from 1 beyond {tol}")


@dataclass(frozen=True)
class JointState:
    """Pure state of (mode 1) x (mode 2) x (atom).

    A[n, m] is the amplitude of |n, m>|a>, B[n, m] of |n, m>|b>.  Pass
    ``require_normalized=False`` only for intermediate unnormalized vectors
    (e.g. the result of applying the Hamiltonian).
    """

    A: np.ndarray
    B: np.ndarray
    require_normalized: bool = field(default=True, repr=False)

    def __post_init__(self):
        A = _frozen_complex_array(self.A, ndim=2)
        B = _frozen_complex_array(self.B, ndim=2)
        if A.shape != B.shape:
            raise ValueError(f"A and B grids differ in shape: {A.shape} vs {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if self.require_normalized:
            _check_norm(self.norm_sq(), EVOLUTION_TOL, "joint state")

    @property
    def cutoff1(self) -> int:
        return self.A.shape[0] - 1

    @property
    def cutoff2(self) -> int:
        return self.A.shape[1] - 1

    def norm_sq(self) -> float:
        # Fixed accumulation order (contiguous pairwise sums) keeps the
        # invariant checks bit-reproducible between runs.
        return float(np.sum(np.abs(self.A) ** 2) + np.sum(np.abs(self.B) ** 2))

    def level_populations(self) -> tuple[float, float]:
        """(P_a, P_b) populations of the two atomic levels."""
        return float(np.sum(np.abs(self.A) ** 2)), float(np.sum(np.abs(self.B) ** 2))


@dataclass(frozen=True)
class TwoModeState:
    """Pure state of the two field modes alone, grid[n, m] = <n, m|psi>."""

    grid: np.ndarray
    require_normalized: bool = field(default=True, repr=False)

    def __post_init__(self):
        grid = _frozen_complex_array(self.grid, ndim=2)
        object.__setattr__(self, "grid", grid)
        if self.require_normalized:
            _check_norm(float(np.sum(np.abs(grid) ** 2)), EVOLUTION_TOL, "two-mode state")

    @property
    def cutoff1(self) -> int:
        return self.grid.shape[0] - 1

    @property
    def cutoff2(self) -> int:
        return self.grid.shape[1] - 1


@dataclass(frozen=True)
class AtomRegisterState:
    """Two modes entangled with an ordered register of atoms.

    ``branches`` maps a register label (one symbol from {a, b} per atom, in
    the order the atoms interacted) to the two-mode amplitude grid attached
    to that atomic configuration.  The empty label describes a register with
    no atoms yet.
    """

    branches: Mapping[str, np.ndarray]

    def __post_init__(self):
        if not self.branches:
            raise ValueError("register needs at least one branch")
        labels = sorted(self.branches)
        size = len(labels[0])
        shape = None
        frozen: dict[str, np.ndarray] = {}
        total = 0.0
        for label in labels:
            if len(label) != size or any(ch not in ATOM_LEVELS for ch in label):
                raise ValueError(f"bad register label {label!r}")
            grid = _frozen_complex_array(self.branches[label], ndim=2)
            if shape is None:
                shape = grid.shape
            elif grid.shape != shape:
                raise ValueError("all branch grids must share one shape")
            frozen[label] = grid
            total += float(np.sum(np.abs(grid) ** 2))
        object.__setattr__(self, "branches", MappingProxyType(frozen))
        _check_norm(total, EVOLUTION_TOL, "atom register state")

    @property
    def register_size(self) -> int:
        return len(next(iter(self.branches)))

    @property
    def grid_shape(self) -> tuple[int, int]:
        return next(iter(self.branches.values())).shape

    @classmethod
    def from_two_mode(cls, state: TwoModeState) -> "AtomRegisterState":
        """Register holding only the field, before any atom has interacted."""
        return cls({"": state.grid})


State = Union[JointState, TwoModeState, AtomRegisterState]


def make_joint_state(mode1: ModeAmplitudes, mode2: ModeAmplitudes, atom: AtomState) -> JointState:
    """Product state (mode1 x mode2) x (gamma|a> + delta|b>).

    Rejects non-normalized mode vectors: leakage beyond the construction
    tolerance signals a bad preparation upstream rather than being silently
    renormalized here.
    """
    for idx, mode in ((1, mode1), (2, mode2)):
        norm_sq = float(np.sum(mode.probabilities()))
        if abs(norm_sq - 1.0) > CONSTRUCTION_TOL:
            raise NormalizationError(f"mode {idx} norm^2 = {norm_sq!r} is not 1 within {CONSTRUCTION_TOL}")
    product = np.outer(mode1.amps, mode2.amps)
    return JointState(A=atom.gamma * product, B=atom.delta * product)


def inner_product(s1: State, s2: State) -> complex:
    """<s1|s2> for two states of identical kind and cutoffs."""
    if isinstance(s1, JointState) and isinstance(s2, JointState):
        if s1.A.shape != s2.A.shape:
            raise ValueError(f"cutoff mismatch: {s1.A.shape} vs {s2.A.shape}")
        return complex(np.vdot(s1.A, s2.A) + np.vdot(s1.B, s2.B))
    if isinstance(s1, TwoModeState) and isinstance(s2, TwoModeState):
        if s1.grid.shape != s2.grid.shape:
            raise ValueError(f"cutoff mismatch: {s1.grid.shape} vs {s2.grid.shape}")
        return complex(np.vdot(s1.grid, s2.grid))
    if isinstance(s1, AtomRegisterState) and isinstance(s2, AtomRegisterState):
        if s1.grid_shape != s2.grid_shape or s1.register_size != s2.register_size:
            raise ValueError("register shape mismatch")
        total = 0.0 + 0.0j
        for label in sorted(set(s1.branches) | set(s2.branches)):
            g1 = s1.branches.get(label)
            g2 = s2.branches.get(label)
            if g1 is not None and g2 is not None:
                total += np.vdot(g1, g2)
        return complex(total)
    raise TypeError(f"cannot take inner product of {type(s1).__name__} and {type(s2).__name__}")


def fidelity(s1: State, s2: State) -> float:
    """|<s1|s2>|^2, clipped into [0, 1] against rounding."""
    value = abs(inner_product(s1, s2)) ** 2
    return float(min(value, 1.0))
