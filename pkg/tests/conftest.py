"""Shared test helpers: random state factories with edge headroom."""

import numpy as np
import pytest

from ramancavity.states import JointState


def random_joint_state(rng: np.random.Generator, cutoff1: int, cutoff2: int,
                       real_only: bool = False) -> JointState:
    """Random normalized joint state with empty grid-boundary cells.

    The cells A[cutoff1, m>=1] and B[n>=1, cutoff2] would couple outside the
    truncated grid, so they are zeroed to satisfy the evolve headroom check.
    """
    shape = (cutoff1 + 1, cutoff2 + 1)
    if real_only:
        A = rng.normal(size=shape).astype(complex)
        B = rng.normal(size=shape).astype(complex)
    else:
        A = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        B = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    A[-1, 1:] = 0.0
    B[1:, -1] = 0.0
    norm = np.sqrt(np.sum(np.abs(A) ** 2) + np.sum(np.abs(B) ** 2))
    return JointState(A=A / norm, B=B / norm)


def basis_joint_state(n: int, m: int, level: str, cutoff1: int, cutoff2: int) -> JointState:
    """|n, m>|level> on the given grid."""
    A = np.zeros((cutoff1 + 1, cutoff2 + 1), dtype=complex)
    B = np.zeros_like(A)
    (A if level == "a" else B)[n, m] = 1.0
    return JointState(A=A, B=B)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260809)
