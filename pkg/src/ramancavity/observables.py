"""Reduced density matrices, purities, atomic inversion, and Husimi Q-functions.

Partial traces of the pure tripartite state are materialized as dense
Hermitian matrices; purity is computed as the squared Frobenius norm of the
reduced matrix (never through eigenvalues, which cost more and can go
spuriously negative).  Q-functions of a mode of a pure bipartite state are
evaluated by contracting coherent-state overlap vectors directly against the
amplitude grid, without forming the (cutoff+1)^2 reduced matrix:

    Q_1(alpha) = sum_m | sum_n conj(<n|alpha>) psi[n, m] |^2.

Q is defined here WITHOUT the customary 1/pi prefactor, i.e. Q(alpha) =
<alpha|rho|alpha> itself, so values lie in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import gammaln

from .states import AtomRegisterState, AtomState, JointState, ModeAmplitudes, TwoModeState

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
# Grid points per chunk when sweeping coherent-state overlaps (memory cap).
_Q_CHUNK = 4096


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace reduced state."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        herm_dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if herm_dev > HERMITICITY_TOL:
            raise ValueError(f"matrix deviates from Hermitian by {herm_dev:.3e}")
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {trace} deviates from 1 beyond {TRACE_TOL}")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue; numerical positivity means >= -1e-8."""
        return float(np.linalg.eigvalsh(self.entries)[0])


@dataclass(frozen=True)
class QGrid:
    """Husimi Q samples over a rectangular window of the alpha plane.

    values[i, j] = Q(re_axis[i] + 1j * im_axis[j]).
    """

    values: np.ndarray
    re_axis: np.ndarray
    im_axis: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        re_axis = np.asarray(self.re_axis, dtype=np.float64)
        im_axis = np.asarray(self.im_axis, dtype=np.float64)
        if values.shape != (re_axis.size, im_axis.size):
            raise ValueError("values shape must be (len(re_axis), len(im_axis))")
        if not np.all(np.isfinite(values)):
            raise ValueError("Q values must be finite")
        if values.size and (values.min() < -1e-12 or values.max() > 1.0 + 1e-9):
            raise ValueError("Q values must lie in [0, 1]")
        for arr in (values, re_axis, im_axis):
            arr.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "re_axis", re_axis)
        object.__setattr__(self, "im_axis", im_axis)

    def argmax_alpha(self) -> complex:
        """Location of the global maximum."""
        i, j = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return complex(self.re_axis[i], self.im_axis[j])


def reduced_atom(state: JointState) -> DensityMatrix:
    """2x2 atomic state after tracing out both modes."""
    paa = float(np.sum(np.abs(state.A) ** 2))
    pbb = float(np.sum(np.abs(state.B) ** 2))
    pab = complex(np.sum(state.A * np.conj(state.B)))
    return DensityMatrix(np.array([[paa, pab], [np.conj(pab), pbb]], dtype=np.complex128))


def reduced_mode(state: Union[JointState, TwoModeState], which: int) -> DensityMatrix:
    """Partial trace down to one mode (atom traced out too, if present)."""
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    if isinstance(state, TwoModeState):
        grids: Sequence[np.ndarray] = (state.grid,)
    elif isinstance(state, JointState):
        grids = (state.A, state.B)
    else:
        raise TypeError(f"cannot reduce {type(state).__name__}")
    dim = grids[0].shape[0] if which == 1 else grids[0].shape[1]
    rho = np.zeros((dim, dim), dtype=np.complex128)
    for g in grids:
        mat = g if which == 1 else g.T
        rho += mat @ mat.conj().T
    # Symmetrize away the last-bit asymmetry of the matmul reductions.
    rho = (rho + rho.conj().T) / 2.0
    return DensityMatrix(rho)


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2), computed as the squared Frobenius norm of rho."""
    value = float(np.sum(np.abs(rho.entries) ** 2))
    lower = 1.0 / rho.dim - 1e-10
    if value < lower or value > 1.0 + 1e-10:
        raise ValueError(f"purity {value!r} outside [{lower}, 1]")
    return value


def atomic_inversion(state: JointState) -> float:
    """W = P_a - P_b (population difference of the two lower levels)."""
    pa, pb = state.level_populations()
    return pa - pb


def inversion_series(
    C1: ModeAmplitudes,
    C2: ModeAmplitudes,
    atom: AtomState,
    gts: Sequence[float],
) -> np.ndarray:
    """Closed-form inversion of the initial product state at each time.

    Evaluates the four-term intensity sum

        W(t) = sum_{n,m} [ p1_n p2_m |gamma|^2 cos^2(t sqrt((n+1)m))
                         + p1_{n+1} p2_{m-1} |delta|^2 sin^2(t sqrt((n+1)m))
                         - p1_n p2_m |delta|^2 cos^2(t sqrt((m+1)n))
                         - p1_{n-1} p2_{m+1} |gamma|^2 sin^2(t sqrt((m+1)n)) ]

    directly, with out-of-range shifted indices treated as zero.  This path
    shares no code with :func:`ramancavity.evolution.evolve` and serves as a
    cross-check of it.  The formula carries only the level *populations*:
    it coincides with the evolved-state inversion for real amplitude
    conventions (initial field and atomic phases zero), where the dropped
    interference terms vanish identically.
    """
    p1 = C1.probabilities()
    p2 = C2.probabilities()
    ga = abs(atom.gamma) ** 2
    db = abs(atom.delta) ** 2
    n = np.arange(p1.size)[:, None]
    m = np.arange(p2.size)[None, :]
    theta = np.sqrt((n + 1.0) * m)  # pairs {|n,m,a>, |n+1,m-1,b>}
    phi = np.sqrt(n * (m + 1.0))    # pairs {|n,m,b>, |n-1,m+1,a>}
    # Zero-padded shifted distributions: p1_shift_up[n] = p1[n+1], etc.
    p1_up = np.zeros_like(p1)
    p1_up[:-1] = p1[1:]
    p1_down = np.zeros_like(p1)
    p1_down[1:] = p1[:-1]
    p2_up = np.zeros_like(p2)
    p2_up[:-1] = p2[1:]
    p2_down = np.zeros_like(p2)
    p2_down[1:] = p2[:-1]
    base = np.outer(p1, p2)
    shift_a = np.outer(p1_up, p2_down)    # p1_{n+1} p2_{m-1}
    shift_b = np.outer(p1_down, p2_up)    # p1_{n-1} p2_{m+1}
    out = np.empty(len(gts), dtype=np.float64)
    for i, t in enumerate(gts):
        cos_th = np.cos(t * theta) ** 2
        sin_th = 1.0 - cos_th
        cos_ph = np.cos(t * phi) ** 2
        sin_ph = 1.0 - cos_ph
        out[i] = float(
            ga * np.sum(base * cos_th)
            + db * np.sum(shift_a * sin_th)
            - db * np.sum(base * cos_ph)
            - ga * np.sum(shift_b * sin_ph)
        )
    return out


def _coherent_overlap_rows(alphas: np.ndarray, cutoff: int) -> np.ndarray:
    """Row j holds <n|alpha_j> for n = 0..cutoff; shape (len(alphas), cutoff+1)."""
    n = np.arange(cutoff + 1)
    mag = np.abs(alphas)[:, None]
    safe = np.where(mag > 0.0, mag, 1.0)
    log_mag = -(mag**2) / 2.0 + n[None, :] * np.log(safe) - gammaln(n + 1)[None, :] / 2.0
    rows = np.exp(log_mag) * np.exp(1j * n[None, :] * np.angle(alphas)[:, None])
    zero = mag[:, 0] == 0.0
    if np.any(zero):
        rows[zero] = 0.0
        rows[zero, 0] = 1.0
    return rows


QInput = Union[ModeAmplitudes, DensityMatrix, TwoModeState, JointState]


def husimi_q(
    state: QInput,
    window: tuple[tuple[float, float], tuple[float, float]],
    resolution: int,
    mode: int | None = None,
) -> QGrid:
    """Sample Q(alpha) = <alpha|rho|alpha> over a rectangular window.

    ``window`` is ((re_min, re_max), (im_min, im_max)); ``resolution`` is the
    number of samples per axis.  For a bipartite pure state pass
    ``mode`` (1 or 2); the reduced state of that mode is contracted on the
    fly and its density matrix is never materialized.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    (re_lo, re_hi), (im_lo, im_hi) = window
    if not (re_hi > re_lo and im_hi > im_lo):
        raise ValueError("window is degenerate")
    re_axis = np.linspace(re_lo, re_hi, resolution)
    im_axis = np.linspace(im_lo, im_hi, resolution)
    alphas = (re_axis[:, None] + 1j * im_axis[None, :]).ravel()

    if isinstance(state, JointState):
        if mode not in (1, 2):
            raise ValueError("mode (1 or 2) is required for a joint state")
        grids = [state.A if mode == 1 else state.A.T, state.B if mode == 1 else state.B.T]
    elif isinstance(state, TwoModeState):
        if mode not in (1, 2):
            raise ValueError("mode (1 or 2) is required for a two-mode state")
        grids = [state.grid if mode == 1 else state.grid.T]
    elif isinstance(state, ModeAmplitudes):
        grids = [state.amps[:, None]]
    elif isinstance(state, DensityMatrix):
        grids = None
    else:
        raise TypeError(f"cannot compute Q of {type(state).__name__}")

    q = np.empty(alphas.size, dtype=np.float64)
    if grids is not None:
        cutoff = grids[0].shape[0] - 1
        for start in range(0, alphas.size, _Q_CHUNK):
            chunk = alphas[start : start + _Q_CHUNK]
            rows = _coherent_overlap_rows(chunk, cutoff)
            acc = np.zeros(chunk.size, dtype=np.float64)
            for g in grids:
                contracted = rows.conj() @ g
                acc += np.sum(np.abs(contracted) ** 2, axis=1)
            q[start : start + _Q_CHUNK] = acc
    else:
        rho = state.entries
        cutoff = rho.shape[0] - 1
        for start in range(0, alphas.size, _Q_CHUNK):
            chunk = alphas[start : start + _Q_CHUNK]
            rows = _coherent_overlap_rows(chunk, cutoff)
            q[start : start + _Q_CHUNK] = np.real(np.sum((rows.conj() @ rho) * rows, axis=1))
    # Clamp the last-ulp negatives/overshoots produced by the contraction.
    np.clip(q, 0.0, 1.0, out=q)
    return QGrid(values=q.reshape(resolution, resolution), re_axis=re_axis, im_axis=im_axis)


def q_peaks(grid: QGrid, rel_threshold: float = 0.5) -> list[tuple[float, float, float]]:
    """Local maxima of a Q grid above ``rel_threshold`` of the global max.

    Returns (|alpha|, arg(alpha), Q) triples sorted by descending Q.  A cell
    counts as a local maximum when it is >= all of its 8 neighbours.
    """
    v = grid.values
    cut = rel_threshold * float(v.max())
    peaks: list[tuple[float, float, float]] = []
    rows, cols = v.shape
    for i in range(rows):
        for j in range(cols):
            val = v[i, j]
            if val < cut:
                continue
            neigh = v[max(i - 1, 0) : i + 2, max(j - 1, 0) : j + 2]
            if val >= neigh.max():
                alpha = complex(grid.re_axis[i], grid.im_axis[j])
                peaks.append((abs(alpha), math.atan2(alpha.imag, alpha.real), float(val)))
    peaks.sort(key=lambda p: -p[2])
    return peaks


def register_purity_excluding_atom(register: AtomRegisterState, atom_index: int) -> float:
    """Purity of the reduced state after tracing out one register atom.

    The kept system is (both modes + all other atoms).  Branch labels are
    grouped by the traced atom's symbol; Tr(rho^2) follows from the pairwise
    overlaps of the grouped (unnormalized) vectors.
    """
    size = register.register_size
    if not (0 <= atom_index < size):
        raise ValueError(f"atom_index {atom_index} outside register of size {size}")
    groups: dict[str, dict[str, np.ndarray]] = {"a": {}, "b": {}}
    for label, grid in register.branches.items():
        kept = label[:atom_index] + label[atom_index + 1 :]
        groups[label[atom_index]][kept] = grid
    total = 0.0
    for s1 in ("a", "b"):
        for s2 in ("a", "b"):
            overlap = 0.0 + 0.0j
            for kept, g1 in groups[s1].items():
                g2 = groups[s2].get(kept)
                if g2 is not None:
                    overlap += np.vdot(g1, g2)
            total += abs(overlap) ** 2
    return float(total)
