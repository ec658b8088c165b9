"""Large-field analysis: disentanglement times, the psi_+/- field states,
first-order rotated-product approximations, cat-state targets, and revivals.

For peaked photon distributions with mean ratio kappa = nbar/mbar != 1, the
atom factorizes from the field at

    gt0(j) = (2j+1) pi sqrt(kappa) / |kappa - 1|,   j = 0, 1, 2, ...

leaving the field in a superposition of the two dressed states

    psi_+[n, m] = C1[n] C2[m] e^{+i gt sqrt(n (m+1))}
    psi_-[n, m] = C1[n] C2[m] e^{-i gt sqrt(n (m+1))}.

To first order around the means, a coherent-state input turns each psi_+/-
into a rotated coherent product with a global phase (the basis of the
cat-state targets and of the revival-time identity gt_r = 2 pi sqrt(k l)
at kappa = l/k).

kappa in these helpers should always come from *measured* means
(``LargeFieldParams.from_modes`` uses photon_stats), so that squeezed-state
convention choices can never silently shift the predicted times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .prepare import photon_stats, raw_coherent_amplitudes
from .states import ModeAmplitudes, TwoModeState

KAPPA_UNITY_TOL = 1e-9


class KappaUnityError(ValueError):
    """kappa = 1: equal mean photon numbers admit no disentanglement time."""


def sign_value(sign) -> int:
    if sign in (+1, "+", "plus"):
        return +1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


@dataclass(frozen=True)
class LargeFieldParams:
    """Mean photon numbers of the two modes and their ratio kappa.

    ``phi`` is the phase of the rotated atomic basis (e^{i phi}|a> +- |b>)/sqrt(2);
    it defaults to zero to match zero initial field phases.
    """

    kappa: float
    nbar: float
    mbar: float
    phi: float = 0.0

    def __post_init__(self):
        if self.nbar <= 0 or self.mbar <= 0:
            raise ValueError("mean photon numbers must be positive")
        if abs(self.kappa - self.nbar / self.mbar) > 1e-9:
            raise ValueError(
                f"kappa={self.kappa} inconsistent with nbar/mbar={self.nbar / self.mbar}"
            )

    @classmethod
    def from_modes(cls, mode1: ModeAmplitudes, mode2: ModeAmplitudes, phi: float = 0.0) -> "LargeFieldParams":
        """Build from measured means of actual amplitude vectors."""
        nbar = photon_stats(mode1).mean
        mbar = photon_stats(mode2).mean
        if nbar <= 0 or mbar <= 0:
            raise ValueError("both modes need nonzero mean photon number")
        return cls(kappa=nbar / mbar, nbar=nbar, mbar=mbar, phi=phi)


def disentanglement_time_from_ratio(kappa: float, j: int) -> float:
    """gt0(j) = (2j+1) pi sqrt(kappa) / |kappa - 1| (j = 0 is the first)."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if abs(kappa - 1.0) <= KAPPA_UNITY_TOL:
        raise KappaUnityError("kappa = 1: the atom never disentangles at a fixed time")
    return (2 * j + 1) * math.pi * math.sqrt(kappa) / abs(kappa - 1.0)


def disentanglement_time(params: LargeFieldParams, j: int) -> float:
    """gt0(j) for the measured photon-number ratio of ``params``."""
    return disentanglement_time_from_ratio(params.kappa, j)


def _phase_grid(shape: tuple[int, int]) -> np.ndarray:
    n = np.arange(shape[0])[:, None]
    m = np.arange(shape[1])[None, :]
    return np.sqrt(n * (m + 1.0))


def build_psi_pm(C1: ModeAmplitudes, C2: ModeAmplitudes, sign, gt: float) -> TwoModeState:
    """Dressed field state psi_+/-: the product grid with phases e^{+-i gt sqrt(n(m+1))}.

    At gt = 0 this is exactly the product C1 x C2; the phases leave every
    |C1[n] C2[m]| unchanged, so no renormalization is needed beyond the
    input truncation.
    """
    s = sign_value(sign)
    grid = np.outer(C1.amps, C2.amps) * np.exp(1j * s * gt * _phase_grid((C1.amps.size, C2.amps.size)))
    norm = math.sqrt(float(np.sum(np.abs(grid) ** 2)))
    return TwoModeState(grid / norm)


class RevivalTimes(NamedTuple):
    kappa: float
    gt_r: float


def revival_times(k: int, l: int) -> RevivalTimes:
    """Fundamental revival time 2 pi sqrt(k l) at rational ratio kappa = l/k.

    The q-th revival sits at q * gt_r.
    """
    if k < 1 or l < 1:
        raise ValueError("k and l must be positive integers")
    return RevivalTimes(kappa=l / k, gt_r=2.0 * math.pi * math.sqrt(k * l))


@dataclass(frozen=True)
class ApproxProductState:
    """First-order approximation of psi_+/- for coherent inputs.

    The dressed state rotates each mode in phase space and acquires a global
    phase:  psi_s(t) ~ e^{i s sqrt(kappa) gt / 2}
                       |nu e^{i s gt / (2 sqrt(kappa))}> |mu e^{i s sqrt(kappa) gt / 2}>.
    Valid for coherent-state inputs; higher-order n^p m^q cross terms (which
    entangle the modes at large gt) are dropped.
    """

    alpha1: complex
    alpha2: complex
    global_phase: complex

    def materialize(self, cutoff1: int, cutoff2: int) -> TwoModeState:
        """Dense grid including the global phase, renormalized after truncation."""
        g1 = raw_coherent_amplitudes(self.alpha1, cutoff1)
        g2 = raw_coherent_amplitudes(self.alpha2, cutoff2)
        grid = self.global_phase * np.outer(g1, g2)
        norm = math.sqrt(float(np.sum(np.abs(grid) ** 2)))
        if norm == 0.0:
            raise ValueError("materialized grid vanished; cutoffs far too small")
        return TwoModeState(grid / norm)


def approx_product_state(nu: complex, mu: complex, kappa: float, sign, gt: float) -> ApproxProductState:
    """Rotated coherent product approximating psi_+/- at time gt."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    s = sign_value(sign)
    rot1 = s * gt / (2.0 * math.sqrt(kappa))
    rot2 = s * math.sqrt(kappa) * gt / 2.0
    return ApproxProductState(
        alpha1=complex(nu) * np.exp(1j * rot1),
        alpha2=complex(mu) * np.exp(1j * rot2),
        global_phase=complex(np.exp(1j * rot2)),
    )


def cat_target_state(
    nu: complex,
    mu: complex,
    kappa: float,
    j: int,
    atom_init: str,
    cutoff1: int,
    cutoff2: int,
) -> TwoModeState:
    """Analytic two-mode cat the exact evolution is compared against.

    The two branches are the rotated coherent products of
    :func:`approx_product_state` evaluated at gt0(j), including their global
    phases.  Decomposing the initial bare atomic level over the rotated
    basis fixes the combination: starting from |a> the field is
    proportional to (branch_- - branch_+), starting from |b> to
    (branch_- + branch_+).  The normalization constant is computed
    numerically from the branch overlap, which for macroscopically distinct
    branches is exponentially small.
    """
    if atom_init not in ("a", "b"):
        raise ValueError("atom_init must be 'a' or 'b'")
    gt0 = disentanglement_time_from_ratio(kappa, j)
    plus = approx_product_state(nu, mu, kappa, "+", gt0).materialize(cutoff1, cutoff2)
    minus = approx_product_state(nu, mu, kappa, "-", gt0).materialize(cutoff1, cutoff2)
    rel = -1.0 if atom_init == "a" else +1.0
    combo = minus.grid + rel * plus.grid
    norm = math.sqrt(float(np.sum(np.abs(combo) ** 2)))
    return TwoModeState(combo / norm)


def conditional_field_state(C1: ModeAmplitudes, C2: ModeAmplitudes, gt: float) -> TwoModeState:
    """Field left behind when an atom entering in |b> is measured in |b> at gt.

    Exactly (psi_+ + psi_-)/2 up to normalization: the grid is the product
    weighted by cos(gt sqrt(n(m+1))).
    """
    grid = np.outer(C1.amps, C2.amps) * np.cos(gt * _phase_grid((C1.amps.size, C2.amps.size)))
    norm = math.sqrt(float(np.sum(np.abs(grid) ** 2)))
    if norm < 1e-12:
        raise ValueError("conditional state has vanishing norm at this time")
    return TwoModeState(grid / norm)
