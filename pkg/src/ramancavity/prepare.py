"""Preparation of single-mode field states and their photon statistics.

Fock, coherent, and squeezed-coherent amplitude vectors, Fock superpositions,
moment-based statistics, and a cutoff chooser that bounds truncation leakage.

The squeezed-coherent coefficients follow the printed closed form
tanh(r)^{n/2} / sqrt(n! 2^n cosh r) * exp(-nu^2 (1 - tanh r)/2) * H_n(nu / sqrt(sinh 2r))
for real nu, evaluated through a three-term recurrence on the *full*
coefficient so that no Hermite value or factorial is ever formed explicitly
(raw H_n overflows near n ~ 300).  The recurrence is

    C_{n+1} = (nu / cosh r) C_n / sqrt(n+1) - tanh(r) sqrt(n/(n+1)) C_{n-1},

obtained by folding the prefactors into H_{n+1} = 2x H_n - 2n H_{n-1}.
Measured moments of this distribution satisfy
mean = nu^2 e^{-2r} + sinh^2 r; use :func:`amplitude_for_mean` to pick nu
for a wanted mean photon number.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
from scipy.special import gammaln

from .states import CONSTRUCTION_TOL, ModeAmplitudes, NormalizationError

logger = logging.getLogger(__name__)

# Hard search bound for cutoff_for: no state family used here needs more.
_MAX_CUTOFF = 100_000

FAMILIES = ("fock", "coherent", "squeezed")


class LeakageError(NormalizationError):
    """Truncation leakage at the requested cutoff exceeds the tolerance."""


class VacuumStatisticsError(ValueError):
    """Mandel Q is undefined for zero mean photon number."""


class PhotonStats(NamedTuple):
    mean: float
    variance: float

    @property
    def mandel_q(self) -> float:
        """(variance - mean) / mean; negative means sub-Poissonian."""
        if self.mean <= 0.0:
            raise VacuumStatisticsError("Mandel Q is undefined for the vacuum (mean = 0)")
        return (self.variance - self.mean) / self.mean


def fock_amplitudes(n: int, cutoff: int) -> ModeAmplitudes:
    """Number state |n> on a basis truncated at ``cutoff``."""
    if n < 0 or cutoff < 0:
        raise ValueError("n and cutoff must be nonnegative")
    if n > cutoff:
        raise ValueError(f"Fock index n={n} exceeds cutoff={cutoff}")
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    amps[n] = 1.0
    return ModeAmplitudes(amps)


def raw_coherent_amplitudes(nu: complex, cutoff: int) -> np.ndarray:
    """Unnormalized coherent amplitudes e^{-|nu|^2/2} nu^n / sqrt(n!).

    Magnitudes are assembled in log space, so arbitrarily large |nu| never
    overflows an intermediate.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    nu = complex(nu)
    n = np.arange(cutoff + 1)
    if nu == 0:
        amps = np.zeros(cutoff + 1, dtype=np.complex128)
        amps[0] = 1.0
        return amps
    log_mag = -abs(nu) ** 2 / 2.0 + n * math.log(abs(nu)) - gammaln(n + 1) / 2.0
    return np.exp(log_mag) * np.exp(1j * n * np.angle(nu))


def raw_squeezed_amplitudes(nu: float, r: float, cutoff: int) -> np.ndarray:
    """Unnormalized squeezed-coherent amplitudes via the stable recurrence."""
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    if r < 0:
        raise ValueError("squeezing parameter r must be >= 0")
    nu = float(nu)
    if r == 0.0:
        return raw_coherent_amplitudes(nu, cutoff)
    c = np.zeros(cutoff + 1, dtype=np.float64)
    t = math.tanh(r)
    c[0] = math.exp(-(nu**2) * (1.0 - t) / 2.0) / math.sqrt(math.cosh(r))
    if cutoff >= 1:
        c[1] = (nu / math.cosh(r)) * c[0]
    drive = nu / math.cosh(r)
    for n in range(1, cutoff):
        c[n + 1] = drive * c[n] / math.sqrt(n + 1) - t * math.sqrt(n / (n + 1)) * c[n - 1]
    return c.astype(np.complex128)


def _renormalized(raw: np.ndarray, leak_tol: float, what: str) -> ModeAmplitudes:
    norm_sq = float(np.sum(np.abs(raw) ** 2))
    leakage = 1.0 - norm_sq
    if leakage > leak_tol:
        raise LeakageError(
            f"{what}: truncation leakage {leakage:.3e} exceeds {leak_tol:.1e}; raise the cutoff"
        )
    factor = 1.0 / math.sqrt(norm_sq)
    logger.debug("%s renormalized by factor %.17g (leakage %.3e)", what, factor, leakage)
    return ModeAmplitudes(raw * factor)


def coherent_amplitudes(nu: complex, cutoff: int, leak_tol: float = CONSTRUCTION_TOL) -> ModeAmplitudes:
    """Coherent state |nu>, renormalized after truncation at ``cutoff``."""
    raw = raw_coherent_amplitudes(nu, cutoff)
    return _renormalized(raw, leak_tol, f"coherent(nu={nu})@{cutoff}")


def squeezed_amplitudes(nu: float, r: float, cutoff: int, leak_tol: float = CONSTRUCTION_TOL) -> ModeAmplitudes:
    """Squeezed coherent state for real nu, renormalized after truncation."""
    raw = raw_squeezed_amplitudes(nu, r, cutoff)
    return _renormalized(raw, leak_tol, f"squeezed(nu={nu}, r={r})@{cutoff}")


def superpose_fock(terms: Iterable[tuple[int, complex]], cutoff: int) -> ModeAmplitudes:
    """Normalized superposition sum_i w_i |n_i> of Fock states."""
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    for n, weight in terms:
        if n < 0 or n > cutoff:
            raise ValueError(f"Fock index {n} outside 0..{cutoff}")
        amps[n] += weight
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise ValueError("superposition weights sum to the zero vector")
    return ModeAmplitudes(amps / norm)


def photon_stats(mode: ModeAmplitudes) -> PhotonStats:
    """Mean and variance of the photon number; Mandel Q via the result."""
    p = mode.probabilities()
    n = np.arange(p.size, dtype=np.float64)
    mean = float(np.sum(n * p))
    variance = float(np.sum(n * n * p) - mean**2)
    return PhotonStats(mean=mean, variance=max(variance, 0.0))


@dataclass(frozen=True)
class ModeSpec:
    """Declarative description of a single-mode preparation.

    family 'fock' uses ``n``; 'coherent' uses complex ``nu``; 'squeezed'
    uses real ``nu`` and ``r``.
    """

    family: str
    n: int = 0
    nu: complex = 0.0
    r: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown state family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "squeezed":
            if complex(self.nu).imag != 0.0:
                raise ValueError("squeezed states require real nu")
            if self.r < 0:
                raise ValueError("squeezing parameter r must be >= 0")
        if self.family == "fock" and self.n < 0:
            raise ValueError("fock index must be nonnegative")


def amplitude_for_mean(family: str, nbar: float, r: float = 0.0) -> float:
    """Field amplitude nu whose prepared state has mean photon number nbar.

    For coherent states nu = sqrt(nbar).  For the squeezed family the
    measured mean is nu^2 e^{-2r} + sinh^2 r, so nu = e^r sqrt(nbar - sinh^2 r);
    nbar below sinh^2 r is unreachable at that squeezing.
    """
    if nbar < 0:
        raise ValueError("mean photon number must be nonnegative")
    if family == "coherent":
        return math.sqrt(nbar)
    if family == "squeezed":
        floor = math.sinh(r) ** 2
        if nbar < floor:
            raise ValueError(f"mean {nbar} unreachable: squeezing alone contributes sinh^2(r) = {floor:.4f}")
        return math.exp(r) * math.sqrt(nbar - floor)
    if family == "fock":
        if abs(nbar - round(nbar)) > 1e-12:
            raise ValueError("fock family needs an integer mean")
        return float(round(nbar))
    raise ValueError(f"unknown state family {family!r}")


def spec_for_mean(family: str, nbar: float, r: float = 0.0) -> ModeSpec:
    """ModeSpec hitting a target mean photon number (measured, not nominal)."""
    value = amplitude_for_mean(family, nbar, r)
    if family == "fock":
        return ModeSpec("fock", n=int(value))
    if family == "coherent":
        return ModeSpec("coherent", nu=value)
    return ModeSpec("squeezed", nu=value, r=r)


def _raw_for(spec: ModeSpec, cutoff: int) -> np.ndarray:
    if spec.family == "fock":
        amps = np.zeros(cutoff + 1, dtype=np.complex128)
        if spec.n <= cutoff:
            amps[spec.n] = 1.0
        return amps
    if spec.family == "coherent":
        return raw_coherent_amplitudes(spec.nu, cutoff)
    return raw_squeezed_amplitudes(float(spec.nu.real if isinstance(spec.nu, complex) else spec.nu), spec.r, cutoff)


def cutoff_for(spec: ModeSpec, leak_tol: float = CONSTRUCTION_TOL) -> int:
    """Smallest cutoff keeping tail probability below ``leak_tol``, plus 2.

    The +2 headroom accommodates the single-quantum transfer of the Raman
    exchange, which can push population one Fock step past the initial
    support.
    """
    if not (0.0 < leak_tol < 1.0):
        raise ValueError("leak_tol must lie in (0, 1)")
    if spec.family == "fock":
        return spec.n + 2
    # Grow the window geometrically, then locate the first cutoff whose
    # cumulative probability reaches 1 - leak_tol.
    guess = 32
    if spec.family == "coherent":
        guess = int(abs(spec.nu) ** 2 + 10 * abs(spec.nu) + 16)
    elif spec.family == "squeezed":
        stats_mean = float(spec.nu.real) ** 2 * math.exp(-2 * spec.r) + math.sinh(spec.r) ** 2
        guess = int(stats_mean + 10 * math.sqrt(stats_mean + 1) + 16)
    size = guess
    while size <= _MAX_CUTOFF:
        raw = _raw_for(spec, size)
        cum = np.cumsum(np.abs(raw) ** 2)
        hits = np.nonzero(cum >= 1.0 - leak_tol)[0]
        if hits.size:
            return int(hits[0]) + 2
        size *= 2
    raise LeakageError(f"no cutoff below {_MAX_CUTOFF} reaches leakage {leak_tol:.1e} for {spec}")


def build_mode(spec: ModeSpec, cutoff: int | None = None, leak_tol: float = CONSTRUCTION_TOL) -> ModeAmplitudes:
    """Prepare the state described by ``spec``; cutoff defaults to cutoff_for."""
    if cutoff is None:
        cutoff = cutoff_for(spec, leak_tol)
    if spec.family == "fock":
        return fock_amplitudes(spec.n, cutoff)
    if spec.family == "coherent":
        return coherent_amplitudes(spec.nu, cutoff, leak_tol)
    return squeezed_amplitudes(float(spec.nu.real if isinstance(spec.nu, complex) else spec.nu), spec.r, cutoff, leak_tol)
