"""Executable state-preparation and quantum-logic protocols.

Each protocol drives the exact propagator through a fixed experimental
sequence (interaction, optional classical pulse, projective measurement) and
returns a ProtocolReport with outcome probabilities, fidelities against the
analytic targets, and intermediate purities.

Measurement outcomes are explicit parameters so every run is deterministic;
``sample_outcome`` draws an outcome from the computed probabilities for
callers that want a stochastic wrapper.  Gate interaction times are passed
symbolically precise (pi/sqrt(3), pi/sqrt(n'), pi/4): no time grid is involved.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
import numpy as np

from . import largefield, observables, prepare
from .evolution import evolve, pass_atom
from .states import (
    AtomRegisterState,
    AtomState,
    JointState,
    ModeAmplitudes,
    TwoModeState,
    fidelity,
    inner_product,
    make_joint_state,
)

# CLI verification gate for the exact logic protocols.
GATE_FIDELITY_THRESHOLD = 1.0 - 1e-9

# pi/2 pulse: |a> -> (|a>+|b>)/sqrt(2), |b> -> (|a>-|b>)/sqrt(2); squares to identity.
PI_HALF_PULSE = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)


class ImpossibleOutcomeError(ValueError):
    """Requested measurement outcome has (numerically) zero probability."""


@dataclass(frozen=True)
class ProtocolReport:
    name: str
    inputs: dict
    outcome_probabilities: dict = field(default_factory=dict)
    fidelities: dict = field(default_factory=dict)
    intermediate_purities: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def min_fidelity(self) -> float:
        return min(self.fidelities.values()) if self.fidelities else float("nan")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": dict(self.inputs),
            "outcome_probabilities": dict(self.outcome_probabilities),
            "fidelities": dict(self.fidelities),
            "intermediate_purities": dict(self.intermediate_purities),
            "elapsed": self.elapsed,
        }


def atom_pulse(state: JointState, u: np.ndarray) -> JointState:
    """Apply a 2x2 unitary to the atomic factor only."""
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2):
        raise ValueError("pulse must be a 2x2 matrix")
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(2))))
    if dev > 1e-10:
        raise ValueError(f"pulse deviates from unitarity by {dev:.3e}")
    A2 = u[0, 0] * state.A + u[0, 1] * state.B
    B2 = u[1, 0] * state.A + u[1, 1] * state.B
    return JointState(A=A2, B=B2, require_normalized=state.require_normalized)


def measure_atom(state: JointState, outcome: str) -> tuple[TwoModeState, float]:
    """Project the atom onto |a> or |b>; returns the collapsed field state."""
    if outcome not in ("a", "b"):
        raise ValueError("outcome must be 'a' or 'b'")
    pa, pb = state.level_populations()
    prob = pa if outcome == "a" else pb
    if prob < 1e-12:
        raise ImpossibleOutcomeError(f"outcome {outcome!r} has probability {prob:.3e}")
    grid = (state.A if outcome == "a" else state.B) / math.sqrt(prob)
    return TwoModeState(grid), prob


def sample_outcome(state: JointState, seed: int | np.random.Generator) -> str:
    """Draw a measurement outcome from the atomic populations."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pa, _ = state.level_populations()
    return "a" if rng.random() < pa else "b"


def _signed_fidelity(target: JointState, out: JointState, sign: float = 1.0) -> float:
    """Re <sign * target | out>: equals 1 only when out matches including sign."""
    return float(np.real(sign * inner_product(target, out)))


def run_phase_gate() -> ProtocolReport:
    """Two-mode phase gate with the atom as ancilla.

    Modes prepared in Fock states {|0>, |3>}, interaction time gt = pi/sqrt(3).
    The only sign flips are |0,3,a> -> -|0,3,a> and |3,0,b> -> -|3,0,b>; rows
    like |3,3,.> pick up a full 2*pi Rabi rotation and return unchanged.
    """
    start = time.perf_counter()
    gt = math.pi / math.sqrt(3.0)
    cutoff = 5  # fock(3) support plus exchange headroom
    signs = {(0, 3, "a"): -1.0, (3, 0, "b"): -1.0}
    fidelities: dict[str, float] = {}
    purities: dict[str, float] = {}
    for n1 in (0, 3):
        for n2 in (0, 3):
            for level in ("a", "b"):
                atom = AtomState.a() if level == "a" else AtomState.b()
                initial = make_joint_state(
                    prepare.fock_amplitudes(n1, cutoff),
                    prepare.fock_amplitudes(n2, cutoff),
                    atom,
                )
                out = evolve(initial, gt)
                sign = signs.get((n1, n2, level), 1.0)
                label = f"{n1},{n2},{level}"
                fidelities[label] = _signed_fidelity(initial, out, sign)
                purities[label] = observables.purity(observables.reduced_atom(out))
    return ProtocolReport(
        name="phase-gate",
        inputs={"gt": gt, "modes": "fock {0,3} x {0,3}", "cutoffs": [cutoff, cutoff]},
        fidelities=fidelities,
        intermediate_purities=purities,
        elapsed=time.perf_counter() - start,
    )


def run_atomic_cnot(n_prime: int) -> ProtocolReport:
    """C-NOT with mode 1 as control (|0> or |n'>) and the atom as target.

    At gt = pi / sqrt(n') the atomic states (|a> +- |b>)/sqrt(2) flip into
    each other when the control holds n' photons and stay put on vacuum.
    Only these four rows are exact (and verified); superposed controls pick
    up extra Rabi phases the scheme does not correct.
    """
    if n_prime < 1:
        raise ValueError("n_prime must be a positive integer")
    start = time.perf_counter()
    gt = math.pi / math.sqrt(float(n_prime))
    cutoff1 = n_prime + 2
    cutoff2 = 2
    fidelities: dict[str, float] = {}
    purities: dict[str, float] = {}
    atoms = {"phi+": AtomState.plus(), "phi-": AtomState.minus()}
    flips = {"phi+": "phi-", "phi-": "phi+"}
    for control in (0, n_prime):
        for name, atom in atoms.items():
            initial = make_joint_state(
                prepare.fock_amplitudes(control, cutoff1),
                prepare.fock_amplitudes(0, cutoff2),
                atom,
            )
            out = evolve(initial, gt)
            target_atom = atoms[flips[name]] if control == n_prime else atom
            target = make_joint_state(
                prepare.fock_amplitudes(control, cutoff1),
                prepare.fock_amplitudes(0, cutoff2),
                target_atom,
            )
            label = f"{control},0,{name}"
            fidelities[label] = _signed_fidelity(target, out)
            purities[label] = observables.purity(observables.reduced_atom(out))
    return ProtocolReport(
        name="cnot",
        inputs={"n_prime": n_prime, "gt": gt, "cutoffs": [cutoff1, cutoff2]},
        fidelities=fidelities,
        intermediate_purities=purities,
        elapsed=time.perf_counter() - start,
    )


def _epr_target(sign: float, cutoff1: int, cutoff2: int) -> TwoModeState:
    grid = np.zeros((cutoff1 + 1, cutoff2 + 1), dtype=np.complex128)
    grid[0, 1] = 1.0 / math.sqrt(2.0)
    grid[1, 0] = sign * 1j / math.sqrt(2.0)
    return TwoModeState(grid)


def run_epr(outcome: str) -> tuple[ProtocolReport, TwoModeState]:
    """Single-photon EPR pair conditioned on the atomic measurement.

    |0,1,a> evolves for gt = pi/4, the atom gets a pi/2 pulse and is
    measured: outcome a leaves (|0,1> - i|1,0>)/sqrt(2), outcome b the
    +i combination, each with probability 1/2.
    """
    if outcome not in ("a", "b"):
        raise ValueError("outcome must be 'a' or 'b'")
    start = time.perf_counter()
    cutoff1, cutoff2 = 2, 3
    initial = make_joint_state(
        prepare.fock_amplitudes(0, cutoff1),
        prepare.fock_amplitudes(1, cutoff2),
        AtomState.a(),
    )
    pulsed = atom_pulse(evolve(initial, math.pi / 4.0), PI_HALF_PULSE)
    states: dict[str, TwoModeState] = {}
    probs: dict[str, float] = {}
    fidelities: dict[str, float] = {}
    purities: dict[str, float] = {}
    targets = {"a": _epr_target(-1.0, cutoff1, cutoff2), "b": _epr_target(+1.0, cutoff1, cutoff2)}
    for branch in ("a", "b"):
        collapsed, prob = measure_atom(pulsed, branch)
        states[branch] = collapsed
        probs[branch] = prob
        fidelities[branch] = fidelity(collapsed, targets[branch])
        purities[f"mode1_outcome_{branch}"] = observables.purity(observables.reduced_mode(collapsed, 1))
    report = ProtocolReport(
        name="epr",
        inputs={"outcome": outcome, "gt": math.pi / 4.0, "cutoffs": [cutoff1, cutoff2]},
        outcome_probabilities=probs,
        fidelities=fidelities,
        intermediate_purities=purities,
        elapsed=time.perf_counter() - start,
    )
    return report, states[outcome]


def _ghz_mode(sign: float, cutoff: int) -> ModeAmplitudes:
    return prepare.superpose_fock([(0, 1.0), (3, sign)], cutoff)


def run_ghz(atom1_sign) -> tuple[ProtocolReport, AtomRegisterState]:
    """GHZ state of (mode 1, mode 2, atom 1) after two atoms transit.

    Both modes start in (|0> + |3>)/sqrt(2), atom 1 in (|a> +- |b>)/sqrt(2),
    atom 2 in |a>; each atom interacts for gt = pi/sqrt(3).  The second atom
    undoes the conditional phase of matching branches, ending disentangled
    in |a> and leaving (|+,+,a1> +- |-,-,b1>)/sqrt(2).
    """
    sign = largefield.sign_value(atom1_sign)
    start = time.perf_counter()
    gt = math.pi / math.sqrt(3.0)
    cutoff = 5
    plus1 = _ghz_mode(+1.0, cutoff)
    field0 = TwoModeState(np.outer(plus1.amps, plus1.amps))
    register = AtomRegisterState.from_two_mode(field0)
    atom1 = AtomState.plus() if sign > 0 else AtomState.minus()
    register = pass_atom(register, atom1, gt)
    register = pass_atom(register, AtomState.a(), gt)

    minus_mode = _ghz_mode(-1.0, cutoff)
    target = AtomRegisterState(
        {
            "aa": np.outer(plus1.amps, plus1.amps) / math.sqrt(2.0),
            "ba": sign * np.outer(minus_mode.amps, minus_mode.amps) / math.sqrt(2.0),
        }
    )
    probs = {
        label: float(np.sum(np.abs(grid) ** 2)) for label, grid in sorted(register.branches.items())
    }
    report = ProtocolReport(
        name="ghz",
        inputs={"atom1_sign": "+" if sign > 0 else "-", "gt": gt, "cutoffs": [cutoff, cutoff]},
        outcome_probabilities=probs,
        fidelities={"ghz_target": fidelity(register, target)},
        intermediate_purities={
            "without_atom2": observables.register_purity_excluding_atom(register, 1),
        },
        elapsed=time.perf_counter() - start,
    )
    return report, register


@dataclass(frozen=True)
class CatOutputs:
    """States and phase-space grids produced by the cat protocol."""

    exact: JointState
    psi_plus: TwoModeState
    psi_minus: TwoModeState
    psi_combination: TwoModeState
    cat_target: TwoModeState
    q_grids: dict


def _field_fidelity(state: JointState, target: TwoModeState) -> float:
    """<target| Tr_atom(|state><state|) |target>."""
    ta = complex(np.sum(np.conj(target.grid) * state.A))
    tb = complex(np.sum(np.conj(target.grid) * state.B))
    return min(abs(ta) ** 2 + abs(tb) ** 2, 1.0)


def run_cat(
    nbar: float,
    mbar: float,
    family: str = "coherent",
    r1: float = 0.0,
    r2: float = 0.0,
    j: int = 0,
    atom_init: str = "a",
    q_resolution: int = 201,
    leak_tol: float = 1e-10,
) -> tuple[ProtocolReport, CatOutputs]:
    """Entangled two-mode cat preparation at the j-th disentanglement time.

    The modes are prepared with *measured* mean photon numbers nbar and mbar
    (for the squeezed family the drive amplitude is solved from the measured
    mean relation), the exact state is evolved to gt0(j) computed from the
    measured ratio, and the field is compared against two analytic targets:
    the rotated-coherent-branch cat (``cat_target``, built from a coherent
    state of the same mean) and the dressed-state combination
    (psi_- -+ psi_+)/N (``psi_combination``).  Q-grids of both modes and
    both dressed branches support phase-structure checks.
    """
    if atom_init not in ("a", "b"):
        raise ValueError("atom_init must be 'a' or 'b'")
    if family not in ("coherent", "squeezed"):
        raise ValueError("family must be 'coherent' or 'squeezed'")
    start = time.perf_counter()
    spec1 = prepare.spec_for_mean(family, nbar, r1)
    spec2 = prepare.spec_for_mean(family, mbar, r2)
    mode1 = prepare.build_mode(spec1, leak_tol=leak_tol)
    mode2 = prepare.build_mode(spec2, leak_tol=leak_tol)
    params = largefield.LargeFieldParams.from_modes(mode1, mode2)
    gt0 = largefield.disentanglement_time(params, j)

    atom = AtomState.a() if atom_init == "a" else AtomState.b()
    exact = evolve(make_joint_state(mode1, mode2, atom), gt0)

    psi_plus = largefield.build_psi_pm(mode1, mode2, "+", gt0)
    psi_minus = largefield.build_psi_pm(mode1, mode2, "-", gt0)
    rel = -1.0 if atom_init == "a" else +1.0
    combo = psi_minus.grid + rel * psi_plus.grid
    combo = combo / math.sqrt(float(np.sum(np.abs(combo) ** 2)))
    psi_combination = TwoModeState(combo)
    cat_target = largefield.cat_target_state(
        math.sqrt(params.nbar),
        math.sqrt(params.mbar),
        params.kappa,
        j,
        atom_init,
        mode1.cutoff,
        mode2.cutoff,
    )

    q_grids: dict[str, observables.QGrid] = {}
    for which, mean in ((1, params.nbar), (2, params.mbar)):
        half = math.sqrt(mean) + 4.0 * mean**0.25
        window = ((-half, half), (-half, half))
        q_grids[f"mode{which}_initial"] = observables.husimi_q(
            TwoModeState(np.outer(mode1.amps, mode2.amps)), window, q_resolution, mode=which
        )
        q_grids[f"mode{which}_plus"] = observables.husimi_q(psi_plus, window, q_resolution, mode=which)
        q_grids[f"mode{which}_minus"] = observables.husimi_q(psi_minus, window, q_resolution, mode=which)

    pa, pb = exact.level_populations()
    report = ProtocolReport(
        name="cat",
        inputs={
            "family": family,
            "nbar_target": nbar,
            "mbar_target": mbar,
            "nbar_measured": params.nbar,
            "mbar_measured": params.mbar,
            "kappa": params.kappa,
            "r1": r1,
            "r2": r2,
            "j": j,
            "j_one_based": j + 1,
            "gt0": gt0,
            "atom_init": atom_init,
            "cutoffs": [mode1.cutoff, mode2.cutoff],
        },
        outcome_probabilities={"a": pa, "b": pb},
        fidelities={
            "field_vs_cat_target": _field_fidelity(exact, cat_target),
            "field_vs_psi_combination": _field_fidelity(exact, psi_combination),
        },
        intermediate_purities={
            "atom_at_gt0": observables.purity(observables.reduced_atom(exact)),
            "mode1_exact": observables.purity(observables.reduced_mode(exact, 1)),
            "mode2_exact": observables.purity(observables.reduced_mode(exact, 2)),
            "mode1_psi_plus": observables.purity(observables.reduced_mode(psi_plus, 1)),
            "mode1_psi_minus": observables.purity(observables.reduced_mode(psi_minus, 1)),
        },
        elapsed=time.perf_counter() - start,
    )
    outputs = CatOutputs(
        exact=exact,
        psi_plus=psi_plus,
        psi_minus=psi_minus,
        psi_combination=psi_combination,
        cat_target=cat_target,
        q_grids=q_grids,
    )
    return report, outputs
