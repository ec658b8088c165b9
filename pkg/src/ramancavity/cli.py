"""Command-line interface: scenario sweeps, Q-function grids, protocol runs.

Subcommands
    purity-sweep   atomic or mode purity versus interaction time (CSV)
    qfunc          Q-function grids of both modes and dressed branches (CSV)
    protocol       run a named protocol, write its JSON report
    times          disentanglement and revival times (JSON)

Configuration is a flat ``key = value`` text file; command-line flags
override file values.  Output files embed the full parameter set plus the
artifact version, and identical inputs produce byte-identical files (wall
timing is zeroed in reports unless --timing is given).

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 numerical failure (edge leakage, normalization breach).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, largefield, observables, prepare, protocols
from .evolution import EdgeLeakageError, evolve
from .states import AtomState, NormalizationError, make_joint_state

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    """Bad configuration key, value, or output path."""


DEFAULTS: dict[str, object] = {
    "state1.family": "coherent",
    "state1.nbar": 150.0,
    "state1.r": 0.0,
    "state2.family": "coherent",
    "state2.nbar": 50.0,
    "state2.r": 0.0,
    "atom.init": "a",
    "sweep.gt_max": 25.0,
    "sweep.steps": 500,
    "sweep.kind": "atomic",
    "q.window": 0.0,  # half-width; 0 selects sqrt(nbar) + 4 nbar^(1/4)
    "q.resolution": 201,
    "q.j": 0,
    "cutoff.leak_tol": 1e-10,
    "out.path": "",
}

_COERCE = {
    "state1.family": str,
    "state2.family": str,
    "atom.init": str,
    "sweep.kind": str,
    "out.path": str,
    "sweep.steps": int,
    "q.resolution": int,
    "q.j": int,
}


def load_config_file(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment, blanks ignored."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


def resolve_config(args: argparse.Namespace) -> dict[str, object]:
    """Defaults <- config file <- command-line flags, with type coercion."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        for key, raw in load_config_file(args.config).items():
            cfg[key] = raw
    overrides = {
        "state1.family": getattr(args, "family1", None) or getattr(args, "family", None),
        "state2.family": getattr(args, "family2", None) or getattr(args, "family", None),
        "state1.nbar": getattr(args, "nbar1", None),
        "state2.nbar": getattr(args, "nbar2", None),
        "state1.r": getattr(args, "r1", None) if getattr(args, "r1", None) is not None else getattr(args, "r", None),
        "state2.r": getattr(args, "r2", None) if getattr(args, "r2", None) is not None else getattr(args, "r", None),
        "atom.init": getattr(args, "atom", None),
        "sweep.gt_max": getattr(args, "gt_max", None),
        "sweep.steps": getattr(args, "steps", None),
        "sweep.kind": getattr(args, "kind", None),
        "q.window": getattr(args, "window", None),
        "q.resolution": getattr(args, "resolution", None),
        "q.j": getattr(args, "j", None),
        "cutoff.leak_tol": getattr(args, "leak_tol", None),
        "out.path": getattr(args, "out", None),
    }
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    typed: dict[str, object] = {}
    for key, value in cfg.items():
        coerce = _COERCE.get(key, float)
        try:
            typed[key] = coerce(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config key {key!r}: cannot read {value!r} as {coerce.__name__}") from exc
    if typed["atom.init"] not in ("a", "b"):
        raise ConfigError("atom.init must be 'a' or 'b'")
    if typed["sweep.kind"] not in ("atomic", "mode"):
        raise ConfigError("sweep.kind must be 'atomic' or 'mode'")
    if typed["sweep.steps"] < 0:
        raise ConfigError("sweep.steps must be >= 0")
    if not typed["out.path"]:
        raise ConfigError("an output path is required (out.path or --out)")
    return typed


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_output(path: str, text: str, force: bool) -> None:
    target = Path(path)
    if target.exists() and not force:
        raise ConfigError(f"refusing to overwrite existing {path}; pass --force")
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", newline="\n") as fh:
        fh.write(text)


def _csv_text(params: dict[str, object], columns: list[str], rows: list[list[float | str]]) -> str:
    lines = [f"# ramancavity {__version__}"]
    for key in sorted(params):
        lines.append(f"# {key} = {params[key]}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else _fmt(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _json_text(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _build_modes(cfg: dict[str, object]):
    leak = float(cfg["cutoff.leak_tol"])
    spec1 = prepare.spec_for_mean(str(cfg["state1.family"]), float(cfg["state1.nbar"]), float(cfg["state1.r"]))
    spec2 = prepare.spec_for_mean(str(cfg["state2.family"]), float(cfg["state2.nbar"]), float(cfg["state2.r"]))
    return prepare.build_mode(spec1, leak_tol=leak), prepare.build_mode(spec2, leak_tol=leak)


def _sweep_times(cfg: dict[str, object]) -> np.ndarray:
    gt_max = float(cfg["sweep.gt_max"])
    steps = int(cfg["sweep.steps"])
    if gt_max <= 0.0 or steps == 0:
        return np.array([0.0])
    return np.linspace(0.0, gt_max, steps + 1)


def cmd_purity_sweep(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    mode1, mode2 = _build_modes(cfg)
    gts = _sweep_times(cfg)
    params = dict(cfg)
    params["cutoff1"] = mode1.cutoff
    params["cutoff2"] = mode2.cutoff
    rows: list[list[float]] = []
    if cfg["sweep.kind"] == "atomic":
        atom = AtomState.a() if cfg["atom.init"] == "a" else AtomState.b()
        initial = make_joint_state(mode1, mode2, atom)
        for gt in gts:
            state = evolve(initial, float(gt))
            rows.append([float(gt), observables.purity(observables.reduced_atom(state))])
        columns = ["gt", "atomic_purity"]
    else:
        for gt in gts:
            psi_plus = largefield.build_psi_pm(mode1, mode2, "+", float(gt))
            conditional = largefield.conditional_field_state(mode1, mode2, float(gt))
            rows.append(
                [
                    float(gt),
                    observables.purity(observables.reduced_mode(psi_plus, 1)),
                    observables.purity(observables.reduced_mode(conditional, 1)),
                ]
            )
        columns = ["gt", "mode_purity_psi_plus", "mode_purity_conditional"]
    write_output(str(cfg["out.path"]), _csv_text(params, columns, rows), args.force)
    return EXIT_OK


def cmd_qfunc(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    mode1, mode2 = _build_modes(cfg)
    params_lf = largefield.LargeFieldParams.from_modes(mode1, mode2)
    gt0 = largefield.disentanglement_time(params_lf, int(cfg["q.j"]))
    resolution = int(cfg["q.resolution"])
    halves = {}
    for which, mean in ((1, params_lf.nbar), (2, params_lf.mbar)):
        half = float(cfg["q.window"])
        if half <= 0.0:
            half = math.sqrt(mean) + 4.0 * mean**0.25
        halves[which] = half
    params = dict(cfg)
    params.update(
        {"cutoff1": mode1.cutoff, "cutoff2": mode2.cutoff, "kappa": params_lf.kappa, "gt0": gt0}
    )
    rows: list[list[float | str]] = []
    for gt in (0.0, gt0):
        for branch in ("+", "-"):
            psi = largefield.build_psi_pm(mode1, mode2, branch, gt)
            for which in (1, 2):
                half = halves[which]
                grid = observables.husimi_q(
                    psi, ((-half, half), (-half, half)), resolution, mode=which
                )
                for i, re in enumerate(grid.re_axis):
                    for jj, im in enumerate(grid.im_axis):
                        rows.append([float(gt), str(which), branch, float(re), float(im), float(grid.values[i, jj])])
    columns = ["gt", "mode", "branch", "re", "im", "q"]
    write_output(str(cfg["out.path"]), _csv_text(params, columns, rows), args.force)
    return EXIT_OK


def cmd_protocol(args: argparse.Namespace) -> int:
    name = args.name
    if name == "phase-gate":
        report = protocols.run_phase_gate()
    elif name == "cnot":
        if args.n_prime is None or args.n_prime < 1:
            raise ConfigError("cnot requires --n-prime >= 1")
        report = protocols.run_atomic_cnot(args.n_prime)
    elif name == "epr":
        report, _ = protocols.run_epr(args.outcome)
    elif name == "ghz":
        report, _ = protocols.run_ghz(args.sign)
    elif name == "cat":
        report, _ = protocols.run_cat(
            nbar=args.nbar,
            mbar=args.mbar,
            family=args.family or "coherent",
            r1=args.r1 if args.r1 is not None else (args.r or 0.0),
            r2=args.r2 if args.r2 is not None else (args.r or 0.0),
            j=args.j or 0,
            atom_init=args.atom or "a",
            q_resolution=args.resolution or 101,
            leak_tol=args.leak_tol or 1e-10,
        )
    else:
        raise ConfigError(f"unknown protocol {name!r}")
    payload = report.to_dict()
    if not args.timing:
        payload["elapsed"] = 0.0
    payload["artifact"] = {"name": "ramancavity", "version": __version__}
    if not args.out:
        raise ConfigError("an output path is required (--out)")
    write_output(args.out, _json_text(payload), args.force)
    verified = name == "cat" or report.min_fidelity() >= protocols.GATE_FIDELITY_THRESHOLD
    if not verified:
        print(
            f"verification failure: min fidelity {report.min_fidelity():.12f} "
            f"< {protocols.GATE_FIDELITY_THRESHOLD}",
            file=sys.stderr,
        )
        return EXIT_VERIFICATION
    return EXIT_OK


def cmd_times(args: argparse.Namespace) -> int:
    if args.kappa is None or args.kappa <= 0:
        raise ConfigError("--kappa must be positive")
    if args.k < 1 or args.l < 1 or args.j_max < 0 or args.q_max < 1:
        raise ConfigError("--k/--l must be >= 1, --j-max >= 0, --q-max >= 1")
    kappa_unity = abs(args.kappa - 1.0) <= largefield.KAPPA_UNITY_TOL
    if kappa_unity:
        dis_times: list[float] = []
    else:
        dis_times = [
            largefield.disentanglement_time_from_ratio(args.kappa, j) for j in range(args.j_max + 1)
        ]
    revival = largefield.revival_times(args.k, args.l)
    payload = {
        "artifact": {"name": "ramancavity", "version": __version__},
        "kappa": args.kappa,
        "kappa_unity": kappa_unity,
        "disentanglement_times": dis_times,
        "revivals": {
            "k": args.k,
            "l": args.l,
            "kappa": revival.kappa,
            "fundamental_gt_r": revival.gt_r,
            "times": [q * revival.gt_r for q in range(1, args.q_max + 1)],
        },
    }
    if not args.out:
        raise ConfigError("an output path is required (--out)")
    write_output(args.out, _json_text(payload), args.force)
    return EXIT_OK


def _add_state_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value configuration file")
    sub.add_argument("--family", choices=("coherent", "squeezed", "fock"), help="family for both modes")
    sub.add_argument("--family1", choices=("coherent", "squeezed", "fock"))
    sub.add_argument("--family2", choices=("coherent", "squeezed", "fock"))
    sub.add_argument("--nbar1", type=float, help="mean photon number of mode 1")
    sub.add_argument("--nbar2", "--mbar2", dest="nbar2", type=float, help="mean photon number of mode 2")
    sub.add_argument("--r", type=float, help="squeezing parameter for both modes")
    sub.add_argument("--r1", type=float)
    sub.add_argument("--r2", type=float)
    sub.add_argument("--atom", choices=("a", "b"), help="initial atomic level")
    sub.add_argument("--leak-tol", type=float, help="truncation leakage tolerance")
    sub.add_argument("--out", help="output file path")
    sub.add_argument("--force", action="store_true", help="overwrite an existing output file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="raman-cavity",
        description="Two-mode Raman cavity simulator: sweeps, Q-functions, protocols, times.",
    )
    parser.add_argument("--version", action="version", version=f"ramancavity {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sweep = subs.add_parser("purity-sweep", help="purity versus interaction time (CSV)")
    _add_state_flags(sweep)
    sweep.add_argument("--gt-max", type=float, help="sweep end time (gt units)")
    sweep.add_argument("--steps", type=int, help="number of uniform steps (rows = steps + 1)")
    sweep.add_argument("--kind", choices=("atomic", "mode"), help="atomic purity or dressed-mode purities")
    sweep.set_defaults(func=cmd_purity_sweep)

    qf = subs.add_parser("qfunc", help="Q grids of both modes and branches (long CSV)")
    _add_state_flags(qf)
    qf.add_argument("--window", type=float, help="half-width of the square alpha window (0 = auto)")
    qf.add_argument("--resolution", type=int, help="samples per axis")
    qf.add_argument("--j", type=int, help="disentanglement index (0 = first)")
    qf.set_defaults(func=cmd_qfunc)

    proto = subs.add_parser("protocol", help="run a protocol and write its JSON report")
    proto.add_argument("--name", required=True, choices=("phase-gate", "cnot", "epr", "ghz", "cat"))
    proto.add_argument("--n-prime", type=int, help="control photon number for cnot")
    proto.add_argument("--outcome", choices=("a", "b"), default="a", help="measured level for epr")
    proto.add_argument("--sign", choices=("+", "-"), default="+", help="atom-1 superposition sign for ghz")
    proto.add_argument("--nbar", type=float, default=150.0, help="target mean of mode 1 (cat)")
    proto.add_argument("--mbar", type=float, default=50.0, help="target mean of mode 2 (cat)")
    proto.add_argument("--family", choices=("coherent", "squeezed"), help="field family (cat)")
    proto.add_argument("--r", type=float, help="squeezing for both modes (cat)")
    proto.add_argument("--r1", type=float)
    proto.add_argument("--r2", type=float)
    proto.add_argument("--j", type=int, help="disentanglement index (cat)")
    proto.add_argument("--atom", choices=("a", "b"), help="initial atomic level (cat)")
    proto.add_argument("--resolution", type=int, help="Q-grid samples per axis (cat)")
    proto.add_argument("--leak-tol", type=float)
    proto.add_argument("--timing", action="store_true", help="record wall time in the report file")
    proto.add_argument("--out", help="output file path")
    proto.add_argument("--force", action="store_true")
    proto.set_defaults(func=cmd_protocol)

    times = subs.add_parser("times", help="disentanglement and revival times (JSON)")
    times.add_argument("--kappa", type=float, required=True, help="mean photon number ratio")
    times.add_argument("--j-max", type=int, default=2)
    times.add_argument("--k", type=int, default=1)
    times.add_argument("--l", type=int, default=3)
    times.add_argument("--q-max", type=int, default=3)
    times.add_argument("--out", help="output file path")
    times.add_argument("--force", action="store_true")
    times.set_defaults(func=cmd_times)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, largefield.KappaUnityError, ValueError) as exc:
        if isinstance(exc, (NormalizationError, prepare.LeakageError)):
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EdgeLeakageError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
