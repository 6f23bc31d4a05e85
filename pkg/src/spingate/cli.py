"""Command-line front end.

Each subcommand reads an optional JSON scenario (``--config``), runs one
computation and writes a CSV or JSON artifact plus a one-line summary on
stdout. A scenario names its system either with ``"params"`` (fields of
:class:`~spingate.model.SystemParams`, complex couplings as ``[re, im]``) or
with ``"case": "I".."VII"`` and an optional ``"g_e_magnitude"``, and holds
exactly one command block keyed by the subcommand name (``-`` spelled ``_``).

Exit status: 0 on success, 2 for bad arguments or configuration, 1 for a
numerical failure such as a singular system.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import gate, pulse, spectra
from .model import (
    CASE_IDS,
    G_E_DEFAULT,
    ParameterError,
    SpinState,
    ValidatedParams,
    case_params,
    params_from_dict,
    params_to_dict,
)
from .selftest import corrupted_convention, timed_selftest
from .steady_state import SingularSystemError

COMMANDS = ("spectrum", "fidelity-sweep", "pulse", "gate", "truth-table", "case-list", "selftest")
_BLOCKS = tuple(c.replace("-", "_") for c in COMMANDS)


class ConfigError(Exception):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _load_scenario(path: str | None, command: str) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON in {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("--config", "scenario must be a JSON object")
    blocks = [k for k in data if k in _BLOCKS]
    if len(blocks) > 1:
        raise ConfigError(blocks[1], "scenario must contain exactly one command block")
    block = command.replace("-", "_")
    if blocks and blocks[0] != block:
        raise ConfigError(blocks[0], f"scenario is for '{blocks[0]}', not '{command}'")
    if "params" in data and "case" in data:
        raise ConfigError("case", "give either 'params' or 'case', not both")
    return data


def _block(scenario: dict, command: str) -> dict[str, Any]:
    b = scenario.get(command.replace("-", "_"), {})
    if not isinstance(b, dict):
        raise ConfigError(command, "command block must be an object")
    return b


def _number(block: dict, key: str, default=None, *, kind=float):
    value = block.get(key, default)
    if value is None:
        raise ConfigError(key, "required")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    return kind(value)


def _system(scenario: dict, args) -> tuple[ValidatedParams, float, str | None]:
    """Parameters, operating drive frequency and case id (if any)."""
    case = args.case or scenario.get("case")
    if case is not None and "params" not in scenario:
        g = _number(scenario, "g_e_magnitude", G_E_DEFAULT)
        params, omega_l = case_params(case, g)
        return params, omega_l, str(case).upper()
    if "params" in scenario:
        if not isinstance(scenario["params"], dict):
            raise ConfigError("params", "must be an object")
        params = params_from_dict(scenario["params"])
        return params, params.omega_c, None
    return None, 0.0, None


def _out_path(args, block: dict, default: str) -> Path:
    return Path(args.out or block.get("out") or default)


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError("--out", f"cannot write {path}: {exc.strerror}") from None


def _grid(spec, default: dict) -> np.ndarray:
    if isinstance(spec, list):
        return np.asarray([float(x) for x in spec])
    spec = {**default, **(spec or {})}
    start, stop, n = _number(spec, "start"), _number(spec, "stop"), _number(spec, "n", kind=int)
    if n < 2:
        raise ConfigError("grid.n", "need at least 2 points")
    scale = spec.get("scale", "log")
    if scale == "log":
        if start <= 0 or stop <= 0:
            raise ConfigError("grid", "log grid needs positive bounds")
        return np.geomspace(start, stop, n)
    if scale == "linear":
        return np.linspace(start, stop, n)
    raise ConfigError("grid.scale", f"expected 'log' or 'linear', got {scale!r}")


def _spin(block: dict, default: str = "up") -> SpinState:
    try:
        return SpinState.parse(block.get("spin", default))
    except ParameterError as exc:
        raise ConfigError("spin", str(exc)) from None


def cmd_spectrum(args, scenario) -> str:
    block = _block(scenario, "spectrum")
    params, _, _ = _system(scenario, args)
    if params is None:
        params = spectra.fig3_params()
    spin = _spin(block)
    span = 3 * max(abs(params.g_e), abs(params.g_o), params.kappa_e, params.kappa_o)
    n = args.points or _number(block, "n_points", 2001, kind=int)
    spec = spectra.sweep(params, spin, _number(block, "delta_min", -span), _number(block, "delta_max", span), n)
    path = _out_path(args, block, "spectrum.csv")
    _write(path, spectra._format_rows(spec))
    peaks = spectra.find_peaks(spec, _number(block, "min_prominence", 0.01))
    i = int(np.argmax(spec.R))
    return (f"spectrum: {len(spec)} points, spin {spin.value}, max R={spec.R[i]:.4f} at delta={spec.delta_grid[i]:.4g}, "
            f"{len(peaks)} peak(s) -> {path}")


def cmd_fidelity_sweep(args, scenario) -> str:
    block = _block(scenario, "fidelity-sweep")
    case = args.case or block.get("case") or scenario.get("case")
    if case is None:
        raise ConfigError("case", "fidelity-sweep needs a case (--case or scenario 'case')")
    case = str(case).upper()
    variable = block.get("variable", gate.default_variable(case))
    default = dict(start=3.0, stop=300.0, n=200, scale="log")
    if variable == "gamma":
        default.update(start=0.01, stop=10.0)
    grid_spec = block.get("grid")
    if args.points:
        grid_spec = {**(grid_spec if isinstance(grid_spec, dict) else {}), "n": args.points}
    xs = _grid(grid_spec, default)
    g = _number(block, "g_e_magnitude", scenario.get("g_e_magnitude", G_E_DEFAULT))
    try:
        curve = gate.fidelity_sweep(case, variable, xs, g, block.get("definition", "amplitude_overlap"))
    except ValueError as exc:
        if isinstance(exc, (ParameterError, ArithmeticError)):
            raise
        raise ConfigError("fidelity_sweep", str(exc)) from None
    path = _out_path(args, block, f"fidelity_case_{case}.csv")
    _write(path, curve.to_csv())
    i = int(np.argmax(curve.F))
    return f"fidelity-sweep case {case} over {variable}: max F={curve.F[i]:.5f} at x={curve.x[i]:.5g} -> {path}"


def _pulse_from(block: dict, params, omega_l: float) -> pulse.PulseWaveform:
    tau = _number(block, "tau", 10.0 / max(params.kappa_e, params.kappa_o, 1e-12))
    t_span = _number(block, "t_span", 32 * tau)
    n = _number(block, "n_samples", 4096, kind=int)
    return pulse.gaussian_pulse(tau, _number(block, "omega_l", omega_l), t_span, n)


def cmd_pulse(args, scenario) -> str:
    block = _block(scenario, "pulse")
    params, omega_l, _ = _system(scenario, args)
    if params is None:
        raise ConfigError("params", "pulse needs 'params' or a case")
    if args.points:
        block = {**block, "n_samples": args.points}
    spin = _spin(block)
    wave = _pulse_from(block, params, omega_l)
    method = block.get("method", "frequency")
    if method == "frequency":
        out = pulse.propagate_frequency(params, spin, wave)
    elif method == "time":
        dt = block.get("dt")
        dt = pulse.auto_step(params, spin, wave) if dt is None else _number(block, "dt")
        out = pulse.propagate_time(params, spin, wave, dt)
    else:
        raise ConfigError("method", f"expected 'frequency' or 'time', got {method!r}")
    path = _out_path(args, block, "pulse.csv")
    _write(path, pulse.to_csv(wave, out))
    return f"pulse ({method}, spin {spin.value}): norm_t={out.norm_t:.6f} norm_r={out.norm_r:.6f} -> {path}"


def cmd_gate(args, scenario) -> str:
    block = _block(scenario, "gate")
    params, omega_l, case = _system(scenario, args)
    if params is None:
        raise ConfigError("case", "gate needs 'params' or a case")
    omega_l = _number(block, "omega_l", omega_l)
    wave = _pulse_from(block["pulse"], params, omega_l) if "pulse" in block else None
    try:
        amps = gate.conditional_amplitudes(params, omega_l, wave)
    except ValueError as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ConfigError("params", str(exc)) from None
    payload = {
        "case": case,
        "omega_l": omega_l,
        "pulse_averaged": wave is not None,
        "amplitudes": {k: gate._pair(getattr(amps, k)) for k in ("t_up", "t_down", "r_up", "r_down")},
        "fidelity": gate.fidelity(amps),
        "fidelity_probability": gate.fidelity(amps, "probability_overlap"),
        "gate_matrix": gate.matrix_to_json(gate.gate_matrix(amps)),
        "basis": list(gate.BASIS),
    }
    path = _out_path(args, block, "gate.json")
    _write(path, gate.dumps(payload))
    return f"gate{' case ' + case if case else ''}: F={payload['fidelity']:.5f} -> {path}"


def cmd_truth_table(args, scenario) -> str:
    block = _block(scenario, "truth-table")
    if args.ideal or block.get("ideal"):
        amps, label = gate.IDEAL, "ideal"
    else:
        params, omega_l, case = _system(scenario, args)
        if params is None:
            raise ConfigError("case", "truth-table needs --ideal, 'params' or a case")
        amps, label = gate.conditional_amplitudes(params, omega_l), case or "params"
    rows = gate.truth_table(amps)
    payload = {"source": label, **gate.truth_table_to_json(rows)}
    path = _out_path(args, block, "truth_table.json")
    _write(path, gate.dumps(payload))
    worst = max(r.deviation for r in rows)
    return f"truth-table ({label}): max deviation={worst:.3e} -> {path}"


def cmd_case_list(args, scenario) -> str:
    g = G_E_DEFAULT
    payload = {}
    for cid in CASE_IDS:
        params, omega_l = case_params(cid, g)
        payload[cid] = {"params": params_to_dict(params), "omega_l": omega_l,
                        "sweep_variable": gate.default_variable(cid)}
    text = gate.dumps(payload)
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return f"case-list: {len(CASE_IDS)} cases" + (f" -> {args.out}" if args.out else "")


def cmd_selftest(args, scenario) -> str:
    block = _block(scenario, "selftest")
    seed = args.seed if args.seed is not None else _number(block, "seed", 0, kind=int)
    n = args.points or _number(block, "draws", 1000, kind=int)
    if args.corrupt_convention:
        with corrupted_convention():
            results, elapsed = timed_selftest(seed, n)
    else:
        results, elapsed = timed_selftest(seed, n)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    out = args.out or block.get("out")
    if out:
        # timing stays out of the file so reruns are byte-identical
        _write(Path(out), f"seed={seed} draws={n}\n" + "".join(r.line() + "\n" for r in results))
    summary = f"selftest seed={seed}: {len(results) - len(failed)}/{len(results)} passed in {elapsed:.2f} s"
    if failed:
        raise _SelftestFailure(summary)
    return summary


class _SelftestFailure(Exception):
    pass


_HANDLERS = {
    "spectrum": cmd_spectrum,
    "fidelity-sweep": cmd_fidelity_sweep,
    "pulse": cmd_pulse,
    "gate": cmd_gate,
    "truth-table": cmd_truth_table,
    "case-list": cmd_case_list,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spingate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON scenario file")
        p.add_argument("--out", help="output path (overrides the scenario)")
        p.add_argument("--case", choices=CASE_IDS, help="gate case preset")
        p.add_argument("--points", type=int, help="grid points / samples / draws")
        p.add_argument("--seed", type=int, help="random seed (selftest)")
        if name == "truth-table":
            p.add_argument("--ideal", action="store_true", help="use the ideal amplitudes (1, -1)")
        if name == "selftest":
            p.add_argument("--corrupt-convention", action="store_true", help=argparse.SUPPRESS)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.points is not None and args.points < 1:
        parser.error("--points must be positive")
    try:
        scenario = _load_scenario(args.config, args.command)
        summary = _HANDLERS[args.command](args, scenario)
    except (ConfigError, ParameterError) as exc:
        print(f"spingate {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (pulse.PulseTruncationError, pulse.StepSizeError) as exc:
        print(f"spingate {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except SingularSystemError as exc:
        system = scenario.get("params") or args.case or scenario.get("case")
        print(f"spingate {args.command}: numerical failure: {exc}; system={json.dumps(system)}", file=sys.stderr)
        return 1
    except _SelftestFailure as exc:
        print(exc)
        return 1
    print(summary)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
