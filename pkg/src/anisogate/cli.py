"""Command-line front end: compile, verify, simulate and sweep.

Exit codes: 0 success, 2 configuration error, 3 synthesis failure,
4 verification-contract violation.  Machine output is JSON (sorted keys);
human output is aligned plain text; sweeps emit CSV.  The random seed
(used by verification) comes from --seed, then ANISOGATE_SEED, then 0;
identical configuration and seed give byte-identical output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import chain, cnot, verify, wedge as wedge_mod
from .errors import (AnisogateError, ProgramFormatError, SynthesisError,
                     VerificationError, WedgeError)
from .kernel import GateParams, gate_unitary, pseudospin_form
from .rotation import error_frame, pi_pair_with_errors
from .sequence import parse_program_record, program_record

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SYNTHESIS = 3
EXIT_VERIFY = 4

CORE_PAIR = cnot.CORE_PAIR


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _matrix_record(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _print_matrix(m: np.ndarray, out) -> None:
    for row in np.asarray(m):
        cells = [f"{z.real:+.12f}{z.imag:+.12f}j" for z in row]
        print("  ".join(cells), file=out)


def _dump_json(obj, stream) -> None:
    json.dump(obj, stream, sort_keys=True, indent=2)
    stream.write("\n")


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("ANISOGATE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise CliError(f"bad ANISOGATE_SEED {env!r}", EXIT_CONFIG) from exc
    return 0


def _load_config(args, parser_keys: set[str]) -> None:
    """Merge a JSON config file under the command-line flags (flags win)."""
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config: {exc}", EXIT_CONFIG) from exc
    if not isinstance(cfg, dict):
        raise CliError("config must be a JSON object", EXIT_CONFIG)
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if attr not in parser_keys:
            raise CliError(f"unknown config key {key!r}", EXIT_CONFIG)
        if getattr(args, attr, None) is None:
            setattr(args, attr, value)


def _build_wedge(args) -> wedge_mod.Wedge:
    try:
        if args.s is not None or args.s_min is not None:
            if args.s is not None:
                s_range = (-abs(args.s), abs(args.s))
            else:
                if args.s_max is None:
                    raise CliError("--s-min requires --s-max", EXIT_CONFIG)
                s_range = (args.s_min, args.s_max)
            w = wedge_mod.wedge_from_controls(
                s_range, args.c_beta if args.c_beta is not None else 1.0,
                args.c_gamma if args.c_gamma is not None else 1.0,
                mode=args.mode or "coupled")
            if args.theta_m is not None:
                w = _clip_wedge(w, args.theta_m)
            return w
        if args.theta_m is not None:
            gamma = (args.gamma_lo or 0.0, args.gamma_hi or 0.0)
            half = 0.5 * args.theta_m
            return wedge_mod.direct_wedge(-half, half, gamma)
    except WedgeError as exc:
        raise CliError(f"wedge construction failed: {exc}", EXIT_SYNTHESIS) from exc
    raise CliError("a wedge is required: give --s (or --s-min/--s-max) or --theta-m",
                   EXIT_CONFIG)


def _clip_wedge(w: wedge_mod.Wedge, theta_m: float) -> wedge_mod.Wedge:
    if theta_m >= w.theta_m:
        return w
    center = 0.5 * (w.theta_lo + w.theta_hi)
    try:
        return replace(w, theta_lo=center - 0.5 * theta_m,
                       theta_hi=center + 0.5 * theta_m)
    except WedgeError as exc:
        raise CliError(f"cannot clip wedge: {exc}", EXIT_SYNTHESIS) from exc


def _write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- commands ---------------------------------------------------------------

def cmd_gate(args) -> int:
    try:
        params = GateParams(lam=args.lam, alpha=args.alpha or 0.0,
                            beta=args.beta or 0.0, gamma=args.gamma or 0.0)
    except ValueError as exc:
        raise CliError(f"invalid gate parameters: {exc}", EXIT_CONFIG) from exc
    gate = gate_unitary(params)
    form = pseudospin_form(params)
    if args.format == "json":
        _dump_json({"params": params.to_record(),
                    "matrix": _matrix_record(gate.matrix),
                    "pseudospin": {"axis": list(form.axis), "angle": form.angle,
                                   "globalPhase": form.global_phase}}, sys.stdout)
    else:
        print(f"pulse: lambda={params.lam:.12g} alpha={params.alpha:.12g} "
              f"beta={params.beta:.12g} gamma={params.gamma:.12g}")
        _print_matrix(gate.matrix, sys.stdout)
        print(f"pseudospin axis: ({form.axis[0]:.12g}, {form.axis[1]:.12g}, "
              f"{form.axis[2]:.12g})")
        print(f"pseudospin angle: {form.angle:.12g}")
        print(f"global phase: {form.global_phase:.12g}")
    return EXIT_OK


def _compile_target(args) -> tuple[dict, dict]:
    w = _build_wedge(args)
    if args.what == "x-rot":
        if args.angle is None:
            raise CliError("--angle is required for x-rot", EXIT_CONFIG)
        result = wedge_mod.synthesize_x_rotation(args.angle, w, pair=args.pair or 1)
        rec = program_record(result.sequence, {"target": "x-rot", "angle": args.angle})
        summary = {"pulseCount": result.pulse_count,
                   "Lambda": result.sequence.lambda_total,
                   "residual": result.target_residual}
        return rec, summary
    if args.what == "1q":
        if args.angle is None or args.axis is None:
            raise CliError("--angle and --axis are required for 1q", EXIT_CONFIG)
        axis = [float(v) for v in args.axis.split(",")]
        if len(axis) != 3:
            raise CliError("--axis must be nx,ny,nz", EXIT_CONFIG)
        from .rotation import Rotation
        target = Rotation.from_axis_angle(axis, args.angle)
        result = wedge_mod.synthesize_1q(target, w, pair=args.pair or 1)
        rec = program_record(result.sequence, {"target": "1q", "angle": args.angle})
        summary = {"pulseCount": result.pulse_count,
                   "Lambda": result.sequence.lambda_total,
                   "residual": result.target_residual}
        return rec, summary
    # cnot
    proc = args.procedure or 1
    plan = cnot.procedure_one(w) if proc == 1 else cnot.procedure_two(w)
    if not args.core_only:
        plan = cnot.complete_cnot(plan, w)
    rec = cnot.plan_record(plan)
    summary = {"procedure": plan.procedure, "pulseCount": plan.pulse_count,
               "Lambda": plan.lambda_total, "Phi": plan.phi_net_angle,
               "n": plan.n, "psi": plan.psi}
    return rec, summary


def cmd_compile(args) -> int:
    try:
        rec, summary = _compile_target(args)
    except (SynthesisError, WedgeError) as exc:
        raise CliError(f"synthesis failed: {exc}", EXIT_SYNTHESIS) from exc
    buf = io.StringIO()
    _dump_json(rec, buf)
    _write_output(buf.getvalue(), args.output)
    if args.output not in (None, "-"):
        if args.format == "json":
            _dump_json(summary, sys.stdout)
        else:
            for key, value in summary.items():
                print(f"{key}: {value}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.program, encoding="utf-8") as fh:
            rec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read program: {exc}", EXIT_CONFIG) from exc
    try:
        seq, meta = parse_program_record(rec)
    except ProgramFormatError as exc:
        raise CliError(f"bad program: {exc}", EXIT_VERIFY) from exc
    seed = _resolve_seed(args)
    core_pulses = [p for p in seq if p.pair == CORE_PAIR]
    other_pulses = [p for p in seq if p.pair != CORE_PAIR]
    if not core_pulses:
        raise CliError("program has no pulses on the middle pair (2,3)", EXIT_VERIFY)
    if any(p.pair not in (1, 2, 3) for p in seq):
        raise CliError("program touches pairs outside a four-spin chain", EXIT_VERIFY)
    from .sequence import PulseSequence
    core = PulseSequence(tuple(core_pulses))
    try:
        gate, leakage = verify.logical_action(core, seed=seed)
        n, residual = cnot.phase_constraint_check(core)
        report = verify.is_cnot_equivalent(gate, leakage=leakage, seed=seed,
                                           optimize=args.optimize)
    except VerificationError as exc:
        raise CliError(str(exc), EXIT_VERIFY) from exc
    out = report.to_record()
    out.update({"n": n, "lambdaResidual": residual,
                "corePulses": len(core_pulses), "otherPulses": len(other_pulses)})
    if other_pulses:
        full = verify.circuit_unitary(seq)
        logical, leak_full = verify.project_logical(full, seed=seed)
        diff = logical.matrix - verify.CNOT_MATRIX
        out["assembledFidelity"] = verify.fidelity(logical.matrix, verify.CNOT_MATRIX)
        out["assembledLeakage"] = leak_full
        out["assembledResidualOpNorm"] = verify.operator_norm(diff, seed=seed)
        out["assembledResidualFrobenius"] = float(np.linalg.norm(diff))
    if args.format == "json":
        _dump_json(out, sys.stdout)
    else:
        for key in sorted(out):
            print(f"{key}: {out[key]}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        with open(args.program, encoding="utf-8") as fh:
            rec = json.load(fh)
        seq, _ = parse_program_record(rec)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read program: {exc}", EXIT_CONFIG) from exc
    except ProgramFormatError as exc:
        raise CliError(f"bad program: {exc}", EXIT_VERIFY) from exc
    n = args.n or 4
    bits = args.input or "0" * (n // 2)
    try:
        state = chain.logical_basis_state(n, bits)
        state = chain.run_program(state, seq)
        measure = GateParams(lam=1.0, beta=args.measure_beta or 0.0,
                             gamma=args.measure_gamma or 0.0)
        results = [chain.readout(state, (2 * q + 1, 2 * q + 2), measure)
                   for q in range(n // 2)]
    except (ValueError, AnisogateError) as exc:
        raise CliError(f"simulation failed: {exc}", EXIT_SYNTHESIS) from exc
    out = {"input": bits,
           "qubits": [{"pair": f"{2*q+1}-{2*q+2}", "pSinglet": r.p_singlet,
                       "axisTilt": r.axis_tilt} for q, r in enumerate(results)]}
    if args.format == "json":
        _dump_json(out, sys.stdout)
    else:
        print(f"input |{bits}>")
        for entry in out["qubits"]:
            print(f"pair {entry['pair']}: P(0L) = {entry['pSinglet']:.12f} "
                  f"(axis tilt {entry['axisTilt']:.6g})")
    return EXIT_OK


def _sweep_theta_m(value: float, procedure: int):
    w = wedge_mod.direct_wedge(-0.5 * value, 0.5 * value)
    xrot = wedge_mod.synthesize_x_rotation(math.pi, w, pair=CORE_PAIR)
    plan = cnot.procedure_one(w) if procedure == 1 else cnot.procedure_two(w)
    core_count = plan.pulse_count
    plan = cnot.complete_cnot(plan, w)
    _, residual = cnot.phase_constraint_check(plan.core_sequence)
    return {"theta_m": value, "xrot_pulses": xrot.pulse_count,
            "cnot_core_pulses": core_count, "cnot_total_pulses": plan.pulse_count,
            "lambda_residual": residual}


def _sweep_delta(value: float, theta: float):
    n1 = np.array([0.0, 0.0, 1.0])
    n2 = np.array([0.0, math.sin(theta), math.cos(theta)])
    exact, first = pi_pair_with_errors(n1, n2, value, -0.7 * value)
    yp, zp = error_frame(n1, n2)
    axis, _ = exact.axis_angle()
    if axis[0] < 0:
        axis = -axis
    pred = np.array([1.0, 0.0, 0.0]) + first.tilt_y_prime * yp + first.tilt_z_prime * zp
    return {"delta": value, "axis_residual": float(np.linalg.norm(axis - pred)),
            "tilt_y": first.tilt_y_prime, "tilt_z": first.tilt_z_prime}


def cmd_sweep(args) -> int:
    try:
        grid = [float(v) for v in args.grid.split(",") if v.strip() != ""]
    except (ValueError, AttributeError) as exc:
        raise CliError("bad --grid; expected comma-separated numbers", EXIT_CONFIG) from exc
    if not grid:
        raise CliError("empty sweep grid", EXIT_CONFIG)
    try:
        with ThreadPoolExecutor(max_workers=min(8, len(grid))) as pool:
            if args.kind == "theta-m":
                rows = list(pool.map(lambda v: _sweep_theta_m(v, args.procedure or 1),
                                     grid))
            else:
                theta = args.theta if args.theta is not None else 0.2
                rows = list(pool.map(lambda v: _sweep_delta(v, theta), grid))
    except (SynthesisError, WedgeError) as exc:
        raise CliError(f"sweep point failed: {exc}", EXIT_SYNTHESIS) from exc
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["index"] + list(rows[0].keys())
    writer.writerow(header)
    for i, row in enumerate(rows):
        writer.writerow([i] + [repr(v) if isinstance(v, float) else v
                               for v in row.values()])
    _write_output(buf.getvalue(), args.output)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _add_wedge_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--s", type=float, help="symmetric spin-orbit range [-s, s]")
    p.add_argument("--s-min", type=float)
    p.add_argument("--s-max", type=float)
    p.add_argument("--c-beta", type=float)
    p.add_argument("--c-gamma", type=float)
    p.add_argument("--theta-m", type=float,
                   help="wedge extent (direct wedge, or clips a controls wedge)")
    p.add_argument("--gamma-lo", type=float)
    p.add_argument("--gamma-hi", type=float)
    p.add_argument("--mode", choices=["coupled", "independent"])
    p.add_argument("--config", help="JSON file of defaults (flags win)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anisogate",
        description="Compile, verify and simulate anisotropic-exchange pulse programs")
    parser.add_argument("--format", choices=["table", "json"], default="table")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for verification randomness (env ANISOGATE_SEED)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gate = sub.add_parser("gate", help="print one pulse gate and its pseudospin form")
    p_gate.add_argument("--lambda", dest="lam", type=float, required=True)
    p_gate.add_argument("--alpha", type=float)
    p_gate.add_argument("--beta", type=float)
    p_gate.add_argument("--gamma", type=float)
    p_gate.set_defaults(func=cmd_gate)

    p_compile = sub.add_parser("compile", help="compile a pulse program")
    p_compile.add_argument("what", choices=["x-rot", "1q", "cnot"])
    p_compile.add_argument("--angle", type=float)
    p_compile.add_argument("--axis", help="nx,ny,nz for 1q targets")
    p_compile.add_argument("--pair", type=int)
    p_compile.add_argument("--procedure", type=int, choices=[1, 2])
    p_compile.add_argument("--core-only", action="store_true")
    p_compile.add_argument("--output", "-o", help="program file (default stdout)")
    _add_wedge_options(p_compile)
    p_compile.set_defaults(func=cmd_compile)

    p_verify = sub.add_parser("verify", help="verify a pulse program")
    p_verify.add_argument("program")
    p_verify.add_argument("--optimize", action="store_true",
                          help="optimize local corrections for the core fidelity")
    p_verify.set_defaults(func=cmd_verify)

    p_sim = sub.add_parser("simulate", help="run a program on an encoded chain")
    p_sim.add_argument("--program", required=True)
    p_sim.add_argument("--n", type=int)
    p_sim.add_argument("--input", help="logical input bits, e.g. 10")
    p_sim.add_argument("--measure-beta", type=float)
    p_sim.add_argument("--measure-gamma", type=float)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="grid sweeps (CSV output)")
    p_sweep.add_argument("--kind", choices=["theta-m", "delta"], required=True)
    p_sweep.add_argument("--grid", required=True, help="comma-separated values")
    p_sweep.add_argument("--procedure", type=int, choices=[1, 2])
    p_sweep.add_argument("--theta", type=float, help="axis separation for delta sweeps")
    p_sweep.add_argument("--output", "-o")
    p_sweep.add_argument("--config", help="JSON file of defaults (flags win)")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


_CONFIG_KEYS = {
    "compile": {"angle", "axis", "pair", "procedure", "core_only", "output", "s",
                "s_min", "s_max", "c_beta", "c_gamma", "theta_m", "gamma_lo",
                "gamma_hi", "mode"},
    "sweep": {"kind", "grid", "procedure", "theta", "output"},
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in _CONFIG_KEYS:
            _load_config(args, _CONFIG_KEYS[args.command])
        return args.func(args)
    except CliError as exc:
        print(f"anisogate: {exc}", file=sys.stderr)
        return exc.code
    except AnisogateError as exc:
        print(f"anisogate: {exc}", file=sys.stderr)
        return EXIT_SYNTHESIS


if __name__ == "__main__":
    sys.exit(main())
