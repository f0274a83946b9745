"""Command-line front end.

Exit codes: 0 ok, 1 configuration or validation error, 2 domain violation or
integrator failure, 3 verification failure. Errors are also printed to
stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import config as config_mod
from .classify import verdicts
from .errors import ConfigError, DomainViolation, IFFMError, StepFailure, ValidationError
from .integrator import kernel, simulate
from .motifs import (EXPONENTS, IFFM_SYSTEM, SCALAR_FORMS, SYSTEM_IFFM, VECTOR_FORMS,
                     InitialPolicy, make_motif)
from .report import (ExperimentBundle, dumps, emit_figure_data, emit_table3, provenance,
                     sweep_file_name, verify_payload, write_sweep, write_text,
                     write_trajectory)
from .response import sweep_many
from .verify import default_suite

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2, 3
DEFAULT_PRESET = "paper-sec5"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _shared() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", metavar="PATH", help="experiment configuration (JSON)")
    src.add_argument("--preset", metavar="NAME", help=f"built-in configuration (default {DEFAULT_PRESET})")
    p.add_argument("--out", metavar="DIR", help="output directory (default: config 'output')")
    p.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes")
    p.add_argument("--rtol", type=float, help="integrator relative tolerance")
    p.add_argument("--atol", type=float, help="integrator absolute tolerance")
    p.add_argument("--grid", metavar="MIN:MAX:POINTS:log|lin", help="input grid")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iffm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    shared = _shared()
    sub.add_parser("list", help="print the motif catalog")
    sim = sub.add_parser("simulate", parents=[shared], help="write one trajectory as CSV")
    sim.add_argument("--motif", required=True)
    sim.add_argument("--u", type=float, required=True, help="constant input")
    sim.add_argument("--init", help="init label or 1-based index from the config")
    sim.add_argument("--x0", help="comma-separated initial state (overrides --init)")
    sim.add_argument("--y0", help="initial output: a number, 'adapted' or 'michaelis'")
    sw = sub.add_parser("sweep", parents=[shared], help="sweep the input grid")
    sw.add_argument("--motif", action="append", help="restrict to this motif (repeatable)")
    cl = sub.add_parser("classify", parents=[shared], help="monotonicity verdicts")
    cl.add_argument("--motif", action="append", help="restrict to this motif (repeatable)")
    sub.add_parser("verify", parents=[shared], help="run the oracle suite")
    sub.add_parser("reproduce", parents=[shared], help="full benchmark run into one bundle")
    return parser


def _experiment(args) -> config_mod.ExperimentConfig:
    if getattr(args, "config", None):
        exp = config_mod.load(args.config)
    else:
        exp = config_mod.preset(getattr(args, "preset", None) or DEFAULT_PRESET)
    if args.rtol is not None or args.atol is not None or args.grid is not None:
        exp = exp.with_overrides(rtol=args.rtol, atol=args.atol, grid=args.grid)
    if args.jobs < 1:
        raise ConfigError("--jobs", f"must be at least 1, got {args.jobs}")
    return exp


def _out_dir(args, exp) -> Path:
    return Path(args.out or exp.output)


def _echo(exp) -> dict:
    # the output location is excluded so that bundles written elsewhere compare equal
    raw = exp.to_dict()
    raw.pop("output", None)
    return raw


def _entries(exp, names: Sequence[str] | None):
    if not names:
        return list(exp.motifs)
    return [exp.motif(make_motif(n).name) for n in names]


def cmd_list(args, out=sys.stdout) -> int:
    out.write("scalar motifs (x' = -x + u):\n")
    for k in range(1, 9):
        link = f"  <=> iffm-{SYSTEM_IFFM[k]}" if k in SYSTEM_IFFM else ""
        a1, b1, a2, b2 = EXPONENTS[k]
        out.write(f"  scalar-{k}  y' = {SCALAR_FORMS[k]:<14} exponents ({a1},{b1},{a2},{b2}){link}\n")
    out.write("named motifs (x' = A x + b u, z = c.x):\n")
    for i, k in sorted(IFFM_SYSTEM.items()):
        out.write(f"  iffm-{i}  <=> scalar-{k}  y' = {VECTOR_FORMS[k]}\n")
    out.write("other vector motifs: " + ", ".join(f"vec-{k}" for k in range(1, 9)
                                                    if k not in SYSTEM_IFFM) + "\n")
    return EXIT_OK


def _parse_y0(text: str | None):
    if text is None:
        return None
    if text in ("adapted", "michaelis"):
        return text
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError("--y0", f"expected a number, 'adapted' or 'michaelis', got {text!r}") from exc


def cmd_simulate(args, out=sys.stdout) -> int:
    exp = _experiment(args)
    if not args.u > 0:
        raise ValidationError(f"input must be positive, got {args.u!r}")
    name = make_motif(args.motif).name
    entry = next((e for e in exp.motifs if e.motif.name == name), None)
    motif = entry.motif if entry else make_motif(name)
    sys_ = exp.system_for(motif)
    y0 = _parse_y0(args.y0)
    if args.x0 is not None:
        try:
            x0 = [float(v) for v in args.x0.split(",")]
        except ValueError as exc:
            raise ConfigError("--x0", f"expected comma-separated numbers, got {args.x0!r}") from exc
        init = InitialPolicy.explicit(x0, y0 if y0 is not None else (entry.y0 if entry else "adapted"))
    else:
        holder = entry or config_mod.MotifEntry(motif, "adapted")
        policies = exp.policies(holder)
        if args.init is None:
            init = policies[0]
        elif args.init.isdigit():
            idx = int(args.init) - 1
            if not 0 <= idx < len(policies):
                raise ConfigError("--init", f"index {args.init} out of range 1..{len(policies)}")
            init = policies[idx]
        else:
            match = [p for p in policies if p.label == args.init]
            if not match:
                raise ConfigError("--init", f"no init labelled {args.init!r}")
            init = match[0]
        if y0 is not None:
            init = InitialPolicy(init.x0_mode, init.x0, init.v,
                                 y0 if isinstance(y0, str) else "explicit",
                                 y0 if not isinstance(y0, str) else 1.0, init.label)
    traj = simulate(sys_, motif, args.u, init, exp.sim)
    path = write_trajectory(_out_dir(args, exp) / f"{motif.name}_u{args.u:g}.csv", traj, kernel(traj))
    out.write(f"{path}\n")
    return EXIT_OK


def _cases(exp, entries):
    return [(exp.system_for(e.motif), e.motif, init) for e in entries for init in exp.policies(e)]


def cmd_sweep(args, out=sys.stdout) -> int:
    exp = _experiment(args)
    entries = _entries(exp, args.motif)
    results = sweep_many(_cases(exp, entries), exp.sim, exp.grid, jobs=args.jobs)
    out_dir = _out_dir(args, exp)
    for r in results:
        write_sweep(out_dir / "sweeps" / sweep_file_name(r), r)
        out.write(f"{r.motif:8s} {r.init:12s} identity gap {r.identity_gap():.2e}  "
                  f"failures {len(r.failures())}\n")
    emit_figure_data(results, out_dir)
    return EXIT_OK


def _classify(exp, entries, jobs):
    cases = [(e.motif, exp.system_for(e.motif), exp.policies(e)) for e in entries]
    return verdicts(cases, exp.sim, exp.grid, jobs=jobs)


def _verdict_text(vs) -> str:
    names = {v.motif for v in vs}
    try:
        if {"iffm-1", "iffm-2", "iffm-3", "iffm-4"} <= names:
            return emit_table3(vs)[0]
    except IFFMError:
        pass
    return "".join(f"{v.motif:8s} DR {v.dr_monotone.value:14s} cDR {v.cdr_monotone.value:14s} "
                   f"certificate {v.certificate}\n" for v in vs)


def cmd_classify(args, out=sys.stdout) -> int:
    exp = _experiment(args)
    vs = _classify(exp, _entries(exp, args.motif), args.jobs)
    bundle = ExperimentBundle(_echo(exp), [s for v in vs for s in v.sweeps], vs, [],
                              provenance(exp.sim.to_dict()))
    bundle.write(_out_dir(args, exp))
    out.write(_verdict_text(vs))
    return EXIT_OK


def _summarize_reports(reports, out) -> bool:
    failed = [r for r in reports if not r.passed]
    for r in failed:
        out.write(f"FAIL {r.name}: gap {r.gap:.3e} > {r.tolerance:.1e}\n")
    out.write(f"oracle reports: {len(reports) - len(failed)}/{len(reports)} passed\n")
    return not failed


def cmd_verify(args, out=sys.stdout) -> int:
    exp = _experiment(args)
    reports = default_suite(exp)
    write_text(_out_dir(args, exp) / "verify_report.json", dumps(verify_payload(reports)))
    return EXIT_OK if _summarize_reports(reports, out) else EXIT_VERIFY


def cmd_reproduce(args, out=sys.stdout) -> int:
    exp = _experiment(args)
    vs = _classify(exp, list(exp.motifs), args.jobs)
    reports = default_suite(exp)
    bundle = ExperimentBundle(_echo(exp), [s for v in vs for s in v.sweeps], vs, reports,
                              provenance(exp.sim.to_dict()))
    bundle.write(_out_dir(args, exp))
    out.write(_verdict_text(vs))
    return EXIT_OK if _summarize_reports(reports, out) else EXIT_VERIFY


COMMANDS = {"list": cmd_list, "simulate": cmd_simulate, "sweep": cmd_sweep,
            "classify": cmd_classify, "verify": cmd_verify, "reproduce": cmd_reproduce}


def _fail(code: int, kind: str, message: str, **extra) -> int:
    payload = {"error": kind, "message": message, "exit_code": code, **extra}
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, sys.stdout)
    except _UsageError as exc:
        return _fail(EXIT_CONFIG, "UsageError", str(exc))
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "ConfigError", str(exc), path=exc.path)
    except DomainViolation as exc:
        return _fail(EXIT_DOMAIN, "DomainViolation", str(exc), t=exc.t)
    except StepFailure as exc:
        return _fail(EXIT_DOMAIN, "StepFailure", str(exc), t=exc.t)
    except ValidationError as exc:
        return _fail(EXIT_CONFIG, type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
