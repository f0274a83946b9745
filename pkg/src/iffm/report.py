"""Writers for trajectories, sweeps, figure data, verdict tables and bundles.

All numbers are written with 17 significant digits so that parsing a file
reproduces the in-memory doubles exactly.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .classify import Monotone, Sign, Verdict
from .errors import MissingVerdict
from .integrator import KernelProfile, Trajectory
from .oracle import OracleReport
from .response import SweepResult

TABLE3_MOTIFS = ("iffm-1", "iffm-2", "iffm-3", "iffm-4")
_SIGN_TEXT = {Sign.NONNEGATIVE: ">= 0", Sign.NONPOSITIVE: "<= 0", Sign.ZERO: "= 0",
              Sign.MIXED: "No fixed sign"}


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    return write_text(path, csv_text(header, rows))


def read_csv(path: str | Path) -> tuple[list[str], list[list]]:
    """Parse a file written by ``write_csv``; numeric fields come back as floats."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = []
        for raw in reader:
            row = []
            for cell in raw:
                try:
                    row.append(float(cell))
                except ValueError:
                    row.append(cell)
            rows.append(row)
    return header, rows


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"


def trajectory_header(n: int) -> list[str]:
    return (["t"] + [f"x_{i + 1}" for i in range(n)] + [f"p_{i + 1}" for i in range(n)]
            + ["y", "q", "int_y", "G", "a", "g", "lambda"])


def trajectory_rows(traj: Trajectory, ker: KernelProfile) -> np.ndarray:
    return np.column_stack([traj.t, traj.x, traj.p, traj.y, traj.q, traj.int_y, traj.G,
                            traj.a, traj.g, ker.lam])


def write_trajectory(path: str | Path, traj: Trajectory, ker: KernelProfile) -> Path:
    return write_csv(path, trajectory_header(traj.n), trajectory_rows(traj, ker))


def write_sweep(path: str | Path, result: SweepResult) -> Path:
    return write_csv(path, SweepResult.COLUMNS, result.rows())


def emit_figure_data(sweeps: Sequence[SweepResult], out_dir: str | Path) -> list[Path]:
    """One file per (motif, DR|cDR) with a value column per initial condition."""
    by_motif: dict[str, list[SweepResult]] = {}
    for s in sweeps:
        by_motif.setdefault(s.motif, []).append(s)
    paths = []
    for motif, group in by_motif.items():
        grid = group[0].u_grid
        for s in group[1:]:
            if not np.array_equal(s.u_grid, grid):
                raise ValueError(f"{motif}: sweeps for different inits use different grids")
        for curve in ("DR", "cDR"):
            header = ["u"] + [f"value_init{i + 1}" for i in range(len(group))]
            cols = [grid] + [s.column(curve) for s in group]
            paths.append(write_csv(Path(out_dir) / f"{motif}_{curve}.csv", header,
                                   np.column_stack(cols)))
    return paths


def _monotone_text(m: Monotone) -> str:
    return "Monotone" if m.monotone else {
        Monotone.NONMONOTONE: "Nonmonotone", Monotone.INIT_DEPENDENT: "Init-dependent",
        Monotone.INCONCLUSIVE: "Inconclusive"}[m]


def table3_rows(verdicts: Mapping[str, Verdict] | Sequence[Verdict]) -> list[dict]:
    if not isinstance(verdicts, Mapping):
        verdicts = {v.motif: v for v in verdicts}
    rows = []
    for name in TABLE3_MOTIFS:
        v = verdicts.get(name)
        if v is None:
            raise MissingVerdict(name)
        dr = "Nonmonotone" if v.dr_nonmonotone_somewhere else _monotone_text(v.dr_monotone)
        rows.append({"system": name.upper().replace("-", ""), "motif": name, "DR": dr,
                     "cDR": _monotone_text(v.cdr_monotone), "cDR_direction": v.cdr_monotone.value,
                     "a_sign": _SIGN_TEXT[v.a_sign], "G_sign": _SIGN_TEXT[v.G_sign],
                     "certificate": v.certificate,
                     "witnesses": v.witnesses.to_dict() if v.witnesses else None})
    return rows


def emit_table3(verdicts: Mapping[str, Verdict] | Sequence[Verdict]) -> tuple[str, dict]:
    """Text table (System, DR, cDR, a sign, G sign) and its JSON form."""
    rows = table3_rows(verdicts)
    cols = [("System", "system"), ("DR", "DR"), ("cDR", "cDR"), ("a_u", "a_sign"),
            ("G_u", "G_sign")]
    widths = [max(len(h), *(len(r[k]) for r in rows)) for h, k in cols]
    line = " | ".join(h.ljust(w) for (h, _), w in zip(cols, widths))
    rule = "-+-".join("-" * w for w in widths)
    body = [" | ".join(r[k].ljust(w) for (_, k), w in zip(cols, widths)) for r in rows]
    text = "\n".join([line, rule, *body]) + "\n"
    per_motif = {}
    if isinstance(verdicts, Mapping):
        vs = [verdicts[n] for n in TABLE3_MOTIFS]
    else:
        vs = [v for v in verdicts if v.motif in TABLE3_MOTIFS]
    for v in vs:
        per_motif[v.motif] = v.to_dict()
    return text, {"rows": rows, "verdicts": per_motif}


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the stamp for reproducible output
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = time.gmtime(int(epoch)) if epoch is not None else time.gmtime()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", t)


def provenance(integrator: dict) -> dict:
    from . import __version__

    return {"tool": "iffm", "version": __version__, "created": _timestamp(),
            "integrator": integrator}


@dataclass
class ExperimentBundle:
    config: dict
    sweeps: list[SweepResult] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)
    reports: list[OracleReport] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def manifest(self) -> dict:
        return {"provenance": self.provenance, "config": self.config,
                "sweeps": [{"motif": s.motif, "init": s.init,
                            "file": f"sweeps/{sweep_file_name(s)}",
                            "identity_gap": s.identity_gap(), "failures": len(s.failures())}
                           for s in self.sweeps],
                "verdicts": [v.motif for v in self.verdicts],
                "oracle_reports": len(self.reports),
                "oracle_failures": sum(not r.passed for r in self.reports)}

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        paths = []
        for s in self.sweeps:
            paths.append(write_sweep(out / "sweeps" / sweep_file_name(s), s))
        if self.sweeps:
            paths += emit_figure_data(self.sweeps, out)
        if self.verdicts:
            names = {v.motif for v in self.verdicts}
            if set(TABLE3_MOTIFS) <= names:
                text, data = emit_table3(self.verdicts)
                paths.append(write_text(out / "table3.txt", text))
                paths.append(write_text(out / "table3.json", dumps(data)))
            paths.append(write_text(out / "verdicts.json",
                                    dumps([v.to_dict() for v in self.verdicts])))
        if self.reports:
            paths.append(write_text(out / "verify_report.json", dumps(verify_payload(self.reports))))
        paths.append(write_text(out / "bundle.json", dumps(self.manifest())))
        return paths


def sweep_file_name(s: SweepResult) -> str:
    safe = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in s.init)
    return f"{s.motif}__{safe}.csv"


def verify_payload(reports: Sequence[OracleReport]) -> dict:
    return {"passed": all(r.passed for r in reports), "count": len(reports),
            "failures": sum(not r.passed for r in reports),
            "reports": [r.to_dict() for r in reports]}
