"""The `vdd` command.

Exit codes: 0 success, 1 I/O or environment, 2 structural errors (parse,
type, frame, obligation resolution), 3 invariant or runtime violations,
4 at least one obligation FAILed during `run`.  All output is deterministic
for a given project tree; timestamps are suppressed by `--reproducible`.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from vdd import ledger as led
from vdd.engine import (
    Lasso,
    StateEvidence,
    StepFailure,
    Verdict,
    eval_vo,
    evidence_json,
    evidence_text,
)
from vdd.errors import Diagnostic, EvalError, VddError
from vdd.plan import derive_plan, print_plan
from vdd.project import MANIFEST_NAME, Project, find_project_root, load_project
from vdd.specml import check_invariants, typecheck
from vdd.volang import print_vo_expr, resolve

from .animate import run_animation

EPOCH = "1970-01-01T00:00:00+00:00"

_EXIT_FOR_CODE = {"E-IO": 1, "E-EVAL": 3}


def _exit_code_for(err: VddError) -> int:
    area = "-".join(err.code.split("-")[:2])
    return _EXIT_FOR_CODE.get(area, 2)


class Io:
    """Output helper honouring --json and --reproducible."""

    def __init__(self, as_json: bool, reproducible: bool):
        self.as_json = as_json
        self.reproducible = reproducible

    def out(self, text: str = "", obj: dict | None = None) -> None:
        if self.as_json:
            if obj is not None:
                print(json.dumps(obj, sort_keys=True))
        else:
            print(text)

    def err(self, message: str) -> None:
        sys.stdout.flush()
        print(message, file=sys.stderr)

    def diagnostic(self, diag: Diagnostic) -> None:
        if self.as_json:
            print(
                json.dumps(
                    {
                        "kind": "diagnostic",
                        "code": diag.code,
                        "severity": str(diag.severity),
                        "file": diag.span.file,
                        "line": diag.span.line,
                        "col": diag.span.col,
                        "message": diag.message,
                    },
                    sort_keys=True,
                )
            )
        else:
            self.err(str(diag))

    def now(self) -> str:
        if self.reproducible:
            return EPOCH
        return datetime.now(timezone.utc).isoformat(timespec="seconds")


# ---------------------------------------------------------------------------
# Shared checking phase


def _check_project(project: Project, io: Io) -> int:
    """Frame, type, resolution, and invariant checks; prints findings and
    returns the would-be exit code."""
    structural: list[Diagnostic] = []
    for name in sorted(project.machines):
        try:
            typecheck(
                project.machines[name],
                project.contexts_for(name),
                abstract=project.abstract_of(name),
            )
        except VddError as exc:
            structural.append(exc.to_diagnostic())
    for key, rec in project.vos.items():
        machine = project.machines[rec.decl.id.model]
        try:
            _, diags = resolve(
                rec.decl.expr, machine, project.contexts_for(machine.name), frame=project.topology
            )
        except VddError as exc:
            structural.append(exc.to_diagnostic())
            continue
        structural.extend(diags)
    if structural:
        for diag in structural:
            io.diagnostic(diag)
        return 2

    worst = 0
    for name in led.machine_order(project):
        try:
            space = project.space(name)
        except EvalError as exc:
            io.diagnostic(exc.to_diagnostic())
            worst = max(worst, 3)
            continue
        if space.truncated:
            io.err(f"warning: {name}: state space truncated at {space.cap} states")
        for violation in check_invariants(space):
            steps = space.trace_to(violation.state)
            trace = "; ".join(t.label() for t in steps) or "<initial>"
            io.out(
                f"{name}: invariant {violation.label} violated in ({space.fmt_state(violation.state)}) via {trace}",
                {
                    "kind": "invariant-violation",
                    "machine": name,
                    "invariant": violation.label,
                    "state": space.fmt_state(violation.state),
                    "trace": [t.label() for t in steps],
                },
            )
            worst = max(worst, 3)
    return worst


# ---------------------------------------------------------------------------
# Commands


def cmd_init(args: argparse.Namespace, io: Io) -> int:
    root = Path(args.project or ".")
    manifest = root / MANIFEST_NAME
    if manifest.exists():
        io.err(f"{manifest} already exists")
        return 1
    root.mkdir(parents=True, exist_ok=True)
    name = args.name or root.resolve().name
    for sub in ("frames", "requirements", "vos", "machines"):
        (root / sub).mkdir(exist_ok=True)
    manifest.write_text(
        f"name = {name}\n"
        "frames = frames/*.frame\n"
        "requirements = requirements/*.req\n"
        "vos = vos/*.vo\n"
        "machines = machines/*.mch\n"
        "contexts = machines/*.ctx\n"
        "cap = 100000\n"
        "refinement_discipline = STRICT\n"
    )
    io.out(f"initialised {manifest}", {"kind": "init", "manifest": str(manifest)})
    return 0


def cmd_check(args: argparse.Namespace, io: Io, project: Project) -> int:
    code = _check_project(project, io)
    if code == 0:
        io.out("ok", {"kind": "check", "ok": True})
    return code


def cmd_plan(args: argparse.Namespace, io: Io, project: Project) -> int:
    plan = derive_plan(project.main_frame, project.sub_frames, project.manifest.choices)
    if io.as_json:
        for i, step in enumerate(plan.steps):
            io.out(
                obj={
                    "kind": "plan-step",
                    "index": i,
                    "machine": step.machine_slot,
                    "step": str(step.kind),
                    "domains": list(step.domains),
                    "justification": list(step.justification),
                }
            )
    else:
        print(print_plan(plan), end="")
    return 0


def _evidence_label(ev) -> str:
    if isinstance(ev, Lasso):
        return "counterexample"
    if isinstance(ev, StepFailure):
        return "failed"
    if isinstance(ev, StateEvidence):
        return "witness"
    return "evidence"


def _leaf_lines(space, result) -> list[str]:
    lines = []
    for leaf in result.leaves():
        if leaf.evidence is not None:
            label = _evidence_label(leaf.evidence)
            if leaf.verdict is Verdict.FAIL and isinstance(leaf.evidence, StateEvidence):
                label = "violation"
            lines.append(f"  {label}: {evidence_text(space, leaf.evidence)}")
        if leaf.diagnostic is not None:
            lines.append(f"  {leaf.diagnostic.code}: {leaf.diagnostic.message}")
        if leaf.note:
            lines.append(f"  note: {leaf.note}")
    return lines


def cmd_run(args: argparse.Namespace, io: Io, project: Project) -> int:
    check_code = _check_project(project, io)
    if check_code != 0:
        io.err("checks failed; nothing was recorded")
        return check_code

    keys = list(project.vos) if not args.vo else list(args.vo)
    for key in keys:
        if key not in project.vos:
            io.err(f"unknown obligation {key!r}")
            return 2

    index = led.build_scope_index(project)
    hashes = led.project_hashes(project, index)
    ledger = led.Ledger.load(project.root)
    now = io.now()

    any_fail = False
    any_error = False
    pair_pass: dict[tuple[str, str], bool] = {}
    for key in keys:
        rec = project.vos[key]
        machine_name = rec.decl.id.model
        machine = project.machines[machine_name]
        space = project.space(machine_name)
        expr, _ = resolve(rec.decl.expr, machine, project.contexts_for(machine_name), frame=project.topology)
        try:
            result = eval_vo(expr, space)
        except VddError as exc:
            io.err(f"{key}: {exc.code}: {exc.message}")
            any_error = True
            continue
        verdict = result.verdict
        any_fail = any_fail or verdict is Verdict.FAIL
        pair = (rec.decl.id.requirement, machine_name)
        pair_pass[pair] = pair_pass.get(pair, True) and verdict is Verdict.PASS
        io.out(
            f"{key}: {verdict}",
            {
                "kind": "result",
                "vo": key,
                "verdict": str(verdict),
                "expr": print_vo_expr(expr),
                "evidence": [
                    evidence_json(space, leaf.evidence)
                    for leaf in result.leaves()
                    if leaf.evidence is not None
                ],
            },
        )
        if not io.as_json:
            for line in _leaf_lines(space, result):
                print(line)
        mh, fh, vh = hashes.result_hashes(key)
        led.record(
            ledger,
            led.ResultEntry(key, str(verdict), mh, fh, vh, now),
            hashes,
        )

    for (req, machine_name) in sorted(pair_pass):
        evidence = led.StageEvidence(
            vo_exists=True,
            typecheck_clean=True,
            invariants_pass=True,
            vo_pass=pair_pass[(req, machine_name)],
        )
        while True:
            try:
                led.advance_stage(ledger, req, machine_name, evidence, hashes.machines[machine_name], now)
            except VddError:
                break

    ledger.append(
        led.SnapshotEntry(
            machines=dict(sorted(hashes.machines.items())),
            domains=dict(sorted(hashes.domains.items())),
            vos=dict(sorted(hashes.vos.items())),
            discipline=project.manifest.refinement_discipline,
            time=now,
        )
    )
    if any_error:
        return 2
    return 4 if any_fail else 0


def cmd_impact(args: argparse.Namespace, io: Io, project: Project) -> int:
    ledger = led.Ledger.load(project.root)
    stale = led.stale_vos(project, ledger, transitive=args.transitive_impact)
    for key in sorted(stale):
        io.out(f"{key}: stale", {"kind": "stale", "vo": key})
    if not stale:
        io.out("no stale obligations", {"kind": "stale-none"})
    return 0


def cmd_status(args: argparse.Namespace, io: Io, project: Project) -> int:
    ledger = led.Ledger.load(project.root)
    hashes = led.project_hashes(project)
    order = led.machine_order(project)
    for req_id in project.requirements:
        targets = [m for m in order if f"{req_id}/{m}" in project.vos]
        if not targets:
            io.out(f"{req_id}: SELECTED (no obligation)", {"kind": "stage", "requirement": req_id, "stage": "SELECTED"})
            continue
        for m in targets:
            stage = led.current_stage(ledger, req_id, m, hashes.machines[m])
            io.out(
                f"{req_id}/{m}: {stage}",
                {"kind": "stage", "requirement": req_id, "machine": m, "stage": str(stage)},
            )
    return 0


def cmd_report(args: argparse.Namespace, io: Io, project: Project) -> int:
    ledger = led.Ledger.load(project.root)
    rows = led.matrix(project, ledger)
    if args.csv:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerows(rows)
        return 0
    if io.as_json:
        header = rows[0]
        for row in rows[1:]:
            io.out(obj={"kind": "matrix-row", "requirement": row[0], "cells": dict(zip(header[1:], row[1:]))})
        for req_id, req in project.requirements.items():
            io.out(obj={"kind": "requirement", "id": req_id, "text": req.text})
        return 0
    if not io.reproducible:
        print(f"generated {io.now()}")
    print("Traceability")
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    for row in rows:
        print("  " + "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    print()
    print("Requirements")
    for req_id, req in project.requirements.items():
        print(f"  {req_id}: {req.text}")
        for key, rec in project.vos.items():
            if rec.decl.id.requirement != req_id:
                continue
            entry = ledger.last_result(key)
            suffix = f"  [last: {entry.verdict}]" if entry else ""
            print(f"    {key}: {print_vo_expr(rec.decl.expr)}{suffix}")
    return 0


def cmd_animate(args: argparse.Namespace, io: Io, project: Project) -> int:
    if args.machine not in project.machines:
        io.err(f"unknown machine {args.machine!r}")
        return 2
    typecheck(
        project.machines[args.machine],
        project.contexts_for(args.machine),
        abstract=project.abstract_of(args.machine),
    )
    return run_animation(project.space(args.machine), sys.stdin, sys.stdout)


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vdd",
        description="Validation-driven development: frames, plans, machines, obligations.",
    )
    parser.add_argument("--project", metavar="DIR", help="project directory (default: nearest manifest)")
    parser.add_argument("--json", action="store_true", help="line-delimited JSON output")
    parser.add_argument("--reproducible", action="store_true", help="suppress timestamps")
    sub = parser.add_subparsers(dest="command", required=True)

    p_init = sub.add_parser("init", help="create a fresh project manifest and directories")
    p_init.add_argument("name", nargs="?", help="project name (default: directory name)")

    sub.add_parser("check", help="frame, type, resolution, and invariant checks")
    sub.add_parser("plan", help="print the justified refinement plan")

    p_run = sub.add_parser("run", help="evaluate obligations and record the results")
    p_run.add_argument("--vo", action="append", metavar="REQ/MACHINE", help="run one obligation (repeatable)")
    p_run.add_argument("--all", action="store_true", help="run every obligation (default)")

    p_imp = sub.add_parser("impact", help="list obligations staled by working-tree changes")
    p_imp.add_argument("--transitive-impact", action="store_true", help="close consumes-from over multiple hops")

    sub.add_parser("status", help="workflow stage per requirement")

    p_rep = sub.add_parser("report", help="traceability matrix and requirement listing")
    p_rep.add_argument("--csv", action="store_true", help="matrix as CSV")

    p_anim = sub.add_parser("animate", help="interactively step through a machine")
    p_anim.add_argument("machine", help="machine name")
    return parser


_NEEDS_PROJECT = {
    "check": cmd_check,
    "plan": cmd_plan,
    "run": cmd_run,
    "impact": cmd_impact,
    "status": cmd_status,
    "report": cmd_report,
    "animate": cmd_animate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    io = Io(args.json, args.reproducible)
    try:
        if args.command == "init":
            return cmd_init(args, io)
        if args.project:
            root = Path(args.project)
        else:
            found = find_project_root(Path.cwd())
            if found is None:
                io.err(f"no {MANIFEST_NAME} here or in any parent directory")
                return 1
            root = found
        project = load_project(root)
        return _NEEDS_PROJECT[args.command](args, io, project)
    except VddError as exc:
        io.diagnostic(exc.to_diagnostic())
        return _exit_code_for(exc)
    except OSError as exc:
        io.err(f"i/o error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
