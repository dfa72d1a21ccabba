"""Evidence ledger: append-only history, change impact, workflow stages.

The ledger file (`vdd.ledger`, one JSON object per line) accumulates three
kinds of records: obligation results with the artifact hashes they were
computed against, project snapshots (all hashes at the time of a run), and
workflow-stage advances.  Nothing is ever rewritten; staleness and stages
are derived by comparing the history against the current working tree.
"""
from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from vdd.errors import LedgerError
from vdd.frames import FrameSpec, Role, domain_fragment, parse_frame, print_frame
from vdd.project import LEDGER_NAME, LIBERAL, STRICT, Project
from vdd.specml import parse_context, parse_machine, print_context, print_machine
from vdd.volang import (
    parse_requirements,
    parse_vo_file,
    print_decl,
    print_requirements,
    resolve,
    task_scopes,
)

# ---------------------------------------------------------------------------
# Hashing


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def machine_hash(project: Project, name: str) -> str:
    """Digest of the machine's canonical form plus that of every context it
    sees; a constant change must invalidate evidence about the machine."""
    m = project.machines[name]
    parts = [print_machine(m)]
    parts += [print_context(c) for c in project.contexts_for(name)]
    return _sha("\n".join(parts))


def domain_hashes(project: Project) -> dict[str, str]:
    topo = project.topology
    return {d: _sha(domain_fragment(topo, d)) for d in topo.domain_names}


def vo_hash(project: Project, key: str) -> str:
    return _sha(print_decl(project.vos[key].decl))


def scope_frame_hash(scope: Iterable[str], domains: Mapping[str, str]) -> str:
    lines = [f"{d} {domains[d]}" for d in sorted(scope) if d in domains]
    return _sha("\n".join(lines))


def hash_artifacts(project: Project) -> dict[str, str]:
    """Per-file digests over canonical AST prints, so reformatting a file
    does not change its hash."""
    printers = {
        "machines": lambda text, f: print_machine(parse_machine(text, f)),
        "contexts": lambda text, f: print_context(parse_context(text, f)),
        "frames": lambda text, f: print_frame(parse_frame(text, f)),
        "requirements": lambda text, f: print_requirements(parse_requirements(text, f)),
        "vos": lambda text, f: "\n".join(print_decl(d) for d in parse_vo_file(text, f)) + "\n",
    }
    out: dict[str, str] = {}
    for kind, canon in printers.items():
        for path in project.files[kind]:
            rel = path.relative_to(project.root).as_posix()
            out[rel] = _sha(canon(path.read_text(), str(path)))
    return dict(sorted(out.items()))


# ---------------------------------------------------------------------------
# Scope index


@dataclass(frozen=True)
class DomainScopeIndex:
    """Which domains each obligation talks about, and which domains each
    machine implements."""

    vo_scopes: dict[str, frozenset[str]]
    machine_domains: dict[str, frozenset[str]]


def build_scope_index(project: Project) -> DomainScopeIndex:
    vo_scopes: dict[str, frozenset[str]] = {}
    for key, rec in project.vos.items():
        machine = project.machines[rec.decl.id.model]
        resolved, _ = resolve(
            rec.decl.expr, machine, project.contexts_for(machine.name), frame=project.topology
        )
        scope = task_scopes(resolved)
        if not scope:
            raise LedgerError("E-LED-001", f"obligation {key} resolves to an empty domain scope")
        vo_scopes[key] = scope
    machine_domains = {name: frozenset(m.implements) for name, m in project.machines.items()}
    return DomainScopeIndex(vo_scopes, machine_domains)


# ---------------------------------------------------------------------------
# Impact rules


def _consumes_from(frame: FrameSpec, producers: frozenset[str]) -> set[str]:
    """Domains that consume, over some shared interface, from any of the
    producing domains (one hop)."""
    out: set[str] = set()
    for iface in frame.interfaces:
        feeding = [
            ep.domain
            for ep in iface.endpoints
            if ep.domain in producers and ep.role in (Role.PRODUCER, Role.BOTH)
        ]
        if not feeding:
            continue
        for ep in iface.endpoints:
            if ep.role in (Role.CONSUMER, Role.BOTH) and ep.domain not in feeding:
                out.add(ep.domain)
    return out


def impact(
    changed: Iterable[str],
    index: DomainScopeIndex,
    frame: FrameSpec,
    mode: str = STRICT,
    *,
    added: Iterable[str] = (),
    refines: Mapping[str, str | None] | None = None,
    changed_domains: Iterable[str] = (),
    changed_vos: Iterable[str] = (),
    transitive: bool = False,
) -> frozenset[str]:
    """Obligations made stale by a set of working-tree changes.

    An obligation goes stale when (a) its target machine was edited; (b) a
    domain in its scope consumes from a domain implemented by an edited
    machine — one interface hop, or the transitive closure under
    `transitive`; (c) under the LIBERAL discipline, a newly added machine
    refining its target machine.  Newly added machines trigger only (c):
    they have not altered any behaviour existing evidence depends on.
    Frame edits stale every obligation whose scope touches an edited domain.
    """
    changed = set(changed)
    added = set(added)
    refines = dict(refines or {})
    for name in sorted(changed | added):
        if name not in index.machine_domains:
            raise LedgerError("E-LED-002", f"unknown machine {name!r} in change set")
    if mode not in (STRICT, LIBERAL):
        raise LedgerError("E-LED-002", f"unknown refinement discipline {mode!r}")

    stale: set[str] = set(changed_vos)
    for key in index.vo_scopes:
        if key.split("/", 1)[1] in changed:
            stale.add(key)

    producing = frozenset().union(
        *(index.machine_domains[m] for m in changed)
    ) if changed else frozenset()
    consumers = _consumes_from(frame, producing)
    if transitive:
        while True:
            wider = consumers | _consumes_from(frame, frozenset(consumers) | producing)
            if wider == consumers:
                break
            consumers = wider
    touched = set(consumers) | set(changed_domains)
    if touched:
        for key, scope in index.vo_scopes.items():
            if scope & touched:
                stale.add(key)

    if mode == LIBERAL:
        for new in added:
            parent = refines.get(new)
            while parent:
                for key in index.vo_scopes:
                    if key.split("/", 1)[1] == parent:
                        stale.add(key)
                parent = refines.get(parent)

    return frozenset(stale)


# ---------------------------------------------------------------------------
# Ledger records


class Stage(enum.Enum):
    SELECTED = "SELECTED"
    VO_WRITTEN = "VO_WRITTEN"
    IMPLEMENTED = "IMPLEMENTED"
    VERIFIED = "VERIFIED"
    VALIDATED = "VALIDATED"

    def __str__(self) -> str:
        return self.value


_STAGE_ORDER = list(Stage)


def _stage_rank(stage: Stage) -> int:
    return _STAGE_ORDER.index(stage)


@dataclass(frozen=True)
class ResultEntry:
    vo: str
    verdict: str
    machine_hash: str
    frame_hash: str
    vo_hash: str
    time: str
    stale: bool = False


@dataclass(frozen=True)
class SnapshotEntry:
    machines: dict[str, str]
    domains: dict[str, str]
    vos: dict[str, str]
    discipline: str
    time: str


@dataclass(frozen=True)
class StageEntry:
    requirement: str
    machine: str
    stage: Stage
    machine_hash: str
    time: str


Entry = ResultEntry | SnapshotEntry | StageEntry


def _to_json(entry: Entry) -> dict:
    if isinstance(entry, ResultEntry):
        return {
            "kind": "result",
            "vo": entry.vo,
            "verdict": entry.verdict,
            "machine_hash": entry.machine_hash,
            "frame_hash": entry.frame_hash,
            "vo_hash": entry.vo_hash,
            "time": entry.time,
            "stale": entry.stale,
        }
    if isinstance(entry, SnapshotEntry):
        return {
            "kind": "snapshot",
            "machines": entry.machines,
            "domains": entry.domains,
            "vos": entry.vos,
            "discipline": entry.discipline,
            "time": entry.time,
        }
    return {
        "kind": "stage",
        "requirement": entry.requirement,
        "machine": entry.machine,
        "stage": entry.stage.value,
        "machine_hash": entry.machine_hash,
        "time": entry.time,
    }


def _from_json(obj: dict, lineno: int) -> Entry:
    kind = obj.get("kind")
    try:
        if kind == "result":
            return ResultEntry(
                vo=obj["vo"],
                verdict=obj["verdict"],
                machine_hash=obj["machine_hash"],
                frame_hash=obj["frame_hash"],
                vo_hash=obj["vo_hash"],
                time=obj["time"],
                stale=bool(obj.get("stale", False)),
            )
        if kind == "snapshot":
            return SnapshotEntry(
                machines=dict(obj["machines"]),
                domains=dict(obj["domains"]),
                vos=dict(obj["vos"]),
                discipline=obj["discipline"],
                time=obj["time"],
            )
        if kind == "stage":
            return StageEntry(
                requirement=obj["requirement"],
                machine=obj["machine"],
                stage=Stage(obj["stage"]),
                machine_hash=obj["machine_hash"],
                time=obj["time"],
            )
    except (KeyError, ValueError) as exc:
        raise LedgerError("E-LED-004", f"ledger line {lineno} is malformed: {exc}") from None
    raise LedgerError("E-LED-004", f"ledger line {lineno} has unknown kind {kind!r}")


@dataclass
class Ledger:
    path: Path
    entries: list[Entry] = field(default_factory=list)

    @classmethod
    def load(cls, root: Path | str) -> "Ledger":
        path = Path(root) / LEDGER_NAME
        entries: list[Entry] = []
        if path.is_file():
            for lineno, line in enumerate(path.read_text().splitlines(), start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise LedgerError("E-LED-004", f"ledger line {lineno} is not valid JSON: {exc.msg}") from None
                entries.append(_from_json(obj, lineno))
        return cls(path, entries)

    def append(self, entry: Entry) -> None:
        with self.path.open("a") as fh:
            fh.write(json.dumps(_to_json(entry), sort_keys=True) + "\n")
        self.entries.append(entry)

    # -- queries ----------------------------------------------------------
    def last_result(self, vo_key: str) -> ResultEntry | None:
        for entry in reversed(self.entries):
            if isinstance(entry, ResultEntry) and entry.vo == vo_key:
                return entry
        return None

    def last_snapshot(self) -> SnapshotEntry | None:
        for entry in reversed(self.entries):
            if isinstance(entry, SnapshotEntry):
                return entry
        return None

    def last_stage(self, requirement: str, machine: str) -> StageEntry | None:
        for entry in reversed(self.entries):
            if (
                isinstance(entry, StageEntry)
                and entry.requirement == requirement
                and entry.machine == machine
            ):
                return entry
        return None


def record(ledger: Ledger, entry: ResultEntry, current: "ProjectHashes") -> None:
    """Append a result after verifying it was computed against the current
    working tree; E-LED-003 otherwise."""
    key = entry.vo
    expected = current.result_hashes(key)
    got = (entry.machine_hash, entry.frame_hash, entry.vo_hash)
    if expected != got:
        raise LedgerError(
            "E-LED-003",
            f"hashes for {key} do not match the working tree; re-run the evaluation",
        )
    ledger.append(entry)


# ---------------------------------------------------------------------------
# Current-tree hashes and staleness


@dataclass(frozen=True)
class ProjectHashes:
    """Every digest the ledger compares against, for one working tree."""

    machines: dict[str, str]
    domains: dict[str, str]
    vos: dict[str, str]
    scopes: dict[str, frozenset[str]]

    def result_hashes(self, vo_key: str) -> tuple[str, str, str]:
        scope = self.scopes[vo_key]
        return (
            self.machines[vo_key.split("/", 1)[1]],
            scope_frame_hash(scope, self.domains),
            self.vos[vo_key],
        )


def project_hashes(project: Project, index: DomainScopeIndex | None = None) -> ProjectHashes:
    if index is None:
        index = build_scope_index(project)
    return ProjectHashes(
        machines={name: machine_hash(project, name) for name in project.machines},
        domains=domain_hashes(project),
        vos={key: vo_hash(project, key) for key in project.vos},
        scopes=dict(index.vo_scopes),
    )


def diff_against_snapshot(current: ProjectHashes, snapshot: SnapshotEntry | None) -> dict:
    """Classify working-tree changes since the snapshot: edited and added
    machines, edited frame domains, edited obligations."""
    if snapshot is None:
        return {
            "changed": set(),
            "added": set(current.machines),
            "changed_domains": set(),
            "changed_vos": set(),
        }
    changed = {
        name
        for name, h in current.machines.items()
        if name in snapshot.machines and snapshot.machines[name] != h
    }
    added = {name for name in current.machines if name not in snapshot.machines}
    changed_domains = {
        d
        for d, h in current.domains.items()
        if d in snapshot.domains and snapshot.domains[d] != h
    } | {d for d in current.domains if d not in snapshot.domains}
    changed_vos = {
        key
        for key, h in current.vos.items()
        if key in snapshot.vos and snapshot.vos[key] != h
    }
    return {
        "changed": changed,
        "added": added,
        "changed_domains": changed_domains,
        "changed_vos": changed_vos,
    }


def stale_vos(
    project: Project,
    ledger: Ledger,
    index: DomainScopeIndex | None = None,
    transitive: bool = False,
) -> frozenset[str]:
    """Obligations whose recorded evidence no longer covers the working
    tree, per the impact rules applied to the diff since the last snapshot."""
    if index is None:
        index = build_scope_index(project)
    current = project_hashes(project, index)
    snapshot = ledger.last_snapshot()
    if snapshot is None:
        # Nothing recorded yet, so nothing can be stale.
        return frozenset()
    refines = {name: m.refines for name, m in project.machines.items()}
    diff = diff_against_snapshot(current, snapshot)
    return impact(
        diff["changed"],
        index,
        project.topology,
        project.manifest.refinement_discipline,
        added=diff["added"],
        refines=refines,
        changed_domains=diff["changed_domains"],
        changed_vos=diff["changed_vos"],
        transitive=transitive,
    )


# ---------------------------------------------------------------------------
# Traceability matrix


@dataclass(frozen=True)
class MatrixCell:
    requirement: str
    machine: str
    text: str  # verdict, STALE, or —


def machine_order(project: Project) -> list[str]:
    """Machines by refinement depth, then name: abstract before concrete."""

    def depth(name: str) -> int:
        d, cur = 0, name
        while project.machines[cur].refines:
            cur = project.machines[cur].refines
            d += 1
        return d

    return sorted(project.machines, key=lambda n: (depth(n), n))


def matrix(project: Project, ledger: Ledger) -> list[list[str]]:
    """Requirements × machines table of current verdicts; pure in (ledger,
    working tree).  Cells: verdict, STALE (recorded but invalidated), or —."""
    index = build_scope_index(project)
    stale = stale_vos(project, ledger, index)
    machines = machine_order(project)
    rows: list[list[str]] = [["requirement", *machines]]
    for req_id in project.requirements:
        row = [req_id]
        for m in machines:
            key = f"{req_id}/{m}"
            entry = ledger.last_result(key) if key in project.vos else None
            if entry is None:
                row.append("—")
            elif entry.stale or key in stale:
                row.append("STALE")
            else:
                row.append(entry.verdict)
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# Workflow stages


@dataclass(frozen=True)
class StageEvidence:
    """What the workflow has to show for a (requirement, machine) pair."""

    vo_exists: bool = False
    typecheck_clean: bool = False
    invariants_pass: bool = False
    vo_pass: bool = False


_PREREQUISITES = {
    Stage.VO_WRITTEN: ("vo_exists", "no obligation written for {req} on {machine}"),
    Stage.IMPLEMENTED: ("typecheck_clean", "machine {machine} does not typecheck cleanly"),
    Stage.VERIFIED: ("invariants_pass", "invariant check has not passed on {machine}"),
    Stage.VALIDATED: ("vo_pass", "obligation {req}/{machine} has no fresh PASS"),
}


def current_stage(ledger: Ledger, requirement: str, machine: str, machine_hash_now: str) -> Stage:
    """Latest recorded stage, demoted to IMPLEMENTED when the machine has
    changed since the record was made."""
    entry = ledger.last_stage(requirement, machine)
    if entry is None:
        return Stage.SELECTED
    stage = entry.stage
    if entry.machine_hash != machine_hash_now and _stage_rank(stage) > _stage_rank(Stage.IMPLEMENTED):
        return Stage.IMPLEMENTED
    return stage


def advance_stage(
    ledger: Ledger,
    requirement: str,
    machine: str,
    evidence: StageEvidence,
    machine_hash_now: str,
    time: str,
) -> Stage:
    """Advance one stage if its prerequisite is met; E-LED-010 otherwise.
    Never skips: each call moves at most one step up the workflow."""
    cur = current_stage(ledger, requirement, machine, machine_hash_now)
    if cur is Stage.VALIDATED:
        raise LedgerError("E-LED-010", f"{requirement}/{machine} is already VALIDATED")
    target = _STAGE_ORDER[_stage_rank(cur) + 1]
    attr, template = _PREREQUISITES[target]
    if not getattr(evidence, attr):
        raise LedgerError(
            "E-LED-010",
            template.format(req=requirement, machine=machine) + f"; {requirement}/{machine} stays {cur}",
        )
    ledger.append(StageEntry(requirement, machine, target, machine_hash_now, time))
    return target
