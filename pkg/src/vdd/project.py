"""Project loading: the `vdd.project` manifest and the artifact files it names.

A project directory holds frame, requirement, obligation, machine, and
context files plus a flat key-value manifest.  Loading parses everything,
enforces cross-file uniqueness and reference integrity, and exposes the
pieces the commands need: per-machine state spaces, the merged frame
topology, and the plan choices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from vdd.errors import ProjectError, SourceSpan, VddError
from vdd.frames import FrameSpec, check_frames, parse_frame, union_topology
from vdd.specml import ast as mast
from vdd.specml import explore, parse_context, parse_machine
from vdd.specml.explore import DEFAULT_CAP, StateSpace
from vdd.volang import ast as va
from vdd.volang import parse_requirements, parse_vo_file

MANIFEST_NAME = "vdd.project"
LEDGER_NAME = "vdd.ledger"

STRICT = "STRICT"
LIBERAL = "LIBERAL"

_GLOB_KEYS = ("frames", "requirements", "vos", "machines", "contexts")

_DEFAULT_GLOBS = {
    "frames": ("*.frame",),
    "requirements": ("*.req",),
    "vos": ("*.vo",),
    "machines": ("*.mch",),
    "contexts": ("*.ctx",),
}


@dataclass(frozen=True)
class Manifest:
    name: str
    globs: dict[str, tuple[str, ...]]
    cap: int = DEFAULT_CAP
    refinement_discipline: str = STRICT
    choices: dict[str, str] = field(default_factory=dict)


def parse_manifest(text: str, file: str = MANIFEST_NAME) -> Manifest:
    name = None
    globs = dict(_DEFAULT_GLOBS)
    cap = DEFAULT_CAP
    discipline = STRICT
    choices: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        span = SourceSpan(file, lineno, 1)
        if "=" not in line:
            raise ProjectError("E-PROJ-001", f"expected 'key = value', got {line!r}", span)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not value:
            raise ProjectError("E-PROJ-001", f"missing value for {key!r}", span)
        if key == "name":
            name = value
        elif key in _GLOB_KEYS:
            globs[key] = tuple(part.strip() for part in value.split(",") if part.strip())
        elif key == "cap":
            try:
                cap = int(value)
            except ValueError:
                raise ProjectError("E-PROJ-001", f"cap must be an integer, got {value!r}", span) from None
            if cap <= 0:
                raise ProjectError("E-PROJ-001", "cap must be positive", span)
        elif key == "refinement_discipline":
            if value not in (STRICT, LIBERAL):
                raise ProjectError(
                    "E-PROJ-001", f"refinement_discipline must be STRICT or LIBERAL, got {value!r}", span
                )
            discipline = value
        elif key.startswith("choice ") or key.startswith("choice\t"):
            target = key.split(None, 1)[1].strip()
            if not target:
                raise ProjectError("E-PROJ-001", "choice needs a sub-problem or sub-problem.domain key", span)
            if value not in ("immediate", "deferred"):
                raise ProjectError(
                    "E-PROJ-001", f"choice must be immediate or deferred, got {value!r}", span
                )
            choices[target] = value
        else:
            raise ProjectError("E-PROJ-001", f"unknown manifest key {key!r}", span)
    if name is None:
        raise ProjectError("E-PROJ-001", "manifest does not set a project name", SourceSpan(file, 1, 1))
    return Manifest(name=name, globs=globs, cap=cap, refinement_discipline=discipline, choices=choices)


@dataclass(frozen=True)
class VORecord:
    """One obligation declaration plus where it came from."""

    decl: va.VODecl
    path: Path

    @property
    def key(self) -> str:
        return str(self.decl.id)


@dataclass
class Project:
    root: Path
    manifest: Manifest
    files: dict[str, list[Path]]
    frames: list[FrameSpec]
    main_frame: FrameSpec
    sub_frames: dict[str, FrameSpec]
    requirements: dict[str, va.Requirement]
    machines: dict[str, mast.MachineSpec]
    machine_paths: dict[str, Path]
    contexts: dict[str, mast.ContextSpec]
    context_paths: dict[str, Path]
    vos: dict[str, VORecord]
    _topology: FrameSpec | None = None
    _spaces: dict[str, StateSpace] = field(default_factory=dict)

    @property
    def topology(self) -> FrameSpec:
        """Main frame with every sub-frame's domains and interfaces merged in."""
        if self._topology is None:
            self._topology = union_topology(self.main_frame, self.sub_frames)
        return self._topology

    def contexts_for(self, machine: str) -> tuple[mast.ContextSpec, ...]:
        m = self.machines[machine]
        return tuple(self.contexts[name] for name in m.sees)

    def abstract_of(self, machine: str) -> mast.MachineSpec | None:
        parent = self.machines[machine].refines
        return self.machines[parent] if parent else None

    def space(self, machine: str) -> StateSpace:
        if machine not in self._spaces:
            self._spaces[machine] = explore(
                self.machines[machine], self.contexts_for(machine), cap=self.manifest.cap
            )
        return self._spaces[machine]

    def vo_ids(self) -> list[str]:
        return list(self.vos)


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise ProjectError("E-IO-001", f"cannot read {path}: {exc.strerror or exc}") from None


def _collect(root: Path, patterns: tuple[str, ...]) -> list[Path]:
    out: list[Path] = []
    seen: set[Path] = set()
    for pattern in patterns:
        literal = not any(ch in pattern for ch in "*?[")
        matches = sorted(root.glob(pattern), key=lambda p: p.as_posix())
        if literal and not matches:
            raise ProjectError("E-PROJ-003", f"manifest names {pattern!r}, which does not exist")
        for p in matches:
            if p.is_file() and p not in seen:
                seen.add(p)
                out.append(p)
    return out


def find_project_root(start: Path) -> Path | None:
    """Nearest ancestor of `start` (inclusive) containing a manifest."""
    cur = start.resolve()
    for candidate in (cur, *cur.parents):
        if (candidate / MANIFEST_NAME).is_file():
            return candidate
    return None


def load_project(root: Path | str) -> Project:
    """Parse the manifest and every artifact it names; raises the first
    structural error found (parse, duplicate, or dangling reference)."""
    root = Path(root)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        raise ProjectError("E-IO-001", f"no {MANIFEST_NAME} in {root}")
    manifest = parse_manifest(_read(manifest_path), str(manifest_path))

    files = {kind: _collect(root, manifest.globs[kind]) for kind in _GLOB_KEYS}

    contexts: dict[str, mast.ContextSpec] = {}
    context_paths: dict[str, Path] = {}
    for path in files["contexts"]:
        ctx = parse_context(_read(path), str(path))
        if ctx.name in contexts:
            raise ProjectError(
                "E-PROJ-002",
                f"context {ctx.name!r} declared in both {context_paths[ctx.name]} and {path}",
            )
        contexts[ctx.name] = ctx
        context_paths[ctx.name] = path

    machines: dict[str, mast.MachineSpec] = {}
    machine_paths: dict[str, Path] = {}
    for path in files["machines"]:
        m = parse_machine(_read(path), str(path))
        if m.name in machines:
            raise ProjectError(
                "E-PROJ-002",
                f"machine {m.name!r} declared in both {machine_paths[m.name]} and {path}",
            )
        machines[m.name] = m
        machine_paths[m.name] = path

    for m in machines.values():
        for seen_ctx in m.sees:
            if seen_ctx not in contexts:
                raise ProjectError(
                    "E-PROJ-003", f"machine {m.name} sees unknown context {seen_ctx!r}", m.span
                )
        if m.refines and m.refines not in machines:
            raise ProjectError(
                "E-PROJ-003", f"machine {m.name} refines unknown machine {m.refines!r}", m.span
            )
    for name in machines:
        hops, cur = 0, name
        while machines[cur].refines:
            cur = machines[cur].refines
            hops += 1
            if hops > len(machines):
                raise ProjectError("E-PROJ-003", f"refinement cycle through machine {name!r}")

    requirements: dict[str, va.Requirement] = {}
    for path in files["requirements"]:
        for req in parse_requirements(_read(path), str(path)):
            if req.id in requirements:
                raise ProjectError("E-PROJ-002", f"requirement {req.id!r} declared twice", req.span)
            requirements[req.id] = req

    frames = [parse_frame(_read(path), str(path)) for path in files["frames"]]
    main_frame, sub_frames = check_frames(frames, known_requirements=requirements)

    vos: dict[str, VORecord] = {}
    for path in files["vos"]:
        for decl in parse_vo_file(_read(path), str(path)):
            rec = VORecord(decl, path)
            if rec.key in vos:
                raise ProjectError("E-PROJ-002", f"obligation {rec.key} declared twice", decl.span)
            if decl.id.requirement not in requirements:
                raise ProjectError(
                    "E-PROJ-003",
                    f"obligation {rec.key} targets unknown requirement {decl.id.requirement!r}",
                    decl.span,
                )
            if decl.id.model not in machines:
                raise ProjectError(
                    "E-PROJ-003",
                    f"obligation {rec.key} targets unknown machine {decl.id.model!r}",
                    decl.span,
                )
            vos[rec.key] = rec

    return Project(
        root=root,
        manifest=manifest,
        files=files,
        frames=frames,
        main_frame=main_frame,
        sub_frames=sub_frames,
        requirements=requirements,
        machines=machines,
        machine_paths=machine_paths,
        contexts=contexts,
        context_paths=context_paths,
        vos=vos,
    )
