"""Problem frames: domains, shared interfaces, and sub-problem frames.

A frame file declares one machine domain (main frames only), designed and
given domains, and interfaces.  Interface lines are chains:

    a: AMAN <-> Schedule          # undirected; both ends produce and consume
    User -> AMAN                  # directed; User produces, AMAN consumes
    AMAN -> Display, User         # one shared interface, two consumers

A sub-problem frame (`frame X refines D`) details a designed domain D of the
main frame; domains re-declared with a parent domain's name are context
domains shared with the parent.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from vdd.errors import FrameError, ParseError, SourceSpan
from vdd.specml.ast import _span_field
from vdd.specml.lexer import TokenStream, tokenize


class DomainKind(enum.Enum):
    MACHINE = "machine"
    DESIGNED = "designed"
    GIVEN = "given"

    def __str__(self) -> str:
        return self.value


class Role(enum.Enum):
    PRODUCER = "producer"
    CONSUMER = "consumer"
    BOTH = "both"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Endpoint:
    domain: str
    role: Role


@dataclass(frozen=True)
class Interface:
    endpoints: tuple[Endpoint, ...]
    name: str | None = None
    span: SourceSpan = _span_field()

    def touches(self, domain: str) -> bool:
        return any(ep.domain == domain for ep in self.endpoints)

    def role_of(self, domain: str) -> Role | None:
        for ep in self.endpoints:
            if ep.domain == domain:
                return ep.role
        return None


@dataclass(frozen=True)
class DomainDecl:
    name: str
    kind: DomainKind
    requirements: tuple[str, ...] = ()
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class FrameSpec:
    name: str
    refines: str | None
    domains: tuple[DomainDecl, ...]
    interfaces: tuple[Interface, ...]
    span: SourceSpan = _span_field()

    def domain(self, name: str) -> DomainDecl | None:
        for d in self.domains:
            if d.name == name:
                return d
        return None

    @property
    def domain_names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.domains)

    @property
    def machine_domains(self) -> tuple[DomainDecl, ...]:
        return tuple(d for d in self.domains if d.kind == DomainKind.MACHINE)


# ---------------------------------------------------------------------------
# Parsing


def _parse_segment(ts: TokenStream) -> list[str]:
    names = [ts.expect("name", what="domain name").text]
    while ts.accept("op", ","):
        names.append(ts.expect("name", what="domain name").text)
    return names


def _parse_interface_line(ts: TokenStream, file: str) -> list[Interface]:
    span = ts.span()
    name: str | None = None
    if ts.peek().kind == "name" and ts.peek(1).kind == "op" and ts.peek(1).text == ":":
        name = ts.advance().text
        ts.advance()
    segments: list[list[str]] = [_parse_segment(ts)]
    arrows: list[str] = []
    while ts.peek().kind == "op" and ts.peek().text in ("->", "<->"):
        arrows.append(ts.advance().text)
        segments.append(_parse_segment(ts))
    if not arrows:
        raise ParseError("E-PARSE-001", "interface needs '->' or '<->'", ts.span())
    if name is not None and len(segments) > 2:
        raise ParseError("E-PARSE-001", "a named interface line must have exactly two segments", span)
    out: list[Interface] = []
    for i, arrow in enumerate(arrows):
        left, right = segments[i], segments[i + 1]
        lrole = Role.BOTH if arrow == "<->" else Role.PRODUCER
        rrole = Role.BOTH if arrow == "<->" else Role.CONSUMER
        endpoints = tuple(
            [Endpoint(d, lrole) for d in left] + [Endpoint(d, rrole) for d in right]
        )
        out.append(Interface(endpoints, name if len(arrows) == 1 else None, span=span))
    return out


def _parse_markers(ts: TokenStream) -> tuple[str, ...]:
    reqs: list[str] = []
    while ts.accept("op", "@"):
        reqs.append(ts.expect("name", what="requirement id").text)
    return tuple(reqs)


def parse_frame(text: str, file: str = "<string>") -> FrameSpec:
    ts = TokenStream(tokenize(text, file), file)
    ts.skip_newlines()
    head = ts.expect_word("frame")
    name = ts.expect("name", what="frame name").text
    refines: str | None = None
    if ts.at_word("refines"):
        ts.advance()
        refines = ts.expect("name", what="refined domain name").text
    ts.expect_newline()

    domains: list[DomainDecl] = []
    interfaces: list[Interface] = []
    while True:
        ts.skip_newlines()
        if ts.at_word("end"):
            ts.advance()
            break
        if ts.at_word("machine", "designed", "given"):
            tok = ts.advance()
            kind = DomainKind(tok.text)
            dname = ts.expect("name", what="domain name").text
            reqs = _parse_markers(ts)
            domains.append(DomainDecl(dname, kind, reqs, span=tok.span(file)))
            ts.expect_newline()
        elif ts.at_word("interfaces"):
            ts.advance()
            ts.expect_newline()
            while not ts.at_word("end", "interfaces", "machine", "designed", "given"):
                ts.skip_newlines()
                if ts.at_word("end", "interfaces", "machine", "designed", "given"):
                    break
                interfaces.extend(_parse_interface_line(ts, file))
                ts.expect_newline()
        else:
            raise ParseError(
                "E-PARSE-001",
                f"expected a domain declaration, 'interfaces', or 'end', found {ts.peek().text!r}",
                ts.span(),
            )
    return FrameSpec(name, refines, tuple(domains), tuple(interfaces), span=head.span(file))


# ---------------------------------------------------------------------------
# Printing (canonical; also the hashing surface)


def _fmt_interface(iface: Interface) -> str:
    producers = [ep.domain for ep in iface.endpoints if ep.role == Role.PRODUCER]
    consumers = [ep.domain for ep in iface.endpoints if ep.role == Role.CONSUMER]
    both = [ep.domain for ep in iface.endpoints if ep.role == Role.BOTH]
    prefix = f"{iface.name}: " if iface.name else ""
    if both and not producers and not consumers:
        return f"{prefix}{both[0]} <-> {', '.join(both[1:])}"
    if not both:
        return f"{prefix}{', '.join(producers)} -> {', '.join(consumers)}"
    # Mixed roles only arise from flattening; list endpoints explicitly so the
    # canonical text stays deterministic.
    eps = ", ".join(f"{ep.domain}[{ep.role}]" for ep in iface.endpoints)
    return f"{prefix}({eps})"


def print_frame(frame: FrameSpec) -> str:
    header = f"frame {frame.name}"
    if frame.refines:
        header += f" refines {frame.refines}"
    lines = [header]
    for d in frame.domains:
        marker = "".join(f" @{r}" for r in d.requirements)
        lines.append(f"  {d.kind} {d.name}{marker}")
    if frame.interfaces:
        lines.append("  interfaces")
        for iface in frame.interfaces:
            lines.append(f"    {_fmt_interface(iface)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def domain_fragment(frame: FrameSpec, domain: str) -> str:
    """Canonical text of one domain's declaration plus every interface it
    touches; hashing these fragments pins down which domains an edit changed."""
    decl = frame.domain(domain)
    lines = []
    if decl is not None:
        marker = "".join(f" @{r}" for r in decl.requirements)
        lines.append(f"{decl.kind} {decl.name}{marker}")
    for iface in frame.interfaces:
        if iface.touches(domain):
            lines.append(_fmt_interface(iface))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Checking


def check_frames(frames: Sequence[FrameSpec], known_requirements: Iterable[str] | None = None) -> tuple[FrameSpec, dict[str, FrameSpec]]:
    """Validate a main frame and its sub-frames; returns (main, subs by refined domain)."""
    mains = [f for f in frames if f.refines is None]
    if not mains:
        raise FrameError("E-FRAME-001", "no main frame (every frame refines a domain)")
    if len(mains) > 1:
        names = ", ".join(f.name for f in mains)
        raise FrameError("E-FRAME-001", f"multiple main frames: {names}", mains[1].span)
    main = mains[0]

    for frame in frames:
        seen: set[str] = set()
        for d in frame.domains:
            if d.name in seen:
                raise FrameError("E-FRAME-005", f"duplicate domain {d.name!r} in frame {frame.name}", d.span)
            seen.add(d.name)
        for iface in frame.interfaces:
            distinct = {ep.domain for ep in iface.endpoints}
            if len(distinct) < 2:
                raise FrameError("E-FRAME-006", f"interface in frame {frame.name} needs two distinct domains", iface.span)
            for ep in iface.endpoints:
                if frame.domain(ep.domain) is None:
                    raise FrameError(
                        "E-FRAME-004", f"interface names unknown domain {ep.domain!r} in frame {frame.name}", iface.span
                    )
        if known_requirements is not None:
            known = set(known_requirements)
            for d in frame.domains:
                for r in d.requirements:
                    if r not in known:
                        raise FrameError("E-FRAME-003", f"domain {d.name} cites unknown requirement {r!r}", d.span)

    machines = main.machine_domains
    if len(machines) != 1:
        detail = "declares no machine domain" if not machines else (
            "declares machine domains " + ", ".join(d.name for d in machines)
        )
        raise FrameError("E-FRAME-001", f"main frame must have exactly one machine domain; {main.name} {detail}", main.span)

    subs: dict[str, FrameSpec] = {}
    for frame in frames:
        if frame.refines is None:
            continue
        if frame.machine_domains:
            raise FrameError(
                "E-FRAME-001", f"sub-frame {frame.name} may not declare a machine domain", frame.span
            )
        target = main.domain(frame.refines)
        if target is None:
            raise FrameError(
                "E-FRAME-002", f"sub-frame {frame.name} refines unknown domain {frame.refines!r}", frame.span
            )
        if target.kind != DomainKind.DESIGNED:
            raise FrameError(
                "E-FRAME-002",
                f"sub-frame {frame.name} refines {frame.refines}, a {target.kind} domain; only designed domains can be detailed",
                frame.span,
            )
        if frame.refines in subs:
            raise FrameError(
                "E-FRAME-002", f"domain {frame.refines!r} is refined by two sub-frames", frame.span
            )
        subs[frame.refines] = frame
    return main, subs


# ---------------------------------------------------------------------------
# Degrees and adjacency


def incoming_degree(frame: FrameSpec, domain: str) -> int:
    """Number of interfaces on which `domain` consumes from some other producer."""
    count = 0
    for iface in frame.interfaces:
        mine = iface.role_of(domain)
        if mine not in (Role.CONSUMER, Role.BOTH):
            continue
        if any(
            ep.domain != domain and ep.role in (Role.PRODUCER, Role.BOTH)
            for ep in iface.endpoints
        ):
            count += 1
    return count


def machine_adjacent(frame: FrameSpec) -> set[str]:
    """Domains sharing at least one interface with the machine domain."""
    machines = {d.name for d in frame.machine_domains}
    out: set[str] = set()
    for iface in frame.interfaces:
        names = {ep.domain for ep in iface.endpoints}
        if names & machines:
            out |= names - machines
    return out


# ---------------------------------------------------------------------------
# Flattening


def _merge_domains(acc: dict[str, DomainDecl], incoming: Iterable[DomainDecl], frame_name: str) -> None:
    for d in incoming:
        old = acc.get(d.name)
        if old is None:
            acc[d.name] = d
        elif old.kind != d.kind:
            raise FrameError(
                "E-FRAME-005",
                f"domain {d.name!r} declared as {old.kind} and as {d.kind} (frame {frame_name})",
                d.span,
            )


def flatten(main: FrameSpec, subs: dict[str, FrameSpec], expand: Iterable[str] | None = None) -> FrameSpec:
    """Substitute sub-frames into the main frame.

    Interfaces of the main frame keep their endpoints when the sub-frame
    re-declares the refined domain (a context domain).  Otherwise the endpoint
    is re-attached through the sub-frame's interface of the same name; with no
    carrier and no name match that is ambiguous — E-FRAME-010.
    """
    targets = set(subs) if expand is None else set(expand)
    domains: dict[str, DomainDecl] = {}
    interfaces: list[Interface] = list(main.interfaces)
    _merge_domains(domains, main.domains, main.name)

    for refined, sub in subs.items():
        if refined not in targets:
            continue
        sub_ifaces = list(sub.interfaces)
        if sub.domain(refined) is None:
            # No carrier: re-route main interfaces that touched the refined
            # domain through same-named sub-frame interfaces.
            del domains[refined]
            rewritten: list[Interface] = []
            for iface in interfaces:
                if not iface.touches(refined):
                    rewritten.append(iface)
                    continue
                match = next(
                    (s for s in sub_ifaces if s.name is not None and s.name == iface.name), None
                )
                if match is None:
                    raise FrameError(
                        "E-FRAME-010",
                        f"cannot re-attach interface {iface.name or '<unnamed>'} of {main.name}: "
                        f"sub-frame {sub.name} has no domain {refined!r} and no interface of that name",
                        iface.span,
                    )
                keep = tuple(ep for ep in iface.endpoints if ep.domain != refined)
                merged = Interface(keep + match.endpoints, iface.name, span=iface.span)
                sub_ifaces.remove(match)
                rewritten.append(merged)
            interfaces = rewritten
        _merge_domains(domains, sub.domains, sub.name)
        interfaces.extend(sub_ifaces)

    return FrameSpec(main.name, None, tuple(domains.values()), tuple(interfaces), span=main.span)


def union_topology(main: FrameSpec, subs: dict[str, FrameSpec]) -> FrameSpec:
    """Plain union of domains and interfaces; total (never raises E-FRAME-010).

    Change-impact analysis walks this graph: one consumer hop over any
    interface declared anywhere in the project.
    """
    domains: dict[str, DomainDecl] = {}
    _merge_domains(domains, main.domains, main.name)
    interfaces = list(main.interfaces)
    for sub in subs.values():
        _merge_domains(domains, sub.domains, sub.name)
        interfaces.extend(sub.interfaces)
    return FrameSpec(main.name, None, tuple(domains.values()), tuple(interfaces), span=main.span)
