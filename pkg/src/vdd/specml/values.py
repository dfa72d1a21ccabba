"""Runtime values and resolved types.

Values are plain Python objects: bool, int, str (enumeration elements),
frozenset, and FMap for finite maps.  Every value is hashable and has a
canonical sort key, which is what makes parameter enumeration, state
identity, and printed output deterministic.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Iterable, Iterator

Value = Any  # bool | int | str | frozenset | FMap | tuple (maplet pair)


class FMap:
    """An immutable finite map with canonical item order."""

    __slots__ = ("_items", "_dict", "_hash")

    def __init__(self, items: Iterable[tuple[Value, Value]] = ()):
        d = dict(items)
        self._dict = d
        self._items = tuple(sorted(d.items(), key=lambda kv: canonical_key(kv[0])))
        self._hash = hash(self._items)

    def apply(self, key: Value) -> Value:
        return self._dict[key]

    def __contains__(self, key: Value) -> bool:
        return key in self._dict

    def items(self) -> tuple[tuple[Value, Value], ...]:
        return self._items

    def dom(self) -> frozenset:
        return frozenset(self._dict)

    def ran(self) -> frozenset:
        return frozenset(self._dict.values())

    def override(self, other: "FMap") -> "FMap":
        merged = dict(self._dict)
        merged.update(other._dict)
        return FMap(merged.items())

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FMap) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"FMap({list(self._items)!r})"


def canonical_key(v: Value) -> tuple:
    """Total order over all values; unrelated types never compare in
    well-typed programs, but the key is total anyway for robustness."""
    if isinstance(v, bool):  # must precede int: bool is a subtype of int
        return (0, 1 if v else 0)
    if isinstance(v, int):
        return (1, v)
    if isinstance(v, str):
        return (2, v)
    if isinstance(v, frozenset):
        return (3, len(v), tuple(sorted(canonical_key(m) for m in v)))
    if isinstance(v, FMap):
        return (4, len(v), tuple((canonical_key(k), canonical_key(w)) for k, w in v.items()))
    if isinstance(v, tuple):
        return (5, tuple(canonical_key(m) for m in v))
    raise TypeError(f"unorderable value {v!r}")


def sort_values(vals: Iterable[Value]) -> list[Value]:
    return sorted(vals, key=canonical_key)


def fmt_value(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return v
    if isinstance(v, frozenset):
        return "{" + ", ".join(fmt_value(m) for m in sort_values(v)) + "}"
    if isinstance(v, FMap):
        return "{" + ", ".join(f"{fmt_value(k)} |-> {fmt_value(w)}" for k, w in v.items()) + "}"
    if isinstance(v, tuple) and len(v) == 2:
        return f"{fmt_value(v[0])} |-> {fmt_value(v[1])}"
    raise TypeError(f"unprintable value {v!r}")


# ---------------------------------------------------------------------------
# Resolved types


@dataclass(frozen=True)
class Type:
    pass


@dataclass(frozen=True)
class BoolType(Type):
    def __str__(self) -> str:
        return "bool"


@dataclass(frozen=True)
class IntType(Type):
    """Unbounded integer: valid for intermediate expressions, never for state."""

    def __str__(self) -> str:
        return "int"


@dataclass(frozen=True)
class IntRangeType(Type):
    lo: int
    hi: int

    def __str__(self) -> str:
        return f"{self.lo}..{self.hi}"


@dataclass(frozen=True)
class EnumType(Type):
    name: str
    elements: tuple[str, ...]

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class SetType(Type):
    elem: Type

    def __str__(self) -> str:
        return f"set of {self.elem}"


@dataclass(frozen=True)
class MapType(Type):
    dom: Type
    ran: Type
    total: bool = False

    def __str__(self) -> str:
        kind = "total map" if self.total else "map"
        return f"{kind} {self.dom} -> {self.ran}"


@dataclass(frozen=True)
class PairType(Type):
    """The type of a maplet `a |-> b`; only map literals and DIST consume it."""

    left: Type
    right: Type

    def __str__(self) -> str:
        return f"{self.left} |-> {self.right}"


@dataclass(frozen=True)
class EmptyType(Type):
    """The polymorphic type of the literal `{}`."""

    def __str__(self) -> str:
        return "{}"


def cardinality(t: Type) -> int | None:
    """Number of values of the type, or None if infinite."""
    if isinstance(t, BoolType):
        return 2
    if isinstance(t, IntType):
        return None
    if isinstance(t, IntRangeType):
        return max(0, t.hi - t.lo + 1)
    if isinstance(t, EnumType):
        return len(t.elements)
    if isinstance(t, SetType):
        c = cardinality(t.elem)
        return None if c is None else 2**c
    if isinstance(t, MapType):
        cd, cr = cardinality(t.dom), cardinality(t.ran)
        if cd is None or cr is None:
            return None
        return cr**cd if t.total else (cr + 1) ** cd
    if isinstance(t, EmptyType):
        return 1
    return None


def enumerate_type(t: Type) -> Iterator[Value]:
    """All values of a finite type in canonical order."""
    if isinstance(t, BoolType):
        yield False
        yield True
    elif isinstance(t, IntRangeType):
        yield from range(t.lo, t.hi + 1)
    elif isinstance(t, EnumType):
        yield from sorted(t.elements)
    elif isinstance(t, SetType):
        base = list(enumerate_type(t.elem))
        subsets = [frozenset(c) for n in range(len(base) + 1) for c in itertools.combinations(base, n)]
        yield from sort_values(subsets)
    elif isinstance(t, MapType):
        keys = list(enumerate_type(t.dom))
        vals = list(enumerate_type(t.ran))
        maps = []
        domains = [keys] if t.total else (
            [list(c) for n in range(len(keys) + 1) for c in itertools.combinations(keys, n)]
        )
        for dom in domains:
            for assign in itertools.product(vals, repeat=len(dom)):
                maps.append(FMap(zip(dom, assign)))
        yield from sort_values(maps)
    elif isinstance(t, EmptyType):
        yield frozenset()
    else:
        raise ValueError(f"cannot enumerate infinite type {t}")


def types_compatible(a: Type, b: Type) -> bool:
    """Loose compatibility for comparisons and assignment: integer kinds are
    interchangeable, the empty literal matches any set/map, ranges ignore bounds."""
    if isinstance(a, EmptyType):
        return isinstance(b, (SetType, MapType, EmptyType))
    if isinstance(b, EmptyType):
        return isinstance(a, (SetType, MapType))
    if isinstance(a, (IntType, IntRangeType)) and isinstance(b, (IntType, IntRangeType)):
        return True
    if isinstance(a, BoolType) and isinstance(b, BoolType):
        return True
    if isinstance(a, EnumType) and isinstance(b, EnumType):
        return a.name == b.name
    if isinstance(a, SetType) and isinstance(b, SetType):
        return types_compatible(a.elem, b.elem)
    if isinstance(a, MapType) and isinstance(b, MapType):
        return types_compatible(a.dom, b.dom) and types_compatible(a.ran, b.ran)
    if isinstance(a, PairType) and isinstance(b, PairType):
        return types_compatible(a.left, b.left) and types_compatible(a.right, b.right)
    return False
