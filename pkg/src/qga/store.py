"""Dictionary-encoded in-memory triple store.

Items (IRIs and literals) are interned to dense integer ids in order of first
appearance.  Every id has exactly one kind: entity, class, or predicate.
Objects of the configured type predicate become classes, predicates become
predicates, everything else is an entity.  Literal objects are interned like
entities; their datatype (the part after ``^^``) is interned as a class.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import KindConflictError, ParseError, UnknownItemError

KIND_ENTITY = 0
KIND_CLASS = 1
KIND_PREDICATE = 2

KIND_NAMES = {KIND_ENTITY: "entity", KIND_CLASS: "class", KIND_PREDICATE: "predicate"}

DEFAULT_TYPE_PREDICATE = "rdf:type"

_LITERAL_RE = re.compile(r'^"(?P<lex>.*)"(?:\^\^(?P<dtype>\S+))?$')

WILDCARD = None


@dataclass
class KnowledgeGraph:
    """Immutable after load; all reads are thread-safe."""

    type_predicate: str = DEFAULT_TYPE_PREDICATE
    items: list[str] = field(default_factory=list)
    kinds: list[int] = field(default_factory=list)
    triples: list[tuple[int, int, int]] = field(default_factory=list)
    type_edges: dict[int, set[int]] = field(default_factory=dict)

    def __post_init__(self):
        self._id_of: dict[str, int] = {s: i for i, s in enumerate(self.items)}
        self._triple_set: set[tuple[int, int, int]] = set(self.triples)
        self._by_s: dict[int, list] = {}
        self._by_p: dict[int, list] = {}
        self._by_o: dict[int, list] = {}
        self._by_sp: dict[tuple[int, int], list] = {}
        self._by_po: dict[tuple[int, int], list] = {}
        self._by_so: dict[tuple[int, int], list] = {}
        for t in self.triples:
            s, p, o = t
            self._by_s.setdefault(s, []).append(t)
            self._by_p.setdefault(p, []).append(t)
            self._by_o.setdefault(o, []).append(t)
            self._by_sp.setdefault((s, p), []).append(t)
            self._by_po.setdefault((p, o), []).append(t)
            self._by_so.setdefault((s, o), []).append(t)

    # -- catalog access -------------------------------------------------

    def id_of(self, iri: str) -> int:
        try:
            return self._id_of[iri]
        except KeyError:
            raise UnknownItemError(f"unknown item: {iri!r}")

    def iri_of(self, item: int) -> str:
        self._check_id(item)
        return self.items[item]

    def kind_of(self, item: int) -> int:
        self._check_id(item)
        return self.kinds[item]

    def catalog(self, kind: int) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k == kind]

    @property
    def entities(self) -> list[int]:
        return self.catalog(KIND_ENTITY)

    @property
    def classes(self) -> list[int]:
        return self.catalog(KIND_CLASS)

    @property
    def predicates(self) -> list[int]:
        return self.catalog(KIND_PREDICATE)

    @property
    def vertices(self) -> list[int]:
        """Entity and class ids, i.e. everything a variable may bind to."""
        return [i for i, k in enumerate(self.kinds) if k != KIND_PREDICATE]

    def num_items(self) -> int:
        return len(self.items)

    def _check_id(self, item) -> None:
        if not isinstance(item, int) or not 0 <= item < len(self.items):
            raise UnknownItemError(f"unknown item id: {item!r}")

    # -- triple access ---------------------------------------------------

    def has_triple(self, s: int, p: int, o: int) -> bool:
        self._check_id(s)
        self._check_id(p)
        self._check_id(o)
        return (s, p, o) in self._triple_set

    def match_pattern(self, s=WILDCARD, p=WILDCARD, o=WILDCARD):
        """Yield triples matching the bound positions, in sorted (s,p,o) order."""
        for x in (s, p, o):
            if x is not WILDCARD:
                self._check_id(x)
        if s is not WILDCARD and p is not WILDCARD and o is not WILDCARD:
            if (s, p, o) in self._triple_set:
                yield (s, p, o)
            return
        if s is not WILDCARD and p is not WILDCARD:
            pool = self._by_sp.get((s, p), [])
        elif p is not WILDCARD and o is not WILDCARD:
            pool = self._by_po.get((p, o), [])
        elif s is not WILDCARD and o is not WILDCARD:
            pool = self._by_so.get((s, o), [])
        elif s is not WILDCARD:
            pool = self._by_s.get(s, [])
        elif p is not WILDCARD:
            pool = self._by_p.get(p, [])
        elif o is not WILDCARD:
            pool = self._by_o.get(o, [])
        else:
            pool = self.triples
        yield from pool

    def count_pattern(self, s=WILDCARD, p=WILDCARD, o=WILDCARD) -> int:
        return sum(1 for _ in self.match_pattern(s, p, o))


def _parse_line(path, line_no, line):
    fields = line.split("\t")
    if len(fields) != 3:
        raise ParseError(path, line_no, f"expected 3 tab-separated fields, got {len(fields)}")
    s, p, o = (f.strip() for f in fields)
    if not s or not p or not o:
        raise ParseError(path, line_no, "empty field")
    return s, p, o


def load_triples(path, type_predicate: str = DEFAULT_TYPE_PREDICATE) -> KnowledgeGraph:
    """Load a tab-separated triple file into a fully indexed store.

    Lines are ``subject<TAB>predicate<TAB>object``; blank lines and lines
    starting with ``#`` are skipped.  Duplicate triples are dropped.
    """
    raw: list[tuple[str, str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            raw.append(_parse_line(path, line_no, line))

    predicates = {p for _, p, _ in raw}
    classes = {o for _, p, o in raw if p == type_predicate}
    for _, _, o in raw:
        m = _LITERAL_RE.match(o)
        if m and m.group("dtype"):
            classes.add(m.group("dtype"))

    vertex_uses = {s for s, _, _ in raw} | {o for _, _, o in raw}
    clash = predicates & (vertex_uses | classes)
    if clash:
        name = sorted(clash)[0]
        raise KindConflictError(f"item used both as predicate and as vertex: {name!r}")

    items: list[str] = []
    kinds: list[int] = []
    id_of: dict[str, int] = {}

    def intern(name: str, kind: int) -> int:
        i = id_of.get(name)
        if i is None:
            i = len(items)
            id_of[name] = i
            items.append(name)
            kinds.append(kind)
        return i

    def kind_for_vertex(name: str) -> int:
        return KIND_CLASS if name in classes else KIND_ENTITY

    triples: list[tuple[int, int, int]] = []
    seen: set[tuple[int, int, int]] = set()
    type_edges: dict[int, set[int]] = {}
    for s, p, o in raw:
        si = intern(s, kind_for_vertex(s))
        pi = intern(p, KIND_PREDICATE)
        lit = _LITERAL_RE.match(o)
        oi = intern(o, kind_for_vertex(o))
        t = (si, pi, oi)
        if t not in seen:
            seen.add(t)
            triples.append(t)
        if p == type_predicate:
            type_edges.setdefault(si, set()).add(oi)
        if lit and lit.group("dtype"):
            di = intern(lit.group("dtype"), KIND_CLASS)
            type_edges.setdefault(oi, set()).add(di)

    triples.sort()
    return KnowledgeGraph(
        type_predicate=type_predicate,
        items=items,
        kinds=kinds,
        triples=triples,
        type_edges=type_edges,
    )


def has_triple(kg: KnowledgeGraph, s: int, p: int, o: int) -> bool:
    return kg.has_triple(s, p, o)


def match_pattern(kg: KnowledgeGraph, s=WILDCARD, p=WILDCARD, o=WILDCARD):
    return kg.match_pattern(s, p, o)
