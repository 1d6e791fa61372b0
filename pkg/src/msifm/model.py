"""Schemas, many-sorted transactions, selection lists, constraints and datasets.

Item values are addressed by position inside their attribute's domain.  A
transaction stores one position per SV attribute and one bitmask per MV
attribute (bit ``k`` set means the ``k``-th domain item is present), so the
canonical itemset order is the integer order of those masks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import SchemaMismatch, ValidationError

Count = Union[int, Fraction]

SUBSET = "subset"
EQUAL = "equal"
_OPS = (SUBSET, EQUAL)

_FORBIDDEN_CHARS = (",", "\t", "\n", "\r")


def _check_name(name, what):
    if not isinstance(name, str) or not name:
        raise ValidationError(f"{what} must be a non-empty string, got {name!r}")
    if any(c in name for c in _FORBIDDEN_CHARS) or name.startswith("#"):
        raise ValidationError(f"{what} {name!r} contains a reserved character")


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def bits(mask: int) -> Iterator[int]:
    """Yield the positions of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Attribute:
    name: str
    domain: tuple[str, ...]


@dataclass(frozen=True)
class Schema:
    """The shape of a many-sorted relation: SV and MV attributes with finite domains."""

    sv_attrs: tuple[Attribute, ...]
    mv_attrs: tuple[Attribute, ...]
    _lookup: dict = field(default=None, compare=False, repr=False, hash=False)

    def __init__(self, sv: Iterable = (), mv: Iterable = ()):
        sv_attrs = tuple(self._make_attr(a) for a in sv)
        mv_attrs = tuple(self._make_attr(a) for a in mv)
        if not sv_attrs and not mv_attrs:
            raise ValidationError("a schema needs at least one attribute")
        lookup = {"attr": {}, "item": {}}
        for kind, attrs in (("sv", sv_attrs), ("mv", mv_attrs)):
            for pos, attr in enumerate(attrs):
                if attr.name in lookup["attr"]:
                    raise ValidationError(f"duplicate attribute name {attr.name!r}")
                lookup["attr"][attr.name] = (kind, pos)
                for k, item in enumerate(attr.domain):
                    if item in lookup["item"]:
                        raise ValidationError(
                            f"item {item!r} appears in more than one domain"
                        )
                    lookup["item"][item] = (kind, pos, k)
        object.__setattr__(self, "sv_attrs", sv_attrs)
        object.__setattr__(self, "mv_attrs", mv_attrs)
        object.__setattr__(self, "_lookup", lookup)

    @staticmethod
    def _make_attr(attr) -> Attribute:
        if isinstance(attr, Attribute):
            name, domain = attr.name, attr.domain
        else:
            name, domain = attr
        _check_name(name, "attribute name")
        domain = tuple(domain)
        if not domain:
            raise ValidationError(f"attribute {name!r} has an empty domain")
        for item in domain:
            _check_name(item, "item name")
        if len(set(domain)) != len(domain):
            raise ValidationError(f"attribute {name!r} lists an item twice")
        return Attribute(name, domain)

    @property
    def p(self) -> int:
        return len(self.sv_attrs)

    @property
    def q(self) -> int:
        return len(self.mv_attrs)

    @property
    def sv_sizes(self) -> tuple[int, ...]:
        return tuple(len(a.domain) for a in self.sv_attrs)

    @property
    def mv_sizes(self) -> tuple[int, ...]:
        return tuple(len(a.domain) for a in self.mv_attrs)

    @property
    def n_sv(self) -> int:
        return sum(self.sv_sizes)

    @property
    def n_mv(self) -> int:
        return sum(self.mv_sizes)

    @property
    def n(self) -> int:
        return self.n_sv + self.n_mv

    def attr_kind(self, name: str) -> tuple[str, int]:
        try:
            return self._lookup["attr"][name]
        except KeyError:
            raise SchemaMismatch(f"unknown attribute {name!r}") from None

    def sv_pos(self, name: str) -> int:
        kind, pos = self.attr_kind(name)
        if kind != "sv":
            raise SchemaMismatch(f"{name!r} is not a single-valued attribute")
        return pos

    def mv_pos(self, name: str) -> int:
        kind, pos = self.attr_kind(name)
        if kind != "mv":
            raise SchemaMismatch(f"{name!r} is not a multi-valued attribute")
        return pos

    def locate_item(self, item: str) -> tuple[str, int, int]:
        """Return ``(kind, attribute position, domain position)`` of an item."""
        try:
            return self._lookup["item"][item]
        except KeyError:
            raise SchemaMismatch(f"unknown item {item!r}") from None

    def sv_index(self, attr: int, item: str) -> int:
        kind, pos, k = self.locate_item(item)
        if kind != "sv" or pos != attr:
            raise SchemaMismatch(
                f"item {item!r} is not in the domain of {self.sv_attrs[attr].name!r}"
            )
        return k

    def mask_of(self, attr: int, items: Iterable[str]) -> int:
        mask = 0
        for item in items:
            kind, pos, k = self.locate_item(item)
            if kind != "mv" or pos != attr:
                raise SchemaMismatch(
                    f"item {item!r} is not in the domain of {self.mv_attrs[attr].name!r}"
                )
            mask |= 1 << k
        return mask

    def items_of(self, attr: int, mask: int) -> tuple[str, ...]:
        domain = self.mv_attrs[attr].domain
        return tuple(domain[k] for k in bits(mask))

    def transaction(self, sv: Sequence[str] | Mapping[str, str] = (), mv=()) -> "Transaction":
        """Build a transaction from item names.

        ``sv`` is either one item per SV attribute (in attribute order) or a
        mapping attribute name -> item.  ``mv`` is either one iterable of items
        per MV attribute or a mapping; MV attributes missing from a mapping
        get the empty itemset.
        """
        if isinstance(sv, Mapping):
            unknown = set(sv) - {a.name for a in self.sv_attrs}
            if unknown:
                raise SchemaMismatch(f"unknown SV attributes {sorted(unknown)}")
            try:
                sv = [sv[a.name] for a in self.sv_attrs]
            except KeyError as exc:
                raise SchemaMismatch(f"missing value for SV attribute {exc.args[0]!r}") from None
        if isinstance(mv, Mapping):
            unknown = set(mv) - {a.name for a in self.mv_attrs}
            if unknown:
                raise SchemaMismatch(f"unknown MV attributes {sorted(unknown)}")
            mv = [mv.get(a.name, ()) for a in self.mv_attrs]
        sv = list(sv)
        mv = list(mv) if mv else [()] * self.q
        if len(sv) != self.p or len(mv) != self.q:
            raise SchemaMismatch("transaction arity does not match the schema")
        return Transaction(
            self,
            tuple(self.sv_index(i, v) for i, v in enumerate(sv)),
            tuple(self.mask_of(i, items) for i, items in enumerate(mv)),
        )

    def iter_transactions(self) -> Iterator["Transaction"]:
        """All transactions of the schema in canonical order."""
        sv_ranges = [range(n) for n in self.sv_sizes]
        mv_ranges = [range(1 << n) for n in self.mv_sizes]
        for sv in itertools.product(*sv_ranges):
            for mv in itertools.product(*mv_ranges):
                yield Transaction(self, sv, mv, check=False)


class Transaction:
    """One SV item per SV attribute plus one itemset (bitmask) per MV attribute.

    Equality, hashing and ordering use only the components, never the schema
    reference; the order is lexicographic on ``(sv, mv)``.
    """

    __slots__ = ("schema", "sv", "mv", "_hash")

    def __init__(self, schema: Schema, sv: Sequence[int], mv: Sequence[int], *, check: bool = True):
        sv = tuple(sv)
        mv = tuple(mv)
        if check:
            if len(sv) != schema.p or len(mv) != schema.q:
                raise SchemaMismatch("transaction arity does not match the schema")
            for k, n in zip(sv, schema.sv_sizes):
                if not (_is_int(k) and 0 <= k < n):
                    raise SchemaMismatch(f"SV position {k!r} outside its domain")
            for m, n in zip(mv, schema.mv_sizes):
                if not (_is_int(m) and 0 <= m < (1 << n)):
                    raise SchemaMismatch(f"MV mask {m!r} outside its domain")
        self.schema = schema
        self.sv = sv
        self.mv = mv
        self._hash = hash((sv, mv))

    @property
    def key(self) -> tuple:
        return (self.sv, self.mv)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, Transaction):
            return NotImplemented
        return self.sv == other.sv and self.mv == other.mv

    def __lt__(self, other: "Transaction"):
        return (self.sv, self.mv) < (other.sv, other.mv)

    def __le__(self, other: "Transaction"):
        return (self.sv, self.mv) <= (other.sv, other.mv)

    def items(self) -> tuple[str, ...]:
        """Item names: SV values in attribute order, then MV items in canonical order."""
        s = self.schema
        out = [a.domain[k] for a, k in zip(s.sv_attrs, self.sv)]
        for i, m in enumerate(self.mv):
            out.extend(s.items_of(i, m))
        return tuple(out)

    def sv_value(self, attr: str) -> str:
        pos = self.schema.sv_pos(attr)
        return self.schema.sv_attrs[pos].domain[self.sv[pos]]

    def mv_items(self, attr: str) -> frozenset[str]:
        pos = self.schema.mv_pos(attr)
        return frozenset(self.schema.items_of(pos, self.mv[pos]))

    def __repr__(self):
        s = self.schema
        parts = [a.domain[k] for a, k in zip(s.sv_attrs, self.sv)]
        for i, m in enumerate(self.mv):
            parts.append("{" + ",".join(s.items_of(i, m)) + "}")
        return f"Transaction({' '.join(parts)})"


@dataclass(frozen=True)
class SVSelection:
    attr: str
    item: str


@dataclass(frozen=True)
class MVSelection:
    attr: str
    items: frozenset
    op: str = SUBSET

    def __post_init__(self):
        object.__setattr__(self, "items", frozenset(self.items))
        if self.op not in _OPS:
            raise ValidationError(f"MV selection operator must be one of {_OPS}, got {self.op!r}")


Selection = Union[SVSelection, MVSelection]


class SelectionList:
    """A non-empty conjunction of SV and MV selections over distinct attributes."""

    __slots__ = ("schema", "entries", "sv_tests", "mv_tests", "_key")

    def __init__(self, schema: Schema, entries: Iterable[Selection]):
        entries = tuple(entries)
        if not entries:
            raise ValidationError("a selection list must be non-empty")
        seen = set()
        sv_tests, mv_tests = [], []
        for e in entries:
            if e.attr in seen:
                raise ValidationError(f"attribute {e.attr!r} appears twice in a selection list")
            seen.add(e.attr)
            try:
                if isinstance(e, SVSelection):
                    pos = schema.sv_pos(e.attr)
                    sv_tests.append((pos, schema.sv_index(pos, e.item)))
                elif isinstance(e, MVSelection):
                    pos = schema.mv_pos(e.attr)
                    mv_tests.append((pos, schema.mask_of(pos, e.items), e.op == EQUAL))
                else:
                    raise ValidationError(f"not a selection: {e!r}")
            except SchemaMismatch as exc:
                raise ValidationError(str(exc)) from None
        self.schema = schema
        self.entries = entries
        self.sv_tests = tuple(sv_tests)
        self.mv_tests = tuple(mv_tests)
        self._key = (self.sv_tests, self.mv_tests)

    def matches(self, t: Transaction) -> bool:
        for pos, k in self.sv_tests:
            if t.sv[pos] != k:
                return False
        for pos, mask, eq in self.mv_tests:
            have = t.mv[pos]
            if eq:
                if have != mask:
                    return False
            elif mask & ~have:
                return False
        return True

    @property
    def is_full(self) -> bool:
        return len(self.entries) == self.schema.p + self.schema.q

    def describe(self) -> str:
        s = self.schema
        parts = []
        for e in self.entries:
            if isinstance(e, SVSelection):
                parts.append(f"({e.attr},{e.item})")
            else:
                pos = s.mv_pos(e.attr)
                items = ",".join(s.items_of(pos, s.mask_of(pos, e.items)))
                parts.append(f"({e.attr},{{{items}}},{e.op})")
        return "[" + ",".join(parts) + "]"

    def __eq__(self, other):
        if not isinstance(other, SelectionList):
            return NotImplemented
        return self._key == other._key and self.schema == other.schema

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"SelectionList({self.describe()})"


@dataclass(frozen=True)
class SupportConstraint:
    selection: SelectionList
    lo: int
    hi: int

    def __post_init__(self):
        if not (_is_int(self.lo) and _is_int(self.hi)):
            raise ValidationError("support bounds must be integers")
        if not 0 <= self.lo <= self.hi:
            raise ValidationError(
                f"support bounds must satisfy 0 <= lo <= hi, got {self.lo}, {self.hi}"
            )


@dataclass(frozen=True)
class DuplicateConstraint:
    selection: SelectionList
    cap: int

    def __post_init__(self):
        if not _is_int(self.cap) or self.cap <= 0:
            raise ValidationError(f"duplicate cap must be a positive integer, got {self.cap!r}")


@dataclass(frozen=True)
class ConstraintInstance:
    """A complete ms-IFM problem.  ``sigma_prime=None`` means no infrequency rows."""

    schema: Schema
    sv_constraints: tuple[SupportConstraint, ...]
    mv_constraints: tuple[SupportConstraint, ...]
    ms_constraints: tuple[SupportConstraint, ...]
    dup_constraints: tuple[DuplicateConstraint, ...]
    sigma_prime: int | None
    size: int

    def __post_init__(self):
        for name in ("sv_constraints", "mv_constraints", "ms_constraints", "dup_constraints"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        schema = self.schema
        for c in self.sv_constraints + self.mv_constraints + self.ms_constraints + self.dup_constraints:
            if c.selection.schema != schema:
                raise ValidationError("constraint defined over a different schema")

        seen = set()
        for c in self.sv_constraints:
            sel = c.selection
            if len(sel.entries) != 1 or not sel.sv_tests:
                raise ValidationError(
                    f"SV domain constraint must be a single SV selection: {sel.describe()}"
                )
            if sel.sv_tests[0] in seen:
                raise ValidationError(f"two SV domain constraints for {sel.describe()}")
            seen.add(sel.sv_tests[0])
        if len(seen) != schema.n_sv:
            raise ValidationError(
                f"expected one SV domain constraint per SV item ({schema.n_sv}), got {len(seen)}"
            )

        seen = set()
        for c in self.mv_constraints:
            sel = c.selection
            if len(sel.entries) != 1 or not sel.mv_tests or sel.mv_tests[0][2]:
                raise ValidationError(
                    f"MV domain constraint must be a single subset MV selection: {sel.describe()}"
                )
            pos, mask, _ = sel.mv_tests[0]
            if mask == 0:
                raise ValidationError("MV domain constraint itemset must be non-empty")
            if (pos, mask) in seen:
                raise ValidationError(f"two MV domain constraints for {sel.describe()}")
            seen.add((pos, mask))

        if self.sigma_prime is not None and not (_is_int(self.sigma_prime) and self.sigma_prime >= 0):
            raise ValidationError(f"sigma_prime must be a non-negative integer or None, got {self.sigma_prime!r}")
        if not _is_int(self.size) or self.size <= 0:
            raise ValidationError(f"size must be a positive integer, got {self.size!r}")

    def frequent_itemsets(self, attr: int) -> tuple[int, ...]:
        """The frequent itemsets of MV attribute ``attr`` as canonical-sorted masks."""
        masks = {
            c.selection.mv_tests[0][1]
            for c in self.mv_constraints
            if c.selection.mv_tests[0][0] == attr
        }
        return tuple(sorted(masks))


class Dataset(Mapping):
    """A succinct dataset: distinct transactions with positive duplicate counts."""

    __slots__ = ("_counts",)

    def __init__(self, entries: Mapping | Iterable = ()):
        pairs = entries.items() if isinstance(entries, Mapping) else entries
        counts: dict[Transaction, Count] = {}
        for t, c in pairs:
            if t in counts:
                raise ValidationError(f"duplicate transaction {t!r} in dataset")
            if isinstance(c, float):
                c = Fraction(c)
            if not (_is_int(c) or isinstance(c, Fraction)) or c <= 0:
                raise ValidationError(f"dataset counts must be positive, got {c!r} for {t!r}")
            counts[t] = c
        self._counts = dict(sorted(counts.items(), key=lambda kv: kv[0].key))

    @classmethod
    def from_values(cls, values: Iterable) -> "Dataset":
        """Build from ``(transaction, count)`` pairs, dropping zero counts."""
        return cls((t, c) for t, c in values if c != 0)

    def __getitem__(self, t):
        return self._counts[t]

    def __iter__(self):
        return iter(self._counts)

    def __len__(self):
        return len(self._counts)

    @property
    def size(self) -> Count:
        return sum(self._counts.values(), 0)

    @property
    def is_integral(self) -> bool:
        return all(_is_int(c) or c.denominator == 1 for c in self._counts.values())

    def __eq__(self, other):
        if isinstance(other, Dataset):
            return self._counts == other._counts
        return NotImplemented

    def __repr__(self):
        body = ", ".join(f"{t!r}: {c}" for t, c in self._counts.items())
        return f"Dataset({{{body}}})"


def _same_schema(a: Schema, b: Schema):
    if a is not b and a != b:
        raise SchemaMismatch("objects are defined over different schemas")


def eval_selection(L: SelectionList, I: Transaction) -> bool:
    """Truth of the selection list on a transaction."""
    _same_schema(L.schema, I.schema)
    return L.matches(I)


def support(D: Dataset, L: SelectionList) -> Count:
    total = 0
    for t, c in D.items():
        _same_schema(L.schema, t.schema)
        if L.matches(t):
            total += c
    return total


def duplicate_cap(dups: Iterable[DuplicateConstraint], I: Transaction) -> int | None:
    """Tightest duplicate cap among the constraints matching ``I``; None if none match."""
    cap = None
    for d in dups:
        if d.selection.matches(I) and (cap is None or d.cap < cap):
            cap = d.cap
    return cap


def count_transactions(schema: Schema) -> int:
    return (1 << schema.n_mv) * math.prod(schema.sv_sizes)


CONDITION_NAMES = {
    1: "sv-domain",
    2: "mv-domain",
    3: "infrequency",
    4: "many-sorted",
    5: "duplicate",
    6: "size",
}


@dataclass(frozen=True)
class Violation:
    condition: int
    label: str
    value: Count
    lo: Count | None
    hi: Count | None

    def __str__(self):
        lo = "-" if self.lo is None else self.lo
        hi = "-" if self.hi is None else self.hi
        return f"({self.condition}) {CONDITION_NAMES[self.condition]} {self.label}: value {self.value} not in [{lo}, {hi}]"


@dataclass(frozen=True)
class ViolationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self):
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def conditions(self) -> set[int]:
        return {v.condition for v in self.violations}


def verify(D: Dataset, inst: ConstraintInstance, border: Sequence[Sequence[int]]) -> ViolationReport:
    """Check conditions (1)-(6) of the problem definition on ``D``.

    ``border[i]`` holds the minimal infrequent itemsets (masks) of MV
    attribute ``i``.  Counts may be rational (relaxed check) or integer.
    """
    schema = inst.schema
    for t in D:
        _same_schema(schema, t.schema)
    if len(border) != schema.q:
        raise SchemaMismatch(f"border has {len(border)} attributes, schema has {schema.q}")
    out: list[Violation] = []

    def check_range(cond, c: SupportConstraint):
        value = support(D, c.selection)
        if not c.lo <= value <= c.hi:
            out.append(Violation(cond, c.selection.describe(), value, c.lo, c.hi))

    for c in inst.sv_constraints:
        check_range(1, c)
    for c in inst.mv_constraints:
        check_range(2, c)
    if inst.sigma_prime is not None:
        for i, members in enumerate(border):
            attr = schema.mv_attrs[i]
            for mask in members:
                value = sum((cnt for t, cnt in D.items() if mask & ~t.mv[i] == 0), 0)
                if value > inst.sigma_prime:
                    items = ",".join(schema.items_of(i, mask))
                    out.append(Violation(3, f"[({attr.name},{{{items}}},subset)]", value, 0, inst.sigma_prime))
    for c in inst.ms_constraints:
        check_range(4, c)
    for t, cnt in D.items():
        cap = duplicate_cap(inst.dup_constraints, t)
        if cap is not None and cnt > cap:
            out.append(Violation(5, repr(t), cnt, None, cap))
    if D.size != inst.size:
        out.append(Violation(6, "|D|", D.size, inst.size, inst.size))
    return ViolationReport(tuple(out))
