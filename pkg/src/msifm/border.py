"""Minimal infrequent itemsets (negative border) of each MV domain.

An itemset is *covered* when it is a subset of some frequent itemset.  The
border is the antichain of minimal non-empty uncovered itemsets.  It is built
level by level: a size-``k+1`` candidate is examined only when all of its
size-``k`` subsets are covered, so every uncovered candidate is minimal and
members are emitted without later retraction.  That is what lets the cap
stop enumeration early.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import BorderTooLarge, ValidationError
from .model import ConstraintInstance, bits

DEFAULT_BORDER_CAP = 10_000


@dataclass(frozen=True)
class Border:
    """Per MV attribute, the canonical-sorted border members as bitmasks."""

    members: tuple[tuple[int, ...], ...]

    def __getitem__(self, attr: int) -> tuple[int, ...]:
        return self.members[attr]

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def total(self) -> int:
        return sum(len(m) for m in self.members)


def _iter_border(n_items: int, frequent: Sequence[int]) -> Iterator[int]:
    # When nothing is frequent, the empty set is the only covered set.
    frequent = [f for f in set(frequent)]
    full = (1 << n_items) - 1
    for f in frequent:
        if f & ~full or f == 0:
            raise ValidationError(f"frequent itemset mask {f:#x} is empty or outside the domain")

    def covered(x: int) -> bool:
        for f in frequent:
            if x & ~f == 0:
                return True
        return False

    level = []
    for k in range(n_items):
        single = 1 << k
        if covered(single):
            level.append(single)
        else:
            yield single
    while level:
        level_set = set(level)
        nxt = []
        for x in level:
            top = x.bit_length()
            for k in range(top, n_items):
                cand = x | (1 << k)
                # every subset obtained by dropping one item must be covered
                if all((cand ^ (1 << b)) in level_set for b in bits(x)):
                    if covered(cand):
                        nxt.append(cand)
                    else:
                        yield cand
        level = nxt


def minimal_infrequent(n_items: int, frequent: Iterable[int], cap: int | None = None,
                       attr: str | None = None) -> list[int]:
    """Border over a domain of ``n_items`` items, itemsets given as bitmasks."""
    out = []
    for member in _iter_border(n_items, list(frequent)):
        out.append(member)
        if cap is not None and len(out) > cap:
            raise BorderTooLarge(cap, attr)
    return sorted(out)


def negative_border(domain: Sequence[str], S: Iterable[Iterable[str]],
                    cap: int | None = DEFAULT_BORDER_CAP, attr: str | None = None) -> list[frozenset]:
    """Border of the frequent itemsets ``S`` over the ordered item list ``domain``.

    >>> negative_border(["g1", "g2", "g3"], [{"g1", "g2"}, {"g2", "g3"}])
    [frozenset({'g1', 'g3'})]
    """
    index = {item: k for k, item in enumerate(domain)}
    masks = []
    for itemset in S:
        mask = 0
        for item in itemset:
            if item not in index:
                raise ValidationError(f"item {item!r} is not in the domain")
            mask |= 1 << index[item]
        masks.append(mask)
    members = minimal_infrequent(len(domain), masks, cap, attr)
    return [frozenset(domain[k] for k in bits(m)) for m in members]


def size_guard(domain: Sequence[str], S: Iterable[Iterable[str]], cap: int,
               attr: str | None = None) -> bool:
    """True when the border has at most ``cap`` members; raises BorderTooLarge otherwise.

    Stops after materializing ``cap + 1`` members.
    """
    negative_border(domain, S, cap, attr)
    return True


def compute_border(inst: ConstraintInstance, cap: int | None = DEFAULT_BORDER_CAP) -> Border:
    schema = inst.schema
    members = []
    for i, attr in enumerate(schema.mv_attrs):
        members.append(tuple(minimal_infrequent(len(attr.domain), inst.frequent_itemsets(i), cap, attr.name)))
    return Border(tuple(members))
