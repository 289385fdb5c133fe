"""Ranked result lists and their provenance.

A RankedList is the unit every similarity metric operates on: the ordered,
duplicate-free sequence of normalized result URLs one agent collected for
one query in one session. Index 0 is rank 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

from .errors import InvalidInputError


class ListOrigin(NamedTuple):
    """Identity of the session that produced a ranked list."""

    agent_id: str
    engine_id: str
    browser_id: str
    query_id: str
    session_index: int


@dataclass(frozen=True)
class RankedList:
    """Ordered, duplicate-free list of normalized URLs.

    Order is significant. Construction rejects duplicates rather than
    silently dropping them; deduplication is the parser's job.
    """

    items: tuple[str, ...]
    origin: ListOrigin | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        if len(set(self.items)) != len(self.items):
            seen: set[str] = set()
            dupes = [u for u in self.items if u in seen or seen.add(u)]
            raise InvalidInputError(f"ranked list contains duplicates: {dupes[:3]}")

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[str]:
        return iter(self.items)

    def top(self, k: int) -> tuple[str, ...]:
        """First min(k, len) items."""
        return self.items[:k]


def ranking_items(ranking: RankedList | Sequence[str]) -> tuple[str, ...]:
    """Accept a RankedList or any plain sequence of URL strings."""
    if isinstance(ranking, RankedList):
        return ranking.items
    return tuple(ranking)
