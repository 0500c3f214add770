"""Core domain types: politicians, job spells, promotion events, and the
0-9 cadre rank scale.

All types are immutable after construction and safe to share freely.
Dates are year-month pairs; month intervals are inclusive on both ends.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import NoSpells

logger = logging.getLogger(__name__)

RANK_MIN = 0
RANK_MAX = 9
#: "high rank" means strictly above this level
HIGH_RANK_LEVEL = 7


def canonical_rank(level: int) -> int:
    """Map an input rank onto the canonical 0-9 scale.

    Levels above 9 clamp to 9 with a warning; negative levels are invalid.
    """
    level = int(level)
    if level < RANK_MIN:
        raise ValueError(f"rank level {level} is negative")
    if level > RANK_MAX:
        logger.warning("rank level %d above %d; clamping", level, RANK_MAX)
        return RANK_MAX
    return level


def is_high_rank(level: int) -> bool:
    return level > HIGH_RANK_LEVEL


class Gender(str, Enum):
    MALE = "M"
    FEMALE = "F"


@dataclass(frozen=True, order=True)
class YearMonth:
    """A calendar month.  Ordering and arithmetic run on a linear month index."""

    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValueError(f"month {self.month} out of range 1-12")

    @property
    def index(self) -> int:
        return self.year * 12 + self.month - 1

    @classmethod
    def from_index(cls, index: int) -> "YearMonth":
        return cls(index // 12, index % 12 + 1)

    @classmethod
    def parse(cls, text: str) -> "YearMonth":
        """Parse 'YYYY-MM'."""
        year, sep, month = text.strip().partition("-")
        if not sep:
            raise ValueError(f"expected YYYY-MM, got {text!r}")
        return cls(int(year), int(month))

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


@dataclass(frozen=True)
class Politician:
    id: int
    name: str
    gender: Gender
    birth_year: int
    party_join_year: int
    home_city: str
    home_province: str
    retirement_year: int | None = None


@dataclass(frozen=True)
class JobSpell:
    """One job assignment: where, for which organization, at what rank.

    Spells for the same politician may overlap in time (concurrent posts
    are allowed).
    """

    politician_id: int
    start: YearMonth
    end: YearMonth
    province: str
    municipality: str
    organization: str
    rank: int

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError(f"spell ends {self.end} before it starts {self.start}")
        if not RANK_MIN <= self.rank <= RANK_MAX:
            raise ValueError(f"rank {self.rank} outside {RANK_MIN}-{RANK_MAX}")

    @property
    def months(self) -> int:
        return self.end.index - self.start.index + 1


@dataclass(frozen=True)
class PromotionEvent:
    """A recorded rank-4-to-5 promotion with its one or two promoters."""

    promotee: int
    promoters: tuple[int, ...]
    date: YearMonth
    from_rank: int = 4
    to_rank: int = 5

    def __post_init__(self):
        if not 1 <= len(self.promoters) <= 2:
            raise ValueError(f"{len(self.promoters)} promoters; must be 1 or 2")
        if self.promotee in self.promoters:
            raise ValueError(f"promotee {self.promotee} listed among its promoters")
        if len(set(self.promoters)) != len(self.promoters):
            raise ValueError("duplicate promoter")


def overlap_months(a: JobSpell, b: JobSpell) -> int:
    """Number of calendar months two spells share in the same municipality.

    Zero if the spells are disjoint in time or sit in different
    (province, municipality) pairs.
    """
    if a.province != b.province or a.municipality != b.municipality:
        return 0
    lo = max(a.start.index, b.start.index)
    hi = min(a.end.index, b.end.index)
    return max(0, hi - lo + 1)


def final_rank(p: Politician, spells: Sequence[JobSpell], end_year: int) -> int:
    """Rank held at min(end_year, retirement year).

    A spell counts as active at the cutoff year when that year falls inside
    its interval.  Concurrent active spells resolve to the maximum rank;
    when no spell is active, the latest-ending spell decides.
    """
    mine = [s for s in spells if s.politician_id == p.id]
    if not mine:
        raise NoSpells(f"politician {p.id} has no job spells")
    cutoff = end_year if p.retirement_year is None else min(end_year, p.retirement_year)
    active = [s for s in mine if s.start.year <= cutoff <= s.end.year]
    if active:
        return max(s.rank for s in active)
    last = max(mine, key=lambda s: (s.end.index, s.rank))
    return last.rank
