"""Dataset container plus delimited-file ingestion and export.

File schemas (comma-delimited, UTF-8, LF line endings):

* politicians: ``id,name,gender,birth_year,party_join_year,home_city,home_province,retirement_year``
  (gender M/F, empty retirement_year means still serving)
* spells: ``politician_id,start,end,province,municipality,organization,rank``
  (dates ``YYYY-MM``)
* promotions: ``promotee_id,promoter1_id,promoter2_id,date,from_rank,to_rank``
  (promoter2_id may be empty)
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicateId, IntegrityError, NoSpells, ParseError
from .model import (
    Gender,
    JobSpell,
    Politician,
    PromotionEvent,
    YearMonth,
    canonical_rank,
    final_rank,
)

logger = logging.getLogger(__name__)

POLITICIAN_HEADER = [
    "id", "name", "gender", "birth_year", "party_join_year",
    "home_city", "home_province", "retirement_year",
]
SPELL_HEADER = [
    "politician_id", "start", "end", "province", "municipality", "organization", "rank",
]
PROMOTION_HEADER = [
    "promotee_id", "promoter1_id", "promoter2_id", "date", "from_rank", "to_rank",
]

#: minimum plausible gap between birth and party entry
MIN_JOIN_AGE = 14

DEFAULT_END_YEAR = 2015


@dataclass
class Dataset:
    """A validated set of politicians, job spells, and promotion events."""

    politicians: dict[int, Politician]
    spells: list[JobSpell]
    promotions: list[PromotionEvent]
    end_year: int = DEFAULT_END_YEAR
    _spell_index: dict[int, list[JobSpell]] = field(
        default=None, repr=False, compare=False
    )

    def validate(self) -> None:
        """Enforce referential integrity and cross-record invariants."""
        city_province: dict[str, str] = {}
        for p in self.politicians.values():
            if p.party_join_year < p.birth_year + MIN_JOIN_AGE:
                raise IntegrityError(
                    "join_before_adulthood", p.id,
                    f"party_join_year {p.party_join_year} < birth_year {p.birth_year} + {MIN_JOIN_AGE}",
                )
            seen = city_province.setdefault(p.home_city, p.home_province)
            if seen != p.home_province:
                raise IntegrityError(
                    "city_in_two_provinces", p.home_city,
                    f"{seen!r} vs {p.home_province!r}",
                )
        for s in self.spells:
            if s.politician_id not in self.politicians:
                raise IntegrityError("spell_unknown_politician", s.politician_id)
        for ev in self.promotions:
            if ev.promotee not in self.politicians:
                raise IntegrityError("promotion_unknown_promotee", ev.promotee)
            for promoter in ev.promoters:
                if promoter not in self.politicians:
                    raise IntegrityError("promotion_unknown_promoter", promoter)

    def spells_of(self, pid: int) -> list[JobSpell]:
        if self._spell_index is None:
            index: dict[int, list[JobSpell]] = {}
            for s in self.spells:
                index.setdefault(s.politician_id, []).append(s)
            self._spell_index = index
        return self._spell_index.get(pid, [])

    def final_ranks(self) -> dict[int, int]:
        """Final rank per politician; politicians without spells are omitted."""
        out: dict[int, int] = {}
        for pid in sorted(self.politicians):
            try:
                out[pid] = final_rank(self.politicians[pid], self.spells_of(pid), self.end_year)
            except NoSpells:
                continue
        return out

    def provinces(self) -> set[str]:
        home = {p.home_province for p in self.politicians.values()}
        return home | {s.province for s in self.spells}

    def cities(self) -> set[str]:
        home = {p.home_city for p in self.politicians.values()}
        return home | {s.municipality for s in self.spells}


@dataclass(frozen=True)
class DatasetSummary:
    politicians: int
    provinces: int
    cities: int
    spell_rows: int
    promotions: int

    def as_rows(self) -> list[tuple[str, int]]:
        return [
            ("politicians", self.politicians),
            ("provinces", self.provinces),
            ("cities", self.cities),
            ("spell_rows", self.spell_rows),
            ("promotions", self.promotions),
        ]


def summarize(ds: Dataset) -> DatasetSummary:
    """Exact counts table; spell rows are counted as stored (one per row)."""
    return DatasetSummary(
        politicians=len(ds.politicians),
        provinces=len(ds.provinces()),
        cities=len(ds.cities()),
        spell_rows=len(ds.spells),
        promotions=len(ds.promotions),
    )


def canonical_spell_order(s: JobSpell):
    return (s.politician_id, s.start.index, s.end.index, s.province, s.municipality,
            s.organization, s.rank)


def canonical_promotion_order(ev: PromotionEvent):
    return (ev.date.index, ev.promotee, ev.promoters)


def _read_rows(path: Path, header: list[str]):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise ParseError(str(path), 1, header[0], "empty file") from None
        if first != header:
            raise ParseError(str(path), 1, first[0] if first else "", f"expected header {','.join(header)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(str(path), lineno, "", f"expected {len(header)} fields, got {len(row)}")
            yield lineno, dict(zip(header, row))


def _convert(path, lineno, column, raw, conv):
    try:
        return conv(raw)
    except (ValueError, KeyError) as exc:
        raise ParseError(str(path), lineno, column, f"{raw!r}: {exc}") from None


def load_dataset(
    politician_file: str | Path,
    spell_file: str | Path,
    promotion_file: str | Path,
    end_year: int = DEFAULT_END_YEAR,
) -> Dataset:
    """Load and fully validate a dataset from the three schema files."""
    politician_file = Path(politician_file)
    spell_file = Path(spell_file)
    promotion_file = Path(promotion_file)

    politicians: dict[int, Politician] = {}
    for lineno, row in _read_rows(politician_file, POLITICIAN_HEADER):
        pid = _convert(politician_file, lineno, "id", row["id"], int)
        if pid < 0:
            raise ParseError(str(politician_file), lineno, "id", f"negative id {pid}")
        if pid in politicians:
            raise DuplicateId(f"politician id {pid} appears twice")
        gender = _convert(politician_file, lineno, "gender", row["gender"], Gender)
        retirement = row["retirement_year"].strip()
        politicians[pid] = Politician(
            id=pid,
            name=row["name"],
            gender=gender,
            birth_year=_convert(politician_file, lineno, "birth_year", row["birth_year"], int),
            party_join_year=_convert(
                politician_file, lineno, "party_join_year", row["party_join_year"], int
            ),
            home_city=row["home_city"],
            home_province=row["home_province"],
            retirement_year=int(retirement) if retirement else None,
        )

    spells: list[JobSpell] = []
    for lineno, row in _read_rows(spell_file, SPELL_HEADER):
        pid = _convert(spell_file, lineno, "politician_id", row["politician_id"], int)
        start = _convert(spell_file, lineno, "start", row["start"], YearMonth.parse)
        end = _convert(spell_file, lineno, "end", row["end"], YearMonth.parse)
        rank = canonical_rank(_convert(spell_file, lineno, "rank", row["rank"], int))
        try:
            spell = JobSpell(
                politician_id=pid,
                start=start,
                end=end,
                province=row["province"],
                municipality=row["municipality"],
                organization=row["organization"],
                rank=rank,
            )
        except ValueError as exc:
            raise IntegrityError("bad_spell", pid, str(exc)) from None
        spells.append(spell)

    promotions: list[PromotionEvent] = []
    for lineno, row in _read_rows(promotion_file, PROMOTION_HEADER):
        promotee = _convert(promotion_file, lineno, "promotee_id", row["promotee_id"], int)
        promoters = [_convert(promotion_file, lineno, "promoter1_id", row["promoter1_id"], int)]
        second = row["promoter2_id"].strip()
        if second:
            promoters.append(_convert(promotion_file, lineno, "promoter2_id", second, int))
        date = _convert(promotion_file, lineno, "date", row["date"], YearMonth.parse)
        from_rank = canonical_rank(_convert(promotion_file, lineno, "from_rank", row["from_rank"], int))
        to_rank = canonical_rank(_convert(promotion_file, lineno, "to_rank", row["to_rank"], int))
        if (from_rank, to_rank) != (4, 5):
            raise IntegrityError(
                "promotion_ranks", promotee, f"{from_rank}->{to_rank}; only 4->5 is modeled"
            )
        try:
            ev = PromotionEvent(promotee=promotee, promoters=tuple(promoters), date=date)
        except ValueError as exc:
            raise IntegrityError("bad_promotion", promotee, str(exc)) from None
        promotions.append(ev)

    spells.sort(key=canonical_spell_order)
    promotions.sort(key=canonical_promotion_order)
    ds = Dataset(
        politicians=dict(sorted(politicians.items())),
        spells=spells,
        promotions=promotions,
        end_year=end_year,
    )
    ds.validate()
    logger.info(
        "loaded %d politicians, %d spells, %d promotions",
        len(ds.politicians), len(ds.spells), len(ds.promotions),
    )
    return ds


def write_dataset(
    ds: Dataset,
    politician_file: str | Path,
    spell_file: str | Path,
    promotion_file: str | Path,
) -> None:
    """Write a dataset back out in the exact ingestion schema (canonical order)."""
    with open(politician_file, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(POLITICIAN_HEADER)
        for pid in sorted(ds.politicians):
            p = ds.politicians[pid]
            writer.writerow([
                p.id, p.name, p.gender.value, p.birth_year, p.party_join_year,
                p.home_city, p.home_province,
                "" if p.retirement_year is None else p.retirement_year,
            ])
    with open(spell_file, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SPELL_HEADER)
        for s in sorted(ds.spells, key=canonical_spell_order):
            writer.writerow([
                s.politician_id, str(s.start), str(s.end), s.province,
                s.municipality, s.organization, s.rank,
            ])
    with open(promotion_file, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PROMOTION_HEADER)
        for ev in sorted(ds.promotions, key=canonical_promotion_order):
            writer.writerow([
                ev.promotee,
                ev.promoters[0],
                ev.promoters[1] if len(ev.promoters) > 1 else "",
                str(ev.date), ev.from_rank, ev.to_rank,
            ])
