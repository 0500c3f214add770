from __future__ import annotations

import pytest

from patronage.dataset import Dataset, canonical_promotion_order, canonical_spell_order
from patronage.model import Gender, JobSpell, Politician, PromotionEvent, YearMonth


def mk_pol(pid, city="c0", prov="p0", gender="M", birth=1950, join=1975, retire=None,
           name=None):
    return Politician(
        id=pid, name=name or f"pol{pid}", gender=Gender(gender), birth_year=birth,
        party_join_year=join, home_city=city, home_province=prov,
        retirement_year=retire,
    )


def mk_spell(pid, start, end, city="c0", prov="p0", org="o0", rank=3):
    return JobSpell(
        politician_id=pid, start=YearMonth.parse(start), end=YearMonth.parse(end),
        province=prov, municipality=city, organization=org, rank=rank,
    )


def mk_promo(promotee, promoters, date="2005-06"):
    return PromotionEvent(promotee=promotee, promoters=tuple(promoters),
                          date=YearMonth.parse(date))


def mk_ds(politicians, spells=(), promotions=(), end_year=2015) -> Dataset:
    ds = Dataset(
        politicians={p.id: p for p in politicians},
        spells=sorted(spells, key=canonical_spell_order),
        promotions=sorted(promotions, key=canonical_promotion_order),
        end_year=end_year,
    )
    ds.validate()
    return ds


@pytest.fixture
def three_politicians_same_city():
    pols = [mk_pol(i, city="c0", prov="p0") for i in range(3)]
    spells = [mk_spell(i, "2000-01", "2005-12", rank=3) for i in range(3)]
    return mk_ds(pols, spells)
