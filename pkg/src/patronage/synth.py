"""Synthetic career-record generator with a plantable patronage effect.

Careers are ladders over ranks 0-9.  Each politician walks through a
sequence of city stints and faces one promotion draw per career year; the
draw probability is a declining base rate, raised by
``planted_patronage_strength * PATRON_BONUS_SCALE`` whenever the politician
currently shares at least six cumulative co-location months with a
higher-ranked colleague.  Promotions from rank 4 to 5 record one or two
promoters: the senior co-located colleagues with the longest overlap.

Everything is deterministic in the seed: per-politician streams drive
demographics, stints, and promotion draws, and all draws run on integers
(probabilities are quantized to parts-per-million), so identical seeds give
byte-identical datasets across platforms.
"""

from __future__ import annotations

import itertools
import logging
from bisect import bisect_right, insort
from dataclasses import dataclass
from random import Random

from .dataset import (
    DEFAULT_END_YEAR,
    Dataset,
    canonical_promotion_order,
    canonical_spell_order,
)
from .errors import ConfigError
from .model import Gender, JobSpell, Politician, PromotionEvent, YearMonth

logger = logging.getLogger(__name__)

PPM = 1_000_000

BIRTH_YEARS = (1945, 1975)
JOIN_AGES = (20, 28)
RETIRE_AGE = 65
STINT_MONTHS = (24, 72)
DEPTS_PER_CITY = 3

#: city-size skew: weight of city i is proportional to 1/(i + CITY_SKEW)
CITY_SKEW = 8
HOME_FIRST_PPM = 600_000     # first stint in the home city
STAY_PPM = 400_000           # keep the current city at a stint boundary
HOME_PROVINCE_PPM = 250_000  # else move within the home province
HOMEBODY_PPM = 100_000       # career spent entirely in the home city
DRIFTER_PPM = 50_000         # career spent in short rotating postings
DRIFTER_STINT_MONTHS = (1, 3)
DRIFTER_GAP_MONTHS = (3, 6)  # unrecorded assignments between postings

#: base yearly promotion probability by current rank (rank 9 is terminal)
BASE_PROMOTION = (0.09, 0.085, 0.08, 0.075, 0.07, 0.06, 0.05, 0.04, 0.03, 0.0)
#: a full-strength patron adds PATRON_BONUS_SCALE to the yearly probability
PATRON_BONUS_SCALE = 0.20
PATRON_MIN_MONTHS = 6
DECISION_INTERVAL = 12
MAX_PROMOTION_PPM = 950_000


@dataclass(frozen=True)
class SynthConfig:
    n_politicians: int
    n_provinces: int = 16
    n_cities: int = 160
    seed: int = 0
    planted_patronage_strength: float = 0.5
    female_fraction: float = 0.12

    def validate(self) -> None:
        if self.n_politicians <= 0:
            raise ConfigError(f"n_politicians must be positive, got {self.n_politicians}")
        if self.n_provinces <= 0:
            raise ConfigError(f"n_provinces must be positive, got {self.n_provinces}")
        if self.n_cities < self.n_provinces:
            raise ConfigError(
                f"n_cities ({self.n_cities}) must be >= n_provinces ({self.n_provinces})"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if not 0.0 <= self.planted_patronage_strength <= 1.0:
            raise ConfigError(
                f"planted_patronage_strength must lie in [0,1], got {self.planted_patronage_strength}"
            )
        if not 0.0 <= self.female_fraction <= 1.0:
            raise ConfigError(f"female_fraction must lie in [0,1], got {self.female_fraction}")


class _SkewedPicker:
    """Integer-weight categorical sampler (weight of item i ~ 1/(i + skew))."""

    def __init__(self, n: int, skew: int = CITY_SKEW):
        weights = [PPM // (i + skew) for i in range(n)]
        self.cum = list(itertools.accumulate(weights))
        self.total = self.cum[-1]

    def pick(self, rng: Random) -> int:
        return bisect_right(self.cum, rng.randrange(self.total))


def _ppm(p: float) -> int:
    return min(PPM, max(0, round(p * PPM)))


def _draw(rng: Random, p_ppm: int) -> bool:
    return rng.randrange(PPM) < p_ppm


@dataclass
class _Career:
    pid: int
    start: int                      # career start, month index
    end: int                        # career end, month index (inclusive)
    stints: list[tuple[int, int, int]]  # (city, lo, hi)
    history: list[tuple[int, int]]  # (month, rank), ascending


def _rank_at(history: list[tuple[int, int]], month: int) -> int:
    idx = bisect_right(history, (month, 10**9)) - 1
    return history[idx][1] if idx >= 0 else 0


def _avg_rank_over(history, intervals, cutoff: int) -> tuple[float, int]:
    """Time-weighted average rank over the clipped intervals; returns (avg, months)."""
    total = 0
    months = 0
    for lo, hi in intervals:
        hi = min(hi, cutoff)
        cur = lo
        while cur <= hi:
            idx = bisect_right(history, (cur, 10**9)) - 1
            if idx < 0:
                idx = 0
            rank = history[idx][1]
            seg_hi = history[idx + 1][0] - 1 if idx + 1 < len(history) else hi
            seg_hi = min(seg_hi, hi)
            total += rank * (seg_hi - cur + 1)
            months += seg_hi - cur + 1
            cur = seg_hi + 1
    return (total / months if months else 0.0), months


def generate_synthetic(cfg: SynthConfig, end_year: int = DEFAULT_END_YEAR) -> Dataset:
    """Generate a deterministic-in-seed dataset under the given config."""
    cfg.validate()
    city_picker = _SkewedPicker(cfg.n_cities)
    city_province = [i % cfg.n_provinces for i in range(cfg.n_cities)]
    end_index = YearMonth(end_year, 12).index
    female_ppm = _ppm(cfg.female_fraction)

    politicians: dict[int, Politician] = {}
    careers: dict[int, _Career] = {}
    for pid in range(cfg.n_politicians):
        rng = Random(f"{cfg.seed}/pol/{pid}")
        birth = rng.randint(*BIRTH_YEARS)
        join = birth + rng.randint(*JOIN_AGES)
        retire_year = birth + RETIRE_AGE
        retirement = retire_year if retire_year <= end_year else None
        home_city = city_picker.pick(rng)
        politicians[pid] = Politician(
            id=pid,
            name=f"P{pid:05d}",
            gender=Gender.FEMALE if _draw(rng, female_ppm) else Gender.MALE,
            birth_year=birth,
            party_join_year=join,
            home_city=f"city{home_city:03d}",
            home_province=f"prov{city_province[home_city]:02d}",
            retirement_year=retirement,
        )
        start = YearMonth(join, rng.randint(1, 12)).index
        career_end = min(end_index, YearMonth(retirement or end_year, 12).index)

        stints: list[tuple[int, int, int]] = []
        archetype = rng.randrange(PPM)
        if archetype < HOMEBODY_PPM:
            stints.append((home_city, start, career_end))
        elif archetype < HOMEBODY_PPM + DRIFTER_PPM:
            # short rotating postings drawn without replacement: cumulative
            # co-location with any one colleague stays below the patronage
            # threshold, leaving a structurally unconnected control group
            deck: list[int] = []
            cur = start
            while cur <= career_end:
                if not deck:
                    deck = list(range(cfg.n_cities))
                    rng.shuffle(deck)
                hi = min(cur + rng.randint(*DRIFTER_STINT_MONTHS) - 1, career_end)
                stints.append((deck.pop(), cur, hi))
                cur = hi + 1 + rng.randint(*DRIFTER_GAP_MONTHS)
        else:
            cur = start
            city = home_city if _draw(rng, HOME_FIRST_PPM) else city_picker.pick(rng)
            home_prov_cities = [c for c in range(cfg.n_cities)
                                if city_province[c] == city_province[home_city]]
            while cur <= career_end:
                hi = min(cur + rng.randint(*STINT_MONTHS) - 1, career_end)
                stints.append((city, cur, hi))
                cur = hi + 1
                move = rng.randrange(PPM)
                if move < STAY_PPM:
                    pass
                elif move < STAY_PPM + HOME_PROVINCE_PPM:
                    city = home_prov_cities[rng.randrange(len(home_prov_cities))]
                else:
                    city = city_picker.pick(rng)
        careers[pid] = _Career(pid=pid, start=start, end=career_end, stints=stints,
                               history=[(start, 0)])

    # co-location intervals from a per-city sweep over stints
    stints_by_city: dict[int, list[tuple[int, int, int]]] = {}
    for car in careers.values():
        for city, lo, hi in car.stints:
            stints_by_city.setdefault(city, []).append((lo, hi, car.pid))
    pair_intervals: dict[tuple[int, int], list[tuple[int, int]]] = {}
    by_pid: dict[int, list[tuple[int, int, int]]] = {pid: [] for pid in careers}
    for city in sorted(stints_by_city):
        entries = sorted(stints_by_city[city])
        active: list[tuple[int, int, int]] = []  # (hi, lo, pid)
        for lo, hi, pid in entries:
            active = [a for a in active if a[0] >= lo]
            for ahi, alo, apid in active:
                if apid == pid:
                    continue
                olo, ohi = max(lo, alo), min(hi, ahi)
                key = (pid, apid) if pid < apid else (apid, pid)
                pair_intervals.setdefault(key, []).append((olo, ohi))
                by_pid[pid].append((olo, ohi, apid))
                by_pid[apid].append((olo, ohi, pid))
            insort(active, (hi, lo, pid))
    for intervals in pair_intervals.values():
        intervals.sort()
    for intervals in by_pid.values():
        intervals.sort()

    # promotion draws in global (month, pid) order so patron checks see
    # colleagues' current ranks
    decisions = sorted(
        (month, pid)
        for pid, car in careers.items()
        for month in range(car.start + DECISION_INTERVAL, car.end + 1, DECISION_INTERVAL)
    )
    rank: dict[int, int] = {pid: 0 for pid in careers}
    career_rng = {pid: Random(f"{cfg.seed}/career/{pid}") for pid in careers}
    ptr: dict[int, int] = {pid: 0 for pid in careers}
    open_iv: dict[int, list[tuple[int, int, int]]] = {pid: [] for pid in careers}
    done_months: dict[int, dict[int, int]] = {pid: {} for pid in careers}
    bonus_ppm = _ppm(cfg.planted_patronage_strength * PATRON_BONUS_SCALE)
    rank5_month: dict[int, int] = {}

    for month, pid in decisions:
        ivs = by_pid[pid]
        i = ptr[pid]
        opened = open_iv[pid]
        while i < len(ivs) and ivs[i][0] <= month:
            opened.append(ivs[i])
            i += 1
        ptr[pid] = i
        if any(iv[1] < month for iv in opened):
            still = []
            finished = done_months[pid]
            for lo, hi, other in opened:
                if hi < month:
                    finished[other] = finished.get(other, 0) + hi - lo + 1
                else:
                    still.append((lo, hi, other))
            open_iv[pid] = opened = still

        my_rank = rank[pid]
        patron = False
        finished = done_months[pid]
        for lo, hi, other in opened:
            if rank[other] > my_rank:
                if finished.get(other, 0) + month - lo + 1 >= PATRON_MIN_MONTHS:
                    patron = True
                    break
        p_ppm = _ppm(BASE_PROMOTION[my_rank]) + (bonus_ppm if patron else 0)
        if _draw(career_rng[pid], min(p_ppm, MAX_PROMOTION_PPM)):
            rank[pid] = my_rank + 1
            careers[pid].history.append((month, my_rank + 1))
            if my_rank + 1 == 5:
                rank5_month[pid] = month

    # recorded 4->5 events: promoters are the co-located seniors with the
    # longest cumulative overlap (at most two, none if no senior qualifies)
    promotions: list[PromotionEvent] = []
    for pid in sorted(rank5_month):
        month = rank5_month[pid]
        cum: dict[int, int] = {}
        for lo, hi, other in by_pid[pid]:
            if lo > month:
                continue
            cum[other] = cum.get(other, 0) + min(hi, month) - lo + 1
        candidates = []
        for other, shared in sorted(cum.items()):
            if shared < PATRON_MIN_MONTHS:
                continue
            key = (pid, other) if pid < other else (other, pid)
            ivs = pair_intervals[key]
            avg_other, months = _avg_rank_over(careers[other].history, ivs, month)
            avg_self, _ = _avg_rank_over(careers[pid].history, ivs, month)
            if months and avg_other > avg_self:
                candidates.append((-shared, other))
        candidates.sort()
        if candidates:
            promoters = tuple(other for _, other in candidates[:2])
            promotions.append(
                PromotionEvent(promotee=pid, promoters=promoters,
                               date=YearMonth.from_index(month))
            )

    # materialize spells: stints split at promotion months
    spells: list[JobSpell] = []
    for pid, car in careers.items():
        rng = Random(f"{cfg.seed}/org/{pid}")
        history = car.history
        for city, lo, hi in car.stints:
            dept = rng.randrange(DEPTS_PER_CITY)
            cur = lo
            while cur <= hi:
                idx = bisect_right(history, (cur, 10**9)) - 1
                seg_hi = history[idx + 1][0] - 1 if idx + 1 < len(history) else hi
                seg_hi = min(seg_hi, hi)
                spells.append(JobSpell(
                    politician_id=pid,
                    start=YearMonth.from_index(cur),
                    end=YearMonth.from_index(seg_hi),
                    province=f"prov{city_province[city]:02d}",
                    municipality=f"city{city:03d}",
                    organization=f"city{city:03d}/d{dept}",
                    rank=history[idx][1],
                ))
                cur = seg_hi + 1

    spells.sort(key=canonical_spell_order)
    promotions.sort(key=canonical_promotion_order)
    ds = Dataset(
        politicians=politicians,
        spells=spells,
        promotions=promotions,
        end_year=end_year,
    )
    ds.validate()
    logger.info(
        "synthesized %d politicians, %d spells, %d promotions (seed=%d, strength=%g)",
        len(politicians), len(spells), len(promotions), cfg.seed,
        cfg.planted_patronage_strength,
    )
    return ds
