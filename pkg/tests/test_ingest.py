from __future__ import annotations

import statistics

import pytest

from patronage.dataset import Dataset, load_dataset, summarize, write_dataset
from patronage.errors import ConfigError, DuplicateId, IntegrityError, ParseError
from patronage.graphs import build_overlap
from patronage.synth import SynthConfig, generate_synthetic

from .conftest import mk_ds, mk_pol, mk_promo, mk_spell

POLITICIANS = """\
id,name,gender,birth_year,party_join_year,home_city,home_province,retirement_year
1,Ada,F,1950,1975,c0,p0,
2,Ben,M,1952,1976,c0,p0,2014
3,Cal,M,1948,1970,c1,p0,
"""
SPELLS = """\
politician_id,start,end,province,municipality,organization,rank
1,2000-01,2005-12,p0,c0,o0,4
2,2001-03,2006-06,p0,c0,o0,5
3,2002-01,2010-12,p0,c1,o1,6
"""
PROMOTIONS = """\
promotee_id,promoter1_id,promoter2_id,date,from_rank,to_rank
1,2,3,2003-05,4,5
"""


def write_fixture(tmp_path, politicians=POLITICIANS, spells=SPELLS, promotions=PROMOTIONS):
    pol = tmp_path / "politicians.csv"
    spl = tmp_path / "spells.csv"
    pro = tmp_path / "promotions.csv"
    pol.write_text(politicians, encoding="utf-8")
    spl.write_text(spells, encoding="utf-8")
    pro.write_text(promotions, encoding="utf-8")
    return pol, spl, pro


class TestLoadDataset:
    def test_well_formed_fixture(self, tmp_path):
        ds = load_dataset(*write_fixture(tmp_path))
        assert len(ds.politicians) == 3
        assert len(ds.spells) == 3
        assert len(ds.promotions) == 1
        assert ds.politicians[2].retirement_year == 2014
        assert ds.politicians[1].retirement_year is None

    def test_unknown_spell_politician(self, tmp_path):
        spells = SPELLS + "99,2000-01,2001-01,p0,c0,o0,3\n"
        with pytest.raises(IntegrityError):
            load_dataset(*write_fixture(tmp_path, spells=spells))

    def test_promotee_listed_as_promoter(self, tmp_path):
        promos = PROMOTIONS + "2,2,,2004-01,4,5\n"
        with pytest.raises(IntegrityError):
            load_dataset(*write_fixture(tmp_path, promotions=promos))

    def test_non_4_to_5_promotion_rejected(self, tmp_path):
        promos = PROMOTIONS + "2,3,,2004-01,5,6\n"
        with pytest.raises(IntegrityError):
            load_dataset(*write_fixture(tmp_path, promotions=promos))

    def test_duplicate_politician_id(self, tmp_path):
        pols = POLITICIANS + "1,Dup,M,1960,1985,c0,p0,\n"
        with pytest.raises(DuplicateId):
            load_dataset(*write_fixture(tmp_path, politicians=pols))

    def test_bad_gender(self, tmp_path):
        pols = POLITICIANS.replace("1,Ada,F", "1,Ada,Q")
        with pytest.raises(ParseError) as err:
            load_dataset(*write_fixture(tmp_path, politicians=pols))
        assert err.value.column == "gender"

    def test_bad_date(self, tmp_path):
        spells = SPELLS.replace("2000-01", "2000-13")
        with pytest.raises(ParseError) as err:
            load_dataset(*write_fixture(tmp_path, spells=spells))
        assert err.value.column == "start"

    def test_wrong_header(self, tmp_path):
        pols = POLITICIANS.replace("home_city", "hometown")
        with pytest.raises(ParseError):
            load_dataset(*write_fixture(tmp_path, politicians=pols))

    def test_join_year_floor(self, tmp_path):
        pols = POLITICIANS.replace("1,Ada,F,1950,1975", "1,Ada,F,1950,1960")
        with pytest.raises(IntegrityError):
            load_dataset(*write_fixture(tmp_path, politicians=pols))

    def test_city_in_two_provinces(self, tmp_path):
        pols = POLITICIANS.replace("3,Cal,M,1948,1970,c1,p0,", "3,Cal,M,1948,1970,c0,p1,")
        with pytest.raises(IntegrityError):
            load_dataset(*write_fixture(tmp_path, politicians=pols))

    def test_rank_above_scale_clamps(self, tmp_path):
        spells = SPELLS.replace("o1,6", "o1,12")
        ds = load_dataset(*write_fixture(tmp_path, spells=spells))
        assert max(s.rank for s in ds.spells) == 9

    def test_round_trip(self, tmp_path):
        ds = generate_synthetic(SynthConfig(n_politicians=40, seed=3))
        paths = (tmp_path / "p.csv", tmp_path / "s.csv", tmp_path / "e.csv")
        write_dataset(ds, *paths)
        again = load_dataset(*paths)
        assert again == ds


class TestSummarize:
    def test_empty_dataset(self):
        ds = Dataset(politicians={}, spells=[], promotions=[])
        s = summarize(ds)
        assert (s.politicians, s.provinces, s.cities, s.spell_rows, s.promotions) == (0, 0, 0, 0, 0)

    def test_synthetic_counts(self):
        ds = generate_synthetic(SynthConfig(n_politicians=100, seed=5))
        s = summarize(ds)
        assert s.politicians == 100
        assert s.spell_rows == len(ds.spells)
        assert s.promotions == len(ds.promotions)

    def test_counts_fixture(self):
        ds = mk_ds(
            [mk_pol(1, city="a", prov="P"), mk_pol(2, city="b", prov="Q")],
            [mk_spell(1, "2000-01", "2001-01", city="c", prov="R")],
        )
        s = summarize(ds)
        assert s.politicians == 2
        assert s.provinces == 3  # P, Q plus worked-in R
        assert s.cities == 3


class TestGenerateSynthetic:
    def test_same_seed_identical_files(self, tmp_path):
        cfg = SynthConfig(n_politicians=60, seed=11)
        a = generate_synthetic(cfg)
        b = generate_synthetic(cfg)
        assert a == b
        pa = (tmp_path / "pa.csv", tmp_path / "sa.csv", tmp_path / "ea.csv")
        pb = (tmp_path / "pb.csv", tmp_path / "sb.csv", tmp_path / "eb.csv")
        write_dataset(a, *pa)
        write_dataset(b, *pb)
        for fa, fb in zip(pa, pb):
            assert fa.read_bytes() == fb.read_bytes()

    def test_different_seeds_differ(self):
        a = generate_synthetic(SynthConfig(n_politicians=60, seed=1))
        b = generate_synthetic(SynthConfig(n_politicians=60, seed=2))
        assert a != b

    def test_zero_strength_still_produces_promotions(self):
        ds = generate_synthetic(
            SynthConfig(n_politicians=400, seed=9, planted_patronage_strength=0.0)
        )
        assert len(ds.promotions) > 0
        for ev in ds.promotions:
            assert (ev.from_rank, ev.to_rank) == (4, 5)
            assert 1 <= len(ev.promoters) <= 2

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_politicians": 0},
            {"n_politicians": 10, "n_provinces": 0},
            {"n_politicians": 10, "n_cities": 4, "n_provinces": 8},
            {"n_politicians": 10, "planted_patronage_strength": 1.5},
            {"n_politicians": 10, "female_fraction": -0.1},
            {"n_politicians": 10, "seed": -1},
        ],
    )
    def test_config_errors(self, kwargs):
        with pytest.raises(ConfigError):
            generate_synthetic(SynthConfig(**kwargs))

    def test_referential_integrity(self):
        ds = generate_synthetic(SynthConfig(n_politicians=80, seed=4))
        ds.validate()
        ranks = ds.final_ranks()
        assert set(ranks) == set(ds.politicians)

    def test_planted_patronage_raises_connected_final_ranks(self):
        # pooled over 20 seeds: politicians with >= 10 overlap partners
        # outrank the structurally unconnected group
        connected, isolated = [], []
        for seed in range(20):
            ds = generate_synthetic(
                SynthConfig(n_politicians=500, seed=seed, planted_patronage_strength=0.5)
            )
            ranks = ds.final_ranks()
            g = build_overlap(ds)
            for u in g.nodes:
                partners = len(g.neighbors(u))
                if partners >= 10:
                    connected.append(ranks[u])
                elif partners == 0:
                    isolated.append(ranks[u])
        assert len(isolated) >= 20
        assert statistics.mean(connected) > statistics.mean(isolated)
