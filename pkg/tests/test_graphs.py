from __future__ import annotations

import itertools

import pytest

from patronage.errors import UnknownNode
from patronage.graphs import (
    GraphKind,
    PatronageGraph,
    build_home_origin,
    build_overlap,
    build_promotion,
    ego_subgraph,
    truncate_before,
    undirect,
    write_edge_list,
)
from patronage.model import YearMonth
from patronage.synth import SynthConfig, generate_synthetic

from .conftest import mk_ds, mk_pol, mk_promo, mk_spell


def edge_pairs(g):
    return {(u, v) for u, v, _w in g.edges}


def weighted_edges(g):
    return {(u, v, w) for u, v, w in g.edges}


class TestGraphContainer:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            PatronageGraph([1, 2], [(1, 1, None)], directed=True, weighted=False)

    def test_rejects_duplicate_edge(self):
        with pytest.raises(ValueError):
            PatronageGraph([1, 2], [(1, 2, None), (1, 2, None)], directed=True, weighted=False)

    def test_rejects_unknown_endpoint(self):
        with pytest.raises(ValueError):
            PatronageGraph([1, 2], [(1, 3, None)], directed=True, weighted=False)

    def test_undirected_normalizes_and_detects_duplicates(self):
        g = PatronageGraph([1, 2], [(2, 1, None)], directed=False, weighted=False)
        assert g.edges == ((1, 2, None),)
        with pytest.raises(ValueError):
            PatronageGraph([1, 2], [(2, 1, None), (1, 2, None)], directed=False, weighted=False)

    def test_adjacency(self):
        g = PatronageGraph([1, 2, 3], [(1, 2, 7), (3, 2, 9)], directed=True, weighted=True)
        assert g.out_neighbors(1) == (2,)
        assert g.in_neighbors(2) == (1, 3)
        assert g.neighbors(2) == (1, 3)
        assert g.weight(3, 2) == 9
        with pytest.raises(UnknownNode):
            g.neighbors(99)


class TestHomeOrigin:
    def test_triangle(self, three_politicians_same_city):
        g = build_home_origin(three_politicians_same_city, "full")
        assert edge_pairs(g) == {(0, 1), (0, 2), (1, 2)}
        assert not g.directed and not g.weighted
        assert g.kind == GraphKind.HOME_ORIGIN_FULL

    def test_distinct_cities_no_edges(self):
        ds = mk_ds([mk_pol(i, city=f"c{i}") for i in range(3)])
        g = build_home_origin(ds, "full")
        assert g.n_edges == 0
        assert g.n_nodes == 3

    def test_complete_subgraph_per_city(self):
        ds = generate_synthetic(SynthConfig(n_politicians=300, seed=2))
        g = build_home_origin(ds, "full")
        by_city = {}
        for p in ds.politicians.values():
            by_city.setdefault(p.home_city, []).append(p.id)
        expected = sum(len(m) * (len(m) - 1) // 2 for m in by_city.values())
        assert g.n_edges == expected
        for members in by_city.values():
            for u in members:
                same_city = [v for v in g.neighbors(u)]
                assert len(same_city) == len(members) - 1

    def test_worked_variant_requires_shared_department(self):
        pols = [mk_pol(i, city="c0") for i in range(3)]
        spells = [
            mk_spell(0, "2000-01", "2001-12", org="dept-a"),
            mk_spell(1, "2001-01", "2002-12", org="dept-a"),
            mk_spell(2, "2000-01", "2002-12", org="dept-b"),
        ]
        g = build_home_origin(mk_ds(pols, spells), "worked")
        assert edge_pairs(g) == {(0, 1)}

    def test_worked_requires_time_overlap(self):
        pols = [mk_pol(0, city="c0"), mk_pol(1, city="c0")]
        spells = [
            mk_spell(0, "2000-01", "2000-12", org="dept-a"),
            mk_spell(1, "2001-01", "2001-12", org="dept-a"),
        ]
        g = build_home_origin(mk_ds(pols, spells), "worked")
        assert g.n_edges == 0

    def test_worked_still_requires_same_home_city(self):
        pols = [mk_pol(0, city="c0"), mk_pol(1, city="c1")]
        spells = [
            mk_spell(0, "2000-01", "2001-12", org="dept-a"),
            mk_spell(1, "2000-01", "2001-12", org="dept-a"),
        ]
        g = build_home_origin(mk_ds(pols, spells), "worked")
        assert g.n_edges == 0


class TestOverlap:
    def test_direction_and_weight(self):
        pols = [mk_pol(1), mk_pol(2)]
        spells = [
            mk_spell(1, "2001-01", "2001-08", city="X", rank=4),
            mk_spell(2, "2001-01", "2001-08", city="X", rank=5),
        ]
        g = build_overlap(mk_ds(pols, spells))
        assert weighted_edges(g) == {(1, 2, 8)}
        assert g.directed and g.weighted

    def test_below_threshold_no_edge(self):
        pols = [mk_pol(1), mk_pol(2)]
        spells = [
            mk_spell(1, "2001-01", "2001-05", city="X", rank=4),
            mk_spell(2, "2001-01", "2001-05", city="X", rank=5),
        ]
        assert build_overlap(mk_ds(pols, spells)).n_edges == 0

    def test_stints_sum_to_weight(self):
        # 4-month and 3-month co-located stints sum to 7 >= 6
        pols = [mk_pol(1), mk_pol(2)]
        spells = [
            mk_spell(1, "2001-01", "2001-04", city="X", rank=3),
            mk_spell(1, "2002-01", "2002-03", city="X", rank=3),
            mk_spell(2, "2001-01", "2002-12", city="X", rank=5),
        ]
        g = build_overlap(mk_ds(pols, spells))
        assert weighted_edges(g) == {(1, 2, 7)}

    def test_time_weighted_average_decides_direction(self):
        # 1 holds rank 4 for 6 months then rank 6: average 5.0
        # 2 holds rank 5 throughout: tie on averages, earlier join is senior
        pols = [mk_pol(1, join=1970), mk_pol(2, join=1980)]
        spells = [
            mk_spell(1, "2001-01", "2001-06", city="X", rank=4),
            mk_spell(1, "2001-07", "2001-12", city="X", rank=6),
            mk_spell(2, "2001-01", "2001-12", city="X", rank=5),
        ]
        g = build_overlap(mk_ds(pols, spells))
        assert edge_pairs(g) == {(2, 1)}  # 1 joined earlier, so 1 is senior

    def test_id_breaks_remaining_ties(self):
        pols = [mk_pol(1, join=1975), mk_pol(2, join=1975)]
        spells = [
            mk_spell(1, "2001-01", "2001-12", city="X", rank=4),
            mk_spell(2, "2001-01", "2001-12", city="X", rank=4),
        ]
        g = build_overlap(mk_ds(pols, spells))
        assert edge_pairs(g) == {(2, 1)}  # smaller id is senior on full tie

    def test_concurrent_posts_raise_rank_in_force(self):
        # politician 1 also holds a rank-6 post elsewhere, so its rank in
        # force during the overlap is 6 and it outranks politician 2
        pols = [mk_pol(1), mk_pol(2)]
        spells = [
            mk_spell(1, "2001-01", "2001-12", city="X", rank=4),
            mk_spell(1, "2001-01", "2001-12", city="Y", rank=6),
            mk_spell(2, "2001-01", "2001-12", city="X", rank=5),
        ]
        g = build_overlap(mk_ds(pols, spells))
        assert edge_pairs(g) == {(2, 1)}

    def test_one_edge_per_pair_and_min_weight(self):
        ds = generate_synthetic(SynthConfig(n_politicians=200, seed=8))
        g = build_overlap(ds)
        pairs = set()
        for u, v, w in g.edges:
            key = (min(u, v), max(u, v))
            assert key not in pairs
            pairs.add(key)
            assert w >= 6

    def test_all_politicians_are_nodes(self):
        ds = generate_synthetic(SynthConfig(n_politicians=50, seed=8))
        for builder in (build_overlap, build_promotion):
            assert builder(ds).n_nodes == 50
        assert build_home_origin(ds, "full").n_nodes == 50


class TestPromotion:
    def test_two_promoters_out_degree(self):
        pols = [mk_pol(i) for i in range(1, 4)]
        spells = [mk_spell(i, "2000-01", "2010-12", rank=5) for i in range(1, 4)]
        ds = mk_ds(pols, spells, [mk_promo(1, (2, 3))])
        g = build_promotion(ds)
        assert g.out_neighbors(1) == (2, 3)
        assert g.in_neighbors(1) == ()

    def test_never_promoter_in_degree_zero(self):
        pols = [mk_pol(i) for i in range(1, 4)]
        spells = [mk_spell(i, "2000-01", "2010-12", rank=5) for i in range(1, 4)]
        ds = mk_ds(pols, spells, [mk_promo(1, (2,))])
        g = build_promotion(ds)
        assert g.in_neighbors(3) == ()
        assert g.in_neighbors(2) == (1,)

    def test_empty_promotions(self, three_politicians_same_city):
        g = build_promotion(three_politicians_same_city)
        assert g.n_edges == 0

    def test_duplicate_edges_collapse(self):
        pols = [mk_pol(1), mk_pol(2), mk_pol(3)]
        ds = mk_ds(pols, [mk_spell(1, "2000-01", "2010-12")],
                   [mk_promo(1, (2,), "2004-01"), mk_promo(1, (2, 3), "2005-01")])
        g = build_promotion(ds)
        assert edge_pairs(g) == {(1, 2), (1, 3)}


class TestUndirect:
    def test_single_direction(self):
        g = PatronageGraph([1, 2], [(1, 2, 8)], directed=True, weighted=True)
        u = undirect(g)
        assert u.edges == ((1, 2, None),)
        assert not u.directed and not u.weighted

    def test_antiparallel_merge(self):
        g = PatronageGraph([1, 2], [(1, 2, None), (2, 1, None)], directed=True, weighted=False)
        assert undirect(g).n_edges == 1

    def test_empty(self):
        g = PatronageGraph([], [], directed=True, weighted=False)
        assert undirect(g).n_edges == 0

    def test_idempotent(self):
        ds = generate_synthetic(SynthConfig(n_politicians=80, seed=3))
        g = undirect(build_overlap(ds))
        assert undirect(g) == g


class TestEgoSubgraph:
    def test_isolated_center(self):
        g = PatronageGraph([1, 2, 3], [(2, 3, None)], directed=False, weighted=False)
        sub = ego_subgraph(g, 1, hops=1)
        assert sub.nodes == (1,)
        assert sub.n_edges == 0

    def test_star(self):
        edges = [(0, i, None) for i in range(1, 6)]
        g = PatronageGraph(range(6), edges, directed=False, weighted=False)
        sub = ego_subgraph(g, 0, hops=1)
        assert sub.n_nodes == 6 and sub.n_edges == 5

    def test_path_two_hops(self):
        g = PatronageGraph(
            "abcd", [("a", "b", None), ("b", "c", None), ("c", "d", None)],
            directed=False, weighted=False,
        )
        sub = ego_subgraph(g, "a", hops=2)
        assert set(sub.nodes) == {"a", "b", "c"}
        assert sub.n_edges == 2

    def test_unknown_center(self):
        g = PatronageGraph([1], [], directed=False, weighted=False)
        with pytest.raises(UnknownNode):
            ego_subgraph(g, 9)


class TestTruncate:
    def test_clips_straddling_spell(self):
        ds = mk_ds([mk_pol(1)], [mk_spell(1, "2003-01", "2008-01")])
        out = truncate_before(ds, YearMonth(2005, 7))
        assert len(out.spells) == 1
        assert str(out.spells[0].end) == "2005-07"
        assert str(out.spells[0].start) == "2003-01"

    def test_drops_later_promotion(self):
        pols = [mk_pol(1), mk_pol(2)]
        ds = mk_ds(pols, [mk_spell(1, "2000-01", "2010-12")],
                   [mk_promo(1, (2,), "2006-03")])
        out = truncate_before(ds, YearMonth(2005, 7))
        assert out.promotions == []

    def test_identity_when_everything_earlier(self):
        ds = mk_ds([mk_pol(1), mk_pol(2)],
                   [mk_spell(1, "2000-01", "2004-12")],
                   [mk_promo(1, (2,), "2003-01")])
        out = truncate_before(ds, YearMonth(2005, 7))
        assert out == ds

    def test_composition_equals_min_cutoff(self):
        ds = generate_synthetic(SynthConfig(n_politicians=60, seed=6))
        t1, t2 = YearMonth(2001, 6), YearMonth(1995, 2)
        for a, b in itertools.permutations([t1, t2]):
            combined = truncate_before(truncate_before(ds, a), b)
            assert combined == truncate_before(ds, min(t1, t2))


class TestEdgeListExport:
    def test_weighted_format(self, tmp_path):
        g = PatronageGraph([1, 2, 3], [(3, 1, 9), (1, 2, 7)], directed=True, weighted=True)
        path = tmp_path / "edges.csv"
        write_edge_list(g, path)
        assert path.read_text() == "src,dst,weight\n1,2,7\n3,1,9\n"

    def test_unweighted_format(self, tmp_path):
        g = PatronageGraph([1, 2], [(2, 1, None)], directed=False, weighted=False)
        path = tmp_path / "edges.csv"
        write_edge_list(g, path)
        assert path.read_text() == "src,dst\n1,2\n"
