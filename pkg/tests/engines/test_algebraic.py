"""Tests for the walk-parity matrix engine."""

from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bulk_reach.core.errors import ChangeError, GuardExceededError, NodeRangeError, WeightError
from bulk_reach.core.graph_ops import apply_change
from bulk_reach.core.models import BulkChange, Certification, Graph, WeightAssignment
from bulk_reach.core.oracle import count_weighted_walks_mod2, transitive_closure
from bulk_reach.core.polymat import PolyMatrix
from bulk_reach.engines.algebraic import (
    FAITHFUL,
    DERANDOMIZED,
    RANDOM,
    VERIFIED,
    AlgebraicConfig,
    AlgebraicEngine,
    _member_delta,
    degree_bound,
    delete_edges,
    init,
    insert_edges,
    query,
    reach_pairs,
    soundness_violations,
    resolve_scheme,
    state_dump,
    update_members,
    update_members_async,
    walk_matrix,
    write_state,
)
from bulk_reach.harness.generators import change_script, random_gnp
from tests.strategies import changes_for, directed_graphs


def weighted(g, seed=0):
    return WeightAssignment({e: 1 + (seed + 5 * e[0] + 3 * e[1]) % 4 for e in g.edges})


@st.composite
def mixed_scripts(draw, max_nodes=6, steps=4):
    g = draw(directed_graphs(max_nodes=max_nodes))
    script = []
    current = Graph(g.n)
    for _ in range(steps):
        change = draw(changes_for(current, max_size=3))
        script.append(change)
        current = apply_change(current, change)
    return g.n, script


class TestWalkMatrix:
    @given(directed_graphs(max_nodes=5), st.integers(0, 3))
    def test_matches_walk_parity_dp(self, g, seed):
        w = weighted(g, seed)
        b = degree_bound(g.n, max(w.max_abs(), 1))
        table = count_weighted_walks_mod2(g, w, b)
        c = walk_matrix(g, w, b)
        for s in g.nodes():
            for t in g.nodes():
                assert c.bits(s, t) == table[s][t]

    def test_empty_graph_is_identity(self):
        assert walk_matrix(Graph(3), WeightAssignment({}), 4) == PolyMatrix.identity(3, 4)

    def test_degree_bound(self):
        assert degree_bound(5, 7) == 35
        with pytest.raises(WeightError):
            degree_bound(5, 0)


class TestInit:
    def test_random_weights_are_certified(self):
        g = Graph(4, frozenset({(0, 1), (1, 2), (0, 2)}))
        s = init(g, config=AlgebraicConfig(seed=3))
        member = s.primary
        assert member.weights.certification == Certification.ISOLATING
        assert s.scheme == RANDOM
        assert s.bound == degree_bound(4, member.weights.max_abs())
        assert member.matrix == walk_matrix(g, member.weights, s.bound)
        assert reach_pairs(s) == transitive_closure(g)

    def test_supplied_weights(self):
        g = Graph(3, frozenset({(0, 1), (1, 2)}))
        w = WeightAssignment({(0, 1): 1, (1, 2): 2}, certification=Certification.ISOLATING)
        s = init(g, weights=w)
        assert s.bound == 6
        assert s.primary.matrix.bits(0, 2) == 1 << 3

    def test_supplied_weights_must_be_certified(self):
        g = Graph(2, frozenset({(0, 1)}))
        with pytest.raises(WeightError):
            init(g, weights=WeightAssignment({(0, 1): 1}))

    def test_circulation_weights_are_shifted(self):
        g = Graph(2, frozenset({(0, 1)}))
        u = WeightAssignment(
            {(0, 1): 1, (1, 0): -1},
            skew_symmetric=True,
            certification=Certification.NONZERO_CIRCULATION,
        )
        s = init(g, u, 0)
        assert s.scheme == DERANDOMIZED
        assert s.primary.weights.weights == {(0, 1): 5}
        assert s.base == u

    def test_uncertified_base_rejected(self):
        with pytest.raises(WeightError):
            init(Graph(2), WeightAssignment({}, skew_symmetric=True), 0)

    def test_coefficient_budget(self):
        g = Graph(3, frozenset({(0, 1)}))
        w = WeightAssignment({(0, 1): 1000}, certification=Certification.ISOLATING)
        with pytest.raises(GuardExceededError):
            init(g, weights=w, config=AlgebraicConfig(coefficient_budget=100))


class TestUpdates:
    @given(mixed_scripts(), st.sampled_from([VERIFIED, FAITHFUL]))
    def test_matrices_track_their_weights(self, case, mode):
        n, script = case
        s = init(Graph(n), mode=mode, config=AlgebraicConfig(seed=1))
        for change in script:
            s = insert_edges(s, change.inserted)
            s = delete_edges(s, change.deleted)
            for member in s.members:
                assert set(member.weights.weights) == set(s.graph.edges)
                assert member.matrix == walk_matrix(s.graph, member.weights, s.bound)

    def test_smw_matches_recomputation(self):
        g = Graph(4, frozenset({(0, 1), (1, 2)}))
        w = WeightAssignment(
            {(0, 1): 1, (1, 2): 1, (2, 3): 2, (3, 0): 1}, certification=Certification.ISOLATING
        )
        s = init(g, weights=w)
        bigger = Graph(4, g.edges | {(2, 3), (3, 0)})
        delta = _member_delta(w, [(2, 3), (3, 0)], 4, s.bound)
        [updated] = update_members([(s.primary.matrix, delta)])
        assert updated == walk_matrix(bigger, w.restricted_to(bigger.edges), s.bound)

    async def test_async_update_matches_sync(self):
        g = Graph(3, frozenset({(0, 1)}))
        w = WeightAssignment({(0, 1): 1, (1, 2): 2}, certification=Certification.ISOLATING)
        s = init(g, weights=w)
        updates = [(s.primary.matrix, _member_delta(w, [(1, 2)], 3, s.bound))] * 2
        assert await update_members_async(updates) == update_members(updates)

    def test_insert_present_edge_rejected(self):
        s = init(Graph(2, frozenset({(0, 1)})))
        with pytest.raises(ChangeError, match="already present"):
            insert_edges(s, [(0, 1)])

    def test_delete_absent_edge_rejected(self):
        s = init(Graph(2))
        with pytest.raises(ChangeError, match="not present"):
            delete_edges(s, [(0, 1)])

    def test_empty_changes_return_same_state(self):
        s = init(Graph(2))
        assert insert_edges(s, []) is s
        assert delete_edges(s, []) is s


class TestAlgebraicEngine:
    @given(mixed_scripts(), st.sampled_from([VERIFIED, FAITHFUL]))
    def test_random_scheme_matches_oracle(self, case, mode):
        n, script = case
        engine = AlgebraicEngine(n, mode=mode, config=AlgebraicConfig(seed=2))
        for change in script:
            engine.apply(change)
            assert engine.reach_pairs() == transitive_closure(engine.graph)
            assert not soundness_violations(engine.state)

    def test_verified_mode_keeps_one_member(self):
        engine = AlgebraicEngine(5, mode=VERIFIED)
        engine.apply(BulkChange.of([(0, 1), (1, 2), (3, 4)]))
        engine.apply(BulkChange.of([(2, 3)], [(0, 1)]))
        assert engine.stats()["members"] == 1
        assert engine.query(1, 4)
        assert not engine.query(0, 4)
        assert engine.query(4, 4)

    def test_derandomized_scheme_single_edge(self):
        engine = AlgebraicEngine(3, scheme=DERANDOMIZED)
        engine.apply(BulkChange.of([(0, 1)]))
        assert engine.query(0, 1)
        assert not engine.query(1, 0)
        assert engine.state.primary.primes

    def test_paper_is_the_derandomized_scheme(self):
        engine = AlgebraicEngine(3, scheme="paper")
        assert engine.state.scheme == DERANDOMIZED
        assert resolve_scheme("random") == RANDOM
        with pytest.raises(WeightError, match="Unknown weight scheme"):
            AlgebraicEngine(3, scheme="bogus")

    def test_query_range(self):
        engine = AlgebraicEngine(2)
        with pytest.raises(NodeRangeError):
            engine.query(0, 5)


def test_state_dump_lists_members():
    g = Graph(3, frozenset({(0, 1)}))
    w = WeightAssignment({(0, 1): 2}, certification=Certification.ISOLATING)
    s = init(g, weights=w)
    dump = state_dump(s)
    assert dump.startswith("# bound 6 mode verified scheme random\n")
    assert "# member 0 primes -\n" in dump
    assert "w 0 1 2\n" in dump
    assert "0 1 : 2\n" in dump
    assert query(s, 0, 1)


class TestDerandomizedScheme:
    @pytest.mark.parametrize("mode", [FAITHFUL, VERIFIED])
    @pytest.mark.parametrize("seed", range(3))
    def test_sweep_matches_closure(self, mode, seed):
        g = random_gnp(3, 0.5, seed)
        script = [BulkChange.of(g.edges), *change_script(g, 6, 2, seed)]
        engine = AlgebraicEngine(3, mode=mode, scheme=DERANDOMIZED, config=AlgebraicConfig(seed=seed))
        for change in script:
            engine.apply(change)
            assert engine.reach_pairs() == transitive_closure(engine.graph)
            assert not soundness_violations(engine.state)
            assert engine.state.bound <= engine.state.config.coefficient_budget

    def test_faithful_keeps_sibling_members(self):
        engine = AlgebraicEngine(
            3, mode=FAITHFUL, scheme=DERANDOMIZED, config=AlgebraicConfig(sibling_width=2)
        )
        engine.apply(BulkChange.of([(1, 0)]))
        members = engine.state.members
        assert [m.primes for m in members] == [(3,), (5,)]
        # 2^7 mod 3 and mod 5, scaled by 3^2
        assert [m.weights[(1, 0)] for m in members] == [18, 27]
        assert engine.query(1, 0)
        assert not engine.query(0, 1)
        engine.apply(BulkChange.of([(0, 2)], [(1, 0)]))
        assert engine.reach_pairs() == {(0, 2)}

    def test_parallel_member_updates_match_serial(self):
        results = []
        for parallel in (False, True):
            config = AlgebraicConfig(sibling_width=2, parallel_members=parallel)
            engine = AlgebraicEngine(3, mode=FAITHFUL, scheme=DERANDOMIZED, config=config)
            engine.apply(BulkChange.of([(1, 0)]))
            engine.apply(BulkChange.of([(0, 2)]))
            engine.apply(BulkChange.of([], [(1, 0)]))
            results.append([m.matrix for m in engine.state.members])
        assert len(results[0]) >= 2
        assert results[0] == results[1]

    @pytest.mark.parametrize("mode", [FAITHFUL, VERIFIED])
    def test_deletion_that_breaks_isolation_rebuilds(self, mode):
        # every edge weighs 1, so dropping (0, 3) leaves two lightest 0 -> 3 paths
        g = Graph(4, frozenset({(0, 1), (1, 3), (0, 2), (2, 3), (0, 3)}))
        w = WeightAssignment({e: 1 for e in g.edges}, certification=Certification.ISOLATING)
        s = replace(init(g, weights=w, mode=mode), scheme=DERANDOMIZED)
        s = delete_edges(s, [(0, 3)])
        assert query(s, 0, 3)
        assert reach_pairs(s) == transitive_closure(s.graph)
        assert s.primary.primes


def test_write_state(tmp_path):
    g = Graph(3, frozenset({(0, 1)}))
    w = WeightAssignment({(0, 1): 2}, certification=Certification.ISOLATING)
    s = init(g, weights=w)
    written = write_state(s, tmp_path / "state")
    assert [p.name for p in written] == ["state.txt", "member0.weights", "member0.matrix"]
    assert written[0].read_text() == state_dump(s)
    assert written[1].read_text() == "w 0 1 2\n"
    assert "0 1 : 2\n" in written[2].read_text()
