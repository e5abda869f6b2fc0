"""Tests for prime selection and the insertion weight families."""

import pytest

from bulk_reach.core.errors import (
    ChangeError,
    GuardExceededError,
    PrimeSearchError,
    WeightError,
)
from bulk_reach.core.models import Certification, Graph, WeightAssignment
from bulk_reach.core.oracle import isolation_report, transitive_closure
from bulk_reach.core.weight_family import (
    AdornedGraph,
    digit_weights,
    find_separating_prime,
    insertion_weight_family,
    level_count,
    radix_exponent,
    random_insertion_family,
    select_primes,
    strongly_real_isolates,
)
from bulk_reach.core.weights import random_isolating_weights


class TestFindSeparatingPrime:
    @pytest.mark.parametrize("values,expected", [
        ([1, 2], 2),
        ([0, 6, 12], 5),
        ([3, 5, 7], 3),
    ])
    def test_smallest_separating_prime(self, values, expected):
        assert find_separating_prime(values) == expected

    def test_residues_are_distinct(self):
        values = [1 << i for i in range(10)]
        p = find_separating_prime(values)
        assert len({x % p for x in values}) == len(values)

    def test_needs_two_values(self):
        with pytest.raises(WeightError):
            find_separating_prime([4, 4])

    def test_budget_exhausted(self):
        with pytest.raises(PrimeSearchError) as exc_info:
            find_separating_prime([0, 2 * 3 * 5 * 7 * 11 * 13], bit_budget=4)
        assert exc_info.value.largest_prime_tried == 13
        assert exc_info.value.level is None


class TestAdornedGraph:
    def test_renumbering(self):
        g = Graph(4, frozenset({(0, 1)}))
        h = AdornedGraph.from_change(g, transitive_closure(g), [(1, 2), (2, 3)])
        assert h.nodes == (1, 2, 3)
        assert h.real == ((1, 2), (2, 3))
        assert h.fictitious == frozenset()
        assert h.original((1, 2)) == (1, 2)
        assert h.base_weight((1, 2)) == 1 << 6

    def test_fictitious_edges_join_real_ones(self):
        g = Graph(4, frozenset({(1, 2)}))
        h = AdornedGraph.from_change(g, transitive_closure(g), [(0, 1), (2, 3)])
        assert h.real == ((1, 2), (3, 4))
        assert h.fictitious == frozenset({(2, 3)})
        assert h.follows((1, 2), (3, 4))
        assert not h.follows((3, 4), (1, 2))
        assert h.sources((3, 4)) == {2, 3}
        assert h.targets((1, 2)) == {2, 3}


class TestStronglyRealIsolates:
    @staticmethod
    def chained():
        return AdornedGraph((0, 1, 2, 3), ((1, 2), (3, 4)), frozenset({(2, 3)}))

    def test_distinct_weights_pass(self):
        report = strongly_real_isolates(self.chained(), {(1, 2): 1, (3, 4): 2})
        assert report.ok
        assert report.pairs[(1, 4)].weight == 3
        assert report.pairs[(1, 3)].weight == 1

    def test_equal_weights_collide(self):
        report = strongly_real_isolates(self.chained(), {(1, 2): 1, (3, 4): 1})
        assert not report.ambiguous_pairs()
        assert report.weight_collisions()
        assert not report.ok

    def test_tied_sequences_are_ambiguous(self):
        h = AdornedGraph((5, 6, 7), ((1, 2), (1, 3), (2, 3)), frozenset())
        report = strongly_real_isolates(h, {(1, 2): 1, (1, 3): 2, (2, 3): 1})
        assert report.ambiguous_pairs() == [(1, 3)]
        assert report.pairs[(1, 3)].count == 2

    def test_sequence_length_limit(self):
        h = AdornedGraph((5, 6, 7), ((1, 2), (1, 3), (2, 3)), frozenset())
        report = strongly_real_isolates(h, {(1, 2): 1, (1, 3): 2, (2, 3): 1}, max_real_edges=1)
        assert report.pairs[(1, 3)].count == 1

    def test_weights_must_be_positive(self):
        with pytest.raises(WeightError):
            strongly_real_isolates(self.chained(), {(1, 2): 1, (3, 4): 0})

    def test_guard(self):
        real = tuple((i, i + 1) for i in range(1, 14))
        h = AdornedGraph(tuple(range(14)), real, frozenset())
        with pytest.raises(GuardExceededError):
            strongly_real_isolates(h, {e: 1 for e in real})


class TestDigits:
    @pytest.mark.parametrize("n_nodes,largest_prime,expected", [
        (2, 15, 6),
        (3, 8, 4),
        (3, 9, 5),
        (16, 65521, 6),
    ])
    def test_radix_exponent(self, n_nodes, largest_prime, expected):
        assert radix_exponent(n_nodes, largest_prime) == expected

    def test_radix_needs_two_nodes(self):
        with pytest.raises(WeightError):
            radix_exponent(1, 8)

    @pytest.mark.parametrize("n_nodes,expected", [(1, 1), (2, 1), (3, 2), (4, 2), (5, 3)])
    def test_level_count(self, n_nodes, expected):
        assert level_count(n_nodes) == expected

    def test_digit_weights(self):
        h = AdornedGraph((0, 1), ((1, 2),), frozenset())
        # w0 = 2^(3 + 2) = 32
        assert digit_weights(h, (5,), 2) == {(1, 2): 32 % 5}
        assert digit_weights(h, (5, 7), 2) == {(1, 2): 4 * 2 + 4}


class TestSelectPrimes:
    def test_main_sequence_passes(self):
        g = Graph(5, frozenset({(0, 1), (2, 3)}))
        h = AdornedGraph.from_change(g, transitive_closure(g), [(1, 2), (3, 4), (4, 0)])
        sequences = select_primes(h, sibling_width=3)
        beta = radix_exponent(h.size, (1 << 16) - 1)
        assert all(len(s) == level_count(h.size) for s in sequences)
        assert len(set(sequences)) == len(sequences)
        for s in sequences:
            assert strongly_real_isolates(h, digit_weights(h, s, beta)).ok


class TestInsertionWeightFamily:
    @staticmethod
    def setup_graph():
        g = Graph(5, frozenset({(0, 1), (1, 2), (3, 4)}))
        return g, random_isolating_weights(g, seed=7)

    def test_members_isolate_the_changed_graph(self):
        g, w = self.setup_graph()
        eplus = frozenset({(2, 3), (4, 0)})
        family = insertion_weight_family(g, transitive_closure(g), eplus, w, sibling_width=2)
        assert len(family) >= 1
        assert family.agrees_with_base()
        changed = g.with_edges(g.edges | eplus)
        main = family.members[0]
        assert main.primes
        assert main.weights.is_positive_on(changed.edges)
        assert isolation_report(changed, main.weights).is_isolating

    def test_scale_dominates_base(self):
        g, w = self.setup_graph()
        family = insertion_weight_family(g, transitive_closure(g), [(2, 3)], w)
        scale = g.n ** (w.bound_exponent + 2)
        assert family.members[0].weights[(2, 3)] % scale == 0

    def test_radix_follows_the_chosen_primes(self):
        g, w = self.setup_graph()
        reach = transitive_closure(g)
        eplus = [(2, 3), (4, 0)]
        family = insertion_weight_family(g, reach, eplus, w, sibling_width=2)
        h = AdornedGraph.from_change(g, reach, eplus)
        scale = g.n ** (w.bound_exponent + 2)
        for member in family.members:
            beta = radix_exponent(h.size, max(member.primes))
            for e, x in digit_weights(h, member.primes, beta).items():
                assert member.weights[h.original(e)] == scale * x

    def test_max_members(self):
        g, w = self.setup_graph()
        family = insertion_weight_family(
            g, transitive_closure(g), [(2, 3), (4, 0)], w, sibling_width=4, max_members=1
        )
        assert len(family) == 1

    def test_empty_insertion_keeps_base(self):
        g, w = self.setup_graph()
        family = insertion_weight_family(g, transitive_closure(g), [], w)
        assert len(family) == 1
        assert family.members[0].weights.weights == w.weights

    def test_present_edge_rejected(self):
        g, w = self.setup_graph()
        with pytest.raises(ChangeError):
            insertion_weight_family(g, transitive_closure(g), [(0, 1)], w)


class TestRandomInsertionFamily:
    def test_single_isolating_member(self):
        g = Graph(5, frozenset({(0, 1), (1, 2), (3, 4)}))
        w = random_isolating_weights(g, seed=2)
        eplus = [(2, 3), (4, 0), (0, 3)]
        family = random_insertion_family(g, eplus, w, seed=9)
        assert len(family) == 1
        assert family.agrees_with_base()
        member = family.members[0]
        assert member.weights.certification == Certification.ISOLATING
        changed = g.with_edges(g.edges | set(eplus))
        assert isolation_report(changed, member.weights).is_isolating

    def test_deterministic(self):
        g = Graph(3, frozenset({(0, 1)}))
        w = WeightAssignment({(0, 1): 1})
        a = random_insertion_family(g, [(1, 2)], w, seed=4)
        b = random_insertion_family(g, [(1, 2)], w, seed=4)
        assert a.members[0].weights == b.members[0].weights
