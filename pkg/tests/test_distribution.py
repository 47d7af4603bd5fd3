"""
Unit tests for count distributions, smoothing and region decomposition
"""

import itertools
import math

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from app.core.distribution import (
    canonical_order,
    evaluation_alphabet,
    evaluation_vector,
    from_counts,
    pair_context,
    pair_regions,
    probability,
    smoothed_value,
    triplet_context,
    triplet_regions,
    zero_pattern,
)
from app.core.errors import EmptyDistributionError, InvalidContextError, InvalidCountError, NotInSupportError
from app.models.domain import (
    DenominatorPolicy,
    NormalizationMode,
    Role,
    SmoothingContext,
    TripletRegion,
)
from tests.strategies import distributions, random_triples, triples


@pytest.fixture
def worked():
    p = from_counts([("a", 2), ("b", 1), ("c", 1)], label="p")
    q = from_counts([("a", 1), ("b", 1)], label="q")
    r = from_counts([("a", 1)], label="r")
    return p, q, r


def test_from_counts_cardinalities(worked):
    """Test that distinct_count and token_total are derived from the counts"""
    p, _, _ = worked
    assert p.distinct_count == 3
    assert p.token_total == 4
    assert list(p.counts) == ["a", "b", "c"]


def test_from_counts_accumulates_duplicates():
    """Test that repeated items add up"""
    d = from_counts([("a", 1), ("b", 2), ("a", 3)])
    assert d.counts == {"a": 4, "b": 2}
    assert d.token_total == 6


@pytest.mark.parametrize("count", [0, -1, 1.5, True])
def test_from_counts_rejects_bad_counts(count):
    """Test that non-positive or non-integer counts are refused"""
    with pytest.raises(InvalidCountError):
        from_counts([("a", count)])


def test_from_counts_rejects_empty():
    """Test that an empty entry list is refused"""
    with pytest.raises(EmptyDistributionError):
        from_counts([], label="nothing")


def test_probability_modes(worked):
    """Test PaperLiteral and token normalization on the worked p"""
    p, _, _ = worked
    assert probability(p, "a", NormalizationMode.PAPER_LITERAL) == 2 / 3
    assert probability(p, "a", NormalizationMode.TOKEN) == 0.5
    assert probability(p, "b", NormalizationMode.STRICT) == 0.25


def test_paper_literal_mass_exceeds_one(worked):
    """Test that PaperLiteral values need not sum to 1 (here 4/3)"""
    p, _, _ = worked
    mass = math.fsum(probability(p, w, NormalizationMode.PAPER_LITERAL) for w in p.counts)
    assert mass == pytest.approx(4 / 3, rel=1e-15)


def test_probability_outside_support(worked):
    """Test that asking for an unseen item raises NotInSupport"""
    p, _, _ = worked
    with pytest.raises(NotInSupportError):
        probability(p, "zzz", NormalizationMode.TOKEN)


def test_smoothed_value_fallback(worked):
    """Test the 1/|T| fallback for unseen items"""
    p, q, _ = worked
    ctx = pair_context(p, q)
    assert ctx.denominator == 5
    assert ctx.denominator_policy is DenominatorPolicy.PAIR_SUM
    assert smoothed_value(q, "c", ctx) == 0.2
    assert smoothed_value(q, "a", ctx) == 0.5


def test_context_rejects_zero_denominator():
    """Test that |T| must be at least 1"""
    with pytest.raises(ValueError):
        SmoothingContext(denominator=0)


def test_explicit_pair_denominator(worked):
    """Test that an explicit denominator overrides the pair sum"""
    p, q, _ = worked
    ctx = pair_context(p, q, NormalizationMode.TOKEN, denominator=100)
    assert ctx.denominator == 100
    assert ctx.denominator_policy is DenominatorPolicy.EXPLICIT


def test_triplet_context_uses_union(worked):
    """Test that a triple shares |T| = |p u q u r| and alphabet T"""
    ctx = triplet_context(*worked)
    assert ctx.denominator == 3
    assert ctx.denominator_policy is DenominatorPolicy.TRIPLET_UNION
    assert ctx.alphabet == frozenset("abc")


def test_strict_vector_sums_to_one(worked):
    """Test joint renormalization over the evaluation alphabet"""
    p, q, _ = worked
    ctx = pair_context(p, q, NormalizationMode.STRICT)
    vector = evaluation_vector(q, evaluation_alphabet(p, q, ctx), ctx)
    assert list(vector) == ["a", "b", "c"]
    assert math.fsum(vector.values()) == pytest.approx(1.0, abs=1e-15)
    assert all(v > 0 for v in vector.values())


def test_alphabet_must_cover_supports(worked):
    """Test that an evaluation alphabet missing support items is rejected"""
    p, q, _ = worked
    ctx = pair_context(p, q, alphabet=frozenset("ab"))
    with pytest.raises(InvalidContextError):
        evaluation_alphabet(p, q, ctx)


def test_alphabet_may_extend_supports(worked):
    """Test that extra alphabet items are kept"""
    _, q, r = worked
    ctx = pair_context(q, r, alphabet=frozenset("abcz"))
    assert evaluation_alphabet(q, r, ctx) == frozenset("abcz")


def test_pair_regions(worked):
    """Test the three pair regions of the worked pair"""
    p, q, _ = worked
    regions = pair_regions(p, q)
    assert regions.only_first == {"c"}
    assert regions.both == {"a", "b"}
    assert regions.only_second == frozenset()


def test_triplet_regions_worked(worked):
    """Test the seven regions of the worked triple"""
    regions = triplet_regions(*worked)
    assert regions.pqr == {"a"}
    assert regions.pq_not_r == {"b"}
    assert regions.p_only == {"c"}
    assert sum(regions.cardinalities().values()) == 3


def test_zero_patterns():
    """Test the roles that vanish in each region"""
    assert zero_pattern(TripletRegion.PQR) == frozenset()
    assert zero_pattern(TripletRegion.P_ONLY) == {Role.Q, Role.R}
    assert zero_pattern(TripletRegion.PR_NOT_Q) == {Role.Q}
    assert zero_pattern(TripletRegion.QR_NOT_P) == {Role.P}
    assert zero_pattern("r_only") == {Role.P, Role.Q}


def test_region_partition_sweep():
    """Test that regions are disjoint, cover T and match their zero patterns"""
    for p, q, r in random_triples(seed=7, n=1000):
        regions = triplet_regions(p, q, r)
        seen = set()
        for region in TripletRegion:
            items = regions.of(region)
            assert not (seen & items)
            seen |= items
            vanishing = zero_pattern(region)
            for w in items:
                present = {role for role, d in zip(Role, (p, q, r)) if w in d}
                assert present == set(Role) - vanishing
        assert seen == p.support | q.support | r.support


def test_canonical_order_sorts_by_cardinality(worked):
    """Test that the triple is sorted by descending distinct_count"""
    p, q, r = worked
    (a, b, c), record = canonical_order(r, p, q)
    assert [d.label for d in (a, b, c)] == ["p", "q", "r"]
    assert record.permutation == (1, 2, 0)
    assert record.tie_flags == (False, False, False)
    assert not record.is_identity


def test_canonical_order_ties_are_flagged():
    """Test tie flags and the token_total tie-break"""
    x = from_counts([("a", 1), ("b", 1)], label="x")
    y = from_counts([("c", 5), ("d", 1)], label="y")
    z = from_counts([("e", 1)], label="z")
    (a, b, c), record = canonical_order(x, y, z)
    assert (a.label, b.label, c.label) == ("y", "x", "z")
    assert record.tie_flags == (True, True, False)
    assert record.tied


@settings(max_examples=200, deadline=None)
@given(triples())
def test_canonical_order_is_permutation_invariant(triple):
    """Test that every input ordering yields the same ordered triple"""
    reference, _ = canonical_order(*triple)
    for arrangement in itertools.permutations(triple):
        ordered, record = canonical_order(*arrangement)
        assert [d.counts for d in ordered] == [d.counts for d in reference]
        assert [d.distinct_count for d in ordered] == sorted(
            (d.distinct_count for d in triple), reverse=True
        )
        assert tuple(arrangement[i] for i in record.permutation) == ordered


@settings(max_examples=200, deadline=None)
@given(triples())
def test_canonical_order_is_idempotent(triple):
    """Test that ordering an ordered triple applies the identity permutation"""
    ordered, first = canonical_order(*triple)
    again, second = canonical_order(*ordered)
    assert second.is_identity
    assert again == ordered
    assert second.tie_flags == first.tie_flags
    assert second.labels == first.labels


@settings(max_examples=200, deadline=None)
@given(triples())
def test_pair_regions_agree_with_triplet_regions(triple):
    """Test that each pair region is the union of the matching triplet regions"""
    p, q, r = triple
    t = triplet_regions(p, q, r)

    pq = pair_regions(p, q)
    assert pq.only_first == t.p_only | t.pr_not_q
    assert pq.both == t.pqr | t.pq_not_r
    assert pq.only_second == t.q_only | t.qr_not_p

    pr = pair_regions(p, r)
    assert pr.only_first == t.p_only | t.pq_not_r
    assert pr.both == t.pqr | t.pr_not_q
    assert pr.only_second == t.r_only | t.qr_not_p

    qr = pair_regions(q, r)
    assert qr.both == t.pqr | t.qr_not_p
    assert qr.union() | t.p_only == p.support | q.support | r.support


@settings(max_examples=300, deadline=None)
@given(distributions(max_count=10**6))
def test_normalization_totals(d):
    """Test that Token values sum to 1 and PaperLiteral values to token_total / distinct_count"""
    token = math.fsum(probability(d, w, NormalizationMode.TOKEN) for w in d.support)
    literal = math.fsum(probability(d, w, NormalizationMode.PAPER_LITERAL) for w in d.support)
    assert token == pytest.approx(1.0, rel=1e-12)
    assert literal == pytest.approx(d.token_total / d.distinct_count, rel=1e-12)
    assert probability(d, next(iter(d.support)), NormalizationMode.STRICT) == probability(
        d, next(iter(d.support)), NormalizationMode.TOKEN
    )


@settings(max_examples=200, deadline=None)
@given(triples(), st.sampled_from(list(NormalizationMode)))
def test_smoothed_value_is_strictly_positive(triple, mode):
    """Test that every item of T has a positive smoothed value in every distribution"""
    p, q, r = triple
    contexts = [
        triplet_context(p, q, r, mode),
        pair_context(p, q, mode),
        pair_context(p, q, mode, denominator=10**6),
    ]
    universe = p.support | q.support | r.support | {"unseen"}
    for ctx in contexts:
        for d in triple:
            for w in universe:
                assert smoothed_value(d, w, ctx) > 0.0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
