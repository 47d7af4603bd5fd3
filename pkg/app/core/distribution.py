"""
Count distributions: probabilities, the elementary 1/|T| smoothing,
set-region decompositions and canonical ordering of triples.
"""

import math
import sys
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from app.core.errors import EmptyDistributionError, InvalidContextError, InvalidCountError, NotInSupportError
from app.models.domain import (
    CanonicalOrder,
    CountDistribution,
    DenominatorPolicy,
    ItemId,
    NormalizationMode,
    PairRegions,
    QRNormalizer,
    Role,
    SmoothingContext,
    TripletRegion,
    TripletRegions,
)
from app.utils.logger import get_logger

logger = get_logger(__name__)

# Largest count total whose ratios stay finite floats
MAX_TOTAL_COUNT = int(sys.float_info.max)


# Roles whose probability is zero (before smoothing) in each region of T
_ZERO_PATTERNS: Dict[TripletRegion, FrozenSet[Role]] = {
    TripletRegion.P_ONLY: frozenset({Role.Q, Role.R}),
    TripletRegion.PR_NOT_Q: frozenset({Role.Q}),
    TripletRegion.PQ_NOT_R: frozenset({Role.R}),
    TripletRegion.PQR: frozenset(),
    TripletRegion.Q_ONLY: frozenset({Role.P, Role.R}),
    TripletRegion.QR_NOT_P: frozenset({Role.P}),
    TripletRegion.R_ONLY: frozenset({Role.P, Role.Q}),
}


def from_counts(entries: Iterable[Tuple[str, int]], label: str = "") -> CountDistribution:
    """Build a distribution from (item, count) pairs; duplicate items accumulate"""
    counts: Dict[ItemId, int] = {}
    for item, count in entries:
        if isinstance(count, bool) or not isinstance(count, int) or count <= 0:
            raise InvalidCountError(f"count of {item!r} must be a positive integer, got {count!r}")
        counts[item] = counts.get(item, 0) + count

    if not counts:
        raise EmptyDistributionError(f"distribution {label!r} has no entries")

    total = sum(counts.values())
    if total > MAX_TOTAL_COUNT:
        raise InvalidCountError(f"counts of distribution {label!r} add up to a {len(str(total))}-digit total, beyond the float range")

    return CountDistribution(label=label, counts=counts)


def probability(d: CountDistribution, w: ItemId, mode: NormalizationMode) -> float:
    """
    Unsmoothed probability of an item of the support.

    Strict mode returns the token-normalized value; joint renormalization
    happens where the evaluation support is known (see evaluation_vector).
    """
    count = d.counts.get(w)
    if count is None:
        raise NotInSupportError(w, d.label)
    if mode is NormalizationMode.PAPER_LITERAL:
        return count / d.distinct_count
    return count / d.token_total


def smoothed_value(d: CountDistribution, w: ItemId, ctx: SmoothingContext) -> float:
    """Probability of w in d, or 1/|T| when w is unseen"""
    if w in d.counts:
        return probability(d, w, ctx.mode)
    return 1.0 / ctx.denominator


def evaluation_vector(
    d: CountDistribution,
    support: Iterable[ItemId],
    ctx: SmoothingContext,
) -> Dict[ItemId, float]:
    """
    Smoothed values of d over an evaluation support, in sorted item order.

    In Strict mode the values are divided by their total mass so they sum to 1.
    """
    items = sorted(support)
    values = {w: smoothed_value(d, w, ctx) for w in items}
    if ctx.mode is NormalizationMode.STRICT:
        mass = math.fsum(values.values())
        values = {w: v / mass for w, v in values.items()}
    return values


def pair_regions(p: CountDistribution, q: CountDistribution) -> PairRegions:
    first, second = p.support, q.support
    return PairRegions(
        only_first=first - second,
        both=first & second,
        only_second=second - first,
    )


def triplet_regions(p: CountDistribution, q: CountDistribution, r: CountDistribution) -> TripletRegions:
    sp, sq, sr = p.support, q.support, r.support
    return TripletRegions(
        p_only=sp - sq - sr,
        pr_not_q=(sp & sr) - sq,
        pq_not_r=(sp & sq) - sr,
        pqr=sp & sq & sr,
        q_only=sq - sp - sr,
        qr_not_p=(sq & sr) - sp,
        r_only=sr - sp - sq,
    )


def zero_pattern(region: TripletRegion) -> FrozenSet[Role]:
    """Which of p_w, q_w, r_w vanish (and so get smoothed) in a region"""
    return _ZERO_PATTERNS[TripletRegion(region)]


def _order_key(d: CountDistribution):
    return (-d.distinct_count, -d.token_total, d.label, tuple(d.counts.items()))


def canonical_order(
    p: CountDistribution,
    q: CountDistribution,
    r: CountDistribution,
) -> Tuple[Tuple[CountDistribution, CountDistribution, CountDistribution], CanonicalOrder]:
    """
    Sort a triple so that distinct_count is non-increasing.

    Ties fall back to token_total (descending), label, then contents; the
    sort is stable so identical distributions keep their input order.
    """
    inputs = (p, q, r)
    permutation = tuple(sorted(range(3), key=lambda i: _order_key(inputs[i])))
    ordered = tuple(inputs[i] for i in permutation)

    cards = [d.distinct_count for d in ordered]
    tie_flags = tuple(
        (i > 0 and cards[i] == cards[i - 1]) or (i < 2 and cards[i] == cards[i + 1])
        for i in range(3)
    )
    record = CanonicalOrder(
        permutation=permutation,
        tie_flags=tie_flags,
        labels=tuple(d.label for d in ordered),
    )
    if not record.is_identity or record.tied:
        logger.debug(f"Canonical order {record.permutation} (ties: {record.tie_flags})")
    return ordered, record


def pair_context(
    p: CountDistribution,
    q: CountDistribution,
    mode: NormalizationMode = NormalizationMode.PAPER_LITERAL,
    denominator: Optional[int] = None,
    alphabet: Optional[FrozenSet[ItemId]] = None,
) -> SmoothingContext:
    """Context for a standalone pair: |T| = |p| + |q| unless given explicitly"""
    if denominator is None:
        return SmoothingContext(
            mode=mode,
            denominator=p.distinct_count + q.distinct_count,
            denominator_policy=DenominatorPolicy.PAIR_SUM,
            alphabet=alphabet,
        )
    return SmoothingContext(
        mode=mode,
        denominator=denominator,
        denominator_policy=DenominatorPolicy.EXPLICIT,
        alphabet=alphabet,
    )


def triplet_context(
    p: CountDistribution,
    q: CountDistribution,
    r: CountDistribution,
    mode: NormalizationMode = NormalizationMode.PAPER_LITERAL,
    denominator: Optional[int] = None,
    qr_normalizer: QRNormalizer = QRNormalizer.UNION,
) -> SmoothingContext:
    """
    Context shared by the three pairwise divergences of a triple.

    The evaluation alphabet is T = p u q u r, so each distribution is the
    same point in every pair; |T| is the union cardinality unless explicit.
    """
    universe = p.support | q.support | r.support
    if denominator is None:
        return SmoothingContext(
            mode=mode,
            denominator=len(universe),
            denominator_policy=DenominatorPolicy.TRIPLET_UNION,
            alphabet=universe,
            qr_normalizer=qr_normalizer,
        )
    return SmoothingContext(
        mode=mode,
        denominator=denominator,
        denominator_policy=DenominatorPolicy.EXPLICIT,
        alphabet=universe,
        qr_normalizer=qr_normalizer,
    )


def evaluation_alphabet(
    p: CountDistribution,
    q: CountDistribution,
    ctx: SmoothingContext,
) -> FrozenSet[ItemId]:
    """The alphabet X a pair is evaluated over; must cover both supports"""
    union = p.support | q.support
    if ctx.alphabet is None:
        return union
    if not union <= ctx.alphabet:
        missing = sorted(union - ctx.alphabet)[:5]
        raise InvalidContextError(f"evaluation alphabet does not cover items {missing}")
    return ctx.alphabet
