"""
Kullback-Leibler and Jensen-Shannon divergences between two count
distributions, evaluated region by region (p\\q, p n q, q\\p) so that each
partial sum carries a fixed smoothing pattern. Logarithms are base 2.
"""

import math
from itertools import combinations, permutations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from app.core.distribution import (
    evaluation_alphabet,
    evaluation_vector,
    pair_regions,
    probability,
    smoothed_value,
)
from app.core.errors import DivisionByZeroError
from app.models.domain import (
    CountDistribution,
    DivergenceKind,
    DivergenceReport,
    ItemId,
    NormalizationMode,
    PairRegion,
    PairRegions,
    SmoothingContext,
)
from app.utils.logger import get_logger

logger = get_logger(__name__)

Triple = Tuple[CountDistribution, CountDistribution, CountDistribution]
DivergenceFn = Callable[[CountDistribution, CountDistribution], float]
Indiscernible = Callable[[CountDistribution, CountDistribution], bool]
ContextFactory = Callable[[Triple], SmoothingContext]

# Two evaluation vectors closer than this everywhere are the same point
_POINT_TOLERANCE = 1e-12


def _region_of(w: ItemId, regions: PairRegions) -> PairRegion:
    if w in regions.both:
        return PairRegion.BOTH
    if w in regions.only_first:
        return PairRegion.ONLY_FIRST
    if w in regions.only_second:
        return PairRegion.ONLY_SECOND
    return PairRegion.OUTSIDE


def kl_term(a: float, b: float) -> float:
    # 0 * log 0 = 0
    if a == 0.0:
        return 0.0
    return a * math.log2(a / b)


def js_term(a: float, b: float) -> float:
    m = a + b
    return 0.5 * (kl_term(a, m / 2.0) + kl_term(b, m / 2.0))


def _collect(
    terms: Dict[PairRegion, List[float]],
    keep: Sequence[PairRegion],
) -> Tuple[float, Dict[str, float]]:
    region_terms = {
        region.value: math.fsum(terms.get(region, []))
        for region in PairRegion
        if region in keep or terms.get(region)
    }
    value = math.fsum(t for region in PairRegion for t in terms.get(region, []))
    return value, region_terms


def evaluation_vectors(
    p: CountDistribution,
    q: CountDistribution,
    ctx: SmoothingContext,
) -> Tuple[Dict[ItemId, float], Dict[ItemId, float]]:
    """Both sides of a pair over the evaluation alphabet, as JS and Strict KL see them"""
    alphabet = evaluation_alphabet(p, q, ctx)
    return evaluation_vector(p, alphabet, ctx), evaluation_vector(q, alphabet, ctx)


def kl(p: CountDistribution, q: CountDistribution, ctx: SmoothingContext) -> DivergenceReport:
    """
    D_KL(p||q) = sum_w p_w log2(p_w / q_w).

    In PaperLiteral and TokenNormalized modes the sum runs over support(p):
    items of p\\q use the smoothed q_w = 1/|T|, items of p n q use no
    smoothing. In Strict mode both sides are smoothed and renormalized over
    the evaluation alphabet, so the first side is positive on the whole
    alphabet and the sum runs over it.
    """
    regions = pair_regions(p, q)
    alphabet = evaluation_alphabet(p, q, ctx)

    if ctx.mode is NormalizationMode.STRICT:
        first = evaluation_vector(p, alphabet, ctx)
        second = evaluation_vector(q, alphabet, ctx)
        keep = (PairRegion.ONLY_FIRST, PairRegion.BOTH, PairRegion.ONLY_SECOND)
    else:
        items = sorted(p.support)
        first = {w: probability(p, w, ctx.mode) for w in items}
        second = {w: smoothed_value(q, w, ctx) for w in items}
        keep = (PairRegion.ONLY_FIRST, PairRegion.BOTH)

    terms: Dict[PairRegion, List[float]] = {}
    for w, p_w in first.items():
        q_w = second[w]
        if q_w <= 0.0:
            raise DivisionByZeroError(
                f"q_w = {q_w} for item {w!r} in D_KL({p.label}||{q.label}); check the smoothing denominator"
            )
        terms.setdefault(_region_of(w, regions), []).append(kl_term(p_w, q_w))

    value, region_terms = _collect(terms, keep)
    logger.debug(f"D_KL({p.label}||{q.label}) = {value:.6g} bits over {len(first)} items")
    return DivergenceReport(
        kind=DivergenceKind.KL,
        value=value,
        region_terms=region_terms,
        context=ctx,
        first_label=p.label,
        second_label=q.label,
    )


def js(p: CountDistribution, q: CountDistribution, ctx: SmoothingContext) -> DivergenceReport:
    """
    D_JS(p||q) = 1/2 sum_{w in X} [p_w log2(2p_w/(p_w+q_w)) + q_w log2(2q_w/(p_w+q_w))].

    X is the evaluation alphabet (the union of the supports by default);
    the side absent at w takes 1/|T|.
    """
    regions = pair_regions(p, q)
    first, second = evaluation_vectors(p, q, ctx)

    terms: Dict[PairRegion, List[float]] = {}
    for w, p_w in first.items():
        terms.setdefault(_region_of(w, regions), []).append(js_term(p_w, second[w]))

    keep = (PairRegion.ONLY_FIRST, PairRegion.BOTH, PairRegion.ONLY_SECOND)
    value, region_terms = _collect(terms, keep)
    logger.debug(f"D_JS({p.label}||{q.label}) = {value:.6g} bits over {len(first)} items")
    return DivergenceReport(
        kind=DivergenceKind.JS,
        value=value,
        region_terms=region_terms,
        context=ctx,
        first_label=p.label,
        second_label=q.label,
    )


def divergence(
    kind: DivergenceKind,
    p: CountDistribution,
    q: CountDistribution,
    ctx: SmoothingContext,
) -> DivergenceReport:
    if DivergenceKind(kind) is DivergenceKind.KL:
        return kl(p, q, ctx)
    return js(p, q, ctx)


def sqrt_js(p: CountDistribution, q: CountDistribution, ctx: SmoothingContext) -> float:
    """Square root of D_JS, clipped at zero; a metric only when every pair shares one Strict context"""
    return math.sqrt(max(js(p, q, ctx).value, 0.0))


class AxiomOutcome(BaseModel):
    passed: bool = True
    checks: int = 0
    witness: Optional[Tuple[str, ...]] = Field(None, description="Labels of the first failing sample")
    detail: str = ""


class AxiomReport(BaseModel):
    non_negativity: AxiomOutcome = Field(default_factory=AxiomOutcome)
    identity: AxiomOutcome = Field(default_factory=AxiomOutcome)
    symmetry: AxiomOutcome = Field(default_factory=AxiomOutcome)
    triangle: AxiomOutcome = Field(default_factory=AxiomOutcome)

    @property
    def is_metric(self) -> bool:
        return all(
            outcome.passed
            for outcome in (self.non_negativity, self.identity, self.symmetry, self.triangle)
        )


def _record(outcome: AxiomOutcome, ok: bool, witness: Sequence[CountDistribution], detail: str) -> None:
    outcome.checks += 1
    if not ok and outcome.passed:
        outcome.passed = False
        outcome.witness = tuple(d.label for d in witness)
        outcome.detail = detail


def _same_counts(a: CountDistribution, b: CountDistribution) -> bool:
    return a.counts == b.counts


def _bind(d: Callable[..., float], ctx: SmoothingContext) -> DivergenceFn:
    def measure(x: CountDistribution, y: CountDistribution) -> float:
        return d(x, y, ctx)
    return measure


def _same_point(ctx: SmoothingContext) -> Indiscernible:
    def same(a: CountDistribution, b: CountDistribution) -> bool:
        first, second = evaluation_vectors(a, b, ctx)
        return all(abs(first[w] - second[w]) <= _POINT_TOLERANCE for w in first)
    return same


def metric_axiom_check(
    d: Callable[..., float],
    samples: Sequence[Triple],
    tolerance: float,
    indiscernible: Optional[Indiscernible] = None,
    context: Optional[ContextFactory] = None,
) -> AxiomReport:
    """
    Check the four metric axioms of d over sample triples.

    Every ordered pair of a triple is checked for non-negativity, symmetry
    and identity of indiscernibles; every arrangement of the triple for the
    triangle inequality. The first failing sample of each axiom is kept as
    its witness.

    Without `context`, d takes two distributions. With it, d takes
    (x, y, ctx) and every pair of a triple is evaluated under the single
    context built for that triple, e.g. triplet_context in Strict mode.
    Per-pair contexts give each pair its own alphabet and |T|, so the same
    distribution is a different point in each pair and sqrt(JS) is not a
    metric under them. Under a shared context two distributions are
    indiscernible when their evaluation vectors coincide.
    """
    if not samples:
        raise ValueError("metric_axiom_check needs at least one sample triple")
    report = AxiomReport()

    for triple in samples:
        if context is None:
            measure: DivergenceFn = d
            same = indiscernible or _same_counts
        else:
            ctx = context(triple)
            measure = _bind(d, ctx)
            same = indiscernible or _same_point(ctx)

        values: Dict[Tuple[int, int], float] = {}
        for i, j in permutations(range(3), 2):
            values[(i, j)] = measure(triple[i], triple[j])
        for i in range(3):
            values[(i, i)] = measure(triple[i], triple[i])

        for (i, j), v in values.items():
            _record(report.non_negativity, v >= -tolerance, (triple[i], triple[j]),
                    f"d = {v!r} < 0")

        for i, j in combinations(range(3), 2):
            gap = abs(values[(i, j)] - values[(j, i)])
            _record(report.symmetry, gap <= tolerance, (triple[i], triple[j]),
                    f"|d(x,y) - d(y,x)| = {gap!r}")

        for i in range(3):
            _record(report.identity, abs(values[(i, i)]) <= tolerance, (triple[i],),
                    f"d(x,x) = {values[(i, i)]!r}")
        for i, j in permutations(range(3), 2):
            if not same(triple[i], triple[j]):
                _record(report.identity, values[(i, j)] > tolerance, (triple[i], triple[j]),
                        f"d(x,y) = {values[(i, j)]!r} for distinct x, y")

        for i, j, k in permutations(range(3), 3):
            slack = values[(i, j)] + values[(j, k)] + tolerance - values[(i, k)]
            _record(report.triangle, slack >= 0.0, (triple[i], triple[j], triple[k]),
                    f"d(x,z) exceeds d(x,y) + d(y,z) by {-slack + tolerance!r}")

    logger.info(
        f"Axiom check over {len(samples)} samples: "
        f"non-negativity={report.non_negativity.passed}, identity={report.identity.passed}, "
        f"symmetry={report.symmetry.passed}, triangle={report.triangle.passed}"
    )
    return report
