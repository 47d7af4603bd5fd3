"""
Trivergences of three count distributions.

Two constructions are provided:

* product form: D(p||q) * D(q||r) * D(p||r), in bits^3;
* compound form: D[p || D(q||r) / n], where the inner divergence, scaled by
  a normalizer n, stands in for the second distribution (bits).

Both the KL and JS bases are supported. The canonical entry points sort the
triple by cardinality first (|p| >= |q| >= |r|); evaluate_variant computes
any evaluable brace entry with the roles exactly as given.
"""

import math
from typing import Dict, List, Optional, Tuple

from app.core.distribution import canonical_order, probability, triplet_context
from app.core.divergence import divergence, js, js_term, kl, kl_term
from app.core.errors import NotEvaluableError
from app.models.domain import (
    CanonicalOrder,
    CompoundComponents,
    CountDistribution,
    DivergenceKind,
    NormalizationMode,
    ProductComponents,
    QRNormalizer,
    Role,
    SmoothingContext,
    TrivergenceForm,
    TrivergenceResult,
    VariantDescriptor,
)
from app.utils.logger import get_logger

logger = get_logger(__name__)

Pair = Tuple[Role, Role]

_P, _Q, _R = Role.P, Role.Q, Role.R

_PRODUCT_ROWS: List[Tuple[Pair, Pair, Pair]] = [
    ((_P, _Q), (_Q, _R), (_P, _R)),
    ((_Q, _P), (_R, _Q), (_R, _P)),
]

# (outer distribution, inner pair) for the scalar-second entries, in brace order
_COMPOUND_ROWS: List[Tuple[Role, Pair]] = [
    (_P, (_Q, _R)), (_P, (_R, _Q)),
    (_Q, (_P, _R)), (_Q, (_R, _P)),
    (_R, (_P, _Q)), (_R, (_Q, _P)),
]


def _pair_text(pair: Pair) -> str:
    return f"D({pair[0].value}||{pair[1].value})"


def _build_catalog() -> Dict[TrivergenceForm, List[VariantDescriptor]]:
    product = [
        VariantDescriptor(
            index=i,
            form=TrivergenceForm.PRODUCT,
            text=" * ".join(_pair_text(pair) for pair in row),
            factors=row,
        )
        for i, row in enumerate(_PRODUCT_ROWS)
    ]

    compound = [
        VariantDescriptor(
            index=i,
            form=TrivergenceForm.COMPOUND,
            text=f"D[{outer.value} || {_pair_text(inner)}]",
            outer=outer,
            inner=inner,
        )
        for i, (outer, inner) in enumerate(_COMPOUND_ROWS)
    ]
    compound += [
        VariantDescriptor(
            index=len(_COMPOUND_ROWS) + i,
            form=TrivergenceForm.COMPOUND,
            text=f"D[{_pair_text(inner)} || {outer.value}]",
            outer=outer,
            inner=inner,
            scalar_first=True,
            evaluable=False,
        )
        for i, (outer, inner) in enumerate(_COMPOUND_ROWS)
    ]
    return {TrivergenceForm.PRODUCT: product, TrivergenceForm.COMPOUND: compound}


_CATALOG = _build_catalog()


def enumerate_variants(form: TrivergenceForm) -> List[VariantDescriptor]:
    """Every brace entry of a form: 2 products, 12 compounds (6 evaluable)"""
    return list(_CATALOG[TrivergenceForm(form)])


def _identity_order(p: CountDistribution, q: CountDistribution, r: CountDistribution) -> CanonicalOrder:
    return CanonicalOrder(
        permutation=(0, 1, 2),
        tie_flags=(False, False, False),
        labels=(p.label, q.label, r.label),
    )


def _product(
    roles: Dict[Role, CountDistribution],
    variant: VariantDescriptor,
    base: DivergenceKind,
    ctx: SmoothingContext,
    record: CanonicalOrder,
) -> TrivergenceResult:
    factors = [divergence(base, roles[a], roles[b], ctx) for a, b in variant.factors]
    value = factors[0].value * factors[1].value * factors[2].value
    logger.debug(f"{variant.text} [{base.value}] = {value:.6g} bits^3")
    return TrivergenceResult(
        form=TrivergenceForm.PRODUCT,
        base=base,
        value=value,
        variant=variant.text,
        components=ProductComponents(factors=factors),
        canonicalization=record,
        context=ctx,
    )


def _scalar_term(p_x: float, s: float) -> float:
    # log difference keeps tiny scalars finite
    return p_x * (math.log2(p_x) - math.log2(s))


def _compound_kl(
    outer: CountDistribution,
    first: CountDistribution,
    second: CountDistribution,
    variant: VariantDescriptor,
    ctx: SmoothingContext,
    record: CanonicalOrder,
) -> TrivergenceResult:
    inner = kl(first, second, ctx)
    normalizer = first.distinct_count
    scalar = inner.value / normalizer
    fallback = 1.0 / ctx.denominator

    zero_branch = scalar <= 0.0
    effective = fallback if zero_branch else scalar
    if zero_branch:
        logger.debug(f"Zero branch in {variant.text}: inner D_KL = {inner.value!r}")

    shared: List[float] = []
    outer_only: List[float] = []
    for x in sorted(outer.support):
        p_x = probability(outer, x, ctx.mode)
        if x in first.counts:
            shared.append(_scalar_term(p_x, effective))
        else:
            outer_only.append(kl_term(p_x, fallback))

    value = math.fsum(shared + outer_only)
    return TrivergenceResult(
        form=TrivergenceForm.COMPOUND,
        base=DivergenceKind.KL,
        value=value,
        variant=variant.text,
        components=CompoundComponents(
            inner=inner,
            scalar=scalar,
            effective_scalar=effective,
            normalizer=normalizer,
            normalizer_policy="distinct",
            region_terms={"shared": math.fsum(shared), "outer_only": math.fsum(outer_only)},
        ),
        canonicalization=record,
        context=ctx,
        zero_branch=zero_branch,
    )


def _compound_js(
    outer: CountDistribution,
    first: CountDistribution,
    second: CountDistribution,
    variant: VariantDescriptor,
    ctx: SmoothingContext,
    record: CanonicalOrder,
) -> TrivergenceResult:
    inner = js(first, second, ctx)
    inner_support = first.support | second.support
    if ctx.qr_normalizer is QRNormalizer.UNION:
        normalizer = len(inner_support)
    else:
        normalizer = first.distinct_count + second.distinct_count
    scalar = inner.value / normalizer
    fallback = 1.0 / ctx.denominator

    zero_branch = scalar <= 0.0
    effective = fallback if zero_branch else scalar
    if zero_branch:
        logger.debug(f"Zero branch in {variant.text}: inner D_JS = {inner.value!r}")

    items = sorted(outer.support | inner_support)
    a = {x: probability(outer, x, ctx.mode) if x in outer.counts else fallback for x in items}
    b = {x: effective if x in inner_support else fallback for x in items}
    if ctx.mode is NormalizationMode.STRICT:
        a_mass, b_mass = math.fsum(a.values()), math.fsum(b.values())
        a = {x: v / a_mass for x, v in a.items()}
        b = {x: v / b_mass for x, v in b.items()}

    regions: Dict[str, List[float]] = {"shared": [], "outer_only": [], "inner_only": []}
    for x in items:
        if x in outer.counts:
            key = "shared" if x in inner_support else "outer_only"
        else:
            key = "inner_only"
        regions[key].append(js_term(a[x], b[x]))

    value = math.fsum(t for terms in regions.values() for t in terms)
    return TrivergenceResult(
        form=TrivergenceForm.COMPOUND,
        base=DivergenceKind.JS,
        value=value,
        variant=variant.text,
        components=CompoundComponents(
            inner=inner,
            scalar=scalar,
            effective_scalar=effective,
            normalizer=normalizer,
            normalizer_policy=ctx.qr_normalizer.value,
            region_terms={key: math.fsum(terms) for key, terms in regions.items()},
        ),
        canonicalization=record,
        context=ctx,
        zero_branch=zero_branch,
    )


def _evaluate(
    variant: VariantDescriptor,
    roles: Dict[Role, CountDistribution],
    base: DivergenceKind,
    ctx: SmoothingContext,
    record: CanonicalOrder,
) -> TrivergenceResult:
    if variant.form is TrivergenceForm.PRODUCT:
        return _product(roles, variant, base, ctx, record)

    outer = roles[variant.outer]
    first, second = (roles[role] for role in variant.inner)
    if base is DivergenceKind.KL:
        return _compound_kl(outer, first, second, variant, ctx, record)
    return _compound_js(outer, first, second, variant, ctx, record)


def _canonical(
    p: CountDistribution,
    q: CountDistribution,
    r: CountDistribution,
    mode: NormalizationMode,
    denominator: Optional[int],
    qr_normalizer: QRNormalizer,
) -> Tuple[Dict[Role, CountDistribution], SmoothingContext, CanonicalOrder]:
    (cp, cq, cr), record = canonical_order(p, q, r)
    ctx = triplet_context(cp, cq, cr, NormalizationMode(mode), denominator, QRNormalizer(qr_normalizer))
    return {Role.P: cp, Role.Q: cq, Role.R: cr}, ctx, record


def triv_product(
    p: CountDistribution,
    q: CountDistribution,
    r: CountDistribution,
    base: DivergenceKind,
    mode: NormalizationMode,
    denominator: Optional[int] = None,
) -> TrivergenceResult:
    """D(p||q) * D(q||r) * D(p||r) over the canonically ordered triple"""
    roles, ctx, record = _canonical(p, q, r, mode, denominator, QRNormalizer.UNION)
    return _product(roles, _CATALOG[TrivergenceForm.PRODUCT][0], DivergenceKind(base), ctx, record)


def triv_compound_kl(
    p: CountDistribution,
    q: CountDistribution,
    r: CountDistribution,
    mode: NormalizationMode,
    denominator: Optional[int] = None,
) -> TrivergenceResult:
    """
    D_KL[p || D_KL(q||r)/|q|] over the canonically ordered triple.

    The scalar s replaces q_x on p n q; items of p\\q take 1/|T|. A scalar
    s <= 0 is replaced by 1/|T| and the result is flagged zero_branch.
    """
    roles, ctx, record = _canonical(p, q, r, mode, denominator, QRNormalizer.UNION)
    variant = _CATALOG[TrivergenceForm.COMPOUND][0]
    return _compound_kl(roles[Role.P], roles[Role.Q], roles[Role.R], variant, ctx, record)


def triv_compound_js(
    p: CountDistribution,
    q: CountDistribution,
    r: CountDistribution,
    mode: NormalizationMode,
    denominator: Optional[int] = None,
    qr_normalizer: QRNormalizer = QRNormalizer.UNION,
) -> TrivergenceResult:
    """
    D_JS[p || D_JS(q||r)/|QR|] with QR = q u r.

    Cases: x in p n QR uses (p_x, s); x in p\\QR uses (p_x, 1/|T|);
    x in QR\\p uses (1/|T|, s).
    """
    roles, ctx, record = _canonical(p, q, r, mode, denominator, qr_normalizer)
    variant = _CATALOG[TrivergenceForm.COMPOUND][0]
    return _compound_js(roles[Role.P], roles[Role.Q], roles[Role.R], variant, ctx, record)


def trivergence(
    form: TrivergenceForm,
    base: DivergenceKind,
    p: CountDistribution,
    q: CountDistribution,
    r: CountDistribution,
    mode: NormalizationMode,
    denominator: Optional[int] = None,
    qr_normalizer: QRNormalizer = QRNormalizer.UNION,
) -> TrivergenceResult:
    if TrivergenceForm(form) is TrivergenceForm.PRODUCT:
        return triv_product(p, q, r, base, mode, denominator)
    if DivergenceKind(base) is DivergenceKind.KL:
        return triv_compound_kl(p, q, r, mode, denominator)
    return triv_compound_js(p, q, r, mode, denominator, qr_normalizer)


def evaluate_variant(
    v: VariantDescriptor,
    p: CountDistribution,
    q: CountDistribution,
    r: CountDistribution,
    base: DivergenceKind,
    mode: NormalizationMode,
    denominator: Optional[int] = None,
    qr_normalizer: QRNormalizer = QRNormalizer.UNION,
) -> TrivergenceResult:
    """Evaluate one brace entry with p, q, r in exactly the roles given"""
    if not v.evaluable:
        raise NotEvaluableError(
            f"{v.text} is not evaluable: undefined in source "
            f"(no evaluation rule exists for a scalar as the first argument)"
        )
    ctx = triplet_context(p, q, r, NormalizationMode(mode), denominator, QRNormalizer(qr_normalizer))
    roles = {Role.P: p, Role.Q: q, Role.R: r}
    return _evaluate(v, roles, DivergenceKind(base), ctx, _identity_order(p, q, r))
