"""
Reference implementations for verification.

Deliberately naive: every quantity is recomputed from raw counts in mpmath
arithmetic (ORACLE_DPS decimal digits), sums run item by item over an
explicit sorted alphabet, and no region decomposition or compensated
summation is involved. Policy (canonical order, |T|, evaluation alphabet,
zero branch) is the same as in the kernels.
"""

from typing import Any, Dict, List, Optional, Tuple

import mpmath as mp
from pydantic import BaseModel, ConfigDict, Field

from app.core.distribution import canonical_order, triplet_context
from app.models.domain import (
    CountDistribution,
    DivergenceKind,
    ItemId,
    NormalizationMode,
    QRNormalizer,
    SmoothingContext,
    TrivergenceForm,
)
from config.settings import settings


class OracleValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: Any = Field(..., description="mpmath.mpf at working precision")
    term_trace: List[Tuple[str, Any]] = Field(default_factory=list)
    factors: List["OracleValue"] = Field(default_factory=list)
    zero_branch: bool = False

    def as_float(self) -> float:
        return float(self.value)

    def abs_term_sum(self) -> float:
        """Sum of |term|: the magnitude the sum's rounding error scales with"""
        return float(mp.fsum(abs(t) for _, t in self.term_trace))


def _prob(d: CountDistribution, w: ItemId, ctx: SmoothingContext):
    # smoothing rule inline, at working precision
    count = d.counts.get(w)
    if count is None:
        return mp.mpf(1) / ctx.denominator
    if ctx.mode is NormalizationMode.PAPER_LITERAL:
        return mp.mpf(count) / d.distinct_count
    return mp.mpf(count) / d.token_total


def _alphabet(p: CountDistribution, q: CountDistribution, ctx: SmoothingContext) -> List[ItemId]:
    items = set(p.counts) | set(q.counts)
    if ctx.alphabet is not None:
        items |= set(ctx.alphabet)
    return sorted(items)


def _side(d: CountDistribution, items: List[ItemId], ctx: SmoothingContext) -> Dict[ItemId, Any]:
    values = {w: _prob(d, w, ctx) for w in items}
    if ctx.mode is NormalizationMode.STRICT:
        mass = mp.fsum(values.values())
        values = {w: v / mass for w, v in values.items()}
    return values


def _xlog(a, b):
    if a == 0:
        return mp.mpf(0)
    return a * mp.log(a / b, 2)


def _trace_value(trace: List[Tuple[str, Any]], **extra) -> OracleValue:
    return OracleValue(value=mp.fsum(t for _, t in trace), term_trace=trace, **extra)


def kl_direct(p: CountDistribution, q: CountDistribution, ctx: SmoothingContext) -> OracleValue:
    """KL term by term over support(p) (the evaluation alphabet in Strict mode)"""
    with mp.workdps(settings.ORACLE_DPS):
        if ctx.mode is NormalizationMode.STRICT:
            items = _alphabet(p, q, ctx)
            ps, qs = _side(p, items, ctx), _side(q, items, ctx)
        else:
            items = sorted(p.counts)
            ps = {w: _prob(p, w, ctx) for w in items}
            qs = {w: _prob(q, w, ctx) for w in items}
        trace = [(w, _xlog(ps[w], qs[w])) for w in items]
        return _trace_value(trace)


def js_direct(p: CountDistribution, q: CountDistribution, ctx: SmoothingContext) -> OracleValue:
    """JS term by term over the evaluation alphabet"""
    with mp.workdps(settings.ORACLE_DPS):
        items = _alphabet(p, q, ctx)
        ps, qs = _side(p, items, ctx), _side(q, items, ctx)
        trace = []
        for w in items:
            m = (ps[w] + qs[w]) / 2
            trace.append((w, (_xlog(ps[w], m) + _xlog(qs[w], m)) / 2))
        return _trace_value(trace)


def _direct(base: DivergenceKind, p, q, ctx) -> OracleValue:
    if base is DivergenceKind.KL:
        return kl_direct(p, q, ctx)
    return js_direct(p, q, ctx)


def _compound_kl_direct(p, q, r, ctx) -> OracleValue:
    inner = kl_direct(q, r, ctx)
    with mp.workdps(settings.ORACLE_DPS):
        s = inner.value / q.distinct_count
        zero_branch = s <= 0
        if zero_branch:
            s = mp.mpf(1) / ctx.denominator
        trace = []
        for x in sorted(p.counts):
            p_x = _prob(p, x, ctx)
            q_x = s if x in q.counts else mp.mpf(1) / ctx.denominator
            trace.append((x, _xlog(p_x, q_x)))
        return _trace_value(trace, factors=[inner], zero_branch=bool(zero_branch))


def _compound_js_direct(p, q, r, ctx) -> OracleValue:
    inner = js_direct(q, r, ctx)
    with mp.workdps(settings.ORACLE_DPS):
        qr = set(q.counts) | set(r.counts)
        if ctx.qr_normalizer is QRNormalizer.UNION:
            normalizer = len(qr)
        else:
            normalizer = q.distinct_count + r.distinct_count
        s = inner.value / normalizer
        zero_branch = s <= 0
        if zero_branch:
            s = mp.mpf(1) / ctx.denominator

        items = sorted(set(p.counts) | qr)
        a = {x: _prob(p, x, ctx) for x in items}
        b = {x: s if x in qr else mp.mpf(1) / ctx.denominator for x in items}
        if ctx.mode is NormalizationMode.STRICT:
            a_mass, b_mass = mp.fsum(a.values()), mp.fsum(b.values())
            a = {x: v / a_mass for x, v in a.items()}
            b = {x: v / b_mass for x, v in b.items()}

        trace = []
        for x in items:
            m = (a[x] + b[x]) / 2
            trace.append((x, (_xlog(a[x], m) + _xlog(b[x], m)) / 2))
        return _trace_value(trace, factors=[inner], zero_branch=bool(zero_branch))


def trivergence_direct(
    form: TrivergenceForm,
    base: DivergenceKind,
    p: CountDistribution,
    q: CountDistribution,
    r: CountDistribution,
    mode: NormalizationMode,
    denominator: Optional[int] = None,
    qr_normalizer: QRNormalizer = QRNormalizer.UNION,
) -> OracleValue:
    """Canonical product or compound trivergence composed from the direct pairwise oracles"""
    form, base = TrivergenceForm(form), DivergenceKind(base)
    (p, q, r), _ = canonical_order(p, q, r)
    ctx = triplet_context(p, q, r, NormalizationMode(mode), denominator, QRNormalizer(qr_normalizer))

    if form is TrivergenceForm.PRODUCT:
        factors = [_direct(base, p, q, ctx), _direct(base, q, r, ctx), _direct(base, p, r, ctx)]
        with mp.workdps(settings.ORACLE_DPS):
            value = factors[0].value * factors[1].value * factors[2].value
        return OracleValue(value=value, term_trace=[("product", value)], factors=factors)

    if base is DivergenceKind.KL:
        return _compound_kl_direct(p, q, r, ctx)
    return _compound_js_direct(p, q, r, ctx)


OracleValue.model_rebuild()
