from pathlib import Path
from typing import Callable, Dict, List, Optional, TextIO

from joblib import Parallel, delayed
from pydantic import BaseModel

from app.cli.output import emit
from app.core.distribution import pair_context
from app.core.divergence import divergence
from app.core.errors import (
    ConsistencyError,
    DistributionError,
    DivisionByZeroError,
    InvalidContextError,
    NotEvaluableError,
)
from app.core.trivergence import enumerate_variants, evaluate_variant, trivergence
from app.ingest.loaders import distribution_from_text, distribution_from_tsv
from app.models.domain import (
    CompoundComponents,
    CountDistribution,
    DivergenceKind,
    DivergenceReport,
    NormalizationMode,
    QRNormalizer,
    TrivergenceForm,
    TrivergenceResult,
)
from app.models.schemas import (
    CanonicalOrderDocument,
    DivDocument,
    FactorDocument,
    MatrixDocument,
    RunConfig,
    TokenizerConfig,
    TrivComponentsDocument,
    TrivDocument,
    VariantRow,
    VariantsDocument,
)
from app.utils.logger import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INVALID = 3
EXIT_INTERNAL = 4

NOT_EVALUABLE_NOTE = "not evaluable: undefined in source"


def load_inputs(cfg: RunConfig) -> List[CountDistribution]:
    """Read every input file; the path is the distribution's label"""
    tokenizer = TokenizerConfig(lowercase=cfg.lowercase, ngram_n=cfg.ngram_n)
    distributions = []
    for path in cfg.inputs:
        raw = Path(path).read_bytes()
        if cfg.input_kind == "tsv":
            d = distribution_from_tsv(raw, label=path)
        else:
            d = distribution_from_text(raw, tokenizer, label=path)
        logger.info(f"Loaded {path}: {d.distinct_count} distinct items, {d.token_total} tokens")
        distributions.append(d)
    return distributions


def _factor(report: DivergenceReport) -> FactorDocument:
    return FactorDocument(
        first=report.first_label,
        second=report.second_label,
        value_bits=report.value,
        region_terms=report.region_terms,
    )


def run_div(cfg: RunConfig) -> DivDocument:
    p, q = load_inputs(cfg)
    ctx = pair_context(p, q, NormalizationMode(cfg.mode), cfg.denominator)
    report = divergence(DivergenceKind(cfg.base), p, q, ctx)
    return DivDocument(
        base=cfg.base,
        mode=cfg.mode,
        denominator=ctx.denominator,
        denominator_policy=ctx.denominator_policy.value,
        value_bits=report.value,
        region_terms=report.region_terms,
        labels=[p.label, q.label],
        tie_flags={
            "cardinality_tie": p.distinct_count == q.distinct_count,
            "first_larger": p.distinct_count > q.distinct_count,
        },
    )


def _triv_document(cfg: RunConfig, result: TrivergenceResult, labels: List[str]) -> TrivDocument:
    components = result.components
    if isinstance(components, CompoundComponents):
        body = TrivComponentsDocument(
            inner=_factor(components.inner),
            scalar=components.scalar,
            effective_scalar=components.effective_scalar,
            normalizer=components.normalizer,
            normalizer_policy=components.normalizer_policy,
            region_terms=components.region_terms,
        )
    else:
        body = TrivComponentsDocument(factors=[_factor(f) for f in components.factors])

    record = result.canonicalization
    return TrivDocument(
        form=result.form.value,
        base=result.base.value,
        mode=cfg.mode,
        variant=result.variant,
        denominator=result.context.denominator,
        denominator_policy=result.context.denominator_policy.value,
        value=result.value,
        units=result.units,
        components=body,
        canonical_order=CanonicalOrderDocument(
            labels=list(record.labels),
            permutation=list(record.permutation),
            tie_flags=list(record.tie_flags),
        ),
        zero_branch_flag=result.zero_branch,
        labels=labels,
    )


def run_triv(cfg: RunConfig) -> TrivDocument:
    p, q, r = load_inputs(cfg)
    result = trivergence(
        TrivergenceForm(cfg.form),
        DivergenceKind(cfg.base),
        p, q, r,
        NormalizationMode(cfg.mode),
        denominator=cfg.denominator,
        qr_normalizer=QRNormalizer(cfg.qr_normalizer),
    )
    logger.info(f"Trivergence {result.variant} [{cfg.base}, {cfg.mode}] = {result.value!r} {result.units}")
    return _triv_document(cfg, result, [p.label, q.label, r.label])


def matrix_cell(
    kind: DivergenceKind,
    p: CountDistribution,
    q: CountDistribution,
    mode: NormalizationMode,
    denominator: Optional[int],
) -> float:
    return divergence(kind, p, q, pair_context(p, q, mode, denominator)).value


def run_matrix(cfg: RunConfig) -> MatrixDocument:
    distributions = load_inputs(cfg)
    n = len(distributions)
    kind = DivergenceKind(cfg.base)
    mode = NormalizationMode(cfg.mode)

    # Parallel returns results in submission order, so rows come out row-major
    values = Parallel(n_jobs=cfg.workers)(
        delayed(matrix_cell)(kind, distributions[i], distributions[j], mode, cfg.denominator)
        for i in range(n)
        for j in range(n)
    )
    matrix = [list(values[i * n:(i + 1) * n]) for i in range(n)]

    if kind is DivergenceKind.JS:
        for i in range(n):
            for j in range(i + 1, n):
                if matrix[i][j] != matrix[j][i]:
                    raise ConsistencyError(
                        f"JS matrix is not symmetric at ({i}, {j}): {matrix[i][j]!r} != {matrix[j][i]!r}"
                    )

    logger.info(f"Computed {n}x{n} {cfg.base} matrix")
    return MatrixDocument(
        base=cfg.base,
        mode=cfg.mode,
        denominator_policy=cfg.resolved_policy,
        labels=[d.label for d in distributions],
        matrix=matrix,
    )


def run_variants(cfg: RunConfig) -> VariantsDocument:
    form = TrivergenceForm(cfg.form)
    variants = enumerate_variants(form)
    triple = load_inputs(cfg) if cfg.evaluate else None

    rows = []
    for v in variants:
        row = VariantRow(index=v.index, form=v.form.value, variant=v.text, evaluable=v.evaluable)
        if triple is None:
            if not v.evaluable:
                row.note = NOT_EVALUABLE_NOTE
            rows.append(row)
            continue
        try:
            result = evaluate_variant(
                v, *triple,
                base=DivergenceKind(cfg.base),
                mode=NormalizationMode(cfg.mode),
                denominator=cfg.denominator,
                qr_normalizer=QRNormalizer(cfg.qr_normalizer),
            )
            row.value = result.value
            row.units = result.units
            row.zero_branch = result.zero_branch
        except NotEvaluableError as e:
            logger.info(str(e))
            row.note = NOT_EVALUABLE_NOTE
        rows.append(row)

    return VariantsDocument(
        form=form.value,
        base=cfg.base,
        mode=cfg.mode,
        evaluated=cfg.evaluate,
        evaluable_count=sum(1 for v in variants if v.evaluable),
        rows=rows,
    )


COMMANDS: Dict[str, Callable[[RunConfig], BaseModel]] = {
    "div": run_div,
    "triv": run_triv,
    "matrix": run_matrix,
    "variants": run_variants,
}


def execute(cfg: RunConfig, stream: Optional[TextIO] = None) -> int:
    """Run one command, print its document, and map failures to exit codes"""
    try:
        document = COMMANDS[cfg.command](cfg)
    except OSError as e:
        logger.error(f"Cannot read input: {e}")
        return EXIT_IO
    except (DistributionError, DivisionByZeroError) as e:
        logger.error(f"Invalid distribution: {e}")
        return EXIT_INVALID
    except InvalidContextError as e:
        logger.error(f"Invalid smoothing context: {e}")
        return EXIT_USAGE
    except ConsistencyError as e:
        logger.error(f"Inconsistent result: {e}")
        return EXIT_INTERNAL

    emit(document, cfg.output, cfg.precision, stream)
    return EXIT_OK
