"""
Walk through every operation on the worked triple and the sample texts
"""

import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from app.core.distribution import canonical_order, pair_context, triplet_regions
from app.core.divergence import js, kl
from app.core.trivergence import enumerate_variants, evaluate_variant, trivergence
from app.ingest.loaders import distribution_from_text, distribution_from_tsv
from app.models.domain import DivergenceKind, NormalizationMode, TripletRegion, TrivergenceForm
from app.models.schemas import TokenizerConfig
from app.utils.logger import get_logger, set_log_level
from app.verification.oracle import trivergence_direct

logger = get_logger(__name__)

DATA_DIR = Path(__file__).parent.parent / "data"


def load_worked_triple():
    return tuple(
        distribution_from_tsv((DATA_DIR / "worked" / f"{name}.tsv").read_text(encoding="utf-8"), label=name)
        for name in ("p", "q", "r")
    )


def run_examples():
    """Log divergences and trivergences of the worked triple and the sample texts"""
    logger.info("=" * 80)
    logger.info("Worked triple")
    logger.info("=" * 80)

    p, q, r = load_worked_triple()
    regions = triplet_regions(p, q, r)
    layout = {region.value: sorted(regions.of(region)) for region in TripletRegion}
    logger.info(f"Regions: {layout}")

    ctx = pair_context(p, q, NormalizationMode.PAPER_LITERAL, denominator=5)
    logger.info(f"D_KL(p||q) = {kl(p, q, ctx).value:.5f} bits (|T| = 5)")
    logger.info(f"D_KL(q||p) = {kl(q, p, ctx).value:.5f} bits (|T| = 5)")
    logger.info(f"D_JS(p||q) = {js(p, q, ctx).value:.5f} bits (|T| = 5)")

    for mode in NormalizationMode:
        for form in TrivergenceForm:
            for base in DivergenceKind:
                result = trivergence(form, base, p, q, r, mode)
                oracle = trivergence_direct(form, base, p, q, r, mode)
                logger.info(
                    f"{form.value:8s} {base.value} {mode.value:13s} "
                    f"value={result.value:+.10f} {result.units:6s} "
                    f"oracle={oracle.as_float():+.10f} zero_branch={result.zero_branch}"
                )

    logger.info("-" * 80)
    for form in TrivergenceForm:
        for v in enumerate_variants(form):
            if v.evaluable:
                result = evaluate_variant(v, p, q, r, DivergenceKind.KL, NormalizationMode.STRICT)
                logger.info(f"{v.text:34s} = {result.value:+.10f} {result.units}")
            else:
                logger.info(f"{v.text:34s}   not evaluable")

    logger.info("=" * 80)
    logger.info("Sample texts")
    logger.info("=" * 80)

    cfg = TokenizerConfig()
    texts = [
        distribution_from_text(path.read_bytes(), cfg, label=path.name)
        for path in sorted((DATA_DIR / "texts").glob("*.txt"))
    ]
    (a, b, c), record = canonical_order(*texts[:3])
    logger.info(f"Canonical order: {record.labels} (permutation {record.permutation})")
    for base in DivergenceKind:
        result = trivergence(TrivergenceForm.PRODUCT, base, a, b, c, NormalizationMode.STRICT)
        logger.info(f"Strict product trivergence [{base.value}] = {result.value:.6g} {result.units}")


if __name__ == "__main__":
    set_log_level("INFO")
    try:
        run_examples()
    except Exception as e:
        logger.error(f"Examples failed: {e}", exc_info=True)
        sys.exit(1)
