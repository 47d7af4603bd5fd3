"""
Build count distributions from documents and from TSV count files.

TSV format: one "item<TAB>count" per line, UTF-8, LF or CRLF line ends,
lines starting with '#' are comments, empty lines are skipped. The item is
everything before the last tab, whitespace included. The count is ASCII
digits with an optional leading minus and nothing else; it must be positive
and small enough for its probabilities to be finite floats.
"""

import re
from collections import Counter
from typing import Dict, Union

from app.core.distribution import MAX_TOTAL_COUNT, from_counts
from app.core.errors import EmptyDistributionError, InvalidCountError, ParseError, SerializationError
from app.ingest.tokenizer import decode_text, tokenize
from app.models.domain import CountDistribution
from app.models.schemas import TokenizerConfig
from app.utils.logger import get_logger

logger = get_logger(__name__)

_COUNT = re.compile(r"-?[0-9]+")


def distribution_from_text(
    text: Union[str, bytes],
    cfg: TokenizerConfig,
    label: str = "",
) -> CountDistribution:
    tokens = tokenize(text, cfg)
    if not tokens:
        raise EmptyDistributionError(f"document {label!r} yields no tokens")

    counts = Counter(tokens)
    logger.debug(f"Document {label!r}: {len(tokens)} tokens, {len(counts)} distinct items")
    return from_counts(sorted(counts.items()), label=label)


def distribution_from_tsv(content: Union[str, bytes], label: str = "") -> CountDistribution:
    content = decode_text(content)
    counts: Dict[str, int] = {}

    for number, line in enumerate(content.split("\n"), start=1):
        if line.endswith("\r"):
            line = line[:-1]
        if not line or line.startswith("#"):
            continue

        item, tab, raw_count = line.rpartition("\t")
        if not tab or not item:
            raise ParseError(f"expected 'item<TAB>count', got {line!r}", line=number)
        if not _COUNT.fullmatch(raw_count):
            raise ParseError(f"count {raw_count!r} is not a decimal integer", line=number)
        count = int(raw_count)
        if count <= 0:
            raise InvalidCountError(f"count of {item!r} must be positive, got {count}", line=number)
        counts[item] = counts.get(item, 0) + count
        if counts[item] > MAX_TOTAL_COUNT:
            raise InvalidCountError(f"count of {item!r} is beyond the float range", line=number)

    if not counts:
        raise EmptyDistributionError(f"count file {label!r} has no entries")
    return from_counts(counts.items(), label=label)


def serialize_tsv(d: CountDistribution) -> str:
    """Inverse of distribution_from_tsv for every item the format can carry"""
    lines = []
    for item, count in d.counts.items():
        if "\n" in item or item.startswith("#"):
            raise SerializationError(f"item {item!r} cannot be written as a TSV count line")
        lines.append(f"{item}\t{count}\n")
    return "".join(lines)
