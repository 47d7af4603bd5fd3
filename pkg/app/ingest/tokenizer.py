"""
Text to items: case folding, punctuation-aware splitting, n-gram windows.
"""

import unicodedata
from functools import lru_cache
from typing import List, Union

from app.core.errors import EncodingError
from app.models.domain import ItemId
from app.models.schemas import SplitPolicy, TokenizerConfig


@lru_cache(maxsize=4096)
def _is_punctuation(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def decode_text(text: Union[str, bytes]) -> str:
    """Decode UTF-8 input strictly; str input is taken as already decoded"""
    if isinstance(text, str):
        return text
    try:
        return text.decode("utf-8")
    except UnicodeDecodeError as e:
        raise EncodingError(f"input is not valid UTF-8 (byte {e.start})") from e


def tokenize(text: Union[str, bytes], cfg: TokenizerConfig) -> List[ItemId]:
    """Deterministic token (or n-gram) list for a document"""
    text = decode_text(text)
    if cfg.lowercase:
        text = text.casefold()

    if cfg.split_policy is SplitPolicy.UNICODE_WHITESPACE_PUNCT:
        text = "".join(" " if _is_punctuation(ch) else ch for ch in text)
    tokens = text.split()

    if cfg.ngram_n == 1:
        return tokens
    n = cfg.ngram_n
    return [cfg.ngram_joiner.join(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]
