"""
Shared generators for the test suite: hypothesis strategies for small
distributions and numpy-seeded sweeps for the large batch checks.
"""

import string
from typing import List, Tuple

import hypothesis.strategies as st
import numpy as np

from app.core.distribution import from_counts
from app.models.domain import CountDistribution, NormalizationMode

LETTERS = string.ascii_lowercase[:20]
MODES = list(NormalizationMode)

REL_TOL = 1e-12
# rounding of a single probability moves a term by about its mass times eps
ABS_FLOOR = 1e-13


@st.composite
def distributions(draw, alphabet: str = LETTERS[:8], max_count: int = 50, label: str = "") -> CountDistribution:
    items = draw(st.sets(st.sampled_from(alphabet), min_size=1))
    counts = {w: draw(st.integers(min_value=1, max_value=max_count)) for w in sorted(items)}
    return from_counts(counts.items(), label=label)


def triples(alphabet: str = LETTERS[:8], max_count: int = 50):
    return st.tuples(
        distributions(alphabet, max_count, label="p"),
        distributions(alphabet, max_count, label="q"),
        distributions(alphabet, max_count, label="r"),
    )


def random_distribution(
    rng: np.random.Generator,
    alphabet_size: int = 20,
    max_count: int = 50,
    label: str = "",
) -> CountDistribution:
    size = int(rng.integers(1, alphabet_size + 1))
    items = rng.choice(alphabet_size, size=size, replace=False)
    counts = rng.integers(1, max_count + 1, size=size)
    return from_counts(((LETTERS[i], int(c)) for i, c in zip(items, counts)), label=label)


def random_pairs(seed: int, n: int, alphabet_size: int = 20) -> List[Tuple[CountDistribution, CountDistribution]]:
    rng = np.random.default_rng(seed)
    return [
        (random_distribution(rng, alphabet_size, label="p"), random_distribution(rng, alphabet_size, label="q"))
        for _ in range(n)
    ]


def random_triples(
    seed: int, n: int, alphabet_size: int = 20
) -> List[Tuple[CountDistribution, CountDistribution, CountDistribution]]:
    rng = np.random.default_rng(seed)
    return [
        tuple(random_distribution(rng, alphabet_size, label=name) for name in "pqr")
        for _ in range(n)
    ]


def oracle_close(value: float, oracle, scale: float = None, rel: float = REL_TOL, floor: float = ABS_FLOOR) -> bool:
    """|value - oracle| within rel of the magnitude the oracle's sum was built from"""
    exact = oracle.as_float()
    if scale is None:
        scale = oracle.abs_term_sum()
    return abs(value - exact) <= rel * max(abs(exact), scale) + floor


def product_scale(oracle) -> float:
    scale = 1.0
    for factor in oracle.factors:
        scale *= max(factor.abs_term_sum(), abs(factor.as_float()))
    return scale


def inner_condition(oracle) -> float:
    """How much rounding in the inner divergence is amplified in its scalar"""
    inner = oracle.factors[0]
    magnitude = abs(inner.as_float())
    if magnitude == 0.0:
        return 1.0
    return max(1.0, inner.abs_term_sum() / magnitude)
