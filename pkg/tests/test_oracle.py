"""
Unit tests for the high-precision reference implementations
"""

import mpmath as mp
import pytest

from app.core.distribution import from_counts, pair_context
from app.core.divergence import js, kl
from app.core.trivergence import triv_compound_js, triv_compound_kl, triv_product
from app.models.domain import DivergenceKind, NormalizationMode, TrivergenceForm
from app.verification.oracle import js_direct, kl_direct, trivergence_direct
from tests.strategies import MODES, oracle_close, product_scale

PAPER = NormalizationMode.PAPER_LITERAL
STRICT = NormalizationMode.STRICT


@pytest.fixture
def worked():
    p = from_counts([("a", 2), ("b", 1), ("c", 1)], label="p")
    q = from_counts([("a", 1), ("b", 1)], label="q")
    r = from_counts([("a", 1)], label="r")
    return p, q, r


def test_kl_direct_worked_pair(worked):
    """Test the oracle against the kernel on the worked pair and its reverse"""
    p, q, _ = worked
    ctx = pair_context(p, q, PAPER)
    oracle = kl_direct(p, q, ctx)
    assert oracle.as_float() == pytest.approx(0.32736, abs=1e-5)
    assert oracle_close(kl(p, q, ctx).value, oracle)

    reverse = kl_direct(q, p, pair_context(q, p, PAPER, denominator=5))
    assert reverse.as_float() == pytest.approx(0.08496, abs=1e-5)
    assert oracle_close(kl(q, p, pair_context(q, p, PAPER, denominator=5)).value, reverse)


def test_oracle_value_is_sum_of_trace(worked):
    """Test that value equals the sum of term_trace at working precision"""
    p, q, _ = worked
    oracle = js_direct(p, q, pair_context(p, q, NormalizationMode.TOKEN))
    with mp.workdps(50):
        assert oracle.value == mp.fsum(t for _, t in oracle.term_trace)
    assert [w for w, _ in oracle.term_trace] == ["a", "b", "c"]


def test_trace_length_is_support_size(worked):
    """Test that the trace has one term per item of the evaluation support"""
    p, q, r = worked
    assert len(kl_direct(q, p, pair_context(q, p, PAPER)).term_trace) == 2
    assert len(kl_direct(q, p, pair_context(q, p, STRICT)).term_trace) == 3
    assert len(js_direct(q, r, pair_context(q, r, PAPER)).term_trace) == 2
    ctx = pair_context(q, r, STRICT, alphabet=frozenset("abcz"))
    assert len(js_direct(q, r, ctx).term_trace) == 4


def test_identical_pairs_are_zero(worked):
    """Test p = q in Strict mode and the singleton pair in every mode"""
    p, _, _ = worked
    assert kl_direct(p, p, pair_context(p, p, STRICT)).value == 0
    assert js_direct(p, p, pair_context(p, p, STRICT)).value == 0
    a = from_counts([("a", 1)])
    for mode in MODES:
        assert kl_direct(a, a, pair_context(a, a, mode)).value == 0
        assert js_direct(a, a, pair_context(a, a, mode)).value == 0


def test_js_direct_is_symmetric(worked):
    """Test exact symmetry of the JS oracle"""
    p, q, r = worked
    for x, y in ((p, q), (q, r), (p, r)):
        for mode in MODES:
            assert js_direct(x, y, pair_context(x, y, mode)).value == js_direct(y, x, pair_context(y, x, mode)).value


def test_trivergence_direct_identical_product():
    """Test that p = q = r gives a zero product in Strict mode"""
    d = from_counts([("x", 2), ("y", 5)])
    for base in DivergenceKind:
        assert trivergence_direct(TrivergenceForm.PRODUCT, base, d, d, d, STRICT).value == 0


def test_trivergence_direct_product_worked(worked):
    """Test the composed product against the kernel on the worked triple"""
    oracle = trivergence_direct("product", "kl", *worked, mode=PAPER)
    assert len(oracle.factors) == 3
    assert oracle.as_float() == pytest.approx(0.006612, abs=1e-6)
    kernel = triv_product(*worked, base=DivergenceKind.KL, mode=PAPER)
    assert oracle_close(kernel.value, oracle, scale=product_scale(oracle))


def test_trivergence_direct_compound_kl_worked(worked):
    """Test the composed compound KL, zero branch included, on the worked triple"""
    oracle = trivergence_direct(TrivergenceForm.COMPOUND, DivergenceKind.KL, *worked, mode=PAPER)
    assert oracle.zero_branch
    kernel = triv_compound_kl(*worked, mode=PAPER)
    assert kernel.zero_branch
    assert oracle_close(kernel.value, oracle)
    assert oracle.as_float() == pytest.approx(2 / 3, rel=1e-12)


def test_trivergence_direct_compound_js_worked(worked):
    """Test the composed compound JS on the worked triple, both normalizers"""
    for normalizer in ("union", "sum"):
        oracle = trivergence_direct("compound", "js", *worked, mode=PAPER, qr_normalizer=normalizer)
        kernel = triv_compound_js(*worked, mode=PAPER, qr_normalizer=normalizer)
        assert not oracle.zero_branch
        assert oracle_close(kernel.value, oracle)


def test_trivergence_direct_canonicalizes(worked):
    """Test that the oracle sorts the triple the same way the kernels do"""
    p, q, r = worked
    a = trivergence_direct("compound", "kl", r, p, q, mode=PAPER)
    b = trivergence_direct("compound", "kl", p, q, r, mode=PAPER)
    assert a.value == b.value


def test_oracle_js_matches_kernel_in_strict_mode(worked):
    """Test js against js_direct with an extended alphabet"""
    p, q, _ = worked
    ctx = pair_context(p, q, STRICT, denominator=7, alphabet=frozenset("abcdz"))
    assert oracle_close(js(p, q, ctx).value, js_direct(p, q, ctx))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
