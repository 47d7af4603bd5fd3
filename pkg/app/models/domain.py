"""
Domain types of the trivergence toolkit.

All models are frozen: once built, a distribution, a context or a report is
never mutated, so every operation over them is a pure function.
"""

from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.errors import EmptyDistributionError, InvalidCountError


# Item identity is case-sensitive text equality
ItemId = str


class NormalizationMode(str, Enum):
    PAPER_LITERAL = "paper-literal"
    TOKEN = "token"
    STRICT = "strict"


class DenominatorPolicy(str, Enum):
    PAIR_SUM = "pair-sum"
    TRIPLET_UNION = "triplet-union"
    EXPLICIT = "explicit"


class QRNormalizer(str, Enum):
    UNION = "union"
    SUM = "sum"


class DivergenceKind(str, Enum):
    KL = "kl"
    JS = "js"


class TrivergenceForm(str, Enum):
    PRODUCT = "product"
    COMPOUND = "compound"


class Role(str, Enum):
    P = "p"
    Q = "q"
    R = "r"


class PairRegion(str, Enum):
    ONLY_FIRST = "only_first"
    BOTH = "both"
    ONLY_SECOND = "only_second"
    # alphabet items outside both supports
    OUTSIDE = "outside"


class TripletRegion(str, Enum):
    P_ONLY = "p_only"
    PR_NOT_Q = "pr_not_q"
    PQ_NOT_R = "pq_not_r"
    PQR = "pqr"
    Q_ONLY = "q_only"
    QR_NOT_P = "qr_not_p"
    R_ONLY = "r_only"


class CountDistribution(BaseModel):
    """Item -> positive occurrence count, with its two cardinalities."""

    model_config = ConfigDict(frozen=True)

    label: str = Field("", description="Caller-supplied name, e.g. a filename")
    counts: Dict[ItemId, int] = Field(..., description="Item occurrences, every count >= 1")
    distinct_count: int = Field(0, description="Number of distinct items (|p|)")
    token_total: int = Field(0, description="Sum of all counts")

    @model_validator(mode="before")
    @classmethod
    def _fill_cardinalities(cls, data):
        if not isinstance(data, dict) or "counts" not in data:
            return data

        counts = dict(data["counts"])
        if not counts:
            raise EmptyDistributionError(f"distribution {data.get('label', '')!r} has no items")
        for item, count in counts.items():
            if not isinstance(item, str) or not item:
                raise ValueError("items must be non-empty text")
            if isinstance(count, bool) or not isinstance(count, int) or count < 1:
                raise InvalidCountError(f"count of {item!r} must be a positive integer, got {count!r}")

        distinct = len(counts)
        total = sum(counts.values())
        if data.get("distinct_count", distinct) != distinct:
            raise ValueError(f"distinct_count {data['distinct_count']} does not match {distinct} items")
        if data.get("token_total", total) != total:
            raise ValueError(f"token_total {data['token_total']} does not match count sum {total}")

        return {
            **data,
            "counts": dict(sorted(counts.items())),
            "distinct_count": distinct,
            "token_total": total,
        }

    @property
    def support(self) -> FrozenSet[ItemId]:
        return frozenset(self.counts)

    def __contains__(self, item: ItemId) -> bool:
        return item in self.counts


class SmoothingContext(BaseModel):
    """Normalization mode plus the |T| of the 1/|T| fallback."""

    model_config = ConfigDict(frozen=True)

    mode: NormalizationMode = NormalizationMode.PAPER_LITERAL
    denominator: int = Field(..., ge=1, description="|T| used by the smoothing fallback")
    denominator_policy: DenominatorPolicy = DenominatorPolicy.EXPLICIT
    alphabet: Optional[FrozenSet[ItemId]] = Field(
        None, description="Evaluation alphabet X; defaults to the union of the two supports"
    )
    qr_normalizer: QRNormalizer = QRNormalizer.UNION


class PairRegions(BaseModel):
    model_config = ConfigDict(frozen=True)

    only_first: FrozenSet[ItemId]
    both: FrozenSet[ItemId]
    only_second: FrozenSet[ItemId]

    def of(self, region: PairRegion) -> FrozenSet[ItemId]:
        if region is PairRegion.OUTSIDE:
            return frozenset()
        return getattr(self, region.value)

    def union(self) -> FrozenSet[ItemId]:
        return self.only_first | self.both | self.only_second


class TripletRegions(BaseModel):
    """The seven regions of T = p u q u r."""

    model_config = ConfigDict(frozen=True)

    p_only: FrozenSet[ItemId]
    pr_not_q: FrozenSet[ItemId]
    pq_not_r: FrozenSet[ItemId]
    pqr: FrozenSet[ItemId]
    q_only: FrozenSet[ItemId]
    qr_not_p: FrozenSet[ItemId]
    r_only: FrozenSet[ItemId]

    def of(self, region: TripletRegion) -> FrozenSet[ItemId]:
        return getattr(self, region.value)

    def cardinalities(self) -> Dict[TripletRegion, int]:
        return {region: len(self.of(region)) for region in TripletRegion}

    def union(self) -> FrozenSet[ItemId]:
        items: FrozenSet[ItemId] = frozenset()
        for region in TripletRegion:
            items = items | self.of(region)
        return items


class CanonicalOrder(BaseModel):
    """How an input triple was reordered; ordered[i] = inputs[permutation[i]]."""

    model_config = ConfigDict(frozen=True)

    permutation: Tuple[int, int, int]
    tie_flags: Tuple[bool, bool, bool]
    labels: Tuple[str, str, str]

    @property
    def is_identity(self) -> bool:
        return self.permutation == (0, 1, 2)

    @property
    def tied(self) -> bool:
        return any(self.tie_flags)


class DivergenceReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: DivergenceKind
    value: float = Field(..., description="Divergence in bits")
    region_terms: Dict[str, float] = Field(default_factory=dict)
    context: SmoothingContext
    first_label: str = ""
    second_label: str = ""


class ProductComponents(BaseModel):
    model_config = ConfigDict(frozen=True)

    factors: List[DivergenceReport] = Field(..., min_length=3, max_length=3)


class CompoundComponents(BaseModel):
    model_config = ConfigDict(frozen=True)

    inner: DivergenceReport
    scalar: float = Field(..., description="Inner divergence / normalizer, before any zero-branch substitution")
    effective_scalar: float
    normalizer: int
    normalizer_policy: str
    region_terms: Dict[str, float] = Field(default_factory=dict)


class TrivergenceResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    form: TrivergenceForm
    base: DivergenceKind
    value: float
    variant: str
    components: Union[ProductComponents, CompoundComponents]
    canonicalization: CanonicalOrder
    context: SmoothingContext
    zero_branch: bool = False

    @property
    def units(self) -> str:
        return "bits^3" if self.form is TrivergenceForm.PRODUCT else "bits"


class VariantDescriptor(BaseModel):
    """One brace entry of the product or compound definition."""

    model_config = ConfigDict(frozen=True)

    index: int
    form: TrivergenceForm
    text: str
    factors: Tuple[Tuple[Role, Role], ...] = ()
    outer: Optional[Role] = None
    inner: Optional[Tuple[Role, Role]] = None
    scalar_first: bool = False
    evaluable: bool = True
