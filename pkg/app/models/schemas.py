from enum import Enum
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator


class SplitPolicy(str, Enum):
    UNICODE_WHITESPACE_PUNCT = "unicode-whitespace-punct"
    WHITESPACE_ONLY = "whitespace-only"


class TokenizerConfig(BaseModel):
    lowercase: bool = Field(True, description="Apply Unicode case folding")
    split_policy: SplitPolicy = Field(SplitPolicy.UNICODE_WHITESPACE_PUNCT, description="Token boundaries")
    ngram_n: int = Field(1, ge=1, description="Items are n-grams of tokens")
    ngram_joiner: str = Field(" ", description="Separator between the tokens of an n-gram")

    @model_validator(mode="after")
    def _check_joiner(self):
        if self.ngram_n > 1 and not self.ngram_joiner:
            raise ValueError("ngram_joiner must be non-empty when ngram_n > 1")
        return self


class RunConfig(BaseModel):
    command: Literal["div", "triv", "matrix", "variants"]
    base: Literal["kl", "js"] = "kl"
    form: Literal["product", "compound"] = "product"
    mode: Literal["paper-literal", "token", "strict"] = "paper-literal"
    denom_policy: Literal["auto", "pair-sum", "triplet-union", "explicit"] = "auto"
    denominator: Optional[int] = Field(None, ge=1, description="N of an explicit denominator")
    qr_normalizer: Literal["union", "sum"] = "union"
    ngram_n: int = Field(1, ge=1)
    lowercase: bool = True
    input_kind: Literal["text", "tsv"] = "text"
    output: Literal["json", "csv"] = "json"
    evaluate: bool = False
    precision: int = Field(17, ge=1, le=17)
    workers: int = Field(1, ge=1)
    inputs: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_arity(self):
        n = len(self.inputs)
        if self.command == "div" and n != 2:
            raise ValueError(f"div needs exactly 2 inputs, got {n}")
        if self.command == "triv" and n != 3:
            raise ValueError(f"triv needs exactly 3 inputs, got {n}")
        if self.command == "matrix" and n < 2:
            raise ValueError(f"matrix needs at least 2 inputs, got {n}")
        if self.command == "variants" and self.evaluate and n != 3:
            raise ValueError(f"variants --evaluate needs exactly 3 inputs, got {n}")

        if self.denom_policy == "explicit" and self.denominator is None:
            raise ValueError("--denom explicit needs a value N >= 1")
        if self.denom_policy != "explicit" and self.denominator is not None:
            raise ValueError("a denominator value is only accepted with --denom explicit")
        pairwise = self.command in ("div", "matrix")
        if pairwise and self.denom_policy == "triplet-union":
            raise ValueError(f"{self.command} compares pairs; triplet-union needs three inputs")
        if not pairwise and self.denom_policy == "pair-sum":
            raise ValueError(f"{self.command} works on triples; pair-sum does not apply")
        return self

    @property
    def resolved_policy(self) -> str:
        if self.denom_policy != "auto":
            return self.denom_policy
        return "pair-sum" if self.command in ("div", "matrix") else "triplet-union"


class FactorDocument(BaseModel):
    first: str
    second: str
    value_bits: float
    region_terms: Dict[str, float] = Field(default_factory=dict)


class DivDocument(BaseModel):
    command: Literal["div"] = "div"
    base: str
    mode: str
    denominator: int
    denominator_policy: str
    value_bits: float
    region_terms: Dict[str, float]
    labels: List[str]
    tie_flags: Dict[str, bool] = Field(..., description="Cardinality relation of the pair")


class CanonicalOrderDocument(BaseModel):
    labels: List[str]
    permutation: List[int]
    tie_flags: List[bool]


class TrivComponentsDocument(BaseModel):
    factors: Optional[List[FactorDocument]] = None
    inner: Optional[FactorDocument] = None
    scalar: Optional[float] = None
    effective_scalar: Optional[float] = None
    normalizer: Optional[int] = None
    normalizer_policy: Optional[str] = None
    region_terms: Optional[Dict[str, float]] = None


class TrivDocument(BaseModel):
    command: Literal["triv"] = "triv"
    form: str
    base: str
    mode: str
    variant: str
    denominator: int
    denominator_policy: str
    value: float
    units: Literal["bits", "bits^3"]
    components: TrivComponentsDocument
    canonical_order: CanonicalOrderDocument
    zero_branch_flag: bool
    labels: List[str]


class MatrixDocument(BaseModel):
    command: Literal["matrix"] = "matrix"
    base: str
    mode: str
    denominator_policy: str
    labels: List[str]
    matrix: List[List[float]]


class VariantRow(BaseModel):
    index: int
    form: str
    variant: str
    evaluable: bool
    value: Optional[float] = None
    units: Optional[str] = None
    zero_branch: Optional[bool] = None
    note: str = ""


class VariantsDocument(BaseModel):
    command: Literal["variants"] = "variants"
    form: str
    base: str
    mode: str
    evaluated: bool
    evaluable_count: int
    rows: List[VariantRow]


REPORT_MODELS = {
    "div": DivDocument,
    "triv": TrivDocument,
    "matrix": MatrixDocument,
    "variants": VariantsDocument,
}
