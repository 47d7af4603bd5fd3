"""
Report emission: JSON documents and fixed-header CSV tables on stdout.

Numbers are rounded to a number of significant digits before printing;
17 digits (the default) reproduce every double exactly.
"""

import json
import sys
from typing import Any, List, TextIO

import pandas as pd
from pydantic import BaseModel

from app.models.schemas import DivDocument, MatrixDocument, TrivDocument, VariantsDocument

DIV_COLUMNS = ["first", "second", "base", "mode", "denominator", "denominator_policy", "value_bits"]
TRIV_COLUMNS = [
    "form", "base", "mode", "variant", "denominator", "value", "units", "zero_branch", "p", "q", "r",
]
VARIANT_COLUMNS = ["index", "form", "variant", "evaluable", "value", "units", "zero_branch", "note"]


def round_significant(value: Any, digits: int) -> Any:
    """Round every float in a JSON-like structure to `digits` significant digits"""
    if isinstance(value, float):
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: round_significant(v, digits) for k, v in value.items()}
    if isinstance(value, list):
        return [round_significant(v, digits) for v in value]
    return value


def emit_json(document: BaseModel, digits: int, stream: TextIO = None) -> None:
    stream = stream or sys.stdout
    payload = round_significant(document.model_dump(mode="json"), digits)
    stream.write(json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=False))
    stream.write("\n")


def to_frame(document: BaseModel) -> pd.DataFrame:
    if isinstance(document, DivDocument):
        rows: List[dict] = [{
            "first": document.labels[0],
            "second": document.labels[1],
            "base": document.base,
            "mode": document.mode,
            "denominator": document.denominator,
            "denominator_policy": document.denominator_policy,
            "value_bits": document.value_bits,
        }]
        return pd.DataFrame(rows, columns=DIV_COLUMNS)

    if isinstance(document, TrivDocument):
        p, q, r = document.canonical_order.labels
        rows = [{
            "form": document.form,
            "base": document.base,
            "mode": document.mode,
            "variant": document.variant,
            "denominator": document.denominator,
            "value": document.value,
            "units": document.units,
            "zero_branch": document.zero_branch_flag,
            "p": p,
            "q": q,
            "r": r,
        }]
        return pd.DataFrame(rows, columns=TRIV_COLUMNS)

    if isinstance(document, MatrixDocument):
        frame = pd.DataFrame(document.matrix, index=document.labels, columns=document.labels)
        frame.index.name = "label"
        return frame

    if isinstance(document, VariantsDocument):
        return pd.DataFrame([row.model_dump() for row in document.rows], columns=VARIANT_COLUMNS)

    raise TypeError(f"no CSV layout for {type(document).__name__}")


def emit_csv(document: BaseModel, digits: int, stream: TextIO = None) -> None:
    stream = stream or sys.stdout
    frame = to_frame(document)
    keep_index = isinstance(document, MatrixDocument)
    frame.to_csv(stream, index=keep_index, float_format=f"%.{digits}g", lineterminator="\n")


def emit(document: BaseModel, output: str, digits: int, stream: TextIO = None) -> None:
    if output == "csv":
        emit_csv(document, digits, stream)
    else:
        emit_json(document, digits, stream)
