"""Extended integer weights: the integers together with -inf and +inf.

Weights are plain Python values: finite weights are ``int`` and the two
infinities are ``math.inf`` / ``-math.inf``.  Comparison is then total for
free; only addition needs care because ``inf + -inf`` must be rejected
instead of silently producing ``nan``.
"""
import math
from numbers import Integral
from typing import Iterable, Union

Weight = Union[int, float]

INF = math.inf
NEG_INF = -math.inf


class WeightError(ValueError):
    pass


def check_weight(value) -> Weight:
    """Return *value* normalised to an extended weight, or raise WeightError."""
    if isinstance(value, bool):
        raise WeightError(f"not a weight: {value!r}")
    if isinstance(value, Integral):
        return int(value)
    if isinstance(value, float):
        if math.isinf(value):
            return value
        if math.isfinite(value) and value.is_integer():
            return int(value)
    raise WeightError(f"not a weight: {value!r}")


def is_infinite(w: Weight) -> bool:
    return isinstance(w, float) and math.isinf(w)


def add(a: Weight, b: Weight) -> Weight:
    """Saturating addition; mixing +inf and -inf is a program error."""
    if is_infinite(a) and is_infinite(b) and a != b:
        raise WeightError("cannot add +inf and -inf")
    return a + b


def total(values: Iterable[Weight]) -> Weight:
    acc: Weight = 0
    for v in values:
        acc = add(acc, v)
    return acc


def parse_weight(token: str) -> Weight:
    t = token.strip().lower()
    if t in ("inf", "+inf"):
        return INF
    if t == "-inf":
        return NEG_INF
    try:
        return int(t)
    except ValueError:
        raise WeightError(f"bad weight token {token!r}") from None


def format_weight(w: Weight) -> str:
    if w == INF:
        return "inf"
    if w == NEG_INF:
        return "-inf"
    return str(int(w))
