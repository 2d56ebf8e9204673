"""Problem files and report serialization."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .errors import ParseError
from .exact import format_rational, parse_rational
from .laurent import LaurentPoly


@dataclass(frozen=True)
class Problem:
    n: int
    qs: tuple[LaurentPoly, ...]
    v: tuple[Fraction, ...]
    u: tuple[Fraction, ...]
    options: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "polys": [
                {"weight": format_rational(w), "terms": terms_to_json(q)} for q, w in zip(self.qs, self.v)
            ],
            "u": [format_rational(x) for x in self.u],
        }


def terms_to_json(q: LaurentPoly) -> list[dict]:
    return [{"exp": list(e), "coef": format_rational(c)} for e, c in sorted(q.terms.items())]


def _rational(value, what: str) -> Fraction:
    try:
        return parse_rational(value)
    except ParseError:
        raise
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what}: {exc}") from None


def parse_poly(n: int, terms: Sequence[dict], what: str = "polynomial") -> LaurentPoly:
    if not isinstance(terms, list) or not terms:
        raise ParseError(f"{what} needs a non-empty list of terms")
    acc: dict[tuple[int, ...], Fraction] = {}
    for term in terms:
        try:
            exp = term["exp"]
            coef = term["coef"]
        except (KeyError, TypeError):
            raise ParseError(f"{what}: every term needs 'exp' and 'coef'") from None
        if not isinstance(exp, list) or len(exp) != n or not all(isinstance(a, int) and not isinstance(a, bool) for a in exp):
            raise ParseError(f"{what}: exponent {exp!r} is not a list of {n} integers")
        key = tuple(exp)
        acc[key] = acc.get(key, Fraction(0)) + _rational(coef, what)
    poly = LaurentPoly(n, acc)
    poly.require_nonzero()
    return poly


def parse_problem(data: Any) -> Problem:
    if not isinstance(data, dict):
        raise ParseError("problem file must be a JSON object")
    try:
        n = data["n"]
        polys = data["polys"]
        u = data["u"]
    except KeyError as exc:
        raise ParseError(f"problem file is missing {exc.args[0]!r}") from None
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError("'n' must be a positive integer")
    if not isinstance(polys, list) or not polys:
        raise ParseError("'polys' must be a non-empty list")
    if not isinstance(u, list) or len(u) != n:
        raise ParseError(f"'u' must list {n} rationals")
    qs, v = [], []
    for j, entry in enumerate(polys):
        if not isinstance(entry, dict) or "terms" not in entry or "weight" not in entry:
            raise ParseError(f"polynomial {j + 1} needs 'weight' and 'terms'")
        qs.append(parse_poly(n, entry["terms"], f"polynomial {j + 1}"))
        v.append(_rational(entry["weight"], f"weight of polynomial {j + 1}"))
    options = data.get("options", {})
    if not isinstance(options, dict):
        raise ParseError("'options' must be an object")
    return Problem(n, tuple(qs), tuple(v), tuple(_rational(x, "u") for x in u), options)


def load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None


def parse_complex(value) -> complex:
    """A complex number from a number, a rational string or a ``[re, im]`` pair."""
    if isinstance(value, list) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(float(parse_rational(value)))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    raise ParseError(f"cannot read {value!r} as a complex number")


def _encode(obj: Any, indent: str | None, level: int) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return json.dumps(str(obj))
        return format(obj, ".17g") if obj != int(obj) or abs(obj) >= 1e17 else format(obj, ".1f")
    if isinstance(obj, Fraction):
        return json.dumps(format_rational(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, complex):
        return _encode([obj.real, obj.imag], indent, level)
    pad = "" if indent is None else "\n" + indent * (level + 1)
    end = "" if indent is None else "\n" + indent * level
    sep = ", " if indent is None else ","
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(x, (dict, list, tuple)) for x in obj):
            return "[" + ", ".join(_encode(x, None, 0) for x in obj) + "]"
        items = [pad + _encode(x, indent, level + 1) for x in obj]
        return "[" + sep.join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int | None = 2) -> str:
    """JSON with floats printed to 17 significant digits."""
    return _encode(obj, None if indent is None else " " * indent, 0)
