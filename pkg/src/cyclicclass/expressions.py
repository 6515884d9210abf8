"""Factor expressions as printed in class-number tables.

Grammar (whitespace ignored)::

    factor  := group ['^' INT]
    group   := '(' body ')' | body
    body    := product ['+1']
    product := power {SEP power}        SEP is one of . * · ×
    power   := INT ['^' INT]

``2^3.29+1`` is 233, ``(2.5+1)^2`` is 11 squared and ``7^2`` is the prime
7 with multiplicity 2.  Expressions are kept symbolic; evaluation happens
on demand so that transcription mistakes show up as primality failures.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import CyclicClassError

__all__ = ["FactorExpr", "ExpressionEvalError", "parse_factor", "parse_factor_list"]


class ExpressionEvalError(CyclicClassError):
    pass


_SEPARATORS = re.compile(r"[.*·×]")
_POWER = re.compile(r"^(\d+)(?:\^(\d+))?$")


@dataclass(frozen=True)
class FactorExpr:
    """``(prod(b**e) + plus_one) ** power``; ``composite`` marks a non-prime base."""

    terms: tuple[tuple[int, int], ...]
    plus_one: bool = False
    power: int = 1
    composite: bool = False

    @property
    def base(self) -> int:
        v = 1
        for b, e in self.terms:
            v *= b**e
        return v + 1 if self.plus_one else v

    @property
    def value(self) -> int:
        return self.base**self.power

    def text(self) -> str:
        body = ".".join(f"{b}^{e}" if e > 1 else str(b) for b, e in self.terms)
        if self.plus_one:
            body += "+1"
        if self.power > 1:
            bare = not self.plus_one and len(self.terms) == 1 and self.terms[0][1] == 1
            body = f"{body}^{self.power}" if bare else f"({body})^{self.power}"
        return body

    def to_json(self) -> str | dict:
        if self.composite:
            return {"expr": self.text(), "composite": True}
        return self.text()


def _parse_power(token: str, source: str) -> tuple[int, int]:
    m = _POWER.match(token)
    if not m:
        raise ExpressionEvalError(f"cannot parse {token!r} in factor expression {source!r}")
    base = int(m.group(1))
    exp = int(m.group(2) or 1)
    if base < 1 or exp < 1:
        raise ExpressionEvalError(f"non-positive term {token!r} in {source!r}")
    return base, exp


def parse_factor(source: str, composite: bool = False) -> FactorExpr:
    text = re.sub(r"\s+", "", source)
    if not text:
        raise ExpressionEvalError("empty factor expression")
    power = 1
    if text.startswith("("):
        close = text.find(")")
        if close < 0:
            raise ExpressionEvalError(f"unbalanced parenthesis in {source!r}")
        rest = text[close + 1 :]
        text = text[1:close]
        if rest:
            if not rest.startswith("^") or not rest[1:].isdigit():
                raise ExpressionEvalError(f"unexpected {rest!r} after parenthesis in {source!r}")
            power = int(rest[1:])
            if power < 1:
                raise ExpressionEvalError(f"exponent must be positive in {source!r}")
    plus_one = text.endswith("+1")
    if plus_one:
        text = text[:-2]
    if not text:
        raise ExpressionEvalError(f"missing product in {source!r}")
    terms = tuple(_parse_power(t, source) for t in _SEPARATORS.split(text))
    if len(terms) == 1 and not plus_one and terms[0][1] > 1:
        # a bare prime power: the exponent is a multiplicity
        b, e = terms[0]
        return FactorExpr(((b, 1),), False, e * power, composite)
    expr = FactorExpr(terms, plus_one, power, composite)
    if expr.base < 2:
        raise ExpressionEvalError(f"factor {source!r} evaluates to {expr.base}")
    return expr


def parse_factor_list(source: str) -> list[FactorExpr]:
    """Comma-separated factors, e.g. ``3,2.29+1,2^3.29+1``."""
    return [parse_factor(part) for part in source.split(",") if part.strip()]
