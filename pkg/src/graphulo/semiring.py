"""Semirings that parameterize every sparse kernel.

A semiring is a runtime value, so the CLI can pick one by name::

    >>> sr = get_semiring("min_plus")
    >>> sr.add(3, 5), sr.multiply(3, 5)
    (3, 8)

Kernels only store entries that differ from ``zero``; they rely on ``zero``
annihilating under ``multiply`` to skip work.  Structures that break that
rule (for instance counting with OR instead of AND) can still be built with
:func:`lax_monoid`, which marks the result as unchecked so kernels fall back
to evaluating over the union of supports.
"""

from __future__ import annotations

import math
import operator
import random
from dataclasses import dataclass
from itertools import product
from typing import Any, Callable, Iterable, Sequence

__all__ = [
    "Semiring",
    "SemiringAxiomError",
    "check_axioms",
    "get_semiring",
    "lax_monoid",
    "logical_and_or",
    "standard_arithmetic",
    "tropical_min_plus",
    "PLUS_TIMES",
    "MIN_PLUS",
    "OR_AND",
    "PLUS_OR",
    "SEMIRINGS",
]

BinaryOp = Callable[[Any, Any], Any]


class SemiringAxiomError(AssertionError):
    pass


@dataclass(frozen=True)
class Semiring:
    """``(V, add, multiply, zero, one)`` with a name.

    ``checked`` is False only for lax monoids, whose ``zero`` is not
    guaranteed to annihilate; kernels must not skip zero operands for them.
    """

    name: str
    add: BinaryOp
    multiply: BinaryOp
    zero: Any
    one: Any
    checked: bool = True

    def is_zero(self, value: Any) -> bool:
        return value == self.zero

    def fold(self, values: Iterable[Any]) -> Any:
        acc = self.zero
        for v in values:
            acc = self.add(acc, v)
        return acc

    def __repr__(self) -> str:
        flag = "" if self.checked else ", unchecked"
        return f"Semiring({self.name!r}{flag})"


def _or(a, b):
    return 1 if (a or b) else 0


def _and(a, b):
    return 1 if (a and b) else 0


def standard_arithmetic() -> Semiring:
    """Ordinary real arithmetic ``(R, +, *, 0, 1)``."""
    return PLUS_TIMES


def tropical_min_plus() -> Semiring:
    """``(R U {+inf}, min, +, +inf, 0)``."""
    return MIN_PLUS


def logical_and_or() -> Semiring:
    """Boolean ``({0, 1}, OR, AND, 0, 1)``."""
    return OR_AND


def lax_monoid(name: str, add: BinaryOp, multiply: BinaryOp, zero: Any, one: Any) -> Semiring:
    """Build an unchecked add/multiply pair that need not satisfy the axioms.

    No axiom checks are run on the result.  Kernels evaluate ``multiply``
    over the union of operand supports, assuming only that
    ``multiply(zero, zero) == zero``.
    """
    return Semiring(name, add, multiply, zero, one, checked=False)


PLUS_TIMES = Semiring("plus_times", operator.add, operator.mul, 0, 1)
MIN_PLUS = Semiring("min_plus", min, operator.add, math.inf, 0)
OR_AND = Semiring("or_and", _or, _and, 0, 1)
# counts |a OR b| over a 0/1 dot product; 0 does not annihilate OR
PLUS_OR = lax_monoid("plus_or", operator.add, _or, 0, 1)

SEMIRINGS: dict[str, Semiring] = {sr.name: sr for sr in (PLUS_TIMES, MIN_PLUS, OR_AND, PLUS_OR)}


def get_semiring(name: str) -> Semiring:
    try:
        return SEMIRINGS[name]
    except KeyError:
        known = ", ".join(sorted(SEMIRINGS))
        raise KeyError(f"unknown semiring {name!r}; expected one of: {known}") from None


def _mag(*values) -> float:
    """Largest finite magnitude among ``values``; the scale rounding errors are measured against."""
    finite = [abs(v) for v in values if isinstance(v, (int, float)) and math.isfinite(v)]
    return max(finite, default=0.0)


def _close(a, b, tol: float, scale: float = 0.0) -> bool:
    """Exact match, or for floats a difference within ``tol`` relative to the operands' scale.

    ``scale`` carries the size of intermediate terms: ``a*(b+c)`` and
    ``a*b + a*c`` can differ by ``eps*|a*b|`` even when the result is tiny.
    """
    if a == b:
        return True
    if isinstance(a, float) or isinstance(b, float):
        if math.isinf(a) or math.isinf(b):
            return False
        return abs(a - b) <= tol * max(1.0, abs(a), abs(b), scale)
    return False


def check_axioms(sr: Semiring, values: Sequence[Any], tol: float = 1e-12,
                 samples: int = 0, seed: int = 0) -> None:
    """Check the semiring laws on every triple drawn from ``values``.

    With ``samples > 0``, also checks that many random triples (seeded).
    Floats compare within ``tol`` relative to the largest intermediate term.
    Raises :class:`SemiringAxiomError` naming the first failing law.
    """
    if not sr.checked:
        raise SemiringAxiomError(f"{sr.name} is a lax monoid; axioms are not claimed")
    values = list(values)
    triples: Iterable = product(values, repeat=3)
    if samples:
        rng = random.Random(seed)
        extra = [tuple(rng.choice(values) for _ in range(3)) for _ in range(samples)]
        triples = list(triples) + extra

    add, mul, zero, one = sr.add, sr.multiply, sr.zero, sr.one
    for a, b, c in triples:
        ab, ac, bc = mul(a, b), mul(a, c), mul(b, c)
        terms = _mag(a, b, c, ab, ac, bc, mul(ab, c))
        laws = (
            ("add associative", add(add(a, b), c), add(a, add(b, c))),
            ("add commutative", add(a, b), add(b, a)),
            ("add identity", add(a, zero), a),
            ("multiply associative", mul(ab, c), mul(a, bc)),
            ("multiply left identity", mul(one, a), a),
            ("multiply right identity", mul(a, one), a),
            ("left distributive", mul(a, add(b, c)), add(ab, ac)),
            ("right distributive", mul(add(a, b), c), add(ac, bc)),
            ("left annihilator", mul(zero, a), zero),
            ("right annihilator", mul(a, zero), zero),
        )
        for law, lhs, rhs in laws:
            if not _close(lhs, rhs, tol, terms):
                raise SemiringAxiomError(f"{sr.name}: {law} fails at {(a, b, c)}: {lhs!r} != {rhs!r}")
