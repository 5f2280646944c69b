"""Exact rational scalars, vectors and small dense matrices.

Scalars are :class:`fractions.Fraction`, which is already arbitrary precision
and always stored in lowest terms with the sign on the numerator. This module
adds the bit-exact text form used in certificate files and a minimal immutable
matrix type.
"""

from __future__ import annotations

import operator
import re
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction
RationalVector = tuple[Fraction, ...]

_RATIONAL_RE = re.compile(r"-?(0|[1-9][0-9]*)(/[1-9][0-9]*)?")


class RationalSyntaxError(ValueError):
    pass


class DimensionError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` with an optional leading ``-``.

    No whitespace, no ``+`` sign, no leading zeros. Non-reduced input such
    as ``"1014/60"`` is accepted and reduced.
    """
    if not isinstance(text, str) or not _RATIONAL_RE.fullmatch(text):
        raise RationalSyntaxError(f"malformed rational {text!r}")
    return Fraction(text)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


_OPS = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


def rat_arith(a: Fraction, b: Fraction, op: str) -> Fraction | int:
    """Apply ``op`` to two rationals. ``cmp`` returns -1, 0 or 1.

    Division by zero raises :class:`ZeroDivisionError`.
    """
    a, b = Fraction(a), Fraction(b)
    if op == "cmp":
        return (a > b) - (a < b)
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    return fn(a, b)


def vector(values: Iterable) -> RationalVector:
    return tuple(Fraction(v) for v in values)


class RationalMatrix:
    """Immutable dense row-major matrix of Fractions."""

    __slots__ = ("_rows", "_shape")

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(vector(r) for r in rows)
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionError("ragged matrix rows")
        self._rows = rows
        self._shape = (len(rows), ncols)

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    @property
    def rows(self) -> tuple[RationalVector, ...]:
        return self._rows

    def row(self, i: int) -> RationalVector:
        return self._rows[i]

    def column(self, j: int) -> RationalVector:
        return tuple(r[j] for r in self._rows)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        return f"RationalMatrix({[[format_rational(x) for x in r] for r in self._rows]})"

    def scale(self, factor) -> RationalMatrix:
        factor = Fraction(factor)
        return RationalMatrix([[factor * x for x in r] for r in self._rows])

    def permute_columns(self, order: Sequence[int]) -> RationalMatrix:
        """Column ``j`` of the result is column ``order[j]`` of ``self``."""
        return RationalMatrix([[r[k] for k in order] for r in self._rows])


def mat_vec(m: RationalMatrix, v: Sequence) -> RationalVector:
    rows, cols = m.shape
    if len(v) != cols:
        raise DimensionError(f"matrix is {rows}x{cols}, vector has length {len(v)}")
    v = vector(v)
    return tuple(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in m.rows)


def vec_mat(v: Sequence, m: RationalMatrix) -> RationalVector:
    rows, cols = m.shape
    if len(v) != rows:
        raise DimensionError(f"vector has length {len(v)}, matrix is {rows}x{cols}")
    out = [Fraction(0)] * cols
    for coef, r in zip(vector(v), m.rows):
        if coef:
            for j, x in enumerate(r):
                out[j] += coef * x
    return tuple(out)
