"""Exact arithmetic in Q(sqrt d) for a fixed square-free d."""
from __future__ import annotations

from fractions import Fraction


class QuadraticNumber:
    """``x + y*sqrt(d)`` with rational ``x``, ``y``.  Immutable and hashable."""

    __slots__ = ("x", "y", "d")

    def __init__(self, x=0, y=0, d: int = 5):
        object.__setattr__(self, "x", Fraction(x))
        object.__setattr__(self, "y", Fraction(y) if d != 1 else Fraction(0))
        if d == 1 and y:
            object.__setattr__(self, "x", self.x + Fraction(y))
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("QuadraticNumber is immutable")

    def _coerce(self, other) -> "QuadraticNumber":
        if isinstance(other, QuadraticNumber):
            if other.d != self.d and other.y and self.y:
                raise ValueError("cannot mix different quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticNumber(other, 0, self.d)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadraticNumber(self.x + other.x, self.y + other.y, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.x, -self.y, self.d)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadraticNumber(self.x - other.x, self.y - other.y, self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadraticNumber(self.x * other.x + self.d * self.y * other.y,
                               self.x * other.y + self.y * other.x, self.d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.x * self.x - self.d * self.y * self.y

    def inverse(self) -> "QuadraticNumber":
        nrm = self.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        return QuadraticNumber(self.x / nrm, -self.y / nrm, self.d)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __bool__(self) -> bool:
        return bool(self.x) or bool(self.y)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.y == 0 and self.x == other
        if isinstance(other, QuadraticNumber):
            return self.x == other.x and self.y == other.y
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.x, self.y))

    def __float__(self) -> float:
        return float(self.x) + float(self.y) * self.d**0.5

    def __repr__(self) -> str:
        if not self.y:
            return str(self.x)
        return f"({self.x}{'+' if self.y > 0 else '-'}{abs(self.y)}*sqrt{self.d})"


def golden_ratio() -> QuadraticNumber:
    return QuadraticNumber(Fraction(1, 2), Fraction(1, 2), 5)


def matrix_rank(rows: list[list[QuadraticNumber]]) -> int:
    """Rank by Gaussian elimination; every pivot test is exact."""
    mat = [list(r) for r in rows]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        inv = mat[rank][col].inverse()
        for r in range(rank + 1, len(mat)):
            if mat[r][col]:
                factor = mat[r][col] * inv
                mat[r] = [a - factor * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return rank
