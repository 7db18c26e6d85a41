"""Exact arithmetic in prime fields F_p for small p.

Elements are machine integers reduced after every operation; the field
descriptor is fixed at construction and carried by every element, so
mixing characteristics is caught instead of silently wrapping.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, int(n**0.5) + 1):
        if n % d == 0:
            return False
    return True


class PrimeField:
    """Descriptor for F_p.  Immutable; safe to share between threads."""

    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValidationError(f"characteristic must be prime, got {p}")
        self.p = p

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value % self.p, self)

    def elements(self):
        """All field elements, in residue order."""
        return [self(v) for v in range(self.p)]

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field.p != self.field.p:
                raise ValidationError(
                    f"mixed characteristics: F_{self.field.p} vs F_{other.field.p}"
                )
            return other
        if isinstance(other, int):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return self.field(self.value + o.value)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return self.field(self.value - o.value)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return self.field(self.value * o.value)

    __rmul__ = __mul__

    def __neg__(self):
        return self.field(-self.value)

    def inv(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.field.p}")
        return self.field(pow(self.value, self.field.p - 2, self.field.p))

    def __truediv__(self, other):
        return self * self._coerce(other).inv()

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"F{self.field.p}({self.value})"
