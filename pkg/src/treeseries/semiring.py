"""Exact commutative semirings.

A :class:`Semiring` works on plain Python values (ints, or ``math.inf`` for
the tropical zero) so the solvers can run without wrapping every coefficient.
:class:`SemiringValue` is the tagged form handed to users; it refuses to mix
elements of different semirings.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import reduce
from typing import Any, Iterable


class SemiringError(ValueError):
    pass


class SemiringMismatchError(SemiringError):
    pass


_INT_RE = re.compile(r"[+-]?\d+\Z")


@dataclass(frozen=True)
class Semiring:
    """Base class. Subclasses define ``zero``, ``one``, ``add``, ``mul``."""

    name = "abstract"
    finite = False

    @property
    def zero(self):
        raise NotImplementedError

    @property
    def one(self):
        raise NotImplementedError

    def add(self, x, y):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def parse(self, text: str):
        text = text.strip()
        if not _INT_RE.match(text):
            raise SemiringError(f"malformed {self.header()} literal: {text!r}")
        x = int(text)
        if not self.contains(x):
            raise SemiringError(f"{text!r} is not an element of {self.header()}")
        return x

    def format(self, x) -> str:
        return str(x)

    def header(self) -> str:
        """The text used after ``semiring`` in a document header."""
        return self.name

    def default_universe(self) -> list:
        """Finite candidate set for simulation-matrix searches."""
        raise NotImplementedError

    def elements(self) -> list:
        if not self.finite:
            raise SemiringError(f"{self.header()} is infinite")
        return self.default_universe()

    def sum(self, xs: Iterable):
        return reduce(self.add, xs, self.zero)

    def prod(self, xs: Iterable):
        total = self.one
        for x in xs:
            total = self.mul(total, x)
            if total == self.zero:
                return total
        return total

    def is_zero(self, x) -> bool:
        return x == self.zero

    def coerce(self, x):
        """Accept a raw element, a literal string or a :class:`SemiringValue`."""
        if isinstance(x, SemiringValue):
            if x.semiring != self:
                raise SemiringMismatchError(
                    f"value of {x.semiring.header()} used with {self.header()}")
            return x.raw
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, bool):
            x = int(x)
        if not self.contains(x):
            raise SemiringError(f"{x!r} is not an element of {self.header()}")
        return x

    def value(self, x) -> SemiringValue:
        return SemiringValue(self, self.coerce(x))

    def __str__(self):
        return self.header()


@dataclass(frozen=True)
class Natural(Semiring):
    name = "nat"

    zero = 0
    one = 1

    def add(self, x, y):
        return x + y

    def mul(self, x, y):
        return x * y

    def contains(self, x):
        return isinstance(x, int) and x >= 0

    def default_universe(self):
        return [0, 1, 2, 3, 4]


@dataclass(frozen=True)
class Integer(Semiring):
    name = "int"

    zero = 0
    one = 1

    def add(self, x, y):
        return x + y

    def mul(self, x, y):
        return x * y

    def contains(self, x):
        return isinstance(x, int)

    def default_universe(self):
        return [-2, -1, 0, 1, 2]


@dataclass(frozen=True)
class Boolean(Semiring):
    """Disjunction and conjunction on ``{0, 1}``."""

    name = "bool"
    finite = True

    zero = 0
    one = 1

    def add(self, x, y):
        return x | y

    def mul(self, x, y):
        return x & y

    def contains(self, x):
        return x in (0, 1) and isinstance(x, int)

    def default_universe(self):
        return [0, 1]


@dataclass(frozen=True)
class ZMod(Semiring):
    modulus: int = 2

    name = "zmod"
    finite = True

    def __post_init__(self):
        if not isinstance(self.modulus, int) or self.modulus < 2:
            raise SemiringError(f"zmod needs an integer modulus >= 2, got {self.modulus!r}")

    zero = 0
    one = 1

    def add(self, x, y):
        return (x + y) % self.modulus

    def mul(self, x, y):
        return (x * y) % self.modulus

    def contains(self, x):
        return isinstance(x, int) and 0 <= x < self.modulus

    def parse(self, text):
        text = text.strip()
        if not _INT_RE.match(text):
            raise SemiringError(f"malformed {self.header()} literal: {text!r}")
        return int(text) % self.modulus

    def header(self):
        return f"zmod {self.modulus}"

    def default_universe(self):
        return list(range(self.modulus))


@dataclass(frozen=True)
class Tropical(Semiring):
    """``(Z ∪ {inf}, min, +)``. Shipped for demonstration only."""

    name = "tropical"

    zero = math.inf
    one = 0

    def add(self, x, y):
        return min(x, y)

    def mul(self, x, y):
        return x + y

    def contains(self, x):
        return x == math.inf or (isinstance(x, int) and not isinstance(x, bool))

    def parse(self, text):
        if text.strip() in ("inf", "∞"):
            return math.inf
        return super().parse(text)

    def format(self, x):
        return "inf" if x == math.inf else str(x)

    def default_universe(self):
        return [math.inf, 0, 1, 2]


_REGISTRY = {
    "nat": Natural,
    "int": Integer,
    "bool": Boolean,
    "zmod": ZMod,
    "tropical": Tropical,
}

NAT = Natural()
INT = Integer()
BOOL = Boolean()
TROPICAL = Tropical()


def get_semiring(name: str, *params: Any) -> Semiring:
    """Look up a semiring by its header name, e.g. ``get_semiring("zmod", 3)``."""
    try:
        cls = _REGISTRY[name]
    except KeyError:
        raise SemiringError(
            f"unknown semiring {name!r}; expected one of {', '.join(_REGISTRY)}") from None
    if cls is ZMod:
        if len(params) != 1:
            raise SemiringError("zmod takes exactly one modulus")
        try:
            return ZMod(int(params[0]))
        except ValueError:
            raise SemiringError(f"bad zmod modulus {params[0]!r}") from None
    if params:
        raise SemiringError(f"semiring {name} takes no parameters")
    return cls()


def parse_semiring(text: str) -> Semiring:
    """Parse the header form ``nat``, ``zmod 3`` etc."""
    parts = text.split()
    if not parts:
        raise SemiringError("empty semiring header")
    return get_semiring(parts[0], *parts[1:])


@dataclass(frozen=True)
class SemiringValue:
    """An element tagged with its semiring."""

    semiring: Semiring
    raw: Any

    def _check(self, other) -> Any:
        if isinstance(other, SemiringValue):
            if other.semiring != self.semiring:
                raise SemiringMismatchError(
                    f"cannot combine {self.semiring.header()} with {other.semiring.header()}")
            return other.raw
        return NotImplemented

    def __add__(self, other):
        raw = self._check(other)
        if raw is NotImplemented:
            return raw
        return SemiringValue(self.semiring, self.semiring.add(self.raw, raw))

    def __mul__(self, other):
        raw = self._check(other)
        if raw is NotImplemented:
            return raw
        return SemiringValue(self.semiring, self.semiring.mul(self.raw, raw))

    def is_zero(self):
        return self.semiring.is_zero(self.raw)

    def __str__(self):
        return self.semiring.format(self.raw)
