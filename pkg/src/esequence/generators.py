"""Rules producing infinite (or explicit finite) E-sequences."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count, islice
from math import isqrt
from typing import Iterator

from .periodic import PeriodicSpec
from .theta import Theta, floor_n_theta
from .trajectory import e_sequence_of

EXPLICIT = "explicit"
PERIODIC = "periodic"
STURMIAN = "sturmian"
POWERS_OF_TWO = "powers-of-two"
SQUARES = "squares"

KINDS = (EXPLICIT, PERIODIC, STURMIAN, POWERS_OF_TWO, SQUARES)


def is_power_of_two_index(n: int) -> bool:
    return n >= 2 and n & (n - 1) == 0


def is_square_index(n: int) -> bool:
    return n >= 4 and isqrt(n) ** 2 == n


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    terms: tuple[int, ...] = ()
    spec: PeriodicSpec | None = None
    theta: Theta | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == EXPLICIT:
            object.__setattr__(self, "terms", tuple(int(a) for a in self.terms))
            if any(a < 1 for a in self.terms):
                raise ValueError("E-sequence terms must be >= 1")
        if self.kind == PERIODIC and self.spec is None:
            raise ValueError("periodic generator needs a PeriodicSpec")
        if self.kind == STURMIAN and self.theta is None:
            raise ValueError("sturmian generator needs a theta")

    @classmethod
    def explicit(cls, terms) -> GeneratorSpec:
        return cls(EXPLICIT, terms=tuple(terms))

    @classmethod
    def esequence_of(cls, x: int, n: int) -> GeneratorSpec:
        return cls.explicit(e_sequence_of(x, n).exponents)

    @classmethod
    def periodic(cls, spec: PeriodicSpec) -> GeneratorSpec:
        return cls(PERIODIC, spec=spec)

    @classmethod
    def sturmian(cls, theta: Theta) -> GeneratorSpec:
        return cls(STURMIAN, theta=theta)

    @classmethod
    def powers_of_two_marked(cls) -> GeneratorSpec:
        return cls(POWERS_OF_TWO)

    @classmethod
    def squares_marked(cls) -> GeneratorSpec:
        return cls(SQUARES)

    @property
    def is_finite(self) -> bool:
        return self.kind == EXPLICIT

    @property
    def density(self) -> Theta | None:
        """Exact ``lim b_n / n`` when the rule determines it."""
        if self.kind == STURMIAN:
            return self.theta
        if self.kind in (POWERS_OF_TWO, SQUARES):
            return Theta.rational(1)
        if self.kind == PERIODIC:
            return Theta.rational(self.spec.s, self.spec.r)
        return None

    def iter_terms(self) -> Iterator[int]:
        if self.kind == EXPLICIT:
            yield from self.terms
        elif self.kind == PERIODIC:
            yield from self.spec.iter_terms()
        elif self.kind == POWERS_OF_TWO:
            for n in count(1):
                yield 2 if is_power_of_two_index(n) else 1
        elif self.kind == SQUARES:
            for n in count(1):
                yield 2 if is_square_index(n) else 1
        elif self.theta.kind == "log2_3":
            p3 = 1
            prev = 0
            for _ in count(1):
                p3 *= 3
                cur = p3.bit_length() - 1
                yield cur - prev
                prev = cur
        else:
            prev = 0
            for n in count(1):
                cur = floor_n_theta(self.theta, n)
                yield cur - prev
                prev = cur

    def prefix(self, n: int) -> tuple[int, ...]:
        out = tuple(islice(self.iter_terms(), n))
        if len(out) < n:
            raise IndexError(f"generator has only {len(out)} terms")
        return out

    def describe(self) -> str:
        if self.kind == EXPLICIT:
            return "explicit:" + ",".join(map(str, self.terms))
        if self.kind == PERIODIC:
            return "periodic:" + self.spec.describe()
        if self.kind == STURMIAN:
            return "sturmian:" + self.theta.describe()
        return self.kind

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> GeneratorSpec:
        """Parse a descriptor.

        ``explicit:1,2,1`` | ``periodic:1,4;2`` | ``sturmian:<theta>`` |
        ``powers-of-two`` | ``squares`` | ``esequence:<x>`` (needs ``n``).
        """
        kind, _, body = text.strip().partition(":")
        if kind == EXPLICIT:
            return cls.explicit(int(c) for c in body.split(",") if c.strip())
        if kind == PERIODIC:
            return cls.periodic(PeriodicSpec.parse(body))
        if kind == STURMIAN:
            return cls.sturmian(Theta.parse(body))
        if kind in (POWERS_OF_TWO, "powers2"):
            return cls.powers_of_two_marked()
        if kind == SQUARES:
            return cls.squares_marked()
        if kind == "esequence":
            if n is None:
                raise ValueError("esequence generator needs a term count")
            return cls.esequence_of(int(body), n)
        raise ValueError(f"unknown generator descriptor {text!r}")
