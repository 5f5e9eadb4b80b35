"""Slopes for Sturmian E-sequences and exact ``floor(n * theta)``.

Three representations are supported:

* ``Theta.rational(p, q)`` -- an exact fraction ``p/q >= 1``;
* ``Theta.log2_3()`` -- exactly ``log2(3)``, floored through bit lengths of ``3^n``;
* ``Theta.continued_fraction(head, period)`` -- an irrational given by its
  continued-fraction coefficients.  A non-empty ``period`` repeats forever
  (quadratic irrationals); with an empty period the coefficients are the
  known leading part of some irrational and depth can run out.

No floating point is used anywhere: every answer comes from integer
comparisons or from open intervals between consecutive convergents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterator

MAX_CF_DEPTH = 4096


class PrecisionExhausted(ArithmeticError):
    """A continued fraction ran out of coefficients before a question was decided."""


def _floor_div_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def compare_with_log2_3(x: Fraction) -> int:
    """Sign of ``x - log2(3)``: ``2^p`` vs ``3^q`` for ``x = p/q > 0``."""
    if x <= 0:
        return -1
    lhs = 1 << x.numerator
    rhs = 3**x.denominator
    return (lhs > rhs) - (lhs < rhs)


@dataclass(frozen=True)
class Theta:
    kind: str
    p: int = 0
    q: int = 1
    head: tuple[int, ...] = ()
    period: tuple[int, ...] = ()
    _convergents: list = field(default_factory=list, compare=False, repr=False, hash=False)

    # construction -------------------------------------------------------

    @classmethod
    def rational(cls, p: int, q: int = 1) -> Theta:
        if q <= 0:
            raise ValueError("denominator must be positive")
        g = gcd(p, q)
        p, q = p // g, q // g
        if p < q:
            raise ValueError(f"theta must be >= 1, got {p}/{q}")
        return cls("rational", p=p, q=q)

    @classmethod
    def log2_3(cls) -> Theta:
        return cls("log2_3")

    @classmethod
    def continued_fraction(cls, head, period=()) -> Theta:
        head = tuple(int(c) for c in head)
        period = tuple(int(c) for c in period)
        if not head:
            raise ValueError("continued fraction needs at least the integer part")
        if head[0] < 1:
            raise ValueError("theta must be >= 1")
        if any(c < 1 for c in head[1:] + period):
            raise ValueError("partial quotients after the first must be >= 1")
        return cls("cf", head=head, period=period)

    @classmethod
    def parse(cls, text: str) -> Theta:
        """``log2_3``, ``p/q``, ``cf:1,2,2`` (finite) or ``cf:1;2`` (head;period)."""
        text = text.strip()
        if text in ("log2_3", "log2(3)", "log23"):
            return cls.log2_3()
        if text.startswith("cf:"):
            body = text[3:]
            if ";" in body:
                h, per = body.split(";", 1)
            else:
                h, per = body, ""
            head = [int(c) for c in h.split(",") if c.strip()]
            period = [int(c) for c in per.split(",") if c.strip()]
            return cls.continued_fraction(head, period)
        if "/" in text:
            p, q = text.split("/", 1)
            return cls.rational(int(p), int(q))
        return cls.rational(int(text), 1)

    def describe(self) -> str:
        if self.kind == "rational":
            return f"{self.p}/{self.q}"
        if self.kind == "log2_3":
            return "log2_3"
        out = "cf:" + ",".join(map(str, self.head))
        if self.period:
            out += ";" + ",".join(map(str, self.period))
        return out

    # structure ----------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    @property
    def is_irrational(self) -> bool:
        return not self.is_rational

    def as_fraction(self) -> Fraction:
        if self.kind != "rational":
            raise ValueError("theta is not rational")
        return Fraction(self.p, self.q)

    def coefficient(self, i: int) -> int | None:
        """Partial quotient ``c_i`` or ``None`` once a finite list is exhausted."""
        if self.kind != "cf":
            raise ValueError("only continued-fraction thetas have coefficients")
        if i < len(self.head):
            return self.head[i]
        if not self.period:
            return None
        return self.period[(i - len(self.head)) % len(self.period)]

    def tail(self, j: int) -> Theta | None:
        """Complete quotient ``[c_j; c_{j+1}, ...]``, ``None`` past a finite list."""
        if self.kind != "cf":
            raise ValueError("only continued-fraction thetas have tails")
        if j < len(self.head):
            return Theta.continued_fraction(self.head[j:], self.period)
        if not self.period:
            return None
        off = (j - len(self.head)) % len(self.period)
        rot = self.period[off:] + self.period[:off]
        return Theta.continued_fraction(rot, rot)

    def convergent(self, k: int) -> tuple[int, int] | None:
        """``(p_k, q_k)`` of the continued fraction, ``None`` past a finite list."""
        cache = self._convergents
        while len(cache) <= k:
            i = len(cache)
            c = self.coefficient(i)
            if c is None:
                return None
            # seeds: (p_{-1}, q_{-1}) = (1, 0), (p_{-2}, q_{-2}) = (0, 1)
            p1, q1 = cache[i - 1] if i >= 1 else (1, 0)
            p2, q2 = cache[i - 2] if i >= 2 else ((1, 0) if i == 1 else (0, 1))
            cache.append((c * p1 + p2, c * q1 + q2))
        return cache[k]

    def convergents(self) -> Iterator[tuple[int, int]]:
        k = 0
        while k < MAX_CF_DEPTH:
            pq = self.convergent(k)
            if pq is None:
                return
            yield pq
            k += 1

    def interval(self, k: int) -> tuple[Fraction, Fraction] | None:
        """Open interval containing theta after ``k+1`` known coefficients."""
        pk = self.convergent(k)
        if pk is None:
            return None
        p, q = pk
        if k == 0:
            p_prev, q_prev = 1, 0
        else:
            p_prev, q_prev = self.convergent(k - 1)
        a = Fraction(p, q)
        b = Fraction(p + p_prev, q + q_prev)
        return (a, b) if a < b else (b, a)

    def intervals(self) -> Iterator[tuple[Fraction, Fraction]]:
        k = 0
        while k < MAX_CF_DEPTH:
            iv = self.interval(k)
            if iv is None:
                return
            yield iv
            k += 1

    def compare_log2_3(self) -> int:
        """Exact sign of ``theta - log2(3)``; raises when undecidable."""
        if self.kind == "log2_3":
            return 0
        if self.kind == "rational":
            return compare_with_log2_3(self.as_fraction())
        for lo, hi in self.intervals():
            if compare_with_log2_3(hi) < 0:
                return -1
            if compare_with_log2_3(lo) > 0:
                return 1
        raise PrecisionExhausted(f"{self.describe()} not separated from log2(3)")


def floor_n_theta(theta: Theta, n: int) -> int:
    """Exact ``floor(n * theta)`` for ``n >= 0``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if theta.kind == "rational":
        return n * theta.p // theta.q
    if theta.kind == "log2_3":
        return (3**n).bit_length() - 1
    if n == 0:
        return 0
    for lo, hi in theta.intervals():
        # theta in (lo, hi) => n*theta in (n*lo, n*hi)
        f = _floor_div_frac(n * lo)
        if f == _ceil_frac(n * hi) - 1:
            return f
    raise PrecisionExhausted(f"floor({n} * {theta.describe()}) undetermined at available depth")
