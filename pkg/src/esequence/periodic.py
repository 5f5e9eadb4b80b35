"""Decision procedure for eventually periodic E-sequences.

A spec ``a_1..a_l (a_{l+1}..a_{l+r})^inf`` has period sum ``s``.  If
``3^r > 2^s`` the starts ``x_0^{1,n}`` grow without bound and the sequence
belongs to no odd integer.  If ``2^s > 3^r`` the only integer it can belong to
is

    x = (2^(b_l) B_r - B_l (2^s - 3^r)) / ((2^s - 3^r) 3^l),

which is tested directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

from .core import accumulate
from .solver import solve_prefix
from .trajectory import e_sequence_of
from .verdict import PERIODIC_GROWTH, PERIODIC_NO_CYCLE, Certificate, Verdict


@dataclass(frozen=True)
class PeriodicSpec:
    prefix: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(a) for a in self.prefix))
        object.__setattr__(self, "period", tuple(int(a) for a in self.period))
        if not self.period:
            raise ValueError("period must be non-empty")
        if any(a < 1 for a in self.prefix + self.period):
            raise ValueError("E-sequence terms must be >= 1")

    @classmethod
    def parse(cls, text: str) -> PeriodicSpec:
        """``"1,4;2"`` is prefix (1, 4) then period (2); ``"2"`` is purely periodic."""
        if ";" in text:
            head, per = text.split(";", 1)
        else:
            head, per = "", text
        return cls(
            tuple(int(c) for c in head.split(",") if c.strip()),
            tuple(int(c) for c in per.split(",") if c.strip()),
        )

    def describe(self) -> str:
        return ",".join(map(str, self.prefix)) + ";" + ",".join(map(str, self.period))

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.prefix)

    @property
    def r(self) -> int:
        return len(self.period)

    @property
    def terms(self) -> tuple[int, ...]:
        return self.prefix + self.period

    @property
    def s(self) -> int:
        return sum(self.period)

    @property
    def b_l(self) -> int:
        return sum(self.prefix)

    @property
    def B_l(self) -> int:
        return accumulate(self.prefix).B

    @property
    def B_r(self) -> int:
        return accumulate(self.period).B

    def term(self, i: int) -> int:
        """1-based term of the infinite sequence."""
        if i <= self.l:
            return self.prefix[i - 1]
        return self.period[(i - self.l - 1) % self.r]

    def unrolled(self, k: int) -> tuple[int, ...]:
        """The first ``l + r k`` terms."""
        return self.prefix + self.period * k

    def iter_terms(self) -> Iterator[int]:
        yield from self.prefix
        while True:
            yield from self.period

    def canonical(self) -> PeriodicSpec:
        """Least period, then the shortest non-periodic part."""
        per = self.period
        r = len(per)
        for d in range(1, r + 1):
            if r % d == 0 and per[:d] * (r // d) == per:
                per = per[:d]
                break
        pre = self.prefix
        while pre and pre[-1] == per[-1]:
            per = per[-1:] + per[:-1]
            pre = pre[:-1]
        return PeriodicSpec(pre, per)

    @property
    def contracting(self) -> bool:
        """``2^s > 3^r``."""
        return (1 << self.s) > 3**self.r


def b_periodic(spec: PeriodicSpec, k: int) -> int:
    """``B_{rk+l}`` in closed form."""
    if k < 0:
        raise ValueError("k must be >= 0")
    r, s = spec.r, spec.s
    num = 3 ** (r * k) - (1 << (s * k))
    den = 3**r - (1 << s)
    geo, rem = divmod(num, den)
    assert rem == 0
    return 3 ** (r * k) * spec.B_l + (1 << spec.b_l) * spec.B_r * geo


def candidate_start(spec: PeriodicSpec) -> Fraction:
    """The unique possible start when ``2^s > 3^r`` (a rational, maybe non-integral)."""
    d = (1 << spec.s) - 3**spec.r
    return Fraction((1 << spec.b_l) * spec.B_r - spec.B_l * d, d * 3**spec.l)


def cycle_value(spec: PeriodicSpec) -> Fraction:
    """``B_r / (2^s - 3^r)``: the would-be value at the start of each period."""
    return Fraction(spec.B_r, (1 << spec.s) - 3**spec.r)


def decide(spec: PeriodicSpec) -> Verdict:
    spec = spec.canonical()
    r, s, l = spec.r, spec.s, spec.l
    info = {"spec": spec.describe(), "l": l, "r": r, "s": s, "B_r": spec.B_r}
    if 3**r > (1 << s):
        cert = Certificate(PERIODIC_GROWTH, {"r": r, "s": s})
        return Verdict.certified(PERIODIC_GROWTH, cert, **info)
    x_cycle = cycle_value(spec)
    x0 = candidate_start(spec)
    info["x_cycle"] = x_cycle
    info["x0_candidate"] = x0
    if x0.denominator == 1 and x0 >= 1 and x0.numerator % 2 == 1:
        x = x0.numerator
        traj = e_sequence_of(x, l + 2 * r)
        chain = traj.chain()
        if traj.exponents == spec.unrolled(2) and chain[l + 2 * r] == chain[l + r]:
            return Verdict.convergent(x, traj, **info)
    cert = Certificate(PERIODIC_NO_CYCLE, {"x0_candidate": x0, "x_cycle": x_cycle})
    return Verdict.certified(PERIODIC_NO_CYCLE, cert, **info)


@dataclass(frozen=True)
class PeriodicBranch:
    k: int
    u: Fraction
    x0_candidate: Fraction
    x_cycle: Fraction
    x0_solver: int
    in_range: bool


def periodic_branch(spec: PeriodicSpec, k: int, bit_cap: int | None = None) -> PeriodicBranch:
    """Recover ``u_{rk+l}`` from the solved prefix of length ``rk + l``.

    With ``D = |2^s - 3^r|`` and the solver's ``x_{rk+l}``:
    ``u = (D x_{rk+l} - B_r) / 3^(rk)`` when ``2^s > 3^r`` (expected range
    ``0 <= u < D 3^l``), and ``u = (D x_{rk+l} + B_r) / 3^(rk)`` otherwise
    (expected range ``1 <= u <= D 3^l``).  The ranges hold for large ``k``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    l, r, s = spec.l, spec.r, spec.s
    sol = solve_prefix(spec.unrolled(k), bit_cap)
    two_s, three_r = 1 << s, 3**r
    B_l, b_l, B_r = spec.B_l, spec.b_l, spec.B_r
    p3rk = 3 ** (r * k)
    if two_s > three_r:
        d = two_s - three_r
        u = Fraction(d * sol.xn - B_r, p3rk)
        x0 = ((1 << (s * k + b_l)) * u - B_l * d + (1 << b_l) * B_r) / (d * 3**l)
        x_cycle = (p3rk * u + B_r) / d
        in_range = 0 <= u < d * 3**l
    else:
        d = three_r - two_s
        u = Fraction(d * sol.xn + B_r, p3rk)
        x0 = ((1 << (s * k + b_l)) * u - B_l * d - (1 << b_l) * B_r) / (d * 3**l)
        x_cycle = (p3rk * u - B_r) / d
        in_range = 1 <= u <= d * 3**l
    return PeriodicBranch(k, u, x0, x_cycle, sol.x0, in_range)


def branch_formulas_check(spec: PeriodicSpec, k: int, bit_cap: int | None = None) -> bool:
    br = periodic_branch(spec, k, bit_cap)
    return br.u.denominator == 1 and br.in_range and br.x0_candidate == br.x0_solver


def enumerate_specs(l_max: int, r_max: int, term_max: int, canonical_only: bool = True) -> Iterator[PeriodicSpec]:
    """All specs with ``l <= l_max``, ``1 <= r <= r_max``, terms in ``1..term_max``.

    Deterministic order: by ``l``, then ``r``, then lexicographic terms.  With
    ``canonical_only`` each sequence appears once, in canonical form.
    """
    alphabet = range(1, term_max + 1)
    for l in range(l_max + 1):
        for r in range(1, r_max + 1):
            for pre in product(alphabet, repeat=l):
                for per in product(alphabet, repeat=r):
                    spec = PeriodicSpec(pre, per)
                    if canonical_only and spec.canonical() != spec:
                        continue
                    yield spec

