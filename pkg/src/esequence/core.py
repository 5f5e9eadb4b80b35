"""Exact accumulators for E-sequence prefixes.

For a prefix ``a_1..a_n`` of positive integers:

* ``b_n = a_1 + ... + a_n`` (the total power of two divided out), and
* ``B_n = sum_{i=0}^{n-1} 3^(n-1-i) 2^(b_i)``, built by ``B_n = 3 B_{n-1} + 2^(b_{n-1})``.

Block variants ``b_u^v`` / ``B_u^v`` restrict the same construction to
``a_u..a_v``.  Everything is plain ``int`` arithmetic.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

DEFAULT_BIT_CAP = 1_000_000
BIT_CAP_ENV = "ESEQ_BIT_CAP"


class BitCapExceeded(ArithmeticError):
    """Raised when ``b_n`` grows past the configured bit cap."""

    def __init__(self, b: int, cap: int):
        super().__init__(f"b_n = {b} exceeds bit cap {cap}")
        self.b = b
        self.cap = cap


def default_bit_cap() -> int:
    raw = os.environ.get(BIT_CAP_ENV)
    if raw is None:
        return DEFAULT_BIT_CAP
    cap = int(raw)
    if cap < 64:
        raise ValueError(f"{BIT_CAP_ENV} must be >= 64, got {cap}")
    return cap


def check_cap(b: int, bit_cap: int | None) -> None:
    cap = default_bit_cap() if bit_cap is None else bit_cap
    if b > cap:
        raise BitCapExceeded(b, cap)


@dataclass(frozen=True)
class ESequencePrefix:
    terms: tuple[int, ...] = ()

    def __post_init__(self):
        terms = tuple(int(a) for a in self.terms)
        for a in terms:
            if a < 1:
                raise ValueError(f"E-sequence terms must be >= 1, got {a}")
        object.__setattr__(self, "terms", terms)

    @property
    def n(self) -> int:
        return len(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, i):
        return self.terms[i]

    def a(self, i: int) -> int:
        """1-based term access, ``a(1)`` is the first term."""
        if not 1 <= i <= len(self.terms):
            raise IndexError(f"term index {i} outside 1..{len(self.terms)}")
        return self.terms[i - 1]

    def extend(self, more: Iterable[int]) -> ESequencePrefix:
        return ESequencePrefix(self.terms + tuple(more))


def as_prefix(prefix: ESequencePrefix | Sequence[int]) -> ESequencePrefix:
    if isinstance(prefix, ESequencePrefix):
        return prefix
    return ESequencePrefix(tuple(prefix))


@dataclass(frozen=True)
class Accumulators:
    b: int = 0
    B: int = 0
    n: int = 0

    def extend(self, a: int, bit_cap: int | None = None) -> Accumulators:
        """Append one term without recomputing the prefix."""
        if a < 1:
            raise ValueError(f"E-sequence terms must be >= 1, got {a}")
        b = self.b + a
        check_cap(b, bit_cap)
        return Accumulators(b, 3 * self.B + (1 << self.b), self.n + 1)


def accumulate(prefix: ESequencePrefix | Sequence[int], bit_cap: int | None = None) -> Accumulators:
    prefix = as_prefix(prefix)
    b = B = 0
    for a in prefix.terms:
        B = 3 * B + (1 << b)
        b += a
    check_cap(b, bit_cap)
    return Accumulators(b, B, prefix.n)


def iter_accumulators(terms: Iterable[int], bit_cap: int | None = None):
    """Yield the accumulators after each term (n = 1, 2, ...)."""
    acc = Accumulators()
    for a in terms:
        acc = acc.extend(a, bit_cap)
        yield acc


@dataclass(frozen=True)
class BlockAccumulators:
    u: int
    v: int
    b_block: int
    B_block: int


def accumulate_block(
    prefix: ESequencePrefix | Sequence[int], u: int, v: int, bit_cap: int | None = None
) -> BlockAccumulators:
    """Return ``b_u^v`` and ``B_u^v`` over the 1-based block ``a_u..a_v``.

    ``v = u-1`` gives the sentinel ``(0, 1)`` and ``v = u-2`` gives ``(0, 0)``;
    ``u`` may be ``n+1`` so long as ``v`` stays within the prefix.
    """
    prefix = as_prefix(prefix)
    n = prefix.n
    if u < 1 or v > n or v < u - 2:
        raise IndexError(f"block bounds u={u}, v={v} invalid for prefix of length {n}")
    if v == u - 2:
        return BlockAccumulators(u, v, 0, 0)
    # B_u^{u-1} = 1, then B_u^w = 3 B_u^{w-1} + 2^{b_u^w}
    b = 0
    B = 1
    for a in prefix.terms[u - 1 : v]:
        b += a
        B = 3 * B + (1 << b)
    check_cap(b, bit_cap)
    return BlockAccumulators(u, v, b, B)


def split_identity_check(
    prefix: ESequencePrefix | Sequence[int], u: int, v: int, total: int | None = None
) -> bool:
    """Check the three-block decomposition of ``B_n`` at cut points ``u <= v``.

    ``B_n = 3^(n-u+1) B_1^(u-2) + 3^(n-1-v) 2^(b_(u-1)) B_u^v + 2^(b_(v+1)) B_(v+2)^(n-1)``

    ``total`` overrides the value of ``B_n`` being checked (defaults to the
    accumulated one).
    """
    prefix = as_prefix(prefix)
    n = prefix.n
    if not 1 <= u <= v <= n - 2:
        raise IndexError(f"need 1 <= u <= v <= n-2, got u={u}, v={v}, n={n}")
    if total is None:
        total = accumulate(prefix).B
    head = accumulate_block(prefix, 1, u - 2).B_block
    mid = accumulate_block(prefix, u, v).B_block
    tail = accumulate_block(prefix, v + 2, n - 1).B_block
    b_before = sum(prefix.terms[: u - 1])
    b_through = sum(prefix.terms[: v + 1])
    rhs = 3 ** (n - u + 1) * head + 3 ** (n - 1 - v) * (1 << b_before) * mid + (1 << b_through) * tail
    return total == rhs
