"""Recover starting values from E-sequence prefixes.

For a prefix ``a_1..a_n`` there is exactly one pair ``(x_0, x_n)`` with

    2^(b_n) x_n - 3^n x_0 = B_n,   1 <= x_0 < 2^(b_n),   1 <= x_n < 3^n,

and the integer chain ``x_k = (3 x_(k-1) + 1) / 2^(a_k)`` from that ``x_0``
stays integral all the way to ``x_n``.  ``x_0`` is the least positive start
whose forced chain is integral; it is nondecreasing as the prefix grows, and
an infinite E-sequence belongs to an odd integer ``x`` exactly when these
starts settle at ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from .core import BitCapExceeded, ESequencePrefix, accumulate, accumulate_block, as_prefix, check_cap
from .trajectory import e_sequence_of
from .verdict import Verdict

DEFAULT_THRESHOLD = 1 << 256


@dataclass(frozen=True)
class PrefixSolution:
    n: int
    x0: int
    xn: int
    b: int
    B: int


@dataclass(frozen=True)
class BlockSolution:
    u: int
    v: int
    x0_block: int
    x_end: int
    intermediate: tuple[int, ...] | None = None


def _solve_linear(b: int, B: int, m: int) -> tuple[int, int]:
    """Solve ``2^b x_end - 3^m x_start = B`` in the canonical ranges."""
    mod = 3**m
    # 2 is invertible mod 3^m, and 3 does not divide B, so the residue is nonzero
    x_end = B * pow(2, -b, mod) % mod
    x_start, rem = divmod((x_end << b) - B, mod)
    assert rem == 0 and x_end != 0
    return x_start, x_end


def solve_prefix(prefix: ESequencePrefix | Sequence[int], bit_cap: int | None = None) -> PrefixSolution:
    prefix = as_prefix(prefix)
    if prefix.n < 1:
        raise ValueError("solve_prefix needs at least one term")
    acc = accumulate(prefix, bit_cap)
    x0, xn = _solve_linear(acc.b, acc.B, prefix.n)
    return PrefixSolution(prefix.n, x0, xn, acc.b, acc.B)


def forward_chain(x0: int, terms: Iterable[int]) -> list[int] | None:
    """``[x_0, ..., x_n]`` under the forced exponents, or ``None`` if a division fails."""
    chain = [x0]
    x = x0
    for a in terms:
        m = 3 * x + 1
        if m & ((1 << a) - 1):
            return None
        x = m >> a
        chain.append(x)
    return chain


def solve_block(
    prefix: ESequencePrefix | Sequence[int],
    u: int,
    v: int,
    with_intermediates: bool = False,
    bit_cap: int | None = None,
) -> BlockSolution:
    """Solve the prefix problem for the block ``a_u..a_v`` on its own."""
    prefix = as_prefix(prefix)
    if not 1 <= u <= v <= prefix.n:
        raise IndexError(f"need 1 <= u <= v <= {prefix.n}, got u={u}, v={v}")
    b = accumulate_block(prefix, u, v, bit_cap).b_block
    B = accumulate_block(prefix, u, v - 1).B_block
    x0, x_end = _solve_linear(b, B, v - u + 1)
    inter = None
    if with_intermediates:
        chain = forward_chain(x0, prefix.terms[u - 1 : v])
        if chain is None or chain[-1] != x_end:
            raise ArithmeticError("block chain failed to close; solver invariant broken")
        inter = tuple(chain[1:-1])
    return BlockSolution(u, v, x0, x_end, inter)


def backward_chain_check(solution: PrefixSolution, prefix: ESequencePrefix | Sequence[int]) -> bool:
    """True iff the forced chain from ``x_0`` is integral and lands on ``x_n``."""
    prefix = as_prefix(prefix)
    if prefix.n != solution.n:
        return False
    chain = forward_chain(solution.x0, prefix.terms)
    return chain is not None and chain[-1] == solution.xn


def powers_of_two(n: int) -> bool:
    return n & (n - 1) == 0


@dataclass
class OmegaReport:
    verdict: Verdict
    series: list[tuple[int, int]] = field(default_factory=list)
    depth: int = 0
    threshold: int = DEFAULT_THRESHOLD
    x0: int = 0
    converged_at: int | None = None


def _terms_of(gen) -> Iterable[int]:
    if hasattr(gen, "iter_terms"):
        return gen.iter_terms()
    return iter(gen)


def iter_prefix_solutions(terms: Iterable[int], bit_cap: int | None = None) -> Iterator[PrefixSolution]:
    """Yield the solution for each prefix length ``n = 1, 2, ...`` incrementally.

    Uses ``x_0^{1,n+1} = x_0^{1,n} + 2^(b_n) t`` with ``0 <= t < 2^(a_{n+1})``:
    since ``3^n x_0 + B_n = 2^(b_n) x_n``, the new start needs
    ``3 x_n + 1 + 3^(n+1) t = 0 (mod 2^(a_{n+1}))``.
    """
    x0 = xn = 0
    b = B = 0
    p3 = 1
    n = 0
    for a in terms:
        if a < 1:
            raise ValueError(f"E-sequence terms must be >= 1, got {a}")
        check_cap(b + a, bit_cap)
        p3 *= 3
        m = 3 * xn + 1
        mask = (1 << a) - 1
        t = (-m * pow(p3, -1, mask + 1)) & mask
        x0 += t << b
        xn = (m + p3 * t) >> a
        B = 3 * B + (1 << b)
        b += a
        n += 1
        yield PrefixSolution(n, x0, xn, b, B)


def omega_limit(
    gen,
    max_n: int,
    threshold: int = DEFAULT_THRESHOLD,
    bit_cap: int | None = None,
    sample: Callable[[int], bool] = powers_of_two,
    stop_on_match: bool = False,
) -> OmegaReport:
    """Track ``x_0^{1,n}`` while extending the prefix one term at a time.

    The verdict is ``DivergentEvidence`` as soon as ``x_0`` passes
    ``threshold``; ``ConvergentTo(x)`` when the final ``x_0`` is a start whose
    actual E-sequence reproduces every generated term (checked directly);
    ``Inconclusive`` otherwise.  ``gen`` is a ``GeneratorSpec`` or any
    iterable of terms; finite generators end the run early.  On
    ``BitCapExceeded`` the partial report is attached to the exception as
    ``report``.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    terms: list[int] = []
    series: list[tuple[int, int]] = []
    report = OmegaReport(Verdict.inconclusive(), series, 0, threshold)
    n = x0 = 0
    converged_at = None

    def finish(verdict: Verdict) -> OmegaReport:
        if not series or series[-1][0] != n:
            series.append((n, x0))
        report.verdict = verdict
        report.depth = n
        report.x0 = x0
        report.converged_at = converged_at if verdict.is_convergent else None
        return report

    def recorded():
        for a in _terms_of(gen):
            if len(terms) >= max_n:
                return
            terms.append(a)
            yield a

    solutions = iter_prefix_solutions(recorded(), bit_cap)
    while True:
        try:
            sol = next(solutions)
        except StopIteration:
            break
        except BitCapExceeded as exc:
            # keep what was computed so callers can still report the series
            exc.report = finish(Verdict.inconclusive(x0=x0, depth=n, aborted="bit-cap"))
            raise
        if sol.x0 != x0:
            converged_at = None
        n, x0 = sol.n, sol.x0
        if sample(n):
            series.append((n, x0))
        # the chain x_1..x_{n-1} is always odd, so only x_n decides a full match
        matched = sol.xn & 1 == 1
        if not matched:
            converged_at = None
        elif converged_at is None:
            converged_at = n
        if x0 > threshold:
            return finish(Verdict.evidence(x0=x0, depth=n))
        if matched and stop_on_match:
            break

    if n == 0:
        raise ValueError("generator produced no terms")
    if converged_at is not None:
        traj = e_sequence_of(x0, n)
        if list(traj.exponents) == terms:
            return finish(Verdict.convergent(x0, traj, depth=n, converged_at=converged_at))
        raise ArithmeticError("matched start failed direct E-sequence check; solver invariant broken")
    return finish(Verdict.inconclusive(x0=x0, depth=n))
