"""Certified divergence tests for non-periodic E-sequences.

Every inequality here is decided in exact integer/rational arithmetic.  Real
constants such as ``n^(1/9)``, ``2^c`` or ``sqrt(5)`` enter only through
integer roots or squaring, always rounded in the direction that keeps the
claim safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .core import ESequencePrefix, accumulate, as_prefix
from .generators import GeneratorSpec
from .periodic import PeriodicSpec, decide
from .solver import PrefixSolution, forward_chain, iter_prefix_solutions, powers_of_two, solve_prefix
from .theta import PrecisionExhausted, Theta, compare_with_log2_3
from .trajectory import Trajectory
from .verdict import (
    DENSITY,
    REPEATED_BLOCK,
    RUNS_OF_ONES,
    STURMIAN_CONVERGENTS,
    SUM_BOUND,
    Certificate,
    Verdict,
)

ROOT_SCALE = 10**6


class CriterionError(ValueError):
    """A hypothesis of a divergence test failed to validate."""


# integer roots ---------------------------------------------------------------


def integer_nth_root(m: int, k: int) -> int:
    """``floor(m^(1/k))`` for ``m >= 0``."""
    if m < 0 or k < 1:
        raise ValueError("need m >= 0 and k >= 1")
    if m < 2 or k == 1:
        return m
    # start above the root, then Newton steps decrease monotonically
    x = 1 << -(-m.bit_length() // k)
    while True:
        y = ((k - 1) * x + m // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > m:
        x -= 1
    while (x + 1) ** k <= m:
        x += 1
    return x


def ninth_root_bounds(n: int, scale: int = ROOT_SCALE) -> tuple[Fraction, Fraction]:
    """Rationals ``L <= n^(1/9) <= U`` with denominator ``scale``."""
    target = n * scale**9
    t = integer_nth_root(target, 9)
    upper = t if t**9 == target else t + 1
    return Fraction(t, scale), Fraction(upper, scale)


# product bounds --------------------------------------------------------------


def residue_product(n: int) -> Fraction:
    """``prod (1 + 1/(3k))`` over ``1 <= k < 3n`` with ``k = 1, 5 (mod 6)``."""
    prod = Fraction(1)
    for k in range(1, 3 * n):
        if k % 6 in (1, 5):
            prod *= Fraction(3 * k + 1, 3 * k)
    return prod


def residue_product_bound(n: int) -> tuple[Fraction, bool]:
    """The product and whether it is below ``1.5 L`` with ``L <= n^(1/9)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    prod = residue_product(n)
    lower, _ = ninth_root_bounds(n)
    return prod, prod < Fraction(3, 2) * lower


def residue_product_sweep(n_max: int) -> Iterator[tuple[int, Fraction, Fraction, bool]]:
    """``(n, product, certified bound, ok)`` for ``n = 1..n_max``, incrementally.

    Going from ``n-1`` to ``n`` adds exactly one ``k`` in ``{3n-2, 3n-1}``.
    """
    prod = Fraction(1)
    for n in range(1, n_max + 1):
        k = 3 * n - 2 if (3 * n - 2) % 6 in (1, 5) else 3 * n - 1
        prod *= Fraction(3 * k + 1, 3 * k)
        bound = Fraction(3, 2) * ninth_root_bounds(n)[0]
        yield n, prod, bound, prod < bound


def min_start_lower_bound(prefix: ESequencePrefix | Sequence[int]) -> Fraction:
    """Rational lower bound ``B_n / (3^n (1.5 U - 1))`` on admissible starts.

    Applies to any start ``x_0`` not divisible by 3 whose chain
    ``x_0..x_(n-1)`` has distinct values; ``U >= n^(1/9)``.
    """
    prefix = as_prefix(prefix)
    n = prefix.n
    if n < 1:
        raise ValueError("prefix must be non-empty")
    acc = accumulate(prefix)
    _, upper = ninth_root_bounds(n)
    return Fraction(acc.B, 3**n) / (Fraction(3, 2) * upper - 1)


def _prod(factors) -> Fraction:
    out = Fraction(1)
    for f in factors:
        out *= f
    return out


def shifted_product_bounds_check(x: int, n: int, parts: Sequence[str] | None = None) -> bool:
    """Check the three product inequalities for ``x`` and ``n``.

    ``"up"``: ``prod_{k<n} (1 + 1/(3(x+k))) <= 1 + n/(3x)``;
    ``"down"``: ``prod_{k<n} (1 + 1/(3(x-k))) >= 1 + n/(3x)`` (needs ``x >= n``);
    ``"down-strict"``: the same product ``> 3x/(3x-n)`` (needs ``x >= n >= 2``).

    ``parts=None`` checks every part whose precondition holds.
    """
    if x < 1 or n < 1:
        raise ValueError("x and n must be positive")
    if parts is None:
        parts = ["up"]
        if x >= n:
            parts.append("down")
        if x >= n >= 2:
            parts.append("down-strict")
    ok = True
    for part in parts:
        if part == "up":
            up = _prod(Fraction(3 * (x + k) + 1, 3 * (x + k)) for k in range(n))
            ok &= up <= 1 + Fraction(n, 3 * x)
        elif part in ("down", "down-strict"):
            if x < n or (part == "down-strict" and n < 2):
                raise ValueError(f"precondition of {part!r} fails for x={x}, n={n}")
            down = _prod(Fraction(3 * (x - k) + 1, 3 * (x - k)) for k in range(n))
            if part == "down":
                ok &= down >= 1 + Fraction(n, 3 * x)
            else:
                ok &= down > Fraction(3 * x, 3 * x - n)
        else:
            raise ValueError(f"unknown part {part!r}")
    return ok


# positional diagnostics ------------------------------------------------------


@dataclass
class PositionalReport:
    n: int
    ratio_3: Fraction  # B_n / 3^n
    ratio_2: Fraction  # B_n / 2^(b_n)
    third: Fraction  # n / 3
    implications: dict[str, tuple[bool, bool]] = field(default_factory=dict)

    @property
    def contradictions(self) -> list[str]:
        return [name for name, (hyp, concl) in self.implications.items() if hyp and not concl]


def _diagnose(n: int, b: int, B: int, x0: int, xn: int, min_mid, max_mid, min_head, max_head) -> PositionalReport:
    """Evaluate the four implications.

    ``min_mid/max_mid`` range over ``x_1..x_(n-1)``; ``min_head/max_head`` over
    ``x_0..x_(n-1)``.  ``None`` stands for an empty range.
    """
    r3 = Fraction(B, 3**n)
    r2 = Fraction(B, 1 << b)
    third = Fraction(n, 3)
    max_tail = xn if max_mid is None else max(max_mid, xn)  # over x_1..x_n
    imp = {
        # B/3^n > n/3  =>  some 1 <= k <= n-1 has x_k <= x_0
        "i": (r3 > third, min_mid is not None and min_mid <= x0),
        # B/3^n < n/3  =>  some 1 <= k <= n has x_0 <= x_k
        "ii": (r3 < third, max_tail >= x0),
        # B/2^b <= n/3  =>  some 0 <= i <= n-1 has x_n <= x_i
        "iii": (r2 <= third, max_head >= xn),
        # B/2^b >= n/3  =>  some 0 <= k <= n-1 has x_n >= x_k
        "iv": (r2 >= third, min_head <= xn),
    }
    return PositionalReport(n, r3, r2, third, imp)


def positional_diagnostics(solution: PrefixSolution, prefix: ESequencePrefix | Sequence[int]) -> PositionalReport:
    """Compare ``B_n/3^n`` and ``B_n/2^(b_n)`` with ``n/3`` and test what they imply."""
    prefix = as_prefix(prefix)
    chain = forward_chain(solution.x0, prefix.terms)
    if chain is None or chain[-1] != solution.xn:
        raise ValueError("solution does not match prefix")
    return chain_diagnostics(chain, prefix.terms)


def chain_diagnostics(chain: Sequence[int], terms: Sequence[int]) -> PositionalReport:
    """Diagnostics for an explicit integer chain ``x_0..x_n`` under ``terms``."""
    n = len(terms)
    if n < 1 or len(chain) != n + 1:
        raise ValueError("need a chain of length n+1 for n >= 1 terms")
    head = chain[:n]
    if len(set(head)) != n:
        raise ValueError("chain values x_0..x_(n-1) are not distinct")
    acc = accumulate(terms)
    mid = chain[1:n]
    return _diagnose(
        n, acc.b, acc.B, chain[0], chain[n],
        min(mid) if mid else None, max(mid) if mid else None, min(head), max(head),
    )


def trajectory_diagnostics(traj: Trajectory) -> Iterator[PositionalReport]:
    """Diagnostics at every prefix length of a trajectory, while values stay distinct."""
    chain = traj.chain()
    seen = {chain[0]}
    x0 = chain[0]
    b = B = 0
    min_mid = max_mid = None
    min_head = max_head = x0
    for n, a in enumerate(traj.exponents, start=1):
        B = 3 * B + (1 << b)
        b += a
        xn = chain[n]
        yield _diagnose(n, b, B, x0, xn, min_mid, max_mid, min_head, max_head)
        if xn in seen:
            return
        seen.add(xn)
        min_mid = xn if min_mid is None else min(min_mid, xn)
        max_mid = xn if max_mid is None else max(max_mid, xn)
        min_head = min(min_head, xn)
        max_head = max(max_head, xn)


# criteria ---------------------------------------------------------------------


def density_criterion(gen: GeneratorSpec) -> Certificate | None:
    """Certificate when the rule proves non-periodicity and ``limsup b_n/n > log2(3)``.

    Only Sturmian generators with an irrational continued-fraction slope
    qualify; finite prefixes never do.
    """
    if gen.kind != "sturmian" or gen.theta.kind != "cf":
        return None
    theta = gen.theta
    try:
        if theta.compare_log2_3() <= 0:
            return None
    except PrecisionExhausted:
        return None
    for lo, _ in theta.intervals():
        if compare_with_log2_3(lo) > 0:
            return Certificate(DENSITY, {"theta": theta.describe(), "separating_rational": lo})
    return None


def _check_c(c: Fraction) -> Fraction:
    c = Fraction(c)
    if compare_with_log2_3(c) <= 0:
        raise CriterionError(f"c = {c} is not above log2(3)")
    return c


def _growth_guard(terms: Sequence[int]) -> None:
    """``3^n > 2^(b_n)`` for every prefix of ``terms``."""
    p3 = 1
    b = 0
    for n, a in enumerate(terms, start=1):
        p3 *= 3
        b += a
        if p3 <= 1 << b:
            raise CriterionError(f"3^n > 2^b_n fails at n={n}")


@dataclass(frozen=True)
class PairFamily:
    """A symbolic, infinite family of index pairs, validated on a window of ``m``.

    Passing a family (rather than a plain list) asserts that the rule holds
    for every ``m >= m_range.start``; the criterion validates the window.
    """

    name: str
    rule: Callable[[int], tuple[int, int]]
    m_range: range

    def pairs(self) -> list[tuple[int, int]]:
        return [self.rule(m) for m in self.m_range]


def powers_of_two_runs(m_min: int = 3, m_max: int = 12) -> PairFamily:
    """``k = 2^m``, ``l = 2^(m+1) - 1``: the runs of ones between marked powers of two."""
    return PairFamily("k=2^m,l=2^(m+1)-1", lambda m: (1 << m, (1 << (m + 1)) - 1), range(m_min, m_max + 1))


def _pairs_of(pairs) -> tuple[list[tuple[int, int]], bool]:
    if isinstance(pairs, PairFamily):
        return pairs.pairs(), True
    return [tuple(p) for p in pairs], False


def runs_of_ones_criterion(gen: GeneratorSpec, c, pairs, guard_n: int | None = None) -> Certificate:
    """Validate pairs ``(k, l)`` with ``l > k c`` and ``a_(k+1) = ... = a_l = 1``.

    For each pair the start ``x_0^{1,l}`` is at least
    ``floor(2^(kc)) 2^(b_k - k) / 3^k - 1 - k``; the bound is checked against
    the solver.  ``by_rule`` is set only for a symbolic family on a rule-based
    generator.  The guard ``3^n > 2^(b_n)`` runs to ``max(l, guard_n)``.
    """
    c = _check_c(c)
    plist, symbolic = _pairs_of(pairs)
    if not plist:
        raise CriterionError("no pairs supplied")
    top = max(l for _, l in plist)
    terms = gen.prefix(max(top, guard_n or 0))
    _growth_guard(terms)
    series = []
    for k, l in plist:
        if k < 1 or not l > k * c:
            raise CriterionError(f"pair ({k}, {l}) violates l > k c")
        if any(a != 1 for a in terms[k:l]):
            raise CriterionError(f"pair ({k}, {l}): a_(k+1)..a_l are not all 1")
        b_k = sum(terms[:k])
        two_kc = integer_nth_root(1 << (k * c.numerator), c.denominator)
        bound = Fraction(two_kc << (b_k - k), 3**k) - 1 - k
        x0 = solve_prefix(terms[:l]).x0
        if bound > x0:
            raise CriterionError(f"bound {bound} exceeds solver start {x0} at l={l}")
        series.append((l, bound))
    params = {"c": c, "pairs": plist}
    if symbolic:
        params["family"] = pairs.name
    return Certificate(RUNS_OF_ONES, params, series, by_rule=symbolic and not gen.is_finite)


def repeated_block_criterion(gen: GeneratorSpec, c, pairs, guard_n: int | None = None) -> Certificate:
    """Validate pairs ``(r, l)``: ``l > r``, ``a_(l+k) = a_k`` for ``k <= r``, ``b_(l+r) > l c``.

    Each yields ``x_0^{1,l+r} >= 2^(b_(l+r)) / 3^l - l``, checked against the solver.
    """
    c = _check_c(c)
    plist, symbolic = _pairs_of(pairs)
    if not plist:
        raise CriterionError("no pairs supplied")
    top = max(l + r for r, l in plist)
    terms = gen.prefix(max(top, guard_n or 0))
    _growth_guard(terms)
    series = []
    for r, l in plist:
        if not 1 <= r < l:
            raise CriterionError(f"pair ({r}, {l}) violates l > r")
        if tuple(terms[l : l + r]) != tuple(terms[:r]):
            raise CriterionError(f"pair ({r}, {l}): block a_1..a_r does not recur at offset l")
        b_lr = sum(terms[: l + r])
        if not b_lr > l * c:
            raise CriterionError(f"pair ({r}, {l}) violates b_(l+r) > l c")
        bound = Fraction(1 << b_lr, 3**l) - l
        x0 = solve_prefix(terms[: l + r]).x0
        if bound > x0:
            raise CriterionError(f"bound {bound} exceeds solver start {x0} at n={l + r}")
        series.append((l + r, bound))
    params = {"c": c, "pairs": plist}
    if symbolic:
        params["family"] = pairs.name
    return Certificate(REPEATED_BLOCK, params, series, by_rule=symbolic and not gen.is_finite)


# sturmian sequences ---------------------------------------------------------


def sturmian_terms(theta: Theta, n: int) -> list[int]:
    return list(GeneratorSpec.sturmian(theta).prefix(n))


def _hypotheses_hold(x0: int, terms: Sequence[int]) -> bool:
    """3 does not divide ``x_0`` and ``x_0..x_(n-1)`` are distinct."""
    if x0 % 3 == 0:
        return False
    chain = forward_chain(x0, terms)
    return chain is not None and len(set(chain[:-1])) == len(terms)


def sum_bound_series(max_n: int, sample: Callable[[int], bool] = powers_of_two):
    """Witness data for slope ``log2(3)``.

    Checks ``8 B_n > n 3^n`` at every ``n <= max_n`` and returns the sampled
    lower bounds on admissible starts, each compared with the solver's
    ``x_0^{1,n}`` whenever that start meets the bound's hypotheses.
    """
    gen = GeneratorSpec.sturmian(Theta.log2_3())
    terms = gen.prefix(max_n)
    series = []
    checked = 0
    p3 = 1
    for sol in iter_prefix_solutions(terms):
        n = sol.n
        p3 *= 3
        if not 8 * sol.B > n * p3:
            raise CriterionError(f"B_n / 3^n > n/8 fails at n={n}")
        if sample(n) or n == max_n:
            bound = min_start_lower_bound(terms[:n])
            if _hypotheses_hold(sol.x0, terms[:n]):
                checked += 1
                if bound > sol.x0:
                    raise CriterionError(f"bound {bound} exceeds solver start {sol.x0} at n={n}")
            series.append((n, bound))
    return series, checked


@dataclass
class ConvergentWitness:
    index: int
    s: int
    r: int
    case: str  # "below" (s/r < theta) or "above"
    depth: int
    bound: Fraction
    x0: int


def _exceeds_sqrt5(theta_tail: Theta, shift: Fraction) -> bool | None:
    """Decide ``theta_tail + shift > sqrt(5)``; ``None`` when undecidable."""
    for lo, hi in theta_tail.intervals():
        if lo + shift > 0 and (lo + shift) ** 2 >= 5:
            return True
        if (hi + shift) ** 2 <= 5:
            return False
    return None


def sturmian_convergent_witnesses(theta: Theta, max_n: int) -> tuple[list[ConvergentWitness], list[int]]:
    """Growth witnesses from the convergents ``s/r`` of an irrational ``theta < log2(3)``.

    A convergent is used when ``|theta - s/r| < 1/(sqrt5 r^2)`` is decided.
    For a convergent below ``theta`` the first ``2r`` terms are period ``r``
    repeated twice and ``x_0^{1,2r} >= (2^(2s) - B_r) / (3^r - 2^s)``.  For one
    above ``theta``, ``a_1 = 1`` and ``a_2..a_(r+1)`` repeats once, giving
    ``x_0^{1,2r+1} >= (2^(2s+1) - (3^r - 2^s) - 2 B') / (3 (3^r - 2^s))``.
    The periodic structure is verified on the actual terms before use.  It is
    forced only when the depth is at most ``floor(sqrt5 r)``; a convergent
    past that depth that lacks it is skipped.  Returns the witnesses and the
    indices of skipped convergents.
    """
    witnesses: list[ConvergentWitness] = []
    skipped: list[int] = []
    k = 0
    while True:
        pq = theta.convergent(k)
        if pq is None:
            break
        s, r = pq
        below = k % 2 == 0
        depth = 2 * r if below else 2 * r + 1
        if depth > max_n:
            break
        tail = theta.tail(k + 1)
        q_prev = theta.convergent(k - 1)[1] if k >= 1 else 0
        close = None if tail is None else _exceeds_sqrt5(tail, Fraction(q_prev, r))
        if not close or (1 << s) >= 3**r:
            skipped.append(k)
            k += 1
            continue
        terms = sturmian_terms(theta, depth)
        if below:
            block = terms[:r]
            ok = tuple(terms[r : 2 * r]) == tuple(block)
        else:
            block = terms[1 : r + 1]
            ok = terms[0] == 1 and tuple(terms[r + 1 : 2 * r + 1]) == tuple(block)
        s_blk = sum(block)
        if not ok or s_blk != s:
            # closeness forces the structure only while depth <= floor(sqrt5 r);
            # above theta that needs r >= 5, so small-r convergents may lack it
            if depth * depth <= 5 * r * r:
                raise CriterionError(f"convergent {s}/{r}: periodic structure of the first {depth} terms fails")
            skipped.append(k)
            k += 1
            continue
        B_blk = accumulate(block).B
        d = 3**r - (1 << s)
        if below:
            bound = Fraction((1 << (2 * s)) - B_blk, d)
        else:
            bound = Fraction((1 << (2 * s + 1)) - d - 2 * B_blk, 3 * d)
        x0 = solve_prefix(terms).x0
        if bound > x0:
            raise CriterionError(f"bound {bound} exceeds solver start {x0} at depth {depth}")
        witnesses.append(ConvergentWitness(k, s, r, "below" if below else "above", depth, bound, x0))
        k += 1
    return witnesses, skipped


def sturmian_verdict(theta: Theta, max_n: int) -> Verdict:
    """Decide the Sturmian sequence ``a_n = floor(n theta) - floor((n-1) theta)``."""
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    gen = GeneratorSpec.sturmian(theta)
    if theta.is_rational:
        spec = PeriodicSpec((), sturmian_terms(theta, theta.q))
        verdict = decide(spec)
        verdict.details["theta"] = theta.describe()
        return verdict
    if theta.kind == "log2_3":
        series, checked = sum_bound_series(max_n)
        cert = Certificate(SUM_BOUND, {"theta": "log2_3", "checked_n": max_n, "cross_checked": checked}, series)
        return Verdict.certified(SUM_BOUND, cert, theta="log2_3")
    sign = theta.compare_log2_3()
    if sign > 0:
        cert = density_criterion(gen)
        return Verdict.certified(DENSITY, cert, theta=theta.describe())
    witnesses, skipped = sturmian_convergent_witnesses(theta, max_n)
    series = [(w.depth, w.bound) for w in witnesses]
    cert = Certificate(
        STURMIAN_CONVERGENTS,
        {"theta": theta.describe(), "witnesses": witnesses, "skipped": skipped},
        series,
    )
    return Verdict.certified(STURMIAN_CONVERGENTS, cert, theta=theta.describe(), witnesses=len(witnesses))

