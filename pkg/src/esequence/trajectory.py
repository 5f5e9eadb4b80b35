"""Odd-to-odd 3x+1 dynamics: ``x -> (3x+1) / 2^a`` with ``a`` maximal."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def two_adic_valuation(m: int) -> int:
    if m == 0:
        raise ValueError("valuation of 0 is undefined")
    return (m & -m).bit_length() - 1


def step(x: int) -> tuple[int, int]:
    """One odd step: return ``(a, x_next)``."""
    if x < 1 or x % 2 == 0:
        raise ValueError(f"step needs an odd positive integer, got {x}")
    m = 3 * x + 1
    a = two_adic_valuation(m)
    return a, m >> a


@dataclass(frozen=True)
class Trajectory:
    start: int
    values: tuple[int, ...] = ()
    exponents: tuple[int, ...] = ()
    reached_one: bool = False

    def __len__(self):
        return len(self.values)

    def chain(self) -> tuple[int, ...]:
        """``(x_0, x_1, ..., x_n)``."""
        return (self.start,) + self.values


def e_sequence_of(x: int, n: int, stop_at_one: bool = False) -> Trajectory:
    """First ``n`` odd steps from ``x``.

    With ``stop_at_one`` the run ends at the first arrival at 1 (possibly
    before ``n`` steps); otherwise it keeps cycling through ``1 -> 1``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if x < 1 or x % 2 == 0:
        raise ValueError(f"start must be an odd positive integer, got {x}")
    values, exponents = [], []
    cur = x
    reached = False
    for _ in range(n):
        a, cur = step(cur)
        values.append(cur)
        exponents.append(a)
        if cur == 1:
            reached = True
            if stop_at_one:
                break
    return Trajectory(x, tuple(values), tuple(exponents), reached)


def descent_to_one(x: int, max_steps: int = 100_000) -> Trajectory:
    """Run until the first arrival at 1; ``x = 1`` runs one step."""
    traj = e_sequence_of(x, max_steps, stop_at_one=True)
    if not traj.reached_one:
        raise RuntimeError(f"{x} did not reach 1 within {max_steps} steps")
    return traj


def closed_form_check(traj: Trajectory) -> bool:
    """``2^(b_k) x_k == 3^k x_0 + B_k`` at every step k."""
    if not traj.values:
        raise ValueError("trajectory is empty")
    x0 = traj.start
    b = B = 0
    p3 = 1
    for xk, a in zip(traj.values, traj.exponents):
        B = 3 * B + (1 << b)
        b += a
        p3 *= 3
        if (xk << b) != p3 * x0 + B:
            return False
    return True


def matthews_watts_check(traj: Trajectory) -> bool:
    """``2^(b_k) x_k == 3^k x_0 prod_{j<k} (1 + 1/(3 x_j))`` at every step k."""
    if not traj.values:
        raise ValueError("trajectory is empty")
    chain = traj.chain()
    x0 = chain[0]
    prod = Fraction(1)
    b = 0
    p3 = 1
    for k, a in enumerate(traj.exponents, start=1):
        prev = chain[k - 1]
        prod *= Fraction(3 * prev + 1, 3 * prev)
        b += a
        p3 *= 3
        if Fraction(chain[k] << b) != p3 * x0 * prod:
            return False
    return True
