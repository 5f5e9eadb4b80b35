"""Compute the growth-crossing values pinned in the test suite.

For a generator, the crossing depth is the least n with x_0^{1,n} > 2^64.
Two independent routes are used: the incremental solver, and a from-scratch
modular solve of every prefix.  The script refuses to print a value the two
routes disagree on.

    python3 scripts/pin_regressions.py [--bits 64] [--max-n 4096]
"""

from __future__ import annotations

import argparse
import json

from esequence.generators import GeneratorSpec
from esequence.solver import iter_prefix_solutions
from esequence.theta import Theta


def crossing_incremental(gen: GeneratorSpec, bound: int, max_n: int) -> int | None:
    for sol in iter_prefix_solutions(gen.prefix(max_n)):
        if sol.x0 > bound:
            return sol.n
    return None


def crossing_direct(gen: GeneratorSpec, bound: int, max_n: int) -> int | None:
    terms = gen.prefix(max_n)
    b = B = 0
    for n, a in enumerate(terms, start=1):
        B = 3 * B + (1 << b)
        b += a
        mod = 3**n
        xn = B * pow(2, -b, mod) % mod
        x0 = ((xn << b) - B) // mod
        if x0 > bound:
            return n
    return None


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--bits", type=int, default=64)
    ap.add_argument("--max-n", type=int, default=4096)
    args = ap.parse_args()
    bound = 1 << args.bits
    gens = {
        "log2_3": GeneratorSpec.sturmian(Theta.log2_3()),
        "powers-of-two": GeneratorSpec.powers_of_two_marked(),
        "squares": GeneratorSpec.squares_marked(),
    }
    out = {}
    for name, gen in gens.items():
        a = crossing_incremental(gen, bound, args.max_n)
        b = crossing_direct(gen, bound, args.max_n)
        if a != b:
            raise SystemExit(f"{name}: routes disagree ({a} vs {b})")
        out[name] = a
    print(json.dumps({"bits": args.bits, "crossing": out}, indent=2))


if __name__ == "__main__":
    main()
