"""Tabulate convergent growth witnesses for several Sturmian slopes.

Each row shows a convergent s/r that passed the closeness test, the depth
used, and the certified lower bound next to the exact solver start (as bit
lengths, since both grow like 2^(2s)).

    python3 scripts/sturmian_witness_table.py --max-n 3000
"""

from __future__ import annotations

import argparse

from esequence.criteria import sturmian_convergent_witnesses
from esequence.theta import Theta

SLOPES = {
    "sqrt(2)": "cf:1;2",
    "sqrt(5)-1": "cf:1;4",
    "[1;2,1,1,...]": "cf:1,2;1",
    "[1;3,1,1,...]": "cf:1,3;1",
    "1+1/(1+sqrt2)": "cf:1;2,2",
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--max-n", type=int, default=3000)
    args = ap.parse_args()
    print(f"{'slope':>16} {'k':>3} {'s/r':>12} {'case':>6} {'depth':>6} {'bound bits':>10} {'x0 bits':>8}")
    for label, text in SLOPES.items():
        ws, skipped = sturmian_convergent_witnesses(Theta.parse(text), args.max_n)
        for w in ws:
            bits = w.bound.numerator.bit_length() - w.bound.denominator.bit_length()
            print(f"{label:>16} {w.index:>3} {f'{w.s}/{w.r}':>12} {w.case:>6} {w.depth:>6} {bits:>10} {w.x0.bit_length():>8}")
        print(f"{label:>16} skipped convergents: {skipped}")


if __name__ == "__main__":
    main()
