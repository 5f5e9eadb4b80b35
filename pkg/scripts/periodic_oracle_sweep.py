"""Cross-check the periodic decision procedure against brute-force growth runs.

For every canonical spec in the family, ``decide`` is compared with the
least starts ``x_0^{1,n}``: a convergent verdict must be reproduced exactly,
and for a divergent one the start must keep growing past its value at depth
``l + 2r``, which rules out every start below ``2^(b_(l+2r))``.

    python3 scripts/periodic_oracle_sweep.py --l-max 4 --r-max 4 --term-max 3
"""

from __future__ import annotations

import argparse
import time
from collections import Counter

from esequence.generators import GeneratorSpec
from esequence.periodic import decide, enumerate_specs
from esequence.solver import omega_limit, solve_prefix
from esequence.verdict import VerdictKind


def agree(spec, horizon: int = 64) -> tuple[bool, str]:
    """Compare ``decide`` with a brute-force growth run.

    Let ``m = l + 2r`` and ``x_m = x_0^{1,m}``.  Every odd start below
    ``2^(b_m)`` that carries the sequence must equal ``x_m``.  A convergent
    verdict must be reproduced by ``omega_limit`` at depth ``l + 6r``; a
    divergent one must see the start pass ``x_m`` within ``l + horizon*r``
    terms, which rules out every start below ``2^(b_m)``.
    """
    v = decide(spec)
    x_m = solve_prefix(spec.unrolled(2)).x0
    gen = GeneratorSpec.periodic(spec)
    if v.is_convergent:
        rep = omega_limit(gen, spec.l + 6 * spec.r)
        return rep.verdict.is_convergent and rep.x0 == x_m == v.witness, str(v)
    rep = omega_limit(gen, spec.l + horizon * spec.r, threshold=x_m)
    return rep.verdict.kind is VerdictKind.DIVERGENT_EVIDENCE, str(v)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--l-max", type=int, default=4)
    ap.add_argument("--r-max", type=int, default=4)
    ap.add_argument("--term-max", type=int, default=3)
    args = ap.parse_args()
    t0 = time.perf_counter()
    tally: Counter[str] = Counter()
    bad = []
    for spec in enumerate_specs(args.l_max, args.r_max, args.term_max):
        ok, label = agree(spec)
        tally[label] += 1
        if not ok:
            bad.append(spec.describe())
    for label, count in sorted(tally.items()):
        print(f"{count:7d}  {label}")
    print(f"{sum(tally.values())} specs, {len(bad)} disagreements, {time.perf_counter() - t0:.1f}s")
    if bad:
        print("disagree:", ", ".join(bad[:20]))
        raise SystemExit(1)


if __name__ == "__main__":
    main()
