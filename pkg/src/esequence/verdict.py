from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

from .trajectory import Trajectory


class VerdictKind(str, Enum):
    CONVERGENT = "ConvergentTo"
    DIVERGENT_CERTIFIED = "DivergentCertified"
    DIVERGENT_EVIDENCE = "DivergentEvidence"
    INCONCLUSIVE = "Inconclusive"


# Names of the divergence arguments a certificate can rest on.
PERIODIC_GROWTH = "periodic-growth"  # periodic part with 3^r > 2^s
PERIODIC_NO_CYCLE = "periodic-no-cycle"  # 2^s > 3^r but the only possible start fails
DENSITY = "density"  # non-periodic with limsup b_n/n > log2(3)
SUM_BOUND = "sum-bound"  # B_n / 3^n outgrows the residue-product lower bound
RUNS_OF_ONES = "runs-of-ones"
REPEATED_BLOCK = "repeated-block"
STURMIAN_CONVERGENTS = "sturmian-convergents"


@dataclass
class Certificate:
    """Witness data for a divergence argument.

    ``by_rule`` is true only when the hypotheses come from a symbolic,
    infinite family; a certificate built from finitely many checked items
    records validated bounds but does not prove divergence on its own.
    """

    theorem: str
    parameters: dict[str, Any] = field(default_factory=dict)
    lower_bound_series: list[tuple[int, Fraction]] = field(default_factory=list)
    by_rule: bool = True


@dataclass
class Verdict:
    kind: VerdictKind
    witness: int | None = None
    trajectory: Trajectory | None = None
    criterion: str | None = None
    certificate: Certificate | None = None
    details: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def convergent(cls, x: int, trajectory: Trajectory | None = None, **details) -> Verdict:
        return cls(VerdictKind.CONVERGENT, witness=x, trajectory=trajectory, details=details)

    @classmethod
    def certified(cls, criterion: str, certificate: Certificate | None = None, **details) -> Verdict:
        return cls(VerdictKind.DIVERGENT_CERTIFIED, criterion=criterion, certificate=certificate, details=details)

    @classmethod
    def evidence(cls, **details) -> Verdict:
        return cls(VerdictKind.DIVERGENT_EVIDENCE, details=details)

    @classmethod
    def inconclusive(cls, **details) -> Verdict:
        return cls(VerdictKind.INCONCLUSIVE, details=details)

    @property
    def is_convergent(self) -> bool:
        return self.kind is VerdictKind.CONVERGENT

    @property
    def is_certified(self) -> bool:
        return self.kind is VerdictKind.DIVERGENT_CERTIFIED

    def __str__(self):
        if self.kind is VerdictKind.CONVERGENT:
            return f"ConvergentTo({self.witness})"
        if self.kind is VerdictKind.DIVERGENT_CERTIFIED:
            return f"DivergentCertified({self.criterion})"
        return self.kind.value
