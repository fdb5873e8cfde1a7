"""Classify a local group: orbit representatives, stabilisers, verdict.

An intransitive permutation group is graph-restrictive exactly when it is
semiregular; transitive input is accepted but flagged as outside this tool's
scope.  For the non-semiregular intransitive case the analysis records the
data the downstream construction consumes: one representative per orbit, with
the first representative chosen so that its point stabiliser has maximal
order (ties broken by smallest point) - this maximises the growth rate of the
constructed vertex stabilisers, and the choice is recorded so certificates
are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import perm
from .errors import CapacityError
from .perm import PermutationGroup

RESTRICTIVE_SEMIREGULAR = "RESTRICTIVE_SEMIREGULAR"
NOT_RESTRICTIVE = "NOT_RESTRICTIVE"
OUT_OF_SCOPE_TRANSITIVE = "OUT_OF_SCOPE_TRANSITIVE"


@dataclass(frozen=True)
class AnalysisFlags:
    transitive: bool
    semiregular: bool
    semiprimitive: bool | None  # None when the enumeration cap was exceeded


@dataclass(frozen=True)
class LocalGroupAnalysis:
    source: PermutationGroup
    orbit_parts: tuple[tuple[int, ...], ...]
    orbit_reps: tuple[int, ...]
    stabilisers: tuple[PermutationGroup, ...]
    stabiliser_orders: tuple[int, ...]
    k: int
    flags: AnalysisFlags
    verdict: str

    @property
    def anchor(self) -> int:
        """The first orbit representative."""
        return self.orbit_reps[0]

    @property
    def anchor_stabiliser(self) -> PermutationGroup:
        return self.stabilisers[0]


def analyze_local_group(group: PermutationGroup,
                        semiprimitive_cap: int = perm.DEFAULT_ELEMENT_CAP
                        ) -> LocalGroupAnalysis:
    """Full analysis of a local group; every input classifies."""
    parts = perm.orbits(group)
    k = len(parts)
    n = group.order()

    # Stabiliser order is constant on an orbit, so ranking points by
    # |group| / |orbit| ranks orbits; pick the best point, smallest on ties.
    best_point = None
    best_order = -1
    for part in parts:
        stab_order = n // len(part)
        if stab_order > best_order:
            best_order = stab_order
            best_point = part[0]
    reps = [best_point]
    reps.extend(part[0] for part in parts
                if best_point not in part)

    stabilisers = tuple(perm.point_stabiliser(group, p) for p in reps)
    preds = perm.predicates(group)
    try:
        semiprimitive = perm.is_semiprimitive(group, semiprimitive_cap)
    except CapacityError:
        semiprimitive = None
    flags = AnalysisFlags(preds.is_transitive, preds.is_semiregular, semiprimitive)

    if preds.is_transitive:
        verdict = OUT_OF_SCOPE_TRANSITIVE
    elif preds.is_semiregular:
        verdict = RESTRICTIVE_SEMIREGULAR
    else:
        verdict = NOT_RESTRICTIVE

    analysis = LocalGroupAnalysis(
        source=group,
        orbit_parts=parts,
        orbit_reps=tuple(reps),
        stabilisers=stabilisers,
        stabiliser_orders=tuple(s.order() for s in stabilisers),
        k=k,
        flags=flags,
        verdict=verdict,
    )
    if verdict == NOT_RESTRICTIVE:
        assert analysis.k >= 2 and analysis.stabiliser_orders[0] > 1
    return analysis


@dataclass(frozen=True)
class VerdictReport:
    verdict: str
    message: str
    bound: int | None            # c for the restrictive case
    growth_base: int | None      # |group| for the unbounded witness
    growth_ratio: int | None     # anchor stabiliser order


def restrictive_verdict(analysis: LocalGroupAnalysis) -> VerdictReport:
    """The verdict with a human-readable justification.

    Semiregular local groups of degree d force trivial arc stabilisers in any
    connected vertex-transitive pair, so vertex stabilisers have order at most
    d; that constant is reported.  Non-semiregular intransitive groups admit
    pairs with vertex-stabiliser order |group| * s^n for every n >= 2, where s
    is the anchor stabiliser order, which is unbounded.
    """
    degree = analysis.source.degree
    if analysis.verdict == RESTRICTIVE_SEMIREGULAR:
        return VerdictReport(
            analysis.verdict,
            f"graph-restrictive (semiregular, c(L) = {degree})",
            bound=degree, growth_base=None, growth_ratio=None)
    if analysis.verdict == NOT_RESTRICTIVE:
        base = analysis.source.order()
        ratio = analysis.stabiliser_orders[0]
        return VerdictReport(
            analysis.verdict,
            f"not graph-restrictive; |G_v| = {base}*{ratio}^n realizable "
            "for every n >= 2",
            bound=None, growth_base=base, growth_ratio=ratio)
    return VerdictReport(
        analysis.verdict,
        "transitive: outside this tool's scope",
        bound=None, growth_base=None, growth_ratio=None)
