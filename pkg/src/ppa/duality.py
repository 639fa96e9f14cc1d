"""Wedge-power duality between the bracket bivector and the Casimir minors.

For a structure of rank n - l with Casimirs Q_1..Q_l and even n - l = 2m, the
m-th wedge power of the bivector equals a constant multiple of the volume
dual of dQ_1 ^ ... ^ dQ_l.  The constant reported as ``lam`` carries the m!
of the wedge power; ``lam_coord`` = lam / m! matches the coordinate-level
identity relating 2m x 2m Pfaffians to l x l Jacobian minors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DegenerateCasimirError, DomainError, ParityError, VariableSetError
from .exterior import PolyMultivector, differential, indices_of, pfaffian, volume_dual, wedge_all, wedge_power
from .poly import PolyExpr
from .structures import PoissonStructure, is_casimir


@dataclass
class DualityReport:
    holds: bool
    lam: Optional[Fraction]          # None encodes a non-constant ratio
    lam_coord: Optional[Fraction]    # lam / m!
    m: int
    residual: PolyMultivector
    detail: dict = field(default_factory=dict)  # subset -> (pfaffian, minor)

    @property
    def lambda_text(self) -> str:
        return "non-constant" if self.lam is None else str(self.lam)


def duality_check(ps: PoissonStructure, casimirs: Sequence[PolyExpr]) -> DualityReport:
    """Compare the (n-l)/2-th wedge power of the bivector with the dual of
    dQ_1 ^ ... ^ dQ_l and extract the constant factor.

    The Casimirs are verified first; the comparison refuses functions that
    are not actually central.  The constant is established by exact
    cross-multiplication before any division, so zero coefficients cannot
    produce spurious failures.
    """
    casimirs = [q.with_vars(ps.vars) for q in casimirs]
    if not casimirs:
        raise DomainError("need at least one Casimir")
    for q in casimirs:
        if not is_casimir(ps, q):
            raise DomainError(f"not a Casimir of the structure: {q}")
    n, l = ps.n, len(casimirs)
    if (n - l) % 2 != 0:
        raise ParityError(f"n - l = {n - l} is odd")
    m = (n - l) // 2

    wedge_side = wedge_power(ps.as_bivector(), m) if m >= 1 else None
    if wedge_side is None:
        raise ParityError("rank-0 comparison is vacuous")
    dual_side = volume_dual(wedge_all([differential(q) for q in casimirs]))

    if dual_side.is_zero():
        raise DegenerateCasimirError(
            "dQ_1 ^ ... ^ dQ_l vanishes identically; Casimirs are dependent")

    # Cross-multiplied proportionality over the union of supports.
    masks = sorted(set(wedge_side.coeffs) | set(dual_side.coeffs))
    zero = PolyExpr.zero(ps.vars)
    proportional = True
    for a in range(len(masks)):
        for b in range(a + 1, len(masks)):
            ma, mb = masks[a], masks[b]
            lhs = wedge_side.coeffs.get(ma, zero) * dual_side.coeffs.get(mb, zero)
            rhs = wedge_side.coeffs.get(mb, zero) * dual_side.coeffs.get(ma, zero)
            if lhs != rhs:
                proportional = False
                break
        if not proportional:
            break

    lam: Optional[Fraction] = None
    if proportional:
        for mask, d in dual_side.coeffs.items():
            w = wedge_side.coeffs.get(mask, zero)
            if d.is_zero():
                if not w.is_zero():
                    proportional = False
                continue
            dm, dc = d.leading()
            wc = w.coefficient(dm)
            cand = wc / dc
            if w != d * cand:
                proportional = False
                break
            if lam is None:
                lam = cand
            elif lam != cand:
                proportional = False
                break
        # entries of the wedge side outside the dual support must vanish
        if proportional:
            for mask, w in wedge_side.coeffs.items():
                if mask not in dual_side.coeffs and not w.is_zero():
                    proportional = False
                    break

    if lam is None and proportional:
        lam = Fraction(0)
    residual = (wedge_side - dual_side.scaled(lam)) if (proportional and lam is not None) \
        else wedge_side
    holds = proportional and lam is not None and lam != 0 and residual.is_zero()

    detail = {}
    for mask in sorted(set(wedge_side.coeffs) | set(dual_side.coeffs)):
        t = indices_of(mask)
        detail[t] = (pfaffian(ps.matrix, t), dual_side.coeffs.get(mask, zero))

    fact = math.factorial(m)
    return DualityReport(
        holds=holds,
        lam=lam if proportional else None,
        lam_coord=(lam / fact) if (proportional and lam is not None) else None,
        m=m,
        residual=residual,
        detail=detail,
    )


@dataclass
class DegreeSumReport:
    degrees: list
    sum_of_degrees: int
    weight_sum: int
    equals_dimension: bool


def degree_sum_check(casimirs: Sequence[PolyExpr], n: int,
                     weights: Sequence[int] | None = None,
                     require_homogeneous: bool = False) -> DegreeSumReport:
    """Sum of (weighted) top degrees of the Casimirs against the weight sum.

    With unit weights the comparison target is the dimension n.  Top degree
    is used so that non-homogeneous degenerations (Markov-type Casimirs,
    quartic z^2 - F families) are measured by their leading part; pass
    ``require_homogeneous=True`` to insist on exact homogeneity instead.
    """
    if weights is None:
        weights = [1] * n
    weights = list(weights)
    if len(weights) != n:
        raise VariableSetError("need one weight per variable")
    degrees = []
    for q in casimirs:
        if q.is_zero():
            raise DomainError("zero Casimir has no degree")
        if require_homogeneous and not q.is_weighted_homogeneous(weights):
            raise DomainError(f"not weighted-homogeneous: {q}")
        degrees.append(q.weighted_degree(weights))
    total = sum(degrees)
    wsum = sum(weights)
    return DegreeSumReport(degrees, total, wsum, total == wsum)
