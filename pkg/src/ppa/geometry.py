"""Coordinate transport and projective-geometry checks.

transport_bracket pushes a bracket table through an invertible monomial
change of variables; intermediate terms may carry fractional exponents, and
only the final re-expressed entries are judged for polynomial grade (that
judgement is the interesting output for the mirror-type maps).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .errors import DomainError, PolynomialGradeError
from .poly import MonomialMap, PolyExpr, substitute
from .structures import PoissonStructure


@dataclass
class TransportResult:
    new_vars: tuple
    entries: list            # full antisymmetric matrix of PolyExpr (maybe Puiseux)
    polynomial_grade: bool

    def structure(self) -> PoissonStructure:
        if not self.polynomial_grade:
            raise PolynomialGradeError(
                "transported brackets have fractional exponents")
        return PoissonStructure(self.new_vars, self.entries)


def transport_bracket(ps: PoissonStructure, mmap: MonomialMap) -> TransportResult:
    """{y_a, y_b} = sum_{i<j} (dy_a/dx_i dy_b/dx_j - dy_a/dx_j dy_b/dx_i) p_ij,
    re-expressed in the new variables through the inverse map."""
    if tuple(mmap.old_vars) != ps.vars:
        raise DomainError("map old variables do not match the structure")
    n = ps.n
    ys = mmap.forward_exprs()
    dy = [[y.diff(v) for v in ps.vars] for y in ys]
    entries = [[PolyExpr.zero(mmap.new_vars) for _ in range(n)] for _ in range(n)]
    grade_ok = True
    for a in range(n):
        for b in range(a + 1, n):
            acc = PolyExpr.zero(ps.vars)
            for (i, j), p in ps.entries_upper():
                if p.is_zero():
                    continue
                acc = acc + (dy[a][i] * dy[b][j] - dy[a][j] * dy[b][i]) * p
            out = substitute(acc, mmap)
            entries[a][b] = out
            entries[b][a] = -out
            grade_ok = grade_ok and out.is_polynomial_grade()
    return TransportResult(tuple(mmap.new_vars), entries, grade_ok)


@dataclass
class ExtendabilityVerdict:
    max_degree: int
    degree_ok: bool
    cyclic_residuals: dict   # (i, j, k) -> PolyExpr
    extendable_necessary_conditions: bool


def check_projective_extendability(ps: PoissonStructure) -> ExtendabilityVerdict:
    """Necessary conditions for a holomorphic extension to projective space.

    Every bracket entry must have degree at most 3 and the degree-3 parts
    must satisfy the cyclic cancellation
    X_k {X_i,X_j}_3 + X_i {X_j,X_k}_3 + X_j {X_k,X_i}_3 = 0.  These are
    necessary only; a clean verdict means "no obstruction found", never a
    proof of extendability.
    """
    max_deg = 0
    for _, p in ps.entries_upper():
        d = p.total_degree()
        if d is not None:
            max_deg = max(max_deg, d)
    degree_ok = max_deg <= 3
    gens = PolyExpr.gens(ps.vars)
    top = [[ps.matrix[i][j].homogeneous_component(3) for j in range(ps.n)]
           for i in range(ps.n)]
    residuals = {}
    for i, j, k in combinations(range(ps.n), 3):
        r = gens[k] * top[i][j] + gens[i] * top[j][k] + gens[j] * top[k][i]
        if not r.is_zero():
            residuals[(i, j, k)] = r
    return ExtendabilityVerdict(
        max_degree=max_deg,
        degree_ok=degree_ok,
        cyclic_residuals=residuals,
        extendable_necessary_conditions=degree_ok and not residuals,
    )


@dataclass
class ChartComparison:
    agree: bool
    constant: Optional[Fraction]
    residuals: dict          # (i, j) -> PolyExpr, denominators cleared
    eliminated_var: str


def chart_compare(ps_a: PoissonStructure, ps_b: PoissonStructure,
                  eliminator: PolyExpr) -> ChartComparison:
    """Compare two derivations of one bracket across charts.

    ``ps_b`` lives in the variables of ``ps_a`` plus one extra variable z;
    ``eliminator`` must be linear in z with a single-monomial z-coefficient,
    so z solves to a Laurent monomial expression.  The first nonzero entry
    pair fixes one global constant; every remaining pair is compared against
    that constant, with denominators cleared through the z-coefficient.
    """
    extra = [v for v in ps_b.vars if v not in ps_a.vars]
    if len(extra) != 1:
        raise DomainError("second structure must add exactly one variable")
    z = extra[0]
    elim = eliminator.with_vars(ps_b.vars)
    zi = ps_b.vars.index(z)

    if any(m[zi] not in (0, 1) for m in elim.terms) or \
            all(m[zi] == 0 for m in elim.terms):
        raise DomainError(f"eliminator must have degree exactly 1 in {z}")
    rest = PolyExpr(ps_b.vars, {m: c for m, c in elim.terms.items() if m[zi] == 0})
    acoef = PolyExpr(ps_b.vars,
                     {tuple(e if t != zi else 0 for t, e in enumerate(m)): c
                      for m, c in elim.terms.items() if m[zi] == 1})
    if not acoef.is_monomial():
        raise DomainError("z-coefficient of the eliminator must be one monomial")

    # z = -rest / acoef as a Laurent polynomial
    (am, ac), = acoef.terms.items()
    ainv = PolyExpr(ps_b.vars, {tuple(-e for e in am): Fraction(1) / ac})
    z_value = -rest * ainv

    order = [ps_b.vars.index(v) for v in ps_a.vars]
    residuals = {}
    constant: Optional[Fraction] = None
    anchored = False
    agree = True
    for ai, aj in combinations(range(ps_a.n), 2):
        b_entry = ps_b.matrix[order[ai]][order[aj]].subs_var(z, z_value)
        b_entry = _drop_unused(b_entry, z).with_vars(ps_a.vars)
        a_entry = ps_a.matrix[ai][aj]
        if not anchored and not a_entry.is_zero() and not b_entry.is_zero():
            anchored = True
            constant = _constant_ratio(b_entry, a_entry)
        c = constant if constant is not None else Fraction(1)
        resid = _clear_denominators(b_entry - a_entry * c)
        if not resid.is_zero():
            agree = False
            residuals[(ai, aj)] = resid
    return ChartComparison(agree=agree, constant=constant,
                           residuals=residuals, eliminated_var=z)


def _drop_unused(p: PolyExpr, var: str) -> PolyExpr:
    keep = tuple(v for v in p.vars if v != var)
    return p.with_vars(keep)


def _constant_ratio(num: PolyExpr, den: PolyExpr) -> Optional[Fraction]:
    """c with num = c*den, when such a rational constant exists."""
    dm, dc = den.leading()
    c = num.coefficient(dm) / dc
    if num == den * c:
        return c
    return None


def _clear_denominators(p: PolyExpr) -> PolyExpr:
    """Multiply by the minimal monomial making all exponents nonnegative."""
    if p.is_zero() or p.is_polynomial_grade():
        return p
    n = len(p.vars)
    shift = [0] * n
    for m in p.terms:
        for i, e in enumerate(m):
            if e < 0:
                shift[i] = max(shift[i], -e if isinstance(e, int) else 0)
        for i, e in enumerate(m):
            if not isinstance(e, int):
                raise PolynomialGradeError(
                    "fractional exponents cannot be cleared by a monomial")
    mono = PolyExpr(p.vars, {tuple(shift): Fraction(1)})
    return p * mono


def mukai_pairing_check(ps: PoissonStructure, surface: PolyExpr,
                        i: int = 0, j: int = 1, k: int = 2) -> bool:
    """Bookkeeping identity tying one bracket entry to the residue 2-form:
    p_ij * dP/dx_k must reproduce -(dP/dx_k)^2."""
    d = surface.with_vars(ps.vars).diff(ps.vars[k])
    return ps.matrix[i][j] * d == -(d * d)
