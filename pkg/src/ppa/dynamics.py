"""Hamiltonian vector fields, conserved-quantity checks, and fixed-step RK4.

Symbolic checks are exact; the integrator is deliberately plain: classical
fourth-order Runge-Kutta with a fixed step, so drift numbers are
reproducible regression values rather than artifacts of adaptivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import DivergenceError, DomainError
from .poly import PolyExpr
from .structures import NambuStructure, PoissonStructure, bracket_of, nambu_bracket


@dataclass
class PolyVectorField:
    vars: tuple
    components: list  # PolyExpr per coordinate

    def __post_init__(self):
        self.vars = tuple(self.vars)
        self.components = [c.with_vars(self.vars) for c in self.components]
        for c in self.components:
            c.require_polynomial_grade("vector field component")

    def apply_to(self, f: PolyExpr) -> PolyExpr:
        """Lie derivative of f along the field: sum_i (df/dx_i) xdot_i."""
        f = f.with_vars(self.vars)
        total = PolyExpr.zero(self.vars)
        for v, comp in zip(self.vars, self.components):
            total = total + f.diff(v) * comp
        return total

    def compiled(self) -> Callable[[Sequence[float]], list[float]]:
        """Float-evaluation closure used by the integrator."""
        compiled_terms = []
        for comp in self.components:
            compiled_terms.append([(float(c), m) for m, c in comp.terms.items()])

        def fieldfn(x):
            out = []
            for terms in compiled_terms:
                acc = 0.0
                for c, m in terms:
                    v = c
                    for xi, e in zip(x, m):
                        if e:
                            v *= xi ** e
                    acc += v
                out.append(acc)
            return out

        return fieldfn


def hamiltonian_vector_field(ps: PoissonStructure, h: PolyExpr) -> PolyVectorField:
    """xdot_i = {x_i, H}."""
    gens = PolyExpr.gens(ps.vars)
    return PolyVectorField(ps.vars, [bracket_of(ps, x, h) for x in gens])


def nambu_vector_field(ns: NambuStructure,
                       hamiltonians: Sequence[PolyExpr]) -> PolyVectorField:
    """xdot_i = {H_1, ..., H_{r-1}, x_i}."""
    if len(hamiltonians) != ns.arity - 1:
        raise DomainError(
            f"need {ns.arity - 1} Hamiltonians for arity {ns.arity}")
    gens = PolyExpr.gens(ns.vars)
    hams = [h.with_vars(ns.vars) for h in hamiltonians]
    return PolyVectorField(ns.vars,
                           [nambu_bracket(ns, hams + [x]) for x in gens])


@dataclass
class ConservationReport:
    conserved: bool
    residual: PolyExpr


def constants_of_motion_check(field: PolyVectorField,
                              invariants: Sequence[PolyExpr]) -> list[ConservationReport]:
    out = []
    for f in invariants:
        r = field.apply_to(f)
        out.append(ConservationReport(r.is_zero(), r))
    return out


# ---------------- Fairlie flow and its Nahm decoupling ----------------

FAIRLIE_VARS = ("x1", "x2", "x3", "x4")


def fairlie_field(g2: Fraction) -> PolyVectorField:
    """xdot_i = product of the other three coordinates, one g^2 weight."""
    x1, x2, x3, x4 = PolyExpr.gens(FAIRLIE_VARS)
    return PolyVectorField(FAIRLIE_VARS,
                           [x2 * x3 * x4, x1 * x3 * x4, x1 * x2 * x4,
                            x1 * x2 * x3 * g2])


@dataclass
class DecouplingReport:
    solved_coefficient: Optional[Fraction]   # None when sqrt(g2) is irrational
    solved_float: float
    nahm_match: bool
    plus_residual: PolyExpr    # u-equation residual at the literal a = g2
    minus_residual: PolyExpr
    residuals_at_solution: list  # six PolyExpr (Laurent-free), all zero iff match
    conserved_difference: PolyExpr  # u+^2 - v+^2 - (x3^2-x2^2)(x4^2-a^2 x1^2)


def _nahm_residuals(g2: Fraction, a_poly: PolyExpr, vars6) -> list[PolyExpr]:
    """Residuals RHS - LHS of the six Nahm equations under the quadratic
    change of variables u,v,w = (pair products) +- a * (complementary pair)."""
    x1, x2, x3, x4, a = PolyExpr.gens(vars6)
    del a  # the multiplier enters through a_poly
    field = [x2 * x3 * x4, x1 * x3 * x4, x1 * x2 * x4, x1 * x2 * x3 * g2]

    def ddt(f):
        total = PolyExpr.zero(vars6)
        for v, comp in zip(vars6[:4], field):
            total = total + f.diff(v) * comp
        return total

    out = []
    for sign in (1, -1):
        u = x3 * x4 + a_poly * x1 * x2 * sign
        v = x2 * x4 + a_poly * x1 * x3 * sign
        w = x1 * x4 + a_poly * x2 * x3 * sign
        out.append(v * w - ddt(u))
        out.append(w * u - ddt(v))
        out.append(u * v - ddt(w))
    return out


def decoupling_check(g2: Fraction) -> DecouplingReport:
    """Solve for the multiplier a that turns the quartic flow into two
    decoupled three-variable quadratic tops, and record what the literal
    substitution a = g2 leaves over.

    The six matching conditions reduce to a**2 = g2 exactly; when g2 is a
    rational square the whole computation stays exact, otherwise the solved
    coefficient is reported as a float and the residuals are evaluated at
    that floating value.
    """
    g2 = Fraction(g2)
    if g2 <= 0:
        raise DomainError("g2 must be positive")
    vars5 = FAIRLIE_VARS + ("a",)
    gens = PolyExpr.gens(vars5)
    a_sym = gens[4]

    # literal substitution a = g2
    lit = _nahm_residuals(g2, PolyExpr.const(vars5, g2), vars5)
    plus_residual = lit[0]
    minus_residual = lit[3]

    root = _rational_sqrt(g2)
    if root is not None:
        sol = _nahm_residuals(g2, PolyExpr.const(vars5, root), vars5)
        nahm_match = all(r.is_zero() for r in sol)
        solved = root
        solved_float = float(root)
    else:
        # inspect the symbolic residuals: they must all be multiples of
        # (a^2 - g2); then check the floating root numerically
        sym = _nahm_residuals(g2, a_sym, vars5)
        solved = None
        solved_float = math.sqrt(float(g2))
        tol = 1e-12
        nahm_match = True
        for r in sym:
            val = r.eval_float([1.1, 0.7, 1.3, 0.9, solved_float])
            if abs(val) > tol:
                nahm_match = False
        sol = sym

    x1, x2, x3, x4, a = PolyExpr.gens(vars5)
    aval = PolyExpr.const(vars5, solved) if solved is not None else a
    u = x3 * x4 + aval * x1 * x2
    v = x2 * x4 + aval * x1 * x3
    diff = (u * u - v * v) - (x3 * x3 - x2 * x2) * (x4 * x4 - aval * aval * x1 * x1)

    return DecouplingReport(
        solved_coefficient=solved,
        solved_float=solved_float,
        nahm_match=nahm_match,
        plus_residual=plus_residual,
        minus_residual=minus_residual,
        residuals_at_solution=sol,
        conserved_difference=diff,
    )


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    num = math.isqrt(x.numerator)
    den = math.isqrt(x.denominator)
    if num * num == x.numerator and den * den == x.denominator:
        return Fraction(num, den)
    return None


# ---------------- numerical integration ----------------

@dataclass
class TrajectoryReport:
    times: list
    states: list
    drift: dict          # invariant name -> max relative deviation
    monitor_names: list


def integrate(field: PolyVectorField, x0: Sequence[float], step: float,
              t_end: float,
              monitored: Sequence[tuple[str, PolyExpr]] = (),
              record_states: bool = True) -> TrajectoryReport:
    """Classical fixed-step RK4 with invariant-drift tracking.

    Drift of F is max over steps of |F(x(t)) - F(x0)| / max(1, |F(x0)|).
    A non-finite state aborts with DivergenceError carrying the last valid
    time.
    """
    if step <= 0 or t_end <= 0:
        raise DomainError("step and t_end must be positive")
    n = len(field.vars)
    if len(x0) != n:
        raise DomainError("initial point dimension mismatch")
    f = field.compiled()
    monitors = [(name, p.with_vars(field.vars)) for name, p in monitored]
    x = [float(v) for v in x0]
    base = [p.eval_float(x) for _, p in monitors]
    drift = {name: 0.0 for name, _ in monitors}
    times = [0.0]
    states = [tuple(x)] if record_states else []
    steps = round(t_end / step)
    t = 0.0
    half = step / 2.0
    sixth = step / 6.0
    for s in range(steps):
        k1 = f(x)
        k2 = f([x[i] + half * k1[i] for i in range(n)])
        k3 = f([x[i] + half * k2[i] for i in range(n)])
        k4 = f([x[i] + step * k3[i] for i in range(n)])
        x = [x[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
             for i in range(n)]
        if any(not math.isfinite(v) for v in x):
            raise DivergenceError(
                f"trajectory left the representable range after t={t}", t)
        t = (s + 1) * step
        times.append(t)
        if record_states:
            states.append(tuple(x))
        for (name, p), b in zip(monitors, base):
            d = abs(p.eval_float(x) - b) / max(1.0, abs(b))
            if d > drift[name]:
                drift[name] = d
    return TrajectoryReport(times=times, states=states, drift=drift,
                            monitor_names=[name for name, _ in monitors])


def write_trajectory_csv(report: TrajectoryReport, field_vars, monitored,
                         path) -> None:
    """CSV with header t,x1,...,xn,<invariant names>; 17 significant digits."""
    monitors = [(name, p) for name, p in monitored]
    with open(path, "w", encoding="utf-8") as fh:
        header = ["t"] + list(field_vars) + [name for name, _ in monitors]
        fh.write(",".join(header) + "\n")
        for t, state in zip(report.times, report.states):
            row = [_g17(t)] + [_g17(v) for v in state]
            for _, p in monitors:
                row.append(_g17(p.eval_float(list(state))))
            fh.write(",".join(row) + "\n")


def _g17(x: float) -> str:
    return "%.17g" % x
