"""Model DSL: lexer, recursive-descent parser, and canonical emission.

A model file declares variables, optional weights, rational parameters,
named polynomials, exactly one structure, optional Hamiltonians, requested
checks with optional expected outcomes, and an optional integration request.
Canonical emission inlines every parameter and renders polynomials in the
canonical term order, so emit -> parse -> emit is byte-stable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .catalog import BuiltModel, IntegrateRequest
from .errors import ArityError, ModelSyntaxError
from .poly import PolyExpr, _rational_pow
from .structures import NambuStructure, PoissonStructure

CHECK_NAMES = ("jacobi", "casimirs", "quasi", "theorem31", "plucker", "rank",
               "extendability", "fi", "degree_sum", "bdu_relation")

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<float>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<number>\d+(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>[;,{}()=^*+\-])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str      # float | number | ident | punct | eof
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ModelSyntaxError("unexpected character", line, col, text[pos])
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Stream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def accept(self, text: str) -> Optional[Token]:
        t = self.peek()
        if t.kind in ("punct", "ident") and t.text == text:
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        t = self.peek()
        if (t.kind in ("punct", "ident")) and t.text == text:
            return self.next()
        raise ModelSyntaxError(f"expected {text!r}", t.line, t.column, t.text)

    def expect_kind(self, kind: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise ModelSyntaxError(f"expected {kind}", t.line, t.column, t.text)
        return self.next()

    def error(self, msg: str):
        t = self.peek()
        raise ModelSyntaxError(msg, t.line, t.column, t.text)


# ---------------- polynomial expressions ----------------

def parse_poly_expr(stream: _Stream, env: dict, variables) -> PolyExpr:
    """expr := term (('+'|'-') term)*"""
    acc = _parse_term(stream, env, variables)
    while True:
        if stream.accept("+"):
            acc = acc + _parse_term(stream, env, variables)
        elif stream.accept("-"):
            acc = acc - _parse_term(stream, env, variables)
        else:
            return acc


def _parse_term(stream, env, variables):
    acc = _parse_unary(stream, env, variables)
    while stream.accept("*"):
        acc = acc * _parse_unary(stream, env, variables)
    return acc


def _parse_unary(stream, env, variables):
    sign = 1
    while True:
        if stream.accept("-"):
            sign = -sign
        elif stream.accept("+"):
            pass
        else:
            break
    p = _parse_power(stream, env, variables)
    return p if sign > 0 else -p


def _parse_power(stream, env, variables):
    base = _parse_atom(stream, env, variables)
    if stream.accept("^"):
        e = _parse_exponent(stream)
        return _poly_pow(base, e, stream)
    return base


def _parse_exponent(stream):
    if stream.accept("("):
        neg = bool(stream.accept("-"))
        t = stream.expect_kind("number")
        stream.expect(")")
        v = Fraction(t.text)
        return -v if neg else v
    neg = bool(stream.accept("-"))
    t = stream.expect_kind("number")
    v = Fraction(t.text)
    return -v if neg else v


def _poly_pow(base: PolyExpr, e: Fraction, stream) -> PolyExpr:
    if e.denominator == 1 and e >= 0:
        return base ** int(e)
    if base.is_monomial():
        (mono, coef), = base.terms.items()
        return PolyExpr(base.vars, {tuple(Fraction(x) * e for x in mono):
                                    _rational_pow(coef, e)})
    stream.error("fractional or negative powers apply only to monomials")


def _parse_atom(stream, env, variables):
    t = stream.peek()
    if t.kind == "number":
        stream.next()
        return PolyExpr.const(variables, Fraction(t.text))
    if t.kind == "ident":
        stream.next()
        if t.text not in env:
            raise ModelSyntaxError("unknown identifier", t.line, t.column, t.text)
        return env[t.text]
    if stream.accept("("):
        p = parse_poly_expr(stream, env, variables)
        stream.expect(")")
        return p
    stream.error("expected a polynomial atom")


def parse_polynomial(text: str, variables, extra_env: dict | None = None) -> PolyExpr:
    """Standalone expression parser over a fixed variable tuple."""
    variables = tuple(variables)
    env = {v: PolyExpr.var(v, variables) for v in variables}
    for k, v in (extra_env or {}).items():
        env[k] = v if isinstance(v, PolyExpr) else PolyExpr.const(variables, v)
    stream = _Stream(tokenize(text))
    p = parse_poly_expr(stream, env, variables)
    t = stream.peek()
    if t.kind != "eof":
        raise ModelSyntaxError("trailing input after expression",
                               t.line, t.column, t.text)
    return p


# ---------------- model files ----------------

@dataclass
class ModelSpec:
    name: str = "model"
    vars: tuple = ()
    weights: Optional[tuple] = None
    params: dict = field(default_factory=dict)
    lets: list = field(default_factory=list)        # [(name, PolyExpr)]
    casimirs: list = field(default_factory=list)    # [(name, PolyExpr)]
    structure_kind: Optional[str] = None            # jacobian | table | nambu
    table: dict = field(default_factory=dict)       # {(i, j): PolyExpr}, i < j
    nambu_arity: Optional[int] = None
    multiplier: Optional[PolyExpr] = None
    hamiltonians: list = field(default_factory=list)
    checks: list = field(default_factory=list)      # [(name, arg)]
    expects: dict = field(default_factory=dict)
    integrate: Optional[IntegrateRequest] = None

    def casimir_polys(self):
        return [p for _, p in self.casimirs]

    def named_poly(self, name: str) -> Optional[PolyExpr]:
        for n, p in self.casimirs + self.lets:
            if n == name:
                return p
        if name in self.vars:
            return PolyExpr.var(name, self.vars)
        return None

    def build_structure(self):
        if self.structure_kind == "table":
            return PoissonStructure.from_table(self.vars, self.table)
        if self.structure_kind == "jacobian":
            from .structures import jacobian_structure
            mult = self.multiplier if self.multiplier is not None \
                else PolyExpr.const(self.vars, 1)
            return jacobian_structure(self.vars, self.casimir_polys(), mult)
        if self.structure_kind == "nambu":
            m = len(self.vars) - self.nambu_arity
            if len(self.casimirs) != m:
                raise ArityError(
                    f"arity {self.nambu_arity} in {len(self.vars)} variables "
                    f"needs {m} Casimirs, got {len(self.casimirs)}")
            mult = self.multiplier if self.multiplier is not None \
                else PolyExpr.const(self.vars, 1)
            return NambuStructure(self.vars, self.casimir_polys(), mult)
        raise ArityError("no structure declared")


def parse_model(text: str, name: str = "model") -> ModelSpec:
    stream = _Stream(tokenize(text))
    spec = ModelSpec(name=name)
    env: dict[str, PolyExpr] = {}
    structure_seen = False

    t = stream.peek()
    if t.kind == "eof":
        raise ModelSyntaxError("empty model", t.line, t.column)

    while stream.peek().kind != "eof":
        t = stream.expect_kind("ident")
        stmt = t.text
        if stmt == "vars":
            if spec.vars:
                raise ModelSyntaxError("vars declared twice", t.line, t.column)
            names = []
            while stream.peek().kind == "ident":
                names.append(stream.next().text)
            if not names:
                stream.error("vars needs at least one name")
            spec.vars = tuple(names)
            env.update({v: PolyExpr.var(v, spec.vars) for v in spec.vars})
            stream.expect(";")
        elif stmt == "weights":
            ws = []
            while stream.peek().kind == "number":
                ws.append(int(Fraction(stream.next().text)))
            if not ws:
                stream.error("weights needs integers")
            spec.weights = tuple(ws)
            stream.expect(";")
        elif stmt == "param":
            pname = stream.expect_kind("ident").text
            stream.expect("=")
            neg = bool(stream.accept("-"))
            val = Fraction(stream.expect_kind("number").text)
            spec.params[pname] = -val if neg else val
            env[pname] = PolyExpr.const(spec.vars, spec.params[pname])
            stream.expect(";")
        elif stmt in ("let", "casimir"):
            pname = stream.expect_kind("ident").text
            if pname in env:
                raise ModelSyntaxError(f"name {pname!r} already defined",
                                       t.line, t.column)
            stream.expect("=")
            p = parse_poly_expr(stream, env, spec.vars)
            stream.expect(";")
            env[pname] = p
            (spec.casimirs if stmt == "casimir" else spec.lets).append((pname, p))
        elif stmt == "structure":
            if structure_seen:
                raise ModelSyntaxError("structure declared twice", t.line, t.column)
            structure_seen = True
            kind = stream.expect_kind("ident").text
            if kind == "jacobian":
                spec.structure_kind = "jacobian"
                if stream.accept("lambda"):
                    spec.multiplier = parse_poly_expr(stream, env, spec.vars)
            elif kind == "table":
                spec.structure_kind = "table"
                stream.expect("{")
                while not stream.accept("}"):
                    stream.expect("{")
                    a = stream.expect_kind("ident").text
                    stream.expect(",")
                    b = stream.expect_kind("ident").text
                    stream.expect("}")
                    stream.expect("=")
                    p = parse_poly_expr(stream, env, spec.vars)
                    stream.expect(";")
                    if a not in spec.vars or b not in spec.vars:
                        stream.error(f"table pair ({a},{b}) uses unknown variables")
                    i, j = spec.vars.index(a), spec.vars.index(b)
                    if i == j:
                        stream.error("diagonal table entry")
                    key = (i, j) if i < j else (j, i)
                    if key in spec.table:
                        stream.error(f"duplicate table entry for ({a},{b})")
                    spec.table[key] = p if i < j else -p
            elif kind == "nambu":
                spec.structure_kind = "nambu"
                spec.nambu_arity = int(Fraction(stream.expect_kind("number").text))
                if stream.accept("lambda"):
                    spec.multiplier = parse_poly_expr(stream, env, spec.vars)
            else:
                stream.error("structure must be jacobian, table, or nambu")
            stream.expect(";")
        elif stmt == "hamiltonian":
            spec.hamiltonians.append(parse_poly_expr(stream, env, spec.vars))
            while stream.accept(","):
                spec.hamiltonians.append(parse_poly_expr(stream, env, spec.vars))
            stream.expect(";")
        elif stmt == "check":
            spec.checks.append(_parse_checkname(stream))
            while stream.accept(","):
                spec.checks.append(_parse_checkname(stream))
            stream.expect(";")
        elif stmt == "expect":
            cname, carg = _parse_checkname(stream)
            key = cname if carg is None else f"{cname}({carg})"
            stream.expect("=")
            spec.expects[key] = _parse_literal(stream)
            stream.expect(";")
        elif stmt == "integrate":
            stream.expect("from")
            stream.expect("(")
            x0 = [_parse_float(stream)]
            while stream.accept(","):
                x0.append(_parse_float(stream))
            stream.expect(")")
            stream.expect("step")
            step = _parse_float(stream)
            stream.expect("until")
            t_end = _parse_float(stream)
            monitors = []
            if stream.accept("monitor"):
                while stream.peek().kind == "ident":
                    monitors.append(stream.next().text)
            stream.expect(";")
            spec.integrate = IntegrateRequest(tuple(x0), step, t_end,
                                              tuple(monitors))
        else:
            raise ModelSyntaxError("unknown statement", t.line, t.column, stmt)

    if not spec.vars:
        raise ModelSyntaxError("model declares no variables", 1, 1)
    if not structure_seen:
        raise ModelSyntaxError("model declares no structure", 1, 1)
    if spec.integrate:
        for mname in spec.integrate.monitors:
            if spec.named_poly(mname) is None:
                raise ModelSyntaxError(f"unknown monitor {mname!r}", 1, 1)
        if len(spec.integrate.x0) != len(spec.vars):
            raise ModelSyntaxError("integrate point dimension mismatch", 1, 1)
    return spec


def _parse_checkname(stream):
    t = stream.expect_kind("ident")
    name = t.text
    if name not in CHECK_NAMES:
        raise ModelSyntaxError("unknown check", t.line, t.column, name)
    arg = None
    if name in ("quasi", "fi"):
        stream.expect("(")
        if name == "quasi":
            arg = stream.expect_kind("ident").text
        else:
            arg = int(Fraction(stream.expect_kind("number").text))
        stream.expect(")")
    return (name, arg)


def _parse_literal(stream):
    t = stream.peek()
    if t.kind == "ident" and t.text in ("true", "false"):
        stream.next()
        return t.text == "true"
    neg = bool(stream.accept("-"))
    t = stream.peek()
    if t.kind == "number":
        stream.next()
        v = Fraction(t.text)
        v = -v if neg else v
        return int(v) if v.denominator == 1 else v
    stream.error("expected true, false, or a rational literal")


def _parse_float(stream):
    neg = bool(stream.accept("-"))
    t = stream.peek()
    if t.kind in ("float", "number"):
        stream.next()
        v = float(Fraction(t.text)) if t.kind == "number" else float(t.text)
        return -v if neg else v
    stream.error("expected a numeric literal")


# ---------------- canonical emission ----------------

def render_model(spec: ModelSpec) -> str:
    """Canonical text for a resolved model; parameters are already inlined."""
    out = []
    out.append("vars " + " ".join(spec.vars) + ";")
    if spec.weights:
        out.append("weights " + " ".join(str(w) for w in spec.weights) + ";")
    for name, p in spec.casimirs:
        out.append(f"casimir {name} = {p.render()};")
    if spec.structure_kind == "jacobian":
        mult = spec.multiplier if spec.multiplier is not None else None
        lam = f" lambda {mult.render()}" if mult is not None else ""
        out.append(f"structure jacobian{lam};")
    elif spec.structure_kind == "table":
        out.append("structure table {")
        for (i, j) in sorted(spec.table):
            p = spec.table[(i, j)]
            out.append(f"  {{{spec.vars[i]},{spec.vars[j]}}} = {p.render()};")
        out.append("};")
    elif spec.structure_kind == "nambu":
        lam = f" lambda {spec.multiplier.render()}" if spec.multiplier is not None else ""
        out.append(f"structure nambu {spec.nambu_arity}{lam};")
    if spec.hamiltonians:
        out.append("hamiltonian "
                   + ", ".join(h.render() for h in spec.hamiltonians) + ";")
    if spec.checks:
        out.append("check " + ", ".join(_checkname_text(c) for c in spec.checks) + ";")
    for key, val in spec.expects.items():
        out.append(f"expect {key} = {_literal_text(val)};")
    if spec.integrate:
        ir = spec.integrate
        mon = (" monitor " + " ".join(ir.monitors)) if ir.monitors else ""
        out.append("integrate from (" + ", ".join(repr(float(v)) for v in ir.x0)
                   + f") step {float(ir.step)!r} until {float(ir.t_end)!r}{mon};")
    return "\n".join(out) + "\n"


def _checkname_text(c):
    name, arg = c
    return name if arg is None else f"{name}({arg})"


def _literal_text(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


def model_spec_from_built(bm: BuiltModel) -> ModelSpec:
    """Lower a catalog model to an emission-ready spec (parameters inlined)."""
    spec = ModelSpec(name=bm.name)
    spec.vars = bm.vars
    spec.weights = bm.weights
    spec.casimirs = list(bm.casimirs)
    spec.structure_kind = bm.structure_kind
    spec.multiplier = bm.multiplier
    if bm.structure_kind == "table":
        spec.table = {key: p for key, p in bm.structure.entries_upper()
                      if not p.is_zero()}
    if bm.structure_kind == "nambu":
        spec.nambu_arity = bm.structure.arity
    spec.hamiltonians = list(bm.hamiltonians)
    spec.checks = list(bm.checks)
    spec.expects = dict(bm.expects)
    spec.integrate = bm.integrate
    return spec


def parse_map_file(text: str, old_vars) -> "MonomialMap":
    """``map IDENT = scaled-monomial ;`` lines over the old variables."""
    from .poly import MonomialMap
    stream = _Stream(tokenize(text))
    env = {v: PolyExpr.var(v, tuple(old_vars)) for v in old_vars}
    assignments = []
    while stream.peek().kind != "eof":
        stream.expect("map")
        name = stream.expect_kind("ident").text
        stream.expect("=")
        p = parse_poly_expr(stream, env, tuple(old_vars))
        stream.expect(";")
        assignments.append((name, p))
    if not assignments:
        raise ModelSyntaxError("empty map file", 1, 1)
    return MonomialMap.from_monomials(tuple(old_vars), assignments)
