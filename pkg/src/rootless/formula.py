"""Positive existential formulas: construction, serialization, bounded
evaluation, and the quotient-ring interpretation.

The AST covers exactly the positive existential fragment (equations,
conjunction, disjunction, existential quantification) over the ring
language, plus a unary subring predicate for sentences about a pair
(L, K).  Builders produce:

  * a definition of the p-integral rationals as a sum of two quaternion
    trace-difference sets whose ramification overlaps exactly at p,
  * the pair sentence distinguishing Q from its degree-n extensions, and
  * the ring-language formula in the coefficients a_0..a_{n-1} expressing
    that X^n + a_{n-1} X^{n-1} + ... + a_0 has no rational root, obtained
    by interpreting quotient-ring arithmetic on n-tuples.

Multiplication of n-tuples is expanded through fixed reduction tables with
symbolic coefficients; no auxiliary quantified variables are introduced for
products.  Nobody has tried to minimize variable counts.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from . import _sympoly as sp
from .cft import ClassFieldConfig, class_representatives, default_config
from .csa import CyclicFieldSpec, QuaternionSpec
from .localglobal import quaternion_ramified_set, rationals_by_height
from .qpoly import PolyQ, factor_integer

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Add:
    args: tuple


@dataclass(frozen=True)
class Mul:
    args: tuple


Term = Union[Var, Const, Add, Mul]


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Exists:
    names: tuple[str, ...]
    body: "Formula"


@dataclass(frozen=True)
class InSubring:
    term: Term


Formula = Union[Eq, And, Or, Exists, InSubring]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _flat_and(args: Iterable[Formula]) -> Formula:
    out = []
    for a in args:
        if isinstance(a, And):
            out.extend(a.args)
        else:
            out.append(a)
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def _flat_or(args: Iterable[Formula]) -> Formula:
    out = []
    for a in args:
        if isinstance(a, Or):
            out.extend(a.args)
        else:
            out.append(a)
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def validate(formula: Formula, free: Iterable[str] = (),
             allow_subring: bool = True) -> None:
    """Check the tree is well-formed positive existential syntax with every
    variable declared (free or bound in scope).  Raises ValueError."""

    def term(t, scope):
        if isinstance(t, Var):
            if t.name not in scope:
                raise ValueError(f"undeclared variable {t.name}")
        elif isinstance(t, Const):
            pass
        elif isinstance(t, (Add, Mul)):
            if not t.args:
                raise ValueError("empty term node")
            for a in t.args:
                term(a, scope)
        else:
            raise ValueError(f"not a term: {t!r}")

    def go(f, scope):
        if isinstance(f, Eq):
            term(f.lhs, scope)
            term(f.rhs, scope)
        elif isinstance(f, (And, Or)):
            if isinstance(f, Or) and not f.args:
                raise ValueError("empty disjunction")
            for a in f.args:
                go(a, scope)
        elif isinstance(f, Exists):
            for nm in f.names:
                if not _NAME_RE.match(nm):
                    raise ValueError(f"bad variable name {nm!r}")
            go(f.body, scope | set(f.names))
        elif isinstance(f, InSubring):
            if not allow_subring:
                raise ValueError("subring predicate not allowed in the ring language")
            term(f.term, scope)
        else:
            raise ValueError(f"not a positive existential formula node: {f!r}")

    go(formula, set(free))


@dataclass(frozen=True)
class FormulaStats:
    """quantifiers counts bound variables, disjuncts the total width of all
    disjunctions, equations the Eq nodes, parameters the distinct rational
    constants."""

    quantifiers: int
    disjuncts: int
    equations: int
    parameters: int

    def dominates(self, other: "FormulaStats") -> bool:
        return (self.quantifiers > other.quantifiers
                and self.disjuncts > other.disjuncts
                and self.equations > other.equations
                and self.parameters > other.parameters)


def stats(formula: Formula) -> FormulaStats:
    quantifiers = disjuncts = equations = 0
    consts: set[Fraction] = set()

    def term(t):
        if isinstance(t, Const):
            consts.add(t.value)
        elif isinstance(t, (Add, Mul)):
            for a in t.args:
                term(a)

    stack = [formula]
    while stack:
        f = stack.pop()
        if isinstance(f, Eq):
            equations += 1
            term(f.lhs)
            term(f.rhs)
        elif isinstance(f, And):
            stack.extend(f.args)
        elif isinstance(f, Or):
            disjuncts += len(f.args)
            stack.extend(f.args)
        elif isinstance(f, Exists):
            quantifiers += len(f.names)
            stack.append(f.body)
        elif isinstance(f, InSubring):
            term(f.term)
    return FormulaStats(quantifiers, disjuncts, equations, len(consts))


# ---------------------------------------------------------------------------
# serialization
#
# Parenthesized prefix text: keywords exists/and/or/eq/in-subring for
# formulas, + and * for terms, rationals always as num/den.


def serialize(node) -> str:
    parts: list[str] = []

    def term(t):
        if isinstance(t, Var):
            parts.append(t.name)
        elif isinstance(t, Const):
            v = t.value
            parts.append(f"{v.numerator}/{v.denominator}")
        elif isinstance(t, Add):
            parts.append("(+")
            for a in t.args:
                parts.append(" ")
                term(a)
            parts.append(")")
        elif isinstance(t, Mul):
            parts.append("(*")
            for a in t.args:
                parts.append(" ")
                term(a)
            parts.append(")")
        else:
            raise ValueError(f"cannot serialize term {t!r}")

    def go(f):
        if isinstance(f, Eq):
            parts.append("(eq ")
            term(f.lhs)
            parts.append(" ")
            term(f.rhs)
            parts.append(")")
        elif isinstance(f, And):
            parts.append("(and")
            for a in f.args:
                parts.append(" ")
                go(a)
            parts.append(")")
        elif isinstance(f, Or):
            parts.append("(or")
            for a in f.args:
                parts.append(" ")
                go(a)
            parts.append(")")
        elif isinstance(f, Exists):
            parts.append("(exists (" + " ".join(f.names) + ") ")
            go(f.body)
            parts.append(")")
        elif isinstance(f, InSubring):
            parts.append("(in-subring ")
            term(f.term)
            parts.append(")")
        else:
            term(f)

    go(node)
    return "".join(parts)


class ParseError(Exception):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")
_RATIONAL_RE = re.compile(r"-?\d+(/\d+)?\Z")


def parse(text: str):
    """Inverse of serialize; raises ParseError with a character offset."""
    tokens = [(m.group(0), m.start()) for m in _TOKEN_RE.finditer(text)]
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, len(text))

    def take():
        nonlocal pos
        tok = peek()
        if tok[0] is None:
            raise ParseError("unexpected end of input", tok[1])
        pos += 1
        return tok

    def atom(tok, off):
        if _RATIONAL_RE.match(tok):
            if "/" in tok:
                num, den = tok.split("/")
                return Const(Fraction(int(num), int(den)))
            return Const(Fraction(int(tok)))
        if _NAME_RE.match(tok):
            return Var(tok)
        raise ParseError(f"bad atom {tok!r}", off)

    def expr():
        tok, off = take()
        if tok == ")":
            raise ParseError("unexpected ')'", off)
        if tok != "(":
            return atom(tok, off)
        head, hoff = take()
        if head == "exists":
            opener, ooff = take()
            if opener != "(":
                raise ParseError("expected variable list", ooff)
            names = []
            while True:
                tok2, off2 = peek()
                if tok2 is None:
                    raise ParseError("unterminated variable list", off2)
                if tok2 == ")":
                    take()
                    break
                take()
                if not _NAME_RE.match(tok2):
                    raise ParseError(f"bad variable name {tok2!r}", off2)
                names.append(tok2)
            body = expr()
            node = Exists(tuple(names), body)
        elif head in ("and", "or", "+", "*"):
            args = []
            while True:
                tok2, _ = peek()
                if tok2 == ")":
                    break
                if tok2 is None:
                    raise ParseError("unterminated list", len(text))
                args.append(expr())
            ctor = {"and": And, "or": Or, "+": Add, "*": Mul}[head]
            node = ctor(tuple(args))
            close()
            return node
        elif head == "eq":
            lhs = expr()
            rhs = expr()
            node = Eq(lhs, rhs)
        elif head == "in-subring":
            node = InSubring(expr())
        else:
            raise ParseError(f"unknown head {head!r}", hoff)
        close()
        return node

    def close():
        tok, off = take()
        if tok != ")":
            raise ParseError("expected ')'", off)

    node = expr()
    tok, off = peek()
    if tok is not None:
        raise ParseError(f"trailing input {tok!r}", off)
    return node


# ---------------------------------------------------------------------------
# polynomial <-> term conversion


def _poly_to_term(poly: sp.Poly) -> Term:
    if not poly:
        return Const(Fraction(0))
    monomials = sorted(poly.items(), key=lambda kv: kv[0])
    terms = []
    for mono, coeff in monomials:
        factors: list[Term] = []
        if coeff != 1 or not mono:
            factors.append(Const(coeff))
        for v, e in mono:
            factors.extend(Var(v) for _ in range(e))
        terms.append(factors[0] if len(factors) == 1 else Mul(tuple(factors)))
    return terms[0] if len(terms) == 1 else Add(tuple(terms))


def _term_to_poly(t: Term) -> sp.Poly:
    if isinstance(t, Var):
        return sp.p_var(t.name)
    if isinstance(t, Const):
        return sp.p_const(t.value)
    if isinstance(t, Add):
        out: sp.Poly = {}
        for a in t.args:
            out = sp.p_add(out, _term_to_poly(a))
        return out
    if isinstance(t, Mul):
        out = sp.p_const(1)
        for a in t.args:
            out = sp.p_mul(out, _term_to_poly(a))
        return out
    raise ValueError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# quaternion pair search and the p-integrality definition


@dataclass(frozen=True)
class IntegralityPair:
    p: int
    first: QuaternionSpec
    second: QuaternionSpec
    first_ramified: tuple[int, ...]
    second_ramified: tuple[int, ...]


class PairSearchExhausted(Exception):
    pass


_PAIR_CACHE: dict[int, IntegralityPair] = {}


def find_integrality_pair(p: int, search_bound: int = 30) -> IntegralityPair:
    """Two quaternion algebras, split at the real place, whose finite
    ramification sets intersect exactly in {p}."""
    if p in _PAIR_CACHE:
        return _PAIR_CACHE[p]
    candidates = []
    values = sorted(range(-search_bound, search_bound + 1),
                    key=lambda v: (abs(v), v < 0))
    for a in values:
        for b in values:
            if a == 0 or b == 0 or (a < 0 and b < 0):
                continue
            rs = quaternion_ramified_set(QuaternionSpec(a, b))
            if rs.infinite or p not in rs.finite:
                continue
            candidates.append((QuaternionSpec(a, b), rs.finite))
    for i, (spec1, ram1) in enumerate(candidates):
        for spec2, ram2 in candidates[i:]:
            if ram1 & ram2 == {p}:
                pair = IntegralityPair(p, spec1, spec2, tuple(sorted(ram1)),
                                       tuple(sorted(ram2)))
                _PAIR_CACHE[p] = pair
                return pair
    raise PairSearchExhausted(f"no algebra pair for p={p} within bound {search_bound}")


def _quaternion_norm_eq(spec: QuaternionSpec, names: Sequence[str]) -> Eq:
    u0, u1, u2, u3 = (Var(nm) for nm in names)
    lhs = Add((Mul((u0, u0)),
               Mul((Const(-spec.a), u1, u1)),
               Mul((Const(-spec.b), u2, u2)),
               Mul((Const(spec.a * spec.b), u3, u3))))
    return Eq(lhs, Const(Fraction(1)))


def _integrality_body(pair: IntegralityPair, target: Term, prefix: str,
                      subring: bool) -> Formula:
    """Exists-block stating target lies in the sum of the two trace-difference
    sets: target = (2u0 - 2v0) + (2s0 - 2t0) with four norm-one witnesses."""
    groups = {}
    names = []
    for tag, spec in (("u", pair.first), ("v", pair.first),
                      ("s", pair.second), ("t", pair.second)):
        groups[tag] = [f"{prefix}{tag}{i}" for i in range(4)]
        names.extend(groups[tag])
    two, mtwo = Const(Fraction(2)), Const(Fraction(-2))
    trace_sum = Add((Mul((two, Var(groups["u"][0]))),
                     Mul((mtwo, Var(groups["v"][0]))),
                     Mul((two, Var(groups["s"][0]))),
                     Mul((mtwo, Var(groups["t"][0])))))
    children: list[Formula] = []
    if subring:
        children.extend(InSubring(Var(nm)) for nm in names)
    children.append(Eq(target, trace_sum))
    children.append(_quaternion_norm_eq(pair.first, groups["u"]))
    children.append(_quaternion_norm_eq(pair.first, groups["v"]))
    children.append(_quaternion_norm_eq(pair.second, groups["s"]))
    children.append(_quaternion_norm_eq(pair.second, groups["t"]))
    return Exists(tuple(names), _flat_and(children))


def build_integrality_formula(p: int, var: str = "x",
                              search_bound: int = 30) -> tuple[Formula, IntegralityPair]:
    """Ring-language definition of the p-integral rationals, with one free
    variable; returns the chosen algebra pair alongside."""
    pair = find_integrality_pair(p, search_bound)
    formula = _integrality_body(pair, Var(var), f"Op{p}_", subring=False)
    validate(formula, free=(var,), allow_subring=False)
    return formula, pair


# ---------------------------------------------------------------------------
# symbolic norm/trace forms for cyclic algebras


def _field_traces(fs: CyclicFieldSpec) -> list[Fraction]:
    """Traces of the power basis 1, theta, .., theta^{l-1} down to Q."""
    l, g = fs.l, fs.defining_poly
    ring = sp.rational_quotient([c for c in g.coeffs[:-1]])
    out = []
    for s in range(l):
        total = [sp.P_ZERO] * l
        for row in range(l):
            # theta^s under sigma^row is (sigma^row theta)^s
            img = PolyQ((1,)) if s == 0 else (fs.sigma_power(row) ** s) % g
            total = ring.add(total, _field_element(img, g, l))
        for k in range(1, l):
            if total[k]:
                raise AssertionError("trace escaped the rationals")
        out.append(sp.p_eval(total[0], {}) if total[0] else Fraction(0))
    return out


def _field_element(poly: PolyQ, g: PolyQ, l: int) -> list[sp.Poly]:
    red = poly % g
    return [sp.p_const(red[k]) for k in range(l)]


def cyclic_norm_form(fs: CyclicFieldSpec, var_names: Sequence[str],
                     alpha: str = "ALPHA") -> sp.Poly:
    """Reduced norm of a general element of (M, sigma, alpha) as a polynomial
    in the l^2 coordinates and the symbol alpha.

    Computed as the determinant of the matrix representation over M; the
    off-rational components must cancel identically, which is asserted.
    """
    l, g = fs.l, fs.defining_poly
    if len(var_names) != l * l:
        raise ValueError(f"need {l * l} coordinate names")
    ring = sp.rational_quotient([c for c in g.coeffs[:-1]])
    a_poly = sp.p_var(alpha)

    def entry(row, col):
        t = (row - col) % l
        wrap = row < col
        vec = [sp.P_ZERO] * l
        for s in range(l):
            coord = sp.p_var(var_names[s + l * t])
            if wrap:
                coord = sp.p_mul(coord, a_poly)
            img = (fs.sigma_power(row) ** s) % g if s else PolyQ((1,))
            for k in range(l):
                c = img[k]
                if c:
                    vec[k] = sp.p_add(vec[k], sp.p_scale(coord, c))
        return vec

    mat = [[entry(r, c) for c in range(l)] for r in range(l)]
    if l == 2:
        det = ring.add(ring.mul(mat[0][0], mat[1][1]),
                       [sp.p_neg(c) for c in ring.mul(mat[0][1], mat[1][0])])
    elif l == 3:
        def minor(r1, r2, c1, c2):
            return ring.add(ring.mul(mat[r1][c1], mat[r2][c2]),
                            [sp.p_neg(c) for c in ring.mul(mat[r1][c2], mat[r2][c1])])
        det = ring.mul(mat[0][0], minor(1, 2, 1, 2))
        det = ring.add(det, [sp.p_neg(c) for c in ring.mul(mat[0][1], minor(1, 2, 0, 2))])
        det = ring.add(det, ring.mul(mat[0][2], minor(1, 2, 0, 1)))
    else:
        raise ValueError("degrees 2 and 3 only")
    for k in range(1, l):
        if det[k]:
            raise AssertionError("determinant escaped the rationals")
    return det[0]


def cyclic_trace_term(fs: CyclicFieldSpec, var_names: Sequence[str]) -> Term:
    """Reduced trace: a rational linear form in the t = 0 coordinates."""
    traces = _field_traces(fs)
    parts = []
    for s, tr in enumerate(traces):
        if tr:
            parts.append(Mul((Const(tr), Var(var_names[s]))))
    return Add(tuple(parts)) if len(parts) != 1 else parts[0]


def _membership_block(fs: CyclicFieldSpec, index: int, alpha_term: Term,
                      member_term: Term, prefix: str) -> Formula:
    """member lies in the trace set of (M_i, sigma_i, alpha): directly a
    trace of a norm-one element for l = 3, a difference of two for l = 2."""
    l = fs.l
    nn = l * l

    def norm_eq(names):
        placeholders = [f"@{k}" for k in range(nn)]
        poly = cyclic_norm_form(fs, placeholders)
        env = {f"@{k}": sp.p_var(names[k]) for k in range(nn)}
        # alpha stays symbolic; substitute coordinates then map alpha below
        substituted = sp.p_subst(poly, env)
        term = _subst_alpha(_poly_to_term(substituted), alpha_term)
        return Eq(term, Const(Fraction(1)))

    if l == 2:
        u = [f"{prefix}u{k}" for k in range(4)]
        v = [f"{prefix}v{k}" for k in range(4)]
        diff = Add((cyclic_trace_term(fs, u),
                    Mul((Const(Fraction(-1)), cyclic_trace_term(fs, v)))))
        body = _flat_and([Eq(member_term, diff), norm_eq(u), norm_eq(v)])
        return Exists(tuple(u + v), body)
    u = [f"{prefix}u{k}" for k in range(nn)]
    body = _flat_and([Eq(member_term, cyclic_trace_term(fs, u)), norm_eq(u)])
    return Exists(tuple(u), body)


def _subst_alpha(t: Term, alpha_term: Term, name: str = "ALPHA") -> Term:
    if isinstance(t, Var):
        return alpha_term if t.name == name else t
    if isinstance(t, Const):
        return t
    if isinstance(t, Add):
        return Add(tuple(_subst_alpha(a, alpha_term, name) for a in t.args))
    if isinstance(t, Mul):
        return Mul(tuple(_subst_alpha(a, alpha_term, name) for a in t.args))
    raise ValueError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# the pair sentence


def build_pair_sentence(n: int,
                        cfgs: Optional[dict[int, ClassFieldConfig]] = None,
                        reps: Optional[dict[int, Sequence[Fraction]]] = None) -> Formula:
    """Positive existential sentence over a ring pair (L, K), true exactly
    when L admits the distinguishing witness: some representative times a
    modulus unit whose algebras all have it inside their trace sets.

    Representatives default to the least prime in each nonzero Artin class.
    """
    if n not in (2, 3, 4):
        raise ValueError("n must be 2, 3, or 4")
    primes_l = sorted({p for p, _ in factor_integer(n).factors})
    cfgs = cfgs or {l: default_config(l, n) for l in primes_l}
    if reps is None:
        reps = {}
        for l in primes_l:
            table = class_representatives(cfgs[l])
            reps[l] = [Fraction(table[cls]) for cls in sorted(table)]
    disjuncts = []
    for l in primes_l:
        cfg = cfgs[l]
        modulus_primes = [p for p, _ in factor_integer(cfg.modulus).factors]
        for jj, aj in enumerate(reps[l]):
            prefix = f"l{l}j{jj}_"
            b = f"{prefix}b"
            alpha = Mul((Const(aj), Var(b)))
            children: list[Formula] = [InSubring(Var(b))]
            # b is a unit congruent to 1 at the modulus: b = 1 + modulus*c
            # with c integral at every modulus prime, and b is invertible
            e = f"{prefix}e"
            children.append(Exists((e,), _flat_and([
                InSubring(Var(e)), Eq(Mul((Var(b), Var(e))), Const(Fraction(1)))])))
            c = f"{prefix}c"
            unit_children: list[Formula] = [
                InSubring(Var(c)),
                Eq(Var(b), Add((Const(Fraction(1)), Mul((Const(Fraction(cfg.modulus)), Var(c)))))),
            ]
            for p in modulus_primes:
                pair = find_integrality_pair(p)
                unit_children.append(_integrality_body(pair, Var(c),
                                                       f"{prefix}p{p}_", subring=True))
            children.append(Exists((c,), _flat_and(unit_children)))
            # each algebra must contain alpha and its inverse in its trace set
            for i, fs in enumerate(cfg.fields):
                children.append(_membership_block(fs, i, alpha, alpha,
                                                  f"{prefix}f{i}x_"))
            w = f"{prefix}w"
            inv_children: list[Formula] = [
                InSubring(Var(w)),
                Eq(Mul((alpha, Var(w))), Const(Fraction(1))),
            ]
            for i, fs in enumerate(cfg.fields):
                inv_children.append(_membership_block(fs, i, alpha, Var(w),
                                                      f"{prefix}f{i}w_"))
            children.append(Exists((w,), _flat_and(inv_children)))
            disjuncts.append(Exists((b,), _flat_and(children)))
    sentence = _flat_or(disjuncts)
    validate(sentence)
    return sentence


# ---------------------------------------------------------------------------
# interpretation over the coefficient quotient ring


def _interpret_pair_sentence(sentence: Formula, n: int) -> Formula:
    """Rewrite a pair sentence as a ring-language formula about K, with the
    quotient ring K[X]/(f) realized as n-tuples and f's coefficients kept
    symbolic as the free variables a_0..a_{n-1}.

    Quantifiers over subring-constrained variables collapse to a single
    component; the subring predicate on a tuple becomes vanishing of its
    nonconstant components.
    """
    ring = sp.symbolic_quotient(n, "a")
    zero = sp.P_ZERO

    def term_vec(t: Term, env) -> list[sp.Poly]:
        if isinstance(t, Var):
            names = env[t.name]
            return [sp.p_var(nm) for nm in names] + [zero] * (n - len(names))
        if isinstance(t, Const):
            return ring.scalar(sp.p_const(t.value))
        if isinstance(t, Add):
            out = ring.zero()
            for a in t.args:
                out = ring.add(out, term_vec(a, env))
            return out
        if isinstance(t, Mul):
            out = None
            for a in t.args:
                v = term_vec(a, env)
                out = v if out is None else ring.mul(out, v)
            return out
        raise ValueError(f"not a term: {t!r}")

    def eq_components(lv, rv) -> list[Formula]:
        eqs = []
        for a, b in zip(lv, rv):
            if a != b:
                eqs.append(Eq(_poly_to_term(a), _poly_to_term(b)))
        return eqs

    def go(f: Formula, env) -> Formula:
        if isinstance(f, Eq):
            return _flat_and(eq_components(term_vec(f.lhs, env), term_vec(f.rhs, env)))
        if isinstance(f, InSubring):
            vec = term_vec(f.term, env)
            return _flat_and([Eq(_poly_to_term(c), Const(Fraction(0)))
                              for c in vec[1:] if c])
        if isinstance(f, And):
            return _flat_and(go(a, env) for a in f.args)
        if isinstance(f, Or):
            return _flat_or(go(a, env) for a in f.args)
        if isinstance(f, Exists):
            conjuncts = f.body.args if isinstance(f.body, And) else (f.body,)
            scalar = {c.term.name for c in conjuncts
                      if isinstance(c, InSubring) and isinstance(c.term, Var)}
            env2 = dict(env)
            bound = []
            for nm in f.names:
                width = 1 if nm in scalar else n
                comps = tuple(f"{nm}__{i}" for i in range(width))
                env2[nm] = comps
                bound.extend(comps)
            return Exists(tuple(bound), go(f.body, env2))
        raise ValueError(f"not a formula: {f!r}")

    out = go(sentence, {})
    return out


def _and_nonempty(f: Formula) -> Formula:
    # an empty And (everything trivially true) cannot serve as a branch
    if isinstance(f, And) and not f.args:
        return Eq(Const(Fraction(0)), Const(Fraction(0)))
    return f


def rename_free(f, mapping: dict[str, str]):
    """Rename free variables; bound names must avoid the mapping entirely."""

    def term(t):
        if isinstance(t, Var):
            return Var(mapping.get(t.name, t.name))
        if isinstance(t, (Add, Mul)):
            args = tuple(term(a) for a in t.args)
            return Add(args) if isinstance(t, Add) else Mul(args)
        return t

    def go(node):
        if isinstance(node, Eq):
            return Eq(term(node.lhs), term(node.rhs))
        if isinstance(node, And):
            return And(tuple(go(a) for a in node.args))
        if isinstance(node, Or):
            return Or(tuple(go(a) for a in node.args))
        if isinstance(node, InSubring):
            return InSubring(term(node.term))
        if isinstance(node, Exists):
            clash = set(node.names) & (set(mapping) | set(mapping.values()))
            if clash:
                raise ValueError(f"bound names collide with renaming: {clash}")
            return Exists(node.names, go(node.body))
        raise ValueError(f"not a formula: {node!r}")

    return go(f)


_PHI_CACHE: dict[int, Formula] = {}


def build_no_root_formula(n: int) -> Formula:
    """The ring-language formula in free variables a0..a_{n-1} expressing
    that X^n + a_{n-1} X^{n-1} + ... + a0 has no rational root.

    Degrees 2 and 3 interpret the pair sentence directly; degree 4 adds the
    branch for a product of two rootless quadratics, embedding two copies of
    the degree-2 formula.
    """
    if n in _PHI_CACHE:
        return _PHI_CACHE[n]
    if n not in (2, 3, 4):
        raise ValueError("n must be 2, 3, or 4")
    psi = build_pair_sentence(n)
    phi = _and_nonempty(_interpret_pair_sentence(psi, n))
    if n == 4:
        phi2 = build_no_root_formula(2)
        first = rename_free(phi2, {"a0": "b0", "a1": "b1"})
        second = rename_free(phi2, {"a0": "c0", "a1": "c1"})
        b0, b1, c0, c1 = Var("b0"), Var("b1"), Var("c0"), Var("c1")
        coeff_match = [
            Eq(Var("a3"), Add((b1, c1))),
            Eq(Var("a2"), Add((b0, c0, Mul((b1, c1))))),
            Eq(Var("a1"), Add((Mul((b1, c0)), Mul((c1, b0))))),
            Eq(Var("a0"), Mul((b0, c0))),
        ]
        split_branch = Exists(("b0", "b1", "c0", "c1"),
                              _flat_and(coeff_match + [first, second]))
        phi = _flat_or([phi, split_branch])
    validate(phi, free=[f"a{i}" for i in range(n)], allow_subring=False)
    _PHI_CACHE[n] = phi
    return phi


# ---------------------------------------------------------------------------
# bounded evaluation (ring language only)


@dataclass(frozen=True)
class EvalResult:
    sat: bool  # False means Unknown, never "unsatisfiable"
    witness: Optional[dict[str, Fraction]]

    @property
    def verdict(self) -> str:
        return "sat" if self.sat else "unknown"


class _Budget:
    def __init__(self, n):
        self.left = n

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise _BudgetOut


class _BudgetOut(Exception):
    pass


def _eval_term(t: Term, env) -> Fraction:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Add):
        return sum((_eval_term(a, env) for a in t.args), Fraction(0))
    if isinstance(t, Mul):
        out = Fraction(1)
        for a in t.args:
            out *= _eval_term(a, env)
        return out
    raise ValueError(f"not a term: {t!r}")


def bounded_eval(formula: Formula, assignment: dict, height: int,
                 budget: int = 100_000) -> EvalResult:
    """Depth-first witness search with all arithmetic exact.

    Returns sat with a witness when one exists within the height bound and
    node budget, otherwise unknown; a negative answer is never claimed.
    """
    env = {k: Fraction(v) for k, v in assignment.items()}
    pool = list(rationals_by_height(height))
    budget_box = _Budget(budget)
    found: dict[str, Fraction] = {}

    def go(f, env) -> bool:
        if isinstance(f, Eq):
            return _eval_term(f.lhs, env) == _eval_term(f.rhs, env)
        if isinstance(f, And):
            return all(go(a, env) for a in f.args)
        if isinstance(f, Or):
            return any(go(a, env) for a in f.args)
        if isinstance(f, InSubring):
            raise ValueError("bounded_eval works over the ring language only")
        if isinstance(f, Exists):
            def assign(idx, env2):
                if idx == len(f.names):
                    return go(f.body, env2)
                for val in pool:
                    budget_box.tick()
                    env2[f.names[idx]] = val
                    if assign(idx + 1, env2):
                        return True
                env2.pop(f.names[idx], None)
                return False
            env3 = dict(env)
            if assign(0, env3):
                found.update(env3)
                return True
            return False
        raise ValueError(f"not a formula: {f!r}")

    try:
        if go(formula, env):
            return EvalResult(True, dict(found))
    except _BudgetOut:
        pass
    return EvalResult(False, None)


# ---------------------------------------------------------------------------
# homomorphism soundness of the interpretation


def check_quotient_interpretation(f: PolyQ, root, rng, trials: int = 20) -> bool:
    """Sanity of the tuple arithmetic behind the interpretation.

    Instantiates the symbolic reduction tables at the coefficients of f and
    checks, on random tuples, that products agree with direct polynomial
    arithmetic mod f and that evaluation at a root r of f is a ring
    homomorphism to Q (so satisfaction transports along it).
    """
    n = f.degree
    root = Fraction(root)
    if not f.is_monic or f(root) != 0:
        raise ValueError("need a monic polynomial with the given rational root")
    ring = sp.symbolic_quotient(n, "a")
    env = {f"a{i}": f[i] for i in range(n)}

    def ev(vec_values):
        return sum(c * root ** i for i, c in enumerate(vec_values))

    for _ in range(trials):
        u = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n)]
        v = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n)]
        prod_sym = ring.mul([sp.p_const(c) for c in u], [sp.p_const(c) for c in v])
        got = [sp.p_eval(c, env) for c in prod_sym]
        want = (PolyQ(u) * PolyQ(v)) % f
        if got != [want[i] for i in range(n)]:
            return False
        if ev(got) != ev(u) * ev(v):
            return False
        # subring tuples embed as constants and evaluation restores them
        c = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        if ev([c] + [Fraction(0)] * (n - 1)) != c:
            return False
    return True
