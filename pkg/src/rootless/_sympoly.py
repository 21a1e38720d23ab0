"""Sparse multivariate polynomials over Q and quotient-ring vectors.

Internal helper for the formula builders.  A polynomial is a dict mapping a
monomial (sorted tuple of (variable, exponent) pairs) to a nonzero Fraction;
the zero polynomial is the empty dict.  Quotient rings Q[vars][X]/(f) are
handled through explicit reduction tables for the powers of X, with the
coefficients of f either symbolic variables or rational constants.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

Monomial = tuple[tuple[str, int], ...]
Poly = dict[Monomial, Fraction]

P_ZERO: Poly = {}


def p_const(c) -> Poly:
    c = Fraction(c)
    return {(): c} if c else {}


def p_var(name: str) -> Poly:
    return {((name, 1),): Fraction(1)}


def p_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, Fraction(0)) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def p_neg(a: Poly) -> Poly:
    return {m: -c for m, c in a.items()}


def p_sub(a: Poly, b: Poly) -> Poly:
    return p_add(a, p_neg(b))


def p_scale(a: Poly, c) -> Poly:
    c = Fraction(c)
    if not c:
        return {}
    return {m: c * v for m, v in a.items()}


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    acc = dict(m1)
    for v, e in m2:
        acc[v] = acc.get(v, 0) + e
    return tuple(sorted(acc.items()))


def p_mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return {}
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mono_mul(m1, m2)
            s = out.get(m, Fraction(0)) + c1 * c2
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def p_eval(a: Poly, env: Mapping[str, Fraction]) -> Fraction:
    total = Fraction(0)
    for m, c in a.items():
        term = c
        for v, e in m:
            term *= Fraction(env[v]) ** e
        total += term
    return total


def p_subst(a: Poly, env: Mapping[str, Poly]) -> Poly:
    """Substitute polynomials for variables (variables not in env persist)."""
    out: Poly = {}
    for m, c in a.items():
        term = p_const(c)
        for v, e in m:
            if v in env:
                for _ in range(e):
                    term = p_mul(term, env[v])
            else:
                term = p_mul(term, p_var(v) if e == 1 else {((v, e),): Fraction(1)})
        out = p_add(out, term)
    return out


class QuotientRing:
    """Q[coeff vars][X] / (X^n + c_{n-1} X^{n-1} + ... + c_0).

    Elements are length-n lists of Polys.  The reduction table expresses
    X^m for m up to 3(n-1) in the power basis, so products of up to three
    general elements reduce without re-deriving rows.
    """

    def __init__(self, n: int, coeffs: Sequence[Poly]):
        if len(coeffs) != n:
            raise ValueError("need n non-leading coefficients")
        self.n = n
        self.coeffs = [dict(c) for c in coeffs]
        top = 3 * (n - 1)
        table: list[list[Poly]] = []
        for m in range(n):
            table.append([p_const(1) if i == m else {} for i in range(n)])
        for m in range(n, top + 1):
            prev = table[m - 1]
            shifted = [{}] + [dict(p) for p in prev[: n - 1]]
            overflow = prev[n - 1]
            if overflow:
                for i in range(n):
                    shifted[i] = p_add(shifted[i], p_neg(p_mul(overflow, self.coeffs[i])))
            table.append(shifted)
        self.table = table

    def zero(self) -> list[Poly]:
        return [{} for _ in range(self.n)]

    def scalar(self, poly: Poly) -> list[Poly]:
        out = self.zero()
        out[0] = dict(poly)
        return out

    def add(self, u: Sequence[Poly], v: Sequence[Poly]) -> list[Poly]:
        return [p_add(a, b) for a, b in zip(u, v)]

    def mul(self, u: Sequence[Poly], v: Sequence[Poly]) -> list[Poly]:
        out = self.zero()
        for i, ui in enumerate(u):
            if not ui:
                continue
            for j, vj in enumerate(v):
                if not vj:
                    continue
                prod = p_mul(ui, vj)
                row = self.table[i + j]
                for k in range(self.n):
                    if row[k]:
                        out[k] = p_add(out[k], p_mul(prod, row[k]))
        return out

    def eval_vector(self, u: Sequence[Poly], env: Mapping[str, Fraction]) -> list[Fraction]:
        return [p_eval(c, env) for c in u]


def symbolic_quotient(n: int, prefix: str = "a") -> QuotientRing:
    """Quotient by X^n + a_{n-1} X^{n-1} + ... + a_0 with symbolic a_i."""
    return QuotientRing(n, [p_var(f"{prefix}{i}") for i in range(n)])


def rational_quotient(coeffs: Sequence[Fraction]) -> QuotientRing:
    """Quotient by the monic polynomial with the given non-leading
    coefficients (low degree first)."""
    return QuotientRing(len(coeffs), [p_const(c) for c in coeffs])
