"""Finite field arithmetic with deterministic defining polynomials.

Fields F_q (q = p^e) are built over F_p with the least monic irreducible
defining polynomial, "least" meaning smallest integer encoding
sum(c_i * p^i) of the non-leading coefficients.  Extension fields carry an
explicit embedding of their base field, located as the least root of the
base defining polynomial.  On top of the arithmetic sit the exhaustive
scans: traces of norm-one elements outside the base field, difference-set
coverage, and searches for irreducibles with prescribed outer coefficients.
"""

from __future__ import annotations


from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .qpoly import factor_integer, is_prime

SIZE_CAP_DEFAULT = 1 << 29  # largest field constructible (never fully enumerated)
ENUMERATION_CAP_DEFAULT = 1 << 24  # largest exhaustive loop


class FieldSizeError(Exception):
    """Requested field or scan exceeds the configured size cap."""


class ExtensionMismatch(Exception):
    """Element does not live in a registered extension of the given base."""


def _tuple_trim(cs: Sequence[int]) -> tuple[int, ...]:
    n = len(cs)
    while n and cs[n - 1] == 0:
        n -= 1
    return tuple(cs[:n])


class FqField:
    """The field F_{p^e}; elements are coefficient tuples of length e.

    All arithmetic helpers (_add, _mul, ...) work directly on tuples so the
    exhaustive scans can avoid wrapper overhead; FqElement wraps them for
    ordinary use.
    """

    def __init__(self, p: int, e: int, defining_poly: Optional[Sequence[int]] = None,
                 size_cap: int = SIZE_CAP_DEFAULT):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if e < 1:
            raise ValueError("extension degree must be >= 1")
        if p ** e > size_cap:
            raise FieldSizeError(f"{p}^{e} exceeds size cap {size_cap}")
        self.p = p
        self.e = e
        self.q = p ** e
        if defining_poly is None:
            defining_poly = _least_irreducible(p, e)
        defining_poly = tuple(c % p for c in defining_poly)
        if len(defining_poly) != e + 1 or defining_poly[-1] != 1:
            raise ValueError("defining polynomial must be monic of degree e")
        if not _is_irreducible_prime_field(defining_poly, p):
            raise ValueError("defining polynomial is not irreducible")
        self.defining_poly = defining_poly
        # reduction table for X^e .. X^{2e-2}
        xe = tuple((-c) % p for c in defining_poly[:-1])  # X^e
        red = [xe]
        cur = xe
        for _ in range(e - 2):
            shifted = [0] + list(cur)
            top = shifted.pop()
            if top:
                for i, r in enumerate(xe):
                    shifted[i] = (shifted[i] + top * r) % p
            cur = tuple(shifted)
            red.append(cur)
        self._red = red
        self.base_embedding: Optional[Embedding] = None

    # -- raw tuple arithmetic (length-e tuples)

    def _zero(self):
        return (0,) * self.e

    def _one(self):
        return (1,) + (0,) * (self.e - 1)

    def _add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def _sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def _neg(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def _mul(self, a, b):
        p, e = self.p, self.e
        out = [0] * (2 * e - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] = (out[i + j] + ai * bj) % p
        res = out[:e]
        for k in range(e, 2 * e - 1):
            c = out[k]
            if c:
                row = self._red[k - e]
                for i, r in enumerate(row):
                    res[i] = (res[i] + c * r) % p
        return tuple(res)

    def _pow(self, a, n: int):
        out = self._one()
        base = a
        while n:
            if n & 1:
                out = self._mul(out, base)
            base = self._mul(base, base)
            n >>= 1
        return out

    def _inv(self, a):
        if a == self._zero():
            raise ZeroDivisionError("inverse of zero")
        return self._pow(a, self.q - 2)

    def _encode(self, a) -> int:
        n = 0
        for c in reversed(a):
            n = n * self.p + c
        return n

    def _decode(self, n: int):
        cs = []
        for _ in range(self.e):
            cs.append(n % self.p)
            n //= self.p
        return tuple(cs)

    # -- element layer

    def zero(self) -> "FqElement":
        return FqElement(self, self._zero())

    def one(self) -> "FqElement":
        return FqElement(self, self._one())

    def element(self, coeffs) -> "FqElement":
        if isinstance(coeffs, int):
            return FqElement(self, tuple((coeffs % self.p,) + (0,) * (self.e - 1)))
        cs = tuple(c % self.p for c in coeffs)
        if len(cs) != self.e:
            raise ValueError(f"need {self.e} coefficients")
        return FqElement(self, cs)

    def from_encoding(self, n: int) -> "FqElement":
        return FqElement(self, self._decode(n))

    def elements(self) -> Iterator["FqElement"]:
        for n in range(self.q):
            yield self.from_encoding(n)

    def generator(self) -> "FqElement":
        """Least multiplicative generator, by integer encoding."""
        order = self.q - 1
        prime_facs = [p for p, _ in factor_integer(order).factors] if order > 1 else []
        for n in range(2, self.q):
            g = self._decode(n)
            if all(self._pow(g, order // r) != self._one() for r in prime_facs):
                return FqElement(self, g)
        if self.q == 2:
            return self.one()
        raise AssertionError("no generator found")

    def __eq__(self, other):
        return (isinstance(other, FqField)
                and (self.p, self.e, self.defining_poly) == (other.p, other.e, other.defining_poly))

    def __hash__(self):
        return hash((self.p, self.e, self.defining_poly))

    def __repr__(self):
        return f"FqField(p={self.p}, e={self.e})"


class FqElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FqField, coeffs: tuple[int, ...]):
        self.field = field
        self.coeffs = coeffs

    def _check(self, other):
        if not isinstance(other, FqElement) or other.field != self.field:
            raise ValueError("elements live in different fields")

    def __add__(self, other):
        self._check(other)
        return FqElement(self.field, self.field._add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        self._check(other)
        return FqElement(self.field, self.field._sub(self.coeffs, other.coeffs))

    def __neg__(self):
        return FqElement(self.field, self.field._neg(self.coeffs))

    def __mul__(self, other):
        self._check(other)
        return FqElement(self.field, self.field._mul(self.coeffs, other.coeffs))

    def __pow__(self, n: int):
        if n < 0:
            return FqElement(self.field, self.field._pow(self.field._inv(self.coeffs), -n))
        return FqElement(self.field, self.field._pow(self.coeffs, n))

    def inverse(self):
        return FqElement(self.field, self.field._inv(self.coeffs))

    @property
    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    @property
    def encoding(self) -> int:
        return self.field._encode(self.coeffs)

    def __eq__(self, other):
        return (isinstance(other, FqElement)
                and self.field == other.field and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.field.p, self.field.e, self.coeffs))

    def __repr__(self):
        return f"Fq({self.field.p}^{self.field.e}:{self.encoding})"


@dataclass(frozen=True)
class Embedding:
    """Embedding of a base field into an extension constructed over F_p."""

    base: FqField
    gen_image: tuple[int, ...]  # image of the base field generator (root of its defining poly)
    forward: dict = field(repr=False, compare=False, default_factory=dict)   # base encoding -> ext tuple
    backward: dict = field(repr=False, compare=False, default_factory=dict)  # ext tuple -> base encoding


# ---------------------------------------------------------------------------
# polynomials over F_q (coefficient = element tuple), used by the scans

def _fqp_trim(cs, zero):
    n = len(cs)
    while n and cs[n - 1] == zero:
        n -= 1
    return tuple(cs[:n])


def _fqp_mul(a, b, F: FqField):
    if not a or not b:
        return ()
    zero = F._zero()
    out = [zero] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai != zero:
            for j, bj in enumerate(b):
                out[i + j] = F._add(out[i + j], F._mul(ai, bj))
    return _fqp_trim(out, zero)


def _fqp_mod(a, m, F: FqField):
    zero = F._zero()
    rem = list(a)
    dm = len(m) - 1
    inv_lead = F._inv(m[-1])
    for i in range(len(rem) - 1, dm - 1, -1):
        c = F._mul(rem[i], inv_lead)
        if c != zero:
            for j, mj in enumerate(m):
                rem[i - dm + j] = F._sub(rem[i - dm + j], F._mul(c, mj))
    return _fqp_trim(rem, zero)


def _fqp_sub(a, b, F: FqField):
    zero = F._zero()
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else zero
        y = b[i] if i < len(b) else zero
        out.append(F._sub(x, y))
    return _fqp_trim(out, zero)


def _fqp_gcd(a, b, F: FqField):
    while b:
        a, b = b, _fqp_mod(a, b, F)
    if a:
        inv = F._inv(a[-1])
        a = tuple(F._mul(c, inv) for c in a)
    return a


def _fqp_powmod(base, n: int, m, F: FqField):
    out = (F._one(),)
    base = _fqp_mod(base, m, F)
    while n:
        if n & 1:
            out = _fqp_mod(_fqp_mul(out, base, F), m, F)
        base = _fqp_mod(_fqp_mul(base, base, F), m, F)
        n >>= 1
    return out


def _is_irreducible_fq(coeffs, F: FqField) -> bool:
    """Distinct-degree criterion: X^{q^{n/r}} tests for prime r | n plus
    X^{q^n} = X, all mod f.  Avoids any factoring."""
    n = len(coeffs) - 1
    if n == 1:
        return True
    x = (F._zero(), F._one())
    # h_i = X^{q^i} mod f, computed by repeated q-th powering
    h = _fqp_powmod(x, F.q, coeffs, F)
    powers = {1: h}
    for i in range(2, n + 1):
        h = _fqp_powmod(h, F.q, coeffs, F)
        powers[i] = h
    if _fqp_sub(powers[n], x, F):
        return False
    for r in {p for p, _ in factor_integer(n).factors}:
        g = _fqp_gcd(_fqp_sub(powers[n // r], x, F), coeffs, F)
        if len(g) - 1 > 0:
            return False
    return True


def _is_irreducible_prime_field(coeffs: Sequence[int], p: int) -> bool:
    # same criterion over F_p without building an FqField (bootstrap path)
    from .qpoly import PolyQ, _pm_gcd, _pm_powmod, _pm_sub

    n = len(coeffs) - 1
    if n == 1:
        return True
    f = tuple(c % p for c in coeffs)
    x = (0, 1)
    powers = {}
    h = _pm_powmod(x, p, f, p)
    powers[1] = h
    for i in range(2, n + 1):
        h = _pm_powmod(h, p, f, p)
        powers[i] = h
    if _pm_sub(powers[n], x, p):
        return False
    for r in {q for q, _ in factor_integer(n).factors}:
        g = _pm_gcd(_pm_sub(powers[n // r], x, p), f, p)
        if len(g) - 1 > 0:
            return False
    return True


def _least_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Least monic irreducible of degree e over F_p, ordering the non-leading
    coefficient vector by its base-p integer encoding."""
    if e == 1:
        return (0, 1)
    for n in range(p ** e):
        cs = []
        m = n
        for _ in range(e):
            cs.append(m % p)
            m //= p
        cand = tuple(cs) + (1,)
        if _is_irreducible_prime_field(cand, p):
            return cand
    raise AssertionError("irreducible polynomial must exist")


# ---------------------------------------------------------------------------
# extensions and embeddings


def _roots_in_field(coeffs, F: FqField, limit: Optional[int] = None) -> list[tuple[int, ...]]:
    """All roots in F of a polynomial that splits completely over F.

    Cantor-Zassenhaus style splitting with a deterministic candidate stream;
    the polynomial degrees here are tiny (<= base degree).
    """
    zero = F._zero()
    roots = []

    def split(g):
        if len(g) - 1 == 0:
            return
        if len(g) - 1 == 1:
            roots.append(F._mul(F._neg(g[0]), F._inv(g[1])))
            return
        # candidate multipliers a (times X, plus shift b).  In char 2 the
        # basis elements suffice: the trace form is nondegenerate, so for any
        # two distinct roots some basis multiplier separates their absolute
        # traces.  For odd p the quadratic-character split succeeds for about
        # half of all shifts, so b varies fastest.
        if F.p == 2:
            candidates = ((F._zero(), F._decode(1 << j)) for j in range(F.e))
        else:
            candidates = ((F._decode(k % F.q),
                           F._decode(1 + (k // F.q) % (F.q - 1)))
                          for k in range(8 * F.q + 64))
        for cand in candidates:
            if F.p == 2:
                t = cand
                acc = cand
                for _ in range(F.e - 1):
                    acc = _fqp_mod(_fqp_mul(acc, acc, F), g, F)
                    t = _fqp_sub(t, acc, F)  # char 2: sub == add
                h = _fqp_gcd(t, g, F)
            else:
                w = _fqp_powmod(cand, (F.q - 1) // 2, g, F)
                h = _fqp_gcd(_fqp_sub(w, (F._one(),), F), g, F)
            if 0 < len(h) - 1 < len(g) - 1:
                rest = _poly_div(g, h, F)
                split(h)
                split(rest)
                return
        raise AssertionError("root splitting failed to converge")

    def _poly_div(a, b, FF):
        # exact division, a = b * q
        zero_ = FF._zero()
        rem = list(a)
        db = len(b) - 1
        inv_lead = FF._inv(b[-1])
        q = [zero_] * (len(rem) - db)
        for i in range(len(rem) - 1, db - 1, -1):
            c = FF._mul(rem[i], inv_lead)
            if c != zero_:
                q[i - db] = c
                for j, bj in enumerate(b):
                    rem[i - db + j] = FF._sub(rem[i - db + j], FF._mul(c, bj))
        assert not _fqp_trim(rem, zero_)
        return _fqp_trim(q, zero_)

    # keep only the part of the polynomial splitting over F
    x = (zero, F._one())
    xq = _fqp_powmod(x, F.q, coeffs, F)
    g = _fqp_gcd(_fqp_sub(xq, x, F), coeffs, F)
    if g:
        split(g)
    return roots


def make_extension(base: FqField, l: int,
                   enumeration_cap: int = ENUMERATION_CAP_DEFAULT) -> FqField:
    """The extension of F_q of degree l (l prime), with base embedded.

    The extension is built directly over F_p with the least irreducible of
    degree e*l; the base is located inside it as the least root of the base
    defining polynomial.
    """
    if not is_prime(l):
        raise ValueError(f"degree {l} must be prime")
    ext = FqField(base.p, base.e * l)
    if base.e == 1:
        gen_image = ext._zero()  # root of X
    else:
        lifted = tuple(ext.element(c).coeffs for c in base.defining_poly)
        roots = _roots_in_field(lifted, ext)
        if len(roots) != base.e:
            raise AssertionError("base polynomial must split in the extension")
        gen_image = min(roots, key=ext._encode)
    if base.q > enumeration_cap:
        raise FieldSizeError("base field too large to tabulate the embedding")
    forward = {}
    backward = {}
    for n in range(base.q):
        cs = base._decode(n)
        img = ext._zero()
        power = ext._one()
        for c in cs:
            if c:
                img = ext._add(img, tuple(x * c % ext.p for x in power))
            power = ext._mul(power, gen_image)
        forward[n] = img
        backward[img] = n
    ext.base_embedding = Embedding(base, gen_image, forward, backward)
    return ext


def embed(x: FqElement, ext: FqField) -> FqElement:
    emb = ext.base_embedding
    if emb is None or emb.base != x.field:
        raise ExtensionMismatch("extension does not embed this base field")
    return FqElement(ext, emb.forward[x.encoding])


def trace_and_norm(x: FqElement, base: FqField) -> tuple[FqElement, FqElement]:
    """Galois trace and norm of x down to the base field.

    trace = sum of x^{q^i} for i < l, norm = x^{(q^l - 1)/(q - 1)}; both are
    certified to land in the embedded base field.
    """
    ext = x.field
    emb = ext.base_embedding
    if emb is None or emb.base != base:
        raise ExtensionMismatch("x does not live in a registered extension of base")
    l = ext.e // base.e
    q = base.q
    tr = x.coeffs
    y = x.coeffs
    for _ in range(l - 1):
        y = ext._pow(y, q)
        tr = ext._add(tr, y)
    if x.is_zero:
        nm = ext._zero()
    else:
        nm = ext._pow(x.coeffs, (ext.q - 1) // (q - 1))
    try:
        tr_base = base.from_encoding(emb.backward[tr])
        nm_base = base.from_encoding(emb.backward[nm])
    except KeyError as exc:  # pragma: no cover - would signal an arithmetic bug
        raise ExtensionMismatch("trace/norm failed to land in the base field") from exc
    return tr_base, nm_base


def _trace_matrix(ext: FqField, base: FqField) -> list[tuple[int, ...]]:
    """Matrix of the F_p-linear map y -> trace down to base, as columns of
    images of the power basis of ext."""
    l = ext.e // base.e
    q = base.q
    cols = []
    for j in range(ext.e):
        basis = tuple(1 if i == j else 0 for i in range(ext.e))
        tr = basis
        y = basis
        for _ in range(l - 1):
            y = ext._pow(y, q)
            tr = ext._add(tr, y)
        cols.append(tr)
    return cols


def _apply_matrix(cols, vec, p, e):
    out = [0] * e
    for j, c in enumerate(vec):
        if c:
            col = cols[j]
            for i in range(e):
                out[i] = (out[i] + c * col[i]) % p
    return tuple(out)


# ---------------------------------------------------------------------------
# the exhaustive scans


@dataclass(frozen=True)
class TraceSet:
    """Traces of norm-one elements of the degree-l extension that lie outside
    the base field; elements stored as base-field encodings."""

    field: FqField
    l: int
    elements: frozenset[int]

    def as_elements(self) -> list[FqElement]:
        return [self.field.from_encoding(n) for n in sorted(self.elements)]


def norm_one_traces(base: FqField, l: int,
                    enumeration_cap: int = ENUMERATION_CAP_DEFAULT) -> TraceSet:
    """Exhaustive trace set of norm-one elements outside the base field.

    Norm-one elements are enumerated as the cyclic group generated by
    g^(q-1) for a multiplicative generator g.  The loop exits early once the
    collected set already covers the whole base field: the set can only grow
    toward that superset, so the early answer is still exact.
    """
    ext = make_extension(base, l)
    q = base.q
    count = (ext.q - 1) // (q - 1)
    if count > enumeration_cap:
        raise FieldSizeError(f"norm-one enumeration of size {count} exceeds cap")
    emb = ext.base_embedding
    base_tuples = set(emb.backward.keys())
    tr_cols = _trace_matrix(ext, base)
    g = ext.generator()
    step = ext._pow(g.coeffs, q - 1)
    traces: set[int] = set()
    x = ext._one()
    full = q
    for _ in range(count):
        if x not in base_tuples:
            tr = _apply_matrix(tr_cols, x, ext.p, ext.e)
            traces.add(emb.backward[tr])
            if len(traces) == full:
                break
        x = ext._mul(x, step)
    return TraceSet(base, l, frozenset(traces))


@dataclass(frozen=True)
class DifferenceReport:
    holds: bool
    missing: tuple[int, ...]  # base-field encodings not covered
    augmented: bool


def difference_covers_field(ts: TraceSet, augment_with_pm2: bool = False) -> DifferenceReport:
    """Whether every base field element is u - u' with u in the trace set
    (optionally u also allowed from {2, -2}) and u' in the trace set."""
    F = ts.field
    left = {F._decode(n) for n in ts.elements}
    right = set(left)
    if augment_with_pm2:
        two = F.element(2).coeffs
        left.add(two)
        left.add(F._neg(two))
    covered = set()
    for u in left:
        for v in right:
            covered.add(F._sub(u, v))
    missing = tuple(sorted(F._encode(t) for t in
                           ({F._decode(n) for n in range(F.q)} - covered)))
    return DifferenceReport(not missing, missing, augment_with_pm2)


def irreducible_with_prescribed_coeffs(base: FqField, n: int, a0: FqElement,
                                       a_top: FqElement,
                                       scan_budget: int = 1 << 22) -> Optional[tuple[FqElement, ...]]:
    """Monic irreducible of degree n over base with constant coefficient a0
    (nonzero) and X^{n-1}-coefficient a_top, or None after a full scan.

    The free middle coefficients are scanned in integer-encoding order, so
    the first hit is deterministic.
    """
    if a0.is_zero:
        raise ValueError("constant coefficient must be nonzero")
    if n < 1:
        raise ValueError("degree must be positive")
    if n == 1:
        if a0 == a_top:
            return (a0, base.one())
        return None
    free = n - 2
    if base.q ** free > scan_budget:
        raise FieldSizeError("middle-coefficient scan exceeds budget")
    one = base._one()
    for idx in range(base.q ** free):
        mids = []
        m = idx
        for _ in range(free):
            mids.append(base._decode(m % base.q))
            m //= base.q
        coeffs = (a0.coeffs, *mids, a_top.coeffs, one)
        if _is_irreducible_fq(coeffs, base):
            return tuple(FqElement(base, c) for c in coeffs)
    return None


def is_irreducible_poly(coeffs: Sequence[FqElement], base: FqField) -> bool:
    """Public irreducibility test for a monic polynomial over base."""
    cs = tuple(c.coeffs for c in coeffs)
    if cs[-1] != base._one():
        raise ValueError("polynomial must be monic")
    return _is_irreducible_fq(cs, base)
