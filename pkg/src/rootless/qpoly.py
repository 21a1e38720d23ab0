"""Exact rational arithmetic: univariate polynomials over Q, places of Q,
p-adic valuations, factorization mod p, Hensel root lifting, and complete
factorization of monic polynomials of degree at most four.

Everything is exact (``fractions.Fraction`` throughout); nothing is ever
rounded.  Polynomials are immutable, with coefficients stored low degree
first and the zero polynomial represented by an empty coefficient tuple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

FACTOR_INPUT_BUDGET = 1 << 48


class FactorBudgetExceeded(Exception):
    """Integer too large for the trial-division factorization budget."""


class RamifiedPrime(Exception):
    """Reduction mod p is not squarefree, so the cycle type would lie."""


class DenominatorClash(Exception):
    """p divides a denominator of the polynomial being reduced."""


# ---------------------------------------------------------------------------
# integer utilities


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond the sizes used here."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray(n + 1)
    out = []
    for p in range(2, n + 1):
        if not sieve[p]:
            out.append(p)
            for m in range(p * p, n + 1, p):
                sieve[m] = 1
    return out


@dataclass(frozen=True)
class IntFactorization:
    sign: int
    factors: tuple[tuple[int, int], ...]  # (prime, exponent), primes ascending

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def value(self) -> int:
        v = self.sign
        for p, e in self.factors:
            v *= p ** e
        return v


def factor_integer(n: int, budget: int = FACTOR_INPUT_BUDGET) -> IntFactorization:
    """Factor a nonzero integer by trial division.

    Inputs in this artifact are small by construction (products of sampled
    primes); the budget caps |n| so a pathological input fails loudly
    instead of spinning.
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    if abs(n) > budget:
        raise FactorBudgetExceeded(f"|{n}| exceeds budget {budget}")
    sign = 1 if n > 0 else -1
    m = abs(n)
    factors: list[tuple[int, int]] = []
    for p in (2, 3):
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            factors.append((p, e))
    # 2,3-wheel
    d = 5
    step = 2
    while d * d <= m:
        e = 0
        while m % d == 0:
            m //= d
            e += 1
        if e:
            factors.append((d, e))
        d += step
        step = 6 - step
    if m > 1:
        factors.append((m, 1))
    return IntFactorization(sign, tuple(factors))


def divisors(n: int, budget: int = FACTOR_INPUT_BUDGET) -> list[int]:
    """All positive divisors of |n|, ascending."""
    if n == 0:
        raise ValueError("0 has no finite divisor list")
    fac = factor_integer(abs(n), budget)
    divs = [1]
    for p, e in fac.factors:
        divs = [d * p ** i for d in divs for i in range(e + 1)]
    return sorted(divs)


def crt_combine(congruences: Sequence[tuple[int, int]]) -> Optional[tuple[int, int]]:
    """Combine congruences x = r (mod m); None when inconsistent."""
    r, m = 0, 1
    for r2, m2 in congruences:
        g = math.gcd(m, m2)
        if (r2 - r) % g != 0:
            return None
        lcm = m // g * m2
        t = ((r2 - r) // g * pow(m // g, -1, m2 // g)) % (m2 // g)
        r = (r + m * t) % lcm
        m = lcm
    return r, m


# ---------------------------------------------------------------------------
# places of Q and valuations


@dataclass(frozen=True)
class Place:
    """A place of Q: a finite prime or the archimedean place (p is None)."""

    p: Optional[int]

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @classmethod
    def finite(cls, p: int) -> "Place":
        return cls(p)

    @classmethod
    def infinite(cls) -> "Place":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    def __repr__(self):
        return f"Place({self.p})" if self.is_finite else "Place(oo)"


def _vp_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x, place: Place):
    """p-adic valuation at a finite place; sign (-1/0/1) at the infinite one.

    valuation(0, p) is +infinity (math.inf).
    """
    x = Fraction(x)
    if not place.is_finite:
        return (x > 0) - (x < 0)
    if x == 0:
        return math.inf
    return _vp_int(x.numerator, place.p) - _vp_int(x.denominator, place.p)


# ---------------------------------------------------------------------------
# polynomials over Q


class PolyQ:
    """Immutable univariate polynomial over Q.

    coeffs is a trimmed tuple, low degree first; () is the zero polynomial.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- construction helpers

    @classmethod
    def x(cls) -> "PolyQ":
        return cls((0, 1))

    @classmethod
    def constant(cls, c) -> "PolyQ":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Iterable) -> "PolyQ":
        f = cls((1,))
        for r in roots:
            f = f * cls((-Fraction(r), 1))
        return f

    # -- basic structure

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other):
        return isinstance(other, PolyQ) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # -- arithmetic

    def __add__(self, other) -> "PolyQ":
        other = other if isinstance(other, PolyQ) else PolyQ((other,))
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyQ(tuple(self[i] + other[i] for i in range(n)))

    __radd__ = __add__

    def __neg__(self) -> "PolyQ":
        return PolyQ(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "PolyQ":
        return self + (-(other if isinstance(other, PolyQ) else PolyQ((other,))))

    def __rsub__(self, other) -> "PolyQ":
        return (-self) + other

    def __mul__(self, other) -> "PolyQ":
        if not isinstance(other, PolyQ):
            return PolyQ(tuple(Fraction(other) * c for c in self.coeffs))
        if self.is_zero or other.is_zero:
            return PolyQ()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return PolyQ(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "PolyQ":
        if e < 0:
            raise ValueError("negative power")
        out = PolyQ((1,))
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __divmod__(self, other: "PolyQ"):
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        d = other.degree
        lead = other.leading
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i] / lead
            if c:
                q[i - d] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - d + j] -= c * b
        return PolyQ(q), PolyQ(rem)

    def __floordiv__(self, other: "PolyQ") -> "PolyQ":
        return divmod(self, other)[0]

    def __mod__(self, other: "PolyQ") -> "PolyQ":
        return divmod(self, other)[1]

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * Fraction(x) + c
        return acc

    def derivative(self) -> "PolyQ":
        return PolyQ(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def compose(self, inner: "PolyQ") -> "PolyQ":
        acc = PolyQ()
        for c in reversed(self.coeffs):
            acc = acc * inner + PolyQ((c,))
        return acc

    def monic(self) -> "PolyQ":
        if self.is_zero:
            raise ValueError("zero polynomial cannot be made monic")
        return self * (1 / self.leading)

    def denominator_lcm(self) -> int:
        out = 1
        for c in self.coeffs:
            out = out * c.denominator // math.gcd(out, c.denominator)
        return out

    # -- text form

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                xs = "X" if i == 1 else f"X^{i}"
                body = xs if mag == 1 else f"{mag}*{xs}"
            parts.append((sign, body))
        sign0, body0 = parts[0]
        text = ("-" if sign0 == "-" else "") + body0
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"PolyQ({self})"

    @classmethod
    def parse(cls, text: str) -> "PolyQ":
        """Parse forms like 'X^3 - 2*X + 1', '-X^2+3', 'X-1', '3/2'."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty polynomial text")
        # split into signed terms
        terms = []
        i = 0
        start = 0
        while i < len(s):
            if s[i] in "+-" and i != start:
                terms.append(s[start:i])
                start = i
            i += 1
        terms.append(s[start:])
        coeffs: dict[int, Fraction] = {}
        for term in terms:
            if term in ("", "+", "-"):
                raise ValueError(f"malformed term in {text!r}")
            sign = 1
            if term[0] == "+":
                term = term[1:]
            elif term[0] == "-":
                sign = -1
                term = term[1:]
            if "X" in term:
                body, _, expo = term.partition("^")
                head = body[: body.index("X")].rstrip("*")
                coef = Fraction(head) if head else Fraction(1)
                deg = int(expo) if expo else 1
            else:
                coef = Fraction(term)
                deg = 0
            coeffs[deg] = coeffs.get(deg, Fraction(0)) + sign * coef
        out = [Fraction(0)] * (max(coeffs) + 1)
        for d, c in coeffs.items():
            out[d] = c
        return cls(out)


# ---------------------------------------------------------------------------
# reduction and factorization mod p
#
# Polynomials mod p are plain int tuples, low degree first, trimmed.


def _pm_trim(a: Sequence[int]) -> tuple[int, ...]:
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    return tuple(a[:n])


def _pm_add(a, b, p):
    n = max(len(a), len(b))
    return _pm_trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _pm_sub(a, b, p):
    n = max(len(a), len(b))
    return _pm_trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _pm_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pm_trim(out)


def _pm_divmod(a, b, p):
    if not b:
        raise ZeroDivisionError
    rem = list(a)
    db = len(b) - 1
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(0, len(rem) - db)
    for i in range(len(rem) - 1, db - 1, -1):
        c = rem[i] * inv_lead % p
        if c:
            q[i - db] = c
            for j, bj in enumerate(b):
                rem[i - db + j] = (rem[i - db + j] - c * bj) % p
    return _pm_trim(q), _pm_trim(rem)


def _pm_mod(a, b, p):
    return _pm_divmod(a, b, p)[1]


def _pm_monic(a, p):
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return tuple(c * inv % p for c in a)


def _pm_gcd(a, b, p):
    while b:
        a, b = b, _pm_mod(a, b, p)
    return _pm_monic(a, p)


def _pm_powmod(base, e: int, mod, p):
    out = (1,)
    base = _pm_mod(base, mod, p)
    while e:
        if e & 1:
            out = _pm_mod(_pm_mul(out, base, p), mod, p)
        base = _pm_mod(_pm_mul(base, base, p), mod, p)
        e >>= 1
    return out


def _pm_deriv(a, p):
    return _pm_trim([i * c % p for i, c in enumerate(a)][1:])


def reduce_mod_p(f: PolyQ, p: int) -> tuple[int, ...]:
    """Coefficient-wise reduction; DenominatorClash when p divides a denominator."""
    out = []
    for c in f.coeffs:
        if c.denominator % p == 0:
            raise DenominatorClash(f"p={p} divides a denominator of {f}")
        out.append(c.numerator * pow(c.denominator, -1, p) % p)
    return _pm_trim(out)


@dataclass(frozen=True)
class CycleType:
    """Multiset of residue degrees of an unramified prime, as sorted tuple."""

    p: int
    degrees: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(sorted(self.degrees)))


@dataclass(frozen=True)
class ModPFactorization:
    p: int
    cycle_type: CycleType
    factors: Optional[tuple[tuple[int, ...], ...]]


def _edf_split(g, d, p):
    """Split a squarefree product of degree-d irreducibles into its factors.

    Cantor-Zassenhaus with a deterministic candidate stream, so results are
    reproducible run to run.
    """
    degree = len(g) - 1
    if degree == d:
        return [g]
    out = []
    # deterministic candidate stream: polynomials by integer encoding
    encoding = p  # first degree->=1 polynomial
    while True:
        # decode candidate
        cand = []
        m = encoding
        while m:
            cand.append(m % p)
            m //= p
        encoding += 1
        cand = _pm_trim(cand)
        if len(cand) - 1 >= len(g) - 1:
            # exhausted plausible range; restart with higher degrees is
            # pointless because a splitter of degree < deg g always exists
            encoding = p
            continue
        if p == 2:
            # additive trace map
            t = cand
            acc = cand
            for _ in range(d - 1):
                acc = _pm_mod(_pm_mul(acc, acc, p), g, p)
                t = _pm_add(t, acc, p)
            h = _pm_gcd(t, g, p)
        else:
            w = _pm_powmod(cand, (p ** d - 1) // 2, g, p)
            h = _pm_gcd(_pm_sub(w, (1,), p), g, p)
        if 0 < len(h) - 1 < len(g) - 1:
            other = _pm_divmod(g, h, p)[0]
            out.extend(_edf_split(_pm_monic(h, p), d, p))
            out.extend(_edf_split(_pm_monic(other, p), d, p))
            return out


def factor_mod_p(f: PolyQ, p: int, with_factors: bool = True) -> ModPFactorization:
    """Distinct-degree (and optionally equal-degree) factorization mod p.

    The degrees multiset is the Frobenius cycle type at an unramified prime.
    Raises RamifiedPrime when f mod p is not squarefree and DenominatorClash
    when p divides a denominator of f.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not f.is_monic:
        raise ValueError("factor_mod_p expects a monic polynomial")
    fp = reduce_mod_p(f, p)
    if len(_pm_gcd(fp, _pm_deriv(fp, p), p)) - 1 > 0:
        raise RamifiedPrime(f"{f} mod {p} is not squarefree")
    # distinct-degree stage
    blocks: list[tuple[int, tuple[int, ...]]] = []
    v = fp
    h = (0, 1)  # X
    d = 0
    while len(v) - 1 >= 2 * (d + 1):
        d += 1
        h = _pm_powmod(h, p, fp, p)
        g = _pm_gcd(_pm_sub(h, (0, 1), p), v, p)
        if len(g) - 1 > 0:
            blocks.append((d, g))
            v = _pm_divmod(v, g, p)[0]
    if len(v) - 1 > 0:
        blocks.append((len(v) - 1, v))
    degrees: list[int] = []
    for d, g in blocks:
        degrees.extend([d] * ((len(g) - 1) // d))
    cycle = CycleType(p, tuple(degrees))
    factors = None
    if with_factors:
        irr: list[tuple[int, ...]] = []
        for d, g in blocks:
            irr.extend(_edf_split(g, d, p))
        factors = tuple(sorted(irr, key=lambda t: (len(t), t)))
    return ModPFactorization(p, cycle, factors)


def cycle_type(f: PolyQ, p: int) -> CycleType:
    return factor_mod_p(f, p, with_factors=False).cycle_type


# ---------------------------------------------------------------------------
# rational roots


def rational_roots(f: PolyQ, budget: int = FACTOR_INPUT_BUDGET) -> frozenset[Fraction]:
    """Exactly the rational roots, via divisor enumeration of the extreme
    coefficients of the cleared-denominator form."""
    if f.is_zero:
        raise ValueError("zero polynomial has every root")
    roots: set[Fraction] = set()
    cs = list(f.coeffs)
    k = 0
    while cs[0] == 0:
        cs.pop(0)
        k += 1
    if k:
        roots.add(Fraction(0))
    if len(cs) == 1:
        return frozenset(roots)
    scale = 1
    for c in cs:
        scale = scale * c.denominator // math.gcd(scale, c.denominator)
    ints = [int(c * scale) for c in cs]
    g = PolyQ(ints)
    for num in divisors(ints[0], budget):
        for den in divisors(ints[-1], budget):
            if math.gcd(num, den) != 1:
                continue
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if g(cand) == 0:
                    roots.add(cand)
    return frozenset(roots)


# ---------------------------------------------------------------------------
# Hensel lifting


@dataclass(frozen=True)
class PadicRootReport:
    """Roots of f in Z_p to precision p^k.

    roots: lifted values of the simple residue roots, as ints mod p^k.
    undecided: residues mod p where both f and f' vanish; nothing is
    guessed about whether these extend to genuine roots.
    """

    p: int
    precision: int
    roots: tuple[int, ...]
    undecided: tuple[int, ...]

    @property
    def certified_rootless(self) -> bool:
        return not self.roots and not self.undecided


def padic_roots(f: PolyQ, p: int, precision: int) -> PadicRootReport:
    """Simple roots of f in Z_p via Newton lifting of simple roots mod p."""
    if not f.is_monic or f.degree < 1 or f.degree > 3:
        raise ValueError("padic_roots expects a monic polynomial of degree 1..3")
    if precision < 1:
        raise ValueError("precision must be >= 1")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    scale = f.denominator_lcm()
    if scale % p == 0:
        raise DenominatorClash(f"p={p} divides a denominator of {f}")
    F = [int(c * scale) for c in f.coeffs]

    def ev(poly, x, m):
        acc = 0
        for c in reversed(poly):
            acc = (acc * x + c) % m
        return acc

    dF = [i * c for i, c in enumerate(F)][1:]
    target = p ** precision
    roots = []
    undecided = []
    for r in range(p):
        if ev(F, r, p) != 0:
            continue
        if ev(dF, r, p) == 0:
            undecided.append(r)
            continue
        m = p
        x = r
        while m < target:
            m = min(m * m, target)
            x = (x - ev(F, x, m) * pow(ev(dF, x, m), -1, m)) % m
        roots.append(x)
    return PadicRootReport(p, precision, tuple(sorted(roots)), tuple(sorted(undecided)))


# ---------------------------------------------------------------------------
# factorization over Q up to degree 4


def is_square_fraction(x: Fraction) -> Optional[Fraction]:
    """The nonnegative rational square root of x, or None."""
    if x < 0:
        return None
    rn = math.isqrt(x.numerator)
    rd = math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


def _quadratic_splits(h: PolyQ) -> list[tuple[PolyQ, PolyQ]]:
    """All monic quadratic*quadratic factorizations of a depressed quartic.

    h = Y^4 + P*Y^2 + Q*Y + R factors as (Y^2 + tY + u)(Y^2 - tY + v); for
    t != 0 the admissible t^2 are the rational roots of the resolvent cubic
    z^3 + 2P z^2 + (P^2 - 4R) z - Q^2, and t = 0 needs Q = 0 with P^2 - 4R a
    rational square.
    """
    P, Q, R = h[2], h[1], h[0]
    found = []
    if Q == 0:
        s = is_square_fraction(P * P - 4 * R)
        if s is not None:
            u, v = (P - s) / 2, (P + s) / 2
            found.append((PolyQ((u, 0, 1)), PolyQ((v, 0, 1))))
    resolvent = PolyQ((-Q * Q, P * P - 4 * R, 2 * P, 1))
    for z in sorted(rational_roots(resolvent)):
        if z == 0:
            continue
        t = is_square_fraction(z)
        if t is None:
            continue
        u = (P + z - Q / t) / 2
        v = (P + z + Q / t) / 2
        q1, q2 = PolyQ((u, t, 1)), PolyQ((v, -t, 1))
        if q1 * q2 == h:
            found.append((q1, q2))
    return found


def factor_quartic_or_less(f: PolyQ) -> tuple[PolyQ, ...]:
    """Complete factorization of a monic polynomial of degree 1..4 into monic
    irreducibles over Q (with multiplicity), sorted deterministically.

    Linear factors come from the rational-root theorem; a rootless quartic is
    split into quadratics via the resolvent cubic or certified irreducible.
    """
    if not f.is_monic or not 1 <= f.degree <= 4:
        raise ValueError("expected a monic polynomial of degree 1..4")
    factors: list[PolyQ] = []
    g = f
    for r in sorted(rational_roots(f)):
        lin = PolyQ((-r, 1))
        while True:
            q, rem = divmod(g, lin)
            if not rem.is_zero:
                break
            factors.append(lin)
            g = q
    if g.degree == 1:
        raise AssertionError("linear leftover should have been a rational root")
    if g.degree in (2, 3):
        factors.append(g)  # rootless quadratic/cubic is irreducible
    elif g.degree == 4:
        s = g[3] / 4
        h = g.compose(PolyQ((-s, 1)))  # depressed: g(X) = h(X + s)
        splits = []
        for q1, q2 in _quadratic_splits(h):
            a = q1.compose(PolyQ((s, 1)))
            b = q2.compose(PolyQ((s, 1)))
            pair = tuple(sorted((a, b), key=lambda t: t.coeffs))
            splits.append(pair)
        if splits:
            factors.extend(min(splits, key=lambda pr: (pr[0].coeffs, pr[1].coeffs)))
        else:
            factors.append(g)
    prod = PolyQ((1,))
    for q in factors:
        prod = prod * q
    assert prod == f, "factorization must reconstruct the input"
    return tuple(sorted(factors, key=lambda t: (t.degree, t.coeffs)))
