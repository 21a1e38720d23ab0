"""Local splitting analysis over Q: Hilbert symbols, ramification sets,
semilocal trace-set membership, bounded witness search, and construction of
global polynomials matching local constraints.

For a quaternion algebra over Q the full set of ramified places is computed
from Hilbert symbols.  For cyclic algebras (and for base change to an
extension L) splitting is decided place by place through unramified local
class field theory: at a prime p unramified in the field M the algebra
(M, sigma, a) is non-split exactly when Frobenius is nontrivial in M and
the valuation of a is not divisible by the degree, and a finite extension
splits a local algebra exactly when its local degree is divisible by the
algebra's index.  Queries at ramified primes fail loudly; the witness
selection pipeline never makes them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

from .csa import AlgebraSpec, CyclicSpec, QuaternionSpec, AlgebraElement, element, reduced_trace_norm
from .qpoly import (CycleType, DenominatorClash, Place, PolyQ, RamifiedPrime,
                    factor_integer, factor_mod_p, factor_quartic_or_less,
                    is_prime, is_square_fraction, padic_roots, rational_roots,
                    valuation)


class RamifiedQuery(Exception):
    """Asked for splitting data at a place ramified in M or in L."""


class NoCRTSolution(Exception):
    """Local residue constraints are inconsistent."""


class LocalReducible(Exception):
    """Constraint residues are inconsistent with local irreducibility at the
    stated precision."""


class SearchExhausted(Exception):
    """A bounded search ran out of budget."""


# ---------------------------------------------------------------------------
# Hilbert symbols


def _unit_mod(x: Fraction, p: int, modulus: int) -> int:
    """The p-unit part of x as a residue mod `modulus` (a power of p)."""
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
    while den % p == 0:
        den //= p
    return num * pow(den, -1, modulus) % modulus


def _legendre(u: int, p: int) -> int:
    t = pow(u % p, (p - 1) // 2, p)
    return 1 if t == 1 else -1


def hilbert_symbol(a, b, place: Place) -> int:
    """The Hilbert symbol (a, b) at a place of Q: +1 iff the quaternion
    algebra (a, b) splits there.

    Odd p uses the residue-symbol formula, p = 2 the mod-8 exponent formula,
    and the infinite place the sign condition.
    """
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if not place.is_finite:
        return -1 if a < 0 and b < 0 else 1
    p = place.p
    alpha, beta = valuation(a, place), valuation(b, place)
    if p != 2:
        u = _unit_mod(a, p, p)
        w = _unit_mod(b, p, p)
        sign = 1
        if alpha % 2 and beta % 2 and _legendre(-1, p) == -1:
            sign = -sign
        if beta % 2 and _legendre(u, p) == -1:
            sign = -sign
        if alpha % 2 and _legendre(w, p) == -1:
            sign = -sign
        return sign
    u8 = _unit_mod(a, 2, 8)
    w8 = _unit_mod(b, 2, 8)
    eps = lambda n: (n - 1) // 2 % 2
    omega = lambda n: (n * n - 1) // 8 % 2
    expo = eps(u8) * eps(w8) + alpha * omega(w8) + beta * omega(u8)
    return -1 if expo % 2 else 1


def _support_places(a: Fraction, b: Fraction) -> list[Place]:
    ps = {2}
    for x in (a, b):
        for prime, _ in factor_integer(x.numerator).factors:
            ps.add(prime)
        for prime, _ in factor_integer(x.denominator).factors:
            ps.add(prime)
    places = [Place.finite(p) for p in sorted(ps)]
    places.append(Place.infinite())
    return places


def hilbert_reciprocity_product(a, b) -> int:
    """Product of (a,b)_v over all places with possibly nontrivial symbol."""
    a, b = Fraction(a), Fraction(b)
    out = 1
    for v in _support_places(a, b):
        out *= hilbert_symbol(a, b, v)
    return out


# ---------------------------------------------------------------------------
# extensions of Q


@dataclass(frozen=True)
class ExtensionSpec:
    """A finite extension L/Q given by a monic irreducible polynomial
    (degree 1 means L = Q)."""

    degree: int
    defining_poly: PolyQ

    def __post_init__(self):
        f = self.defining_poly
        if not f.is_monic or f.degree != self.degree:
            raise ValueError("defining polynomial must be monic of the stated degree")
        if not 1 <= self.degree <= 4:
            raise ValueError("only degrees 1..4 are supported")
        if self.degree > 1 and len(factor_quartic_or_less(f)) != 1:
            raise ValueError(f"{f} is reducible over Q")

    @classmethod
    def rationals(cls) -> "ExtensionSpec":
        return cls(1, PolyQ.x())

    @classmethod
    def from_poly(cls, f: PolyQ) -> "ExtensionSpec":
        return cls(f.degree, f)

    @property
    def is_rationals(self) -> bool:
        return self.degree == 1

    def local_degrees(self, p: int) -> tuple[int, ...]:
        """Residue degrees of the places above p; p must be unramified."""
        if self.is_rationals:
            return (1,)
        try:
            return factor_mod_p(self.defining_poly, p, with_factors=False).cycle_type.degrees
        except RamifiedPrime as exc:
            raise RamifiedQuery(f"p={p} is ramified in {self.defining_poly}") from exc
        except DenominatorClash as exc:
            raise RamifiedQuery(f"p={p} divides a denominator of {self.defining_poly}") from exc


@dataclass(frozen=True)
class RamifiedSet:
    """The finite places where a quaternion algebra over Q does not split
    (the infinite place is carried separately)."""

    finite: frozenset[int]
    infinite: bool

    @property
    def places(self) -> tuple[Place, ...]:
        out = [Place.finite(p) for p in sorted(self.finite)]
        if self.infinite:
            out.append(Place.infinite())
        return tuple(out)

    def __len__(self):
        return len(self.finite) + (1 if self.infinite else 0)


def quaternion_ramified_set(spec: QuaternionSpec) -> RamifiedSet:
    """Full ramification set via Hilbert symbols over the support of a, b."""
    finite = set()
    infinite = False
    for v in _support_places(spec.a, spec.b):
        if hilbert_symbol(spec.a, spec.b, v) == -1:
            if v.is_finite:
                finite.add(v.p)
            else:
                infinite = True
    return RamifiedSet(frozenset(finite), infinite)


class SplittingOracle:
    """Placewise splitting data for an algebra base-changed to an extension.

    Valid at finite primes unramified in the algebra's field datum (and, for
    L != Q, unramified in L); everything else raises RamifiedQuery.
    """

    def __init__(self, spec: AlgebraSpec, ext: ExtensionSpec):
        self.spec = spec
        self.ext = ext

    def splits_at_rational_prime(self, p: int) -> bool:
        """Whether the algebra over Q splits at Q_p."""
        spec = self.spec
        if isinstance(spec, QuaternionSpec):
            return hilbert_symbol(spec.a, spec.b, Place.finite(p)) == 1
        chi = spec.field.character_value(p)
        if chi is None:
            raise RamifiedQuery(f"p={p} is ramified in the degree-{spec.l} field "
                                f"(conductor {spec.field.conductor})")
        v = valuation(spec.a, Place.finite(p))
        return chi == 0 or v % spec.l == 0

    def splits_above(self, p: int) -> list[tuple[int, bool]]:
        """(local degree, splits) for each place of L above p.

        A local field extension splits the algebra exactly when its degree is
        divisible by the algebra's index, which is l for a non-split algebra
        of prime degree l.
        """
        base_split = self.splits_at_rational_prime(p)
        degs = self.ext.local_degrees(p)
        return [(f, base_split or f % self.spec.l == 0) for f in degs]

    def real_split(self) -> bool:
        if isinstance(self.spec, QuaternionSpec):
            return hilbert_symbol(self.spec.a, self.spec.b, Place.infinite()) == 1
        if self.spec.l % 2 == 1:
            return True  # odd degree kills the real Brauer class
        # degree-2 cyclic algebra over a real quadratic field splits at
        # both real places for any parameter sign
        return self.spec.field.character_value(self.spec.field.conductor - 1) == 0


def ramification(spec: AlgebraSpec, ext: Optional[ExtensionSpec] = None
                 ) -> Union[RamifiedSet, SplittingOracle]:
    """Ramified places of a quaternion algebra over Q, or a placewise oracle
    for cyclic algebras and for base change to an extension."""
    if ext is None or ext.is_rationals:
        if isinstance(spec, QuaternionSpec):
            return quaternion_ramified_set(spec)
        return SplittingOracle(spec, ExtensionSpec.rationals())
    return SplittingOracle(spec, ext)


# ---------------------------------------------------------------------------
# semilocal trace-set membership


@dataclass(frozen=True)
class PlaceCheck:
    p: int
    local_degrees: tuple[int, ...]
    splits: tuple[bool, ...]

    @property
    def all_split(self) -> bool:
        return all(self.splits)


@dataclass(frozen=True)
class TraceSetMembership:
    member: bool
    checks: tuple[PlaceCheck, ...]
    real_split: bool


def in_trace_set(spec: AlgebraSpec, ext: ExtensionSpec, x) -> TraceSetMembership:
    """Whether x and 1/x both lie in the semilocal trace set of the algebra
    base-changed to L.

    Concretely: at every place q of L where x has nonzero valuation the
    algebra over L_q must split.  The identification of the trace set with
    that semilocal ring needs the algebra to split at the real places, which
    holds for the totally real field data used by the criterion; the report
    records the real check rather than silently assuming it.
    """
    x = Fraction(x)
    if x == 0:
        raise ValueError("x must be nonzero")
    oracle = SplittingOracle(spec, ext)
    support = sorted({p for p, _ in factor_integer(x.numerator).factors}
                     | {p for p, _ in factor_integer(x.denominator).factors})
    checks = []
    member = True
    for p in support:
        pairs = oracle.splits_above(p)
        check = PlaceCheck(p, tuple(f for f, _ in pairs), tuple(s for _, s in pairs))
        checks.append(check)
        member = member and check.all_split
    return TraceSetMembership(member, tuple(checks), oracle.real_split())


# ---------------------------------------------------------------------------
# bounded witness search for trace values


def rationals_by_height(height: int) -> Iterator[Fraction]:
    """0, then all n/d with max(|n|, d) = h for h = 1..height, deterministic."""
    yield Fraction(0)
    for h in range(1, height + 1):
        for d in range(1, h + 1):
            if math.gcd(h, d) == 1:
                yield Fraction(h, d)
                yield Fraction(-h, d)
        for n in range(1, h):
            if math.gcd(n, h) == 1:
                yield Fraction(n, h)
                yield Fraction(-n, h)


def trace_witness_search(spec: QuaternionSpec, target_trace, height: int,
                         budget: int = 200_000) -> Optional[AlgebraElement]:
    """Search for a norm-one quaternion element with the given reduced trace.

    The first coordinate is pinned by the trace; pairs (x1, x2) are swept in
    height order and x3 is solved from the norm form when the required square
    is a rational square.  None is inconclusive: the search is bounded.
    """
    target = Fraction(target_trace)
    x0 = target / 2
    a, b = spec.a, spec.b
    pool = list(rationals_by_height(height))
    tried = 0
    for i, x1 in enumerate(pool):
        for j in range(i + 1):
            for x1_, x2 in ((x1, pool[j]), (pool[j], x1)):
                tried += 1
                if tried > budget:
                    return None
                need = (1 - x0 * x0 + a * x1_ * x1_ + b * x2 * x2) / (a * b)
                root = is_square_fraction(need)
                if root is not None:
                    cand = element(spec, (x0, x1_, x2, root))
                    trd, nrd = reduced_trace_norm(cand)
                    assert trd == target and nrd == 1
                    return cand
    return None


# ---------------------------------------------------------------------------
# global polynomials matching local constraints


@dataclass(frozen=True)
class LocalConstraint:
    """Require the middle coefficient to be `residue` mod p^precision, coming
    from a cubic with no root over Q_p."""

    p: int
    residue: int
    precision: int


def find_trace_polynomial(l: int, a, constraints: Sequence[LocalConstraint] = (),
                          scan_budget: int = 2000,
                          hensel_precision: int = 12) -> PolyQ:
    """A monic irreducible degree-l polynomial with constant coefficient
    (-1)^l and X^{l-1}-coefficient -a (the characteristic polynomials of
    norm-one elements of trace a).

    l = 2 is forced: X^2 - aX + 1.  For l = 3 the middle coefficient b of
    X^3 - aX^2 + bX - 1 is chosen by CRT to match the residue constraints,
    scanning candidates by absolute value; each constrained prime is checked
    to leave the cubic without roots in Q_p (retrying once at doubled
    precision when the residue analysis is undecided), and irreducibility
    over Q is certified by the rational-root screen.
    """
    a = Fraction(a)
    if l == 2:
        return PolyQ((1, -a, 1))
    if l != 3:
        raise ValueError("only l = 2 and l = 3 are supported")
    moduli = []
    for c in constraints:
        if not is_prime(c.p):
            raise ValueError(f"{c.p} is not prime")
        moduli.append((c.residue % c.p ** c.precision, c.p ** c.precision))
    if moduli:
        from .qpoly import crt_combine
        combined = crt_combine(moduli)
        if combined is None:
            raise NoCRTSolution(f"inconsistent residues {moduli}")
        base_r, base_m = combined
    else:
        base_r, base_m = 0, 1

    def candidates():
        yield Fraction(base_r)
        k = 1
        while True:
            yield Fraction(base_r + k * base_m)
            yield Fraction(base_r - k * base_m)
            k += 1

    tried = 0
    for b in candidates():
        tried += 1
        if tried > scan_budget:
            raise SearchExhausted("no middle coefficient found within budget")
        f = PolyQ((-1, b, -a, 1))
        if rational_roots(f):
            continue
        for c in constraints:
            report = padic_roots(f, c.p, hensel_precision)
            if report.undecided:
                report = padic_roots(f, c.p, 2 * hensel_precision)
            if report.roots:
                raise LocalReducible(
                    f"residue {c.residue} mod {c.p}^{c.precision} admits a root in Z_{c.p}")
            if report.undecided:
                raise LocalReducible(
                    f"rootlessness of {f} over Q_{c.p} undecided at precision "
                    f"{2 * hensel_precision}")
        return f
    raise SearchExhausted("unreachable")
