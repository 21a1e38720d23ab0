"""Central simple algebras of prime degree over Q.

Two constructions: quaternion algebras (a, b) with basis 1, i, j, ij, and
cyclic algebras built from a cyclic number field M of prime degree l, a
generator s of its Galois group, and a parameter a, with the presentation
y^l = a and x*y = y*s(x) for x in M.  Elements are coefficient vectors of
length l^2 over the basis {theta^s * y^t}; multiplication goes through an
explicit structure-constant table.  Reduced trace and norm come from the
closed quaternion form or from the l x l matrix representation over M,
whose trace and determinant are certified to be rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .qpoly import PolyQ, factor_mod_p, primes_up_to, rational_roots


class InvalidAutomorphism(Exception):
    """sigma does not define an order-l automorphism of the field."""


class NonRationalReducedValue(Exception):
    """Trace or determinant of the matrix representation failed to be
    rational, which signals a representation bug rather than bad input."""


@dataclass(frozen=True)
class CyclicFieldSpec:
    """A cyclic number field of prime degree l over Q.

    defining_poly generates the field, sigma_poly gives the Galois generator
    as a polynomial in the root, and character maps residues mod conductor
    to Z/l compatibly with Frobenius (character(p) == 0 iff p splits).
    """

    l: int
    defining_poly: PolyQ
    sigma_poly: PolyQ
    conductor: int
    character: tuple[tuple[int, int], ...]  # (residue mod conductor, value in Z/l)
    label: str = ""

    def character_value(self, n: int) -> Optional[int]:
        """Character of an integer coprime to the conductor, else None."""
        r = n % self.conductor
        for res, val in self.character:
            if res == r:
                return val
        return None

    def sigma_power(self, k: int) -> PolyQ:
        """Image of the root under sigma^k, reduced mod the defining poly."""
        out = PolyQ.x()
        for _ in range(k % self.l):
            out = self.sigma_poly.compose(out) % self.defining_poly
        return out

    def validate(self) -> None:
        l, f = self.l, self.defining_poly
        if f.degree != l or not f.is_monic:
            raise ValueError("defining polynomial must be monic of degree l")
        if not _irreducible_small(f):
            raise ValueError(f"{f} is not irreducible over Q")
        # sigma permutes the roots: f(sigma(X)) = 0 mod f, and has order l
        if not (f.compose(self.sigma_poly) % f).is_zero:
            raise InvalidAutomorphism("sigma image is not a root")
        cur = self.sigma_poly % f
        if cur == PolyQ.x():
            raise InvalidAutomorphism("sigma is the identity")
        for _ in range(l - 1):
            cur = self.sigma_poly.compose(cur) % f
        if cur != PolyQ.x():
            raise InvalidAutomorphism("sigma does not have order l")
        # character: homomorphism on (Z/conductor)^x, kernel of index l, even
        table = dict(self.character)
        units = [r for r in range(1, self.conductor) if _gcd(r, self.conductor) == 1]
        if sorted(table) != units:
            raise ValueError("character table must cover exactly the units")
        for x in units:
            for y in units:
                if (table[x] + table[y]) % l != table[x * y % self.conductor]:
                    raise ValueError("character table is not a homomorphism")
        if sorted(set(table.values())) != list(range(l)):
            raise ValueError("character must be surjective onto Z/l")
        if table[self.conductor - 1] != 0:
            raise ValueError("character must be trivial on -1 (totally real field)")
        if sum(1 for v in table.values() if v == 0) * l != len(units):
            raise ValueError("character kernel must have index l")


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _irreducible_small(f: PolyQ) -> bool:
    """Irreducibility over Q for degree <= 3: equivalent to having no
    rational root; backed by a mod-p cycle-type witness when one exists."""
    if f.degree == 1:
        return True
    if f.degree > 3:
        raise ValueError("only degrees up to 3 are validated here")
    if rational_roots(f):
        return False
    for p in primes_up_to(100):
        try:
            ct = factor_mod_p(f, p, with_factors=False).cycle_type
        except Exception:
            continue
        if ct.degrees == (f.degree,):
            return True
    # no inert witness found; the rational-root screen already decided
    return True


@dataclass(frozen=True)
class QuaternionSpec:
    """The quaternion algebra (a, b): i^2 = a, j^2 = b, ij = -ji."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.a == 0 or self.b == 0:
            raise ValueError("quaternion parameters must be nonzero")

    @property
    def l(self) -> int:
        return 2

    @property
    def dim(self) -> int:
        return 4


@dataclass(frozen=True)
class CyclicSpec:
    """The cyclic algebra (M, sigma, a) of degree l = deg M."""

    field: CyclicFieldSpec
    a: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        if self.a == 0:
            raise ValueError("parameter a must be nonzero")

    @property
    def l(self) -> int:
        return self.field.l

    @property
    def dim(self) -> int:
        return self.field.l ** 2


AlgebraSpec = Union[QuaternionSpec, CyclicSpec]


@dataclass(frozen=True)
class StructureConstants:
    l: int
    table: tuple  # table[i][j] = coefficient vector of X_i * X_j

    def product(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> tuple[Fraction, ...]:
        n = self.l ** 2
        out = [Fraction(0)] * n
        for i, xi in enumerate(x):
            if xi:
                row = self.table[i]
                for j, yj in enumerate(y):
                    if yj:
                        c = xi * yj
                        for k, t in enumerate(row[j]):
                            if t:
                                out[k] += c * t
        return tuple(out)


_SC_CACHE: dict = {}


def structure_constants(spec: AlgebraSpec) -> StructureConstants:
    """Structure constants for the basis {theta^s y^t} (index s + l*t).

    For quaternions this is the classical 1, i, j, ij table; for cyclic
    algebras the products are computed in M with the twist y^t x = s^{-t}(x) y^t
    and the wrap y^l = a.
    """
    key = spec
    if key in _SC_CACHE:
        return _SC_CACHE[key]
    if isinstance(spec, QuaternionSpec):
        a, b = spec.a, spec.b
        z, o = Fraction(0), Fraction(1)
        e = lambda k, c=o: tuple(c if i == k else z for i in range(4))
        zero4 = (z, z, z, z)
        table = [[zero4] * 4 for _ in range(4)]
        # 1, i, j, k rows
        for idx in range(4):
            table[0][idx] = e(idx)
            table[idx][0] = e(idx)
        table[1][1] = (a, z, z, z)
        table[1][2] = e(3)
        table[1][3] = (z, z, a, z)        # i*k = a j
        table[2][1] = tuple(-c for c in e(3))
        table[2][2] = (b, z, z, z)
        table[2][3] = (z, -b, z, z)       # j*k = -b i
        table[3][1] = (z, z, -a, z)       # k*i = -a j
        table[3][2] = (z, b, z, z)        # k*j = b i
        table[3][3] = (-a * b, z, z, z)
        sc = StructureConstants(2, tuple(tuple(row) for row in table))
    else:
        fs = spec.field
        l, f, a = fs.l, fs.defining_poly, spec.a
        n = l * l
        sig = [fs.sigma_power(k) for k in range(l)]
        theta_pows = [PolyQ.x() ** s % f for s in range(l)]
        table = [[None] * n for _ in range(n)]
        for s1 in range(l):
            for t1 in range(l):
                for s2 in range(l):
                    for t2 in range(l):
                        # (th^s1 y^t1)(th^s2 y^t2) = th^s1 * sigma^{-t1}(th^s2) * y^{t1+t2}
                        # applying an automorphism to g(theta) substitutes the
                        # sigma image into g, i.e. composes g with sigma
                        twisted = theta_pows[s2].compose(sig[(-t1) % l]) % f
                        prod = (theta_pows[s1] * twisted) % f
                        tt = t1 + t2
                        coef = Fraction(1)
                        if tt >= l:
                            tt -= l
                            coef = a
                        vec = [Fraction(0)] * n
                        for s3 in range(l):
                            c = prod[s3]
                            if c:
                                vec[s3 + l * tt] = coef * c
                        table[s1 + l * t1][s2 + l * t2] = tuple(vec)
        sc = StructureConstants(l, tuple(tuple(row) for row in table))
    _SC_CACHE[key] = sc
    return sc


def verify_associativity(sc: StructureConstants) -> bool:
    """(X_i X_j) X_k = X_i (X_j X_k) over all basis triples, plus existence
    of the two-sided identity at basis index 0."""
    n = sc.l ** 2
    basis = [tuple(Fraction(1 if i == k else 0) for i in range(n)) for k in range(n)]
    one = basis[0]
    for v in basis:
        if sc.product(one, v) != v or sc.product(v, one) != v:
            return False
    for i in range(n):
        for j in range(n):
            ij = sc.product(basis[i], basis[j])
            for k in range(n):
                left = sc.product(ij, basis[k])
                right = sc.product(basis[i], sc.product(basis[j], basis[k]))
                if left != right:
                    return False
    return True


@dataclass(frozen=True)
class AlgebraElement:
    spec: AlgebraSpec
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        cs = tuple(Fraction(c) for c in self.coeffs)
        if len(cs) != self.spec.dim:
            raise ValueError(f"need {self.spec.dim} coefficients")
        object.__setattr__(self, "coeffs", cs)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.spec, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.spec, tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return AlgebraElement(self.spec, tuple(-x for x in self.coeffs))

    def scale(self, c) -> "AlgebraElement":
        c = Fraction(c)
        return AlgebraElement(self.spec, tuple(c * x for x in self.coeffs))

    def _check(self, other):
        if not isinstance(other, AlgebraElement) or other.spec != self.spec:
            raise ValueError("algebra spec mismatch")


def element(spec: AlgebraSpec, coeffs) -> AlgebraElement:
    return AlgebraElement(spec, tuple(Fraction(c) for c in coeffs))


def scalar(spec: AlgebraSpec, c) -> AlgebraElement:
    cs = [Fraction(0)] * spec.dim
    cs[0] = Fraction(c)
    return AlgebraElement(spec, tuple(cs))


def mul(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    x._check(y)
    sc = structure_constants(x.spec)
    return AlgebraElement(x.spec, sc.product(x.coeffs, y.coeffs))


# ---------------------------------------------------------------------------
# reduced trace and norm


def _matrix_rep(x: AlgebraElement) -> list[list[PolyQ]]:
    """Left multiplication by x as an l x l matrix over M, in the right-M
    basis y^0 .. y^{l-1}.  theta^s y^t sends y^u to sigma^{(t+u) mod l}(theta^s)
    times y^{(t+u) mod l}, with a factor a on wrap."""
    spec = x.spec
    if not isinstance(spec, CyclicSpec):
        raise ValueError("matrix representation needs a cyclic spec")
    fs = spec.field
    l, f, a = fs.l, fs.defining_poly, spec.a
    sig = [fs.sigma_power(k) for k in range(l)]
    theta_pows = [PolyQ.x() ** s % f for s in range(l)]
    mat = [[PolyQ() for _ in range(l)] for _ in range(l)]
    for s in range(l):
        for t in range(l):
            c = x.coeffs[s + l * t]
            if not c:
                continue
            for u in range(l):
                wrap = t + u >= l
                row = (t + u) % l
                entry = theta_pows[s].compose(sig[row]) % f
                entry = entry * (c * (a if wrap else 1))
                mat[row][u] = mat[row][u] + entry
    return mat


def _det3(m, f):
    def mm(p, q):
        return (p * q) % f
    d = mm(m[0][0], mm(m[1][1], m[2][2]) - mm(m[1][2], m[2][1]))
    d = d - mm(m[0][1], mm(m[1][0], m[2][2]) - mm(m[1][2], m[2][0]))
    d = d + mm(m[0][2], mm(m[1][0], m[2][1]) - mm(m[1][1], m[2][0]))
    return d % f


def _as_rational(p: PolyQ) -> Fraction:
    if p.degree > 0:
        raise NonRationalReducedValue(f"value {p} is not rational")
    return p[0]


def reduced_trace_norm(x: AlgebraElement) -> tuple[Fraction, Fraction]:
    """Reduced trace and reduced norm of x.

    Quaternions use the closed form Trd = 2 x0, Nrd = x0^2 - a x1^2 - b x2^2
    + ab x3^2; cyclic algebras go through the matrix representation over M,
    with the result certified to land in Q.
    """
    spec = x.spec
    if isinstance(spec, QuaternionSpec):
        x0, x1, x2, x3 = x.coeffs
        trd = 2 * x0
        nrd = x0 * x0 - spec.a * x1 * x1 - spec.b * x2 * x2 + spec.a * spec.b * x3 * x3
        return trd, nrd
    fs = spec.field
    l, f = fs.l, fs.defining_poly
    if l not in (2, 3):
        raise ValueError("reduced trace/norm implemented for degrees 2 and 3")
    m = _matrix_rep(x)
    tr = PolyQ()
    for i in range(l):
        tr = tr + m[i][i]
    tr = tr % f
    if l == 2:
        det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) % f
    else:
        det = _det3(m, f)
    return _as_rational(tr), _as_rational(det)


def reduced_charpoly(x: AlgebraElement) -> PolyQ:
    """The reduced characteristic polynomial (degree l, rational), which
    annihilates x in the algebra."""
    spec = x.spec
    if isinstance(spec, QuaternionSpec):
        t, n = reduced_trace_norm(x)
        return PolyQ((n, -t, 1))
    l, f = spec.field.l, spec.field.defining_poly
    m = _matrix_rep(x)
    if l == 2:
        t, n = reduced_trace_norm(x)
        return PolyQ((n, -t, 1))
    if l != 3:
        raise ValueError("degree must be 2 or 3")
    t, n = reduced_trace_norm(x)
    # sum of principal 2x2 minors
    s = PolyQ()
    for i in range(3):
        for j in range(i + 1, 3):
            s = s + (m[i][i] * m[j][j] - m[i][j] * m[j][i]) % f
    return PolyQ((-n, _as_rational(s % f), -t, 1))


def evaluate_in_algebra(f: PolyQ, x: AlgebraElement) -> AlgebraElement:
    acc = scalar(x.spec, 0)
    for c in reversed(f.coeffs):
        acc = mul(acc, x) + scalar(x.spec, c)
    return acc
