"""Class field theory data over Q: totally real cyclic fields as character
kernels, the Artin map on ideals coprime to the modulus, good-prime scans
with sampled Chebotarev densities, admissibility, and witness selection.

Over Q the class group is trivial and the units are {1, -1}, so ideals are
identified with positive rationals and the Artin class of x is the
character vector of |x| summed over its prime factorization.  Fields are
stored as character tables mod their conductor together with a defining
polynomial and Galois generator for cross-checks and algebra construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .csa import CyclicFieldSpec, CyclicSpec
from .localglobal import ExtensionSpec, RamifiedQuery
from .qpoly import (DenominatorClash, PolyQ, RamifiedPrime, factor_integer,
                    factor_mod_p, is_prime, primes_up_to)


class UnsupportedConfig(Exception):
    """No default class-field configuration for these parameters."""


class NoAdmissiblePrime(Exception):
    """No divisor of n reached the sampled density threshold; usually the
    scan bound is too small."""


class AllSameClass(Exception):
    """Every supplied prime has the same Artin class; enlarge the pool."""


class ConfigError(Exception):
    """Malformed configuration file."""


# ---------------------------------------------------------------------------
# the concrete fields


def kronecker_symbol(a: int, n: int) -> int:
    """The Kronecker symbol (a|n)."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    e = 0
    while n % 2 == 0:
        n //= 2
        e += 1
    if e % 2 and a % 2 == 0:
        return 0
    if e % 2 and abs(a) % 8 in (3, 5):
        sign = -sign
    a %= n
    # now Jacobi symbol (a|n), n odd positive
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        # reciprocity flip checks the two odd values before reduction
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a, n = n % a, a
    return sign if n == 1 else 0


def quadratic_field(d: int) -> CyclicFieldSpec:
    """Q(sqrt d) for squarefree d > 1, as a character-kernel datum.

    The character is the Kronecker symbol of the fundamental discriminant,
    translated to additive Z/2 values.
    """
    if d <= 1:
        raise ValueError("need squarefree d > 1 (totally real field)")
    for p, e in factor_integer(d).factors:
        if e > 1:
            raise ValueError(f"{d} is not squarefree")
    disc = d if d % 4 == 1 else 4 * d
    conductor = abs(disc)
    table = []
    for r in range(1, conductor):
        if math.gcd(r, conductor) == 1:
            table.append((r, 0 if kronecker_symbol(disc, r) == 1 else 1))
    return CyclicFieldSpec(2, PolyQ((-d, 0, 1)), PolyQ((0, -1)), conductor,
                           tuple(table), f"sqrt{d}")


def _cyclic_character(conductor: int, generator: int, l: int) -> tuple[tuple[int, int], ...]:
    units = [r for r in range(1, conductor) if math.gcd(r, conductor) == 1]
    table = {}
    val = 1
    for k in range(len(units)):
        table[val] = k % l
        val = val * generator % conductor
    if sorted(table) != units:
        raise ValueError(f"{generator} does not generate mod {conductor}")
    return tuple(sorted(table.items()))


_CUBIC_FIELDS = {
    # conductor 7: the real subfield of the 7th cyclotomic field,
    # theta = zeta + 1/zeta, sigma: theta -> theta^2 - 2
    7: (PolyQ((-1, -2, 1, 1)), 3),
    # conductor 9: likewise for the 9th cyclotomic field
    9: (PolyQ((1, -3, 0, 1)), 2),
}


def cyclic_cubic_field(conductor: int) -> CyclicFieldSpec:
    """The totally real cyclic cubic field of conductor 7 or 9."""
    if conductor not in _CUBIC_FIELDS:
        raise UnsupportedConfig(f"no built-in cubic field of conductor {conductor}")
    poly, gen = _CUBIC_FIELDS[conductor]
    return CyclicFieldSpec(3, poly, PolyQ((-2, 0, 1)), conductor,
                           _cyclic_character(conductor, gen, 3), f"cond{conductor}")


# ---------------------------------------------------------------------------
# configurations


@dataclass(frozen=True)
class ClassFieldConfig:
    """k cyclic degree-l fields whose characters are jointly surjective onto
    (Z/l)^k, with l^k exceeding n! (the class number of Z is 1)."""

    l: int
    n: int
    fields: tuple[CyclicFieldSpec, ...]
    modulus: int

    @property
    def k(self) -> int:
        return len(self.fields)

    def algebra(self, i: int, a) -> CyclicSpec:
        return CyclicSpec(self.fields[i], Fraction(a))

    def validate(self) -> None:
        l, k = self.l, self.k
        if l ** k <= math.factorial(self.n):
            raise ValueError(f"{l}^{k} does not exceed {self.n}!")
        lcm = 1
        for fs in self.fields:
            if fs.l != l:
                raise ValueError("field degree mismatch")
            fs.validate()
            lcm = lcm * fs.conductor // math.gcd(lcm, fs.conductor)
        if lcm != self.modulus:
            raise ValueError(f"modulus {self.modulus} != lcm of conductors {lcm}")
        # joint surjectivity onto (Z/l)^k
        seen = set()
        for r in range(1, self.modulus):
            if math.gcd(r, self.modulus) == 1:
                seen.add(tuple(fs.character_value(r) for fs in self.fields))
        if len(seen) != l ** k:
            raise ValueError("characters are not jointly surjective")


_DEFAULT_STEMS = (2, 5, 13, 17, 29)
_CONFIG_CACHE: dict = {}


def default_config(l: int, n: int) -> ClassFieldConfig:
    """Built-in configurations for (l, n) in {(2,2), (2,4), (3,3)}."""
    key = (l, n)
    if key in _CONFIG_CACHE:
        return _CONFIG_CACHE[key]
    if key == (2, 2):
        fields = tuple(quadratic_field(d) for d in _DEFAULT_STEMS[:2])
    elif key == (2, 4):
        fields = tuple(quadratic_field(d) for d in _DEFAULT_STEMS[:5])
    elif key == (3, 3):
        fields = (cyclic_cubic_field(7), cyclic_cubic_field(9))
    else:
        raise UnsupportedConfig(f"no default configuration for (l, n) = {key}")
    modulus = 1
    for fs in fields:
        modulus = modulus * fs.conductor // math.gcd(modulus, fs.conductor)
    cfg = ClassFieldConfig(l, n, fields, modulus)
    cfg.validate()
    _CONFIG_CACHE[key] = cfg
    return cfg


# ---------------------------------------------------------------------------
# the Artin map


def artin_class(cfg: ClassFieldConfig, x) -> Optional[tuple[int, ...]]:
    """Character vector of the fractional ideal (x), or None when some prime
    of the modulus divides numerator or denominator.

    Depends only on |x|: the characters are even, matching invariance of the
    ideal under units.
    """
    x = Fraction(x)
    if x == 0:
        raise ValueError("x must be nonzero")
    vec = [0] * cfg.k
    for source, sign in ((x.numerator, 1), (x.denominator, -1)):
        for p, e in factor_integer(abs(source)).factors:
            if cfg.modulus % p == 0:
                return None
            for i, fs in enumerate(cfg.fields):
                chi = fs.character_value(p)
                vec[i] = (vec[i] + sign * e * chi) % cfg.l
    return tuple(vec)


def is_modulus_coprime(cfg: ClassFieldConfig, x) -> bool:
    """Whether (x) lies in the ideal group of the modulus."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("x must be nonzero")
    return math.gcd(x.numerator * x.denominator, cfg.modulus) == 1


def in_artin_kernel(cfg: ClassFieldConfig, x) -> bool:
    """Whether (x) is coprime to the modulus with trivial Artin class."""
    cls = artin_class(cfg, x) if is_modulus_coprime(cfg, x) else None
    return cls is not None and all(v == 0 for v in cls)


def prime_class(cfg: ClassFieldConfig, p: int) -> tuple[int, ...]:
    return tuple(fs.character_value(p) for fs in cfg.fields)


# ---------------------------------------------------------------------------
# good primes and admissibility


@dataclass(frozen=True)
class GoodPrimeReport:
    ext: ExtensionSpec
    l: int
    bound: int
    good_primes: tuple[int, ...]
    scanned_unramified: int
    ramified_skipped: tuple[int, ...]
    sampled_density: Fraction
    admissible: bool


def good_primes(ext: ExtensionSpec, l: int, bound: int) -> GoodPrimeReport:
    """Scan p <= bound for primes unramified in L whose residue degrees are
    all divisible by l.

    admissible compares the sampled density against 1/n! minus the loud
    safety margin 2/sqrt(#scanned), a conservative desk-scale stand-in for
    an exact density statement.
    """
    if bound < 100:
        raise ValueError("bound must be at least 100")
    good: list[int] = []
    ramified: list[int] = []
    scanned = 0
    for p in primes_up_to(bound):
        if ext.is_rationals:
            scanned += 1
            continue  # residue degree 1 is never divisible by l
        try:
            degrees = ext.local_degrees(p)
        except RamifiedQuery:
            ramified.append(p)
            continue
        scanned += 1
        if all(f % l == 0 for f in degrees):
            good.append(p)
    density = Fraction(len(good), scanned) if scanned else Fraction(0)
    margin = Fraction(2) / int(math.isqrt(scanned)) if scanned else Fraction(2)
    threshold = Fraction(1, math.factorial(ext.degree)) - margin
    admissible = density >= threshold and bool(good)
    return GoodPrimeReport(ext, l, bound, tuple(good), scanned, tuple(ramified),
                           density, admissible)


def select_admissible(ext: ExtensionSpec, n: int, bound: int = 1000
                      ) -> tuple[int, GoodPrimeReport]:
    """Smallest prime l | n whose good primes reach the density threshold,
    retrying once at four times the bound before giving up."""
    if ext.degree != n or n not in (2, 3, 4):
        raise ValueError("degree of L must be n in {2, 3, 4}")
    tried = []
    for l in sorted({p for p, _ in factor_integer(n).factors}):
        report = good_primes(ext, l, bound)
        if not report.admissible:
            report = good_primes(ext, l, 4 * bound)
        if report.admissible:
            return l, report
        tried.append((l, report.sampled_density))
    raise NoAdmissiblePrime(
        f"no admissible prime divisor of {n} at bound {4 * bound}; "
        f"sampled densities {tried}")


def find_witness(cfg: ClassFieldConfig, primes: Sequence[int]) -> Fraction:
    """p/p' for the lexicographically least pair of supplied primes with
    distinct Artin classes.

    The class group of Z is trivial, so the quotient of any two primes is
    already a generator of their ideal quotient.
    """
    pool = sorted(set(primes))
    if not pool:
        raise ValueError("empty prime pool")
    for p in pool:
        if math.gcd(p, cfg.modulus) != 1:
            raise ValueError(f"{p} shares a factor with the modulus {cfg.modulus}")
    classes = {p: prime_class(cfg, p) for p in pool}
    for i, p in enumerate(pool):
        for q in pool[i + 1:]:
            if classes[p] != classes[q]:
                return Fraction(p, q)
    raise AllSameClass(f"all {len(pool)} primes have Artin class {classes[pool[0]]}")


def class_representatives(cfg: ClassFieldConfig, search_bound: int = 500_000
                          ) -> dict[tuple[int, ...], int]:
    """Least prime in each nonzero Artin class."""
    want = cfg.l ** cfg.k - 1
    reps: dict[tuple[int, ...], int] = {}
    for p in primes_up_to(search_bound):
        if cfg.modulus % p == 0:
            continue
        cls = prime_class(cfg, p)
        if any(cls) and cls not in reps:
            reps[cls] = p
            if len(reps) == want:
                return reps
    raise UnsupportedConfig(f"only {len(reps)}/{want} classes represented "
                            f"below {search_bound}")


def kernel_density(fs: CyclicFieldSpec, bound: int) -> Fraction:
    """Sampled density of primes with trivial character (split primes)."""
    hits = 0
    total = 0
    for p in primes_up_to(bound):
        chi = fs.character_value(p)
        if chi is None:
            continue
        total += 1
        hits += chi == 0
    return Fraction(hits, total)


# ---------------------------------------------------------------------------
# configuration files
#
# Plain key=value lines.  Fields are numbered:
#
#   l=2
#   n=2
#   field.1.label=sqrt2
#   field.1.conductor=8
#   field.1.poly=X^2-2
#   field.1.sigma=-X
#   field.1.character=1:0,3:1,5:1,7:0


def load_config(path: str) -> ClassFieldConfig:
    data: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value")
            key, _, value = line.partition("=")
            data[key.strip()] = value.strip()
    try:
        l = int(data["l"])
        n = int(data["n"])
    except KeyError as exc:
        raise ConfigError(f"missing top-level key {exc}") from exc
    fields = []
    idx = 1
    while f"field.{idx}.conductor" in data:
        pre = f"field.{idx}."
        try:
            conductor = int(data[pre + "conductor"])
            poly = PolyQ.parse(data[pre + "poly"])
            sigma = PolyQ.parse(data[pre + "sigma"])
            pairs = []
            for item in data[pre + "character"].split(","):
                res, _, val = item.partition(":")
                pairs.append((int(res), int(val)))
            label = data.get(pre + "label", f"field{idx}")
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"field {idx}: {exc}") from exc
        fields.append(CyclicFieldSpec(l, poly, sigma, conductor,
                                      tuple(sorted(pairs)), label))
        idx += 1
    if not fields:
        raise ConfigError("no fields defined")
    modulus = 1
    for fs in fields:
        modulus = modulus * fs.conductor // math.gcd(modulus, fs.conductor)
    cfg = ClassFieldConfig(l, n, tuple(fields), modulus)
    cfg.validate()
    return cfg
