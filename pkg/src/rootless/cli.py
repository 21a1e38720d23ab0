"""Batch verification commands with machine-readable reports.

Every report is line-oriented key=value text (audit traces indented under a
`trace:` header), deterministic for a fixed command line and seed; timing
goes to stderr so byte-comparing reports stays meaningful.  Exit codes:
0 all checked claims hold, 1 a claim failed, 2 operational error.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction

from . import cft, criterion, csa, ffield, formula, localglobal, qpoly

PASS, FAIL, OPERR = 0, 1, 2


class Report:
    def __init__(self, command: str, **params):
        self.lines: list[str] = [f"command={command}"]
        for k, v in params.items():
            self.lines.append(f"{k}={v}")
        self.failures = 0

    def kv(self, key, value):
        self.lines.append(f"{key}={value}")

    def claim(self, name: str, ok: bool, detail: str = ""):
        self.lines.append(f"claim.{name}={'pass' if ok else 'FAIL'}"
                          + (f" {detail}" if detail else ""))
        if not ok:
            self.failures += 1

    def trace(self, title: str, entries):
        self.lines.append(f"trace:{title}")
        for e in entries:
            self.lines.append(f"  {e}")

    def emit(self) -> int:
        print("\n".join(self.lines))
        print(f"result={'pass' if not self.failures else 'fail'}")
        return PASS if not self.failures else FAIL


def _prime_powers(limit: int):
    for p in qpoly.primes_up_to(limit):
        q = p
        e = 1
        while q <= limit:
            yield p, e, q
            q *= p
            e += 1


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify_ff(args) -> int:
    rep = Report("verify-ff", lmax=args.lmax, qmax=args.qmax)
    t0 = time.time()
    if args.lmax >= 3:
        for p, e, q in _prime_powers(min(args.qmax, 121)):
            ts = ffield.norm_one_traces(ffield.FqField(p, e), 3)
            rep.claim(f"traces_full.l3.q{q}", len(ts.elements) == q)
    if args.lmax >= 5:
        for p, e, q in _prime_powers(min(args.qmax, 49)):
            ts = ffield.norm_one_traces(ffield.FqField(p, e), 5)
            rep.claim(f"traces_full.l5.q{q}", len(ts.elements) == q)
    for p, e, q in _prime_powers(min(args.qmax, 169)):
        base = ffield.FqField(p, e)
        ts = ffield.norm_one_traces(base, 2)
        if q > 11:
            rep.claim(f"difference.q{q}", ffield.difference_covers_field(ts).holds)
        else:
            rep.claim(f"difference_augmented.q{q}",
                      ffield.difference_covers_field(ts, augment_with_pm2=True).holds)
    # prescribed outer coefficients: degree 3 with constant -1, degree 6 small
    for p, e, q in _prime_powers(min(args.qmax, 25)):
        base = ffield.FqField(p, e)
        ok = True
        for ate in range(q):
            found = ffield.irreducible_with_prescribed_coeffs(
                base, 3, base.element(-1), base.from_encoding(ate))
            ok = ok and found is not None
        rep.claim(f"prescribed.n3.q{q}", ok)
    for p, e, q in _prime_powers(min(args.qmax, 9)):
        base = ffield.FqField(p, e)
        ok = True
        for a0e in range(1, q):
            for ate in range(q):
                found = ffield.irreducible_with_prescribed_coeffs(
                    base, 6, base.from_encoding(a0e), base.from_encoding(ate))
                ok = ok and found is not None
        rep.claim(f"prescribed.n6.q{q}", ok)
    if args.corrupt:
        # negative control: damage a trace set and confirm the check trips
        base = ffield.FqField(5, 1)
        ts = ffield.norm_one_traces(base, 3)
        damaged = ffield.TraceSet(base, 3, frozenset(list(ts.elements)[:-1]))
        rep.claim("corruption_detected", len(damaged.elements) != base.q)
    print(f"elapsed={time.time()-t0:.1f}s", file=sys.stderr)
    return rep.emit()


def cmd_hilbert(args) -> int:
    a, b = Fraction(args.a), Fraction(args.b)
    rep = Report("hilbert", a=a, b=b)
    if args.place:
        place = (qpoly.Place.infinite() if args.place in ("inf", "oo")
                 else qpoly.Place.finite(int(args.place)))
        rep.kv("symbol", localglobal.hilbert_symbol(a, b, place))
        return rep.emit()
    prod = 1
    for v in localglobal._support_places(a, b):
        s = localglobal.hilbert_symbol(a, b, v)
        prod *= s
        rep.kv(f"symbol.{v.p if v.is_finite else 'oo'}", s)
    rep.claim("reciprocity", prod == 1, f"product={prod}")
    return rep.emit()


def cmd_delta(args) -> int:
    spec = csa.QuaternionSpec(Fraction(args.a), Fraction(args.b))
    rs = localglobal.quaternion_ramified_set(spec)
    rep = Report("delta", a=args.a, b=args.b)
    rep.kv("finite", ",".join(str(p) for p in sorted(rs.finite)) or "-")
    rep.kv("infinite", "yes" if rs.infinite else "no")
    rep.claim("even_cardinality", len(rs) % 2 == 0)
    return rep.emit()


def _parse_algebra(text: str):
    kind, _, rest = text.partition(":")
    if kind == "quat":
        a, _, b = rest.partition(",")
        return csa.QuaternionSpec(Fraction(a), Fraction(b))
    if kind == "cyclic":
        label, _, a = rest.partition(":")
        if label.startswith("sqrt"):
            fs = cft.quadratic_field(int(label[4:]))
        elif label.startswith("cond"):
            fs = cft.cyclic_cubic_field(int(label[4:]))
        else:
            raise ValueError(f"unknown field label {label!r}")
        return csa.CyclicSpec(fs, Fraction(a))
    raise ValueError("algebra must look like quat:a,b or cyclic:<label>:<a>")


def cmd_t_member(args) -> int:
    spec = _parse_algebra(args.algebra)
    ext = localglobal.ExtensionSpec.from_poly(qpoly.PolyQ.parse(args.L))
    res = localglobal.in_trace_set(spec, ext, Fraction(args.x))
    rep = Report("t-member", algebra=args.algebra, L=args.L, x=args.x)
    rep.kv("member", res.member)
    rep.kv("real_split", res.real_split)
    rep.trace("places", [
        f"p={c.p} local_degrees={list(c.local_degrees)} splits={list(c.splits)}"
        for c in res.checks])
    return rep.emit()


def cmd_dagger(args) -> int:
    ext = localglobal.ExtensionSpec.from_poly(qpoly.PolyQ.parse(args.L))
    n = args.n
    bounds = criterion.CriterionBounds(
        good_prime_bound=args.bound,
        candidate_prime_bound=args.candidate_bound,
        candidate_max_support=args.support,
        seed=args.seed)
    rep = Report("dagger", L=args.L, n=n, seed=args.seed)
    primes_l = [args.l] if args.l else sorted(
        {p for p, _ in qpoly.factor_integer(n).factors})
    any_holds = False
    for l in primes_l:
        cfg = cft.load_config(args.config) if args.config else cft.default_config(l, n)
        verdict = criterion.criterion_check(ext, l, cfg, bounds)
        any_holds = any_holds or verdict.holds
        rep.kv(f"l{l}.holds", verdict.holds)
        if verdict.witness is not None:
            rep.kv(f"l{l}.witness", verdict.witness)
        if ext.is_rationals:
            rep.kv(f"l{l}.candidates", verdict.candidates_checked)
            rep.kv(f"l{l}.refuted", len(verdict.refutations))
            rep.kv(f"l{l}.unrefuted", len(verdict.unrefuted))
            rep.trace(f"l{l}.refutations", [
                f"a={r.candidate} p={r.prime} field=M{r.field_index}"
                for r in verdict.refutations[:args.trace_limit]])
            rep.claim(f"l{l}.all_candidates_refuted", not verdict.unrefuted)
        else:
            rep.trace(f"l{l}.audit", verdict.audit)
    if ext.is_rationals:
        rep.claim("fails_over_Q", not any_holds)
    else:
        rep.claim("holds_over_extension", any_holds)
    return rep.emit()


def cmd_good_primes(args) -> int:
    ext = localglobal.ExtensionSpec.from_poly(qpoly.PolyQ.parse(args.L))
    report = cft.good_primes(ext, args.l, args.bound)
    rep = Report("good-primes", L=args.L, l=args.l, bound=args.bound)
    rep.kv("count", len(report.good_primes))
    rep.kv("scanned_unramified", report.scanned_unramified)
    rep.kv("ramified_skipped", ",".join(map(str, report.ramified_skipped)) or "-")
    rep.kv("sampled_density", report.sampled_density)
    rep.kv("admissible", report.admissible)
    rep.trace("good_primes", [str(p) for p in report.good_primes])
    return rep.emit()


def cmd_build_formula(args) -> int:
    t0 = time.time()
    phi = formula.build_no_root_formula(args.n)
    formula.validate(phi, free=[f"a{i}" for i in range(args.n)], allow_subring=False)
    text = formula.serialize(phi)
    rep = Report("build-formula", n=args.n)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        rep.kv("out", args.out)
    st = formula.stats(phi)
    rep.kv("bytes", len(text) + 1)
    rep.kv("quantifiers", st.quantifiers)
    rep.kv("disjuncts", st.disjuncts)
    rep.kv("equations", st.equations)
    rep.kv("parameters", st.parameters)
    rep.claim("positive_existential", True)  # validate() above would have raised
    rep.claim("roundtrip", formula.parse(text) == phi)
    print(f"elapsed={time.time()-t0:.1f}s", file=sys.stderr)
    return rep.emit()


def cmd_eval_formula(args) -> int:
    with open(args.infile, "r", encoding="utf-8") as fh:
        phi = formula.parse(fh.read().strip())
    assignment = {}
    if args.assign:
        for item in args.assign.split(","):
            key, _, val = item.partition("=")
            assignment[key.strip()] = Fraction(val)
    res = formula.bounded_eval(phi, assignment, args.height, args.budget)
    rep = Report("eval-formula", infile=args.infile, assign=args.assign or "-",
                 height=args.height, budget=args.budget)
    rep.kv("verdict", res.verdict)
    if res.witness:
        rep.trace("witness", [f"{k}={v}" for k, v in sorted(res.witness.items())])
    return rep.emit()


def cmd_report_all(args) -> int:
    rng = random.Random(args.seed)
    rep = Report("report-all", seed=args.seed)
    t0 = time.time()

    # finite field claims at reduced scale
    for p, e, q in _prime_powers(25):
        ts = ffield.norm_one_traces(ffield.FqField(p, e), 3)
        rep.claim(f"ff.traces_full.l3.q{q}", len(ts.elements) == q)
    for p, e, q in _prime_powers(31):
        base = ffield.FqField(p, e)
        ts = ffield.norm_one_traces(base, 2)
        holds = ffield.difference_covers_field(ts, augment_with_pm2=q <= 11).holds
        rep.claim(f"ff.difference.q{q}", holds)

    # reciprocity at reduced scale
    bad = sum(1 for a in range(-20, 21) for b in range(-20, 21)
              if a and b and localglobal.hilbert_reciprocity_product(a, b) != 1)
    rep.claim("hilbert.reciprocity20", bad == 0, f"violations={bad}")

    # algebra identities on seeded random elements
    quat = csa.QuaternionSpec(-1, -1)
    cond7 = cft.cyclic_cubic_field(7)
    alg3 = csa.CyclicSpec(cond7, Fraction(2))
    ok_mult = ok_ch = True
    for _ in range(60):
        xs = [Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(4)]
        ys = [Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(4)]
        x, y = csa.element(quat, xs), csa.element(quat, ys)
        ok_mult = ok_mult and (reduced_norm_pair(x, y))
        z = csa.evaluate_in_algebra(csa.reduced_charpoly(x), x)
        ok_ch = ok_ch and all(v == 0 for v in z.coeffs)
    for _ in range(20):
        xs = [Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(9)]
        ys = [Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(9)]
        x, y = csa.element(alg3, xs), csa.element(alg3, ys)
        ok_mult = ok_mult and reduced_norm_pair(x, y)
        z = csa.evaluate_in_algebra(csa.reduced_charpoly(x), x)
        ok_ch = ok_ch and all(v == 0 for v in z.coeffs)
    rep.claim("csa.norm_multiplicative", ok_mult)
    rep.claim("csa.charpoly_annihilates", ok_ch)

    # criterion corpus
    bounds = criterion.CriterionBounds(candidate_prime_bound=30, seed=args.seed)
    rep.claim("criterion.Q_n2_fails",
              not criterion.proper_extension_criterion(
                  localglobal.ExtensionSpec.rationals(), 2, bounds))
    for poly, n in (("X^2-7", 2), ("X^3-2", 3)):
        ext = localglobal.ExtensionSpec.from_poly(qpoly.PolyQ.parse(poly))
        rep.claim(f"criterion.{poly}_holds",
                  criterion.proper_extension_criterion(ext, n, bounds))

    # character kernel densities
    for fs in cft.default_config(2, 2).fields + cft.default_config(3, 3).fields:
        d = cft.kernel_density(fs, 2000)
        rep.claim(f"chebotarev.{fs.label}", abs(float(d) - 1 / fs.l) <= 0.05,
                  f"density={float(d):.4f}")

    # formula artifact at n = 2
    phi2 = formula.build_no_root_formula(2)
    text = formula.serialize(phi2)
    rep.claim("formula.roundtrip", formula.parse(text) == phi2)
    ok_hom = True
    for _ in range(10):
        rt = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        g = qpoly.PolyQ([rng.randint(-5, 5), 1])
        ok_hom = ok_hom and formula.check_quotient_interpretation(
            g * qpoly.PolyQ((-rt, 1)), rt, rng)
    rep.claim("formula.hom_soundness", ok_hom)

    print(f"elapsed={time.time()-t0:.1f}s", file=sys.stderr)
    return rep.emit()


def reduced_norm_pair(x, y) -> bool:
    tx, nx = csa.reduced_trace_norm(x)
    ty, ny = csa.reduced_trace_norm(y)
    txy, nxy = csa.reduced_trace_norm(csa.mul(x, y))
    ts, _ = csa.reduced_trace_norm(x + y)
    return nxy == nx * ny and ts == tx + ty


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rootless",
                                 description="verification commands")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("verify-ff", help="finite field trace/difference scans")
    p.add_argument("--lmax", type=int, default=5)
    p.add_argument("--qmax", type=int, default=49)
    p.add_argument("--corrupt", action="store_true",
                   help="negative control: verify the checker can fail")
    p.set_defaults(func=cmd_verify_ff)

    p = sub.add_parser("hilbert", help="Hilbert symbols and reciprocity")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--place", help="prime or 'inf'; omit for all")
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("delta", help="ramified places of a quaternion algebra")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("t-member", help="semilocal trace-set membership")
    p.add_argument("--algebra", required=True, help="quat:a,b or cyclic:<label>:<a>")
    p.add_argument("--L", default="X", help="defining polynomial of L (default Q)")
    p.add_argument("--x", required=True)
    p.set_defaults(func=cmd_t_member)

    p = sub.add_parser("dagger", help="distinguishing criterion")
    p.add_argument("--L", required=True, help="defining polynomial, degree 1 for Q")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=int)
    p.add_argument("--bound", type=int, default=400)
    p.add_argument("--candidate-bound", type=int, default=50, dest="candidate_bound")
    p.add_argument("--support", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="class-field configuration file")
    p.add_argument("--trace-limit", type=int, default=20, dest="trace_limit")
    p.set_defaults(func=cmd_dagger)

    p = sub.add_parser("good-primes", help="good-prime scan for an extension")
    p.add_argument("--L", required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--bound", type=int, default=1000)
    p.set_defaults(func=cmd_good_primes)

    p = sub.add_parser("build-formula", help="emit the no-root formula")
    p.add_argument("--n", type=int, required=True, choices=(2, 3, 4))
    p.add_argument("--out")
    p.set_defaults(func=cmd_build_formula)

    p = sub.add_parser("eval-formula", help="bounded witness search")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--assign", help="comma-separated name=rational")
    p.add_argument("--height", type=int, default=4)
    p.add_argument("--budget", type=int, default=100_000)
    p.set_defaults(func=cmd_eval_formula)

    p = sub.add_parser("report-all", help="battery across all modules")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_report_all)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return OPERR
    except Exception as exc:  # operational failure, not a claim verdict
        print(f"error={type(exc).__name__}: {exc}", file=sys.stderr)
        return OPERR


if __name__ == "__main__":
    sys.exit(main())
