"""Command line front end: correlators, identity suites, reference tables.

Exit codes: 0 success, 1 identity-suite failure, 2 parse error,
3 precondition violation, 4 non-convergence flag.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import (
    AlphabetSpec, CasimirBasis, CorrelatorRequest, CyclicElement, EKIndex,
    EllipticCurve, GreenSpec, RationalCurve, INFINITY,
    cobracket, cobracket_squared, correlate, d_omega_identity, differential,
    dilog_coproduct, eisenstein_kronecker, kappa, morphism_check,
    multiple_green, omega_star, parse_element, point, single_valued_polylog,
    tree_sum_ext, tree_sum_map, xi_eta,
)
from .exact_algebra import derivative_identity_check, shuffle_sum


def _parse_complex(text: str) -> complex:
    text = text.strip()
    if text in ("inf", "oo"):
        return INFINITY
    return complex(text.replace("i", "j"))


def _parse_curve(text: str):
    if text == "p1":
        return RationalCurve()
    if text.startswith("elliptic:tau="):
        return EllipticCurve(_parse_complex(text.split("=", 1)[1]))
    raise ValueError(f"unknown curve {text!r}")


def _parse_mu(text: str) -> GreenSpec:
    if text == "volume":
        return GreenSpec.volume()
    if text.startswith("delta:"):
        return GreenSpec.delta(_parse_complex(text.split(":", 1)[1]))
    raise ValueError(f"unknown measure {text!r}")


def cmd_correlator(args) -> int:
    try:
        curve = _parse_curve(args.curve)
        mu = _parse_mu(args.mu)
        word = parse_element(args.word)
    except ValueError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    pts = {}
    for spec in args.point or []:
        label, _, val = spec.partition("=")
        try:
            pts[label] = _parse_complex(val)
        except ValueError as exc:
            print(f"parse error: {exc}", file=sys.stderr)
            return 2
    req = CorrelatorRequest(curve=curve, green=mu, word=word, points=pts,
                            samples=args.samples, seed=args.seed,
                            scheme=args.scheme,
                            normalization=args.normalization)
    try:
        res = correlate(req)
    except ValueError as exc:
        print(f"precondition violation: {exc}", file=sys.stderr)
        return 3
    payload = res.as_dict()
    payload["request"] = {
        "curve": args.curve, "mu": args.mu, "word": args.word,
        "samples": args.samples, "seed": args.seed, "scheme": args.scheme,
        "normalization": args.normalization,
        "points": {k: str(v) for k, v in pts.items()},
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if res.stderr > 0.5 * abs(res.value) and abs(res.value) > 0:
        print("warning: variance has not stabilized", file=sys.stderr)
        return 4
    return 0


def _suite_algebra(args, report) -> bool:
    import random
    rnd = random.Random(7)
    letters = [point(s) for s in "abc"]
    ok = True
    for trial in range(args.trials):
        length = rnd.randint(1, 8)
        w = [rnd.choice(letters) for _ in range(length)]
        F = CyclicElement.from_word(w)
        ok &= not derivative_identity_check(F)
    report("sum_[dF/dx,x]=0", ok, f"{args.trials} random words, length <= 8")
    h, a, b = point("h"), point("a"), point("b")
    sh1 = shuffle_sum(h, [a], [b, b])
    ok2 = sum(abs(c) for c in sh1.terms.values()) <= 3
    report("shuffle_term_count", ok2, "p=1,q=2 gives 3 terms before identification")
    return ok and ok2


def _suite_trees(args, report) -> bool:
    basis = CasimirBasis.symplectic(1)
    s_letters = {point(s) for s in "xyz"}
    letters = sorted(s_letters) + [p for p, _, _ in basis.pairs]
    import random
    rnd = random.Random(11)
    ok_d2 = True
    for trial in range(args.trials):
        length = rnd.randint(2, args.max_leaves)
        w = [rnd.choice(letters) for _ in range(length)]
        v = tree_sum_map(CyclicElement.from_word(w))
        if differential(differential(v, basis), basis):
            ok_d2 = False
    report("d^2=0", ok_d2, f"tree sums of {args.trials} random words")
    ok_dd = True
    for trial in range(args.trials):
        length = rnd.randint(2, 6)
        w = CyclicElement.from_word([rnd.choice(letters) for _ in range(length)])
        if cobracket_squared(w, basis):
            ok_dd = False
    report("delta^2=0", ok_dd, "co-Jacobi on random words, length <= 6")
    ok_int = True
    for trial in range(args.trials):
        length = rnd.randint(2, 5)
        w = CyclicElement.from_word([rnd.choice(letters) for _ in range(length)])
        if differential(tree_sum_map(w), basis) != tree_sum_ext(cobracket(w, basis)):
            ok_int = False
    report("dF=Fdelta", ok_int, "intertwining on random words, length <= 5")
    return ok_d2 and ok_dd and ok_int


def _suite_derivations(args, report) -> bool:
    import random
    rnd = random.Random(13)
    spec = AlphabetSpec(genus=1, s_star=("a", "b"))
    letters = spec.letters()

    def rand_cyc(max_deg):
        deg = rnd.randint(2, max_deg)
        return CyclicElement.from_word([rnd.choice(letters) for _ in range(deg)],
                                       rnd.choice([1, -1, 2]))

    ok_x0 = all(not kappa(rand_cyc(5), spec)(spec.x0()) for _ in range(args.trials))
    report("kappa(X0)=0", ok_x0, f"{args.trials} random words")
    ok_m = all(morphism_check(rand_cyc(4), rand_cyc(4), spec)
               for _ in range(args.trials))
    report("kappa_morphism", ok_m, "bracket vs commutator on generators")
    return ok_x0 and ok_m


def _suite_forms(args, report) -> bool:
    ok = True
    for m in range(1, args.max_m + 1):
        ok &= d_omega_identity(m)
    report("d_omega_identity", ok, f"m <= {args.max_m}")
    ok_xi = True
    from .form_calculus import dC
    for m in range(1, min(args.max_m, 4) + 1):
        xi, eta = xi_eta(m)
        ok_xi &= dC(xi) == eta
        ok_xi &= all(abs(c) == 1 for c in eta.terms.values())
    report("dC_xi=eta", ok_xi, "and eta coefficients +-1")
    ok_star = True
    for n in range(1, min(args.max_m, 4) + 1):
        for alpha in range(n + 1):
            scaled = Fraction(n + 1) * omega_star(alpha, n - alpha)
            ok_star &= all(abs(c) == 1 for c in scaled.terms.values())
    report("omega_star_pm1", ok_star, "(a+b+1) omega* has +-1 coefficients")
    return ok and ok_xi and ok_star


def _suite_numeric(args, report) -> bool:
    curve = RationalCurve()
    mu = GreenSpec.delta(INFINITY)
    pts = [0.0, 1.0, 0.35 + 0.2j]
    r1 = multiple_green(curve, mu, pts, samples=args.samples, seed=5)
    r2 = multiple_green(curve, mu, [pts[0], pts[2], pts[1]],
                        samples=args.samples, seed=6)
    s = r1.value + r2.value
    tol = 3 * math.hypot(r1.stderr, r2.stderr)
    ok_sh = abs(s) < max(tol, 1e-12)
    report("shuffle_depth2", ok_sh, f"|sum|={abs(s):.2e} vs 3sigma={tol:.2e}")
    ok_dh = abs(r1.value + r2.value) < max(tol, 1e-12)  # reversal = -value
    report("dihedral_depth2", ok_dh, "reversal flips the sign at depth 2")
    return ok_sh and ok_dh


def cmd_identities(args) -> int:
    failures = []

    def report(name, ok, note=""):
        print(f"[{'PASS' if ok else 'FAIL'}] {name:24s} {note}")
        if not ok:
            failures.append(name)

    suites = {
        "algebra": _suite_algebra,
        "trees": _suite_trees,
        "derivations": _suite_derivations,
        "forms": _suite_forms,
        "numeric": _suite_numeric,
    }
    if args.suite not in suites:
        print(f"unknown suite {args.suite!r}", file=sys.stderr)
        return 2
    ok = suites[args.suite](args, report)
    return 0 if ok else 1


def cmd_reference(args) -> int:
    rows = []
    if args.table == "sv-polylog":
        for x in np.linspace(-0.8, 0.8, args.grid):
            for y in np.linspace(-0.8, 0.8, args.grid):
                z = complex(x, y)
                if abs(z) >= 1 or z in (0, 1):
                    continue
                rows.append({"re": x, "im": y,
                             "L2": single_valued_polylog(2, z)})
        header = ["re", "im", "L2"]
    elif args.table == "ek-convergence":
        curve = EllipticCurve(1j)
        a = (1 + 1j) / 2
        for radius in (25, 50, 100, 200):
            val, err = eisenstein_kronecker(curve, EKIndex(1, 1, a), radius=radius)
            rows.append({"radius": radius, "re": val.real, "im": val.imag,
                         "tail_bound": err})
        header = ["radius", "re", "im", "tail_bound"]
    elif args.table == "dilog-coproduct":
        cop = dilog_coproduct([(Fraction(1, 3), 1), (Fraction(-1, 2), 1)],
                              [(Fraction(3, 2), Fraction(3, 2), Fraction(-1, 2))])
        ok = cop.is_zero_mod_two_torsion()
        print(f"0 mod 2-torsion: {'PASS' if ok else 'FAIL'}")
        return 0 if ok else 1
    else:
        print(f"unknown table {args.table!r}", file=sys.stderr)
        return 2
    out = args.out or "-"
    fh = sys.stdout if out == "-" else open(out, "w", newline="")
    try:
        w = csv.DictWriter(fh, fieldnames=header)
        w.writeheader()
        w.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="hodgecor",
                                 description="correlator integrals on curves")
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("correlator", help="evaluate one correlator")
    c.add_argument("--curve", default="p1")
    c.add_argument("--mu", default="delta:inf")
    c.add_argument("--word", required=True)
    c.add_argument("--point", action="append",
                   help="label=value bindings for s:<label> letters")
    c.add_argument("--samples", type=int, default=1 << 18)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--scheme", choices=("mc", "qmc"), default="mc")
    c.add_argument("--normalization", choices=("raw", "2pii", "star"),
                   default="2pii")
    c.add_argument("--out")
    c.set_defaults(fn=cmd_correlator)

    i = sub.add_parser("identities", help="run an identity suite")
    i.add_argument("--suite", required=True,
                   choices=("algebra", "trees", "derivations", "forms", "numeric"))
    i.add_argument("--trials", type=int, default=12)
    i.add_argument("--max-m", dest="max_m", type=int, default=4)
    i.add_argument("--max-leaves", dest="max_leaves", type=int, default=6)
    i.add_argument("--samples", type=int, default=1 << 16)
    i.set_defaults(fn=cmd_identities)

    r = sub.add_parser("reference", help="emit reference tables")
    r.add_argument("--table", required=True,
                   choices=("sv-polylog", "ek-convergence", "dilog-coproduct"))
    r.add_argument("--grid", type=int, default=9)
    r.add_argument("--out")
    r.set_defaults(fn=cmd_reference)

    args = ap.parse_args(argv)
    threads = os.environ.get("HODGECOR_THREADS")
    if threads:
        os.environ.setdefault("OMP_NUM_THREADS", threads)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
