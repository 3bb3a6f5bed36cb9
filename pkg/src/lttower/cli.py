"""Command-line driver: every computation as a subcommand with a JSON report.

Exit codes: 0 all checks pass, 1 some check failed, 2 usage or config
error, 3 a computation exceeded its budget.  The report layout is
documented in docs/report-schema.md.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .padic import BudgetExceeded, PadicContext, is_prime

SCHEMA_VERSION = "1.0"
OUTPUT_ENV = "LTTOWER_OUTPUT_DIR"
EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    p: int = 3
    N: int = 3
    D: int | None = None
    depth: int = 4
    budget: int = 100_000
    output: str | None = None

    def validate(self):
        if not is_prime(self.p):
            raise ConfigError(f"p={self.p} is not prime")
        if self.N < 1:
            raise ConfigError("precision N must be >= 1")
        if self.D is not None and self.D < 2:
            raise ConfigError("series degree D must be >= 2")
        if self.depth < 1 or self.budget < 1:
            raise ConfigError("depth and budget must be positive")


class Checks:
    """Collects numeric claims with their check status."""

    def __init__(self):
        self.items = []

    def expect(self, name: str, value, expected=None, ok: bool | None = None):
        if ok is None:
            ok = value == expected
        item = {"name": name, "value": value, "status": "pass" if ok else "fail"}
        if expected is not None:
            item["expected"] = expected
        self.items.append(item)
        return ok

    def info(self, name: str, value):
        self.items.append({"name": name, "value": value, "status": "info"})

    @property
    def passed(self) -> bool:
        return all(c["status"] != "fail" for c in self.items)


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(report, default=_jsonable, sort_keys=True, indent=2) + "\n"


def strip_timing(obj):
    """The report without any ``timing`` field, at every depth."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != "timing"}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def write_atomic(path: str, text: str):
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".report-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- subcommands ---------------------------------------------------------------

def _parse_reduce(text: str) -> dict | None:
    """'p' -> no substitution, 'p,u' -> every u_i = 0, 'p,u=c' -> every u_i = c."""
    parts = [s.strip() for s in text.split(",") if s.strip()]
    if not parts or parts[0] != "p":
        raise ConfigError(f"--reduce must start with 'p', got {text!r}")
    if len(parts) == 1:
        return None
    if len(parts) > 2 or not parts[1].startswith("u"):
        raise ConfigError(f"cannot parse --reduce {text!r}")
    _, _, val = parts[1].partition("=")
    try:
        return {"*": int(val) if val else 0}
    except ValueError:
        raise ConfigError(f"cannot parse --reduce {text!r}") from None


def expected_height(law: str, h: int, u_value: int | None, p: int) -> int | None:
    """Closed form for the models built here: the first u_i that is a unit, else h."""
    if law == "multiplicative":
        return 1
    if h == 1:
        return 1
    if u_value is None:
        return None
    return 1 if u_value % p else h


def run_fgl(args, checks: Checks) -> dict:
    from .formalgroup import (AxiomError, compose, functional_equation_module, height,
                              hom_verify, multiplicative_module, reduce_mod_p)
    p = args.p
    ctx = PadicContext(p, args.N)
    D = args.D or p * p + p
    law = args.law or ("multiplicative" if args.h == 1 else "functional")
    if law == "multiplicative" and args.h != 1:
        raise ConfigError("the multiplicative law has height 1")
    try:
        X = multiplicative_module(ctx, D) if law == "multiplicative" else \
            functional_equation_module(ctx, args.h, D)
    except AxiomError as e:
        checks.expect("axioms", str(e), ok=False)
        return {"law": law, "D": D}
    checks.expect("axioms", X.fgl.verified, True)
    out = {"law": law, "D": D, "name": X.name, "parameters": list(getattr(X.ring, "names", ()))}
    if args.height:
        subst = _parse_reduce(args.reduce)
        names = getattr(X.ring, "names", ())
        u_values = {n: subst["*"] for n in names} if subst else None
        Y = reduce_mod_p(X, u_values)
        rep = height(Y)
        u_val = subst["*"] if subst else (None if names else 0)
        want = expected_height(law, args.h, u_val, p)
        out["height"] = {"h": rep.h, "note": rep.note, "at_least": rep.at_least,
                         "reduction": args.reduce}
        if want is None:
            checks.info("height", rep.h)
        else:
            checks.expect("height", rep.h, want)
    bound = args.hom_bound
    comp_ok = add_ok = True
    for a in range(1, bound + 1):
        for b in range(1, bound + 1):
            comp_ok &= compose(X.bracket(a), X.bracket(b)) == X.bracket(a * b)
            add_ok &= X.add(X.bracket(a), X.bracket(b)) == X.bracket(a + b)
    checks.expect(f"[a][b]=[ab] for a,b<={bound}", comp_ok, True)
    checks.expect(f"[a]+[b]=[a+b] for a,b<={bound}", add_ok, True)
    endo = {a: hom_verify(X.bracket(a), X, X) for a in (-1, 2, p)}
    checks.expect("[a] are endomorphisms", all(endo.values()), True)
    out["bracket_p_lowest_degree"] = X.bracket(p).lowest_degree()
    return out


def run_tower(args, checks: Checks) -> dict:
    from .towers import build_tower, differential_annihilator, frobenius_report, sdr_certify
    p, top = args.p, args.levels
    if top < 2:
        raise ConfigError("--levels must be >= 2")
    tower = build_tower(PadicContext(p, args.N), top, budget=args.budget)
    everything = not (args.sdr or args.differentials or args.frobenius)
    out = {"levels": top, "degrees": [tower[n].degree for n in range(top + 1)]}
    reports = None
    if everything or args.differentials or args.sdr:
        reports = [differential_annihilator(tower, n) for n in range(2, top + 1)]
        out["differentials"] = [{"n": r.n, "degree": r.degree, "ann_val": r.ann_val, "cyclic": r.cyclic}
                                for r in reports]
        for r in reports:
            checks.expect(f"level {r.n} layer degree", r.degree, p)
            checks.expect(f"level {r.n} annihilator valuation", r.ann_val, Fraction(1))
            checks.expect(f"level {r.n} differential routes agree", r.ok, True)
    if everything or args.sdr:
        cert = sdr_certify(tower, n0=1, reports=reports)
        out["sdr"] = {"valid": cert.valid, "xi_val": cert.xi_val, "records": len(cert.records)}
        checks.expect("sdr certificate valid", cert.valid, True)
    if everything or args.frobenius:
        rows = []
        for n in range(1, top):
            r = frobenius_report(tower, n)
            rows.append({"n": n, "congruence": r.uniformizer_congruence, "onto": r.onto,
                         "rank": r.rank, "target_dim": r.target_dim})
            checks.expect(f"pi_{n + 1}^p = pi_{n} mod p", r.uniformizer_congruence, True)
            checks.expect(f"frobenius O_{n + 1}/p -> O_{n}/p onto", r.onto, True)
        out["frobenius"] = rows
    return out


def run_normfield(args, checks: Checks) -> dict:
    from .normfield import (AXIOMS, constant_element, frobenius_to_norm, nf_add, nf_val,
                            norm_to_frobenius, random_element, ring_axioms, uniformizer)
    from .towers import build_tower
    rng = random.Random(args.seed)
    tower = build_tower(PadicContext(args.p, args.N), args.top, budget=args.budget)
    start = args.start
    counts = dict.fromkeys(AXIOMS, 0)
    for _ in range(args.samples):
        x, y, z = (random_element(tower, rng, start) for _ in range(3))
        for k, v in ring_axioms(x, y, z).items():
            counts[k] += v
    for k in AXIOMS:
        checks.expect(f"{k} ({args.samples} triples)", counts[k], args.samples)
    unit = constant_element(tower, 1, start, args.top)
    two = nf_add(unit, unit)
    minus = [int(c.z[0]) for c in two.components]
    teich = [tower.const(n, -1) == two.component(n) for n in range(two.start, two.top + 1)]
    checks.expect("1+1 = -1 at every level", all(teich) and len(teich) > 0, True)
    P = uniformizer(tower, start=start)
    checks.expect("uniformizer valuation", nf_val(P), 1)
    indep = back = 0
    for _ in range(args.lifts):
        x = random_element(tower, rng, start)
        f = norm_to_frobenius(x)
        a = frobenius_to_norm(f, rng=random.Random(rng.randrange(2 ** 31)))
        b = frobenius_to_norm(f, rng=random.Random(rng.randrange(2 ** 31)))
        indep += a.same_as(b)
        back += a.same_as(x)
    checks.expect("lift independence", indep, args.lifts)
    checks.expect("frobenius_to_norm inverts norm_to_frobenius", back, args.lifts)
    return {"top": args.top, "start": start, "one_plus_one_constant_terms": minus,
            "one_plus_one_stabilization": two.stabilization, "axiom_counts": counts}


def run_galois(args, checks: Checks) -> dict:
    from .galoisgroups import (CLOSED_FORMS, KINDS, build_group, degree_ladder,
                               ladder_consistent, mirabolic_decomposition, verify_semidirect)
    h, n, p = args.h, args.n, args.p
    kinds = [args.kind] if args.kind else [k for k in KINDS if k != "congruence_kernel" or n >= 2]
    orders = {}
    for kind in kinds:
        G = build_group(kind, h, n, p, budget=args.budget, seed=args.seed)
        orders[kind] = G.order
        checks.expect(f"|{kind}(h={h},n={n},p={p})|", G.order, CLOSED_FORMS[kind](h, n, p))
        if kind == "mirabolic":
            checks.expect("mirabolic is unipotent x| units",
                          verify_semidirect(G, mirabolic_decomposition(G)), True)
    out = {"h": h, "n": n, "p": p, "orders": orders}
    if args.ladder:
        rows = degree_ladder(h, n, p, budget=args.budget)
        out["ladder"] = [{"n": r.n, "layer_degree": r.layer_degree, "inertia": r.inertia_order,
                          "residue_step": r.residue_step, "enumerated": r.enumerated} for r in rows]
        checks.expect("ladder matches closed forms", ladder_consistent(rows), True)
    return out


def _h_summary(H) -> dict:
    return {"order": H.group_order, "invariant_factors": H.invariant_factors, "describe": H.describe()}


def run_cohomology(args, checks: Checks) -> dict:
    from . import cohomology as co
    p, n = args.p, args.n
    modes = [m for m in ("borel", "unit", "semidirect", "kummer", "cyclic", "infres")
             if getattr(args, m)] or ["borel"]
    out = {}
    if "borel" in modes:
        r = co.borel_h1(p, n, with_inflation_restriction=args.with_infres)
        out["borel"] = {"h1": _h_summary(r.h1), "fixed_points": len(r.fixed_points),
                        "via_inflation_restriction": r.via_inflation_restriction}
        checks.expect("|H1(borel, mu)|", r.h1.group_order, r.closed_form_order)
        checks.expect("H1(borel, mu) trivial", r.h1.is_trivial, p > 3)
        checks.expect("borel report consistent", r.ok, True)
    if "unit" in modes:
        r = co.unit_action_h1(p, n)
        out["unit"] = {"h1": _h_summary(r.h1)}
        checks.expect("H1(units, mu) trivial", r.h1.is_trivial, True)
        checks.expect("unit report consistent", r.ok, True)
    if "semidirect" in modes:
        r = co.semidirect_h1(p ** n)
        out["semidirect"] = {"h1_G": _h_summary(r.h1_G), "h1_U": _h_summary(r.h1_U)}
        checks.expect("|H1(E x| U, mu)|", r.h1_G.group_order, p ** n)
        checks.expect("semidirect report consistent", r.ok, True)
    if "kummer" in modes:
        r = co.kummer_cocycle_check(p ** n)
        out["kummer"] = {"k": r.k}
        checks.expect("kummer cocycle map injective", r.ok, True)
    if "cyclic" in modes:
        rng = random.Random(args.seed)
        rows = []
        for _ in range(args.instances):
            M = co.random_cyclic_instance(rng)
            r = co.cyclic_h1(M)
            rows.append({"d": r.d, "moduli": list(M.moduli), "quotient": r.quotient_order,
                         "h1": r.h1.group_order})
            checks.expect(f"cyclic d={r.d} moduli={list(M.moduli)}", r.quotient_order, r.h1.group_order,
                          ok=r.ok and r.quotient_order == r.h1.group_order)
        out["cyclic"] = rows
    if "infres" in modes:
        rng = random.Random(args.seed)
        rows = []
        for _ in range(args.instances):
            name, G, H, M = co.random_instance(rng)
            r = co.inflation_restriction(M, H)
            rows.append({"group": name, **r.summary()})
            checks.expect(f"inflation-restriction on {name}, |H|={len(H)}", r.ok, True)
        out["infres"] = rows
    return out


def _etale_examples(win):
    """Diagonal (phi)-modules with their classification by hand."""
    from .phigamma import constant, from_coeffs, one, pi_eps
    p = win.p
    return [
        ("1", [one(win)], True),
        ("pi", [pi_eps(win)], True),
        ("p", [constant(win, p)], False),
        ("1+pi", [one(win) + pi_eps(win)], True),
        ("(1, p pi)", [one(win), constant(win, p) * pi_eps(win)], False),
        ("(pi, 1+p)", [pi_eps(win), constant(win, 1 + p)], True),
    ]


def run_phigamma(args, checks: Checks) -> dict:
    from .phigamma import (OEWindow, diagonal_module, etale_check, frobenius_lift_ok, phi_fixed,
                           phi_gamma_commute, random_element)
    win = OEWindow(PadicContext(args.p, args.N), args.low, args.high)
    everything = not (args.commute or args.fixed or args.etale)
    rng = random.Random(args.seed)
    out = {"window": [win.L, win.D]}
    if everything or args.commute:
        try:
            units = [int(a) for a in args.a.split(",")]
        except ValueError:
            raise ConfigError(f"cannot parse --a {args.a!r}") from None
        rows = []
        for a in units:
            if a % args.p == 0:
                raise ConfigError(f"gamma_a needs a unit, got {a}")
            r = phi_gamma_commute(a, win, rng=rng, n_random=args.random)
            rows.append({"a": a, "approximant": r.certificate.a, "k": r.certificate.k,
                         "agree": r.agree, "checked": r.checked})
            checks.expect(f"phi gamma_{a} = gamma_{a} phi", r.agree, r.checked)
        lift = all(frobenius_lift_ok(random_element(win, rng)) for _ in range(args.random))
        checks.expect("phi lifts x -> x^p", lift, True)
        out["commute"] = rows
    if everything or args.fixed:
        r = phi_fixed(win)
        out["fixed"] = {"count": r.count, "oracle_count": r.oracle_count, "all_constant": r.all_constant}
        checks.expect("|(O_E)^{phi=1}|", r.count, args.p ** args.N)
        checks.expect("phi-fixed points are constants", r.all_constant, True)
        checks.expect("phi-fixed count matches kernel oracle", r.oracle_count, r.count)
    if everything or args.etale:
        rows = []
        for name, entries, want in _etale_examples(win):
            got = etale_check(diagonal_module(entries))
            rows.append({"module": name, "etale": got})
            checks.expect(f"etale {name}", got, want)
        out["etale"] = rows
    return out


SUITE = [
    ["fgl", "-p", "3", "--height", "--reduce", "p"],
    ["fgl", "-p", "3", "--h", "2", "--height", "--reduce", "p,u"],
    ["tower", "--sdr", "-p", "3", "--levels", "4"],
    ["tower", "-p", "5", "--levels", "3"],
    ["normfield", "--samples", "5", "--lifts", "3"],
    ["galois", "--h", "2", "-n", "1", "-p", "3", "--ladder"],
    ["cohomology", "--borel", "-p", "5", "-n", "1"],
    ["cohomology", "--unit", "--semidirect", "--kummer", "-p", "3", "-n", "1"],
    ["cohomology", "--cyclic", "--instances", "5"],
    ["cohomology", "--infres", "--instances", "3"],
    ["phigamma", "--a", "2,4", "--random", "3"],
]


def run_suite(args, checks: Checks) -> dict:
    parser = build_parser()
    reports = []
    for argv in SUITE:
        sub = parser.parse_args(argv + ["--seed", str(args.seed)])
        rep, code = execute(sub)
        reports.append(rep)
        checks.expect(" ".join(argv), rep["status"], "pass", ok=code == EXIT_PASS)
    return {"reports": reports}


# -- parser and driver -------------------------------------------------------

def _common(sp, p=3, N=3):
    sp.add_argument("-p", type=int, default=p, help="the prime")
    sp.add_argument("-N", type=int, default=N, help="p-adic precision")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=100_000)
    sp.add_argument("-o", "--output", help="write the report here (default: $%s/<command>.json)" % OUTPUT_ENV)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lttower", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fgl", help="formal group laws: build, verify, height")
    _common(sp)
    sp.add_argument("-D", type=int, help="series degree bound (default p^2+p)")
    sp.add_argument("--h", type=int, default=1, help="height of the functional-equation model")
    sp.add_argument("--law", choices=("multiplicative", "functional"))
    sp.add_argument("--height", action="store_true")
    sp.add_argument("--reduce", default="p,u", help="'p', 'p,u' (u_i -> 0) or 'p,u=c'")
    sp.add_argument("--hom-bound", type=int, default=4)
    sp.set_defaults(func=run_fgl)

    sp = sub.add_parser("tower", help="cyclotomic tower: differentials, certificate, frobenius")
    _common(sp, N=4)
    sp.add_argument("--levels", type=int, default=4)
    sp.add_argument("--sdr", action="store_true")
    sp.add_argument("--differentials", action="store_true")
    sp.add_argument("--frobenius", action="store_true")
    sp.set_defaults(func=run_tower)

    sp = sub.add_parser("normfield", help="field of norms: axioms, uniformizer, lifts")
    _common(sp)
    sp.add_argument("--top", type=int, default=7)
    sp.add_argument("--start", type=int, default=1)
    sp.add_argument("--samples", type=int, default=10)
    sp.add_argument("--lifts", type=int, default=5)
    sp.set_defaults(func=run_normfield)

    sp = sub.add_parser("galois", help="matrix group models and the degree ladder")
    _common(sp)
    sp.add_argument("--h", type=int, default=2)
    sp.add_argument("-n", type=int, default=1)
    sp.add_argument("--kind")
    sp.add_argument("--ladder", action="store_true")
    sp.set_defaults(func=run_galois)

    sp = sub.add_parser("cohomology", help="group cohomology closed forms and exactness")
    _common(sp)
    sp.add_argument("-n", type=int, default=1)
    for m in ("borel", "unit", "semidirect", "kummer", "cyclic", "infres"):
        sp.add_argument(f"--{m}", action="store_true")
    sp.add_argument("--with-infres", action="store_true", help="also compute borel H1 by inflation-restriction")
    sp.add_argument("--instances", type=int, default=10)
    sp.set_defaults(func=run_cohomology)

    sp = sub.add_parser("phigamma", help="(phi, Gamma) on O_E mod p^N")
    _common(sp)
    sp.add_argument("--low", type=int, default=-5)
    sp.add_argument("--high", type=int, default=12)
    sp.add_argument("--a", default="2,4", help="comma-separated units")
    sp.add_argument("--random", type=int, default=5)
    sp.add_argument("--commute", action="store_true")
    sp.add_argument("--fixed", action="store_true")
    sp.add_argument("--etale", action="store_true")
    sp.set_defaults(func=run_phigamma)

    sp = sub.add_parser("suite", help="run a fixed set of reports")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=run_suite)
    return ap


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output")}


def execute(args) -> tuple[dict, int]:
    """Run one parsed command; returns (report, exit code)."""
    checks = Checks()
    report = {"schema_version": SCHEMA_VERSION, "command": args.command, "config": _config(args)}
    t0 = time.perf_counter()
    try:
        if args.command != "suite":
            RunConfig(args.p, args.N, getattr(args, "D", None), getattr(args, "levels", 4),
                      args.budget).validate()
        report["result"] = args.func(args, checks)
        code = EXIT_PASS if checks.passed else EXIT_FAIL
        report["status"] = "pass" if code == EXIT_PASS else "fail"
    except BudgetExceeded as e:
        code = EXIT_BUDGET
        report.update(status="error", error={"type": "BudgetExceeded", "message": str(e)})
    except (ConfigError, ValueError) as e:
        code = EXIT_USAGE
        report.update(status="error", error={"type": type(e).__name__, "message": str(e)})
    report["checks"] = checks.items
    report["timing"] = {"seconds": round(time.perf_counter() - t0, 3)}
    return report, code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report, code = execute(args)
    text = dumps(report)
    path = args.output
    if path is None and os.environ.get(OUTPUT_ENV):
        path = os.path.join(os.environ[OUTPUT_ENV], f"{args.command}.json")
    if path:
        write_atomic(path, text)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
