"""Acceptance suite: one line per criterion, printed at the end of the pytest run
(and when the file is run as a script)."""

from __future__ import annotations

import math
import time
from functools import cache

import numpy as np

from syzlab.algebra import RightFactorSolver, express_in_minimal_generators, row_times
from syzlab.ext import (check_associativity, check_lift_independence, check_low_degree_products,
                        check_structure_constants, verify_even_commutativity, verify_finite_generation)
from syzlab.families import a5, family_algebra, qci
from syzlab.resolution import Resolution, compare_with_oracle, verify_complex, verify_exactness
from syzlab.rewrite import check_associativity as table_associativity
from syzlab.seeds import a5_binomial_check, check_assumption_2_1, check_identity_blocks, preset_expectations, seed_for

QCI_FIELDS = [("F2", [1]), ("F3", [1, 2]), ("F5", [1, 2]), ("Q", [1, 2, -1])]
QCI_PRESETS = [(n, m, q, fld) for n, m in [(2, 2), (2, 3), (3, 3)] for fld, qs in QCI_FIELDS for q in qs]
A5_PRESETS = [(3, 1), (3, 2), (5, 1), (5, 2)]

LINES: dict = {}


def _config(key):
    if key[0] == "qci":
        _, n, m, q, fld = key
        return qci(n, m, q, fld)
    return a5(key[1], key[2])


ALL = [("qci",) + p for p in QCI_PRESETS] + [("a5",) + p for p in A5_PRESETS]


def _label(key) -> str:
    return _config(key).label


def max_degree(key) -> int:
    return 12 if key[:4] == ("qci", 2, 2, 1) else 8


@cache
def built(key):
    cfg = _config(key)
    family_algebra.cache_clear()
    t = time.perf_counter()
    alg = family_algebra(cfg)
    return cfg, alg, time.perf_counter() - t


@cache
def seeded(key):
    cfg, alg, _ = built(key)
    t = time.perf_counter()
    seed = seed_for(cfg, alg)
    reports = (check_assumption_2_1(alg, seed), check_identity_blocks(alg, seed), preset_expectations(cfg, seed))
    return seed, reports, time.perf_counter() - t


@cache
def resolved(key):
    seed = seeded(key)[0]
    t = time.perf_counter()
    res = Resolution.build(seed, max_degree(key))
    reps = (verify_complex(res), verify_exactness(res))
    return res, reps, time.perf_counter() - t


def record(number: int, ok: bool, detail: str) -> None:
    LINES[number] = f"CRITERION {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(LINES[number])


def test_criterion_1_algebra_construction():
    problems = []
    for key in ALL:
        cfg, alg, secs = built(key)
        expected = key[1] * key[2] if key[0] == "qci" else key[1] ** 3
        if alg.dim != expected:
            problems.append(f"{_label(key)}: dim {alg.dim} != {expected}")
        if alg.dim**3 > 10**7 or table_associativity(alg, samples=0):
            problems.append(f"{_label(key)}: associativity not verified on all triples")
        if secs >= 10:
            problems.append(f"{_label(key)}: build took {secs:.1f}s")
    slowest = max(built(k)[2] for k in ALL)
    record(1, not problems, f"{len(ALL)} algebras, dims n*m / p^3, all triples associative, "
           f"slowest build {slowest:.2f}s" + ("; " + "; ".join(problems) if problems else ""))
    assert not problems


def test_criterion_2_seed_verification():
    problems, literal_failures = [], []
    for key in ALL:
        seed, (rel, ident, closed), secs = seeded(key)
        for rep in (rel, ident):
            problems += [f"{_label(key)}: {c.name}" for c in rep.failures]
        # the literal sign form sigma.rho_34 = (-c) omega is counted among the identities
        literal = [c for c in ident.checks if c.informational and c.name.startswith("[3']") and c.expected != c.computed]
        literal_failures += [f"{_label(key)}: {c.name}" for c in literal]
        if key[0] == "a5":
            problems += [f"{_label(key)}: {c.name}" for c in closed.failures]
            if key[1] == 5 and secs >= 30:
                problems.append(f"{_label(key)}: seeds took {secs:.1f}s")
    ok = not problems and not literal_failures
    detail = (f"{len(ALL)} presets; clause/identity failures: {len(problems)}; "
              f"literal (-c)omega form fails on {len(literal_failures)} presets where c^2 != 1 "
              "(scalar taken from the combined equation so that d_4 d_3 = 0)")
    record(2, ok, detail + ("; " + "; ".join(problems[:5]) if problems else ""))
    assert not problems, problems
    assert not literal_failures, literal_failures


def test_criterion_3_resolution():
    problems = []
    for key in ALL:
        res, (cx, ex), secs = resolved(key)
        problems += [f"{_label(key)}: {c.name}" for c in cx.failures + ex.failures]
        if secs >= 60:
            problems.append(f"{_label(key)}: {secs:.1f}s")
    a5dims = [int(v) for v in resolved(("a5", 3, 1))[1][1].data["image_dims"].values()]
    ok = not problems and a5dims == [26, 28, 53, 55, 80, 82, 107, 109]
    record(3, ok, f"{len(ALL)} presets, d_(r+1) d_r = 0 and dims tN+-1; A5(3,1) dims {a5dims}"
           + ("; " + "; ".join(problems[:5]) if problems else ""))
    assert ok, problems


def test_criterion_4_oracle():
    keys = [("qci", 2, 2, 1, "F2"), ("qci", 2, 3, 1, "F3"), ("a5", 3, 1)]
    problems = []
    for key in keys:
        res = resolved(key)[0]
        for r in range(1, 7):
            rep = compare_with_oracle(res, r)
            if not rep.passed:
                problems.append(f"{_label(key)} r={r}")
    record(4, not problems, "QCI(2,2,1), QCI(2,3,1), A5(3,1) r<=6 equal to brute-force syzygy"
           + ("; " + "; ".join(problems) if problems else ""))
    assert not problems


def test_criterion_5_ext_structure_constants():
    problems, c_claims = [], []
    for key in ALL:
        res = resolved(key)[0]
        rep = check_structure_constants(res, 8)
        problems += [f"{_label(key)}: {c.name}" for c in rep.failures]
        cfg = _config(key)
        f = res.alg.field
        if key[0] == "qci":
            n, m, q = key[1], key[2], f(key[3])
            claimed = f.pow(q, n * m)
            if res.seed.c != claimed:
                # the c^s factor with the stated value of c
                lit = check_structure_constants(res, 8, c=claimed)
                c_claims.append(f"{_label(key)}: c = {f.format(res.seed.c)} (q^-nm), stated q^nm = "
                                f"{f.format(claimed)}; {len(lit.failures)} constants differ under the stated c")
        else:
            if res.seed.c != 1:
                problems.append(f"{_label(key)}: c = {res.seed.c}")
    # degree-one products, including phi_1^1 phi_1^1 at n = 2 and n = 3
    for key in ALL:
        if key[0] == "qci":
            rep = check_low_degree_products(resolved(key)[0], key[1], key[2], key[3])
            problems += [f"{_label(key)}: {c.name}" for c in rep.failures]
    ok = not problems and not c_claims
    record(5, ok, f"structure constants with the resolution's c: {'all reproduced' if not problems else problems[:3]}; "
           f"stated c = q^nm disagrees on {len(c_claims)} QCI presets (c = q^-nm there)"
           + ("; e.g. " + c_claims[0] if c_claims else ""))
    assert not problems, problems
    assert not c_claims, c_claims


def test_criterion_6_finite_generation():
    problems = []
    for key in ALL:
        rep = verify_finite_generation(resolved(key)[0], 8)
        if not rep.passed:
            problems.append(_label(key))
    record(6, not problems, f"H^(2t) x H^1 and H^(2t) x H^2 onto up to degree 8 on {len(ALL)} presets"
           + ("; " + "; ".join(problems) if problems else ""))
    assert not problems


def test_criterion_7_a5_commutativity():
    problems = []
    for key in [("a5", 3, 1), ("a5", 3, 2), ("a5", 5, 1)]:
        rep = verify_even_commutativity(resolved(key)[0], 4)
        problems += [f"{_label(key)}: {c.name}" for c in rep.failures]
    record(7, not problems, "3x3 degree-2 grid symmetric, phi_2^2 phi_1^2 = phi_2^4, phi_2^2 phi_3^2 = phi_4^4"
           + ("; " + "; ".join(problems) if problems else ""))
    assert not problems


def test_criterion_8_binomial():
    bad = [p for p in (3, 5, 7, 11) if not a5_binomial_check(p).passed]
    # independent integer recomputation
    for p in (3, 5, 7, 11):
        for r in range(p - 1):
            c = -math.factorial(r) * math.comb(p - 2, r) * math.comb(p - 1, r) \
                + math.factorial(r + 1) * math.comb(p - 1, r + 1) ** 2
            if c % p:
                bad.append((p, r))
    record(8, not bad, "c_r = 0 mod p for 0 <= r <= p-2, p in {3,5,7,11}")
    assert not bad


def _solution_independence(res, trials, rng) -> int:
    alg, f = res.alg, res.alg.field
    bad = 0
    for _ in range(trials):
        r = int(rng.integers(1, res.max_degree + 1))
        d = res.d(r)
        u = f.random_array((r + 1, alg.dim), rng)
        t = row_times(alg, u, d)
        residues = express_in_minimal_generators(alg, d, t)
        solver = RightFactorSolver(alg, d)
        sol = solver.solve(t)
        kern = solver.kernel_basis()
        if len(kern):
            coeffs = f.random_array((len(kern),), rng)
            sol = f.reduce(sol + np.tensordot(coeffs, kern, axes=1))
        if not (np.all(row_times(alg, sol, d) == t) and np.all(sol[:, 0] == residues) and np.all(u[:, 0] == residues)):
            bad += 1
    return bad


def test_criterion_9_property_suites():
    problems = []
    for key in ALL:
        res = resolved(key)[0]
        li = check_lift_independence(res, 100, seed=1, max_degree=8)
        asc = check_associativity(res, 100, seed=2, max_degree=8)
        bad = _solution_independence(res, 100, np.random.default_rng(3))
        if not li.passed:
            problems.append(f"{_label(key)}: lift independence")
        if not asc.passed:
            problems.append(f"{_label(key)}: associativity")
        if bad:
            problems.append(f"{_label(key)}: {bad} solution-dependent residues")
    record(9, not problems, f"{len(ALL)} presets x (100 perturbed lifts, 100 associativity triples, "
           "100 kernel perturbations)" + ("; " + "; ".join(problems) if problems else ""))
    assert not problems


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                pass
