"""Acceptance gate: eight criteria, each printing one PASS/FAIL line."""
from __future__ import annotations

import random
import time
from functools import lru_cache
from fractions import Fraction as Fr

import pytest
import sympy

from corpus import COEFFS, branch_field_pairs, random_branch, random_field
from planebranch.blowup import contact_from_path, noether_intersection, shared_path
from planebranch.embedding import OBSTRUCTED, completeness_obstruction, stabilizer_jet2
from planebranch.errors import CrossCheckError
from planebranch.moduli import (
    AffinityError, contact_exponent_deformation, lambda_invariant, moduli_equivalent, normal_form,
)
from planebranch.puiseux import (
    PuiseuxParam, branch_equal, characteristic_exponents, euclid_multiplicities,
    evaluate_on, gap_conductor, implicitize, mult_sequence, semigroup,
)
from planebranch.scalars import NotRepresentable, field
from planebranch.series import BiPoly
from planebranch.vfield import (
    JetDiffeo, OneForm, VectorField, apply_diffeo, contact_exponent, is_nilpotent,
    iterated_tangency, jet_exp, jet_log, tangency_order, upsilon,
)

P = PuiseuxParam.from_terms
G0 = P(6, {7: 1, 10: 1, 11: 1}, trunc=40)
CUSP = P(2, {3: 1}, trunc=12)


@pytest.fixture
def report(capsys):
    def emit(k: int, title: str, ok: bool, elapsed: float, limit: float | None, detail: str):
        within = limit is None or elapsed < limit
        verdict = "PASS" if ok and within else "FAIL"
        budget = f" < {limit:g} s" if limit is not None else ""
        with capsys.disabled():
            print(f"\n[criterion {k}] {verdict}: {title} | tolerance exact | "
                  f"{elapsed:.2f} s{budget} | {detail}")
        assert ok, detail
        assert within, f"took {elapsed:.2f} s, budget {limit} s"
    return emit


def test_criterion_1_tangency_and_noether(report):
    t0 = time.perf_counter()
    X = VectorField(BiPoly(), BiPoly({(1, 0): 1}))
    tang = tangency_order(X, CUSP)
    its = iterated_tangency(X, CUSP, 3)
    second = its[1]
    noether = noether_intersection(shared_path(X, CUSP))
    elapsed = time.perf_counter() - t0
    ok = tang == 5 and second == 4 and noether == 4
    report(1, "tang(x d/dy, y^2-x^3) = 5, (X^2 f, f) = 4, Noether sum = 4", ok, elapsed, 1,
           f"tang={tang} iterated={second} noether={noether}")


G0_ROWS = [
    [7, 0, 0, 0, -6, 0], [0, 7, 0, 0, 0, -6], [0, 0, 7, 0, 0, 0],
    [10, 0, 0, 0, -6, 0], [11, 17, 0, 0, -6, -12], [0, 0, 0, 1, 0, 0],
]


def test_criterion_2_upsilon_table_and_stabilizer(report):
    t0 = time.perf_counter()
    mons = [(2, 0), (1, 1), (0, 2)]
    table = [upsilon(OneForm(BiPoly({m: 1}), BiPoly()), G0) for m in mons]
    table += [upsilon(OneForm(BiPoly(), BiPoly({m: 1})), G0) for m in mons]
    s = stabilizer_jet2(G0)
    ours = sympy.Matrix([[sympy.Rational(int(c.numerator), int(c.denominator)) for c in r]
                         for r in s.rows])
    ref = sympy.Matrix(G0_ROWS)
    same_space = ours.rank() == ref.rank() == ours.col_join(ref).rank()
    elapsed = time.perf_counter() - t0
    ok = table == [18, 19, 20, 19, 20, 21] and s.dimension == 0 and same_space
    report(2, "upsilon table on G0 and 2-jet stabilizer row space", ok, elapsed, 1,
           f"table={table} dim={s.dimension} row_space_equal={same_space}")


def test_criterion_3_lambda_and_reflected_image(report):
    t0 = time.perf_counter()
    omega = OneForm(BiPoly({(0, 1): 7}), BiPoly({(1, 0): -6}))
    lam = upsilon(omega, G0) - 6
    psi = JetDiffeo(BiPoly({(1, 0): 1, (2, 0): 1, (0, 2): 1}), BiPoly({(0, 1): -1}))
    image = apply_diffeo(psi, G0)
    target = P(6, {7: 1, 10: -1, 11: 1}, trunc=12)
    xi = branch_equal(image.truncate(12), target)
    elapsed = time.perf_counter() - t0
    ok = lam == 10 and lambda_invariant(G0) == 10 and xi == -1
    report(3, "lambda(G0) = 10; image under (x+x^2+y^2, -y) is t^7 - t^10 + t^11 after t -> -t",
           ok, elapsed, 1, f"lambda={lam} xi={xi}")


PAIRS_SEED, PAIRS_COUNT = 2024, 200


@lru_cache(maxsize=1)
def corpus_pairs():
    return branch_field_pairs(PAIRS_SEED, PAIRS_COUNT, 6)


def test_criterion_4_triple_agreement(report):
    t0 = time.perf_counter()
    bad = []
    pairs = corpus_pairs()
    for phi, X, ce in pairs:
        pc = contact_from_path(shared_path(X, phi))
        cd = contact_exponent_deformation(phi, X)
        tang = tangency_order(X, phi)
        c = semigroup(phi).conductor
        if not (pc == ce == cd and tang == ce + phi.n + c - 1):
            bad.append((phi, X, ce, pc, cd, tang))
    elapsed = time.perf_counter() - t0
    report(4, "path = upsilon - n = deformation contact, tang = contact + n + c - 1",
           not bad and len(pairs) >= 200, elapsed, 60,
           f"{len(pairs)} pairs, {len(bad)} mismatches")


def test_criterion_5_oracle_equivalence(report):
    t0 = time.perf_counter()
    pairs = corpus_pairs()
    seen, bad = set(), []
    for phi, _, _ in pairs:
        key = (phi.n, tuple(sorted(phi.y.terms.items())))
        if key in seen:
            continue
        seen.add(key)
        sg = semigroup(phi)
        if sg.conductor != gap_conductor(sg.generators):
            bad.append(("conductor", phi))
        seq = mult_sequence(phi, 8, check=False)
        if seq != euclid_multiplicities(characteristic_exponents(phi), 8):
            bad.append(("multiplicities", phi))
        if evaluate_on(implicitize(phi), phi).terms:
            bad.append(("implicit", phi))
    elapsed = time.perf_counter() - t0
    report(5, "conductor vs gap enumeration, blow-up vs Euclid multiplicities, f(phi) = 0",
           not bad, elapsed, None, f"{len(seen)} distinct branches, {len(bad)} failures")


def _unipotent_jet(rng: random.Random) -> JetDiffeo:
    a, b = rng.choice(COEFFS), rng.choice(COEFFS)
    if rng.random() < .5:
        a = 0
    else:
        b = 0
    def quad():
        return {k: rng.choice(COEFFS) for k in [(2, 0), (1, 1), (0, 2)] if rng.random() < .5}
    return JetDiffeo(BiPoly({(1, 0): 1, (0, 1): a, **quad()}),
                     BiPoly({(0, 1): 1, (1, 0): b, **quad()}))


def test_criterion_6_normal_form_suite(report):
    t0 = time.perf_counter()
    rng = random.Random(6)
    bases, problems, steps = [], [], 0
    while len(bases) < 60:
        phi = random_branch(rng, 6)
        try:
            r = normal_form(phi)
        except NotRepresentable:
            continue
        except (AffinityError, CrossCheckError) as exc:
            problems.append(repr(exc))
            continue
        if r.lam is not None and 12 % (r.lam - r.m) and 2 % (r.lam - r.m):
            continue
        # each recorded step keeps every exponent below its own j
        cur = r.prepared
        for st in r.steps:
            if not st.s0:
                continue
            nxt = apply_diffeo(jet_exp(st.witness.scale(st.s0), st.N), cur).truncate(cur.trunc)
            if not nxt.y.agrees(cur.y, upto=st.j) or nxt.y.coeff(st.j):
                problems.append(f"step {st.j} moved lower terms of {phi}")
            cur = nxt
            steps += 1
        again = normal_form(r.output)
        if again.output != r.output or [s for s in again.steps if s.s0]:
            problems.append(f"not idempotent on {phi}")
        bases.append(r)
    perturbed = 0
    for r in bases[:50]:
        psi = apply_diffeo(_unipotent_jet(rng), r.output)
        if not moduli_equivalent(r, normal_form(psi)):
            problems.append(f"perturbation of {r.output} not equivalent")
        perturbed += 1
    elapsed = time.perf_counter() - t0
    report(6, "normal form idempotent, steps keep lower terms, affinity holds, "
              "unipotent perturbations equivalent", not problems and perturbed == 50,
           elapsed, 120,
           f"{len(bases)} branches, {steps} flow steps, {perturbed} perturbations, "
           f"{len(problems)} problems")


def test_criterion_7_non_completeness_certificates(report):
    t0 = time.perf_counter()
    F = field(12)
    z3 = F.zeta(4)
    jets = {
        "(x+x^2+y^2, -y)": JetDiffeo(BiPoly({(1, 0): 1, (2, 0): 1, (0, 2): 1}),
                                     BiPoly({(0, 1): -1}), 2),
        "(z3 x+y^2, z3^2 y+x^2)": JetDiffeo(BiPoly({(1, 0): z3, (0, 2): 1}),
                                           BiPoly({(0, 1): z3 * z3, (2, 0): 1}), 2),
    }
    details, ok = [], True
    for name, Phi in jets.items():
        cert = completeness_obstruction(G0, Phi)
        d = cert.to_dict()
        rows = d["resonance"]["system"]["rows"]
        good = (cert.certified and d["resonance"]["verdict"] == OBSTRUCTED and rows
                and d["stabilizer_jet2"]["equations"] and d["witness"] is not None)
        ok = ok and bool(good)
        details.append(f"{name}: rows={rows}")
    elapsed = time.perf_counter() - t0
    report(7, "non-completeness certificates of G0 for both 2-jets", ok, elapsed, 1,
           "; ".join(details))


def test_criterion_8_exp_log_round_trip(report):
    t0 = time.perf_counter()
    rng = random.Random(8)
    N, bad = 8, 0
    for _ in range(100):
        X = random_field(rng, 8, nilpotent=True)
        assert is_nilpotent(X)
        if jet_log(jet_exp(X, N)) != X.truncate(N + 1):
            bad += 1
    elapsed = time.perf_counter() - t0
    report(8, "jet_log(jet_exp(X)) = X at jet order 8", bad == 0, elapsed, None,
           f"100 nilpotent fields, {bad} failures")


def test_rotations_used_by_certificates_are_exact():
    F = field(12)
    assert F.rotation(F.zeta(4)) == Fr(1, 3) and F.rotation(-1) == Fr(1, 2)
    assert contact_exponent(VectorField(BiPoly(), BiPoly({(1, 0): 1})), CUSP) == 2
