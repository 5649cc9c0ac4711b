"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""

import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from helpers import (
    WINDOW,
    finite_type_atlas,
    make_rng,
    rand_bseries,
    rand_cusp_pseries,
    rand_lseries,
    rand_nonzero_scalar,
    rand_rational,
    random_glued_atlas,
    type_n_expansion,
)
from oracles import cocycle_restriction_oracle
from ueda.atlas import atlas_from_expansion, perturbed_atlas, trivial_atlas
from ueda.cech import Cochain, delta, s_functional, split
from ueda.cusp import ChartRadii, CuspFunction, extend_to_V0, extension_bound_report, pullback
from ueda.errors import FiniteTypeDetected, ObstructionError
from ueda.linearize import (
    linearize,
    majorant_coefficients,
    majorant_identity_holds,
    majorant_sequence,
)
from ueda.obstruction import (
    SystemN,
    classify,
    cocycle_restriction,
    obstruction,
    reparametrize,
    system_from_atlas,
    system_from_mseries,
    upgrade,
)
from ueda.resolve import (
    contract_chain,
    cover_pullback,
    default_cover,
    ell_from_type,
    resolve_cusp,
    self_intersections,
)
from ueda.series import LSeries, MSeries, PSeries, Scalar

pytestmark = pytest.mark.acceptance


@contextmanager
def criterion(number, title, limit):
    start = time.perf_counter()
    try:
        yield
    except BaseException as e:
        elapsed = time.perf_counter() - start
        print(f"\nFAIL criterion {number} ({title}): {type(e).__name__}: {e} [{elapsed:.2f}s]")
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < limit
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {number} ({title}) [{elapsed:.2f}s < {limit}s]")
    assert ok, f"runtime {elapsed:.2f}s exceeds {limit}s"


def test_criterion_1_extension_operator():
    rng = make_rng("acceptance-1")
    with criterion(1, "extension operator", 10):
        for k in range(200):
            f = CuspFunction(rand_cusp_pseries(rng, rng.randint(2, 16)))
            assert pullback(extend_to_V0(f), f.order) == f.series
            radii = ChartRadii(Fraction(1, 2) if k % 2 else Fraction(1, 4))
            B_F, B_f = extension_bound_report(f, radii)
            assert B_F <= 3 * B_f


def test_criterion_2_cohomology_kernel():
    rng = make_rng("acceptance-2")
    win = (-8, 8)
    zeta = LSeries.monomial(1, win)
    with criterion(2, "cohomology kernel", 5):
        assert s_functional(zeta) != 0
        for _ in range(500):
            beta = rand_lseries(rng, -8, 8, win)
            if rng.random() < 0.5:
                beta = beta - beta.part(1, 1)
            if s_functional(beta):
                with pytest.raises(ObstructionError):
                    split(beta)
                continue
            # Ker(S) in Im(delta), with delta . split = id
            assert delta(split(beta)).beta == beta
            # Im(delta) in Ker(S)
            a0 = PSeries([0 if m == 1 else rand_rational(rng) for m in range(9)], 8)
            a1 = LSeries({m: rand_rational(rng) for m in range(-8, 1)}, win)
            assert s_functional(delta(Cochain(CuspFunction(a0), a1))) == 0


def test_criterion_3_cocycle_identity():
    rng = make_rng("acceptance-3")
    with criterion(3, "cocycle identity", 30):
        for k in range(20):
            n = k % 4 + 1
            s = system_from_mseries(type_n_expansion(rng, n, N_w=8), n)
            f = s.expansion.f_nu(n + 1)
            assert cocycle_restriction(s) == f
            assert cocycle_restriction_oracle(list(s.expansion.f), n, WINDOW) == f


def test_criterion_4_reparametrization_invariance():
    rng = make_rng("acceptance-4")
    with criterion(4, "reparametrization invariance", 30):
        for k in range(20):
            n = k % 3 + 1
            lead = rand_lseries(rng, -3, 3)
            if k % 2:
                lead = lead - lead.part(1, 1)
            s0 = system_from_atlas(atlas_from_expansion(type_n_expansion(rng, n, lead=lead)))
            s = SystemN(s0.expansion, n, s0.X, s0.Y)
            consts = [rand_rational(rng) for _ in range(n - 1)]
            h0 = rand_bseries(rng, 2, 8)
            h1 = LSeries({m: rand_nonzero_scalar(rng) for m in range(-2, 1)}, WINDOW)
            t = reparametrize(s, consts, h0, h1)
            before, after = obstruction(s), obstruction(t)
            assert before.vanishes == after.vanishes
            diff = t.expansion.f_nu(n + 1) - s.expansion.f_nu(n + 1)
            assert s_functional(diff) == 0


def test_criterion_5_classifier_round_trip():
    rng = make_rng("acceptance-5")
    with criterion(5, "classifier round trip", 30):
        for k in range(8):
            n = k % 3 + 1
            lead = rand_lseries(rng, -3, 3)
            if k % 2:
                lead = lead - lead.part(1, 1)
            s0 = system_from_atlas(atlas_from_expansion(type_n_expansion(rng, n, lead=lead)))
            s = SystemN(s0.expansion, n, s0.X, s0.Y)
            if obstruction(s).vanishes:
                assert upgrade(s).claimed_type == n + 1
            else:
                with pytest.raises(ObstructionError):
                    upgrade(s)
        for n in (1, 2, 3):
            c = classify(perturbed_atlas(n, 1), 6)
            assert c.verdict == "FiniteType" and c.order == n
        assert str(classify(trivial_atlas(8), 6)) == "InfiniteUpTo(6)"


def test_criterion_6_majorant_ledger():
    rng = make_rng("acceptance-6")
    with criterion(6, "majorant ledger", 5):
        A = majorant_coefficients(2, 1, 12)
        assert A[0] == 2 and A[1] == 10
        assert majorant_identity_holds(2, 1, A)
        for _ in range(20):
            K = 1 + abs(rand_rational(rng))
            R = Fraction(rng.randint(1, 9), rng.randint(1, 9))
            M = Fraction(rng.randint(1, 9), rng.randint(1, 9))
            led = majorant_sequence(K, R, M, 12)
            assert led.A_nu(2) == 2 * K * R * (1 + M * R)
            assert all(a > 0 for a in led.A)
            assert led.exact()


def test_criterion_7_linearization():
    rng = make_rng("acceptance-7")
    with criterion(7, "linearization at truncation", 60):
        r = linearize(trivial_atlas(8), 6)
        w = MSeries.variable(8, WINDOW)
        assert r.agreement_order == 6 and r.u0 == w and r.u1 == w
        for _ in range(3):
            a = random_glued_atlas(rng)
            assert classify(a, 7).verdict == "InfiniteUpTo"
            r = linearize(a, 6)
            assert r.agreement_order >= 6
            assert r.u0.coeffs[:7] == r.u1.coeffs[:7]
            assert r.checks and r.bounds_ok


def test_criterion_8_resolution_combinatorics():
    with criterion(8, "resolution combinatorics", 1):
        L, D = resolve_cusp(0)
        assert [D[c] for c in ("C1", "E1", "E2", "E3")] == [6, 3, 2, 1]
        assert L.dot(D, D) == 0
        assert all(L.dot(D, {E: 1}) == 0 for E in ("C1", "E1", "E2"))
        cr = cover_pullback(L, default_cover())
        assert all(v == 6 for v in cr.pullback.values())
        assert len(cr.reduced) == 7
        si = self_intersections(cr.lattice)
        # the six lifted exceptional curves are (-1)-curves
        assert len(cr.contractible) == 6
        assert all(si[c] == -1 for c in cr.contractible)
        rep = contract_chain(cr.lattice, cr)
        assert rep.count == 6
        for n in range(1, 13):
            assert ell_from_type(n) == Fraction(n, 6)


def test_criterion_9_consistency():
    rng = make_rng("acceptance-9")
    with criterion(9, "linearize and classify agree", 60):
        for k in range(10):
            n = k % 3 + 1
            a = finite_type_atlas(rng, n)
            c = classify(a, 7)
            assert c.is_finite
            with pytest.raises(FiniteTypeDetected) as info:
                linearize(a, 7)
            assert info.value.report.order == c.order
            assert info.value.value == c.report.value
