from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import WINDOW, finite_type_atlas, make_rng, random_glued_atlas
from ueda.atlas import atlas_from_expansion, perturbed_atlas, trivial_atlas
from ueda.errors import (
    ConstantsEstimationError,
    FiniteTypeDetected,
    InputError,
    StagingError,
)
from ueda.linearize import (
    _superexponential,
    agreement,
    estimate_constants,
    estimate_constants_report,
    hij_coefficients,
    initial_state,
    linearize,
    linearize_step,
    majorant_coefficients,
    majorant_identity_holds,
    majorant_sequence,
    overlap_defect,
    radius_estimate,
    u_on_overlap,
)
from ueda.obstruction import classify
from ueda.series import BSeries, LSeries, MSeries, Scalar

pos = st.fractions(min_value=Fraction(1, 8), max_value=8, max_denominator=8)


# ------------------------------------------------------------- majorant


def test_A2_formula():
    led = majorant_sequence(3, Fraction(1, 2), 5, 4)
    assert led.A[0] == 2 * 3 * Fraction(1, 2) * (1 + 5 * Fraction(1, 2))


def test_A3_from_hand_expansion():
    # A = X + c(A^2 + R A^3 + ...) with c = 2, R = 1: A_2 = c, A_3 = c(2 A_2 + 1)
    A = majorant_coefficients(2, 1, 6)
    assert A[:2] == [2, 10]


def test_majorant_against_closed_form_generating_function():
    """For R = 0 the equation is A - X = c A^2, i.e. Catalan numbers: A_v = c^(v-1) Cat(v-1)."""
    cat = [1, 1, 2, 5, 14, 42, 132]
    A = majorant_coefficients(3, 0, 7)
    assert A == [3 ** (v - 1) * cat[v - 1] for v in range(2, 8)]


@given(pos, pos, pos)
def test_majorant_positive_and_exact(K, R, M):
    led = majorant_sequence(max(K, 1), R, M, 12)
    assert all(a > 0 for a in led.A)
    assert led.exact()
    assert led.A_nu(2) == led.c


def test_identity_check_detects_perturbation():
    A = majorant_coefficients(2, 1, 6)
    A[3] += 1
    assert not majorant_identity_holds(2, 1, A)


def test_majorant_input_errors():
    with pytest.raises(InputError):
        majorant_sequence(Fraction(1, 2), 1, 1, 4)
    with pytest.raises(InputError):
        majorant_sequence(1, 1, 0, 4)


def test_radius_examples():
    assert radius_estimate([1] * 6) == 1
    assert radius_estimate({v: 4**v for v in range(2, 9)}) == Fraction(1, 4)
    r = radius_estimate(majorant_coefficients(2, 1, 10))
    assert 0 < r < 1


@given(st.lists(pos, min_size=1, max_size=8), st.integers(0, 7), pos)
def test_radius_is_monotone_lower_bound(A, i, bump):
    r = radius_estimate(A)
    for nu, a in enumerate(A, start=2):
        assert r**nu * a <= 1  # r <= a^(-1/nu)
    i = i % len(A)
    B = list(A)
    B[i] += bump
    assert radius_estimate(B) <= r


# ------------------------------------------------------------- constants


def test_constants_of_trivial_fibration():
    assert estimate_constants(trivial_atlas(6)) == (1, 2, 1)


def test_constants_of_perturbed_atlas():
    K, R, M = estimate_constants(perturbed_atlas(1, 1), probe_radii=[Fraction(1, 2)])
    assert (R, M) == (2, Fraction(1, 8))
    assert K == 1


def test_constants_homogeneity():
    E = MSeries.from_terms({(1, 0): 1, (2, 2): 1, (2, -1): Fraction(1, 3), (3, 0): 2}, 6, WINDOW)
    E2 = MSeries.from_terms({(1, 0): 1, (2, 2): 2, (2, -1): Fraction(2, 3), (3, 0): 4}, 6, WINDOW)
    K1, R1, M1 = estimate_constants(atlas_from_expansion(E))
    K2, R2, M2 = estimate_constants(atlas_from_expansion(E2))
    assert (K1, R1, 2 * M1) == (K2, R2, M2)


def test_k_probe_uses_split_ratio():
    E = MSeries.from_terms({(1, 0): 1, (2, 2): 1}, 4, WINDOW)
    rep = estimate_constants_report(atlas_from_expansion(E))
    # beta = zeta^2: alpha0 = -zeta^2 extends to -x; |x| <= 1/4 = |zeta^2| at r_out
    assert rep.K0 == 1 and rep.K == 3


def test_superexponential_heuristic():
    assert _superexponential([Fraction(2 ** (k * k)) for k in range(2, 10)])
    assert not _superexponential([Fraction(5**k) * k for k in range(2, 10)])
    # pole order 2, 4, 9, 15, 21, ...: a transient, then geometric
    assert not _superexponential([Fraction(4**p) for p in (2, 4, 9, 15, 21, 27, 33)])
    terms = {(1, 0): 1}
    for nu in range(2, 9):
        terms[(nu, -nu * nu)] = 1  # |f_v| / R^v ~ 4^(v^2) / 2^v at r_in
    E = MSeries.from_terms(terms, 8, (-120, 120))
    with pytest.raises(ConstantsEstimationError):
        estimate_constants(atlas_from_expansion(E))


# ------------------------------------------------------------- H, I, J


def test_hij_trivial_is_zero():
    st_ = initial_state(trivial_atlas(6), 5)
    for _ in range(4):
        H, I, J = hij_coefficients(st_, st_.order + 1)
        assert not H and not I and not J
        st_ = linearize_step(st_)
    assert st_.order == 5 and all(not F for F in st_.F1)


def test_hij_lowest_order_example():
    E = MSeries.from_terms({(1, 0): 1, (2, 2): 1}, 4, WINDOW)
    st_ = initial_state(atlas_from_expansion(E), 3)
    H, I, J = hij_coefficients(st_, 2)
    z2 = LSeries.monomial(2, WINDOW)
    assert (H, I, J) == (LSeries.zero(WINDOW), z2, z2)


def test_hij_staging():
    st_ = initial_state(trivial_atlas(4), 3)
    with pytest.raises(StagingError):
        hij_coefficients(st_, 3)


def test_J_matches_overlap_defect_at_every_order():
    rng = make_rng("J-oracle")
    a = random_glued_atlas(rng, N_w=6)
    st_ = initial_state(a, 6)
    while st_.order < 6:
        ell = st_.order + 1
        assert hij_coefficients(st_, ell)[2] == overlap_defect(st_, ell)
        st_ = linearize_step(st_)


def test_coboundary_step_builds_split_functions():
    E = MSeries.from_terms({(1, 0): 1, (2, 2): 1, (2, -1): 2}, 5, WINDOW)
    st_ = linearize_step(initial_state(atlas_from_expansion(E), 3))
    # J = zeta^2 + 2 zeta^-1 = alpha1 - alpha0 with alpha0 = -zeta^2, alpha1 = 2 zeta^-1
    assert st_.F0[0].terms == {(1, 0): Scalar(1)}
    assert st_.F1[0] == LSeries.monomial(-1, WINDOW, -2)
    assert st_.checks[0].ok


def test_midpoint_agreement():
    rng = make_rng("midpoint")
    a = random_glued_atlas(rng, N_w=6)
    st_ = initial_state(a, 6)
    for n in range(1, 5):
        u0, u1, _ = u_on_overlap(st_)
        assert agreement(u0, u1) >= n
        st_ = linearize_step(st_)


# ------------------------------------------------------------- full runs


def test_linearize_trivial_gives_identity():
    r = linearize(trivial_atlas(8), 6)
    w = MSeries.variable(8, WINDOW)
    assert r.u0 == w and r.u1 == w
    assert r.agreement_order == 6
    assert r.u0_chart[1] == BSeries.constant(1, r.u0_chart[1].degree)
    assert all(not b for m, b in enumerate(r.u0_chart) if m != 1)


def test_linearize_glued_atlas():
    rng = make_rng("linearize-glued")
    for _ in range(2):
        r = linearize(random_glued_atlas(rng), 6)
        assert r.agreement_order == 6
        assert agreement(r.u0, r.u1) >= 6
        assert r.bounds_ok
        assert r.ledger.exact()
        # zero set: u_j = w_j + O(w_j^2)
        assert not r.u1.coeffs[0] and r.u1.coeffs[1] == LSeries.constant(1, WINDOW)


def test_linearize_detects_finite_type():
    with pytest.raises(FiniteTypeDetected) as info:
        linearize(perturbed_atlas(1, 1), 4)
    assert info.value.report.order == 1 and info.value.value == Scalar(-1)


def test_linearize_agrees_with_classify():
    rng = make_rng("consistency")
    for _ in range(3):
        a = finite_type_atlas(rng, rng.randint(1, 3))
        c = classify(a, 7)
        with pytest.raises(FiniteTypeDetected) as info:
            linearize(a, 8)
        assert info.value.report.order == c.order
        assert info.value.value == c.report.value


def test_linearize_order_limit():
    with pytest.raises(InputError):
        linearize(trivial_atlas(4), 5)
