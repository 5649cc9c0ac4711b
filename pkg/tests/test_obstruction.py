from fractions import Fraction

import pytest

from helpers import (
    WINDOW,
    finite_type_atlas,
    make_rng,
    rand_bseries,
    rand_coboundary,
    rand_nonzero_scalar,
    rand_rational,
    random_glued_atlas,
    type_n_expansion,
)
from oracles import cocycle_restriction_oracle
from ueda.atlas import atlas_from_expansion, perturbed_atlas, trivial_atlas
from ueda.cusp import pullback
from ueda.errors import (
    InputError,
    NotApplicableError,
    ObstructionError,
    PreconditionError,
)
from ueda.obstruction import (
    Classification,
    SystemN,
    classify,
    cocycle_identity_check,
    cocycle_restriction,
    obstruction,
    reparametrize,
    system_from_atlas,
    system_from_mseries,
    upgrade,
    upgrade_functions,
    verify_type,
)
from ueda.series import LSeries, MSeries, Scalar, compose


def _typed(a, n) -> SystemN:
    s = system_from_atlas(a)
    return SystemN(s.expansion, n, s.X, s.Y)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_perturbed_atlas_is_finite_type(n):
    c = classify(perturbed_atlas(n, 1), 7)
    assert c.verdict == "FiniteType" and c.order == n
    assert c.report.value == Scalar(-1)


def test_perturbed_value_scales_with_class():
    c = classify(perturbed_atlas(2, Scalar(3, -2)), 6)
    assert c.report.value == Scalar(-3, 2)


def test_trivial_and_glued_are_infinite_up_to_truncation():
    assert str(classify(trivial_atlas(8), 6)) == "InfiniteUpTo(6)"
    rng = make_rng("glued-classify")
    for _ in range(3):
        assert classify(random_glued_atlas(rng), 7).verdict == "InfiniteUpTo"


def test_classify_requires_room_in_the_truncation():
    with pytest.raises(InputError):
        classify(trivial_atlas(4), 4)


def test_classify_rejects_nontrivial_normal_bundle():
    E = MSeries.from_terms({(1, 0): 1, (1, 1): Fraction(1, 2)}, 4, WINDOW)
    with pytest.raises(NotApplicableError):
        classify(atlas_from_expansion(E), 3)


def test_verify_type_and_obstruction_preconditions():
    s = system_from_atlas(perturbed_atlas(1, 1))
    assert verify_type(s)
    assert not verify_type(SystemN(s.expansion, 2, s.X, s.Y))
    with pytest.raises(PreconditionError):
        obstruction(SystemN(s.expansion, 2, s.X, s.Y))
    with pytest.raises(ObstructionError) as info:
        upgrade(s)
    assert info.value.value == Scalar(-1)


def test_classification_invariants():
    with pytest.raises(ValueError):
        Classification("FiniteType", 1)


# ------------------------------------------------------------- cocycle identity


def test_cocycle_identity_against_independent_expansion():
    rng = make_rng("cocycle-identity")
    for _ in range(8):
        n = rng.randint(1, 4)
        E = type_n_expansion(rng, n, N_w=6)
        s = system_from_mseries(E, n)
        oracle = cocycle_restriction_oracle(list(s.expansion.f), n, E.window)
        assert oracle == s.expansion.f_nu(n + 1)
        assert cocycle_restriction(s) == oracle
        assert cocycle_identity_check(s)


def test_cocycle_identity_detects_pole_when_type_is_wrong():
    rng = make_rng("cocycle-pole")
    E = type_n_expansion(rng, 1, N_w=5, lead=LSeries.monomial(-1, WINDOW, 2))
    s = system_from_mseries(E, 2)
    assert cocycle_restriction(s) is None
    assert cocycle_restriction_oracle(list(s.expansion.f), 2, WINDOW) is None


# ------------------------------------------------------------- upgrade


def test_upgrade_example_against_hand_expansion():
    # w0 = w + (zeta^2 + c zeta^-1) w^2 + 3 zeta w^3, c = 1 + 2i; the S-value of
    # the new f_3 was expanded by hand (and in sympy): -2 zeta^4 + (1 - 4i) zeta.
    c = Scalar(1, 2)
    E = MSeries.from_terms({(1, 0): 1, (2, 2): 1, (2, -1): c, (3, 1): 3}, 8, WINDOW)
    t = upgrade(system_from_atlas(atlas_from_expansion(E)))
    assert t.claimed_type == 2
    assert t.expansion.f_nu(3) == LSeries({4: -2, 1: Scalar(1, -4)}, WINDOW)
    assert obstruction(t).value == Scalar(-1, 4)


def test_upgrade_recomposes_exactly():
    """``v0 = newE(v1)`` where ``v_k`` are the coordinate changes of the upgrade."""
    rng = make_rng("upgrade-exact")
    for _ in range(4):
        n = rng.randint(1, 3)
        E = type_n_expansion(rng, n, lead=rand_coboundary(rng))
        s = _typed(atlas_from_expansion(E), n)
        G0, G1 = upgrade_functions(obstruction(s))
        t = upgrade(s)
        w = MSeries.variable(8, WINDOW)
        v0 = E - G0.evaluate(s.X, s.Y) * E ** (n + 1)
        v1 = w - MSeries.from_lseries(G1, 8) * w ** (n + 1)
        assert compose(t.expansion.as_mseries(), v1) == v0
        assert verify_type(t)
        # the split satisfies G0|_C - G1 = f_{n+1}
        restricted = LSeries.from_pseries(pullback(G0, 2 * G0.degree + 1).truncate(WINDOW[1]), WINDOW)
        assert restricted - G1 == s.expansion.f_nu(n + 1)


def test_upgrade_succeeds_exactly_when_value_vanishes():
    rng = make_rng("upgrade-iff")
    for _ in range(6):
        n = rng.randint(1, 3)
        vanish = rng.random() < 0.5
        lead = rand_coboundary(rng)
        if not vanish:
            lead = lead + LSeries.monomial(1, WINDOW, rand_nonzero_scalar(rng))
        s = _typed(atlas_from_expansion(type_n_expansion(rng, n, lead=lead)), n)
        if vanish:
            assert upgrade(s).claimed_type == n + 1
        else:
            with pytest.raises(ObstructionError):
                upgrade(s)


# ------------------------------------------------------------- reparametrization


def test_reparametrization_changes_representative_by_a_coboundary():
    rng = make_rng("reparametrize")
    for _ in range(5):
        n = rng.randint(1, 3)
        s = _typed(atlas_from_expansion(type_n_expansion(rng, n)), n)
        consts = [rand_rational(rng) for _ in range(n - 1)]
        h0 = rand_bseries(rng, 2, 8)
        h1 = LSeries({m: rand_nonzero_scalar(rng) for m in range(-2, 1)}, WINDOW)
        t = reparametrize(s, consts, h0, h1)
        assert verify_type(t)
        f, g = s.expansion.f_nu(n + 1), t.expansion.f_nu(n + 1)
        h0_on_curve = LSeries.from_pseries(pullback(h0, 17), WINDOW)
        assert g - f == h0_on_curve - h1
        assert obstruction(t).value == obstruction(s).value


def test_finite_type_atlases_round_trip_through_classify():
    rng = make_rng("finite-type")
    for _ in range(3):
        n = rng.randint(1, 3)
        c = classify(finite_type_atlas(rng, n), 7)
        assert c.is_finite and c.order <= n


def test_report_json_shapes():
    c = classify(perturbed_atlas(1, 2), 3)
    d = c.to_json()
    assert d["verdict"] == "FiniteType" and d["value"] == [-2, 1, 0, 1]
    assert obstruction(system_from_atlas(perturbed_atlas(1, 2))).to_json()["order"] == 1
