"""Random objects for property tests.  All randomness flows from ``UEDA_SEED``."""

from __future__ import annotations

import os
import random
from fractions import Fraction

from ueda.atlas import atlas_from_expansion, glued_atlas
from ueda.series import BSeries, LSeries, MSeries, PSeries, Scalar

SEED = int(os.environ.get("UEDA_SEED", "20260611"))
WINDOW = (-90, 90)


def make_rng(salt: str = "") -> random.Random:
    return random.Random(f"{SEED}:{salt}")


def rand_rational(rng, num=5, den=4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def rand_scalar(rng, complex_prob=0.3) -> Scalar:
    im = rand_rational(rng) if rng.random() < complex_prob else 0
    return Scalar(rand_rational(rng), im)


def rand_nonzero_scalar(rng) -> Scalar:
    while True:
        c = rand_scalar(rng)
        if c:
            return c


def rand_lseries(rng, lo, hi, window=WINDOW, density=0.6) -> LSeries:
    return LSeries({m: rand_scalar(rng) for m in range(lo, hi + 1) if rng.random() < density}, window)


def rand_coboundary(rng, lo=-3, hi=3, window=WINDOW) -> LSeries:
    """A nonzero Laurent polynomial without a zeta term."""
    while True:
        s = rand_lseries(rng, lo, hi, window)
        s = s - s.part(1, 1)
        if s:
            return s


def rand_cusp_pseries(rng, order) -> PSeries:
    coeffs = [rand_scalar(rng) if rng.random() < 0.7 else 0 for _ in range(order + 1)]
    if order >= 1:
        coeffs[1] = 0
    return PSeries(coeffs, order)


def rand_bseries(rng, max_deg, degree) -> BSeries:
    return BSeries(
        {(i, j): rand_scalar(rng) for i in range(max_deg + 1) for j in range(max_deg + 1 - i)
         if rng.random() < 0.5},
        degree,
    )


def type_n_expansion(rng, n, N_w=8, window=WINDOW, lead=None) -> MSeries:
    """``w + sum_{v>n} f_v w^v``; ``lead`` fixes ``f_{n+1}`` when given."""
    terms = {(1, 0): 1}
    for nu in range(n + 1, N_w + 1):
        f = lead if (nu == n + 1 and lead is not None) else rand_lseries(rng, -3, 3, window)
        for m, c in f.terms.items():
            terms[(nu, m)] = c
    return MSeries.from_terms(terms, N_w, window)


def finite_type_expansion(rng, n, N_w=8, window=WINDOW) -> MSeries:
    """Coboundaries at orders 2..n, a nonzero class at order n+1, noise above."""
    terms = {(1, 0): 1}
    for nu in range(2, N_w + 1):
        if nu <= n:
            f = rand_coboundary(rng, window=window)
        else:
            f = rand_lseries(rng, -3, 3, window)
            if nu == n + 1:
                f = f - f.part(1, 1) + LSeries.monomial(1, window, rand_nonzero_scalar(rng))
        for m, c in f.terms.items():
            terms[(nu, m)] = c
    return MSeries.from_terms(terms, N_w, window)


def finite_type_atlas(rng, n, N_w=8):
    return atlas_from_expansion(finite_type_expansion(rng, n, N_w))


def random_glued_atlas(rng, N_w=8, N_zeta=None):
    window = WINDOW if N_zeta is None else (-N_zeta, N_zeta)
    deg = 10
    chart0 = {nu: rand_bseries(rng, 2, deg) for nu in (2, 3) if rng.random() < 0.8}
    chart1 = {
        nu: LSeries({m: rand_scalar(rng) for m in range(-2, 1) if rng.random() < 0.6}, window)
        for nu in (2, 3)
        if rng.random() < 0.8
    }
    return glued_atlas(chart0, chart1, N_w, N_zeta)
