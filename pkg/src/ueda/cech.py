"""Cech cohomology of the structure sheaf of the cuspidal curve.

Two charts: the cusp chart (germs are power series in ``zeta`` with no linear
term) and the smooth chart around ``zeta = infinity`` (series in
``1/zeta``).  A cocycle is a single Laurent series ``beta`` on the overlap
annulus, and cochains ``(alpha0, alpha1)`` have coboundary
``alpha1 - alpha0``.  The only obstruction to splitting is the coefficient
of ``zeta``, hence ``H^1 = C`` via the S-functional ``S(beta) = -b_1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cusp import CuspFunction
from .errors import DomainError, ObstructionError
from .series import LSeries, PSeries, Scalar, circle_norm, rational, to_fraction, ZERO


@dataclass(frozen=True)
class AnnulusWindow:
    r_in: Fraction
    r_out: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r_in", to_fraction(self.r_in))
        object.__setattr__(self, "r_out", to_fraction(self.r_out))
        if not 0 < self.r_in < self.r_out:
            raise DomainError(f"annulus needs 0 < r_in < r_out, got ({self.r_in}, {self.r_out})")


@dataclass(frozen=True)
class Cocycle:
    beta: LSeries


@dataclass(frozen=True)
class Cochain:
    """``alpha0`` on the cusp chart, ``alpha1`` (no positive exponents) near infinity."""

    alpha0: CuspFunction
    alpha1: LSeries

    def __post_init__(self):
        if self.alpha1.terms and max(self.alpha1.terms) > 0:
            raise DomainError("alpha1 must be holomorphic at infinity (exponents <= 0)")


def _beta(c) -> LSeries:
    return c.beta if isinstance(c, Cocycle) else c


def s_functional(c: Cocycle | LSeries) -> Scalar:
    """``-b_1`` where ``b_1`` is the coefficient of ``zeta`` in the cocycle."""
    beta = _beta(c)
    return -beta.terms.get(1, ZERO)


def split(c: Cocycle | LSeries) -> Cochain:
    """Solve ``alpha1 - alpha0 = beta``.

    Exponents ``>= 2`` go (negated) to ``alpha0``; exponents ``<= 0``,
    including the constant, go to ``alpha1``.
    """
    beta = _beta(c)
    value = s_functional(beta)
    if value:
        raise ObstructionError(
            f"cocycle is not a coboundary: S = {value}", value=value
        )
    order = max(beta.hi, 1)
    alpha0 = PSeries.from_dict({m: -v for m, v in beta.terms.items() if m >= 2}, order)
    alpha1 = beta.part(hi=0)
    return Cochain(CuspFunction(alpha0), alpha1)


def delta(ch: Cochain) -> Cocycle:
    """``alpha1 - alpha0`` on alpha1's window."""
    alpha0 = LSeries.from_pseries(ch.alpha0.series, ch.alpha1.window)
    return Cocycle(ch.alpha1 - alpha0)


def bounded_split(c: Cocycle | LSeries, w: AnnulusWindow) -> tuple[Cochain, Fraction]:
    """Split and report the ratio witnessing the bounded-solution estimate.

    The ratio is ``max(|alpha0|_{r_out}, |alpha1|_{r_in})`` over
    ``max(|beta|_{r_in}, |beta|_{r_out})``, all norms being coefficient sums;
    zero cocycles report ratio 0.
    """
    beta = _beta(c)
    ch = split(beta)
    r_in, r_out = rational(w.r_in), rational(w.r_out)
    num = max(circle_norm(ch.alpha0.series, r_out), circle_norm(ch.alpha1, r_in))
    den = max(circle_norm(beta, r_in), circle_norm(beta, r_out))
    if not den:
        return ch, Fraction(0)
    return ch, to_fraction(num / den)


def annulus_norm(s: LSeries, w: AnnulusWindow):
    """Coefficient-sum bound of ``sup |s|`` over the closed annulus."""
    return max(circle_norm(s, rational(w.r_in)), circle_norm(s, rational(w.r_out)))


def is_coboundary(c: Cocycle | LSeries) -> bool:
    return not s_functional(c)
