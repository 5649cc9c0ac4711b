"""The cusp ``y^2 = x^3``: its local ring, normalization and extension operator.

The normalization is ``i(zeta) = (zeta^2, zeta^3)``; a germ on the curve is
a power series in ``zeta`` with vanishing linear coefficient.  Such a germ is
extended to the polydisc ``|x| < eps0^2, |y| < 2 eps0^3`` by splitting it into
even and odd parts, which sends ``a_{2m}`` to ``x^m`` and ``a_{2m+1}`` to
``x^(m-1) y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, OutOfWindowError
from .series import BSeries, PSeries, Scalar, circle_norm, rational, to_fraction


def is_cusp_member(s: PSeries) -> bool:
    """True iff the coefficient of ``zeta`` vanishes."""
    return s.order < 1 or not s.coeffs[1]


@dataclass(frozen=True)
class CuspFunction:
    """A function on the cusp chart, seen through the normalization."""

    series: PSeries

    def __post_init__(self):
        if not is_cusp_member(self.series):
            raise DomainError(
                f"not in the cusp local ring: zeta-coefficient is {self.series.coeffs[1]}"
            )

    @property
    def order(self) -> int:
        return self.series.order

    @classmethod
    def from_dict(cls, terms: dict, order: int) -> CuspFunction:
        return cls(PSeries.from_dict(terms, order))


@dataclass(frozen=True)
class ChartRadii:
    """``eps0`` is the zeta-radius of the normalized cusp chart; ``eps1`` the fiber radius
    of the smooth chart (``|w_1| < eps1``)."""

    eps0: Fraction
    eps1: Fraction = Fraction(1, 2)

    def __post_init__(self):
        object.__setattr__(self, "eps0", to_fraction(self.eps0))
        object.__setattr__(self, "eps1", to_fraction(self.eps1))
        if self.eps0 <= 0 or self.eps1 <= 0:
            raise DomainError("chart radii must be positive")

    @property
    def polydisc(self) -> tuple[Fraction, Fraction]:
        return (self.eps0**2, 2 * self.eps0**3)


def pullback(F: BSeries, order: int | None = None) -> PSeries:
    """``i^*F``: substitute ``x = zeta^2``, ``y = zeta^3``.

    A total-degree-``D`` truncation determines the pullback up to ``zeta^(2D+1)``.
    """
    valid = 2 * F.degree + 1
    if order is None:
        order = valid
    if order > valid:
        raise OutOfWindowError(
            f"degree-{F.degree} BSeries only determines the pullback to order {valid}"
        )
    terms: dict[int, Scalar] = {}
    for (i, j), c in F.terms.items():
        n = 2 * i + 3 * j
        if n <= order:
            terms[n] = terms.get(n, Scalar()) + c
    return PSeries.from_dict(terms, order)


def extend_to_V0(f: CuspFunction | PSeries, degree: int | None = None) -> BSeries:
    """The bounded extension ``F(x, y) = g(sqrt x) + y h(sqrt x)`` of ``f``.

    Linear in ``f``; not multiplicative in general.
    """
    s = f.series if isinstance(f, CuspFunction) else f
    if not is_cusp_member(s):
        raise DomainError("extend_to_V0 needs a function with vanishing zeta-coefficient")
    if degree is None:
        degree = 2 * s.order
    terms = {}
    for n, c in enumerate(s.coeffs):
        if not c:
            continue
        if n % 2 == 0:
            terms[(n // 2, 0)] = c
        else:
            terms[((n - 3) // 2, 1)] = c
    return BSeries(terms, degree)


def extension_bound_report(f: CuspFunction | PSeries, radii: ChartRadii):
    """``(B_F, B_f)``: coefficient-sum bounds of the extension on the polydisc
    and of ``f`` on ``|zeta| = eps0``.  The expected estimate is
    ``B_F <= 3 B_f``."""
    s = f.series if isinstance(f, CuspFunction) else f
    F = extend_to_V0(s)
    rx, ry = radii.polydisc
    B_F = F.weighted_norm(rational(rx), rational(ry))
    B_f = circle_norm(s, rational(radii.eps0))
    return B_F, B_f
