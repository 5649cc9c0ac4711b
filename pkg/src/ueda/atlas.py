"""Two-chart neighborhoods of the cuspidal curve.

Chart 0 is a polydisc in ``(x, y)`` around the cusp with defining function
``w0 = unit(x, y) * (y^2 - x^3)``.  Chart 1 has coordinates ``(z1, w1)``
with the curve at ``w1 = 0``; on the overlap ``z1`` is identified with the
normalization parameter ``zeta`` and the chart-0 coordinates are given as
series ``x = X(zeta, w1)``, ``y = Y(zeta, w1)``.  Everything Ueda-theoretic
is derived from the expansion of ``w0`` in powers of ``w1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .cech import AnnulusWindow, s_functional, split
from .cusp import ChartRadii, extend_to_V0
from .errors import (
    AtlasInconsistencyError,
    DegenerateNormalBundleError,
    InputError,
    NotApplicableError,
    ParseError,
)
from .series import (
    BSeries,
    LSeries,
    MSeries,
    PSeries,
    Scalar,
    binomial_series,
    compose,
    exp_series,
    format_rational,
    log1p_series,
    rational,
    reversion,
    series_from_json,
    series_to_json,
    to_fraction,
    to_scalar,
)


def default_zeta_bound(N_w: int) -> int:
    """A Laurent window wide enough for the builders' atlases at fiber order ``N_w``.

    Each power of ``w1`` costs about ``zeta^-6`` (``y^2 - x^3`` has weight 6),
    plus slack for perturbations.
    """
    return 10 * N_w + 10


@dataclass(frozen=True)
class Atlas:
    radii: ChartRadii
    annulus: AnnulusWindow
    N_w: int
    N_zeta: int
    X_trans: MSeries
    Y_trans: MSeries
    w0_unit: BSeries

    @property
    def window(self) -> tuple[int, int]:
        return (-self.N_zeta, self.N_zeta)

    def zeta(self, m: int = 1, c=1) -> LSeries:
        return LSeries.monomial(m, self.window, c)

    def replace(self, **changes) -> Atlas:
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return Atlas(**data)


@dataclass(frozen=True)
class TransitionExpansion:
    """``w0 = c1 w1 + sum_{v>=2} f_v w1^v`` on the overlap; ``f[0]`` is ``f_2``."""

    c1: LSeries
    f: tuple[LSeries, ...]

    @property
    def N_w(self) -> int:
        return len(self.f) + 1

    @property
    def window(self) -> tuple[int, int]:
        return self.c1.window

    def f_nu(self, nu: int) -> LSeries:
        if not 2 <= nu <= self.N_w:
            raise InputError(f"f_{nu} is outside the stored orders 2..{self.N_w}")
        return self.f[nu - 2]

    def is_normalized(self) -> bool:
        return self.c1 == LSeries.constant(1, self.window)

    def as_mseries(self) -> MSeries:
        zero = LSeries.zero(self.window)
        return MSeries([zero, self.c1, *self.f], self.window)

    @classmethod
    def from_mseries(cls, W: MSeries) -> TransitionExpansion:
        if W.coeffs[0]:
            raise AtlasInconsistencyError(
                "w0 does not vanish on the curve: the w1^0 coefficient of w0 is nonzero"
            )
        return cls(W.coeffs[1], tuple(W.coeffs[2:]))

    def inverse_direction(self, nu: int) -> LSeries:
        """``f_{10,v} = -f_{01,v}``: the coefficient read in the opposite direction."""
        return -self.f_nu(nu)


@dataclass(frozen=True)
class NormalBundleReport:
    winding: int
    pic0_class: Scalar
    leading: Scalar = field(default=None, compare=False)
    log_unit: LSeries | None = field(default=None, compare=False)

    @property
    def trivial(self) -> bool:
        return self.winding == 0 and not self.pic0_class

    def to_json(self) -> dict:
        return {
            "winding": self.winding,
            "pic0_class": self.pic0_class.to_json(),
            "pic0_class_str": str(self.pic0_class),
            "holomorphically_trivial": self.trivial,
        }


# --------------------------------------------------------------------------
# validation and derived data


def validate(a: Atlas) -> list[str]:
    """All violated Atlas invariants, each naming the field."""
    out = []
    if a.N_w < 1:
        out.append(f"N_w: must be >= 1, got {a.N_w}")
    if a.N_zeta < 3:
        out.append(f"N_zeta: must be >= 3 so that zeta^3 fits, got {a.N_zeta}")
    if a.annulus.r_out > a.radii.eps0:
        out.append(
            f"annulus.r_out: {a.annulus.r_out} exceeds the cusp chart radius eps0 = {a.radii.eps0}"
        )
    for name in ("X_trans", "Y_trans"):
        s = getattr(a, name)
        if s.window != a.window:
            out.append(f"{name}: zeta-window {list(s.window)} differs from [-N_zeta, N_zeta]")
        if s.N_w != a.N_w:
            out.append(f"{name}: fiber order {s.N_w} differs from N_w = {a.N_w}")
    if not out:
        for name, m in (("X_trans", 2), ("Y_trans", 3)):
            s = getattr(a, name)
            if s.coeffs[0] != a.zeta(m):
                out.append(
                    f"{name}: curve-embedding violation, w1^0 coefficient must be zeta^{m}"
                )
    if not a.w0_unit.terms.get((0, 0)):
        out.append("w0_unit: unit violation, constant term is zero")
    return out


def _require_valid(a: Atlas):
    problems = validate(a)
    if problems:
        raise AtlasInconsistencyError("; ".join(problems))


def derive_w_transition(a: Atlas) -> TransitionExpansion:
    """Expand ``w0 = unit(X, Y) (Y^2 - X^3)`` in powers of ``w1``."""
    _require_valid(a)
    X, Y = a.X_trans, a.Y_trans
    W = a.w0_unit.evaluate(X, Y) * (Y * Y - X * X * X)
    return TransitionExpansion.from_mseries(W)


def _one_sided_compose(outer: PSeries, g: LSeries) -> LSeries:
    """``sum_k outer_k g^k`` for ``g`` with only positive or only negative exponents.

    Exact on the window: ``g^k`` leaves the window after finitely many steps.
    """
    out = LSeries.constant(outer.coeffs[0], g.window)
    power = LSeries.constant(1, g.window)
    for k in range(1, outer.order + 1):
        power = power * g
        if not power:
            break
        out = out + power * outer.coeffs[k]
    else:
        if power * g:
            raise InputError("series order too small for the Laurent window")
    return out


def _series_order_for(window) -> int:
    return max(abs(window[0]), abs(window[1])) + 1


def log_unit(u: LSeries) -> LSeries:
    """``log(u)`` for ``u = 1 + g`` with ``g`` one-sided."""
    g = u - 1
    if not g:
        return LSeries.zero(u.window)
    exps = g.terms.keys()
    if not (min(exps) > 0 or max(exps) < 0):
        raise DegenerateNormalBundleError(
            "c1: the unit factor mixes positive and negative exponents; "
            "no exact Laurent logarithm on a truncated window"
        )
    return _one_sided_compose(log1p_series(_series_order_for(u.window)), g)


def exp_one_sided(g: LSeries) -> LSeries:
    if not g:
        return LSeries.constant(1, g.window)
    exps = g.terms.keys()
    if not (min(exps) > 0 or max(exps) < 0):
        raise InputError("exp needs a series with exponents of one sign")
    return _one_sided_compose(exp_series(_series_order_for(g.window)), g)


def _dominant_exponent(c1: LSeries, annulus: AnnulusWindow) -> int | None:
    radii = (rational(annulus.r_in), rational(annulus.r_out))
    for m, cm in sorted(c1.terms.items()):
        mod2 = cm.re * cm.re + cm.im * cm.im
        ok = True
        for r in radii:
            rest = sum(
                (c.abs_upper() * r**k for k, c in c1.terms.items() if k != m),
                rational(0),
            )
            if not mod2 * r ** (2 * m) > rest * rest:
                ok = False
                break
        if ok:
            return m
    return None


def unit_class(c1: LSeries, annulus: AnnulusWindow) -> NormalBundleReport:
    """Winding number and Pic^0 class of a transition function ``c1``.

    The winding is the exponent of a monomial dominating ``c1`` on both
    boundary circles (Rouche); the class is ``S(log(c1 / (c_m zeta^m)))``.
    """
    if not c1:
        raise DegenerateNormalBundleError("c1 vanishes identically: w0 does not define the curve")
    m = _dominant_exponent(c1, annulus)
    if m is None:
        raise DegenerateNormalBundleError(
            "c1: no monomial dominates on the annulus, winding number undetermined"
        )
    lead = c1.terms[m]
    normalized = c1.shift(-m) * lead.inverse()
    L = log_unit(normalized)
    return NormalBundleReport(m, s_functional(L), lead, L)


def normal_bundle_class(a: Atlas) -> NormalBundleReport:
    return unit_class(derive_w_transition(a).c1, a.annulus)


def normalize(a: Atlas) -> Atlas:
    """An atlas whose transition has ``c1 == 1``.

    ``log(c1/c) = alpha1 - alpha0`` is split; ``w0`` is multiplied by the
    extension of ``exp(alpha0)`` and ``w1`` by ``c exp(alpha1)``.
    """
    exp_ = derive_w_transition(a)
    if exp_.is_normalized():
        return a
    report = unit_class(exp_.c1, a.annulus)
    if not report.trivial:
        raise NotApplicableError(
            f"normal bundle is not holomorphically trivial (winding {report.winding}, "
            f"Pic0 class {report.pic0_class}); cannot normalize",
            report=report,
        )
    ch = split(report.log_unit)
    window = a.window
    e0 = exp_one_sided(LSeries.from_pseries(ch.alpha0.series, window))
    order = window[1]
    unit = a.w0_unit
    if e0 != LSeries.constant(1, window):
        E0 = extend_to_V0(e0.to_pseries(order), degree=max(order, unit.degree))
        unit = unit.with_degree(max(order, unit.degree)) * E0
    k = exp_one_sided(-ch.alpha1) * report.leading.inverse()
    return a.replace(
        X_trans=a.X_trans.scale_variable(k),
        Y_trans=a.Y_trans.scale_variable(k),
        w0_unit=unit,
    )


# --------------------------------------------------------------------------
# builders


def _default_radii(eps0=Fraction(1, 2), eps1=Fraction(1, 2), annulus=None):
    radii = ChartRadii(eps0, eps1)
    if annulus is None:
        annulus = AnnulusWindow(radii.eps0 / 2, radii.eps0)
    return radii, annulus


def trivial_y(N_w: int, window, target: MSeries | None = None) -> MSeries:
    """``Y = zeta^3 sqrt(1 + zeta^-6 E)`` so that ``Y^2 - zeta^6 = E`` (default ``E = w1``)."""
    if target is None:
        target = MSeries.variable(N_w, window)
    t = target * LSeries.monomial(-6, window)
    root = compose(binomial_series(Fraction(1, 2), N_w), t)
    return root * LSeries.monomial(3, window)


def atlas_from_expansion(
    E: MSeries,
    *,
    eps0=Fraction(1, 2),
    eps1=Fraction(1, 2),
    annulus: AnnulusWindow | None = None,
    unit: BSeries | None = None,
) -> Atlas:
    """An atlas with ``X = zeta^2`` whose transition expansion is exactly ``E``.

    ``E`` must vanish at ``w1 = 0``; its window fixes ``N_zeta``.
    """
    if E.window[0] != -E.window[1]:
        raise InputError("the zeta-window must be symmetric [-N_zeta, N_zeta]")
    if E.coeffs[0]:
        raise AtlasInconsistencyError("target expansion has a nonzero w1^0 term")
    N_w, window = E.N_w, E.window
    radii, annulus = _default_radii(eps0, eps1, annulus)
    X = MSeries.from_lseries(LSeries.monomial(2, window), N_w)
    Y = trivial_y(N_w, window, E)
    if unit is None:
        unit = BSeries.constant(1, window[1])
    return Atlas(radii, annulus, N_w, window[1], X, Y, unit)


def trivial_atlas(N_w: int = 8, N_zeta: int | None = None, **kw) -> Atlas:
    """The trivial fibration: ``y^2 - x^3 = w1`` on the overlap."""
    N_zeta = default_zeta_bound(N_w) if N_zeta is None else N_zeta
    window = (-N_zeta, N_zeta)
    return atlas_from_expansion(MSeries.variable(N_w, window), **kw)


def perturbed_atlas(order: int, cls=1, N_w: int = 8, N_zeta: int | None = None, **kw) -> Atlas:
    """Trivial fibration with ``f_{order+1} = cls * zeta`` inserted."""
    if not 1 <= order <= N_w - 1:
        raise InputError(f"order must lie in 1..N_w-1 = 1..{N_w - 1}, got {order}")
    N_zeta = default_zeta_bound(N_w) if N_zeta is None else N_zeta
    window = (-N_zeta, N_zeta)
    E = MSeries.from_terms({(1, 0): 1, (order + 1, 1): to_scalar(cls)}, N_w, window)
    return atlas_from_expansion(E, **kw)


def glued_atlas(
    chart0: dict[int, BSeries],
    chart1: dict[int, LSeries],
    N_w: int = 8,
    N_zeta: int | None = None,
    **kw,
) -> Atlas:
    """An infinite-type atlas: the trivial fibration seen through fiber changes.

    With ``s = y^2 - x^3`` and the trivial fiber coordinate ``t``, the new
    defining functions are ``w0 = s + sum P_v(x, y) s^v`` and
    ``w1 = t + sum a_v(zeta) t^v``; since ``s = t`` on the overlap the
    functions ``s`` and ``t`` glue, so every Ueda class vanishes.
    """
    N_zeta = default_zeta_bound(N_w) if N_zeta is None else N_zeta
    window = (-N_zeta, N_zeta)
    radii, annulus = _default_radii(
        kw.pop("eps0", Fraction(1, 2)), kw.pop("eps1", Fraction(1, 2)), kw.pop("annulus", None)
    )
    for nu, a in chart1.items():
        if a.terms and max(a.terms) > 0:
            raise InputError(f"chart-1 coefficient a_{nu} must have exponents <= 0")
    phi1 = MSeries.variable(N_w, window)
    for nu, a in chart1.items():
        phi1 = phi1 + MSeries.from_lseries(a.rewindow(window), N_w) * (MSeries.variable(N_w, window) ** nu)
    t_of_w = reversion(phi1)
    Y = compose(trivial_y(N_w, window), t_of_w)
    X = MSeries.from_lseries(LSeries.monomial(2, window), N_w)
    deg = N_zeta
    s = BSeries({(0, 2): 1, (3, 0): -1}, deg)
    unit = BSeries.constant(1, deg)
    for nu, P in chart0.items():
        unit = unit + P.with_degree(deg) * s ** (nu - 1)
    return Atlas(radii, annulus, N_w, N_zeta, X, Y, unit)


# --------------------------------------------------------------------------
# JSON


def _rat_json(q) -> list[int]:
    q = to_fraction(q)
    return [q.numerator, q.denominator]


def _rat_from_json(v, where):
    if isinstance(v, str):
        return to_fraction(rational(v))
    if (
        isinstance(v, list)
        and len(v) == 2
        and all(isinstance(x, int) and not isinstance(x, bool) for x in v)
        and v[1] != 0
    ):
        return Fraction(v[0], v[1])
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    raise ParseError(f"{where}: expected a rational [num, den], got {v!r}")


def atlas_to_json(a: Atlas) -> dict:
    return {
        "radii": {"eps0": _rat_json(a.radii.eps0), "eps1": _rat_json(a.radii.eps1)},
        "annulus": {"r_in": _rat_json(a.annulus.r_in), "r_out": _rat_json(a.annulus.r_out)},
        "N_w": a.N_w,
        "N_zeta": a.N_zeta,
        "X_trans": series_to_json(a.X_trans),
        "Y_trans": series_to_json(a.Y_trans),
        "w0_unit": series_to_json(a.w0_unit),
    }


def atlas_from_json(d) -> Atlas:
    if not isinstance(d, dict):
        raise ParseError("atlas: expected a JSON object")
    for key in ("radii", "annulus", "N_w", "N_zeta", "X_trans", "Y_trans", "w0_unit"):
        if key not in d:
            raise ParseError(f"atlas: missing field {key!r}")
    radii_d, ann_d = d["radii"], d["annulus"]
    if not isinstance(radii_d, dict) or "eps0" not in radii_d:
        raise ParseError("atlas.radii: missing field 'eps0'")
    if not isinstance(ann_d, dict) or "r_in" not in ann_d or "r_out" not in ann_d:
        raise ParseError("atlas.annulus: needs 'r_in' and 'r_out'")
    for key in ("N_w", "N_zeta"):
        if not isinstance(d[key], int) or isinstance(d[key], bool):
            raise ParseError(f"atlas.{key}: expected an integer")
    try:
        radii = ChartRadii(
            _rat_from_json(radii_d["eps0"], "atlas.radii.eps0"),
            _rat_from_json(radii_d.get("eps1", [1, 2]), "atlas.radii.eps1"),
        )
        annulus = AnnulusWindow(
            _rat_from_json(ann_d["r_in"], "atlas.annulus.r_in"),
            _rat_from_json(ann_d["r_out"], "atlas.annulus.r_out"),
        )
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(f"atlas.radii/annulus: {exc}") from exc
    X = series_from_json(d["X_trans"], "atlas.X_trans")
    Y = series_from_json(d["Y_trans"], "atlas.Y_trans")
    unit = series_from_json(d["w0_unit"], "atlas.w0_unit")
    if not isinstance(X, MSeries) or not isinstance(Y, MSeries):
        raise ParseError("atlas.X_trans/Y_trans: expected series of kind 'M'")
    if not isinstance(unit, BSeries):
        raise ParseError("atlas.w0_unit: expected a series of kind 'B'")
    return Atlas(radii, annulus, d["N_w"], d["N_zeta"], X, Y, unit)


def load_atlas(path) -> Atlas:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: malformed JSON ({exc})") from exc
    return atlas_from_json(data)


def dump_atlas(a: Atlas, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(atlas_to_json(a), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def describe(a: Atlas) -> dict:
    """Short human summary used in reports."""
    return {
        "N_w": a.N_w,
        "N_zeta": a.N_zeta,
        "eps0": format_rational(rational(a.radii.eps0)),
        "eps1": format_rational(rational(a.radii.eps1)),
        "annulus": [format_rational(rational(a.annulus.r_in)), format_rational(rational(a.annulus.r_out))],
    }
