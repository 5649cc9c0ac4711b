"""Ueda obstruction classes, type upgrades and the finite/infinite classifier.

A *system of type n* is a pair of defining functions whose transition
``w0 = w1 + sum f_v w1^v`` has ``f_2 = ... = f_n = 0``.  Its n-th class is
the cohomology class of ``f_{n+1}``; under ``H^1(C, O_C) = C`` it becomes the
scalar ``S(f_{n+1})``.  When that scalar vanishes, splitting ``f_{n+1}`` and
changing fiber coordinates by ``v_k = w_k - G_k w_k^(n+1)`` gives a system
of type ``n + 1``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .atlas import (
    Atlas,
    TransitionExpansion,
    derive_w_transition,
    normal_bundle_class,
    normalize,
)
from .cech import Cocycle, s_functional, split
from .cusp import extend_to_V0
from .errors import (
    InputError,
    NotApplicableError,
    ObstructionError,
    PreconditionError,
)
from .series import (
    BSeries,
    LSeries,
    MSeries,
    PSeries,
    Scalar,
    binomial_series,
    compose,
    reversion,
    series_to_json,
    to_scalar,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SystemN:
    """A normalized transition expansion claimed to be of type ``claimed_type``.

    ``X`` and ``Y`` give the cusp-chart coordinates as series in the current
    chart-1 fiber coordinate; they are needed to move chart-0 functions to the
    overlap and may be omitted for purely cohomological checks.
    """

    expansion: TransitionExpansion
    claimed_type: int = 1
    X: MSeries | None = None
    Y: MSeries | None = None

    @property
    def N_w(self) -> int:
        return self.expansion.N_w

    @property
    def window(self):
        return self.expansion.window


@dataclass(frozen=True)
class ObstructionReport:
    order: int
    representative: Cocycle
    value: Scalar

    @property
    def vanishes(self) -> bool:
        return not self.value

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "value": self.value.to_json(),
            "value_str": str(self.value),
            "representative": series_to_json(self.representative.beta),
        }


@dataclass(frozen=True)
class Classification:
    verdict: str  # "FiniteType" or "InfiniteUpTo"
    order: int
    report: ObstructionReport | None = None
    system: SystemN | None = None

    def __post_init__(self):
        if self.verdict not in ("FiniteType", "InfiniteUpTo"):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "FiniteType" and (self.report is None or self.report.vanishes):
            raise ValueError("FiniteType needs a nonvanishing obstruction report")

    @property
    def is_finite(self) -> bool:
        return self.verdict == "FiniteType"

    def __str__(self):
        if self.is_finite:
            return f"FiniteType({self.order}, value {self.report.value})"
        return f"InfiniteUpTo({self.order})"

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "order": self.order}
        if self.report is not None:
            out["value"] = self.report.value.to_json()
            out["value_str"] = str(self.report.value)
            out["representative"] = series_to_json(self.report.representative.beta)
        else:
            out["value"] = None
            out["representative"] = None
        return out


def system_from_atlas(a: Atlas) -> SystemN:
    """The type-1 system of a normalized copy of ``a``."""
    report = normal_bundle_class(a)
    if not report.trivial:
        raise NotApplicableError(
            f"Ueda classes need a holomorphically trivial normal bundle; got winding "
            f"{report.winding}, Pic0 class {report.pic0_class}",
            report=report,
        )
    b = normalize(a)
    exp_ = derive_w_transition(b)
    return SystemN(exp_, 1, b.X_trans, b.Y_trans)


def system_from_mseries(E: MSeries, claimed_type: int = 1, X=None, Y=None) -> SystemN:
    return SystemN(TransitionExpansion.from_mseries(E), claimed_type, X, Y)


def verify_type(s: SystemN) -> bool:
    exp_ = s.expansion
    if not exp_.is_normalized():
        return False
    if s.claimed_type < 1:
        return False
    top = min(s.claimed_type, exp_.N_w)
    return all(not exp_.f_nu(nu) for nu in range(2, top + 1))


def obstruction(s: SystemN) -> ObstructionReport:
    """The class of ``f_{n+1}`` and its S-value."""
    if not verify_type(s):
        raise PreconditionError(
            f"expansion is not a normalized system of type {s.claimed_type}"
        )
    n = s.claimed_type
    if n + 1 > s.N_w:
        raise InputError(f"f_{n + 1} is beyond the fiber truncation N_w = {s.N_w}")
    beta = s.expansion.f_nu(n + 1)
    return ObstructionReport(n, Cocycle(beta), s_functional(beta))


def cocycle_restriction(s: SystemN) -> LSeries | None:
    """``(1/n)(1/w1^n - 1/w0^n)`` restricted to the curve, or ``None`` when it has a pole there.

    With ``w0 = w1 (1 + g)`` one has ``1/w1^n - 1/w0^n = w1^-n (1 - (1+g)^-n)``;
    the right factor must be ``O(w1^n)`` and its ``w1^n`` coefficient is the
    restriction.
    """
    if not s.expansion.is_normalized():
        raise PreconditionError("the cocycle identity needs a normalized expansion (c1 = 1)")
    n = s.claimed_type
    if not 1 <= n <= s.N_w - 1:
        raise InputError(f"type {n} must lie in 1..N_w-1 = 1..{s.N_w - 1}")
    exp_ = s.expansion
    zero = LSeries.zero(exp_.window)
    g = MSeries([zero, *exp_.f], exp_.window)  # (w0 / w1) - 1, order N_w - 1
    outer = PSeries.one(g.N_w) - binomial_series(-n, g.N_w)
    h = compose(outer, g)
    if any(h.coeffs[k] for k in range(n)):
        return None
    return h.coeffs[n] * (Scalar(1) / n)


def cocycle_identity_check(s: SystemN) -> bool:
    """``f_{n+1} == (1/n)(1/w1^n - 1/w0^n)|_C`` for a system of type ``n``."""
    if not verify_type(s):
        raise PreconditionError(
            f"expansion is not a normalized system of type {s.claimed_type}"
        )
    restricted = cocycle_restriction(s)
    return restricted is not None and restricted == s.expansion.f_nu(s.claimed_type + 1)


def _as_fiber_function(h, window, N_w) -> MSeries:
    if isinstance(h, MSeries):
        return h
    if isinstance(h, LSeries):
        return MSeries.from_lseries(h.rewindow(window) if h.window != window else h, N_w)
    raise TypeError(f"chart-1 function must be an LSeries or MSeries, not {type(h).__name__}")


def reparametrize(
    s: SystemN,
    consts=(),
    h0: BSeries | None = None,
    h1: LSeries | MSeries | None = None,
    claimed_type: int | None = None,
) -> SystemN:
    """Change fiber coordinates by ``v_k = w_k + sum c_v w_k^v + h_k w_k^(n+1)``.

    ``consts`` are ``c_2 .. c_n`` (common to both charts), ``h0`` a function on
    the cusp chart and ``h1`` a function on the smooth chart.  The new
    expansion is recomputed in full: ``v0`` is written in ``w1``, then ``w1``
    in ``v1`` by reversion.
    """
    if s.X is None or s.Y is None:
        raise PreconditionError("reparametrization needs the coordinate maps X, Y")
    n = s.claimed_type
    N_w, window = s.N_w, s.window
    w = MSeries.variable(N_w, window)
    E = s.expansion.as_mseries()
    poly = PSeries([0, 1, *[to_scalar(c) for c in consts]], max(N_w, len(consts) + 1))
    v0 = compose(poly, E)
    v1 = compose(poly, w)
    if h0 is not None and h0:
        v0 = v0 + h0.evaluate(s.X, s.Y) * E ** (n + 1)
    if h1 is not None:
        h1m = _as_fiber_function(h1, window, N_w)
        if h1m:
            v1 = v1 + h1m * w ** (n + 1)
    w_of_v = reversion(v1)
    newE = compose(v0, w_of_v)
    X = compose(s.X, w_of_v)
    Y = compose(s.Y, w_of_v)
    t = n if claimed_type is None else claimed_type
    return SystemN(TransitionExpansion.from_mseries(newE), t, X, Y)


def upgrade_functions(report: ObstructionReport) -> tuple[BSeries, LSeries]:
    """``(G0, G1)`` with ``G0|_C - G1 = f_{n+1}``: minus the split cochain,
    the chart-0 part extended to the polydisc."""
    ch = split(report.representative)
    return extend_to_V0(-ch.alpha0.series), -ch.alpha1


def upgrade(s: SystemN) -> SystemN:
    """A system of type ``n + 1`` built from a type-n system with vanishing class."""
    report = obstruction(s)
    if not report.vanishes:
        raise ObstructionError(
            f"u_{report.order} does not vanish (S = {report.value}); no system of type "
            f"{report.order + 1}",
            value=report.value,
            report=report,
        )
    G0, G1 = upgrade_functions(report)
    n = s.claimed_type
    if not G0 and not G1:
        out = SystemN(s.expansion, n + 1, s.X, s.Y)
    else:
        out = reparametrize(s, (), -G0, -G1, claimed_type=n + 1)
    if not verify_type(out):
        raise AssertionError(f"upgrade failed to produce a system of type {n + 1}")
    return out


def classify_system(s: SystemN, N_max: int) -> Classification:
    if N_max > s.N_w - 1:
        raise InputError(f"max order {N_max} exceeds N_w - 1 = {s.N_w - 1}")
    if N_max < 1:
        raise InputError("max order must be >= 1")
    while True:
        report = obstruction(s)
        log.debug("order %d: S = %s", report.order, report.value)
        if not report.vanishes:
            return Classification("FiniteType", report.order, report, s)
        if s.claimed_type >= N_max:
            return Classification("InfiniteUpTo", N_max, None, s)
        s = upgrade(s)


def classify(a: Atlas, N_max: int) -> Classification:
    """First nonvanishing class up to ``N_max``, else ``InfiniteUpTo(N_max)``."""
    if N_max > a.N_w - 1:
        raise InputError(f"max order {N_max} exceeds N_w - 1 = {a.N_w - 1}")
    return classify_system(system_from_atlas(a), N_max)
