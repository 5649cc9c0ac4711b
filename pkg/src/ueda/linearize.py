"""Order-by-order linearization of an infinite-type neighborhood.

Functions ``F_{j,v}`` are built so that the new defining functions ``u_j``,
given implicitly by ``w_j = u_j + sum_v F_{j,v} u_j^v``, agree on the overlap.
At each order the discrepancy ``J`` is a cocycle; when its class vanishes
it is split, the chart-0 half is extended off the curve and the chart-1 half
is kept as a function of ``zeta`` alone.

Growth is tracked by the majorant ``A(X)``, the solution of
``A - X = c A^2 / (1 - R A)`` with ``c = 2KR(1 + MR)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from .atlas import Atlas, derive_w_transition, normalize
from .cech import Cocycle, annulus_norm, s_functional, split
from .cusp import extend_to_V0
from .errors import (
    ConstantsEstimationError,
    FiniteTypeDetected,
    InputError,
    StagingError,
)
from .obstruction import ObstructionReport, system_from_atlas
from .series import (
    BSeries,
    LSeries,
    MSeries,
    _revert_lists,
    circle_norm,
    compose,
    rational,
    reversion,
    series_to_json,
    to_fraction,
)

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# majorant


def _poly_mul(a, b, n):
    out = [Fraction(0)] * (n + 1)
    for i, ai in enumerate(a):
        if ai:
            for j in range(min(len(b) - 1, n - i) + 1):
                out[i + j] += ai * b[j]
    return out


def majorant_coefficients(c, R, N: int) -> list[Fraction]:
    """``A_2 .. A_N`` for ``A - X = c A^2 / (1 - R A)``.

    Expanding the right side gives ``A_v = c sum_{k=2}^{v} R^(k-2) [X^v] A^k``;
    ``[X^v] A^k`` for ``k >= 2`` only involves ``A_2 .. A_{v-1}``.
    """
    c, R = Fraction(c), Fraction(R)
    A = [Fraction(0), Fraction(1)] + [Fraction(0)] * max(N - 1, 0)
    for v in range(2, N + 1):
        total = Fraction(0)
        power = A[: v + 1]
        for k in range(2, v + 1):
            power = _poly_mul(power, A[: v + 1], v)
            total += R ** (k - 2) * power[v]
        A[v] = c * total
    return A[2:]


def majorant_identity_holds(c, R, A) -> bool:
    """Check ``(A - X)(1 - R A) == c A^2`` coefficient-wise up to the last stored order."""
    c, R = Fraction(c), Fraction(R)
    N = len(A) + 1
    full = [Fraction(0), Fraction(1), *map(Fraction, A)]
    lhs = _poly_mul([Fraction(0), Fraction(0), *full[2:]], [Fraction(1), -R, *[-R * a for a in full[2:]]], N)
    rhs = [c * x for x in _poly_mul(full, full, N)]
    return lhs == rhs


@dataclass(frozen=True)
class MajorantLedger:
    K: Fraction
    R: Fraction
    M: Fraction
    A: tuple[Fraction, ...]  # A[0] is A_2

    def __post_init__(self):
        if self.K < 1 or self.R <= 0 or self.M <= 0:
            raise InputError(f"majorant needs K >= 1, R > 0, M > 0; got {self.K}, {self.R}, {self.M}")

    @property
    def c(self) -> Fraction:
        return 2 * self.K * self.R * (1 + self.M * self.R)

    @property
    def N(self) -> int:
        return len(self.A) + 1

    def A_nu(self, nu: int) -> Fraction:
        if not 2 <= nu <= self.N:
            raise InputError(f"A_{nu} is outside the ledger range 2..{self.N}")
        return self.A[nu - 2]

    def exact(self) -> bool:
        return majorant_identity_holds(self.c, self.R, self.A)

    def to_json(self) -> dict:
        return {
            "K": str(self.K),
            "R": str(self.R),
            "M": str(self.M),
            "c": str(self.c),
            "A": {str(nu): str(a) for nu, a in enumerate(self.A, start=2)},
            "identity_exact": self.exact(),
        }


def majorant_sequence(K, R, M, N: int) -> MajorantLedger:
    K, R, M = Fraction(K), Fraction(R), Fraction(M)
    if K < 1 or R <= 0 or M <= 0:
        raise InputError(f"majorant needs K >= 1, R > 0, M > 0; got {K}, {R}, {M}")
    c = 2 * K * R * (1 + M * R)
    return MajorantLedger(K, R, M, tuple(majorant_coefficients(c, R, N)))


_ROOT_DENOMINATOR = 2**32


def _root_lower_bound(q: Fraction, nu: int) -> Fraction:
    """A rational ``<= q^(1/nu)``, exact when numerator and denominator are perfect powers."""
    p_root, p_exact = gmpy2.iroot(gmpy2.mpz(q.numerator), nu)
    d_root, d_exact = gmpy2.iroot(gmpy2.mpz(q.denominator), nu)
    if p_exact and d_exact:
        return Fraction(int(p_root), int(d_root))
    D = _ROOT_DENOMINATOR
    scaled = (q.numerator * D**nu) // q.denominator
    return Fraction(int(gmpy2.iroot(gmpy2.mpz(scaled), nu)[0]), D)


def radius_estimate(A, start: int = 2) -> Fraction:
    """``min_v A_v^(-1/v)`` rounded down to a rational.

    ``A`` is a sequence indexed from ``start`` or a mapping ``{v: A_v}``.  This is
    a heuristic stand-in for the radius of convergence: it only sees the stored
    coefficients, but it is monotone (larger ``A_v`` never raise it).
    """
    items = A.items() if isinstance(A, dict) else enumerate(A, start=start)
    best = None
    for nu, a in items:
        a = Fraction(a)
        if a <= 0:
            raise InputError(f"A_{nu} must be positive, got {a}")
        r = _root_lower_bound(1 / a, nu)
        best = r if best is None or r < best else best
    if best is None:
        raise InputError("radius_estimate needs at least one coefficient")
    return best


# --------------------------------------------------------------------------
# constants


@dataclass(frozen=True)
class ConstantsReport:
    K: Fraction
    R: Fraction
    M: Fraction
    K0: Fraction
    probe_radii: tuple[Fraction, ...]
    ratios: dict = field(default_factory=dict)  # v -> |f_v| / R^v

    def to_json(self) -> dict:
        return {
            "K": str(self.K),
            "R": str(self.R),
            "M": str(self.M),
            "K0": str(self.K0),
            "probe_radii": [str(r) for r in self.probe_radii],
            "ratios": {str(k): str(v) for k, v in sorted(self.ratios.items())},
        }


def _superexponential(ratios: list[Fraction]) -> bool:
    """Heuristic: the successive quotients ``q_v`` of the nonzero ratios keep
    at least doubling over the last three steps.  Geometric data, with or
    without polynomial factors, have ``q_{v+1} / q_v -> 1``; a pole order
    quadratic in ``v`` keeps that factor bounded away from 1."""
    nz = [r for r in ratios if r]
    if len(nz) < 5:
        return False
    q = [b / a for a, b in zip(nz, nz[1:])]
    return all(y >= 2 * x for x, y in zip(q[-4:], q[-3:]))


def _split_ratio(beta: LSeries, a: Atlas) -> Fraction:
    """``max(|F0|_polydisc, |alpha1|_{r_in}) / |beta|_annulus`` for the split of ``beta``."""
    ch = split(beta)
    rx, ry = a.radii.polydisc
    F0 = extend_to_V0(ch.alpha0.series)
    num = max(F0.weighted_norm(rational(rx), rational(ry)),
              circle_norm(ch.alpha1, rational(a.annulus.r_in)))
    den = annulus_norm(beta, a.annulus)
    return to_fraction(num / den) if den else Fraction(0)


def estimate_constants_report(a: Atlas, probe_radii=None) -> ConstantsReport:
    b = normalize(a)
    exp_ = derive_w_transition(b)
    R = 1 / b.radii.eps1
    if probe_radii is None:
        probe_radii = (b.annulus.r_in, b.annulus.r_out)
    probe_radii = tuple(Fraction(r) for r in probe_radii)
    if not probe_radii or any(r <= 0 for r in probe_radii):
        raise InputError("probe radii must be a nonempty list of positive rationals")
    ratios = {}
    for nu in range(2, exp_.N_w + 1):
        f = exp_.f_nu(nu)
        norm = max(to_fraction(circle_norm(f, rational(r))) for r in probe_radii)
        ratios[nu] = norm / R**nu
    seq = [ratios[nu] for nu in sorted(ratios)]
    if _superexponential(seq):
        raise ConstantsEstimationError(
            "f_v: |f_v| / R^v grows faster than geometrically within the truncation; "
            "no credible M"
        )
    M = max(seq, default=Fraction(0)) or Fraction(1)
    # K0 probe set: the coboundary part (zeta-term removed) of every stored f_v
    K0 = Fraction(0)
    for nu in range(2, exp_.N_w + 1):
        f = exp_.f_nu(nu)
        beta = f - f.part(1, 1)
        if beta:
            K0 = max(K0, _split_ratio(beta, b))
    K = max(3 * K0, Fraction(1))
    return ConstantsReport(K, R, M, K0, probe_radii, ratios)


def estimate_constants(a: Atlas, probe_radii=None) -> tuple[Fraction, Fraction, Fraction]:
    r = estimate_constants_report(a, probe_radii)
    return r.K, r.R, r.M


# --------------------------------------------------------------------------
# state


@dataclass(frozen=True)
class BoundCheck:
    nu: int
    F0_norm: Fraction
    F1_norm: Fraction
    J_norm: Fraction
    A: Fraction

    @property
    def ok(self) -> bool:
        return self.F0_norm <= self.A and self.F1_norm <= self.A

    def to_json(self) -> dict:
        return {
            "nu": self.nu,
            "F0_norm": str(self.F0_norm),
            "F1_norm": str(self.F1_norm),
            "J_norm": str(self.J_norm),
            "A": str(self.A),
            "ok": self.ok,
        }


@dataclass(frozen=True)
class LinearizationState:
    """``F0[i]``, ``F1[i]`` are ``F_{0,i+2}``, ``F_{1,i+2}``; ``order`` is the last built index."""

    order: int
    F0: tuple[BSeries, ...]
    F1: tuple[LSeries, ...]
    ledger: MajorantLedger
    E: MSeries  # w0 as a series in w1 (normalized)
    X: MSeries
    Y: MSeries
    atlas: Atlas
    checks: tuple[BoundCheck, ...] = ()

    @property
    def window(self):
        return self.E.window

    @property
    def N_w(self) -> int:
        return self.E.N_w

    @property
    def degree(self) -> int:
        return 2 * self.atlas.N_zeta


def initial_state(a: Atlas, N: int, probe_radii=None) -> LinearizationState:
    if N < 1:
        raise InputError(f"order must be >= 1, got {N}")
    b = normalize(system_atlas_check(a))
    K, R, M = estimate_constants(b, probe_radii)
    ledger = majorant_sequence(K, R, M, max(N, 2))
    E = derive_w_transition(b).as_mseries()
    return LinearizationState(1, (), (), ledger, E, b.X_trans, b.Y_trans, b)


def system_atlas_check(a: Atlas) -> Atlas:
    system_from_atlas(a)  # raises when the normal bundle is not trivial
    return a


def _P(state: LinearizationState) -> MSeries:
    """``X + sum F_{1,mu} X^mu`` as an MSeries."""
    w = MSeries.variable(state.N_w, state.window)
    P = w
    for mu, F in enumerate(state.F1, start=2):
        if F:
            P = P + MSeries.from_lseries(F, state.N_w) * w**mu
    return P


def _G(state: LinearizationState) -> list[MSeries]:
    return [F.evaluate(state.X, state.Y) for F in state.F0]


def hij_coefficients(state: LinearizationState, ell: int) -> tuple[LSeries, LSeries, LSeries]:
    """``(H, I, J)`` at ``X^ell`` with ``J = I - H``."""
    if ell != state.order + 1:
        raise StagingError(f"ell must be order + 1 = {state.order + 1}, got {ell}")
    if ell > state.N_w:
        raise StagingError(f"ell = {ell} is beyond the fiber truncation N_w = {state.N_w}")
    P = _P(state)
    w = MSeries.variable(state.N_w, state.window)
    H = MSeries.zero(state.N_w, state.window)
    for nu, G in enumerate(_G(state), start=2):
        if not G:
            continue
        G_pos = G - MSeries.from_lseries(G.coeffs[0], state.N_w)
        if G_pos:
            H = H + compose(G_pos, P) * w**nu
    I = compose(state.E - w, P)
    Hl, Il = H.coeffs[ell], I.coeffs[ell]
    return Hl, Il, Il - Hl


def _chart0_reversion(state: LinearizationState) -> list[BSeries]:
    """Coefficients ``b_m(x, y)`` of ``u0 = sum b_m w0^m`` solving ``w0 = u0 + sum F_{0,v} u0^v``."""
    D = state.degree
    zero, one = BSeries({}, D), BSeries.constant(1, D)
    s = [zero, one, *[F.with_degree(D) for F in state.F0]]
    return _revert_lists(s, state.N_w, zero, one)


def u_on_overlap(state: LinearizationState) -> tuple[MSeries, MSeries, list[BSeries]]:
    """``(u0, u1, b)``: both defining functions as series in ``w1`` and the chart-0 coefficients."""
    b = _chart0_reversion(state)
    u0 = MSeries.zero(state.N_w, state.window)
    Epow = MSeries.from_lseries(LSeries.constant(1, state.window), state.N_w)
    for m in range(1, state.N_w + 1):
        Epow = Epow * state.E
        if b[m]:
            u0 = u0 + b[m].evaluate(state.X, state.Y) * Epow
    u1 = reversion(_P(state))
    return u0, u1, b


def overlap_defect(state: LinearizationState, ell: int) -> LSeries:
    """``[w1^ell](u0 - u1)``: an independent route to ``J``."""
    u0, u1, _ = u_on_overlap(state)
    return (u0 - u1).coeffs[ell]


def linearize_step(state: LinearizationState) -> LinearizationState:
    n = state.order
    ell = n + 1
    _, _, J = hij_coefficients(state, ell)
    value = s_functional(J)
    if value:
        report = ObstructionReport(n, Cocycle(J), value)
        raise FiniteTypeDetected(
            f"J_{ell}: nonzero Ueda class at order {n} (S = {value})", value=value, report=report
        )
    ch = split(J)
    F0 = extend_to_V0(-ch.alpha0.series, degree=state.degree)
    F1 = -ch.alpha1
    a = state.atlas
    rx, ry = a.radii.polydisc
    A = state.ledger.A_nu(ell) if ell <= state.ledger.N else None
    check = None
    if A is not None:
        check = BoundCheck(
            ell,
            to_fraction(F0.weighted_norm(rational(rx), rational(ry))),
            to_fraction(circle_norm(F1, rational(a.annulus.r_in))),
            to_fraction(annulus_norm(J, a.annulus)),
            A,
        )
        if not check.ok:
            log.warning("bound ledger violated at order %d: %s", ell, check.to_json())
    return LinearizationState(
        ell,
        state.F0 + (F0,),
        state.F1 + (F1,),
        state.ledger,
        state.E,
        state.X,
        state.Y,
        state.atlas,
        state.checks + ((check,) if check else ()),
    )


@dataclass(frozen=True)
class LinearizationResult:
    u0: MSeries
    u1: MSeries
    agreement_order: int
    ledger: MajorantLedger
    radius: Fraction
    state: LinearizationState
    u0_chart: tuple[BSeries, ...] = ()

    @property
    def checks(self) -> tuple[BoundCheck, ...]:
        return self.state.checks

    @property
    def bounds_ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def certificate(self) -> dict:
        return {
            "ledger": self.ledger.to_json(),
            "radius_estimate": str(self.radius),
            "bound_checks": [c.to_json() for c in self.checks],
            "bounds_ok": self.bounds_ok,
        }

    def to_json(self) -> dict:
        return {
            "u0": series_to_json(self.u0),
            "u1": series_to_json(self.u1),
            "agreement_order": self.agreement_order,
            "F0": {str(nu): series_to_json(F) for nu, F in enumerate(self.state.F0, start=2)},
            "F1": {str(nu): series_to_json(F) for nu, F in enumerate(self.state.F1, start=2)},
        }


def agreement(u0: MSeries, u1: MSeries) -> int:
    """Largest ``k`` with equal coefficients of ``w^0 .. w^k``."""
    k = -1
    for a, b in zip(u0.coeffs, u1.coeffs):
        if a != b:
            break
        k += 1
    return k


def linearize(a: Atlas, N: int, probe_radii=None) -> LinearizationResult:
    if N > a.N_w:
        raise InputError(f"order {N} exceeds the fiber truncation N_w = {a.N_w}")
    state = initial_state(a, N, probe_radii)
    while state.order < N:
        state = linearize_step(state)
        log.debug("linearized to order %d", state.order)
    u0, u1, b = u_on_overlap(state)
    k = agreement(u0, u1)
    if k < N:
        raise AssertionError(f"u0 and u1 differ at w^{k + 1} after linearizing to order {N}")
    return LinearizationResult(
        u0, u1, N, state.ledger, radius_estimate(state.ledger.A), state, tuple(b)
    )
