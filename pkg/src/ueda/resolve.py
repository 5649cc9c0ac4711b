"""Intersection-lattice bookkeeping for the cusp resolution and its 6:1 cover.

The minimal resolution of an ordinary cusp blows up three points: the cusp
(where the curve has multiplicity 2), then the point of the first exceptional
curve met by the strict transform, then the common point of the strict
transform and the first two exceptional curves.  Everything else (the
multiplicities of the total transform, self-intersections, the cover's
intersection numbers, the contractions) is derived from these centers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError, ContractionStuckError, DomainError, InputError, ParseError

# Each center lists the curves through it with their multiplicity there.
# "C" is the strict transform of the curve; "X1", "X2" the earlier exceptional curves.
CUSP_CENTERS = ({"C": 2}, {"C": 1, "X1": 1}, {"C": 1, "X1": 1, "X2": 1})

# curve-basis naming: last exceptional, second, first, strict transform
DISPLAY_NAMES = {"X3": "C1", "X2": "E1", "X1": "E2", "C": "E3"}


@dataclass(frozen=True)
class DivisorLattice:
    classes: tuple[str, ...]
    intersection: tuple[tuple[int, ...], ...]
    divisors: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = len(self.classes)
        if len(set(self.classes)) != n:
            raise InputError("lattice class names must be distinct")
        if len(self.intersection) != n or any(len(r) != n for r in self.intersection):
            raise InputError("intersection matrix must be square over the classes")
        for i in range(n):
            for j in range(i):
                if self.intersection[i][j] != self.intersection[j][i]:
                    raise InputError(
                        f"intersection matrix not symmetric at ({self.classes[i]}, {self.classes[j]})"
                    )

    def index(self, name: str) -> int:
        try:
            return self.classes.index(name)
        except ValueError:
            raise InputError(f"unknown class {name!r}") from None

    def pair(self, a: str, b: str) -> int:
        return self.intersection[self.index(a)][self.index(b)]

    def dot(self, u: dict, v: dict) -> int:
        return sum(
            cu * cv * self.pair(a, b) for a, cu in u.items() for b, cv in v.items()
        )

    def self_intersection(self, name: str) -> int:
        return self.pair(name, name)

    def to_json(self) -> dict:
        return {
            "classes": list(self.classes),
            "intersection": [list(r) for r in self.intersection],
            "divisors": {k: dict(v) for k, v in sorted(self.divisors.items())},
        }


def _vdot(u: dict, v: dict, gram: dict) -> int:
    return sum(cu * cv * gram[a][b] for a, cu in u.items() for b, cv in v.items())


def _solve(curves: dict[str, dict], target: dict) -> dict[str, int]:
    """Coefficients of ``target`` over the curve vectors (exact Gaussian elimination)."""
    names = list(curves)
    basis = sorted({k for v in curves.values() for k in v} | set(target))
    rows = [[Fraction(curves[c].get(b, 0)) for c in names] + [Fraction(target.get(b, 0))] for b in basis]
    n = len(names)
    r = 0
    pivots = []
    for col in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][col]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    if any(row[-1] for row in rows[r:]):
        raise DomainError("divisor is not in the span of the curve classes")
    out = {}
    for i, col in enumerate(pivots):
        v = rows[i][-1]
        if v.denominator != 1:
            raise DomainError("non-integral multiplicity")
        out[names[col]] = int(v)
    return out


@dataclass(frozen=True)
class Resolution:
    lattice: DivisorLattice
    divisor: dict[str, int]
    blowup_basis: tuple[str, ...]
    curve_vectors: dict

    def to_json(self) -> dict:
        return {
            "lattice": self.lattice.to_json(),
            "divisor": dict(self.divisor),
            "blowup_basis": list(self.blowup_basis),
            "curve_vectors": {k: dict(v) for k, v in self.curve_vectors.items()},
        }


def blow_up_sequence(c_self: int, centers=CUSP_CENTERS):
    """Run the blow-ups.  Returns ``(gram, curves)`` over the basis ``C, e1, e2, ...``.

    Blowing up adds ``e_k`` with ``e_k^2 = -1`` orthogonal to everything else;
    a curve through the center with multiplicity ``m`` becomes ``old - m e_k``.
    """
    gram = {"C": {"C": int(c_self)}}
    curves = {"C": {"C": 1}}
    for k, center in enumerate(centers, start=1):
        e = f"e{k}"
        for row in gram.values():
            row[e] = 0
        gram[e] = {b: 0 for b in gram}
        gram[e][e] = -1
        for name, m in center.items():
            if name not in curves:
                raise InputError(f"center {k} lies on unknown curve {name!r}")
            v = dict(curves[name])
            v[e] = v.get(e, 0) - m
            curves[name] = v
        curves[f"X{k}"] = {e: 1}
    return gram, curves


def resolve_cusp(c_self: int = 0) -> tuple[DivisorLattice, dict[str, int]]:
    """Resolution lattice named ``C1, E1, E2, E3`` and the total transform of the curve."""
    res = resolve_cusp_full(c_self)
    return res.lattice, res.divisor


def resolve_cusp_full(c_self: int = 0) -> Resolution:
    if int(c_self) != c_self:
        raise InputError(f"c_self must be an integer, got {c_self!r}")
    gram, curves = blow_up_sequence(int(c_self))
    total = {"C": 1}  # the pullback of C is the old class; exceptional classes are orthogonal
    mult = _solve(curves, total)
    order = ["X3", "X2", "X1", "C"]
    names = tuple(DISPLAY_NAMES[c] for c in order)
    matrix = tuple(
        tuple(_vdot(curves[a], curves[b], gram) for b in order) for a in order
    )
    divisor = {DISPLAY_NAMES[c]: mult.get(c, 0) for c in order}
    lattice = DivisorLattice(names, matrix, {"pi*C": divisor})
    return Resolution(lattice, divisor, tuple(gram), {DISPLAY_NAMES[c]: curves[c] for c in order})


def self_intersections(lattice: DivisorLattice) -> dict[str, int]:
    return {c: lattice.self_intersection(c) for c in lattice.classes}


# --------------------------------------------------------------------------
# the 6:1 cover


@dataclass(frozen=True)
class CoverConfig:
    """For each downstairs class, the upstairs components as ``(e, f)`` pairs.

    ``e`` is the ramification index along the component and ``f`` the degree
    of the component over its image; ``sum e f`` over a class equals ``degree``.
    ``base`` is the class whose preimage survives the contractions.
    """

    degree: int
    components: dict[str, tuple[tuple[int, int], ...]]
    base: str = "C1"

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "base": self.base,
            "components": {k: [list(p) for p in v] for k, v in sorted(self.components.items())},
        }

    @classmethod
    def from_json(cls, d) -> CoverConfig:
        if not isinstance(d, dict):
            raise ParseError("cover config: top level must be an object")
        try:
            degree = d["degree"]
            comps = d["components"]
        except KeyError as e:
            raise ParseError(f"cover config: missing field {e.args[0]!r}") from None
        if not isinstance(degree, int) or degree < 1:
            raise ParseError("cover config: field 'degree' must be a positive integer")
        if not isinstance(comps, dict):
            raise ParseError("cover config: field 'components' must be an object")
        out = {}
        for name, lst in comps.items():
            if not isinstance(lst, list) or not lst:
                raise ParseError(f"cover config: components.{name} must be a nonempty list")
            pairs = []
            for i, p in enumerate(lst):
                if (
                    not isinstance(p, list) or len(p) != 2
                    or not all(isinstance(x, int) and x >= 1 for x in p)
                ):
                    raise ParseError(
                        f"cover config: components.{name}[{i}] must be [e, f] with positive integers"
                    )
                pairs.append(tuple(p))
            out[name] = tuple(pairs)
        base = d.get("base", "C1")
        if not isinstance(base, str):
            raise ParseError("cover config: field 'base' must be a string")
        return cls(degree, out, base)


def default_cover() -> CoverConfig:
    return CoverConfig(
        6,
        {
            "C1": ((1, 6),),
            "E1": ((2, 1),) * 3,
            "E2": ((3, 1),) * 2,
            "E3": ((6, 1),),
        },
        "C1",
    )


def load_cover(path) -> CoverConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ParseError(f"cover config {path}: malformed JSON ({e.msg} at line {e.lineno})") from None
    except OSError as e:
        raise InputError(f"cover config {path}: {e.strerror}") from None
    return CoverConfig.from_json(data)


def _component_names(cfg: CoverConfig) -> dict[str, list[str]]:
    out = {}
    for cls, comps in cfg.components.items():
        if cls == cfg.base and len(comps) == 1:
            out[cls] = [f"p^-1({cls})"]
        else:
            out[cls] = [f"{cls}~({k})" for k in range(1, len(comps) + 1)]
    return out


@dataclass(frozen=True)
class CoverResult:
    lattice: DivisorLattice
    reduced: dict[str, int]  # D~
    pullback: dict[str, int]  # p*D
    contractible: tuple[str, ...]
    base_components: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "lattice": self.lattice.to_json(),
            "D_tilde": dict(self.reduced),
            "p_star_D": dict(self.pullback),
            "contractible": list(self.contractible),
            "base_components": list(self.base_components),
        }


def _exact_int(q: Fraction, what: str) -> int:
    if q.denominator != 1:
        raise ConfigError(f"{what} = {q} is not an integer")
    return int(q)


def cover_pullback(
    lattice: DivisorLattice, cfg: CoverConfig, divisor: dict[str, int] | None = None
) -> CoverResult:
    """Upstairs lattice and ``D~`` with ``p*D = degree * D~``.

    Components over one class are disjoint and interchangeable, so with
    ``n`` components of type ``(e, f)`` over ``A``: ``P^2 = f A^2 / e`` and
    ``P.Q = f_Q (A.B) / (n_A e_A)`` for ``Q`` over ``B``; the symmetric
    formula must give the same integer.
    """
    if divisor is None:
        divisor = lattice.divisors.get("pi*C")
        if divisor is None:
            raise InputError("no divisor given and the lattice carries no 'pi*C'")
    missing = set(lattice.classes) - set(cfg.components)
    extra = set(cfg.components) - set(lattice.classes)
    if missing or extra:
        raise ConfigError(
            f"components: config classes {sorted(cfg.components)} do not match the lattice "
            f"{sorted(lattice.classes)}"
        )
    if cfg.base not in cfg.components:
        raise ConfigError(f"base: {cfg.base!r} is not a configured class")
    for cls, comps in cfg.components.items():
        total = sum(e * f for e, f in comps)
        if total != cfg.degree:
            raise ConfigError(
                f"components.{cls}: sum of e*f is {total}, must equal the degree {cfg.degree}"
            )
        if len(set(comps)) != 1:
            raise ConfigError(f"components.{cls}: components over one class must share (e, f)")
    names = _component_names(cfg)
    upstairs: list[tuple[str, str, int, int, int]] = []  # (name, class, e, f, n)
    for cls in lattice.classes:
        comps = cfg.components[cls]
        for nm, (e, f) in zip(names[cls], comps):
            upstairs.append((nm, cls, e, f, len(comps)))
    size = len(upstairs)
    M = [[0] * size for _ in range(size)]
    for i, (pn, A, eA, fA, nA) in enumerate(upstairs):
        for j, (qn, B, eB, fB, nB) in enumerate(upstairs):
            AB = lattice.pair(A, B)
            if i == j:
                M[i][j] = _exact_int(Fraction(fA * AB, eA), f"{pn}^2")
            elif A == B:
                M[i][j] = 0  # components over one class are disjoint
            else:
                one = Fraction(fB * AB, nA * eA)
                two = Fraction(fA * AB, nB * eB)
                if one != two:
                    raise ConfigError(
                        f"components: {pn}.{qn} is {one} from {A}'s side but {two} from {B}'s "
                        f"(ramification data inconsistent)"
                    )
                M[i][j] = _exact_int(one, f"{pn}.{qn}")
    up_names = tuple(u[0] for u in upstairs)
    pullbacks = {
        cls: {nm: e for (nm, c, e, f, n) in upstairs if c == cls} for cls in lattice.classes
    }
    up = DivisorLattice(up_names, tuple(tuple(r) for r in M))
    for A in lattice.classes:
        for B in lattice.classes:
            lhs = up.dot(pullbacks[A], pullbacks[B])
            if lhs != cfg.degree * lattice.pair(A, B):
                raise ConfigError(
                    f"components: p*{A}.p*{B} = {lhs} but degree * {A}.{B} = "
                    f"{cfg.degree * lattice.pair(A, B)}"
                )
    pD: dict[str, int] = {}
    for cls, m in divisor.items():
        for nm, e in pullbacks[cls].items():
            pD[nm] = pD.get(nm, 0) + m * e
    if any(v % cfg.degree for v in pD.values()):
        raise ConfigError(f"p*D = {pD} is not divisible by the degree {cfg.degree}")
    reduced = {k: v // cfg.degree for k, v in pD.items()}
    up = DivisorLattice(up_names, up.intersection, {"p*D": pD, "D~": reduced})
    base = tuple(names[cfg.base])
    contractible = tuple(n for n in up_names if n not in base)
    return CoverResult(up, reduced, pD, contractible, base)


# --------------------------------------------------------------------------
# contractions


@dataclass(frozen=True)
class ContractionReport:
    count: int
    contracted: tuple[str, ...]
    final_self_intersections: dict[str, int]
    log: tuple[dict, ...] = ()

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "contracted": list(self.contracted),
            "final_self_intersections": dict(self.final_self_intersections),
            "log": list(self.log),
        }


def contract_chain(lattice: DivisorLattice, contractible) -> ContractionReport:
    """Blow down (-1)-classes among ``contractible`` until none is left.

    Contracting ``P`` changes ``Q.Q'`` by ``(Q.P)(Q'.P)``.
    """
    if isinstance(contractible, CoverResult):
        contractible = contractible.contractible
    names = list(lattice.classes)
    M = {a: {b: lattice.pair(a, b) for b in names} for a in names}
    remaining = [c for c in names if c in set(contractible)]
    done, log = [], []
    while remaining:
        P = next((c for c in remaining if M[c][c] == -1), None)
        if P is None:
            raise ContractionStuckError(
                "no (-1)-class left among "
                + ", ".join(f"{c} (self-intersection {M[c][c]})" for c in remaining)
            )
        rest = [c for c in names if c != P]
        meets = {q: M[q][P] for q in rest}
        for q in rest:
            for r in rest:
                M[q][r] += meets[q] * meets[r]
        names = rest
        remaining.remove(P)
        done.append(P)
        log.append({"contracted": P, "raised": sorted(q for q in rest if meets[q])})
    final = {c: M[c][c] for c in names}
    return ContractionReport(len(done), tuple(done), final, tuple(log))


def ell_from_type(n_bar: int) -> Fraction:
    if isinstance(n_bar, bool) or int(n_bar) != n_bar:
        raise InputError(f"n_bar must be an integer, got {n_bar!r}")
    if n_bar < 1:
        raise DomainError(f"n_bar must be >= 1, got {n_bar}")
    return Fraction(int(n_bar), 6)
