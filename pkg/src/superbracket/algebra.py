"""Abstract generators, graded bracket tables and the Jacobi verifier.

Conventions
-----------
* The supercommutator is [x,y] = xy - (-1)^{|x||y|} yx; tables are stored for
  canonically ordered pairs and read backwards with the Koszul sign
  bracket(y,x) = -(-1)^{|x||y|} bracket(x,y).
* A bracket result is a LinComb: generator terms with expression coefficients
  plus an optional pure-scalar term.
* Boosts act on momentum-dependent coefficients as derivations,
  [J_A, f] = i H_A * (convective derivative of f along p_A); every other
  generator commutes with coefficient functions.
* The energy and momentum generators double as coefficient functions.  The
  Jacobi residual therefore combines their generator coefficients with the
  family's dispersion values before taking the modulus, while genuinely
  abstract generators (supercharges, P, K, outer automorphisms) must have
  individually vanishing coefficients.
* Brackets of the gl(2) outer automorphisms with the boosts land on
  additional boost generators outside this closed set, so Jacobi triples
  mixing the two groups are not expressible in the table and are skipped.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from . import expressions as ex
from .errors import InconsistentParams, PoleError
from .expressions import Expr, add, const, convective_diff, mul, neg, quot, var
from .reports import ConsistencyReport
from .sampling import Sampler


class Gen(enum.IntEnum):
    """Closed generator enumeration; the integer order is the normal-form order."""

    H_L = 0
    H_R = 1
    P = 2
    K = 3
    p_L = 4
    p_R = 5
    Q_L = 6
    S_L = 7
    Q_R = 8
    S_R = 9
    B = 10
    t_l0 = 11
    t_l3 = 12
    t_lp = 13
    t_lm = 14
    t_r0 = 15
    t_r3 = 16
    t_rp = 17
    t_rm = 18
    J_L = 19
    J_R = 20

    @property
    def odd(self) -> bool:
        return self in _ODD

    @property
    def parity(self) -> int:
        return 1 if self in _ODD else 0

    @property
    def label(self) -> str:
        return _LABELS[self]


_ODD = {Gen.Q_L, Gen.S_L, Gen.Q_R, Gen.S_R}
OUTER = frozenset({Gen.B, Gen.t_l0, Gen.t_l3, Gen.t_lp, Gen.t_lm,
                   Gen.t_r0, Gen.t_r3, Gen.t_rp, Gen.t_rm})
GL2 = frozenset(OUTER - {Gen.B})
BOOSTS = frozenset({Gen.J_L, Gen.J_R})
CENTRALS = frozenset({Gen.H_L, Gen.H_R, Gen.P, Gen.K, Gen.p_L, Gen.p_R})
VALUE_CARRIERS = (Gen.H_L, Gen.H_R, Gen.p_L, Gen.p_R)
FERMIONS = (Gen.Q_L, Gen.S_L, Gen.Q_R, Gen.S_R)

_LABELS = {
    Gen.H_L: "H_L", Gen.H_R: "H_R", Gen.P: "P", Gen.K: "K",
    Gen.p_L: "p_L", Gen.p_R: "p_R",
    Gen.Q_L: "Q_L", Gen.S_L: "S_L", Gen.Q_R: "Q_R", Gen.S_R: "S_R",
    Gen.B: "B",
    Gen.t_l0: "t^l_0", Gen.t_l3: "t^l_3", Gen.t_lp: "t^l_+", Gen.t_lm: "t^l_-",
    Gen.t_r0: "t^r_0", Gen.t_r3: "t^r_3", Gen.t_rp: "t^r_+", Gen.t_rm: "t^r_-",
    Gen.J_L: "J_L", Gen.J_R: "J_R",
}


def _reversal_sign(a: Gen, b: Gen) -> float:
    """Sign s in bracket(b,a) = s * bracket(a,b)."""
    return 1.0 if (a.parity and b.parity) else -1.0


class LinComb:
    """Finite map generator -> coefficient expression, plus a scalar term."""

    __slots__ = ("terms", "scalar")

    def __init__(self, terms: Optional[Mapping[Gen, Expr]] = None, scalar: Expr = ex.ZERO):
        clean: Dict[Gen, Expr] = {}
        for g, c in (terms or {}).items():
            if not ex.is_const(c, 0):
                clean[g] = c
        self.terms = clean
        self.scalar = scalar

    @staticmethod
    def zero() -> "LinComb":
        return LinComb()

    @staticmethod
    def of(g: Gen, coeff=ex.ONE) -> "LinComb":
        return LinComb({g: ex.coerce(coeff)})

    def __add__(self, other: "LinComb") -> "LinComb":
        terms = dict(self.terms)
        for g, c in other.terms.items():
            terms[g] = add(terms[g], c) if g in terms else c
        return LinComb(terms, add(self.scalar, other.scalar))

    def scale(self, factor) -> "LinComb":
        factor = ex.coerce(factor)
        if ex.is_const(factor, 0):
            return LinComb()
        return LinComb(
            {g: mul(factor, c) for g, c in self.terms.items()},
            mul(factor, self.scalar),
        )

    def __neg__(self) -> "LinComb":
        return self.scale(-1)

    def __sub__(self, other: "LinComb") -> "LinComb":
        return self + other.scale(-1)

    @property
    def structurally_zero(self) -> bool:
        return not self.terms and ex.is_const(self.scalar, 0)

    def coefficient(self, g: Gen) -> Expr:
        return self.terms.get(g, ex.ZERO)

    def __repr__(self):
        if self.structurally_zero:
            return "0"
        parts = [f"({c!r})*{g.label}" for g, c in self.terms.items()]
        if not ex.is_const(self.scalar, 0):
            parts.append(repr(self.scalar))
        return " + ".join(parts)


Element = Union[Gen, LinComb]


def _as_lincomb(x: Element) -> LinComb:
    return x if isinstance(x, LinComb) else LinComb.of(x)


# --------------------------------------------------------------------------
# Family tags
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DZero:
    def __repr__(self):
        return "d_zero"


@dataclass(frozen=True)
class LeftSeparable:
    zeta: float

    def __repr__(self):
        return f"left_separable(zeta={self.zeta})"


@dataclass(frozen=True)
class RightSeparable:
    zeta: float

    def __repr__(self):
        return f"right_separable(zeta={self.zeta})"


@dataclass(frozen=True)
class DPlusOne:
    def __repr__(self):
        return "d_plus_one"


@dataclass(frozen=True)
class DMinusOne:
    def __repr__(self):
        return "d_minus_one"


@dataclass(frozen=True)
class Ratio:
    zeta: float

    def __repr__(self):
        return f"ratio(zeta={self.zeta})"


FamilyTag = Union[DZero, LeftSeparable, RightSeparable, DPlusOne, DMinusOne, Ratio]


@dataclass(frozen=True)
class AlgebraParams:
    h_L: float = 1.0
    h_R: float = 1.0
    dispersion: str = "magnon"  # magnon | relativistic | massive_magnon
    mass: float = 0.0
    kappa: float = 1.0  # integration constant of the ratio-family momentum map
    drop_central_extension: bool = False

    def __post_init__(self):
        if self.dispersion not in ("magnon", "relativistic", "massive_magnon"):
            raise InconsistentParams(f"unknown dispersion {self.dispersion!r}")
        if self.h_L <= 0 or self.h_R <= 0:
            raise InconsistentParams("coupling constants h_L, h_R must be positive")


def dispersion_shape(kind: str, h: float, mass: float, p: Expr) -> Expr:
    """Positive-branch energy as a function of one momentum."""
    if kind == "magnon":
        return mul(const(h), ex.sin(mul(const(0.5), p)))
    if kind == "relativistic":
        return ex.sqrt(add(mul(p, p), const(mass**2)))
    if kind == "massive_magnon":
        s = ex.sin(mul(const(0.5), p))
        return ex.sqrt(add(mul(const(h**2), s, s), const(mass**2)))
    raise InconsistentParams(f"unknown dispersion {kind!r}")


def inverse(e: Expr) -> Expr:
    """1/e as an expression; poles surface at evaluation time."""
    return quot(ex.ONE, e)


# --------------------------------------------------------------------------
# AlgebraSpec
# --------------------------------------------------------------------------

@dataclass
class AlgebraSpec:
    family: FamilyTag
    params: AlgebraParams
    H: Dict[str, Expr]            # side -> energy expression
    Phi: Dict[str, Expr]          # side -> dH/dp in the side's own momentum
    phiQ: Dict[str, Expr]
    phiS: Dict[str, Expr]
    dLR: Expr
    dRL: Expr
    cross: Dict[str, Expr]        # side A -> H_A d_AB / H_B
    table: Dict[Tuple[Gen, Gen], LinComb]
    constraint: Optional[Tuple[Expr, Expr]]  # (p_R = f(p_L), df/dp_L)
    values: Dict[Gen, Expr] = field(default_factory=dict)
    central_set: frozenset = CENTRALS
    _derive_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def zeta(self):
        return getattr(self.family, "zeta", None)

    def row(self, a: Gen, b: Gen) -> LinComb:
        """Table row [a, b]; reversed pairs pick up the Koszul sign."""
        if a == b and not a.odd:
            return LinComb.zero()
        hit = self.table.get((a, b))
        if hit is not None:
            return hit
        hit = self.table.get((b, a))
        if hit is not None:
            return hit.scale(_reversal_sign(a, b))
        return LinComb.zero()

    def derive(self, boost: Gen, f: Expr) -> Expr:
        """Derivation action of a boost on a coefficient: [J_A, f] = i H_A df/dp_A."""
        key = (boost, id(f))
        hit = self._derive_cache.get(key)
        if hit is not None and hit[0] is f:
            return hit[1]
        side = "L" if boost == Gen.J_L else "R"
        v = "pL" if side == "L" else "pR"
        jac = self.dLR if side == "L" else self.dRL
        out = mul(ex.I, self.H[side], convective_diff(f, v, jac))
        self._derive_cache[key] = (f, out)
        return out

    def sample_env(self, s: Sampler) -> dict:
        pl, pr = s.pairs(self.constraint)
        return {"pL": pl + 0j, "pR": pr + 0j}

    def replace_table(self, table: Dict[Tuple[Gen, Gen], LinComb]) -> "AlgebraSpec":
        return AlgebraSpec(
            family=self.family, params=self.params, H=self.H, Phi=self.Phi,
            phiQ=self.phiQ, phiS=self.phiS, dLR=self.dLR, dRL=self.dRL,
            cross=self.cross, table=table, constraint=self.constraint,
            values=self.values,
        )


# --------------------------------------------------------------------------
# Bracket machinery
# --------------------------------------------------------------------------

def bracket(spec: AlgebraSpec, x: Element, y: Element) -> LinComb:
    """Bilinear graded bracket of two linear combinations.

    [f*a, g*b] = f g [a,b] + f (a|>g) b - (-1)^{|a||b|} g (b|>f) a,
    with |> the boost derivation (zero for every other generator).
    """
    lx, ly = _as_lincomb(x), _as_lincomb(y)
    out = LinComb.zero()
    for gx, cx in lx.terms.items():
        for gy, cy in ly.terms.items():
            row = spec.row(gx, gy)
            if not row.structurally_zero:
                out = out + row.scale(mul(cx, cy))
            if gx in BOOSTS:
                d = spec.derive(gx, cy)
                if not ex.is_const(d, 0):
                    out = out + LinComb.of(gy, mul(cx, d))
            if gy in BOOSTS:
                d = spec.derive(gy, cx)
                if not ex.is_const(d, 0):
                    sign = 1.0 if (gx.parity and gy.parity) else -1.0
                    out = out + LinComb.of(gx, mul(const(sign), cy, d))
        if gx in BOOSTS and not ex.is_const(ly.scalar, 0):
            out = out + LinComb(scalar=mul(cx, spec.derive(gx, ly.scalar)))
    if not ex.is_const(lx.scalar, 0):
        for gy, cy in ly.terms.items():
            if gy in BOOSTS:
                out = out + LinComb(scalar=mul(const(-1.0), cy, spec.derive(gy, lx.scalar)))
    return out


def outer_action(spec: AlgebraSpec, t: Gen, x: Gen) -> LinComb:
    """Adjoint action of an outer-automorphism generator; absent rows are zero."""
    if t not in OUTER:
        raise ValueError(f"{t.label} is not an outer-automorphism generator")
    return spec.row(t, x)


def _residual_max(spec: AlgebraSpec, lc: LinComb, env: dict, memo: dict):
    """Max modulus of a LinComb over sampled points (see module docstring)."""
    worst = 0.0
    worst_pt = None

    def track(values):
        nonlocal worst, worst_pt
        arr = np.abs(np.atleast_1d(np.asarray(values)))
        idx = int(np.argmax(arr))
        if float(arr[idx]) > worst:
            worst = float(arr[idx])
            worst_pt = {
                k: complex(np.atleast_1d(np.asarray(v))[idx % np.atleast_1d(np.asarray(v)).size])
                for k, v in env.items()
            }

    combined = None
    for g, c in lc.terms.items():
        cval = c.eval(env, memo)
        if g in VALUE_CARRIERS:
            term = np.asarray(cval) * np.asarray(spec.values[g].eval(env, memo))
            combined = term if combined is None else combined + term
        else:
            track(cval)
    if not ex.is_const(lc.scalar, 0):
        sval = np.asarray(lc.scalar.eval(env, memo))
        combined = sval if combined is None else combined + sval
    if combined is not None:
        track(combined)
    return worst, worst_pt


def jacobi_triples(include_outer: bool = True):
    """Unordered generator triples, skipping boost/gl(2) mixtures."""
    gens = [g for g in Gen if include_outer or g not in OUTER]
    for triple in itertools.combinations_with_replacement(gens, 3):
        tset = set(triple)
        if tset & BOOSTS and tset & GL2:
            continue
        yield triple


def jacobi_check(
    spec: AlgebraSpec,
    s: Sampler,
    include_outer: bool = True,
    max_reported_failures: int = 25,
) -> ConsistencyReport:
    """Graded Jacobi identity over all admissible generator triples.

    Residuals of
      (-1)^{|x||z|}[x,[y,z]] + (-1)^{|y||x|}[y,[z,x]] + (-1)^{|z||y|}[z,[x,y]]
    are evaluated at the sampled points, with the family's momentum
    constraint applied to the samples.
    """
    report = ConsistencyReport(seed=s.seed, tolerance=s.tolerance)
    if s.count == 0:
        report.vacuous = True
        report.note = "no samples"
        return report
    env = spec.sample_env(s)
    memo: dict = {}

    pair_cache: Dict[Tuple[Gen, Gen], LinComb] = {}

    def br(a: Gen, b: Gen) -> LinComb:
        key = (a, b)
        hit = pair_cache.get(key)
        if hit is None:
            hit = bracket(spec, a, b)
            pair_cache[key] = hit
        return hit

    residuals: Dict[tuple, float] = {}
    global_max = 0.0
    global_worst = None
    reported = 0
    for (x, y, z) in jacobi_triples(include_outer):
        s1 = -1.0 if (x.parity and z.parity) else 1.0
        s2 = -1.0 if (y.parity and x.parity) else 1.0
        s3 = -1.0 if (z.parity and y.parity) else 1.0
        lc = bracket(spec, x, br(y, z)).scale(s1)
        lc = lc + bracket(spec, y, br(z, x)).scale(s2)
        lc = lc + bracket(spec, z, br(x, y)).scale(s3)
        if lc.structurally_zero:
            continue
        try:
            value, point = _residual_max(spec, lc, env, memo)
        except PoleError as err:
            raise PoleError(
                f"pole while evaluating triple ({x.label},{y.label},{z.label}): {err}",
                point=err.point,
            ) from err
        residuals[(x.label, y.label, z.label)] = value
        if value > global_max:
            global_max, global_worst = value, point
        if value > s.tolerance and reported < max_reported_failures:
            report.add(f"jacobi({x.label},{y.label},{z.label})", value, point)
            reported += 1
    summary = report.add("jacobi-all-triples", global_max, global_worst)
    summary.note = f"{len(residuals)} non-trivially-evaluated triples"
    report.extra = residuals
    return report


# --------------------------------------------------------------------------
# Family construction
# --------------------------------------------------------------------------

def ratio_momentum_map(kappa: float, gamma_exp: float) -> Tuple[Expr, Expr]:
    """p_R(p_L) = 4 arccot(kappa cot^gamma_exp(p_L/4)) and its p_L-derivative.

    With kappa > 0 and p_L in (0, 2pi) the arccot argument stays positive, so
    p_R stays in (0, 2pi) and sin(p_R/2) keeps the positive branch.
    """
    pl = var("pL")
    f = mul(const(4.0),
            ex.arccot(mul(const(kappa), ex.pow_(ex.cot(mul(const(0.25), pl)), gamma_exp))))
    return f, ex.diff(f, "pL")


def _validate_energy_identification(H: Dict[str, Expr], constraint, d_sign, h_L, h_R):
    """The d = +-1 families only exist when H_R(p_R(p_L)) = d (h_R/h_L) H_L(p_L)."""
    f, _ = constraint
    probes = np.linspace(0.3, math.pi - 0.3, 7) + 0j
    env = {"pL": probes, "pR": np.asarray(f.eval({"pL": probes}))}
    lhs = np.asarray(H["R"].eval(env))
    rhs = d_sign * (h_R / h_L) * np.asarray(H["L"].eval(env))
    if float(np.max(np.abs(lhs - rhs))) > 1e-9:
        raise InconsistentParams(
            "the d = +-1 identification requires H_R(p_R(p_L)) = d (h_R/h_L) H_L(p_L); "
            "this dispersion violates it (it needs equal couplings unless the energy "
            "scales linearly with its coupling)"
        )


def build_algebra(family: FamilyTag, params: AlgebraParams | None = None) -> AlgebraSpec:
    """Complete bracket table for one of the six consistent families."""
    params = params or AlgebraParams()
    pl, pr = var("pL"), var("pR")
    kind, hL, hR, m = params.dispersion, params.h_L, params.h_R, params.mass

    H_L = dispersion_shape(kind, hL, m, pl)
    H_R = dispersion_shape(kind, hR, m, pr)
    constraint = None
    zeta = getattr(family, "zeta", None)
    if zeta is not None and zeta == 0:
        raise InconsistentParams(f"{family!r} requires a nonzero zeta")

    if isinstance(family, DZero):
        dLR, dRL = ex.ZERO, ex.ZERO
    elif isinstance(family, LeftSeparable):
        dLR, dRL = ex.ZERO, mul(const(zeta), H_L)
    elif isinstance(family, RightSeparable):
        dLR, dRL = mul(const(zeta), H_R), ex.ZERO
    elif isinstance(family, DPlusOne):
        dLR = dRL = ex.ONE
        constraint = (pl, ex.ONE)
        _validate_energy_identification({"L": H_L, "R": H_R}, constraint, +1.0, hL, hR)
    elif isinstance(family, DMinusOne):
        dLR = dRL = const(-1.0)
        constraint = (neg(pl), const(-1.0))
        # On the branch p_L in (0, 2pi) the reflected magnon energy
        # h_R sin(p_R/2) is itself negative, which is exactly the d_LR-signed
        # energy; the square-root dispersions need the sign put in by hand.
        if kind != "magnon":
            H_R = neg(dispersion_shape(kind, hR, m, pr))
        _validate_energy_identification({"L": H_L, "R": H_R}, constraint, -1.0, hL, hR)
    elif isinstance(family, Ratio):
        if kind != "magnon":
            raise InconsistentParams(
                "the constant-energy-ratio family uses the closed-form arccot "
                "momentum map, which is specific to the magnon dispersion"
            )
        if params.kappa <= 0:
            raise InconsistentParams("the momentum-map integration constant must be positive")
        gamma_exp = (hR / hL) * float(zeta)
        f, df = ratio_momentum_map(params.kappa, gamma_exp)
        constraint = (f, df)
        dLR = mul(const(zeta), quot(H_R, H_L))
        dRL = quot(H_L, mul(const(zeta), H_R))
    else:
        raise InconsistentParams(f"unknown family {family!r}")

    Phi = {"L": ex.diff(H_L, "pL"), "R": ex.diff(H_R, "pR")}
    half_i = const(0.5j)
    phiQ = {"L": mul(half_i, Phi["L"]), "R": mul(half_i, Phi["R"])}
    phiS = dict(phiQ)
    H = {"L": H_L, "R": H_R}
    cross = {
        "L": ex.ZERO if ex.is_const(dLR, 0) else mul(H_L, dLR, inverse(H_R)),
        "R": ex.ZERO if ex.is_const(dRL, 0) else mul(H_R, dRL, inverse(H_L)),
    }

    table: Dict[Tuple[Gen, Gen], LinComb] = {}

    def put(a: Gen, b: Gen, lc: LinComb):
        """Store [a,b] = lc under the canonical (enum-ordered) key."""
        if lc.structurally_zero:
            return
        if a == b and not a.odd:
            raise ValueError("commutator of an even generator with itself")
        if b < a:
            a, b, lc = b, a, lc.scale(_reversal_sign(a, b))
        if (a, b) in table:
            raise ValueError(f"duplicate table row ({a.label}, {b.label})")
        table[(a, b)] = lc

    i = ex.I
    drop = params.drop_central_extension

    # su(1|1)^2 with the central extension
    put(Gen.Q_L, Gen.S_L, LinComb.of(Gen.H_L))
    put(Gen.Q_R, Gen.S_R, LinComb.of(Gen.H_R))
    if not drop:
        put(Gen.Q_L, Gen.Q_R, LinComb.of(Gen.P))
        put(Gen.S_L, Gen.S_R, LinComb.of(Gen.K))

    # boost rows, same handedness
    for side, J, p_gen, H_gen, Q, S in (
        ("L", Gen.J_L, Gen.p_L, Gen.H_L, Gen.Q_L, Gen.S_L),
        ("R", Gen.J_R, Gen.p_R, Gen.H_R, Gen.Q_R, Gen.S_R),
    ):
        put(J, p_gen, LinComb.of(H_gen, i))
        put(J, H_gen, LinComb.of(H_gen, mul(i, Phi[side])))
        put(J, Q, LinComb.of(Q, phiQ[side]))
        put(J, S, LinComb.of(S, phiS[side]))

    # boost rows, opposite handedness: H_B [J_A, X_B] = H_A d_AB [J_B, X_B]
    for side, other, J, d_AB, H_own in (
        ("L", "R", Gen.J_L, dLR, Gen.H_L),
        ("R", "L", Gen.J_R, dRL, Gen.H_R),
    ):
        if ex.is_const(d_AB, 0):
            continue
        C = cross[side]
        p_gen = Gen.p_R if other == "R" else Gen.p_L
        H_gen = Gen.H_R if other == "R" else Gen.H_L
        Q = Gen.Q_R if other == "R" else Gen.Q_L
        S = Gen.S_R if other == "R" else Gen.S_L
        put(J, p_gen, LinComb.of(H_own, mul(i, d_AB)))
        put(J, H_gen, LinComb.of(H_gen, mul(i, C, Phi[other])))
        put(J, Q, LinComb.of(Q, mul(C, phiQ[other])))
        put(J, S, LinComb.of(S, mul(C, phiS[other])))

    # boost action on the mixed-handed centrals (one boost + two supercharges)
    if not drop:
        put(Gen.J_L, Gen.P, LinComb.of(Gen.P, add(phiQ["L"], mul(cross["L"], phiQ["R"]))))
        put(Gen.J_R, Gen.P, LinComb.of(Gen.P, add(phiQ["R"], mul(cross["R"], phiQ["L"]))))
        put(Gen.J_L, Gen.K, LinComb.of(Gen.K, add(phiS["L"], mul(cross["L"], phiS["R"]))))
        put(Gen.J_R, Gen.K, LinComb.of(Gen.K, add(phiS["R"], mul(cross["R"], phiS["L"]))))

    # hypercharge: charge +-2i on the fermions, zero on everything else
    two_i = const(2j)
    put(Gen.B, Gen.Q_L, LinComb.of(Gen.Q_L, two_i))
    put(Gen.B, Gen.S_L, LinComb.of(Gen.S_L, neg(two_i)))
    put(Gen.B, Gen.Q_R, LinComb.of(Gen.Q_R, neg(two_i)))
    put(Gen.B, Gen.S_R, LinComb.of(Gen.S_R, two_i))

    # gl(2)^2 action on the fermions; the +/- generators mix the two copies
    mixing = {Gen.t_lp, Gen.t_lm, Gen.t_rp, Gen.t_rm}
    t_fermion_rows = [
        (Gen.t_l0, Gen.Q_L, Gen.Q_L, 1), (Gen.t_l3, Gen.Q_L, Gen.Q_L, 1),
        (Gen.t_l0, Gen.S_R, Gen.S_R, 1), (Gen.t_l3, Gen.S_R, Gen.S_R, -1),
        (Gen.t_lp, Gen.S_R, Gen.Q_L, 1), (Gen.t_lm, Gen.Q_L, Gen.S_R, 1),
        (Gen.t_r0, Gen.Q_R, Gen.Q_R, 1), (Gen.t_r3, Gen.Q_R, Gen.Q_R, 1),
        (Gen.t_r0, Gen.S_L, Gen.S_L, 1), (Gen.t_r3, Gen.S_L, Gen.S_L, -1),
        (Gen.t_rp, Gen.Q_R, Gen.S_L, 1), (Gen.t_rm, Gen.S_L, Gen.Q_R, 1),
    ]
    for t, src, dst, sign in t_fermion_rows:
        if drop and t in mixing:
            continue
        put(t, src, LinComb.of(dst, const(sign)))

    # derived action on the central elements (Leibniz through the fermion rows)
    t_central_rows = [
        (Gen.t_l0, Gen.H_L, Gen.H_L, 1), (Gen.t_l0, Gen.H_R, Gen.H_R, 1),
        (Gen.t_l0, Gen.P, Gen.P, 1), (Gen.t_l0, Gen.K, Gen.K, 1),
        (Gen.t_l3, Gen.H_L, Gen.H_L, 1), (Gen.t_l3, Gen.H_R, Gen.H_R, -1),
        (Gen.t_l3, Gen.P, Gen.P, 1), (Gen.t_l3, Gen.K, Gen.K, -1),
        (Gen.t_lp, Gen.H_R, Gen.P, 1), (Gen.t_lp, Gen.K, Gen.H_L, 1),
        (Gen.t_lm, Gen.H_L, Gen.K, 1), (Gen.t_lm, Gen.P, Gen.H_R, 1),
        (Gen.t_r0, Gen.H_L, Gen.H_L, 1), (Gen.t_r0, Gen.H_R, Gen.H_R, 1),
        (Gen.t_r0, Gen.P, Gen.P, 1), (Gen.t_r0, Gen.K, Gen.K, 1),
        (Gen.t_r3, Gen.H_L, Gen.H_L, -1), (Gen.t_r3, Gen.H_R, Gen.H_R, 1),
        (Gen.t_r3, Gen.P, Gen.P, 1), (Gen.t_r3, Gen.K, Gen.K, -1),
        (Gen.t_rp, Gen.H_R, Gen.K, 1), (Gen.t_rp, Gen.P, Gen.H_L, 1),
        (Gen.t_rm, Gen.H_L, Gen.P, 1), (Gen.t_rm, Gen.K, Gen.H_R, 1),
    ]
    for t, c, dst, sign in t_central_rows:
        if drop and (t in mixing or dst in (Gen.P, Gen.K) or c in (Gen.P, Gen.K)):
            continue
        put(t, c, LinComb.of(dst, const(sign)))

    # gl(2) structure inside each copy (required by Jacobi with the fermion
    # action); the lambda and rho copies commute with each other and with B.
    # The +/- labels follow the hypercharge doublets, so t^r_+ lowers the
    # t^r_3 weight: the rho-copy structure constants come out sign-flipped.
    if not drop:
        for t3, tp, tm, w in (
            (Gen.t_l3, Gen.t_lp, Gen.t_lm, 1.0),
            (Gen.t_r3, Gen.t_rp, Gen.t_rm, -1.0),
        ):
            put(t3, tp, LinComb.of(tp, const(2 * w)))
            put(t3, tm, LinComb.of(tm, const(-2 * w)))
            put(tp, tm, LinComb.of(t3, const(w)))

    values = {Gen.H_L: H_L, Gen.H_R: H_R, Gen.p_L: pl, Gen.p_R: pr}

    return AlgebraSpec(
        family=family,
        params=params,
        H=H,
        Phi=Phi,
        phiQ=phiQ,
        phiS=phiS,
        dLR=dLR,
        dRL=dRL,
        cross=cross,
        table=table,
        constraint=constraint,
        values=values,
    )


def mutate_row(spec: AlgebraSpec, key: Tuple[Gen, Gen], factor=2.0) -> AlgebraSpec:
    """Copy of an AlgebraSpec with one table row rescaled (mutation testing)."""
    if key not in spec.table:
        raise KeyError(f"no table row {key}")
    table = dict(spec.table)
    table[key] = table[key].scale(factor)
    return spec.replace_table(table)
