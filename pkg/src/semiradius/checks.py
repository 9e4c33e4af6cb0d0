"""Registry of certified equalities and inequalities.

Every family computes both sides of its claim independently and returns one
or more (label, lhs, rhs) triples. `run_check` turns the worst triple into a
CheckResult:

    inequality  slack = rhs - lhs
    equality    slack = -|lhs - rhs|

and passes when slack >= -tol * (1 + scale), where scale is the largest of
the instance's operand seminorms, |lhs| and |rhs|.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional

import numpy as np

from .blockspace import assemble, double_metric, lemma21_sides, make_block, zero_block
from .errors import DegenerateZ, UnknownCheck
from .instances import Instance
from .semihilbert import (
    Metric, a_inner, a_norm_vec, a_numerical_radius, a_seminorm_op, bind, random_a_unitary, sharp,
)
from .types import CheckClass, CheckId, CheckResult, Settings
from .utils import derive_seed, load_settings

log = logging.getLogger(__name__)


class Side(NamedTuple):
    label: str
    lhs: float
    rhs: float


class CheckSpec(NamedTuple):
    id: CheckId
    kind: CheckClass
    fn: Callable[["CheckContext"], List[Side]]


REGISTRY: Dict[CheckId, CheckSpec] = {}


def register(check_id: CheckId, kind: CheckClass):
    def deco(fn):
        REGISTRY[check_id] = CheckSpec(check_id, kind, fn)
        return fn
    return deco


def get_check(check_id) -> CheckSpec:
    try:
        return REGISTRY[CheckId(check_id)]
    except (ValueError, KeyError):
        raise UnknownCheck(f"unknown check {check_id!r}") from None


def suite_ids() -> List[CheckId]:
    return [c for c in CheckId if c in REGISTRY]


def check_class(check_id) -> CheckClass:
    return get_check(check_id).kind


# -----------------------------------------------------------------------------
# CONTEXT
# -----------------------------------------------------------------------------
@dataclass
class CheckContext:
    """Per-instance memo of seminorms, radii and A-adjoints.

    Values are keyed by the metric ("A" or "AA") and the raw bytes of the
    matrix, so a quantity shared by several families is computed once. The
    norm/radius/sharp methods match blockspace.DirectEvaluator.
    """
    inst: Instance
    settings: Settings
    _metric2: Optional[Metric] = None
    _memo: Dict = field(default_factory=dict)

    @property
    def m(self) -> Metric:
        return self.inst.metric

    @property
    def m2(self) -> Metric:
        if self._metric2 is None:
            self._metric2 = double_metric(self.m)
        return self._metric2

    @property
    def n(self):
        return self.inst.dim

    def op(self, name):
        return self.inst.ops[name]

    def _cached(self, kind, tag, M, compute):
        key = (kind, tag, np.ascontiguousarray(M).tobytes())
        if key not in self._memo:
            self._memo[key] = compute()
        return self._memo[key]

    def _metric(self, tag):
        return self.m if tag == "A" else self.m2

    def norm(self, M, tag="A") -> float:
        return self._cached("norm", tag, M, lambda: a_seminorm_op(bind(self._metric(tag), M, self.settings)).finite())

    def radius(self, M, tag="A") -> float:
        return self._cached(
            "radius", tag, M,
            lambda: a_numerical_radius(bind(self._metric(tag), M, self.settings), settings=self.settings).finite(),
        )

    def sharp(self, M, tag="A"):
        return self._cached("sharp", tag, M, lambda: sharp(bind(self._metric(tag), M, self.settings)))

    def norm2(self, M):
        return self.norm(M, "AA")

    def radius2(self, M):
        return self.radius(M, "AA")

    def off(self, X, Y):
        Z = zero_block(self.n)
        return assemble(Z, X, Y, Z)

    @property
    def scale(self) -> float:
        return max(self.norm(self.op(k)) for k in sorted(self.inst.ops))


# -----------------------------------------------------------------------------
# SECTION 1: BASIC FACTS
# -----------------------------------------------------------------------------
@register(CheckId.NormIdentity, CheckClass.equality)
def norm_identity(ctx: CheckContext) -> List[Side]:
    sides = []
    for name in ("T", "X"):
        B = ctx.op(name)
        Bs = ctx.sharp(B)
        nrm2 = ctx.norm(B) ** 2
        sides.append(Side(f"||{name}#{name}|| = ||{name}||^2", ctx.norm(Bs @ B), nrm2))
        sides.append(Side(f"||{name}{name}#|| = ||{name}||^2", ctx.norm(B @ Bs), nrm2))
        sides.append(Side(f"||{name}#||^2 = ||{name}||^2", ctx.norm(Bs) ** 2, nrm2))
    return sides


@register(CheckId.RadiusEquiv, CheckClass.inequality)
def radius_equiv(ctx: CheckContext) -> List[Side]:
    sides = []
    for name in ("T", "S", "X", "Y"):
        B = ctx.op(name)
        nrm, w = ctx.norm(B), ctx.radius(B)
        sides.append(Side(f"||{name}||/2 <= w({name})", nrm / 2.0, w))
        sides.append(Side(f"w({name}) <= ||{name}||", w, nrm))
    return sides


@register(CheckId.UnitaryInvariance, CheckClass.equality)
def unitary_invariance(ctx: CheckContext) -> List[Side]:
    U = random_a_unitary(ctx.m, derive_seed(ctx.inst.seed, "unitary"), ctx.settings)
    Us = ctx.sharp(U)
    return [Side(f"w(U#{name}U) = w({name})", ctx.radius(Us @ ctx.op(name) @ U), ctx.radius(ctx.op(name)))
            for name in ("T", "X")]


@register(CheckId.PowerIneq, CheckClass.inequality)
def power_inequality(ctx: CheckContext) -> List[Side]:
    sides = []
    for name in ("T", "X"):
        B = ctx.op(name)
        w = ctx.radius(B)
        for k in (2, 3, 4):
            sides.append(Side(f"w({name}^{k}) <= w({name})^{k}", ctx.radius(np.linalg.matrix_power(B, k)), w ** k))
    return sides


# -----------------------------------------------------------------------------
# SECTION 2: BLOCK OPERATORS
# -----------------------------------------------------------------------------
@register(CheckId.Lemma21, CheckClass.equality)
def lemma21(ctx: CheckContext) -> List[Side]:
    T, X, Y, S = (ctx.op(k) for k in ("T", "X", "Y", "S"))
    b = make_block(ctx.m, T, X, Y, S, metric2=ctx.m2, settings=ctx.settings)
    return [Side(s.label, s.lhs, s.rhs) for s in lemma21_sides(b, ctx.settings, ev=ctx)]


def _offdiag_bound_sq(ctx: CheckContext, X, Y) -> float:
    """1/4 max{||X#X + YY#||, ||XX# + Y#Y||} + 1/2 max{w(XY), w(YX)}."""
    Xs, Ys = ctx.sharp(X), ctx.sharp(Y)
    norms = max(ctx.norm(Xs @ X + Y @ Ys), ctx.norm(X @ Xs + Ys @ Y))
    radii = max(ctx.radius(X @ Y), ctx.radius(Y @ X))
    return 0.25 * norms + 0.5 * radii


@register(CheckId.MainOffDiag, CheckClass.inequality)
def main_offdiag(ctx: CheckContext) -> List[Side]:
    X, Y = ctx.op("X"), ctx.op("Y")
    return [Side("w(off(X,Y))^2 <= offdiag bound", ctx.radius2(ctx.off(X, Y)) ** 2, _offdiag_bound_sq(ctx, X, Y))]


@register(CheckId.Remark24Chain, CheckClass.inequality)
def remark24_chain(ctx: CheckContext) -> List[Side]:
    X, Y = ctx.op("X"), ctx.op("Y")
    Xs, Ys = ctx.sharp(X), ctx.sharp(Y)
    lower = np.sqrt(max(ctx.radius(X @ Y), ctx.radius(Y @ X)))
    w = ctx.radius2(ctx.off(X, Y))
    b1 = np.sqrt(_offdiag_bound_sq(ctx, X, Y))
    b2 = np.sqrt(
        0.25 * max(ctx.norm(Xs @ X) + ctx.norm(Y @ Ys), ctx.norm(X @ Xs) + ctx.norm(Ys @ Y))
        + 0.5 * max(ctx.norm(X @ Y), ctx.norm(Y @ X))
    )
    b3 = (ctx.norm(X) + ctx.norm(Y)) / 2.0
    return [
        Side("sqrt max w(XY), w(YX) <= w(off(X,Y))", float(lower), w),
        Side("w(off(X,Y)) <= offdiag bound", w, float(b1)),
        Side("offdiag bound <= triangle bound", float(b1), float(b2)),
        Side("triangle bound <= (||X|| + ||Y||)/2", float(b2), b3),
    ]


@register(CheckId.SelfBound, CheckClass.inequality)
def self_bound(ctx: CheckContext) -> List[Side]:
    sides = []
    for name in ("X", "T"):
        B = ctx.op(name)
        Bs = ctx.sharp(B)
        rhs = 0.5 * np.sqrt(ctx.norm(Bs @ B + B @ Bs) + 2.0 * ctx.radius(B @ B))
        sides.append(Side(f"w({name}) <= self bound", ctx.radius(B), float(rhs)))
    return sides


@register(CheckId.NilpotentHalf, CheckClass.equality)
def nilpotent_half(ctx: CheckContext) -> List[Side]:
    X = ctx.op("X")
    Z = zero_block(ctx.n)
    half = ctx.norm(X) / 2.0
    return [
        Side("w([[0,X],[0,0]]) = ||X||/2", ctx.radius2(assemble(Z, X, Z, Z)), half),
        Side("w([[0,0],[X,0]]) = ||X||/2", ctx.radius2(assemble(Z, Z, X, Z)), half),
    ]


@register(CheckId.RowBound, CheckClass.inequality)
def row_bound(ctx: CheckContext) -> List[Side]:
    T, X, Y, S = (ctx.op(k) for k in ("T", "X", "Y", "S"))
    Z = zero_block(ctx.n)
    return [
        Side("w([[T,X],[0,0]]) <= w(T) + ||X||/2", ctx.radius2(assemble(T, X, Z, Z)), ctx.radius(T) + ctx.norm(X) / 2.0),
        Side("w([[0,0],[Y,S]]) <= w(S) + ||Y||/2", ctx.radius2(assemble(Z, Z, Y, S)), ctx.radius(S) + ctx.norm(Y) / 2.0),
    ]


@register(CheckId.RepeatedRows, CheckClass.inequality)
def repeated_rows(ctx: CheckContext) -> List[Side]:
    T, S = ctx.op("T"), ctx.op("S")
    return [
        Side("w([[T,S],[T,S]]) <= w(T+S) + ||T-S||/2",
             ctx.radius2(assemble(T, S, T, S)), ctx.radius(T + S) + ctx.norm(T - S) / 2.0),
        Side("w([[T,S],[-T,-S]]) <= w(T-S) + ||T+S||/2",
             ctx.radius2(assemble(T, S, -T, -S)), ctx.radius(T - S) + ctx.norm(T + S) / 2.0),
    ]


@register(CheckId.SharpOffDiag, CheckClass.equality)
def sharp_offdiag(ctx: CheckContext) -> List[Side]:
    X = ctx.op("X")
    Xs = ctx.sharp(X)
    Xss = ctx.sharp(Xs)
    nrm = ctx.norm(X)
    both = max(ctx.norm(Xs @ X + Xs @ Xss), ctx.norm(X @ Xs + Xss @ Xs))
    return [
        Side("w([[0,X],[X#,0]]) = ||X||", ctx.radius2(ctx.off(X, Xs)), nrm),
        Side("max ||X#X + X#X##||, ||XX# + X##X#|| = 2||X||^2", both, 2.0 * nrm ** 2),
    ]


@register(CheckId.FullBlock, CheckClass.inequality)
def full_block(ctx: CheckContext) -> List[Side]:
    T, X, Y, S = (ctx.op(k) for k in ("T", "X", "Y", "S"))
    Ts, Xs, Ys, Ss = (ctx.sharp(B) for B in (T, X, Y, S))
    lhs = ctx.radius2(assemble(T, X, Y, S)) ** 2
    rhs = (
        ctx.radius2(ctx.off(X, Y)) ** 2
        + ctx.radius2(ctx.off(X @ S, Y @ T))
        + max(ctx.radius(T) ** 2, ctx.radius(S) ** 2)
        + 0.5 * max(ctx.norm(Ts @ T + X @ Xs), ctx.norm(Ss @ S + Y @ Ys))
    )
    return [Side("w([[T,X],[Y,S]])^2 <= full block bound", lhs, rhs)]


@register(CheckId.SumDiffChain, CheckClass.inequality)
def sum_diff_chain(ctx: CheckContext) -> List[Side]:
    T, X = ctx.op("T"), ctx.op("X")
    Ts, Xs = ctx.sharp(T), ctx.sharp(X)
    wp, wm = ctx.radius(T + X), ctx.radius(T - X)
    wT, wX = ctx.radius(T), ctx.radius(X)
    upper = np.sqrt(wX ** 2 + ctx.radius(X @ T) + wT ** 2 + 0.5 * ctx.norm(X @ Xs + Ts @ T))
    return [
        Side("max w(T), w(X) + |w(T+X) - w(T-X)|/2 <= max w(T+-X)", max(wT, wX) + 0.5 * abs(wp - wm), max(wp, wm)),
        Side("max w(T+-X) <= sum-diff bound", max(wp, wm), float(upper)),
    ]


# -----------------------------------------------------------------------------
# EVALUATION
# -----------------------------------------------------------------------------
def tolerance_for(kind: CheckClass, settings: Settings) -> float:
    cfg = settings.semihilbert
    return cfg.tol_eq if kind is CheckClass.equality else cfg.tol_ineq


def score(kind: CheckClass, lhs, rhs):
    return rhs - lhs if kind is CheckClass.inequality else -abs(lhs - rhs)


def evaluate_sides(check_id: CheckId, kind: CheckClass, sides: List[Side], inst: Instance,
                   base_scale: float, settings: Settings) -> CheckResult:
    tol = tolerance_for(kind, settings)
    worst = None
    for s in sides:
        scale = max(base_scale, abs(s.lhs), abs(s.rhs))
        slack = score(kind, s.lhs, s.rhs)
        normalized = slack / (1.0 + scale)
        if worst is None or normalized < worst[1]:
            worst = (s, normalized, slack, scale)
    s, normalized, slack, scale = worst
    return CheckResult(
        check=check_id,
        seed=inst.seed,
        dim=inst.dim,
        rank=inst.rank,
        lhs=float(s.lhs),
        rhs=float(s.rhs),
        slack=float(slack),
        normalized_slack=float(normalized),
        tolerance=float(tol * (1.0 + scale)),
        passed=bool(normalized >= -tol),
        note=s.label,
    )


def run_check(check_id, inst: Instance, settings: Optional[Settings] = None,
              ctx: Optional[CheckContext] = None) -> CheckResult:
    spec = get_check(check_id)
    settings = settings or load_settings()
    ctx = ctx or CheckContext(inst, settings)
    result = evaluate_sides(spec.id, spec.kind, spec.fn(ctx), inst, ctx.scale, settings)
    if not result.passed:
        log.warning("%s failed on seed=%d dim=%d rank=%d: %s (slack %.3e)",
                    spec.id.value, inst.seed, inst.dim, inst.rank, result.note, result.slack)
    return result


def run_all(inst: Instance, settings: Optional[Settings] = None) -> List[CheckResult]:
    settings = settings or load_settings()
    ctx = CheckContext(inst, settings)
    return [run_check(c, inst, settings, ctx) for c in suite_ids()]


# -----------------------------------------------------------------------------
# BUZANO
# -----------------------------------------------------------------------------
def buzano_check(x, y, z, m2: Metric, seed=0, settings: Optional[Settings] = None) -> CheckResult:
    """|<x,z><z,y>| <= (||x|| ||y|| + |<x,y>|) / 2 for an A-unit z.

    z is normalized here; DegenerateZ signals a z with (numerically) zero
    seminorm so the caller can redraw it.
    """
    settings = settings or load_settings()
    zn = a_norm_vec(m2, z)
    if zn < settings.semihilbert.eps_mem:
        raise DegenerateZ(f"||z|| = {zn:.3e} is below eps_mem")
    z = np.asarray(z, dtype=np.complex128) / zn
    nx, ny = a_norm_vec(m2, x), a_norm_vec(m2, y)
    lhs = abs(a_inner(m2, x, z) * a_inner(m2, z, y))
    rhs = 0.5 * (nx * ny + abs(a_inner(m2, x, y)))
    scale = max(nx * ny, lhs, rhs)
    tol = settings.semihilbert.tol_ineq
    slack = rhs - lhs
    return CheckResult(
        check=CheckId.Buzano,
        seed=int(seed),
        dim=m2.n,
        rank=m2.rank,
        lhs=float(lhs),
        rhs=float(rhs),
        slack=float(slack),
        normalized_slack=float(slack / (1.0 + scale)),
        tolerance=float(tol * (1.0 + scale)),
        passed=bool(slack >= -tol * (1.0 + scale)),
    )
