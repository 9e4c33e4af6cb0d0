import numpy as np
import pytest

from semiradius.blockspace import assemble, double_metric, lemma21_sides, make_block
from semiradius.checks import (
    REGISTRY, CheckContext, buzano_check, check_class, run_all, run_check, suite_ids,
)
from semiradius.errors import DegenerateZ, UnknownCheck
from semiradius.instances import Instance, gen_instance, identity_instance
from semiradius.semihilbert import new_metric
from semiradius.types import CheckClass, CheckId

EQUALITIES = {CheckId.NormIdentity, CheckId.NilpotentHalf, CheckId.SharpOffDiag, CheckId.Lemma21,
              CheckId.UnitaryInvariance}


def test_registry_has_fourteen_families():
    assert len(suite_ids()) == 14
    assert CheckId.Buzano not in REGISTRY
    for cid in suite_ids():
        expected = CheckClass.equality if cid in EQUALITIES else CheckClass.inequality
        assert check_class(cid) is expected


def test_unknown_check():
    with pytest.raises(UnknownCheck):
        check_class("NoSuchCheck")
    with pytest.raises(UnknownCheck):
        check_class(CheckId.Buzano)


@pytest.mark.parametrize("seed,dim,rank", [(0, 2, 2), (1, 2, 1), (7, 3, 2), (11, 4, 1)])
def test_every_family_passes(seed, dim, rank, settings):
    results = run_all(gen_instance(seed, dim, rank, settings), settings)
    assert [r.check for r in results] == suite_ids()
    for r in results:
        assert r.passed, (r.check, r.note, r.slack)
        assert r.tolerance > 0
        tol = settings.semihilbert.tol_eq if r.check in EQUALITIES else settings.semihilbert.tol_ineq
        assert r.normalized_slack == pytest.approx(r.slack * tol / r.tolerance)


def test_equality_slack_is_negated_deviation(settings):
    r = run_check(CheckId.NormIdentity, gen_instance(3, 3, 2, settings), settings)
    assert r.slack == pytest.approx(-abs(r.lhs - r.rhs))
    assert r.slack <= 0


def test_nilpotent_half_example(settings):
    base = gen_instance(0, 2, 2, settings)
    inst = Instance(seed=0, dim=2, rank=2, metric=new_metric(np.diag([2.0, 1.0]), settings=settings),
                    basis=np.eye(2, dtype=complex), ops=dict(base.ops))
    inst = inst.with_ops(X=np.array([[0, 1], [0, 0]]))
    r = run_check(CheckId.NilpotentHalf, inst, settings)
    assert r.lhs == pytest.approx(np.sqrt(2) / 2, abs=1e-9)
    assert r.rhs == pytest.approx(np.sqrt(2) / 2, abs=1e-12)
    assert r.passed


def test_all_zero_operators(settings):
    inst = gen_instance(4, 3, 2, settings)
    Z = np.zeros((3, 3))
    inst = inst.with_ops(T=Z, S=Z, X=Z, Y=Z)
    for r in run_all(inst, settings):
        assert r.passed
        assert abs(r.slack) <= 1e-12


def test_main_offdiag_with_x_equal_y_matches_self_bound(settings):
    inst = gen_instance(6, 3, 2, settings)
    inst = inst.with_ops(Y=inst.ops["X"])
    ctx = CheckContext(inst, settings)
    main = REGISTRY[CheckId.MainOffDiag].fn(ctx)[0]
    own = REGISTRY[CheckId.SelfBound].fn(ctx)[0]
    # w(off(X, X))^2 = w(X)^2 and the right sides coincide after squaring
    assert main.lhs == pytest.approx(own.lhs ** 2, rel=1e-8)
    assert main.rhs == pytest.approx(own.rhs ** 2, rel=1e-10)


def test_main_offdiag_is_tight_for_a_nilpotent(settings):
    inst = identity_instance(0, 2, settings)
    N = np.array([[0, 1], [0, 0]])
    inst = inst.with_ops(X=N, Y=N)
    r = run_check(CheckId.MainOffDiag, inst, settings)
    assert r.lhs == pytest.approx(0.25, abs=1e-12)
    assert r.rhs == pytest.approx(0.25, abs=1e-12)
    assert abs(r.slack) <= 1e-9


def test_remark24_lower_bound_below_certified_radius(settings):
    inst = gen_instance(17, 4, 3, settings)
    ctx = CheckContext(inst, settings)
    chain = REGISTRY[CheckId.Remark24Chain].fn(ctx)
    assert chain[0].lhs <= chain[0].rhs + 1e-9
    assert chain[1].lhs == pytest.approx(np.sqrt(run_check(CheckId.MainOffDiag, inst, settings).lhs), rel=1e-12)


def test_block_identities_share_the_context_memo(settings):
    inst = gen_instance(6, 3, 2, settings)
    ctx = CheckContext(inst, settings)
    via_ctx = REGISTRY[CheckId.Lemma21].fn(ctx)
    b = make_block(inst.metric, *(inst.ops[k] for k in ("T", "X", "Y", "S")), settings=settings)
    direct = lemma21_sides(b, settings)
    assert [s.label for s in via_ctx] == [s.label for s in direct]
    for a, d in zip(via_ctx, direct):
        assert a.lhs == pytest.approx(d.lhs, abs=1e-12)
        assert a.rhs == pytest.approx(d.rhs, abs=1e-12)
    assert ("radius", "A", np.ascontiguousarray(inst.ops["Y"]).tobytes()) in ctx._memo


def test_repeated_rows_bound_with_sum_and_difference_swapped_fails(settings):
    # w([[I,I],[I,I]]) = 2, but w(T-S) + ||T+S||/2 = 0 + 1
    I = np.eye(2)
    inst = identity_instance(0, 2, settings).with_ops(T=I, S=I)
    ctx = CheckContext(inst, settings)
    T, S = ctx.op("T"), ctx.op("S")
    lhs = ctx.radius2(assemble(T, S, T, S))
    swapped = ctx.radius(T - S) + ctx.norm(T + S) / 2.0
    assert lhs == pytest.approx(2.0, abs=1e-12)
    assert swapped == pytest.approx(1.0, abs=1e-12)
    assert lhs > swapped
    assert run_check(CheckId.RepeatedRows, inst, settings).passed


def test_tolerance_scale_is_applied(settings):
    r = run_check(CheckId.RadiusEquiv, gen_instance(2, 3, 3, settings), settings)
    scale = r.tolerance / settings.semihilbert.tol_ineq - 1
    assert scale >= max(abs(r.lhs), abs(r.rhs)) - 1e-9


# -----------------------------------------------------------------------------
# Buzano
# -----------------------------------------------------------------------------
def test_buzano_equality_case(settings):
    m2 = double_metric(new_metric(np.diag([1.0, 0.0]), settings=settings))
    x = np.array([1.0, 0.0, 0.0, 0.0])
    r = buzano_check(x, x, x, m2, settings=settings)
    assert r.lhs == pytest.approx(1.0)
    assert r.rhs == pytest.approx(1.0)
    assert r.passed


def test_buzano_orthogonal_vectors(settings):
    m2 = double_metric(new_metric(np.diag([2.0, 1.0]), settings=settings))
    x = np.array([1.0, 0.0, 0.0, 0.0])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    r = buzano_check(x, y, x, m2, settings=settings)
    assert r.rhs > r.lhs
    assert r.lhs == pytest.approx(0.0, abs=1e-15)


def test_buzano_degenerate_z(settings):
    m2 = double_metric(new_metric(np.diag([1.0, 0.0]), settings=settings))
    with pytest.raises(DegenerateZ):
        buzano_check(np.ones(4), np.ones(4), np.array([0.0, 1.0, 0.0, 1.0]), m2, settings=settings)
