import numpy as np
import pytest

from semiradius.blockspace import (
    assemble, rotate_block_rows, double_metric, lemma21_residuals, lemma21_sides, make_block, split,
    rotation_unitary, zero_block,
)
from semiradius.errors import DimensionMismatch
from semiradius.instances import gen_instance
from semiradius.semihilbert import (
    a_inner, a_numerical_radius, bind, identity_metric, is_a_unitary, new_metric,
)
from tests.helpers import random_complex


def test_double_metric_examples(settings):
    m2 = double_metric(identity_metric(2, settings))
    np.testing.assert_allclose(m2.A, np.eye(4))
    assert m2.rank == 4

    m2 = double_metric(new_metric(np.diag([1.0, 0.0]), settings=settings))
    np.testing.assert_allclose(m2.A, np.diag([1.0, 0.0, 1.0, 0.0]))
    np.testing.assert_allclose(m2.proj, np.diag([1.0, 0.0, 1.0, 0.0]), atol=1e-15)
    assert m2.rank == 2


def test_double_metric_inner_product_is_additive(settings):
    m = gen_instance(13, 3, 2, settings).metric
    m2 = double_metric(m)
    assert m2.rank == 2 * m.rank
    np.testing.assert_allclose(m2.A @ m2.pinv @ m2.A, m2.A, atol=1e-12)
    rng = np.random.default_rng(13)
    for _ in range(100):
        x, y = random_complex(rng, (2, 6))
        both = a_inner(m2, x, y)
        parts = a_inner(m, x[:3], y[:3]) + a_inner(m, x[3:], y[3:])
        assert abs(both - parts) <= 1e-12 * (1 + abs(parts))


def test_assemble_and_split_place_blocks(rng):
    T, X, Y, S = random_complex(rng, (4, 2, 2))
    M = assemble(T, X, Y, S)
    np.testing.assert_array_equal(M[:2, 2:], X)
    np.testing.assert_array_equal(M[2:, :2], Y)
    for a, b in zip(split(M), (T, X, Y, S)):
        np.testing.assert_array_equal(a, b)


def test_make_block(settings):
    m = identity_metric(2, settings)
    Z = zero_block(2)
    b = make_block(m, Z, Z, Z, Z, settings=settings)
    assert not np.any(b.assembled)
    assert a_numerical_radius(b.op, settings=settings).finite() == 0.0
    np.testing.assert_allclose(b.metric2.A, np.eye(4))
    with pytest.raises(DimensionMismatch):
        make_block(m, Z, Z, Z, np.zeros((3, 3)), settings=settings)


def test_lemma21_analytic_at_identity(settings):
    m = identity_metric(2, settings)
    X, Y = np.diag([1.0, -2.0]), np.diag([0.5, 3.0])
    b = make_block(m, np.diag([1.0, 1.0]), X, Y, np.diag([2.0, 0.0]), settings=settings)
    r = lemma21_residuals(b, settings)
    assert r.worst() <= 1e-12


def test_lemma21_random_rank_deficient(settings):
    inst = gen_instance(21, 4, 2, settings)
    ops = inst.ops
    b = make_block(inst.metric, ops["T"], ops["X"], ops["Y"], ops["S"], settings=settings)
    r = lemma21_residuals(b, settings)
    assert r.worst() <= 1e-7


def test_lemma21_symmetric_offdiagonal(settings):
    inst = gen_instance(22, 3, 1, settings)
    Y = inst.ops["Y"]
    b = make_block(inst.metric, inst.ops["T"], Y, Y, inst.ops["S"], settings=settings)
    sides = {s.label: s for s in lemma21_sides(b, settings)}
    assert sides["(iv) symmetric off-diagonal"].residual <= 1e-7 * (1 + sides["(iv) symmetric off-diagonal"].rhs)


def test_rotation_unitary_is_a_unitary(settings):
    inst = gen_instance(5, 3, 1, settings)
    m2 = double_metric(inst.metric)
    assert is_a_unitary(bind(m2, rotation_unitary(3), settings), settings)


def test_rotate_block_rows(settings):
    inst = gen_instance(28, 3, 2, settings)
    out, residual = rotate_block_rows(inst.metric, inst.ops["T"], inst.ops["S"], settings=settings)
    assert out.shape == (6, 6)
    assert residual <= 1e-10
