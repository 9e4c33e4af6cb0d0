import numpy as np
import pytest

from semiradius.certifier import (
    aggregate, buzano_sweep, resolve_ranks, run_suite, scaled_settings, tightness_probe,
)
from semiradius.errors import BadShape, NotAnInequality
from semiradius.instances import OPERATOR_NAMES, gen_instance, identity_instance
from semiradius.semihilbert import bind
from semiradius.types import CertifierSettings, CheckId, SuiteReport


# -----------------------------------------------------------------------------
# instances
# -----------------------------------------------------------------------------
def test_full_rank_instance(settings):
    inst = gen_instance(3, 4, 4, settings)
    assert inst.metric.rank == 4
    for T in inst.ops.values():
        op = bind(inst.metric, T, settings)
        assert op.in_half and op.in_full


def test_rank_one_instance_keeps_null_space(settings):
    inst = gen_instance(1, 2, 1, settings)
    m = inst.metric
    assert m.rank == 1
    lam = m.spec.eigenvalues[m.mask]
    assert np.all((lam >= 0.1 - 1e-12) & (lam <= 2.0 + 1e-12))
    null = m.null_basis
    for name in OPERATOR_NAMES:
        leak = np.linalg.norm(m.proj @ inst.ops[name] @ null)
        assert leak <= 1e-12
        op = bind(m, inst.ops[name], settings)
        assert op.in_half and op.in_full


def test_instance_regeneration_is_bit_identical(settings):
    a, b = gen_instance(99, 5, 3, settings), gen_instance(99, 5, 3, settings)
    assert a.metric.A.tobytes() == b.metric.A.tobytes()
    for name in OPERATOR_NAMES:
        assert a.ops[name].tobytes() == b.ops[name].tobytes()
    c = gen_instance(100, 5, 3, settings)
    assert a.ops["T"].tobytes() != c.ops["T"].tobytes()


@pytest.mark.parametrize("dim,rank", [(2, 0), (2, 3), (9, 9), (0, 0)])
def test_gen_instance_rejects_bad_shapes(dim, rank, settings):
    with pytest.raises(BadShape):
        gen_instance(0, dim, rank, settings)


def test_identity_instance(settings):
    inst = identity_instance(5, 3, settings)
    np.testing.assert_allclose(inst.metric.A, np.eye(3))
    assert set(inst.ops) == set(OPERATOR_NAMES)


# -----------------------------------------------------------------------------
# suite
# -----------------------------------------------------------------------------
def test_resolve_ranks():
    assert resolve_ranks([2, 3], "all") == {2: [1, 2], 3: [1, 2, 3]}
    assert resolve_ranks([2, 3], "full") == {2: [2], 3: [3]}
    assert resolve_ranks([2, 3], [3, 1]) == {2: [1], 3: [1, 3]}
    with pytest.raises(BadShape):
        resolve_ranks([2], [5])
    with pytest.raises(BadShape):
        resolve_ranks([2], "some")


def test_resolve_ranks_per_dimension():
    assert resolve_ranks([2, 3], {3: [2, 1]}) == {2: [2], 3: [1, 2]}
    assert resolve_ranks([3], {"3": [1]}) == {3: [1]}
    with pytest.raises(BadShape):
        resolve_ranks([2, 3], {2: [5]})
    with pytest.raises(BadShape):
        resolve_ranks([2], {2: []})


def test_single_trial_suite_passes(settings):
    report = run_suite(dims=[2], ranks=[2], trials=1, base_seed=0, settings=settings, progress=False)
    assert report.passed
    assert len(report.summary) == 14
    assert all(a.count == 1 and a.failures == 0 for a in report.summary.values())
    assert report.meta.ranks == {"2": [2]}


def test_zero_trials_rejected(settings):
    with pytest.raises(BadShape):
        run_suite(dims=[2], trials=0, settings=settings, progress=False)


def test_suite_is_deterministic_and_round_trips(settings):
    kwargs = dict(dims=[2, 3], ranks="all", trials=1, base_seed=5, settings=settings, progress=False)
    first, second = run_suite(**kwargs), run_suite(**kwargs)
    assert first.to_json() == second.to_json()
    assert '"pass": true' in first.to_json()
    assert SuiteReport.from_json(first.to_json()) == first


def test_parallel_suite_matches_serial(settings):
    kwargs = dict(dims=[2], ranks="all", trials=2, base_seed=1, settings=settings, progress=False)
    assert run_suite(workers=2, **kwargs).to_json() == run_suite(workers=1, **kwargs).to_json()


def test_tolerance_scaling(settings):
    scaled = scaled_settings(settings, 10.0)
    assert scaled.semihilbert.tol_eq == pytest.approx(10 * settings.semihilbert.tol_eq)
    assert scaled.semihilbert.tol_ineq == pytest.approx(10 * settings.semihilbert.tol_ineq)
    assert scaled_settings(settings, 1.0) is settings
    with pytest.raises(ValueError):
        scaled_settings(settings, 0.0)


def test_aggregate_records_failures_and_argmin(settings):
    report = run_suite(dims=[2], ranks=[1], trials=3, base_seed=2, settings=settings, progress=False)
    results = [r.model_copy(update={"passed": False, "slack": -1.0, "normalized_slack": -1.0})
               if i == 4 else r for i, r in enumerate(report.results)]
    summary = aggregate(results)
    bad = summary[results[4].check.value]
    assert bad.failures == 1
    assert bad.min_slack == -1.0
    assert bad.argmin_seed == results[4].seed


# -----------------------------------------------------------------------------
# Buzano and the probe
# -----------------------------------------------------------------------------
def test_buzano_sweep_has_no_violations(settings):
    agg, worst = buzano_sweep(2_000, seed=0, dim=3, rank=1, settings=settings)
    assert agg.count == 2_000
    assert agg.failures == 0
    assert agg.min_slack >= -1e-10
    assert worst.slack == agg.min_slack


def test_probe_rejects_equalities(settings):
    with pytest.raises(NotAnInequality):
        tightness_probe(CheckId.SharpOffDiag, dims=[2], iterations=10, settings=settings)


def test_probe_finds_the_tight_offdiagonal_case(settings):
    cfg = settings.model_copy(update={"certifier": CertifierSettings(probe_restarts=3)})
    result = tightness_probe(CheckId.MainOffDiag, dims=[2], iterations=60, seed=0, identity_metric=True, settings=cfg)
    assert result.min_slack <= 1e-9
    assert not result.falsification
    assert result.operators["n"] == 2
    assert set(result.operators) >= {"A", "T", "S", "X", "Y"}


def test_probe_descends(settings):
    cfg = settings.model_copy(update={"certifier": CertifierSettings(probe_restarts=1)})
    result = tightness_probe(CheckId.FullBlock, dims=[2], iterations=40, seed=3, settings=cfg)
    assert result.mode == "independent"
    assert not result.falsification
    slacks = [s.normalized_slack for s in result.trace]
    assert slacks == sorted(slacks, reverse=True)
