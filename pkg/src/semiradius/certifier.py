"""Seeded certification sweeps and the tightness probe."""
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from .blockspace import double_metric
from .checks import CheckContext, buzano_check, get_check, run_all, run_check, suite_ids
from .errors import BadShape, DegenerateZ, NotAnInequality
from .instances import MAX_DIM, OPERATOR_NAMES, Instance, allowed_mask, gen_instance, identity_instance
from .matrix_io import dump_matrices
from .semihilbert import a_seminorm_op, bind, sharp
from .types import (
    CheckAggregate, CheckClass, CheckId, CheckResult, ProbeResult, ProbeStep, ReportMeta, Settings, SuiteReport,
)
from .utils import Timer, complex_gaussian, derive_seed, load_settings, rng_stream

log = logging.getLogger(__name__)

RankSpec = Union[str, Sequence[int], Dict[int, Sequence[int]]]


def scaled_settings(settings: Settings, tol_scale: float) -> Settings:
    if tol_scale == 1.0:
        return settings
    if tol_scale <= 0:
        raise ValueError("tol_scale must be positive")
    sh = settings.semihilbert
    sh = sh.model_copy(update={"tol_eq": sh.tol_eq * tol_scale, "tol_ineq": sh.tol_ineq * tol_scale})
    return settings.model_copy(update={"semihilbert": sh})


def resolve_ranks(dims: Iterable[int], ranks: RankSpec = "all") -> Dict[int, List[int]]:
    """"all" -> 1..n, "full" -> [n], a list -> its members <= n.

    A dict maps a dimension to its ranks, all of which must lie in 1..n;
    dimensions it does not name run at full rank.
    """
    out = {}
    for n in dims:
        if not 1 <= n <= MAX_DIM:
            raise BadShape(f"dimension {n} outside 1..{MAX_DIM}")
        if ranks == "all":
            rs = list(range(1, n + 1))
        elif ranks == "full":
            rs = [n]
        elif isinstance(ranks, dict):
            rs = sorted({int(r) for r in ranks.get(n, ranks.get(str(n), [n]))})
            if any(not 1 <= r <= n for r in rs):
                raise BadShape(f"ranks {rs} for dimension {n} must lie in 1..{n}")
        elif isinstance(ranks, str):
            raise BadShape(f"rank spec must be 'all', 'full' or a list, got {ranks!r}")
        else:
            rs = sorted({int(r) for r in ranks if 1 <= int(r) <= n})
        if not rs:
            raise BadShape(f"no admissible rank for dimension {n}")
        out[n] = rs
    return out


def _evaluate(task: Tuple[int, int, int, Settings]) -> List[CheckResult]:
    seed, dim, rank, settings = task
    return run_all(gen_instance(seed, dim, rank, settings), settings)


def aggregate(results: Iterable[CheckResult]) -> Dict[str, CheckAggregate]:
    """Fold results in the given order; ties keep the earliest argmin."""
    summary: Dict[str, CheckAggregate] = {}
    for r in results:
        agg = summary.setdefault(r.check.value, CheckAggregate(check=r.check))
        agg.count += 1
        agg.failures += 0 if r.passed else 1
        if agg.min_normalized_slack is None or r.normalized_slack < agg.min_normalized_slack:
            agg.min_normalized_slack = r.normalized_slack
            agg.argmin_seed, agg.argmin_dim, agg.argmin_rank = r.seed, r.dim, r.rank
        if agg.min_slack is None or r.slack < agg.min_slack:
            agg.min_slack = r.slack
    return summary


def run_suite(
    dims: Optional[Sequence[int]] = None,
    ranks: RankSpec = "all",
    trials: Optional[int] = None,
    base_seed: Optional[int] = None,
    settings: Optional[Settings] = None,
    workers: Optional[int] = None,
    tol_scale: float = 1.0,
    progress: Optional[bool] = None,
) -> SuiteReport:
    from . import __version__

    settings = scaled_settings(settings or load_settings(), tol_scale)
    cfg = settings.certifier
    dims = list(cfg.dims if dims is None else dims)
    trials = cfg.trials if trials is None else trials
    base_seed = cfg.seed if base_seed is None else base_seed
    workers = cfg.workers if workers is None else workers
    progress = cfg.progress if progress is None else progress
    if trials < 1:
        raise BadShape("trials must be at least 1")
    rank_map = resolve_ranks(dims, ranks)

    tasks = [
        (derive_seed(base_seed, dim, rank, t), dim, rank, settings)
        for dim in dims for rank in rank_map[dim] for t in range(trials)
    ]
    log.info("certifying %d instances x %d checks (workers=%d)", len(tasks), len(suite_ids()), workers)
    timer = Timer.start()
    bar = tqdm(total=len(tasks), desc="certify", unit="inst", disable=not (progress and sys.stderr.isatty()))
    per_instance: List[List[CheckResult]] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map yields in submission order, which fixes the fold order
            for rs in pool.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (8 * workers))):
                per_instance.append(rs)
                bar.update(1)
    else:
        for task in tasks:
            per_instance.append(_evaluate(task))
            bar.update(1)
    bar.close()

    results = [r for rs in per_instance for r in rs]
    summary = aggregate(results)
    failures = sum(a.failures for a in summary.values())
    log.info("suite finished in %.0f ms, %d failures", timer.ms(), failures)
    sh = settings.semihilbert
    meta = ReportMeta(
        seed=base_seed,
        dims=dims,
        ranks={str(k): v for k, v in rank_map.items()},
        trials=trials,
        tolerances={"tol_eq": sh.tol_eq, "tol_ineq": sh.tol_ineq, "eps_mem": sh.eps_mem,
                    "eps_rank": settings.kernel.eps_rank},
        version=__version__,
    )
    return SuiteReport(meta=meta, results=results, summary=summary, passed=failures == 0)


# -----------------------------------------------------------------------------
# BUZANO SWEEP
# -----------------------------------------------------------------------------
def buzano_sweep(count: int, seed: int = 0, dim: int = 3, rank: int = 1,
                 settings: Optional[Settings] = None) -> Tuple[CheckAggregate, CheckResult]:
    """Random (x, y, z) triples over the doubled metric of one generated instance.

    A degenerate z is redrawn on an appended stream index, so exactly
    `count` triples are checked. Returns the aggregate and the worst result.
    """
    settings = settings or load_settings()
    m2 = double_metric(gen_instance(seed, dim, rank, settings).metric)
    results = []
    for i in range(count):
        rng = rng_stream(seed, "buzano", dim, rank, i)
        x, y = complex_gaussian(rng, m2.n), complex_gaussian(rng, m2.n)
        attempt = 0
        while True:
            z = complex_gaussian(rng_stream(seed, "buzano-z", dim, rank, i, attempt), m2.n)
            try:
                results.append(buzano_check(x, y, z, m2, seed=seed, settings=settings))
                break
            except DegenerateZ:
                attempt += 1
    summary = aggregate(results)[CheckId.Buzano.value]
    worst = min(results, key=lambda r: r.normalized_slack)
    return summary, worst


# -----------------------------------------------------------------------------
# TIGHTNESS PROBE
# -----------------------------------------------------------------------------
PROBE_MODES = ("independent", "mirrored", "mirrored-selfadjoint")


def _selfadjoint_part(inst: Instance, B, settings):
    return (B + sharp(bind(inst.metric, B, settings))) / 2.0


def _normalize(inst: Instance, B, settings):
    nrm = a_seminorm_op(bind(inst.metric, B, settings)).finite()
    return B / nrm if nrm > settings.semihilbert.eps_mem else B


def _shape_ops(inst: Instance, ops: Dict[str, np.ndarray], mode: str, settings) -> Instance:
    """Tie operators together according to the probe mode, then normalize."""
    ops = dict(ops)
    if mode == "mirrored-selfadjoint":
        ops["X"] = _selfadjoint_part(inst, ops["X"], settings)
        ops["T"] = _selfadjoint_part(inst, ops["T"], settings)
    ops = {k: _normalize(inst, v, settings) for k, v in ops.items()}
    if mode != "independent":
        ops["Y"], ops["S"] = ops["X"], ops["T"]
    return inst.with_ops(**ops)


def _free_names(mode):
    return OPERATOR_NAMES if mode == "independent" else ("T", "X")


def tightness_probe(
    check_id,
    dims: Optional[Sequence[int]] = None,
    iterations: int = 1000,
    seed: int = 0,
    identity_metric: bool = False,
    settings: Optional[Settings] = None,
) -> ProbeResult:
    """Hill descent on the normalized slack of one inequality family.

    Restarts cycle through dimensions, ranks and coupling modes: independent
    operators, Y = X with S = T, and the same with A-selfadjoint X and T.
    Each iteration perturbs one real or imaginary coordinate of one free
    operator in the eigenbasis of A (only coordinates that keep N(A)
    invariant), tries both signs and keeps an improvement. The step shrinks
    by 0.7 after a full round of failures. A minimum below -tol is flagged
    as a falsification candidate and carries the operators that produced it.
    """
    spec = get_check(check_id)
    if spec.kind is not CheckClass.inequality:
        raise NotAnInequality(f"{spec.id.value} is an equality family")
    settings = settings or load_settings()
    cfg = settings.certifier
    dims = list(dims or cfg.dims)
    restarts = cfg.probe_restarts
    per_restart = max(1, iterations // restarts)
    tol = settings.semihilbert.tol_ineq
    timer = Timer.start()

    best: Optional[ProbeResult] = None
    for r in range(restarts):
        dim = dims[r % len(dims)]
        rank = dim if identity_metric else (r // len(dims)) % dim + 1
        mode = PROBE_MODES[r % len(PROBE_MODES)]
        inst_seed = derive_seed(seed, "probe", r)
        base = identity_instance(inst_seed, dim, settings) if identity_metric else gen_instance(inst_seed, dim, rank, settings)
        inst = _shape_ops(base, base.ops, mode, settings)

        def slack_of(candidate):
            return run_check(spec.id, candidate, settings, CheckContext(candidate, settings))

        current = slack_of(inst)
        trace: List[ProbeStep] = []
        rng = rng_stream(inst_seed, "probe-moves")
        coords = np.argwhere(allowed_mask(dim, inst.rank))
        names = _free_names(mode)
        round_len = 2 * len(names) * len(coords)
        step, misses = cfg.probe_step, 0
        Q = inst.basis
        for it in range(per_restart):
            if step < cfg.probe_min_step:
                break
            name = names[rng.integers(len(names))]
            i, j = coords[rng.integers(len(coords))]
            part = "re" if rng.integers(2) == 0 else "im"
            E = np.outer(Q[:, i], np.conj(Q[:, j])) * (1.0 if part == "re" else 1j)
            moved = False
            for delta in (step, -step):
                ops = dict(inst.ops)
                ops[name] = ops[name] + delta * E
                candidate = _shape_ops(inst, ops, mode, settings)
                res = slack_of(candidate)
                if res.normalized_slack < current.normalized_slack:
                    inst, current, moved = candidate, res, True
                    trace.append(ProbeStep(restart=r, iteration=it, operator=name, row=int(i), col=int(j),
                                           part=part, delta=delta, normalized_slack=res.normalized_slack))
                    break
            if moved:
                misses = 0
            else:
                misses += 1
                if misses >= round_len:
                    step *= 0.7
                    misses = 0

        log.debug("probe restart %d (%s, n=%d, r=%d): min normalized slack %.3e",
                  r, mode, dim, inst.rank, current.normalized_slack)
        if best is None or current.normalized_slack < best.min_normalized_slack:
            best = ProbeResult(
                check=spec.id, dim=dim, rank=inst.rank, seed=inst_seed, mode=mode, iterations=per_restart,
                min_slack=current.slack, min_normalized_slack=current.normalized_slack,
                falsification=current.normalized_slack < -tol, trace=trace,
                operators=dump_matrices(dim, A=inst.metric.A, **inst.ops),
            )

    log.info("probe %s: min normalized slack %.3e in %.0f ms", spec.id.value, best.min_normalized_slack, timer.ms())
    if best.falsification:
        log.warning("probe %s found a FALSIFICATION candidate (slack %.3e)", spec.id.value, best.min_slack)
    return best
