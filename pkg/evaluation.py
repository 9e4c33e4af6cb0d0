import argparse
import json
import os
import sys
# Local imports - ensuring paths work whether ran from root or scripts/
sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

import numpy as np

from semiradius import bind, new_metric
from semiradius.certifier import buzano_sweep, run_suite, tightness_probe
from semiradius.instances import gen_instance
from semiradius.kernel import dense_grid_radius, numerical_radius_classical
from semiradius.semihilbert import a_numerical_radius
from semiradius.types import CheckId
from semiradius.utils import Timer, derive_seed, load_settings, setup_logging


def run_benchmark(args):
    print("🚀 Starting semiradius acceptance run...")
    print("---------------------------------------------")
    settings = load_settings(args.config)
    setup_logging(settings.logging.level)
    metrics = {}

    # -------------------------------------------------------------------------
    # 1. FULL SWEEP + DETERMINISM
    # -------------------------------------------------------------------------
    print(f"\n[1/5] Certifying dims {args.dims} x all ranks x {args.trials} trials...")
    timer = Timer.start()
    report = run_suite(dims=args.dims, ranks="all", trials=args.trials, base_seed=0,
                       settings=settings, workers=args.workers)
    elapsed = timer.ms()
    text = report.to_json()
    metrics["sweep"] = {
        "instances": len(report.results) // max(1, len(report.summary)),
        "checks": len(report.results),
        "pass": report.passed,
        "seconds": elapsed / 1000.0,
        "workers": args.workers,
        "min_normalized_slack": {k: a.min_normalized_slack for k, a in report.summary.items()},
    }
    print(f"  {'✅' if report.passed else '❌'} {len(report.results)} checks in {elapsed / 1000.0:.1f}s")

    if not args.skip_determinism:
        again = run_suite(dims=args.dims, ranks="all", trials=args.trials, base_seed=0,
                          settings=settings, workers=args.workers).to_json()
        metrics["sweep"]["deterministic"] = again == text
        print(f"  {'✅' if again == text else '❌'} second run byte-identical")

    os.makedirs("artifacts", exist_ok=True)
    with open("artifacts/report.json", "w", encoding="utf-8") as f:
        f.write(text)

    # -------------------------------------------------------------------------
    # 2. METHOD CROSS-VALIDATION
    # -------------------------------------------------------------------------
    print("\n[2/5] Compression vs theta-sup vs sampling...")
    agree, close, total = 0, 0, 0
    worst_gap = 0.0
    for t in range(args.method_instances):
        dim = 2 + t % 3
        rank = 1 + (t // 3) % dim
        inst = gen_instance(derive_seed(7, "methods", t), dim, rank, settings)
        op = bind(inst.metric, inst.ops["T"], settings)
        w = a_numerical_radius(op, "compression", settings=settings).finite()
        w_theta = a_numerical_radius(op, "theta", settings=settings).finite()
        w_samp = a_numerical_radius(op, "sampling", count=args.samples, seed=t, settings=settings).finite()
        total += 1
        agree += abs(w - w_theta) <= 1e-6 * (1.0 + w)
        close += w - w_samp <= 1e-2 * (1.0 + w)
        worst_gap = max(worst_gap, abs(w - w_theta))
    metrics["methods"] = {"instances": total, "theta_agreement": agree / total, "sampling_within_1e-2": close / total,
                          "max_theta_gap": worst_gap}
    print(f"  {'✅' if agree == total else '❌'} theta-sup agreement {agree}/{total}")
    print(f"  {'✅' if close >= 0.99 * total else '❌'} sampling within 1e-2: {close}/{total}")

    # -------------------------------------------------------------------------
    # 3. CLASSICAL REDUCTION AT A = I
    # -------------------------------------------------------------------------
    print("\n[3/5] Classical numerical radius at A = I...")
    m2 = new_metric(np.eye(2), settings=settings)
    errors = {}
    for c in (1.0, 2.0, 1j):
        w = a_numerical_radius(bind(m2, np.array([[0, c], [0, 0]]), settings), settings=settings).finite()
        errors[str(c)] = abs(w - abs(c) / 2.0)
    J = np.diag(np.ones(2), 1).astype(np.complex128)
    w_jordan = numerical_radius_classical(J, settings=settings)
    errors["jordan3"] = abs(w_jordan - np.cos(np.pi / 4))
    errors["jordan3_vs_grid"] = abs(w_jordan - dense_grid_radius(J))
    metrics["classical"] = errors
    ok = max(errors["1.0"], errors["2.0"], errors["1j"]) <= 1e-9 and errors["jordan3"] <= 1e-8
    print(f"  {'✅' if ok else '❌'} max error {max(errors.values()):.2e}")

    # -------------------------------------------------------------------------
    # 4. BUZANO
    # -------------------------------------------------------------------------
    print("\n[4/5] Buzano triples over rank-deficient doubled metrics...")
    agg, worst = buzano_sweep(args.buzano, seed=0, dim=3, rank=1, settings=settings)
    metrics["buzano"] = {"triples": agg.count, "violations": agg.failures, "min_slack": agg.min_slack}
    print(f"  {'✅' if agg.min_slack >= -1e-10 else '❌'} min slack {agg.min_slack:.3e} over {agg.count} triples")

    # -------------------------------------------------------------------------
    # 5. TIGHTNESS WITNESS
    # -------------------------------------------------------------------------
    print("\n[5/5] Tightness probe on MainOffDiag, A = I, n = 2...")
    probe = tightness_probe(CheckId.MainOffDiag, dims=[2], iterations=args.probe_iterations, seed=0,
                            identity_metric=True, settings=settings)
    metrics["tightness"] = {"min_slack": probe.min_slack, "mode": probe.mode, "falsification": probe.falsification}
    print(f"  {'✅' if probe.min_slack <= 1e-9 else '⚠️'} min slack {probe.min_slack:.3e} ({probe.mode})")

    with open("artifacts/metrics.json", "w", encoding="utf-8") as f:
        json.dump(metrics, f, indent=2)
    print("\n✅ Evaluation complete. Metrics saved to artifacts/metrics.json")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default=None)
    ap.add_argument("--dims", type=lambda s: [int(v) for v in s.split(",")], default=[2, 3, 4, 5, 6])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                    help="Worker processes for the sweep; results are identical for any value.")
    ap.add_argument("--method-instances", type=int, default=100)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--buzano", type=int, default=10_000)
    ap.add_argument("--probe-iterations", type=int, default=600)
    ap.add_argument("--skip-determinism", action="store_true")
    run_benchmark(ap.parse_args())
