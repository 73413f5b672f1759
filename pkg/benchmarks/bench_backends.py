"""Benchmark the njit slot loop against the plain-Python fallback.

The two backends produce bit-identical traces (the test suite enforces
this); the only question is speed. The market realization is drawn once
outside the timed region, so the numbers isolate the recurrence loop
that actually differs between backends. Run from the repo root:

    python3 benchmarks/bench_backends.py --horizon 5000 --repeats 5
"""
import argparse
import time

import numpy as np

from leasesim._kernels import HAVE_NUMBA
from leasesim.environment import ScenarioConfig, draw_realization
from leasesim.policies import parse_policy
from leasesim.simulator import _run_loop, default_params


def time_backend(backend, realization, policy, params, freeze_z, repeats):
    def once():
        return _run_loop(
            realization,
            q0=0.0,
            z0=0.0,
            t0=1,
            freeze_z=freeze_z,
            policy=policy,
            params=params,
            backend=backend,
        )

    once()  # untimed warm-up so numba's compile cost is not billed to the loop
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        once()
        samples.append(time.perf_counter() - start)
    return samples


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--horizon", type=int, default=5000, help="slots per run")
    parser.add_argument("--repeats", type=int, default=5, help="timed runs per backend")
    parser.add_argument("--policy", default="dsf", help="policy string to simulate")
    args = parser.parse_args()

    scenario = ScenarioConfig(horizon_slots=args.horizon)
    policy = parse_policy(args.policy)
    params = default_params(scenario, v=10.0, eps_d=1.0)
    realization = draw_realization(scenario)

    backends = ["python"] + (["numba"] if HAVE_NUMBA else [])
    if not HAVE_NUMBA:
        print("numba not importable; timing the python backend only")

    results = {}
    for backend in backends:
        samples = time_backend(backend, realization, policy, params, False, args.repeats)
        results[backend] = samples
        print(
            f"{backend:>7s}: best {min(samples) * 1e3:8.3f} ms   "
            f"mean {np.mean(samples) * 1e3:8.3f} ms   over {args.repeats} runs"
        )

    if "numba" in results:
        speedup = min(results["python"]) / min(results["numba"])
        print(f"speedup: {speedup:.1f}x (best python / best numba, {args.horizon} slots)")


if __name__ == "__main__":
    main()
