"""Compare the closed-form stationary states and flows against the null-space oracle.

    python3 scripts/validate_closed_forms.py --draws 500 --seed 0
"""

import argparse
import math
import time

import numpy as np

from qtransport import (
    bright_geometry,
    build_rates,
    build_superoperator,
    flow_from_state,
    flow_general,
    stationary_numeric,
    stationarity_residuals,
    total_rate,
)
from qtransport.sampling import random_model


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--draws", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    eps = np.finfo(float).eps
    dev = res = flow_abs = flow_rel = 0.0
    start = time.perf_counter()
    for _ in range(args.draws):
        sys_, reservoirs, _ = random_model(rng)
        rates, geom = build_rates(sys_, reservoirs), bright_geometry(sys_)
        fg = flow_general(rates, geom)
        oracle = stationary_numeric(build_superoperator(rates, geom), geom)
        dev = max(dev, float(np.max(np.abs(fg.state.coordinates - oracle.coordinates))))
        res = max(res, max(abs(r) for r in stationarity_residuals(rates, geom, fg.state).values()))
        F_oracle = flow_from_state(rates, oracle).F
        flow_abs = max(flow_abs, abs(fg.F - F_oracle) / (eps * total_rate(rates, geom)))
        flow_rel = max(flow_rel, abs(fg.F - F_oracle) / max(abs(F_oracle), 1e-300))
    elapsed = time.perf_counter() - start

    print(f"draws                          {args.draws}")
    print(f"max state deviation            {dev:.3e}")
    print(f"max balance residual           {res:.3e}")
    print(f"max flow error / (eps * R)     {flow_abs:.3f}")
    print(f"max flow relative error        {flow_rel:.3e}")
    print(f"time                           {elapsed:.2f} s")
    return 0 if math.isfinite(dev) else 1


if __name__ == "__main__":
    raise SystemExit(main())
