"""Tabulate the flow against the angle between the bright vectors.

The numerator of the flow is exactly proportional to cos^2(alpha); the full
flow is not, and both are printed so the gap is visible.
"""

import argparse
import math

import numpy as np

from qtransport import ReservoirSpec, SystemSpec, angle_family, build_rates, numerator_angle_law


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--beta-em", type=float, default=0.3)
    parser.add_argument("--beta-ph", type=float, default=2.0)
    parser.add_argument("--points", type=int, default=13)
    args = parser.parse_args()

    sys_ = SystemSpec(0.0, 0.8, 2.0, M=2, chi=[1.2, 0.0], psi=[0.9, 0.0])
    reservoirs = [
        ReservoirSpec("em", args.beta_em, 1.0),
        ReservoirSpec("ph", args.beta_ph, 0.8),
        ReservoirSpec("sink", args.beta_ph, 0.5),
    ]
    rates = build_rates(sys_, reservoirs)
    alphas = np.linspace(0.0, math.pi / 2, args.points)
    rows = numerator_angle_law(rates, angle_family(sys_, alphas))
    print(f"{'alpha':>8} {'cos^2':>8} {'F':>12} {'F/F(0)':>8} {'num/cos^2':>12}")
    for r in rows:
        norm = "-" if r.normalized is None else f"{r.normalized:.6e}"
        print(f"{r.alpha:8.4f} {r.cos2:8.4f} {r.F:12.5e} {r.F_over_F0:8.4f} {norm:>12}")


if __name__ == "__main__":
    main()
