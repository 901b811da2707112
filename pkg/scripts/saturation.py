"""Flow against light coupling strength: linear at weak coupling, flat at strong."""

import argparse

import numpy as np

from qtransport import ReservoirSpec, SystemSpec, sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lo", type=float, default=-3.5, help="log10 of the smallest gamma0_em")
    parser.add_argument("--hi", type=float, default=2.5, help="log10 of the largest gamma0_em")
    parser.add_argument("--per-decade", type=int, default=10)
    args = parser.parse_args()

    sys_ = SystemSpec(0.0, 0.8, 2.0, M=2, chi=[1.0, 0.0], psi=[1.0, 0.0])
    reservoirs = [ReservoirSpec("em", 0.2, 1.0), ReservoirSpec("ph", 2.0, 1.0), ReservoirSpec("sink", 2.0, 1.0)]
    n = int(round((args.hi - args.lo) * args.per_decade)) + 1
    table = sweep(sys_, reservoirs, "gamma0_em", np.logspace(args.lo, args.hi, n))
    for p in table.points:
        print(f"{p.value:12.4e} {p.F:14.6e}")
    print(f"monotonicity: {table.monotonicity()}")
    print(f"final-decade relative change: {table.final_decade_change():.4%}")
    if n > args.per_decade:
        print(f"first-decade ratio: {table.F[args.per_decade] / table.F[0]:.4f}")


if __name__ == "__main__":
    main()
