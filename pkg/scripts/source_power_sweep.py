"""Mean rate against source power, showing the schemes converge as P grows.

Two relays, one interferer, P_R = P_I = 10 dB, P from 0 to 40 dB.  Prints
each pairwise rate gap relative to its value at the first grid point.
"""

import itertools

from _common import parser, summarize, write_sweep

from relaysim.experiments import ORDERED_SCHEMES, SweepSpec, db_to_linear, run_sweep


def main():
    args = parser(__doc__.splitlines()[0], 10_000, 21, "source_power.csv").parse_args()
    db = list(range(0, 41, 5))
    spec = SweepSpec(
        "source_power", tuple(db_to_linear(db)), P_R=10.0, P_I=10.0, N=2, Q=1, trials=args.trials, seed=args.seed
    )
    res = run_sweep(spec, workers=args.workers)
    write_sweep(res, args.out)
    summarize(res)

    def gaps(point):
        r = [point.stats[s].mean_rate_bits for s in ORDERED_SCHEMES]
        return {(a, b): r[a] - r[b] for a, b in itertools.combinations(range(4), 2)}

    base = gaps(res.points[0])
    for d, point in zip(db, res.points):
        g = gaps(point)
        rel = " ".join(
            f"{ORDERED_SCHEMES[a]}-{ORDERED_SCHEMES[b]}={g[a, b] / base[a, b]:.3f}" for a, b in base
        )
        print(f"{d:3d} dB  {rel}")


if __name__ == "__main__":
    main()
