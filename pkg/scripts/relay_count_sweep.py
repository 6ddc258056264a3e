"""Mean rate against the number of relays N with one interferer.

P = P_I = 10 dB and P_R = 100.  Prints the least-squares slope of each
scheme's rate against log2 N.
"""

import numpy as np
from _common import parser, summarize, write_sweep

from relaysim.experiments import SweepSpec, run_sweep


def main():
    p = parser(__doc__.splitlines()[0], 10_000, 8, "relay_count.csv")
    p.add_argument("--relay-power", type=float, default=100.0)
    args = p.parse_args()
    grid = (2, 4, 8, 16, 32)
    spec = SweepSpec(
        "num_relays", grid, P=10.0, P_R=args.relay_power, P_I=10.0, Q=1, trials=args.trials, seed=args.seed
    )
    res = run_sweep(spec, workers=args.workers)
    write_sweep(res, args.out)
    summarize(res)
    x = np.log2(grid)
    for s in spec.schemes:
        slope = np.polyfit(x, res.mean_rates(s), 1)[0]
        print(f"{s}: {slope:.4f} bits per doubling of N")


if __name__ == "__main__":
    main()
