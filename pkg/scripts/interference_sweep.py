"""Mean rate against total interference power for one and for three interferers.

With two relays a single interferer can be nulled, so R11 levels off once
the relays have plenty of power (default P_R = 1e8).  Pass --relay-power 100
to see the moderate-power regime, where every scheme decays.
"""

from _common import parser, summarize, write_sweep

from relaysim.experiments import SweepSpec, db_to_linear, interference_saturation, run_sweep


def main():
    p = parser(__doc__.splitlines()[0], 20_000, 9, "interference.csv")
    p.add_argument("--relay-power", type=float, default=1e8)
    args = p.parse_args()
    grid = tuple(db_to_linear(range(0, 61, 10)))

    rep = interference_saturation(
        N=2, P=10.0, P_R=args.relay_power, grid=grid, Q=1, trials=args.trials, seed=args.seed, workers=args.workers
    )
    write_sweep(rep.result, args.out)
    summarize(rep.result)
    print(
        f"Q=1: R11 top={rep.r11_top:.4f} prev={rep.r11_prev:.4f} threshold={rep.r11_threshold:.4f}; "
        f"R00 top/base={rep.r00_top / rep.r00_base:.4f}; plateau={rep.plateau} "
        f"above={rep.above_threshold} collapsed={rep.collapsed}"
    )

    spec3 = SweepSpec(
        "interference_power", grid, P=10.0, P_R=args.relay_power, N=2, Q=3, trials=args.trials, seed=args.seed
    )
    res3 = run_sweep(spec3, workers=args.workers)
    out3 = args.out if args.out == "-" else args.out.replace(".csv", "_q3.csv")
    write_sweep(res3, out3)
    print("Q=3:")
    summarize(res3)


if __name__ == "__main__":
    main()
