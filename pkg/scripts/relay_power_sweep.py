"""Mean rate of the four beamforming schemes against total relay power.

Two relays, one interferer, P = P_I = 10 dB, P_R from 0 to 30 dB.  Also
prints the paired ordering checks R11 >= R10 >= R00 >= Riid.
"""

from _common import parser, summarize, write_sweep

from relaysim.experiments import SweepSpec, db_to_linear, run_sweep, verify_ordering


def main():
    args = parser(__doc__.splitlines()[0], 20_000, 4, "relay_power.csv").parse_args()
    spec = SweepSpec(
        "relay_power",
        tuple(db_to_linear(range(0, 31, 5))),
        P=10.0,
        P_I=10.0,
        N=2,
        Q=1,
        trials=args.trials,
        seed=args.seed,
    )
    res = run_sweep(spec, workers=args.workers, keep_samples=True)
    write_sweep(res, args.out)
    summarize(res)
    for c in verify_ordering(res):
        status = "ok" if c.holds else "VIOLATED"
        print(f"P_R={c.value:8.4g} {c.better}>={c.worse}: gap {c.mean_gap:+.4f} ({c.margin:.1f} se) {status}")


if __name__ == "__main__":
    main()
