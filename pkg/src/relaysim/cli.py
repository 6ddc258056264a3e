"""Command-line front end.

    relaysim <command> --config <path> [--out <path>] [--seed <u64>]
             [--trials <n>] [--starts <n>] [--trace <path>] [--full-precision]

Commands: two-hop, three-hop, multi-source, sweep, verify.  Output is CSV
with a header row.  Exit codes: 0 success, 1 config error, 2 numerical
failure (or a failed verify check), 130 interrupted.
"""

import argparse
import contextlib
import csv
import logging
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import config as cfgmod
from .errors import ConfigError, RelaySimError
from .experiments import iter_sweep
from .threehop import optimize, optimize_multistart
from .twohop import Scheme, evaluate_scheme, optimal_gain_multisource, rate_bits
from .verification import run_all

log = logging.getLogger("relaysim")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_INTERRUPTED = 130

SWEEP_COLUMNS = ["sweep_var", "sweep_value", "scheme", "trials", "mean_snr", "mean_rate_bits", "stderr_rate"]
VERIFY_COLUMNS = ["check_name", "expected", "achieved", "margin", "pass"]
TRUNCATED = "#truncated"

COMMANDS = ("two-hop", "three-hop", "multi-source", "sweep", "verify")


@dataclass
class RunConfig:
    command: str
    params: dict
    out: str = None
    seed: int = None
    trials: int = None
    starts: int = None
    trace: str = None
    precision: int = 6
    full_precision: bool = False

    def fmt(self, x):
        if isinstance(x, (bool, np.bool_)):
            return "true" if x else "false"
        if isinstance(x, (int, np.integer)):
            return str(int(x))
        x = float(x)
        if self.full_precision:
            return repr(x)
        if math.isinf(x) or math.isnan(x):
            return str(x)
        text = f"{x:.{self.precision}f}"
        # tiny negatives would otherwise print as "-0.000000"
        if text.startswith("-") and float(text) == 0.0:
            text = text[1:]
        return text


def _gain_columns(prefix, n):
    cols = []
    for i in range(n):
        cols += [f"{prefix}_{i}_re", f"{prefix}_{i}_im"]
    return cols


def _gain_values(rc, d):
    out = []
    for z in d:
        out += [rc.fmt(z.real), rc.fmt(z.imag)]
    return out


def cmd_two_hop(rc, writer):
    net = cfgmod.two_hop_network(rc.params)
    schemes = cfgmod.parse_schemes(rc.params.get("schemes"), (Scheme.S11, Scheme.S10, Scheme.S00, Scheme.SIID))
    writer.writerow(["scheme", "snr", "rate_bits"] + _gain_columns("gain", net.N))
    for scheme in schemes:
        try:
            ev = evaluate_scheme(net, scheme)
        except RelaySimError as exc:
            raise RelaySimError(f"{scheme}: {exc}") from exc
        writer.writerow([str(ev.scheme), rc.fmt(ev.snr), rc.fmt(ev.rate_bits)] + _gain_values(rc, ev.gain))
    return EXIT_OK


def cmd_multi_source(rc, writer):
    net = cfgmod.multi_source_network(rc.params)
    ev = optimal_gain_multisource(net)
    writer.writerow(["scheme", "snr", "rate_bits"] + _gain_columns("gain", net.N))
    writer.writerow([str(ev.scheme), rc.fmt(ev.snr), rc.fmt(ev.rate_bits)] + _gain_values(rc, ev.gain))
    return EXIT_OK


def cmd_three_hop(rc, writer):
    p = rc.params
    net = cfgmod.three_hop_network(p)
    kwargs = {"tol": float(p.get("tol", 1e-9)), "max_iters": int(p.get("max_iters", 500))}
    if "initializations" in p:
        inits = [cfgmod.parse_vector(d, "initializations") for d in p["initializations"]]
        traces = [optimize(net, d, **kwargs) for d in inits]
        best = int(np.argmax([t.snr for t in traces]))
    else:
        starts = rc.starts if rc.starts is not None else int(p.get("starts", 5))
        seed = cfgmod.resolve_seed(rc.seed, p.get("seed"))
        traces, best = optimize_multistart(net, starts=starts, seed=seed, **kwargs)

    header = ["start", "iterations", "converged", "snr", "rate_bits"]
    header += _gain_columns("d1", net.N) + _gain_columns("d2", net.M)
    writer.writerow(header)

    def row(label, t):
        return [label, rc.fmt(len(t.iterations)), rc.fmt(t.converged), rc.fmt(t.snr), rc.fmt(rate_bits(t.snr))] + (
            _gain_values(rc, t.final.d1) + _gain_values(rc, t.final.d2)
        )

    for i, t in enumerate(traces):
        if not t.converged:
            log.warning("start %d did not converge after %d cycles", i, t.cycles)
        writer.writerow(row(str(i), t))
    writer.writerow(row("best", traces[best]))

    if rc.trace:
        with open(rc.trace, "w", newline="", encoding="utf-8") as fh:
            tw = csv.writer(fh, lineterminator="\n")
            tw.writerow(["start", "iteration", "snr", "direction"])
            for i, t in enumerate(traces):
                for step in t.iterations:
                    tw.writerow([i, step.index, rc.fmt(step.snr), step.direction])
    return EXIT_OK if any(t.converged for t in traces) else EXIT_NUMERICAL


def cmd_sweep(rc, writer, flush):
    spec = cfgmod.sweep_spec(rc.params, seed=rc.seed, trials=rc.trials)
    workers = int(rc.params.get("workers", 1))
    writer.writerow(SWEEP_COLUMNS)
    flush()
    try:
        for point in iter_sweep(spec, workers=workers):
            for scheme in spec.schemes:
                st = point.stats[scheme]
                writer.writerow(
                    [
                        str(spec.sweep_variable),
                        rc.fmt(point.value),
                        str(scheme),
                        rc.fmt(st.trials),
                        rc.fmt(st.mean_snr),
                        rc.fmt(st.mean_rate_bits),
                        rc.fmt(st.stderr_rate),
                    ]
                )
            flush()
    except KeyboardInterrupt:
        writer.writerow([TRUNCATED] + [""] * (len(SWEEP_COLUMNS) - 1))
        flush()
        return EXIT_INTERRUPTED
    return EXIT_OK


def cmd_verify(rc, writer):
    trials = rc.trials if rc.trials is not None else int(rc.params.get("trials", 4000))
    seed = cfgmod.resolve_seed(rc.seed, rc.params.get("seed"))
    writer.writerow(VERIFY_COLUMNS)
    ok = True
    for r in run_all(trials=trials, seed=seed):
        ok &= r.passed
        writer.writerow([r.name, rc.fmt(r.expected), rc.fmt(r.achieved), rc.fmt(r.margin), rc.fmt(r.passed)])
    return EXIT_OK if ok else EXIT_NUMERICAL


def build_parser():
    parser = argparse.ArgumentParser(prog="relaysim", description="AF relay network optimizer and simulator")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON config file (optional for verify)")
    parser.add_argument("--out", help="output CSV path (default: stdout)")
    parser.add_argument("--seed", type=int, help="RNG seed; overrides RELAYSIM_SEED and the config")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per sweep point")
    parser.add_argument("--starts", type=int, help="three-hop multi-start count")
    parser.add_argument("--trace", help="three-hop per-iteration trace CSV path")
    parser.add_argument("--full-precision", action="store_true", help="print floats with repr precision")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _run_config(args):
    if args.config is None:
        if args.command != "verify":
            raise ConfigError(f"{args.command} needs --config")
        params = {}
    else:
        params = cfgmod.load_config(args.config)
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise ConfigError("--seed must be an unsigned 64-bit integer")
    if args.trials is not None and args.trials < 1:
        raise ConfigError("--trials must be positive")
    precision = params.get("precision", 6)
    if isinstance(precision, bool) or not isinstance(precision, int) or precision < 0:
        raise ConfigError("precision must be a nonnegative integer")
    return RunConfig(
        command=args.command,
        params=params,
        out=args.out,
        seed=args.seed,
        trials=args.trials,
        starts=args.starts,
        trace=args.trace,
        precision=precision,
        full_precision=args.full_precision,
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        rc = _run_config(args)
    except ConfigError as exc:
        print(f"relaysim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    with contextlib.ExitStack() as stack:
        if rc.out:
            fh = stack.enter_context(open(rc.out, "w", newline="", encoding="utf-8"))
        else:
            fh = sys.stdout
        writer = csv.writer(fh, lineterminator="\n")
        try:
            if rc.command == "two-hop":
                return cmd_two_hop(rc, writer)
            if rc.command == "multi-source":
                return cmd_multi_source(rc, writer)
            if rc.command == "three-hop":
                return cmd_three_hop(rc, writer)
            if rc.command == "sweep":
                return cmd_sweep(rc, writer, fh.flush)
            return cmd_verify(rc, writer)
        except ConfigError as exc:
            print(f"relaysim: config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except RelaySimError as exc:
            print(f"relaysim: numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        except BrokenPipeError:
            # reader went away (e.g. piped into head); silence the final flush
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
            return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
