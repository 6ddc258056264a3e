"""Monte Carlo sweeps over the common-interference relay model.

Every trial draws ``f, g ~ CN(0, I)`` and ``Q`` interferer channels
``h_k ~ CN(0, I)`` sharing the total interference power equally, builds
``K = sum_k h_k h_k^H P_Ik + I`` and evaluates the requested schemes.

Trial ``t`` always draws from substream ``(seed, t)``, at every sweep
point.  Curves are therefore computed on common random numbers, and the
output does not depend on how trials are split across worker processes.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channel import InterferenceEnv, RngStream, interference_covariance, sample_cn01_matrix
from .errors import RelaySimError, SweepPointFailed
from .twohop import Scheme, TwoHopNetwork, evaluate_schemes

__all__ = [
    "SweepVariable",
    "SweepSpec",
    "SchemeStats",
    "SweepPoint",
    "SweepResult",
    "db_to_linear",
    "draw_network",
    "simulate_trial",
    "iter_sweep",
    "run_sweep",
    "OrderingCheck",
    "verify_ordering",
    "SaturationReport",
    "interference_saturation",
    "ORDERED_SCHEMES",
]

log = logging.getLogger(__name__)

ORDERED_SCHEMES = (Scheme.S11, Scheme.S10, Scheme.S00, Scheme.SIID)
MAX_REDRAW_FRACTION = 1e-3
MAX_ATTEMPTS = 16


class SweepVariable(str, Enum):
    RELAY_POWER = "relay_power"
    SOURCE_POWER = "source_power"
    INTERFERENCE_POWER = "interference_power"
    NUM_RELAYS = "num_relays"

    def __str__(self):
        return self.value


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class SweepSpec:
    """One Monte Carlo sweep.  Powers are linear."""

    sweep_variable: SweepVariable
    grid: tuple
    P: float = 10.0
    P_R: float = 10.0
    P_I: float = 10.0
    N: int = 2
    Q: int = 1
    trials: int = 20_000
    seed: int = 0
    schemes: tuple = ORDERED_SCHEMES

    def __post_init__(self):
        object.__setattr__(self, "sweep_variable", SweepVariable(self.sweep_variable))
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ValueError("sweep grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("sweep grid must be strictly increasing")
        if self.sweep_variable is SweepVariable.NUM_RELAYS:
            if any(v != int(v) or v < 1 for v in grid):
                raise ValueError("relay counts must be positive integers")
        schemes = tuple(Scheme(s) for s in self.schemes)
        if not schemes:
            raise ValueError("no schemes requested")
        if Scheme.MULTISOURCE in schemes:
            raise ValueError("multi-source evaluation is not part of the sweeps")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.N < 1 or self.Q < 0:
            raise ValueError("need N >= 1 and Q >= 0")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "schemes", schemes)

    def params_at(self, value):
        """``(P, P_R, P_I, N, Q)`` at one sweep point."""
        P, P_R, P_I, N = self.P, self.P_R, self.P_I, self.N
        var = self.sweep_variable
        if var is SweepVariable.RELAY_POWER:
            P_R = value
        elif var is SweepVariable.SOURCE_POWER:
            P = value
        elif var is SweepVariable.INTERFERENCE_POWER:
            P_I = value
        else:
            N = int(value)
        return P, P_R, P_I, N, self.Q


@dataclass(frozen=True)
class SchemeStats:
    mean_snr: float
    mean_rate_bits: float
    stderr_rate: float
    stderr_snr: float
    trials: int


@dataclass
class SweepPoint:
    value: float
    stats: dict
    redraws: int = 0
    samples: np.ndarray = None  # trials x schemes SNRs, when kept


@dataclass
class SweepResult:
    spec: SweepSpec
    points: list = field(default_factory=list)

    def point(self, value):
        for p in self.points:
            if p.value == value:
                return p
        raise KeyError(value)

    def stats(self, value, scheme):
        return self.point(value).stats[Scheme(scheme)]

    def mean_rates(self, scheme):
        scheme = Scheme(scheme)
        return np.array([p.stats[scheme].mean_rate_bits for p in self.points])

    def mean_snrs(self, scheme):
        scheme = Scheme(scheme)
        return np.array([p.stats[scheme].mean_snr for p in self.points])


def draw_network(spec, value, trial, attempt=0):
    P, P_R, P_I, N, Q = spec.params_at(value)
    gen = RngStream(spec.seed, trial, attempt).generator()
    fg = sample_cn01_matrix(2, N, gen)
    hs = sample_cn01_matrix(Q, N, gen) if Q else np.zeros((0, N), dtype=complex)
    env = InterferenceEnv.equal_split(list(hs), P_I)
    K = interference_covariance(env, 1.0, n=N)
    return TwoHopNetwork(P=P, f=fg[0], P_R=P_R, g=fg[1], K=K)


def simulate_trial(spec, value, trial, attempt=0):
    """Scheme evaluations for one trial (no redraw handling)."""
    return evaluate_schemes(draw_network(spec, value, trial, attempt), spec.schemes)


def _simulate_block(spec, value, start, stop):
    snrs = np.empty((stop - start, len(spec.schemes)))
    redraws = 0
    for i, trial in enumerate(range(start, stop)):
        for attempt in range(MAX_ATTEMPTS):
            try:
                evals = simulate_trial(spec, value, trial, attempt)
            except (RelaySimError, np.linalg.LinAlgError) as exc:
                redraws += 1
                log.debug("trial %d attempt %d failed: %s", trial, attempt, exc)
                continue
            snrs[i] = [e.snr for e in evals]
            break
        else:
            raise SweepPointFailed(f"trial {trial} failed {MAX_ATTEMPTS} times at {value}")
    return snrs, redraws


def _aggregate(spec, value, snrs, redraws, keep_samples):
    if redraws > MAX_REDRAW_FRACTION * spec.trials:
        raise SweepPointFailed(
            f"{redraws} of {spec.trials} trials redrawn at {spec.sweep_variable}={value}"
        )
    if redraws:
        log.warning("%d trials redrawn at %s=%g", redraws, spec.sweep_variable, value)
    n = snrs.shape[0]
    rates = np.log2(1.0 + snrs)
    ddof = 1 if n > 1 else 0
    stats = {}
    for j, scheme in enumerate(spec.schemes):
        stats[scheme] = SchemeStats(
            mean_snr=float(snrs[:, j].mean()),
            mean_rate_bits=float(rates[:, j].mean()),
            stderr_rate=float(rates[:, j].std(ddof=ddof) / math.sqrt(n)),
            stderr_snr=float(snrs[:, j].std(ddof=ddof) / math.sqrt(n)),
            trials=n,
        )
    return SweepPoint(value, stats, redraws, snrs if keep_samples else None)


def _blocks(trials, workers):
    size = math.ceil(trials / workers)
    return [(s, min(s + size, trials)) for s in range(0, trials, size)]


def iter_sweep(spec, workers=1, keep_samples=False):
    """Yield one :class:`SweepPoint` per grid value, in grid order."""
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for value in spec.grid:
            if pool is None:
                snrs, redraws = _simulate_block(spec, value, 0, spec.trials)
            else:
                futures = [
                    pool.submit(_simulate_block, spec, value, a, b)
                    for a, b in _blocks(spec.trials, workers)
                ]
                parts = [fut.result() for fut in futures]
                snrs = np.concatenate([p[0] for p in parts])
                redraws = sum(p[1] for p in parts)
            yield _aggregate(spec, value, snrs, redraws, keep_samples)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


def run_sweep(spec, workers=1, keep_samples=False):
    return SweepResult(spec, list(iter_sweep(spec, workers, keep_samples)))


@dataclass(frozen=True)
class OrderingCheck:
    value: float
    better: Scheme
    worse: Scheme
    mean_gap: float  # mean of paired SNR differences
    stderr: float
    margin: float  # mean_gap / stderr
    holds: bool  # gap >= -1 stderr


def _margin(gap, se):
    if se > 0:
        return gap / se
    if gap == 0:
        return 0.0
    return math.copysign(math.inf, gap)


def verify_ordering(spec_or_result, workers=1):
    """Check ``E[SNR11] >= E[SNR10] >= E[SNR00] >= E[SNRiid]`` per grid point.

    Gaps are computed on paired per-trial differences, which share the
    same channel draw.  Only adjacent pairs of the chain that are present
    in the spec are checked.
    """
    if isinstance(spec_or_result, SweepResult) and all(
        p.samples is not None for p in spec_or_result.points
    ):
        result = spec_or_result
    else:
        spec = spec_or_result.spec if isinstance(spec_or_result, SweepResult) else spec_or_result
        result = run_sweep(spec, workers=workers, keep_samples=True)
    schemes = list(result.spec.schemes)
    chain = [s for s in ORDERED_SCHEMES if s in schemes]
    checks = []
    for point in result.points:
        for better, worse in zip(chain, chain[1:]):
            diff = point.samples[:, schemes.index(better)] - point.samples[:, schemes.index(worse)]
            n = diff.size
            gap = float(diff.mean())
            se = float(diff.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
            checks.append(OrderingCheck(point.value, better, worse, gap, se, _margin(gap, se), gap >= -se))
    return checks


@dataclass
class SaturationReport:
    result: SweepResult
    r11_top: float
    r11_prev: float
    r11_threshold: float
    r00_top: float
    r00_base: float
    plateau: bool
    above_threshold: bool
    collapsed: bool

    @property
    def passed(self):
        return self.plateau and self.above_threshold and self.collapsed


def interference_saturation(N, P, P_R, grid, Q=1, trials=20_000, seed=0, workers=1, flat_tol=0.05):
    """Does the correlation-aware rate survive very strong interference?

    Sweeps the total interference power over ``grid`` (linear, first value
    is the reference point, last value the "very strong" point) and reports:

    * ``above_threshold``: mean R11 at the top exceeds ``log2(1 + (N-1) P / 2)``;
    * ``plateau``: mean R11 changes by less than ``flat_tol`` (relative)
      between the last two grid points;
    * ``collapsed``: mean R00 at the top is below 25% of its value at the
      first grid point.

    The floor only exists when the relays have far more power than the
    interference they amplify (``P_R >> P_I``); at moderate ``P_R`` the
    relay budget is eaten by amplified interference and R11 decays to 0.
    """
    if N < 2:
        raise ValueError("need at least two relays")
    if len(grid) < 2:
        raise ValueError("need at least two grid points")
    spec = SweepSpec(
        SweepVariable.INTERFERENCE_POWER,
        tuple(grid),
        P=P,
        P_R=P_R,
        N=N,
        Q=Q,
        trials=trials,
        seed=seed,
        schemes=(Scheme.S11, Scheme.S00),
    )
    result = run_sweep(spec, workers=workers)
    r11 = result.mean_rates(Scheme.S11)
    r00 = result.mean_rates(Scheme.S00)
    threshold = math.log2(1 + (N - 1) * P * 0.5)
    return SaturationReport(
        result=result,
        r11_top=float(r11[-1]),
        r11_prev=float(r11[-2]),
        r11_threshold=threshold,
        r00_top=float(r00[-1]),
        r00_base=float(r00[0]),
        plateau=bool(abs(r11[-1] - r11[-2]) <= flat_tol * r11[-1]),
        above_threshold=bool(r11[-1] > threshold),
        collapsed=bool(r00[-1] < 0.25 * r00[0]),
    )
