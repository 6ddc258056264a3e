"""Three-hop parallel AF relay networks.

Source (power ``P0``) -> ``N`` first-stage relays over ``f`` -> ``M``
second-stage relays over ``H`` (M x N) -> destination over ``g``.  The two
relay stages spend ``P1`` and ``P2``; every receiver has unit local noise.

With the first-stage gains fixed the network is a two-hop network whose
relay noise is correlated, so the second stage can be optimized in closed
form.  Swapping source and destination (the reciprocal network) turns the
first stage into the second one, which gives an alternating ascent.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .errors import DimensionMismatch, InfeasibleGain, NoConvergence, ZeroGain
from .numerics import as_matrix, as_vector, canonical_phase, principal_eigenpair
from .twohop import TwoHopNetwork, optimal_gain_s11

__all__ = [
    "ThreeHopNetwork",
    "StageGains",
    "TraceStep",
    "OptimizationTrace",
    "snr3",
    "stage1_power",
    "stage2_power",
    "normalize_stage1",
    "normalize_stage2",
    "reduce_to_twohop",
    "reciprocal",
    "default_d1",
    "optimize",
    "optimize_multistart",
    "multi_antenna_destination_snr",
    "best_multi_antenna_destination_snr",
    "limit_checks",
]

FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class ThreeHopNetwork:
    P0: float
    f: np.ndarray
    P1: float
    H: np.ndarray
    P2: float
    g: np.ndarray

    def __post_init__(self):
        f = as_vector(self.f, "f")
        g = as_vector(self.g, "g")
        H = as_matrix(self.H, "H")
        if H.shape != (g.size, f.size):
            raise DimensionMismatch(
                f"H must be {g.size}x{f.size} to connect {f.size} to {g.size} relays, got {H.shape}"
            )
        for name in ("P0", "P1", "P2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "H", H)

    @property
    def N(self):
        return self.f.size

    @property
    def M(self):
        return self.g.size

    def with_powers(self, P0=None, P1=None, P2=None):
        return ThreeHopNetwork(
            self.P0 if P0 is None else P0,
            self.f,
            self.P1 if P1 is None else P1,
            self.H,
            self.P2 if P2 is None else P2,
            self.g,
        )


@dataclass(frozen=True)
class StageGains:
    d1: np.ndarray
    d2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "d1", as_vector(self.d1, "d1"))
        object.__setattr__(self, "d2", as_vector(self.d2, "d2"))

    def canonical(self):
        return StageGains(canonical_phase(self.d1), canonical_phase(self.d2))


@dataclass(frozen=True)
class TraceStep:
    index: int
    snr: float
    direction: str  # "forward" or "reciprocal"


@dataclass
class OptimizationTrace:
    iterations: list = field(default_factory=list)
    converged: bool = False
    final: StageGains = None

    @property
    def snr(self):
        return self.iterations[-1].snr if self.iterations else 0.0

    @property
    def snrs(self):
        return [step.snr for step in self.iterations]

    @property
    def cycles(self):
        return sum(1 for s in self.iterations if s.direction == "reciprocal")


def _check(net, gains):
    if gains.d1.size != net.N or gains.d2.size != net.M:
        raise DimensionMismatch(
            f"gains are ({gains.d1.size}, {gains.d2.size}), network has ({net.N}, {net.M}) relays"
        )


def snr3(net, gains):
    """Destination SNR for given stage gains."""
    _check(net, gains)
    gd2 = net.g * gains.d2
    row = (gd2 @ net.H) * gains.d1  # g^T D2 H D1
    signal = abs(row @ net.f) ** 2 * net.P0
    noise = float(np.sum(np.abs(row) ** 2) + np.sum(np.abs(gd2) ** 2)) + 1.0
    return signal / noise


def stage1_power(net, d1):
    """``Tr(D1 D1^H (f f^H P0 + I))``."""
    d1 = as_vector(d1, "d1")
    return float(np.sum(np.abs(d1) ** 2 * (np.abs(net.f) ** 2 * net.P0 + 1.0)))


def stage2_power(net, d1, d2):
    """``Tr(D2 D2^H (H D1 f f^H D1^H H^H P0 + H D1 D1^H H^H + I))``."""
    d1 = as_vector(d1, "d1")
    d2 = as_vector(d2, "d2")
    HD1 = net.H * d1
    load = np.abs(HD1 @ net.f) ** 2 * net.P0 + np.sum(np.abs(HD1) ** 2, axis=1) + 1.0
    return float(np.sum(np.abs(d2) ** 2 * load))


def _scale(d, power, target):
    if power == 0:
        raise ZeroGain("cannot normalize a gain vector that spends no power")
    return d * np.sqrt(target / power)


def normalize_stage1(net, d1):
    d1 = as_vector(d1, "d1")
    if d1.size != net.N:
        raise DimensionMismatch(f"d1 has {d1.size} entries, expected {net.N}")
    return _scale(d1, stage1_power(net, d1), net.P1)


def normalize_stage2(net, d1, d2):
    d2 = as_vector(d2, "d2")
    if d2.size != net.M:
        raise DimensionMismatch(f"d2 has {d2.size} entries, expected {net.M}")
    return _scale(d2, stage2_power(net, d1, d2), net.P2)


def _relative_gap(value, target):
    return abs(value - target) / target


def reduce_to_twohop(net, d1, check=True):
    """Two-hop network seen by the second stage once ``d1`` is fixed.

    The effective source channel is ``H D1 f`` and the second-stage noise
    ``H D1 n1 + n2`` has covariance ``H D1 D1^H H^H + I``.
    """
    d1 = as_vector(d1, "d1")
    if d1.size != net.N:
        raise DimensionMismatch(f"d1 has {d1.size} entries, expected {net.N}")
    if check and _relative_gap(stage1_power(net, d1), net.P1) > FEASIBILITY_TOL:
        raise InfeasibleGain("d1 violates the first-stage power constraint")
    HD1 = net.H * d1
    K = HD1 @ HD1.conj().T + np.eye(net.M)
    return TwoHopNetwork(P=net.P0, f=HD1 @ net.f, P_R=net.P2, g=net.g, K=K)


def reciprocal(net, gains):
    """Swap source and destination while keeping each hop's power.

    Returns the reciprocal network ``(P2, g, P1, H^T, P0, f)`` and gains
    ``(kappa2 d2, kappa1 d1)`` that meet its power constraints.  The
    destination SNR is unchanged.
    """
    _check(net, gains)
    d1, d2 = gains.d1, gains.d2
    p1 = float(np.sum(np.abs(d2) ** 2 * (np.abs(net.g) ** 2 * net.P2 + 1.0)))
    if p1 == 0:
        raise ZeroGain("second-stage gains spend no power")
    kappa2_sq = net.P1 / p1
    Ht = net.H.T
    HtD2 = Ht * d2  # H^T D2
    load = (
        kappa2_sq * np.abs(HtD2 @ net.g) ** 2 * net.P2
        + kappa2_sq * np.sum(np.abs(HtD2) ** 2, axis=1)
        + 1.0
    )
    p0 = float(np.sum(np.abs(d1) ** 2 * load))
    if p0 == 0:
        raise ZeroGain("first-stage gains spend no power")
    kappa1_sq = net.P0 / p0
    rnet = ThreeHopNetwork(net.P2, net.g, net.P1, Ht, net.P0, net.f)
    return rnet, StageGains(np.sqrt(kappa2_sq) * d2, np.sqrt(kappa1_sq) * d1)


def default_d1(net):
    """Co-phased, equal-power first-stage gains (before normalization)."""
    mag = 1.0 / np.sqrt(np.abs(net.f) ** 2 * net.P0 + 1.0)
    return mag * np.exp(-1j * np.angle(net.f))


def _forward_step(net, d1):
    d2 = optimal_gain_s11(reduce_to_twohop(net, d1, check=False)).gain
    gains = StageGains(d1, d2)
    return gains, snr3(net, gains)


def optimize(net, d1_init=None, tol=1e-9, max_iters=500, raise_on_failure=False):
    """Alternating optimization of both relay stages.

    Each half-step holds one stage fixed and solves for the other in closed
    form, going through the reciprocal network to reach the first stage.
    The SNR never decreases.  Stops once a full forward + reciprocal cycle
    improves the SNR by less than ``tol`` (relative) or after ``max_iters``
    cycles; in the latter case ``converged`` is False, and with
    ``raise_on_failure`` a :class:`NoConvergence` carrying the trace is
    raised instead.
    """
    d1 = normalize_stage1(net, default_d1(net) if d1_init is None else d1_init)
    trace = OptimizationTrace()
    gains, snr = _forward_step(net, d1)
    trace.iterations.append(TraceStep(0, snr, "forward"))
    for it in range(1, max_iters + 1):
        start = snr
        rnet, rgains = reciprocal(net, gains)
        rgains, rsnr = _forward_step(rnet, rgains.d1)
        trace.iterations.append(TraceStep(len(trace.iterations), rsnr, "reciprocal"))
        # back to the forward network; only the new first stage is kept
        _, back = reciprocal(rnet, rgains)
        gains, snr = _forward_step(net, back.d1)
        trace.iterations.append(TraceStep(len(trace.iterations), snr, "forward"))
        if snr - start <= tol * max(abs(start), np.finfo(float).tiny):
            trace.converged = True
            break
    trace.final = gains.canonical()
    if not trace.converged and raise_on_failure:
        raise NoConvergence(f"no convergence within {max_iters} cycles", result=trace)
    return trace


def optimize_multistart(net, starts=5, seed=0, inits=None, **kwargs):
    """Run :func:`optimize` from several first-stage initializations.

    Without explicit ``inits`` the first start is :func:`default_d1` and
    the rest are seeded CN(0, I) draws.  Returns ``(traces, best_index)``.
    """
    if inits is None:
        gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        inits = [default_d1(net)]
        for _ in range(max(starts, 1) - 1):
            z = gen.standard_normal((net.N, 2))
            inits.append(z[:, 0] + 1j * z[:, 1])
    traces = [optimize(net, d1_init=d, **kwargs) for d in inits]
    best = int(np.argmax([t.snr for t in traces]))
    return traces, best


def multi_antenna_destination_snr(net, d1):
    """SNR with the second stage replaced by an MRC receiver over ``H``.

    This is the ``P2 -> inf`` limit of the three-hop network for fixed
    ``d1``: ``P0 (H D1 f)^H (H D1 D1^H H^H + I)^{-1} (H D1 f)``.
    """
    red = reduce_to_twohop(net, normalize_stage1(net, d1), check=False)
    x = np.linalg.solve(red.K, red.f)
    return net.P0 * float(np.real(np.vdot(red.f, x)))


def best_multi_antenna_destination_snr(net, starts=8, seed=0):
    """Maximize :func:`multi_antenna_destination_snr` over ``d1``.

    No closed form is known; this runs BFGS from several random starts on
    the real and imaginary parts of ``d1``.
    """
    N = net.N
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))

    def neg(x):
        return -multi_antenna_destination_snr(net, x[:N] + 1j * x[N:])

    x0s = [np.concatenate([default_d1(net).real, default_d1(net).imag])]
    x0s += [gen.standard_normal(2 * N) for _ in range(starts - 1)]
    best = 0.0
    for x0 in x0s:
        res = scipy.optimize.minimize(neg, x0, method="BFGS", options={"gtol": 1e-10})
        best = max(best, -res.fun)
    return best


def limit_checks(net, big=1e6, **kwargs):
    """Compare optimized SNRs against the high-power limits of each stage.

    Returns ``{name: (expected, achieved)}``.  ``big`` replaces the powers
    sent to infinity; the other powers are taken from ``net``.
    """
    out = {}

    def achieved(n):
        traces, best = optimize_multistart(n, **kwargs)
        return traces[best].snr

    n = net.with_powers(P1=big, P2=big)
    out["p1_p2_inf"] = (net.P0 * float(np.real(np.vdot(net.f, net.f))), achieved(n))
    n = net.with_powers(P0=big, P1=big)
    out["p0_p1_inf"] = (net.P2 * float(np.real(np.vdot(net.g, net.g))), achieved(n))
    n = net.with_powers(P0=big, P2=big)
    lam, _ = principal_eigenpair(net.H.conj().T @ net.H)
    out["p0_p2_inf"] = (net.P1 * lam, achieved(n))
    n = net.with_powers(P2=big)
    out["p2_inf"] = (best_multi_antenna_destination_snr(n), achieved(n))
    n = net.with_powers(P0=big)
    rnet = ThreeHopNetwork(n.P2, n.g, n.P1, n.H.T, n.P0, n.f)
    out["p0_inf"] = (best_multi_antenna_destination_snr(rnet), achieved(n))
    return out
