"""Self-check suite behind ``relaysim verify``.

Each check returns a :class:`CheckResult`.  ``margin`` is normalized so
that ``margin >= 0`` exactly when the check passes: for tolerance checks
it is ``1 - error / tolerance``, for Monte Carlo orderings it is
``gap / stderr + 1``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel import InterferenceEnv, RngStream, interference_covariance, sample_cn01_matrix
from .experiments import SweepSpec, SweepVariable, db_to_linear, interference_saturation, run_sweep, verify_ordering
from .threehop import StageGains, ThreeHopNetwork, normalize_stage1, normalize_stage2, optimize, reciprocal, snr3
from .threehop import limit_checks as three_hop_limits
from .twohop import (
    MultiSourceTwoHopNetwork,
    Scheme,
    TwoHopNetwork,
    evaluate_scheme,
    expected_high_pr_snr,
    high_pr_snr_formulas,
    high_pr_snr_samples,
    normalize_power,
    optimal_gain_multisource,
    optimal_gain_s11,
    snr_of_gain,
)

EXAMPLE_SNR = 6.5638
EXAMPLE_D1 = (0.0823, 0.1633)
EXAMPLE_D2 = (0.2533, 0.2566)
EXAMPLE_INITS = ((1, 0), (0, 1), (-2, 1), (2, 1), (-20, -1))


@dataclass(frozen=True)
class CheckResult:
    name: str
    expected: float
    achieved: float
    margin: float
    passed: bool


def _tol_check(name, expected, achieved, tol, relative=False):
    err = abs(achieved - expected)
    if relative:
        err /= abs(expected)
    margin = 1.0 - err / tol
    return CheckResult(name, float(expected), float(achieved), margin, err <= tol)


def example_network():
    return ThreeHopNetwork(1.0, [1, 6], 1.0, [[2, -3], [4, 2]], 1.0, [4, -3])


def _gen(seed, stream):
    return RngStream(seed, stream).generator()


def random_two_hop(gen, N, Q, P=10.0, P_R=10.0, P_I=10.0):
    fg = sample_cn01_matrix(2, N, gen)
    hs = sample_cn01_matrix(Q, N, gen)
    K = interference_covariance(InterferenceEnv.equal_split(list(hs), P_I), n=N)
    return TwoHopNetwork(P, fg[0], P_R, fg[1], K)


def random_three_hop(gen, N, M, P0=1.0, P1=1.0, P2=1.0):
    f = sample_cn01_matrix(1, N, gen)[0]
    g = sample_cn01_matrix(1, M, gen)[0]
    H = sample_cn01_matrix(M, N, gen)
    return ThreeHopNetwork(P0, f, P1, H, P2, g)


def check_example_convergence():
    net = example_network()
    out = []
    for k, d in enumerate(EXAMPLE_INITS, 1):
        trace = optimize(net, np.array(d, dtype=complex))
        out.append(_tol_check(f"three_hop_example_snr_init{k}", EXAMPLE_SNR, trace.snr, 1e-3))
        err = max(
            np.max(np.abs(np.abs(trace.final.d1) - EXAMPLE_D1)),
            np.max(np.abs(np.abs(trace.final.d2) - EXAMPLE_D2)),
        )
        out.append(_tol_check(f"three_hop_example_gains_init{k}", 0.0, err, 2e-3))
    return out


def check_reciprocity(n=200, seed=0):
    worst = 0.0
    for i in range(n):
        gen = _gen(seed, i)
        N, M = gen.integers(1, 5, size=2)
        net = random_three_hop(gen, N, M, *db_to_linear(gen.uniform(-10, 20, 3)))
        d1 = normalize_stage1(net, sample_cn01_matrix(1, N, gen)[0])
        d2 = normalize_stage2(net, d1, sample_cn01_matrix(1, M, gen)[0])
        gains = StageGains(d1, d2)
        s = snr3(net, gains)
        rs = snr3(*reciprocal(net, gains))
        worst = max(worst, abs(rs - s) / s)
    return [_tol_check("three_hop_reciprocity_max_rel_err", 0.0, worst, 1e-9)]


def check_multisource_reduces(n=50, seed=1):
    worst = 0.0
    for i in range(n):
        gen = _gen(seed, i)
        net = random_two_hop(gen, int(gen.integers(2, 5)), int(gen.integers(0, 3)))
        multi = MultiSourceTwoHopNetwork(((net.f, net.P),), net.P_R, net.g, net.K)
        a = optimal_gain_s11(net).snr
        b = optimal_gain_multisource(multi).snr
        worst = max(worst, abs(a - b) / a)
    return [_tol_check("multisource_L1_matches_single_max_rel_err", 0.0, worst, 1e-10)]


def check_s11_optimal(n=20, probes=500, seed=2):
    worst = -math.inf
    for i in range(n):
        gen = _gen(seed, i)
        net = random_two_hop(gen, int(gen.integers(2, 5)), int(gen.integers(0, 3)))
        best = optimal_gain_s11(net).snr
        for d in sample_cn01_matrix(probes, net.N, gen):
            worst = max(worst, snr_of_gain(net, normalize_power(net, d)) / best - 1.0)
    # achieved is the best probe's relative shortfall, so it should be < 0
    margin = 1.0 - max(worst, 0.0) / 1e-9
    return [CheckResult("s11_beats_random_gains_max_excess", 0.0, worst, margin, worst <= 1e-9)]


def check_asymptotes(n=20, seed=3):
    worst_pr = 0.0
    worst_p = 0.0
    for i in range(n):
        gen = _gen(seed, i)
        net = random_two_hop(gen, int(gen.integers(2, 5)), int(gen.integers(0, 3)))
        hi = TwoHopNetwork(net.P, net.f, 1e8, net.g, net.K)
        for scheme, value in high_pr_snr_formulas(hi).items():
            worst_pr = max(worst_pr, abs(evaluate_scheme(hi, scheme).snr / value - 1.0))
        hp = TwoHopNetwork(1e8, net.f, net.P_R, net.g, net.K)
        mrt = net.P_R * float(np.real(np.vdot(net.g, net.g)))
        for scheme in (Scheme.S11, Scheme.S10, Scheme.S00, Scheme.SIID):
            worst_p = max(worst_p, abs(evaluate_scheme(hp, scheme).snr / mrt - 1.0))
    return [
        _tol_check("high_relay_power_closed_forms_max_rel_err", 0.0, worst_pr, 1e-3),
        _tol_check("high_source_power_mrt_max_rel_err", 0.0, worst_p, 1e-3),
    ]


def check_expected_closed_forms(samples=20_000, seed=4):
    gen = _gen(seed, 0)
    N, P = 3, 10.0
    hs = sample_cn01_matrix(1, N, gen)
    K = interference_covariance(InterferenceEnv.equal_split(list(hs), 10.0), n=N)
    expected = expected_high_pr_snr(K, P)
    values = high_pr_snr_samples(K, P, sample_cn01_matrix(samples, N, gen))
    return [
        _tol_check(f"expected_high_pr_snr_{scheme}", expected[scheme], values[scheme].mean(), 0.02, relative=True)
        for scheme in expected
    ]


def check_scheme_ordering(trials, seed=5):
    spec = SweepSpec(
        SweepVariable.RELAY_POWER,
        tuple(db_to_linear([0, 10, 20, 30])),
        P=10.0,
        P_I=10.0,
        N=2,
        Q=1,
        trials=trials,
        seed=seed,
    )
    out = []
    for c in verify_ordering(spec):
        name = f"ordering_{c.better}_ge_{c.worse}_PR{10 * math.log10(c.value):.0f}dB"
        out.append(CheckResult(name, 0.0, c.mean_gap, c.margin + 1.0, c.holds))
    return out


def check_three_hop_limits():
    out = []
    for name, (expected, achieved) in three_hop_limits(example_network()).items():
        if name in ("p1_p2_inf", "p0_p1_inf", "p0_p2_inf"):
            out.append(_tol_check(f"three_hop_limit_{name}", expected, achieved, 5e-3, relative=True))
    return out


def check_interference(trials, seed=6):
    rep = interference_saturation(N=2, P=10.0, P_R=1e8, grid=(1.0, 10.0, 100.0, 1e3, 1e4), trials=trials, seed=seed)
    out = [
        CheckResult(
            "saturation_r11_above_floor",
            rep.r11_threshold,
            rep.r11_top,
            (rep.r11_top - rep.r11_threshold) / rep.r11_threshold,
            rep.above_threshold,
        ),
        CheckResult(
            "saturation_r11_plateau",
            rep.r11_prev,
            rep.r11_top,
            1.0 - abs(rep.r11_top - rep.r11_prev) / (0.05 * rep.r11_top),
            rep.plateau,
        ),
        CheckResult(
            "saturation_r00_collapse",
            0.25 * rep.r00_base,
            rep.r00_top,
            1.0 - rep.r00_top / (0.25 * rep.r00_base),
            rep.collapsed,
        ),
    ]
    spec = SweepSpec(
        SweepVariable.NUM_RELAYS,
        (2, 3, 4, 10, 11, 12),
        P=10.0,
        P_R=100.0,
        P_I=200.0,
        Q=9,
        trials=max(trials // 4, 100),
        seed=seed,
        schemes=(Scheme.S11,),
    )
    r = run_sweep(spec).mean_rates(Scheme.S11)
    low, high = (r[2] - r[0]) / 2, (r[5] - r[3]) / 2
    out.append(CheckResult("relay_count_slope_N10_12_gt_N2_4", low, high, high / low - 1.0, high > low))
    return out


def run_all(trials=4000, seed=0):
    """Run every check; Monte Carlo checks use ``trials`` per point."""
    results = []
    results += check_example_convergence()
    results += check_reciprocity(seed=seed)
    results += check_multisource_reduces(seed=seed + 1)
    results += check_s11_optimal(seed=seed + 2)
    results += check_asymptotes(seed=seed + 3)
    results += check_expected_closed_forms(samples=max(25 * trials, 1000), seed=seed + 4)
    results += check_scheme_ordering(trials, seed=seed + 5)
    results += check_three_hop_limits()
    results += check_interference(trials, seed=seed + 6)
    return results
