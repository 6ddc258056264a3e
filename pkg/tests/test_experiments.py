import itertools
import math

import numpy as np
import pytest

from relaysim import experiments
from relaysim.errors import NotPositiveDefinite, SweepPointFailed
from relaysim.experiments import (
    ORDERED_SCHEMES,
    SweepSpec,
    SweepVariable,
    db_to_linear,
    draw_network,
    interference_saturation,
    iter_sweep,
    run_sweep,
    simulate_trial,
    verify_ordering,
)
from relaysim.twohop import Scheme


def small_spec(**kw):
    base = dict(sweep_variable="relay_power", grid=(1.0, 10.0), trials=200, seed=3)
    base.update(kw)
    return SweepSpec(**base)


class TestSpec:
    def test_coerces(self):
        spec = small_spec(schemes=("S11", "S00"))
        assert spec.sweep_variable is SweepVariable.RELAY_POWER
        assert spec.schemes == (Scheme.S11, Scheme.S00)

    @pytest.mark.parametrize(
        "kw",
        [
            dict(grid=()),
            dict(grid=(10.0, 1.0)),
            dict(trials=0),
            dict(schemes=()),
            dict(schemes=("MULTISOURCE",)),
            dict(sweep_variable="num_relays", grid=(2, 2.5)),
            dict(N=0),
            dict(sweep_variable="bogus"),
        ],
    )
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            small_spec(**kw)

    def test_params_at(self):
        spec = small_spec(sweep_variable="num_relays", grid=(2, 5), P=3.0, Q=4)
        assert spec.params_at(5.0) == (3.0, 10.0, 10.0, 5, 4)
        assert small_spec(sweep_variable="source_power").params_at(7.0)[0] == 7.0
        assert small_spec(sweep_variable="interference_power").params_at(7.0)[2] == 7.0

    def test_db(self):
        np.testing.assert_allclose(db_to_linear([0, 10, 23]), [1, 10, 10**2.3])


class TestSweep:
    def test_shape(self):
        res = run_sweep(small_spec(grid=tuple(db_to_linear([0, 10, 20, 30]))))
        assert len(res.points) == 4
        assert all(set(p.stats) == set(ORDERED_SCHEMES) for p in res.points)
        assert all(p.stats[Scheme.S11].trials == 200 for p in res.points)

    def test_deterministic(self):
        a = run_sweep(small_spec())
        b = run_sweep(small_spec())
        assert [p.stats for p in a.points] == [p.stats for p in b.points]

    def test_seed_changes_output(self):
        a = run_sweep(small_spec(seed=1)).mean_snrs(Scheme.S11)
        b = run_sweep(small_spec(seed=2)).mean_snrs(Scheme.S11)
        assert not np.array_equal(a, b)

    def test_workers_do_not_change_output(self):
        spec = small_spec(trials=101)
        a = run_sweep(spec, workers=1, keep_samples=True)
        b = run_sweep(spec, workers=3, keep_samples=True)
        for p, q in zip(a.points, b.points):
            np.testing.assert_array_equal(p.samples, q.samples)

    def test_common_random_numbers(self):
        spec = small_spec()
        n1 = draw_network(spec, 1.0, 5)
        n2 = draw_network(spec, 10.0, 5)
        np.testing.assert_array_equal(n1.f, n2.f)
        np.testing.assert_array_equal(n1.K, n2.K)
        assert not np.array_equal(n1.f, draw_network(spec, 1.0, 6).f)

    def test_streaming(self):
        it = iter_sweep(small_spec(grid=(1.0, 2.0, 3.0)))
        assert next(it).value == 1.0

    def test_stats_consistent_with_samples(self):
        res = run_sweep(small_spec(trials=50), keep_samples=True)
        p = res.points[0]
        rates = np.log2(1 + p.samples[:, 0])
        st = p.stats[Scheme.S11]
        assert st.mean_rate_bits == pytest.approx(rates.mean())
        assert st.stderr_rate == pytest.approx(rates.std(ddof=1) / math.sqrt(50))
        assert st.mean_snr == pytest.approx(p.samples[:, 0].mean())

    def test_no_interference_schemes_coincide(self):
        spec = small_spec(Q=0, N=3, trials=500)
        for c in verify_ordering(spec):
            assert abs(c.mean_gap) <= 2 * c.stderr + 1e-9 * abs(c.mean_gap) + 1e-12

    def test_no_interference_flat_in_interference_power(self):
        res = run_sweep(small_spec(sweep_variable="interference_power", grid=(1.0, 100.0, 1e4), Q=0))
        r = res.mean_rates(Scheme.S11)
        assert np.ptp(r) <= res.points[0].stats[Scheme.S11].stderr_rate


class TestRedraws:
    def test_occasional_failure_is_redrawn(self, monkeypatch):
        real = experiments.simulate_trial

        def flaky(spec, value, trial, attempt=0):
            if trial == 3 and attempt == 0:
                raise NotPositiveDefinite("synthetic")
            return real(spec, value, trial, attempt)

        monkeypatch.setattr(experiments, "simulate_trial", flaky)
        res = run_sweep(small_spec(trials=2000, grid=(1.0,)))
        assert res.points[0].redraws == 1

    def test_too_many_failures(self, monkeypatch):
        real = experiments.simulate_trial

        def flaky(spec, value, trial, attempt=0):
            if trial % 100 == 0 and attempt == 0:
                raise NotPositiveDefinite("synthetic")
            return real(spec, value, trial, attempt)

        monkeypatch.setattr(experiments, "simulate_trial", flaky)
        with pytest.raises(SweepPointFailed):
            run_sweep(small_spec(trials=2000, grid=(1.0,)))

    def test_persistent_failure(self, monkeypatch):
        def broken(*args, **kwargs):
            raise NotPositiveDefinite("synthetic")

        monkeypatch.setattr(experiments, "simulate_trial", broken)
        with pytest.raises(SweepPointFailed):
            run_sweep(small_spec(trials=5, grid=(1.0,)))


class TestOrdering:
    @pytest.mark.slow
    def test_margin_at_moderate_relay_power(self):
        spec = SweepSpec("relay_power", (100.0,), P=10, P_I=10, N=2, Q=1, trials=20_000, seed=11)
        checks = verify_ordering(spec)
        assert len(checks) == 3
        for c in checks:
            assert c.holds and c.margin > 2, c

    def test_reuses_kept_samples(self):
        res = run_sweep(small_spec(), keep_samples=True)
        a = verify_ordering(res)
        b = verify_ordering(res.spec)
        assert a == b


@pytest.fixture(scope="module")
def source_power_sweep():
    spec = SweepSpec("source_power", tuple(db_to_linear([0, 30, 40])), P_R=10, P_I=10, N=2, Q=1, trials=10_000, seed=21)
    return run_sweep(spec)


def _pair_gaps(res, i):
    rates = [res.points[i].stats[s].mean_rate_bits for s in ORDERED_SCHEMES]
    return {(a, b): rates[a] - rates[b] for a, b in itertools.combinations(range(4), 2)}


@pytest.mark.slow
class TestSourcePowerConvergence:
    def test_gaps_shrink_by_40db(self, source_power_sweep):
        low, high = _pair_gaps(source_power_sweep, 0), _pair_gaps(source_power_sweep, 2)
        for k in low:
            assert high[k] < 0.25 * low[k], k

    def test_gaps_shrink_at_30db(self, source_power_sweep):
        low, high = _pair_gaps(source_power_sweep, 0), _pair_gaps(source_power_sweep, 1)
        for k in low:
            assert high[k] < low[k], k

    @pytest.mark.xfail(strict=True, reason="gaps against Siid are still ~25-29% of their 0 dB value at 30 dB")
    def test_all_gaps_below_quarter_at_30db(self, source_power_sweep):
        low, high = _pair_gaps(source_power_sweep, 0), _pair_gaps(source_power_sweep, 1)
        for k in low:
            assert high[k] < 0.25 * low[k], k


class TestInterference:
    def test_moderate_relay_power_decays(self):
        # P_R = 100: R11 stays positive and well above R00 but has no floor
        rep = interference_saturation(N=2, P=10, P_R=100, grid=(1.0, 1e4, 1e6), trials=2000, seed=5)
        r11 = rep.result.mean_rates(Scheme.S11)
        r00 = rep.result.mean_rates(Scheme.S00)
        assert r11[1] > 0.1 and r11[1] > 5 * r00[1]
        assert r11[2] < 0.05
        assert not rep.above_threshold

    def test_too_many_interferers(self):
        res = run_sweep(SweepSpec("interference_power", (1e6,), P=10, P_R=100, N=2, Q=3, trials=2000, seed=6, schemes=("S11",)))
        assert res.mean_rates(Scheme.S11)[0] < 0.1

    def test_saturation_validation(self):
        with pytest.raises(ValueError):
            interference_saturation(N=1, P=1, P_R=1, grid=(1.0, 2.0))
        with pytest.raises(ValueError):
            interference_saturation(N=2, P=1, P_R=1, grid=(1.0,))


def test_simulate_trial_order():
    spec = small_spec(schemes=("SIID", "S11"))
    evs = simulate_trial(spec, 1.0, 0)
    assert [e.scheme for e in evs] == [Scheme.SIID, Scheme.S11]
