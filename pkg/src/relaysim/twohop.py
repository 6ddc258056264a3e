"""Two-hop parallel amplify-and-forward relay networks with correlated noise.

The source sends ``x`` (power ``P``) to ``N`` relays over ``f``; the relays
see noise with covariance ``K``, scale their observations by ``d`` and
forward to the destination over ``g``.  Destination noise has unit
variance and the relays share a total power budget ``P_R``:

    d^H [(f f^H P + K) o I] d = P_R

All rates are in bits per channel use, ``log2(1 + SNR)``.
"""

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import scipy.linalg

from .channel import iid_equivalent_covariance
from .errors import DimensionMismatch, NotPositiveDefinite, SingularK, ZeroChannel, ZeroGain
from .numerics import (
    as_matrix,
    as_vector,
    canonical_phase,
    cholesky,
    ensure_hermitian,
    principal_generalized_eigenpair,
    solve_hermitian,
)

__all__ = [
    "Scheme",
    "TwoHopNetwork",
    "MultiSourceTwoHopNetwork",
    "SchemeEval",
    "rate_bits",
    "relay_power",
    "snr_of_gain",
    "normalize_power",
    "optimal_gain_s11",
    "optimal_gain_s00",
    "eval_scheme_s10",
    "eval_scheme_siid",
    "eval_scheme_local_csi",
    "eval_scheme_no_csi",
    "evaluate_scheme",
    "evaluate_schemes",
    "multisource_snr_of_gain",
    "multisource_relay_power",
    "optimal_gain_multisource",
    "simo_limit_rate",
    "miso_limit_rate",
    "high_pr_snr_formulas",
    "high_pr_snr_samples",
    "expected_high_pr_snr",
]


class Scheme(str, Enum):
    """Relay design / noise-knowledge combinations that get compared."""

    S11 = "S11"  # correlated noise, relays know K
    S10 = "S10"  # correlated noise, relays assume K o I
    S00 = "S00"  # noise really is K o I
    SIID = "SIID"  # white noise with the same trace as K
    LOCAL_CSI = "LOCAL_CSI"
    NO_CSI = "NO_CSI"
    MULTISOURCE = "MULTISOURCE"

    def __str__(self):
        return self.value


def rate_bits(snr):
    return float(np.log2(1.0 + snr))


def _validate_covariance(K, n):
    k = as_matrix(K, "K")
    if k.shape != (n, n):
        raise DimensionMismatch(f"K must be {n}x{n}, got {k.shape}")
    k = ensure_hermitian(k)
    if np.any(np.real(np.diag(k)) <= 0):
        raise ValueError("K must have a strictly positive diagonal")
    return k


@dataclass(frozen=True)
class TwoHopNetwork:
    P: float
    f: np.ndarray
    P_R: float
    g: np.ndarray
    K: np.ndarray = None

    def __post_init__(self):
        f = as_vector(self.f, "f")
        g = as_vector(self.g, "g")
        if f.shape != g.shape:
            raise DimensionMismatch(f"f has {f.size} entries, g has {g.size}")
        K = np.eye(f.size, dtype=complex) if self.K is None else _validate_covariance(self.K, f.size)
        if not self.P > 0 or not self.P_R > 0:
            raise ValueError("source and relay powers must be positive")
        object.__setattr__(self, "P", float(self.P))
        object.__setattr__(self, "P_R", float(self.P_R))
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "K", K)

    @property
    def N(self):
        return self.f.size

    @property
    def fg(self):
        return self.f * self.g

    def relay_load(self):
        """Diagonal of ``(f f^H P + K) o I``: per-relay received power."""
        return np.abs(self.f) ** 2 * self.P + np.real(np.diag(self.K))

    def with_covariance(self, K):
        return replace(self, K=K)

    def _with_trusted_covariance(self, K):
        # K derived from an already validated covariance; skip the checks
        net = object.__new__(TwoHopNetwork)
        for name, value in (("P", self.P), ("f", self.f), ("P_R", self.P_R), ("g", self.g), ("K", K)):
            object.__setattr__(net, name, value)
        return net

    def diagonal_noise(self):
        return self._with_trusted_covariance(np.diag(np.diag(self.K)))

    def iid_noise(self):
        return self._with_trusted_covariance(iid_equivalent_covariance(self.K))


@dataclass(frozen=True)
class MultiSourceTwoHopNetwork:
    """``L`` single-antenna sources ``(f_k, P_k)`` sharing the same relays."""

    sources: tuple
    P_R: float
    g: np.ndarray
    K: np.ndarray = None

    def __post_init__(self):
        g = as_vector(self.g, "g")
        if len(self.sources) < 1:
            raise ValueError("need at least one source")
        srcs = []
        for f_k, P_k in self.sources:
            f_k = as_vector(f_k, "f_k")
            if f_k.shape != g.shape:
                raise DimensionMismatch(f"source channel has {f_k.size} entries, g has {g.size}")
            if not P_k > 0:
                raise ValueError("source powers must be positive")
            srcs.append((f_k, float(P_k)))
        K = np.eye(g.size, dtype=complex) if self.K is None else _validate_covariance(self.K, g.size)
        if not self.P_R > 0:
            raise ValueError("relay power must be positive")
        object.__setattr__(self, "sources", tuple(srcs))
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "P_R", float(self.P_R))

    @property
    def N(self):
        return self.g.size

    @property
    def L(self):
        return len(self.sources)

    def relay_load(self):
        load = np.real(np.diag(self.K)).copy()
        for f_k, P_k in self.sources:
            load += np.abs(f_k) ** 2 * P_k
        return load


@dataclass(frozen=True)
class SchemeEval:
    scheme: Scheme
    gain: np.ndarray
    snr: float
    rate_bits: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "snr", float(self.snr))
        object.__setattr__(self, "rate_bits", rate_bits(self.snr))


def _check_gain(net, d):
    d = as_vector(d, "d")
    if d.size != net.N:
        raise DimensionMismatch(f"gain has {d.size} entries, network has {net.N} relays")
    return d


def relay_power(net, d):
    """Total relay transmit power ``d^H [(f f^H P + K) o I] d``."""
    d = _check_gain(net, d)
    return float(np.sum(np.abs(d) ** 2 * net.relay_load()))


def snr_of_gain(net, d):
    """Destination SNR for an arbitrary gain vector (feasible or not)."""
    d = _check_gain(net, d)
    dg = d * net.g
    signal = abs(np.sum(dg * net.f)) ** 2 * net.P
    noise = float(np.real(dg @ net.K @ dg.conj())) + 1.0
    return signal / noise


def normalize_power(net, d):
    """Scale ``d`` by a positive real so the relays spend exactly ``P_R``."""
    p = relay_power(net, d)
    if p == 0:
        raise ZeroGain("cannot normalize a gain vector that spends no power")
    return as_vector(d) * np.sqrt(net.P_R / p)


def _optimal_for(net):
    """Optimal gain and SNR for one source under covariance ``net.K``.

    The SNR is a generalized Rayleigh quotient whose numerator matrix has
    rank one, so a single Hermitian solve gives the maximizer.
    """
    u = net.fg
    if not np.any(u):
        # every relay path is cut: SNR is zero whatever the relays do
        return 0.0, canonical_phase(normalize_power(net, np.ones(net.N, dtype=complex)))
    A = net.K * np.outer(net.g, net.g.conj()) * net.P_R + np.diag(net.relay_load())
    x = solve_hermitian(A, u, assume_hermitian=True)
    snr = net.P * net.P_R * float(np.real(np.vdot(u, x)))
    gain = canonical_phase(normalize_power(net, np.conj(x)))
    return snr, gain


def optimal_gain_s11(net):
    snr, gain = _optimal_for(net)
    return SchemeEval(Scheme.S11, gain, snr)


def optimal_gain_s00(net):
    """Optimal design when the relay noise is actually ``K o I``."""
    snr, gain = _optimal_for(net.diagonal_noise())
    return SchemeEval(Scheme.S00, gain, snr)


def _is_diagonal(K):
    return not np.any(K - np.diag(np.diag(K)))


def eval_scheme_s10(net):
    """Relays design for ``K o I`` but the noise is correlated as ``K``.

    The power constraint only involves the marginals, which both views
    agree on, so the gain is exactly the S00 gain.
    """
    snr, gain = _optimal_for(net.diagonal_noise())
    if not _is_diagonal(net.K):
        snr = snr_of_gain(net, gain)
    return SchemeEval(Scheme.S10, gain, snr)


def eval_scheme_siid(net):
    snr, gain = _optimal_for(net.iid_noise())
    return SchemeEval(Scheme.SIID, gain, snr)


def eval_scheme_local_csi(net, true_K=True):
    """Each relay only knows its own ``f_i`` and ``g_i``.

    Relay ``i`` cancels the phase of its two channels and spends an equal
    share of ``P_R``.  Relays with a zero channel stay silent.  With
    ``true_K`` false the SNR is evaluated under ``K o I``.
    """
    active = (net.f != 0) & (net.g != 0)
    n_active = int(np.count_nonzero(active))
    if n_active == 0:
        raise ZeroChannel("no relay has a nonzero forward and backward channel")
    load = net.relay_load()
    mag = np.zeros(net.N)
    mag[active] = np.sqrt(net.P_R / n_active / load[active])
    phase = -(np.angle(net.f) + np.angle(net.g))
    gain = canonical_phase(mag * np.exp(1j * phase))
    target = net if true_K else net.diagonal_noise()
    return SchemeEval(Scheme.LOCAL_CSI, gain, snr_of_gain(target, gain))


def eval_scheme_no_csi(net, d=None, true_K=True):
    """Fixed gains chosen without channel knowledge (default all ones)."""
    d = np.ones(net.N, dtype=complex) if d is None else _check_gain(net, d)
    gain = canonical_phase(normalize_power(net, d))
    target = net if true_K else net.diagonal_noise()
    return SchemeEval(Scheme.NO_CSI, gain, snr_of_gain(target, gain))


_EVALUATORS = {
    Scheme.S11: optimal_gain_s11,
    Scheme.S10: eval_scheme_s10,
    Scheme.S00: optimal_gain_s00,
    Scheme.SIID: eval_scheme_siid,
    Scheme.LOCAL_CSI: eval_scheme_local_csi,
    Scheme.NO_CSI: eval_scheme_no_csi,
}


def evaluate_scheme(net, scheme):
    scheme = Scheme(scheme)
    try:
        fn = _EVALUATORS[scheme]
    except KeyError:
        raise ValueError(f"{scheme} is not a single-source scheme") from None
    return fn(net)


def evaluate_schemes(net, schemes):
    """Evaluate several schemes on one network, sharing the S00/S10 solve."""
    out = []
    diag = None
    for scheme in map(Scheme, schemes):
        if scheme in (Scheme.S00, Scheme.S10):
            if diag is None:
                diag = _optimal_for(net.diagonal_noise())
            snr, gain = diag
            if scheme is Scheme.S10 and not _is_diagonal(net.K):
                snr = snr_of_gain(net, gain)
            out.append(SchemeEval(scheme, gain, snr))
        else:
            out.append(evaluate_scheme(net, scheme))
    return out


def _check_multi_gain(net, d):
    d = as_vector(d, "d")
    if d.size != net.N:
        raise DimensionMismatch(f"gain has {d.size} entries, network has {net.N} relays")
    return d


def multisource_relay_power(net, d):
    d = _check_multi_gain(net, d)
    return float(np.sum(np.abs(d) ** 2 * net.relay_load()))


def multisource_snr_of_gain(net, d):
    """Sum-rate SNR: total received signal power over effective noise."""
    d = _check_multi_gain(net, d)
    dg = d * net.g
    signal = sum(abs(np.sum(dg * f_k)) ** 2 * P_k for f_k, P_k in net.sources)
    noise = float(np.real(dg @ net.K @ dg.conj())) + 1.0
    return signal / noise


def optimal_gain_multisource(net):
    """Sum-rate optimal relay gains for the multiple-access relay network.

    ``SNR = P_R lambda_max(A^{-1} B)`` with
    ``B = sum_k (f_k o g)(f_k o g)^H P_k``.
    """
    A = net.K * np.outer(net.g, net.g.conj()) * net.P_R + np.diag(net.relay_load())
    B = np.zeros_like(A)
    for f_k, P_k in net.sources:
        u = f_k * net.g
        B += np.outer(u, u.conj()) * P_k
    lam, x = principal_generalized_eigenpair(A, B)
    d = np.conj(x)
    p = multisource_relay_power(net, d)
    if p == 0:
        raise ZeroGain("principal eigenvector spends no relay power")
    gain = canonical_phase(d * np.sqrt(net.P_R / p))
    return SchemeEval(Scheme.MULTISOURCE, gain, net.P_R * lam)


def _factor_K(K):
    try:
        L = cholesky(K)
    except NotPositiveDefinite as exc:
        raise SingularK(f"relay noise covariance is singular: {exc}") from None
    piv = np.abs(np.diag(L)) ** 2
    if piv.min() <= 1e-14 * piv.max():
        raise SingularK("relay noise covariance is numerically singular")
    return L


def _quad_inv(L, v):
    """``v^H K^{-1} v`` given the Cholesky factor of ``K``."""
    y = scipy.linalg.solve_triangular(L, v, lower=True)
    return float(np.real(np.vdot(y, y)))


def simo_limit_rate(net):
    """Rate the network approaches as ``P_R -> inf``: ``log2(1 + P f^H K^{-1} f)``."""
    L = _factor_K(net.K)
    return rate_bits(net.P * _quad_inv(L, net.f))


def miso_limit_rate(net):
    """Rate the network approaches as ``P -> inf``: ``log2(1 + P_R ||g||^2)``."""
    return rate_bits(net.P_R * float(np.real(np.vdot(net.g, net.g))))


def high_pr_snr_formulas(net):
    """Closed-form SNR of each scheme in the ``P_R -> inf`` limit."""
    L = _factor_K(net.K)
    kd = np.real(np.diag(net.K))
    f = net.f
    w = f / kd  # (K o I)^{-1} f
    a = float(np.real(np.vdot(f, w)))
    return {
        Scheme.S11: net.P * _quad_inv(L, f),
        Scheme.S10: a**2 * net.P / float(np.real(np.vdot(w, net.K @ w))),
        Scheme.S00: net.P * a,
        Scheme.SIID: net.P * float(np.real(np.vdot(f, f))) / (kd.sum() / net.N),
    }


def high_pr_snr_samples(K, P, F):
    """:func:`high_pr_snr_formulas` for many source channels at once.

    ``F`` holds one channel per row; ``K`` is factored once.  Returns a
    dict of arrays of length ``len(F)``.
    """
    k = ensure_hermitian(K)
    L = _factor_K(k)
    F = np.asarray(F, dtype=complex)
    if F.ndim != 2 or F.shape[1] != k.shape[0]:
        raise DimensionMismatch(f"F must have {k.shape[0]} columns, got shape {F.shape}")
    kd = np.real(np.diag(k))
    Y = scipy.linalg.solve_triangular(L, F.T, lower=True)
    W = F / kd
    a = np.sum(np.real(F.conj() * W), axis=1)
    wkw = np.real(np.einsum("pi,ij,pj->p", W.conj(), k, W))
    return {
        Scheme.S11: P * np.sum(np.abs(Y) ** 2, axis=0),
        Scheme.S10: a**2 * P / wkw,
        Scheme.S00: P * a,
        Scheme.SIID: P * np.sum(np.abs(F) ** 2, axis=1) / (kd.sum() / k.shape[0]),
    }


def expected_high_pr_snr(K, P):
    """Channel-averaged high-``P_R`` SNR for ``f ~ CN(0, I)``.

    S10 has no closed form and is left out.
    """
    k = ensure_hermitian(K)
    N = k.shape[0]
    _factor_K(k)
    kd = np.real(np.diag(k))
    tr_inv = float(np.real(np.trace(solve_hermitian(k, np.eye(N, dtype=complex)))))
    return {
        Scheme.S11: P * tr_inv,
        Scheme.S00: P * float(np.sum(1.0 / kd)),
        Scheme.SIID: N * P / (kd.sum() / N),
    }
