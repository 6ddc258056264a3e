"""Seedable channel draws and interference-induced noise covariances."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .numerics import as_matrix, as_vector

__all__ = [
    "RngStream",
    "InterferenceEnv",
    "sample_cn01_vector",
    "sample_cn01_matrix",
    "interference_covariance",
    "iid_equivalent_covariance",
]

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """One reproducible random substream.

    ``(seed, stream_id)`` fully determines the draws.  Monte Carlo trial
    ``t`` uses ``stream_id=t``; redraws after a numerical failure bump
    ``attempt`` so that they never collide with another trial's stream.
    """

    seed: int
    stream_id: int = 0
    attempt: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id", "attempt"):
            value = getattr(self, name)
            if not 0 <= value <= _U64:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer, got {value}")

    def generator(self):
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, self.attempt))
        return np.random.Generator(np.random.Philox(ss))


def _cn01(gen, shape):
    z = gen.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def sample_cn01_vector(n, rng):
    """``n`` i.i.d. CN(0, 1) entries.

    ``rng`` is either an :class:`RngStream` (fresh generator, so repeated
    calls give identical draws) or an existing ``numpy.random.Generator``
    that is advanced in place.
    """
    if n < 1:
        raise ValueError("n must be positive")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    return _cn01(gen, (int(n),))


def sample_cn01_matrix(rows, cols, rng):
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    return _cn01(gen, (int(rows), int(cols)))


@dataclass(frozen=True)
class InterferenceEnv:
    """Interferer-to-relay channels ``h_k`` with powers ``P_Ik``."""

    interferer_channels: tuple = field(default_factory=tuple)
    interferer_powers: tuple = field(default_factory=tuple)

    def __post_init__(self):
        chans = tuple(as_vector(h, "interferer channel") for h in self.interferer_channels)
        powers = tuple(float(p) for p in self.interferer_powers)
        if len(chans) != len(powers):
            raise DimensionMismatch(
                f"{len(chans)} interferer channels but {len(powers)} powers"
            )
        if any(p < 0 for p in powers):
            raise ValueError("interferer powers must be nonnegative")
        object.__setattr__(self, "interferer_channels", chans)
        object.__setattr__(self, "interferer_powers", powers)

    @classmethod
    def equal_split(cls, channels, total_power):
        """Split ``total_power`` evenly across the given channels."""
        channels = list(channels)
        q = len(channels)
        return cls(tuple(channels), tuple([total_power / q] * q) if q else ())

    @property
    def num_interferers(self):
        return len(self.interferer_channels)

    @property
    def total_power(self):
        return float(sum(self.interferer_powers))


def interference_covariance(env, local_noise_var=1.0, n=None):
    """``K = sum_k h_k h_k^H P_Ik + local_noise_var * I``.

    ``n`` is only needed when the environment has no interferers.
    """
    if local_noise_var <= 0:
        raise ValueError("local noise variance must be positive")
    dims = {h.size for h in env.interferer_channels}
    if n is not None:
        dims.add(int(n))
    if len(dims) != 1:
        raise DimensionMismatch(f"inconsistent relay counts {sorted(dims)}")
    (N,) = dims
    K = local_noise_var * np.eye(N, dtype=complex)
    for h, p in zip(env.interferer_channels, env.interferer_powers):
        K += p * np.outer(h, h.conj())
    # outer products leave roundoff-level imaginary parts on the diagonal
    return 0.5 * (K + K.conj().T)


def iid_equivalent_covariance(K):
    """Trace-matched white covariance ``(Tr K / N) I``."""
    k = as_matrix(K, "K")
    if k.shape[0] != k.shape[1]:
        raise DimensionMismatch(f"K must be square, got {k.shape}")
    N = k.shape[0]
    return (np.trace(k).real / N) * np.eye(N, dtype=complex)
