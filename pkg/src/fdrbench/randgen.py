"""Seeded random variate generation.

All simulation randomness flows through :class:`RngState`, a thin owner of a
numpy ``Generator`` on the PCG64 bit generator. The gamma sampler is
Marsaglia-Tsang; the Poisson sampler uses transformed rejection (PTRS) for
large means and a multiplication method below mean 10. Negative binomial
draws are composed here as a gamma-Poisson mixture.

Every sampler accepts an optional ``size`` so whole matrices can be drawn in
one call. Array draws consume the stream in C order.
"""

from __future__ import annotations

import copy
from typing import Any

import numpy as np

__all__ = [
    "ParameterError",
    "RngState",
    "next_uniform",
    "sample_normal",
    "sample_gamma",
    "sample_poisson",
    "sample_nb",
]

_MASK64 = (1 << 64) - 1
_TINY = np.finfo(float).tiny


class ParameterError(ValueError):
    """Raised when a distribution or procedure receives an invalid parameter."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class RngState:
    """Single-owner random stream seeded by an unsigned 64-bit integer.

    Not safe to share between threads. Use :meth:`substream` for parallel
    work; substream ``k`` is seeded with ``seed + k``.
    """

    def __init__(self, seed: int):
        if seed < 0 or seed > _MASK64:
            raise ParameterError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = int(seed)
        self.generator = np.random.Generator(np.random.PCG64(self.seed))

    def substream(self, index: int) -> "RngState":
        return RngState((self.seed + index) & _MASK64)

    def get_state(self) -> dict[str, Any]:
        """Serializable snapshot of the generator position."""
        return {"seed": self.seed, "bit_generator": copy.deepcopy(self.generator.bit_generator.state)}

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> "RngState":
        rng = cls(state["seed"])
        rng.generator.bit_generator.state = copy.deepcopy(state["bit_generator"])
        return rng

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed})"


def _check_nonneg(name: str, value) -> None:
    arr = np.asarray(value, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise ParameterError(f"{name} must be >= 0")


def _check_pos(name: str, value) -> None:
    arr = np.asarray(value, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr <= 0):
        raise ParameterError(f"{name} must be > 0")


def next_uniform(state: RngState, size=None):
    """Uniform deviate(s) on [0, 1)."""
    return state.generator.random(size)


def sample_normal(state: RngState, mean=0.0, sd=1.0, size=None):
    _check_nonneg("sd", sd)
    return state.generator.normal(mean, sd, size)


def sample_gamma(state: RngState, shape, scale=1.0, size=None):
    """Gamma deviate(s) with mean ``shape * scale``."""
    _check_pos("shape", shape)
    _check_pos("scale", scale)
    return state.generator.gamma(shape, scale, size)


def sample_poisson(state: RngState, mean, size=None):
    _check_nonneg("mean", mean)
    return state.generator.poisson(mean, size)


def sample_nb(state: RngState, mu, dispersion, size=None):
    """Negative binomial deviate(s) with mean ``mu`` and variance ``mu + dispersion * mu**2``.

    The rate is drawn as ``Gamma(shape=1/dispersion, scale=mu*dispersion)`` and
    the count as Poisson at that rate. ``dispersion == 0`` goes straight to the
    Poisson sampler. Entries with ``mu == 0`` are always 0.
    """
    _check_nonneg("mu", mu)
    _check_nonneg("dispersion", dispersion)
    mu = np.asarray(mu, dtype=float)
    disp = np.asarray(dispersion, dtype=float)
    if size is not None:
        mu = np.broadcast_to(mu, size)
    # below the smallest normal float 1/dispersion overflows; those cells are Poisson
    mixed = disp >= _TINY
    if not np.any(mixed):
        out = np.asarray(state.generator.poisson(mu))
        return out if out.ndim else int(out)

    mu, disp, mixed = np.broadcast_arrays(mu, disp, mixed)
    rate = mu.astype(float, copy=True)
    # gamma needs strictly positive scale, so zero-mean cells stay at rate 0
    draw = mixed & (mu > 0)
    if np.any(draw):
        d = disp[draw]
        rate[draw] = state.generator.gamma(1.0 / d, mu[draw] * d)
    out = np.asarray(state.generator.poisson(rate))
    return out if out.ndim else int(out)
