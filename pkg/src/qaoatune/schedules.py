"""Annealing-style schedules: low-dimensional families that expand into the
full per-layer (gamma, beta) vectors, plus the depth-extension interpolation.

All families evaluate the layer fraction f_j = j/(p+1) for j = 1..p (note:
not (j-1/2)/p, which some codebases use). gamma ramps up with f, beta ramps
down with (1 - g(f)) where g is the family's warp of f:

    linear   g(f) = f
    root     g(f) = sqrt(f)                     (small increments late)
    tangent  g(f) = (tan((f-1/2)/c) + tan(1/(2c))) / (2*tan(1/(2c)))
                                                 (small increments mid-ramp)

The extended linear family adds independent slope/intercept constants for
gamma and beta. The fourier family instead synthesizes the vectors from q
sine amplitudes u (gamma) and cosine amplitudes v (beta):

    gamma_j = sum_k u_k * sin((k-1/2)(j-1/2)pi/p)
    beta_j  = sum_k v_k * cos((k-1/2)(j-1/2)pi/p)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simulator import QaoaParameters

DEFAULT_TANGENT_C = 0.3

_VARIANTS = ("linear", "extended_linear", "root", "tangent", "fourier")


@dataclass(frozen=True)
class ScheduleSpec:
    """Tagged schedule family at a fixed depth. Use the factory classmethods."""

    variant: str
    p: int
    delta: float = 0.0
    gamma_slope: float = 0.0
    gamma_offset: float = 0.0
    beta_slope: float = 0.0
    beta_offset: float = 0.0
    tangent_c: float = DEFAULT_TANGENT_C
    u: tuple[float, ...] = ()
    v: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown schedule variant {self.variant!r}")
        if self.p < 1:
            raise ValueError("schedule depth p must be at least 1")
        if self.variant == "tangent" and self.tangent_c == 0.0:
            raise ValueError("tangent schedule constant c must be nonzero")
        if self.variant == "fourier":
            q = len(self.u)
            if q != len(self.v):
                raise ValueError("fourier amplitude vectors u and v must have equal length")
            if not 1 <= q <= self.p:
                raise ValueError(f"fourier needs 1 <= q <= p, got q={q}, p={self.p}")

    @classmethod
    def linear(cls, delta: float, p: int) -> "ScheduleSpec":
        return cls(variant="linear", p=p, delta=delta)

    @classmethod
    def extended_linear(
        cls,
        gamma_slope: float,
        gamma_offset: float,
        beta_slope: float,
        beta_offset: float,
        p: int,
    ) -> "ScheduleSpec":
        return cls(
            variant="extended_linear",
            p=p,
            gamma_slope=gamma_slope,
            gamma_offset=gamma_offset,
            beta_slope=beta_slope,
            beta_offset=beta_offset,
        )

    @classmethod
    def root(cls, delta: float, p: int) -> "ScheduleSpec":
        return cls(variant="root", p=p, delta=delta)

    @classmethod
    def tangent(cls, delta: float, p: int, c: float = DEFAULT_TANGENT_C) -> "ScheduleSpec":
        return cls(variant="tangent", p=p, delta=delta, tangent_c=c)

    @classmethod
    def fourier(cls, u, v, p: int) -> "ScheduleSpec":
        return cls(variant="fourier", p=p, u=tuple(float(x) for x in u), v=tuple(float(x) for x in v))


def _warped_fractions(spec: ScheduleSpec) -> np.ndarray:
    f = np.arange(1, spec.p + 1, dtype=np.float64) / (spec.p + 1)
    if spec.variant == "root":
        return np.sqrt(f)
    if spec.variant == "tangent":
        c = spec.tangent_c
        half = math.tan(1.0 / (2.0 * c))
        return (np.tan((f - 0.5) / c) + half) / (2.0 * half)
    return f


def to_parameters(spec: ScheduleSpec) -> QaoaParameters:
    """Expand a schedule into explicit length-p gamma and beta vectors."""
    if spec.variant == "fourier":
        j = np.arange(1, spec.p + 1, dtype=np.float64)
        k = np.arange(1, len(spec.u) + 1, dtype=np.float64)
        phase = np.outer(k - 0.5, (j - 0.5) * (math.pi / spec.p))
        gammas = np.asarray(spec.u) @ np.sin(phase)
        betas = np.asarray(spec.v) @ np.cos(phase)
        return QaoaParameters(tuple(gammas), tuple(betas))
    g = _warped_fractions(spec)
    if spec.variant == "extended_linear":
        gammas = spec.gamma_slope * g + spec.gamma_offset
        betas = spec.beta_slope * (1.0 - g) + spec.beta_offset
    else:
        gammas = spec.delta * g
        betas = spec.delta * (1.0 - g)
    return QaoaParameters(tuple(gammas), tuple(betas))


def interp_extend(optimized: QaoaParameters) -> QaoaParameters:
    """Stretch depth-p parameters into a depth-(p+1) initial point.

    Entry j (1-based, j = 1..p+1) mixes the source entries j-1 and j with
    weights (j-1)/p and (p-j+1)/p; at the two boundaries the out-of-range
    source entry carries weight zero and is never read.
    """
    p = optimized.p
    if p < 1:
        raise ValueError("cannot extend empty parameters")

    def stretch(src: tuple[float, ...]) -> tuple[float, ...]:
        out = []
        for j in range(1, p + 2):
            left = (j - 1) / p * src[j - 2] if j >= 2 else 0.0
            right = (p - j + 1) / p * src[j - 1] if j <= p else 0.0
            out.append(left + right)
        return tuple(out)

    return QaoaParameters(stretch(optimized.gammas), stretch(optimized.betas))


def parse_schedule(text: str, p: int) -> ScheduleSpec:
    """Parse CLI schedule syntax: ``linear:0.6``, ``extended:a:b:c:d``,
    ``root:0.6``, ``tangent:0.6`` or ``tangent:0.6:0.3``."""
    parts = text.split(":")
    name, args = parts[0], parts[1:]
    try:
        if name == "linear" and len(args) == 1:
            return ScheduleSpec.linear(float(args[0]), p)
        if name in ("extended", "extended_linear") and len(args) == 4:
            return ScheduleSpec.extended_linear(*(float(a) for a in args), p)
        if name == "root" and len(args) == 1:
            return ScheduleSpec.root(float(args[0]), p)
        if name == "tangent" and len(args) in (1, 2):
            c = float(args[1]) if len(args) == 2 else DEFAULT_TANGENT_C
            return ScheduleSpec.tangent(float(args[0]), p, c)
    except ValueError as exc:
        raise ValueError(f"bad schedule spec {text!r}: {exc}") from exc
    raise ValueError(
        f"bad schedule spec {text!r} (expect linear:D, extended:G1:G2:B1:B2, "
        f"root:D, or tangent:D[:C])"
    )
