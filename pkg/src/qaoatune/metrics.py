"""Solution-quality metrics, exponential scaling fits, and the depth benchmark.

Covers the downstream analysis surface: approximation ratio, time-to-solution
(expected repetitions until an optimal sample), least-squares fits of
``tts(N) = 2**(alpha*N) + c`` with bootstrap confidence intervals, and the
qubits-times-depth progression benchmark run through a pluggable executor.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .errors import DegenerateSpectrumError
from .problems import SpinPolynomial, spectrum
from .simulator import QaoaParameters, energy, estimate_energy, evolve, sample

__all__ = [
    "ScalingFit",
    "DepthProgressionResult",
    "approximation_ratio",
    "time_to_solution",
    "fit_exponential",
    "depth_progression_benchmark",
    "exact_energy_executor",
    "sampling_executor",
    "ramp_family",
]


def approximation_ratio(value: float, f_min: float, f_max: float) -> float:
    """(value - f_max) / (f_min - f_max): 1 at the optimum, 0 at the worst state.

    Scale-invariant: dividing value, f_min, f_max by a common positive factor
    leaves the ratio unchanged, as does shifting all three by a constant.
    """
    if f_min == f_max:
        raise DegenerateSpectrumError(
            "approximation ratio undefined: f_min == f_max"
        )
    if f_min > f_max:
        raise ValueError("f_min must be below f_max")
    return (value - f_max) / (f_min - f_max)


def time_to_solution(overlap: float, confidence: float | None = None) -> float:
    """Expected repetitions until an optimal bitstring is sampled.

    Default is the plain 1/overlap expectation. Passing ``confidence`` (e.g.
    0.99) switches to the repetitions needed to see at least one optimum with
    that probability, log(1-confidence)/log(1-overlap). Zero overlap yields
    math.inf rather than raising.
    """
    if not 0.0 <= overlap <= 1.0:
        raise ValueError(f"overlap must be in [0, 1], got {overlap}")
    if overlap == 0.0:
        return math.inf
    if confidence is None:
        return 1.0 / overlap
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    if overlap == 1.0:
        return 1.0
    return math.log(1.0 - confidence) / math.log(1.0 - overlap)


# ---------------------------------------------------------------------------
# exponential scaling fit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingFit:
    """Result of fitting tts(N) = 2**(alpha*N) + c.

    ci_low/ci_high bound alpha at the 95% level from a seeded bootstrap over
    the input points; the interval always contains the point estimate.
    """

    alpha: float
    offset_c: float
    ci_low: float
    ci_high: float
    n_values: tuple[int, ...]
    residuals: tuple[float, ...]
    seed: int
    resamples: int

    def __post_init__(self):
        if not (self.ci_low <= self.alpha <= self.ci_high):
            raise ValueError("confidence interval must contain the estimate")

    def predict(self, n: float) -> float:
        return float(np.exp2(self.alpha * n) + self.offset_c)


def _model(n, alpha, c):
    return np.exp2(alpha * n) + c


def _fit_once(ns: np.ndarray, tts: np.ndarray) -> tuple[float, float]:
    # log2 slope as the starting alpha; clip so exp2 stays finite at p0
    pos = np.clip(tts, 1e-300, None)
    slope = np.polyfit(ns, np.log2(pos), 1)[0] if len(ns) >= 2 else 0.0
    alpha0 = float(np.clip(slope, -2.0, 2.0))
    # seed the offset too: starting from (~0, 0) on near-flat data leaves the
    # parameter vector so small that the relative xtol test stops LM in place
    c0 = float(np.mean(tts) - np.mean(np.exp2(alpha0 * ns)))
    with warnings.catch_warnings():
        # only popt is used; flat data makes the covariance inestimable
        warnings.simplefilter("ignore", OptimizeWarning)
        popt, _ = curve_fit(_model, ns, tts, p0=(alpha0, c0), maxfev=20000)
    return float(popt[0]), float(popt[1])


def fit_exponential(
    points: Iterable[tuple[float, float]],
    *,
    seed: int = 0,
    resamples: int = 1000,
) -> ScalingFit:
    """Least squares for tts = 2**(alpha*N) + c with a bootstrap CI on alpha.

    Needs at least three distinct N and strictly positive tts values. The
    bootstrap resamples points with replacement ``resamples`` times (>= 1000
    for the defaults); resamples that collapse to fewer than three distinct N
    or fail to converge are skipped. Deterministic for a given seed.
    """
    pts = [(float(n), float(t)) for n, t in points]
    if len({n for n, _ in pts}) < 3:
        raise ValueError("need at least 3 distinct N values to fit")
    if any(t <= 0 for _, t in pts):
        raise ValueError("tts values must be positive")
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    ns = np.array([n for n, _ in pts])
    tts = np.array([t for _, t in pts])

    alpha, c = _fit_once(ns, tts)
    residuals = tuple(float(r) for r in _model(ns, alpha, c) - tts)

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    boot: list[float] = []
    size = len(pts)
    for _ in range(resamples):
        idx = rng.integers(0, size, size=size)
        if len(set(ns[idx])) < 3:
            continue
        try:
            a, _ = _fit_once(ns[idx], tts[idx])
        except (RuntimeError, ValueError):
            continue
        if math.isfinite(a):
            boot.append(a)
    if boot:
        lo, hi = np.percentile(boot, [2.5, 97.5])
    else:  # pathological data: fall back to a degenerate interval
        lo = hi = alpha
    # the interval must contain the point estimate to be reportable
    lo = min(float(lo), alpha)
    hi = max(float(hi), alpha)
    return ScalingFit(
        alpha=alpha,
        offset_c=c,
        ci_low=lo,
        ci_high=hi,
        n_values=tuple(int(n) for n in ns),
        residuals=residuals,
        seed=seed,
        resamples=resamples,
    )


# ---------------------------------------------------------------------------
# depth progression benchmark
# ---------------------------------------------------------------------------

# executor contract: (poly, params, shots, seed) -> estimated energy
Executor = Callable[[SpinPolynomial, QaoaParameters, int, int], float]


def exact_energy_executor(
    poly: SpinPolynomial, params: QaoaParameters, shots: int, seed: int
) -> float:
    """Noiseless executor: exact statevector energy, shots and seed unused."""
    return energy(evolve(poly, params), spectrum(poly))


def sampling_executor(
    poly: SpinPolynomial, params: QaoaParameters, shots: int, seed: int
) -> float:
    """Finite-shot executor: evolve, draw ``shots`` samples, average the cost."""
    state = evolve(poly, params)
    return estimate_energy(sample(state, shots, seed), poly)


def ramp_family(delta: float) -> Callable[[int], QaoaParameters]:
    """Depth-indexed family of linear ramps sharing one slope constant."""
    from .schedules import ScheduleSpec, to_parameters

    def params_for(p: int) -> QaoaParameters:
        if p == 0:
            return QaoaParameters((), ())
        return to_parameters(ScheduleSpec.linear(delta, p))

    return params_for


@dataclass(frozen=True)
class DepthProgressionResult:
    """Largest depth whose energy still improves on the previous depth.

    ``energies[p]`` is the estimate at depth p (index 0 = the uniform state);
    only depths that were actually evaluated appear. best_p is the length of
    the strictly-decreasing prefix, and product = n_qubits * best_p.
    """

    n_qubits: int
    best_p: int
    product: int
    energies: tuple[float, ...]

    def __post_init__(self):
        if self.product != self.n_qubits * self.best_p:
            raise ValueError("product must equal n_qubits * best_p")


def depth_progression_benchmark(
    executor: Executor,
    poly: SpinPolynomial,
    params_for_depth: Callable[[int], QaoaParameters],
    p_max: int,
    shots: int,
    *,
    seed: int = 0,
) -> DepthProgressionResult:
    """Walk p = 0..p_max while each depth strictly improves on the last.

    Depth p is scored by ``executor(poly, params_for_depth(p), shots, seed_p)``
    with a per-depth seed derived from ``seed``; evaluation stops at the first
    depth that fails to improve, so ``energies`` may be shorter than p_max+1.
    An executor that never improves (e.g. constant energy) gives best_p = 0.
    """
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    energies: list[float] = []
    best_p = 0
    for p in range(p_max + 1):
        depth_seed = int(np.random.SeedSequence((seed, p)).generate_state(1, np.uint64)[0])
        try:
            value = float(executor(poly, params_for_depth(p), shots, depth_seed))
        except Exception as exc:
            raise RuntimeError(f"executor failed at depth p={p}") from exc
        energies.append(value)
        if p == 0:
            continue
        if value < energies[p - 1]:
            best_p = p
        else:
            break
    return DepthProgressionResult(
        n_qubits=poly.num_variables,
        best_p=best_p,
        product=poly.num_variables * best_p,
        energies=tuple(energies),
    )
