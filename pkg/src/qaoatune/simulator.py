"""Exact dense statevector evolution of the alternating-operator circuit.

One layer applies the diagonal phase exp(-i*gamma*f(z)) to every amplitude
and then exp(-i*beta*X) on each qubit; the initial state is the uniform
superposition. The dense cost diagonal is computed once per polynomial and
cached (the fine-tuning loop re-evolves the same problem hundreds of times).

Randomness: shot sampling uses numpy's counter-based Philox generator with
64-bit seeds, so sample sets replay exactly across platforms for a fixed
kernel backend.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import ResourceLimitError
from .problems import Spectrum, SpinPolynomial, cost_values, evaluate_states

DEFAULT_SIMULATOR_LIMIT = 26
SIMULATOR_LIMIT_ENV = "QAOATUNE_SIMULATOR_LIMIT"


def simulator_limit(override: int | None = None) -> int:
    """Resolve the statevector qubit limit: argument, else env var, else 26."""
    if override is not None:
        return int(override)
    env = os.environ.get(SIMULATOR_LIMIT_ENV)
    return int(env) if env else DEFAULT_SIMULATOR_LIMIT


@dataclass(frozen=True)
class QaoaParameters:
    """Per-layer (gamma, beta) angle vectors; p = 0 means the bare |+> state."""

    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if len(self.gammas) != len(self.betas):
            raise ValueError(
                f"gamma/beta length mismatch: {len(self.gammas)} vs {len(self.betas)}"
            )

    @property
    def p(self) -> int:
        return len(self.gammas)

    def to_vector(self) -> np.ndarray:
        """Pack as [gammas..., betas...] (the optimizer's coordinate order)."""
        return np.asarray(self.gammas + self.betas, dtype=np.float64)

    @classmethod
    def from_vector(cls, vec: Sequence[float]) -> "QaoaParameters":
        v = np.asarray(vec, dtype=np.float64)
        if v.ndim != 1 or v.size % 2 != 0:
            raise ValueError("parameter vector must be 1-D with even length")
        p = v.size // 2
        return cls(tuple(v[:p]), tuple(v[p:]))


@dataclass(frozen=True)
class StateVector:
    """2**n_qubits complex amplitudes. Treat ``amplitudes`` as read-only."""

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    @property
    def num_states(self) -> int:
        return int(self.amplitudes.shape[0])

    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return (a.conj() * a).real

    def norm(self) -> float:
        return float(np.sqrt(self.probabilities().sum()))


@dataclass(frozen=True)
class SampleSet:
    """Measurement counts keyed by basis index, plus the seed that drew them."""

    counts: dict[int, int]
    shots: int
    seed: int

    def __post_init__(self) -> None:
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not add up to the shot total")

    def states(self) -> np.ndarray:
        return np.fromiter(sorted(self.counts), dtype=np.uint64, count=len(self.counts))


def uniform_state(n_qubits: int) -> StateVector:
    dim = 1 << n_qubits
    amps = np.full(dim, dim ** -0.5, dtype=np.complex128)
    return StateVector(n_qubits=n_qubits, amplitudes=amps)


def evolve(
    poly: SpinPolynomial, params: QaoaParameters, limit: int | None = None
) -> StateVector:
    """Run the p-layer circuit on ``poly`` and return the final state.

    Layer j multiplies amplitude z by exp(-i*gamma_j*f(z)) and then applies
    exp(-i*beta_j*X) qubit by qubit (ascending, the documented sweep order).
    """
    n = poly.num_variables
    cap = simulator_limit(limit)
    if n > cap:
        raise ResourceLimitError(f"N={n} exceeds simulator limit {cap}")
    costs = cost_values(poly)
    amps = uniform_state(n).amplitudes.copy()
    for gamma, beta in zip(params.gammas, params.betas):
        kernels.apply_phase(amps, costs, gamma)
        kernels.apply_mixer(amps, beta, n)
    return StateVector(n_qubits=n, amplitudes=amps)


def energy(state: StateVector, spec: Spectrum) -> float:
    """Exact expectation of the cost over the state's outcome distribution."""
    if spec.num_states != state.num_states:
        raise ValueError(
            f"spectrum dimension {spec.num_states} does not match state {state.num_states}"
        )
    return float(state.probabilities() @ spec.costs)


def ground_state_overlap(state: StateVector, spec: Spectrum) -> float:
    """Total probability of measuring an optimal basis state."""
    if spec.num_states != state.num_states:
        raise ValueError(
            f"spectrum dimension {spec.num_states} does not match state {state.num_states}"
        )
    probs = state.probabilities()
    return float(probs[np.asarray(spec.argmin_states, dtype=np.int64)].sum())


def sample(state: StateVector, shots: int, seed: int) -> SampleSet:
    """Draw ``shots`` measurements from |amplitude|^2, deterministic in ``seed``.

    Sampling is by inversion: ``shots`` uniforms from a Philox stream are
    pushed through the cumulative outcome distribution. Marginally this is
    exactly multinomial sampling; in addition, two states sampled with the
    SAME seed share their uniforms, so estimates at nearby parameter points
    are positively correlated — a variance reduction the fine-tuner exploits
    when comparing candidate steps (common random numbers).
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    probs = state.probabilities()
    cum = np.cumsum(probs / probs.sum())
    cum[-1] = 1.0
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    u = rng.random(shots)
    drawn = np.searchsorted(cum, u, side="right")
    states, counts = np.unique(drawn, return_counts=True)
    return SampleSet(
        counts={int(z): int(c) for z, c in zip(states, counts)},
        shots=shots,
        seed=int(seed),
    )


def estimate_energy(samples: SampleSet, poly: SpinPolynomial) -> float:
    """Sample mean of the cost: sum_z counts[z]/shots * f(z).

    Only visited states are evaluated, so this works above the brute-force
    spectrum limit. States contribute in ascending-index order.
    """
    if not samples.counts:
        raise ValueError("empty sample set")
    states = samples.states()
    values = evaluate_states(poly, states)
    weights = np.array([samples.counts[int(z)] for z in states], dtype=np.float64)
    return float((weights / samples.shots) @ values)
