"""Classical spin-polynomial cost functions.

A cost function is a weighted sum of spin monomials,

    f(s) = sum_T w_T * prod_{i in T} s_i,        s_i in {-1, +1},

held in canonical form: terms sorted by (order, indices), duplicate
variable sets merged, zero weights dropped. The global bit convention is
s_i = 1 - 2*b_i where b_i is bit i of the basis index (bit 0 least
significant); every consumer of basis indices in this package shares it.

Generators, the brute-force spectrum oracle, and the cost-rescaling
pre-processing step live here. Instances are immutable and hashable, which
lets the simulator cache their dense cost diagonals.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ResourceLimitError, RetryExhaustedError

DEFAULT_BRUTE_FORCE_LIMIT = 24
BRUTE_FORCE_LIMIT_ENV = "QAOATUNE_BRUTE_FORCE_LIMIT"

# Retries for the pairing-model regular graph generator.
_PAIRING_MAX_TRIES = 1000


def brute_force_limit(override: int | None = None) -> int:
    """Resolve the brute-force qubit limit: argument, else env var, else 24."""
    if override is not None:
        return int(override)
    env = os.environ.get(BRUTE_FORCE_LIMIT_ENV)
    return int(env) if env else DEFAULT_BRUTE_FORCE_LIMIT


@dataclass(frozen=True)
class SpinTerm:
    """One weighted monomial: weight * prod of the listed spin variables."""

    variables: tuple[int, ...]
    weight: float

    def __post_init__(self) -> None:
        if len(self.variables) < 1:
            raise ValueError("a term needs at least one variable")
        if any(b <= a for a, b in zip(self.variables, self.variables[1:])):
            raise ValueError(f"variable indices must be strictly increasing, got {self.variables}")
        if self.variables[0] < 0:
            raise ValueError("variable indices must be non-negative")

    @property
    def order(self) -> int:
        return len(self.variables)


@dataclass(frozen=True)
class SpinPolynomial:
    """Canonical spin polynomial on ``num_variables`` spins.

    ``offset`` is bookkeeping for generators whose natural objective has a
    constant part (LABS); it is excluded from ``evaluate`` and from the
    spectrum, which both follow the pure polynomial.
    """

    num_variables: int
    terms: tuple[SpinTerm, ...]
    label: str = ""
    offset: float = 0.0

    def __post_init__(self) -> None:
        if self.num_variables < 1:
            raise ValueError("num_variables must be positive")
        merged: dict[tuple[int, ...], float] = {}
        for term in self.terms:
            if term.variables[-1] >= self.num_variables:
                raise ValueError(
                    f"term {term.variables} out of range for N={self.num_variables}"
                )
            merged[term.variables] = merged.get(term.variables, 0.0) + term.weight
        canonical = tuple(
            SpinTerm(v, w)
            for v, w in sorted(merged.items(), key=lambda kv: (len(kv[0]), kv[0]))
            if w != 0.0
        )
        object.__setattr__(self, "terms", canonical)

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def max_order(self) -> int:
        return max((t.order for t in self.terms), default=0)

    def term_masks(self) -> tuple[np.ndarray, np.ndarray]:
        """(masks, weights) arrays: mask t has the bits of term t's variables set."""
        masks = np.zeros(len(self.terms), dtype=np.uint64)
        weights = np.zeros(len(self.terms), dtype=np.float64)
        for t, term in enumerate(self.terms):
            m = 0
            for i in term.variables:
                m |= 1 << i
            masks[t] = m
            weights[t] = term.weight
        return masks, weights


@dataclass(frozen=True)
class Spectrum:
    """Brute-force cost table over all 2**N basis states."""

    costs: np.ndarray = field(repr=False)
    f_min: float
    f_max: float
    argmin_states: tuple[int, ...]

    @property
    def num_states(self) -> int:
        return int(self.costs.shape[0])

    @property
    def num_optima(self) -> int:
        return len(self.argmin_states)

    def mean(self) -> float:
        return float(self.costs.mean())


def spins_of_index(z: int, n: int) -> np.ndarray:
    """Spin vector (+1/-1, length n) of basis index z under s_i = 1 - 2*b_i."""
    bits = (z >> np.arange(n)) & 1
    return 1 - 2 * bits


def evaluate(poly: SpinPolynomial, assignment: Sequence[int] | np.ndarray) -> float:
    """f(s) for one +/-1 assignment, summed in canonical term order."""
    s = np.asarray(assignment)
    if s.shape != (poly.num_variables,):
        raise ValueError(
            f"assignment length {s.shape} does not match N={poly.num_variables}"
        )
    total = 0.0
    for term in poly.terms:
        prod = 1
        for i in term.variables:
            prod *= int(s[i])
        total += term.weight * prod
    return total


def evaluate_states(poly: SpinPolynomial, states: np.ndarray) -> np.ndarray:
    """Vectorized f over an array of basis indices (only those states are touched).

    Used by the sample-based energy estimator, where N may exceed the
    brute-force limit; agrees with ``evaluate`` term for term.
    """
    z = np.ascontiguousarray(states, dtype=np.uint64)
    masks, weights = poly.term_masks()
    values = np.zeros(z.shape[0], dtype=np.float64)
    for mask, w in zip(masks, weights):
        parity = (np.bitwise_count(z & mask) & np.uint64(1)).astype(np.float64)
        values += w * (1.0 - 2.0 * parity)
    return values


@lru_cache(maxsize=8)
def cost_values(poly: SpinPolynomial) -> np.ndarray:
    """Cached dense cost diagonal (read-only). No limit check here; the
    public entry points (spectrum, simulator.evolve) enforce theirs."""
    masks, weights = poly.term_masks()
    costs = kernels.cost_diagonal(masks, weights, poly.num_variables)
    costs.flags.writeable = False
    return costs


def spectrum(poly: SpinPolynomial, limit: int | None = None) -> Spectrum:
    """Exhaustive spectrum of ``poly``; refuses N above the brute-force limit."""
    cap = brute_force_limit(limit)
    if poly.num_variables > cap:
        raise ResourceLimitError(
            f"N={poly.num_variables} exceeds brute-force limit {cap}"
        )
    costs = cost_values(poly)
    f_min = float(costs.min())
    f_max = float(costs.max())
    # degeneracy tolerance: rescaled weights turn integer-valued costs into
    # irrational ones, so ties at the minimum are only equal to ~1e-15*scale
    tol = 1e-12 * max(abs(f_min), abs(f_max), f_max - f_min, 1.0)
    argmin = tuple(int(z) for z in np.flatnonzero(costs <= f_min + tol))
    return Spectrum(costs=costs, f_min=f_min, f_max=f_max, argmin_states=argmin)


def rescale(poly: SpinPolynomial) -> tuple[SpinPolynomial, float]:
    """Divide all weights by the root-mean-square-per-order scaling factor.

    factor = sqrt( sum_k mean over order-k terms of w^2 ), with the order
    buckets counted on the canonical (merged) form. The constant offset is
    divided as well, so (evaluate + offset) scales uniformly.
    """
    if not poly.terms:
        raise ValueError("cannot rescale a polynomial with no nonzero terms")
    by_order: dict[int, list[float]] = {}
    for term in poly.terms:
        by_order.setdefault(term.order, []).append(term.weight)
    factor = math.sqrt(
        sum(sum(w * w for w in ws) / len(ws) for ws in by_order.values())
    )
    scaled = SpinPolynomial(
        num_variables=poly.num_variables,
        terms=tuple(SpinTerm(t.variables, t.weight / factor) for t in poly.terms),
        label=poly.label,
        offset=poly.offset / factor,
    )
    return scaled, factor


# ---------------------------------------------------------------------------
# instance generators
# ---------------------------------------------------------------------------

def gen_maxcut(edges: Iterable[tuple[int, int, float]], n: int, label: str = "") -> SpinPolynomial:
    """MaxCut as minimization: one term w*s_u*s_v per edge, parallel edges merged."""
    terms = []
    for u, v, w in edges:
        if u == v:
            raise ValueError(f"self-loop ({u},{v}) is not a cut edge")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u},{v}) out of range for n={n}")
        terms.append(SpinTerm((min(u, v), max(u, v)), float(w)))
    return SpinPolynomial(num_variables=n, terms=tuple(terms), label=label or f"maxcut-n{n}")


def gen_labs(n: int) -> SpinPolynomial:
    """Low-autocorrelation binary sequences, as an even spin polynomial.

    Sidelobe energy E(s) = sum_{k=1}^{N-1} C_k^2 with C_k = sum_i s_i s_{i+k}
    expands into quadratic terms 2*s_i*s_{i+2k} (from the j = i+k diagonal),
    quartic terms 2*s_i s_{i+k} s_j s_{j+k}, and the constant N(N-1)/2 which
    is recorded as ``offset`` so that evaluate + offset == E(s).
    """
    if n < 3:
        raise ValueError("LABS needs n >= 3")
    terms: list[SpinTerm] = []
    offset = 0.0
    for k in range(1, n):
        offset += n - k
        for i in range(n - k):
            for j in range(i + 1, n - k):
                if j == i + k:
                    idx: tuple[int, ...] = (i, i + 2 * k)
                else:
                    idx = tuple(sorted((i, i + k, j, j + k)))
                terms.append(SpinTerm(idx, 2.0))
    return SpinPolynomial(num_variables=n, terms=tuple(terms), label=f"labs-n{n}", offset=offset)


def gen_random_weighted_maxcut(
    n: int, degree: int, weight_dist: str, seed: int
) -> SpinPolynomial:
    """Random d-regular weighted MaxCut instance (pairing model, seeded Philox).

    The pairing model shuffles degree*n stubs and pairs them consecutively;
    pairings containing self-loops or multi-edges are rejected wholesale, so
    accepted graphs are simple and exactly degree-regular. Edge weights are
    drawn afterwards from U(0,1) ("uniform01") or N(0,1) ("gauss01").
    """
    if weight_dist not in ("uniform01", "gauss01"):
        raise ValueError(f"unknown weight_dist {weight_dist!r}")
    if degree >= n:
        raise ValueError(f"degree {degree} must be below n={n}")
    if degree < 1:
        raise ValueError("degree must be at least 1")
    if (n * degree) % 2 != 0:
        raise ValueError(f"n*degree = {n * degree} is odd; no {degree}-regular graph on {n} vertices")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    stubs = np.repeat(np.arange(n), degree)
    for _ in range(_PAIRING_MAX_TRIES):
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        edges = {(min(int(u), int(v)), max(int(u), int(v))) for u, v in pairs}
        if len(edges) != pairs.shape[0] or any(u == v for u, v in edges):
            continue
        edge_list = sorted(edges)
        if weight_dist == "uniform01":
            weights = rng.random(len(edge_list))
        else:
            weights = rng.normal(size=len(edge_list))
        label = f"maxcut-{degree}reg-{weight_dist}-n{n}-seed{seed}"
        return gen_maxcut(
            [(u, v, float(w)) for (u, v), w in zip(edge_list, weights)], n, label=label
        )
    raise RetryExhaustedError(
        f"no simple {degree}-regular pairing found on {n} vertices "
        f"after {_PAIRING_MAX_TRIES} tries"
    )


# ---------------------------------------------------------------------------
# problem file format: {"n", "label", "offset", "terms": [[[i, ...], w], ...]}
# ---------------------------------------------------------------------------

def problem_to_dict(poly: SpinPolynomial) -> dict:
    return {
        "n": poly.num_variables,
        "label": poly.label,
        "offset": poly.offset,
        "terms": [[list(t.variables), t.weight] for t in poly.terms],
    }


def problem_from_dict(data: dict) -> SpinPolynomial:
    terms = tuple(SpinTerm(tuple(int(i) for i in v), float(w)) for v, w in data["terms"])
    return SpinPolynomial(
        num_variables=int(data["n"]),
        terms=terms,
        label=str(data.get("label", "")),
        offset=float(data.get("offset", 0.0)),
    )


def save_problem(poly: SpinPolynomial, path: str | Path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(poly), indent=2, sort_keys=True) + "\n")


def load_problem(path: str | Path) -> SpinPolynomial:
    return problem_from_dict(json.loads(Path(path).read_text()))
