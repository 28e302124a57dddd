"""Pure-numpy statevector kernels (fallback backend).

Same contract as the compiled backend in ``_kernels_cy``:

- basis index z carries bit b_i for spin variable i, bit 0 least significant
- spin value is s_i = 1 - 2*b_i
- all three kernels sweep in a fixed order (terms in list order, qubits
  ascending), so results are bit-deterministic for a given numpy build
"""

from __future__ import annotations

import numpy as np


def cost_diagonal(masks: np.ndarray, weights: np.ndarray, n_qubits: int) -> np.ndarray:
    """Dense cost vector of a spin polynomial over all 2**n_qubits states.

    ``masks[t]`` has the bits of term t's variables set; the term's spin
    product at state z is +1 when popcount(z & mask) is even, else -1.
    Terms accumulate in list order.
    """
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    dim = 1 << n_qubits
    z = np.arange(dim, dtype=np.uint64)
    costs = np.zeros(dim, dtype=np.float64)
    for mask, w in zip(masks, weights):
        parity = (np.bitwise_count(z & mask) & np.uint64(1)).astype(np.float64)
        costs += w * (1.0 - 2.0 * parity)
    return costs


def apply_phase(amplitudes: np.ndarray, costs: np.ndarray, gamma: float) -> None:
    """In-place phase layer: amplitude z gets the factor exp(-i*gamma*costs[z])."""
    amplitudes *= np.exp((-1j * gamma) * costs)


def apply_mixer(amplitudes: np.ndarray, beta: float, n_qubits: int) -> None:
    """In-place exp(+i*beta*X) on every qubit, qubit 0 first.

    Sign pairing: with the phase layer exp(-i*gamma*cost) targeting the cost
    minimum, positive beta is the direction that anneals |+> (the top state
    of sum X) toward low cost; flipping both signs conjugates the state.

    For qubit q the amplitudes pair up across stride 2**q:
    (a, b) -> (cos(beta)*a + i*sin(beta)*b, i*sin(beta)*a + cos(beta)*b).
    """
    c = np.cos(beta)
    s = np.sin(beta)
    for q in range(n_qubits):
        view = amplitudes.reshape(-1, 2, 1 << q)
        a = view[:, 0, :].copy()
        b = view[:, 1, :]
        view[:, 0, :] = c * a + (1j * s) * b
        view[:, 1, :] = c * b + (1j * s) * a
