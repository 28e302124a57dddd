# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled statevector kernels (hot path of the fine-tuning loop).

Mirrors _kernels_np: same bit convention (bit 0 least significant, spin
s_i = 1 - 2*b_i), same sweep orders (terms in list order, qubits ascending),
so the two backends agree to floating-point noise.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

cdef extern from *:
    """
    static inline int qaoatune_parity64(unsigned long long v) {
        return __builtin_parityll(v);
    }
    """
    int qaoatune_parity64(unsigned long long v) nogil


def cost_diagonal(masks, weights, int n_qubits):
    """Dense cost vector: costs[z] = sum_t w_t * (-1)^popcount(z & mask_t)."""
    cdef cnp.uint64_t[::1] m = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t dim = (<Py_ssize_t> 1) << n_qubits
    out = np.zeros(dim, dtype=np.float64)
    cdef double[::1] costs = out
    cdef Py_ssize_t n_terms = m.shape[0]
    cdef Py_ssize_t z, t
    cdef double acc
    with nogil:
        for z in range(dim):
            acc = 0.0
            for t in range(n_terms):
                # branchless sign flip: parity bit -> {+1.0, -1.0} multiplier
                # (a 50% data-dependent branch here costs more than the fmul)
                acc += w[t] * (1.0 - 2.0 * qaoatune_parity64((<unsigned long long> z) & m[t]))
            costs[z] = acc
    return out


def apply_phase(cnp.complex128_t[::1] amplitudes, const double[::1] costs, double gamma):
    """In-place phase layer: amplitude z gets the factor exp(-i*gamma*costs[z])."""
    cdef Py_ssize_t dim = amplitudes.shape[0]
    if costs.shape[0] != dim:
        raise ValueError("cost vector length does not match amplitude count")
    cdef Py_ssize_t z
    cdef double ang
    cdef double complex ph
    with nogil:
        for z in range(dim):
            ang = -gamma * costs[z]
            ph = cos(ang) + 1j * sin(ang)
            amplitudes[z] = amplitudes[z] * ph


def apply_mixer(cnp.complex128_t[::1] amplitudes, double beta, int n_qubits):
    """In-place exp(+i*beta*X) on every qubit, qubit 0 first.

    Positive beta anneals |+> toward the cost minimum under the
    exp(-i*gamma*cost) phase convention (see _kernels_np.apply_mixer).
    For qubit q the pairs (i, i+2**q) tile the vector in blocks of 2**(q+1);
    walking block-by-block keeps both loads sequential.
    """
    cdef Py_ssize_t dim = amplitudes.shape[0]
    cdef double c = cos(beta)
    cdef double complex w = 1j * sin(beta)
    cdef Py_ssize_t q, base, i, j, stride, step
    cdef double complex x, y
    for q in range(n_qubits):
        stride = (<Py_ssize_t> 1) << q
        step = stride << 1
        with nogil:
            base = 0
            while base < dim:
                for i in range(base, base + stride):
                    j = i + stride
                    x = amplitudes[i]
                    y = amplitudes[j]
                    amplitudes[i] = c * x + w * y
                    amplitudes[j] = c * y + w * x
                base += step
