# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled fixed-order matrix multiply.

Every output element is accumulated as one left-to-right chain over the
inner dimension, with the multiply and the add rounded separately.  That
makes the result bit-identical to a naive triple loop (and to the numpy
fallback), while still vectorizing across output columns.
"""

DEF BLOCK = 32  # accumulator tile width; fits comfortably in vector registers


cdef void _gemm_nn(const double[:, ::1] a, const double[:, ::1] b,
                   double[:, ::1] out,
                   Py_ssize_t m, Py_ssize_t kk, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j, k, j0, tail
    cdef double aik
    cdef double acc[BLOCK]

    for i in range(m):
        j0 = 0
        # full tiles: constant trip count so the compiler can keep `acc`
        # in registers and vectorize the jj loops
        while j0 + BLOCK <= n:
            for j in range(BLOCK):
                acc[j] = 0.0
            for k in range(kk):
                aik = a[i, k]
                for j in range(BLOCK):
                    acc[j] = acc[j] + aik * b[k, j0 + j]
            for j in range(BLOCK):
                out[i, j0 + j] = acc[j]
            j0 += BLOCK
        tail = n - j0
        if tail > 0:
            for j in range(tail):
                acc[j] = 0.0
            for k in range(kk):
                aik = a[i, k]
                for j in range(tail):
                    acc[j] = acc[j] + aik * b[k, j0 + j]
            for j in range(tail):
                out[i, j0 + j] = acc[j]


def matmul_nn(const double[:, ::1] a, const double[:, ::1] b, double[:, ::1] out):
    """out[i, j] = sum_k a[i, k] * b[k, j], accumulated in ascending k."""
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t kk = a.shape[1]
    cdef Py_ssize_t n = b.shape[1]
    if b.shape[0] != kk or out.shape[0] != m or out.shape[1] != n:
        raise ValueError("kernel shape mismatch")
    with nogil:
        _gemm_nn(a, b, out, m, kk, n)
