# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled epoch loop; keep in lockstep with ``_kernel_py.py``."""

cimport numpy as cnp
import numpy as np

cnp.import_array()

cdef enum:
    CLASSICAL = 0
    GROVER = 1
    TEST = 2


cdef inline Py_ssize_t _bisect_right(double[::1] cum, Py_ssize_t n, double x) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if x < cum[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


def simulate_agent(double[::1] weights,
                   const cnp.int64_t[::1] rewarded_ids,
                   const cnp.int64_t[::1] other_ids,
                   const cnp.int32_t[::1] plan_k,
                   const double[::1] success,
                   const double[::1] q_table,
                   double lam,
                   const double[::1] uniforms,
                   cnp.int8_t[::1] strategy,
                   cnp.int64_t[::1] seq,
                   cnp.int8_t[::1] reward,
                   double[::1] q_before,
                   cnp.int32_t[::1] k_used,
                   double[::1] share):
    cdef Py_ssize_t n_rew = rewarded_ids.shape[0]
    cdef Py_ssize_t n_oth = other_ids.shape[0]
    cdef Py_ssize_t m = uniforms.shape[0]
    cdef double[::1] cum_r = np.empty(max(n_rew, 1), dtype=np.float64)
    cdef double[::1] cum_o = np.empty(max(n_oth, 1), dtype=np.float64)
    cdef Py_ssize_t i, e = 0, j = 0, pos, t, need
    cdef int k, r
    cdef double acc, q, s, u, x, part, total_o = 0.0
    cdef cnp.int64_t sid

    with nogil:
        acc = 0.0
        for i in range(n_rew):
            acc = acc + weights[rewarded_ids[i]]
            cum_r[i] = acc
        acc = 0.0
        for i in range(n_oth):
            acc = acc + weights[other_ids[i]]
            cum_o[i] = acc
        if n_oth > 0:
            total_o = cum_o[n_oth - 1]

        while e < m:
            k = plan_k[j]
            q = q_table[j]
            if k == 0:
                s = q
            else:
                s = success[j]
            need = k + 1
            if e + need > m:
                break
            u = uniforms[e]
            if (u < s and n_rew > 0) or n_oth == 0:
                x = (u / s) * cum_r[n_rew - 1]
                pos = _bisect_right(cum_r, n_rew, x)
                if pos >= n_rew:
                    pos = n_rew - 1
                sid = rewarded_ids[pos]
                r = 1
            else:
                x = ((u - s) / (1.0 - s)) * total_o
                pos = _bisect_right(cum_o, n_oth, x)
                if pos >= n_oth:
                    pos = n_oth - 1
                sid = other_ids[pos]
                r = 0

            if k == 0:
                strategy[e] = CLASSICAL
                seq[e] = sid
                reward[e] = r
                q_before[e] = q
                k_used[e] = 0
                share[e] = <double>r
            else:
                part = r / (k + 1.0)
                for i in range(e, e + k):
                    strategy[i] = GROVER
                    seq[i] = -1
                    reward[i] = 0
                    q_before[i] = q
                    k_used[i] = k
                    share[i] = part
                t = e + k
                strategy[t] = TEST
                seq[t] = sid
                reward[t] = r
                q_before[t] = q
                k_used[t] = k
                share[t] = part

            if r:
                weights[sid] += lam
                if pos > 0:
                    acc = cum_r[pos - 1]
                else:
                    acc = 0.0
                for i in range(pos, n_rew):
                    acc = acc + weights[rewarded_ids[i]]
                    cum_r[i] = acc
                j += 1
            e += need

        for i in range(e, m):
            strategy[i] = 0
            seq[i] = 0
            reward[i] = 0
            q_before[i] = 0.0
            k_used[i] = 0
            share[i] = 0.0

    return e, j
