"""
Numba-ядра обхода 2^N конфигураций в порядке кода Грея

Конфигурация кодируется целым: бит i установлен <=> s_i = +1, g(t) = t ^ (t >> 1).
Соседние коды отличаются одним битом (номер младшего установленного бита t),
поэтому энергия обновляется за O(степень вершины).
"""

import math

import numpy as np
from numba import njit, prange


@njit(cache=True, nogil=True)
def _lowest_set_bit(t):
    bit = 0
    while ((t >> bit) & 1) == 0:
        bit += 1
    return bit


@njit(cache=True, nogil=True)
def _spins_of_code(code, n):
    spins = np.empty(n, dtype=np.float64)
    for i in range(n):
        spins[i] = 1.0 if (code >> i) & 1 else -1.0
    return spins


@njit(cache=True, nogil=True)
def configuration_energy(fields, edge_i, edge_j, edge_v, spins):
    energy = 0.0
    for i in range(fields.shape[0]):
        energy += fields[i] * spins[i]
    for k in range(edge_i.shape[0]):
        energy += edge_v[k] * spins[edge_i[k]] * spins[edge_j[k]]
    return energy


@njit(cache=True, nogil=True)
def _flip(bit, spins, energy, fields, nbr_ptr, nbr_idx, nbr_val):
    local = fields[bit]
    for p in range(nbr_ptr[bit], nbr_ptr[bit + 1]):
        local += nbr_val[p] * spins[nbr_idx[p]]
    spins[bit] = -spins[bit]
    return energy + 2.0 * spins[bit] * local


@njit(cache=True, nogil=True)
def segment_moments(fields, edge_i, edge_j, edge_v, nbr_ptr, nbr_idx, nbr_val,
                    start, stop, beta, shift, with_gradient, moments, gradient):
    """
    Моменты на отрезке [start, stop) тура

    moments: [ref, S0, S1, S2, S3, последняя энергия], где S_k = sum w e^k,
    w = exp(-beta (E - ref)), e = E - shift, ref - минимальная энергия отрезка.
    gradient[r, k] = sum w e^r f_k, f_k = s_i для полей и s_i s_j для рёбер.
    """
    n = fields.shape[0]
    n_edges = edge_i.shape[0]
    spins = _spins_of_code(start ^ (start >> 1), n)
    energy = configuration_energy(fields, edge_i, edge_j, edge_v, spins)
    ref = energy
    s0 = 0.0
    s1 = 0.0
    s2 = 0.0
    s3 = 0.0
    for t in range(start, stop):
        if t > start:
            energy = _flip(_lowest_set_bit(t), spins, energy, fields, nbr_ptr, nbr_idx, nbr_val)
        if energy < ref:
            scale = math.exp(-beta * (ref - energy))
            s0 *= scale
            s1 *= scale
            s2 *= scale
            s3 *= scale
            if with_gradient:
                for r in range(3):
                    for k in range(n + n_edges):
                        gradient[r, k] *= scale
            ref = energy
        w = math.exp(-beta * (energy - ref))
        e = energy - shift
        we = w * e
        we2 = we * e
        s0 += w
        s1 += we
        s2 += we2
        s3 += we2 * e
        if with_gradient:
            for i in range(n):
                f = spins[i]
                gradient[0, i] += w * f
                gradient[1, i] += we * f
                gradient[2, i] += we2 * f
            for k in range(n_edges):
                f = spins[edge_i[k]] * spins[edge_j[k]]
                gradient[0, n + k] += w * f
                gradient[1, n + k] += we * f
                gradient[2, n + k] += we2 * f
    moments[0] = ref
    moments[1] = s0
    moments[2] = s1
    moments[3] = s2
    moments[4] = s3
    moments[5] = energy


@njit(cache=True, parallel=True)
def tour_moments(fields, edge_i, edge_j, edge_v, nbr_ptr, nbr_idx, nbr_val,
                 segment_length, beta, shift, with_gradient, moments, gradient):
    """Параллельный обход: отрезок s пишет только в moments[s] и gradient[s]"""
    for s in prange(moments.shape[0]):
        start = np.int64(s) * segment_length
        segment_moments(fields, edge_i, edge_j, edge_v, nbr_ptr, nbr_idx, nbr_val,
                        start, start + segment_length, beta, shift,
                        with_gradient, moments[s], gradient[s])


@njit(cache=True, nogil=True)
def segment_energies(fields, edge_i, edge_j, edge_v, nbr_ptr, nbr_idx, nbr_val, start, stop, out):
    n = fields.shape[0]
    spins = _spins_of_code(start ^ (start >> 1), n)
    energy = configuration_energy(fields, edge_i, edge_j, edge_v, spins)
    for t in range(start, stop):
        if t > start:
            energy = _flip(_lowest_set_bit(t), spins, energy, fields, nbr_ptr, nbr_idx, nbr_val)
        out[t] = energy


@njit(cache=True, parallel=True)
def tour_energies(fields, edge_i, edge_j, edge_v, nbr_ptr, nbr_idx, nbr_val, n_segments, segment_length, out):
    for s in prange(n_segments):
        start = np.int64(s) * segment_length
        segment_energies(fields, edge_i, edge_j, edge_v, nbr_ptr, nbr_idx, nbr_val,
                         start, start + segment_length, out)
